//! Integer-lattice primitives: sites, finite shapes, hypercubes, the
//! ℓ∞ metric and inner boundaries.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::{Error, Result};

/// A point of ℤ^d. Ordering is lexicographic on the coordinate tuple.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Site(SmallVec<[i64; 4]>);

impl Site {
    pub fn new(coords: impl IntoIterator<Item = i64>) -> Self {
        Site(coords.into_iter().collect())
    }

    pub fn origin(dim: usize) -> Self {
        Site(SmallVec::from_elem(0, dim))
    }

    /// The vector `v·(1,…,1)`.
    pub fn splat(dim: usize, v: i64) -> Self {
        Site(SmallVec::from_elem(v, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn coord(&self, axis: usize) -> i64 {
        self.0[axis]
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() == dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: dim, found: self.dim() })
        }
    }
}

impl fmt::Debug for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Add for &Site {
    type Output = Site;
    fn add(self, rhs: &Site) -> Site {
        debug_assert_eq!(self.dim(), rhs.dim());
        Site(self.0.iter().zip(rhs.0.iter()).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Site {
    type Output = Site;
    fn sub(self, rhs: &Site) -> Site {
        debug_assert_eq!(self.dim(), rhs.dim());
        Site(self.0.iter().zip(rhs.0.iter()).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Site {
    type Output = Site;
    fn neg(self) -> Site {
        Site(self.0.iter().map(|a| -a).collect())
    }
}

impl From<Vec<i64>> for Site {
    fn from(v: Vec<i64>) -> Self {
        Site(SmallVec::from_vec(v))
    }
}

impl<const N: usize> From<[i64; N]> for Site {
    fn from(v: [i64; N]) -> Self {
        Site::new(v)
    }
}

/// ℓ∞ distance `max_i |a_i − b_i|`.
pub fn linf_distance(a: &Site, b: &Site) -> Result<u64> {
    b.check_dim(a.dim())?;
    Ok(linf_unchecked(a, b))
}

pub(crate) fn linf_unchecked(a: &Site, b: &Site) -> u64 {
    a.0.iter().zip(b.0.iter()).map(|(x, y)| x.abs_diff(*y)).max().unwrap_or(0)
}

/// A finite subset of ℤ^d. Iteration follows coordinate-tuple order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Shape {
    dim: usize,
    sites: BTreeSet<Site>,
}

impl Shape {
    pub fn empty(dim: usize) -> Self {
        Shape { dim, sites: BTreeSet::new() }
    }

    pub fn from_sites(dim: usize, sites: impl IntoIterator<Item = Site>) -> Result<Self> {
        let mut shape = Shape::empty(dim);
        for s in sites {
            shape.insert(s)?;
        }
        Ok(shape)
    }

    pub fn insert(&mut self, site: Site) -> Result<bool> {
        site.check_dim(self.dim)?;
        Ok(self.sites.insert(site))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn contains(&self, site: &Site) -> bool {
        self.sites.contains(site)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Site> + '_ {
        self.sites.iter()
    }

    pub fn sites(&self) -> &BTreeSet<Site> {
        &self.sites
    }

    pub fn translate(&self, t: &Site) -> Shape {
        Shape { dim: self.dim, sites: self.sites.iter().map(|s| s + t).collect() }
    }

    pub fn is_subset(&self, other: &Shape) -> bool {
        self.sites.is_subset(&other.sites)
    }

    pub fn union(&self, other: &Shape) -> Shape {
        Shape { dim: self.dim, sites: self.sites.union(&other.sites).cloned().collect() }
    }

    pub fn difference(&self, other: &Shape) -> Shape {
        Shape { dim: self.dim, sites: self.sites.difference(&other.sites).cloned().collect() }
    }

    pub fn is_disjoint(&self, other: &Shape) -> bool {
        self.sites.is_disjoint(&other.sites)
    }

    /// Per-coordinate minimum, or `None` for the empty shape.
    pub fn min_corner(&self) -> Option<Site> {
        let first = self.sites.iter().next()?;
        let mut lo: Vec<i64> = first.coords().to_vec();
        for s in &self.sites {
            for (l, c) in lo.iter_mut().zip(s.coords()) {
                *l = (*l).min(*c);
            }
        }
        Some(Site::from(lo))
    }

    pub fn max_corner(&self) -> Option<Site> {
        let first = self.sites.iter().next()?;
        let mut hi: Vec<i64> = first.coords().to_vec();
        for s in &self.sites {
            for (h, c) in hi.iter_mut().zip(s.coords()) {
                *h = (*h).max(*c);
            }
        }
        Some(Site::from(hi))
    }

    /// The translate whose minimum corner is the origin.
    pub fn canonical(&self) -> Shape {
        match self.min_corner() {
            Some(lo) => self.translate(&-&lo),
            None => self.clone(),
        }
    }

    /// Maximum pairwise ℓ∞ distance; 0 for singletons and the empty shape.
    pub fn diameter(&self) -> u64 {
        match (self.min_corner(), self.max_corner()) {
            (Some(lo), Some(hi)) => linf_unchecked(&lo, &hi),
            _ => 0,
        }
    }

    /// Minkowski sum `S + Q_r`.
    pub fn dilate(&self, r: u64) -> Shape {
        let ball = hypercube(Cube::Q, r as i64, self.dim).expect("nonnegative radius");
        let mut sites = BTreeSet::new();
        for s in &self.sites {
            for q in ball.iter() {
                sites.insert(s + q);
            }
        }
        Shape { dim: self.dim, sites }
    }
}

impl<'a> IntoIterator for &'a Shape {
    type Item = &'a Site;
    type IntoIter = std::collections::btree_set::Iter<'a, Site>;
    fn into_iter(self) -> Self::IntoIter {
        self.sites.iter()
    }
}

/// `d(A,B) = min_{a∈A, b∈B} d(a,b)`.
pub fn set_distance(a: &Shape, b: &Shape) -> Result<u64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyShape);
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let mut best = u64::MAX;
    for x in a {
        for y in b {
            best = best.min(linf_unchecked(x, y));
            if best == 0 {
                return Ok(0);
            }
        }
    }
    Ok(best)
}

/// `∂_k S`: sites of `S` within distance `k` of some site outside `S`.
/// Empty for `k = 0`.
pub fn inner_boundary(shape: &Shape, k: u64) -> Shape {
    if k == 0 {
        return Shape::empty(shape.dim());
    }
    let ball = hypercube(Cube::Q, k as i64, shape.dim()).expect("nonnegative radius");
    let sites = shape
        .iter()
        .filter(|s| ball.iter().any(|q| !shape.contains(&(*s + q))))
        .cloned()
        .collect();
    Shape { dim: shape.dim(), sites }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Cube {
    /// `C_k = [0, k−1]^d`
    C,
    /// `Q_k = [−k, k]^d`
    Q,
}

pub fn hypercube(kind: Cube, k: i64, dim: usize) -> Result<Shape> {
    if k < 0 {
        return Err(Error::NegativeSize(k));
    }
    let bounds = match kind {
        Cube::C => Region::new(Site::origin(dim), vec![k as usize; dim]),
        Cube::Q => Region::new(Site::splat(dim, -k), vec![(2 * k + 1) as usize; dim]),
    };
    Ok(bounds.to_shape())
}

/// An axis-aligned box `origin + ∏ [0, extent_i)` with dense indexing.
/// Index order coincides with coordinate-tuple order.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Region {
    origin: Site,
    extents: Vec<usize>,
}

impl Region {
    pub fn new(origin: Site, extents: Vec<usize>) -> Self {
        assert_eq!(origin.dim(), extents.len());
        Region { origin, extents }
    }

    pub fn cube(origin: Site, side: usize) -> Self {
        let d = origin.dim();
        Region::new(origin, vec![side; d])
    }

    pub fn dim(&self) -> usize {
        self.extents.len()
    }

    pub fn origin(&self) -> &Site {
        &self.origin
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn len(&self) -> usize {
        self.extents.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Largest site, if nonempty.
    pub fn far_corner(&self) -> Option<Site> {
        if self.is_empty() {
            return None;
        }
        Some(Site::new(
            self.origin.coords().iter().zip(&self.extents).map(|(o, e)| o + *e as i64 - 1),
        ))
    }

    pub fn contains(&self, s: &Site) -> bool {
        s.dim() == self.dim()
            && s.coords()
                .iter()
                .zip(self.origin.coords())
                .zip(&self.extents)
                .all(|((c, o), e)| *c >= *o && *c < *o + *e as i64)
    }

    pub fn index_of(&self, s: &Site) -> Option<usize> {
        if !self.contains(s) {
            return None;
        }
        let mut idx = 0usize;
        for ((c, o), e) in s.coords().iter().zip(self.origin.coords()).zip(&self.extents) {
            idx = idx * e + (c - o) as usize;
        }
        Some(idx)
    }

    pub fn site_at(&self, mut idx: usize) -> Site {
        let mut coords = vec![0i64; self.dim()];
        for axis in (0..self.dim()).rev() {
            let e = self.extents[axis];
            coords[axis] = self.origin.coord(axis) + (idx % e) as i64;
            idx /= e;
        }
        Site::from(coords)
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (0..self.len()).map(move |i| self.site_at(i))
    }

    pub fn to_shape(&self) -> Shape {
        Shape { dim: self.dim(), sites: self.sites().collect() }
    }

    pub fn translate(&self, t: &Site) -> Region {
        Region { origin: &self.origin + t, extents: self.extents.clone() }
    }

    /// Grow by `r` on every side.
    pub fn inflate(&self, r: usize) -> Region {
        Region {
            origin: &self.origin - &Site::splat(self.dim(), r as i64),
            extents: self.extents.iter().map(|e| e + 2 * r).collect(),
        }
    }

    /// Shrink by `r` on every side (possibly to an empty box).
    pub fn deflate(&self, r: usize) -> Region {
        Region {
            origin: &self.origin + &Site::splat(self.dim(), r as i64),
            extents: self.extents.iter().map(|e| e.saturating_sub(2 * r)).collect(),
        }
    }

    /// ℓ∞ distance between two nonempty boxes.
    pub fn distance(&self, other: &Region) -> u64 {
        let mut best = 0u64;
        for axis in 0..self.dim() {
            let (a0, a1) = (self.origin.coord(axis), self.origin.coord(axis) + self.extents[axis] as i64 - 1);
            let (b0, b1) = (other.origin.coord(axis), other.origin.coord(axis) + other.extents[axis] as i64 - 1);
            let gap = if b0 > a1 {
                (b0 - a1) as u64
            } else if a0 > b1 {
                (a0 - b1) as u64
            } else {
                0
            };
            best = best.max(gap);
        }
        best
    }

    /// ℓ∞ distance from a site to this (nonempty) box.
    pub fn distance_to_site(&self, s: &Site) -> u64 {
        let mut best = 0u64;
        for axis in 0..self.dim() {
            let lo = self.origin.coord(axis);
            let hi = lo + self.extents[axis] as i64 - 1;
            let c = s.coord(axis);
            let gap = if c < lo {
                (lo - c) as u64
            } else if c > hi {
                (c - hi) as u64
            } else {
                0
            };
            best = best.max(gap);
        }
        best
    }
}
