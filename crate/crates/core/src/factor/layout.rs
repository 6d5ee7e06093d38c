//! Marker parameters, determined-zone layouts and islands.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::geometry::{Region, Site};
use crate::pattern::Pattern;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkerParams {
    pub g: u64,
    pub p: u64,
    pub q: u64,
    pub m: u64,
    pub k: u64,
    /// Set when `m` was supplied directly instead of as `2p + 2g + q`.
    pub synthetic: bool,
}

impl MarkerParams {
    /// Parameters of a genuine marker: `m = 2p + 2g + q`.
    pub fn real(dim: usize, g: u64, p: u64, q: u64, k: u64) -> Result<Self> {
        let params = MarkerParams { g, p, q, m: 2 * p + 2 * g + q, k, synthetic: false };
        params.validate(dim)?;
        Ok(params)
    }

    /// Parameters for a layout given directly, with free `m`.
    pub fn synthetic(dim: usize, g: u64, p: u64, m: u64, k: u64) -> Result<Self> {
        let params = MarkerParams { g, p, q: 0, m, k, synthetic: true };
        params.validate(dim)?;
        Ok(params)
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.k < 1 {
            return Err(Error::InvalidParams("k must be at least 1".into()));
        }
        let need = (2 * dim as u64 + 1) * self.g;
        if self.p <= need {
            return Err(Error::InvalidParams(format!("p = {} must exceed {need}", self.p)));
        }
        if self.synthetic {
            if self.zone_side() <= 7 * self.g {
                return Err(Error::InvalidParams(format!(
                    "zone side {} must exceed 7g = {}",
                    self.zone_side(),
                    7 * self.g
                )));
            }
        } else if self.m != 2 * self.p + 2 * self.g + self.q {
            return Err(Error::InvalidParams("m must equal 2p + 2g + q".into()));
        }
        Ok(())
    }

    /// Side `k + g + m` of a determined zone.
    pub fn zone_side(&self) -> u64 {
        self.k + self.g + self.m
    }

    /// Side `k + 2g + 2m` of a surrounding frame.
    pub fn frame_side(&self) -> u64 {
        self.k + 2 * self.g + 2 * self.m
    }

    /// Non-adjacent zones must be farther apart than this.
    pub fn separation(&self) -> u64 {
        2 * self.g + self.p
    }

    /// Radius of the sliding block code realized by the staged fill.
    pub fn code_radius(&self) -> u64 {
        6 * (self.k + 3 * self.g + 2 * self.m)
    }
}

/// What determines the ψ-digits of a zone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZoneCode {
    Digits(Vec<u128>),
    Rank(u128),
    Pattern(Pattern),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Zone {
    pub origin: Site,
    pub code: ZoneCode,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeterminedZoneLayout {
    pub dim: usize,
    pub params: MarkerParams,
    /// Sorted by origin.
    pub zones: Vec<Zone>,
    pub window: Region,
}

/// A maximal component of adjacent zones with its coordinate sets `T_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Island {
    /// Indices into the layout's zone list.
    pub zones: Vec<usize>,
    /// Per axis, the merged coordinate intervals covered by the zones.
    pub coords: Vec<Vec<(i64, i64)>>,
}

impl Island {
    /// Distance from coordinate `c` on `axis` to the complement of `T_axis`,
    /// 0 when `c ∉ T_axis`.
    pub fn coord_depth(&self, axis: usize, c: i64) -> u64 {
        self.coords[axis]
            .iter()
            .find(|(lo, hi)| *lo <= c && c <= *hi)
            .map_or(0, |(lo, hi)| (c - lo + 1).min(hi - c + 1) as u64)
    }

    pub fn depths(&self, s: &Site) -> Vec<u64> {
        (0..s.dim()).map(|a| self.coord_depth(a, s.coord(a))).collect()
    }
}

impl DeterminedZoneLayout {
    pub fn new(dim: usize, params: MarkerParams, mut zones: Vec<Zone>, window: Region) -> Result<Self> {
        params.validate(dim)?;
        if window.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: window.dim() });
        }
        for z in &zones {
            z.origin.check_dim(dim)?;
        }
        zones.sort_by(|a, b| a.origin.cmp(&b.origin));
        if let Some(w) = zones.windows(2).find(|w| w[0].origin == w[1].origin) {
            return Err(Error::InvalidLayout(format!("two zones at {}", w[0].origin)));
        }
        Ok(DeterminedZoneLayout { dim, params, zones, window })
    }

    pub fn zone_region(&self, i: usize) -> Region {
        Region::cube(self.zones[i].origin.clone(), self.params.zone_side() as usize)
    }

    pub fn zone_regions(&self) -> Vec<Region> {
        (0..self.zones.len()).map(|i| self.zone_region(i)).collect()
    }

    pub fn translate(&self, t: &Site) -> DeterminedZoneLayout {
        DeterminedZoneLayout {
            dim: self.dim,
            params: self.params,
            zones: self.zones.iter().map(|z| Zone { origin: &z.origin + t, code: z.code.clone() }).collect(),
            window: self.window.translate(t),
        }
    }

    /// Frame `zone − (g+m)·1 + C_{k+2g+2m}` of zone `i`.
    pub fn frame_region(&self, i: usize) -> Region {
        let shift = Site::splat(self.dim, (self.params.g + self.params.m) as i64);
        Region::cube(&self.zones[i].origin - &shift, self.params.frame_side() as usize)
    }
}

fn overlap_extents(a: &Region, b: &Region) -> Vec<u64> {
    (0..a.dim())
        .map(|ax| {
            let lo = a.origin().coord(ax).max(b.origin().coord(ax));
            let hi = (a.origin().coord(ax) + a.extents()[ax] as i64).min(b.origin().coord(ax) + b.extents()[ax] as i64);
            (hi - lo).max(0) as u64
        })
        .collect()
}

/// Validates the layout and groups zones into islands.
///
/// Zones at distance exactly `g + 1` are adjacent; their frames must then
/// overlap in a single `m`-cube or in an `m × (k+2g+2m)` band. Any other
/// pair must be farther apart than `2g + p`, islands must be more than `5g`
/// apart, and every zone needs a margin of `(d+1)g + 1` inside the window.
pub fn compute_islands(layout: &DeterminedZoneLayout) -> Result<Vec<Island>> {
    let params = &layout.params;
    let g = params.g;
    let zones = layout.zone_regions();
    let n = zones.len();
    let margin = (layout.dim as u64 + 1) * g + 1;
    for z in &zones {
        let need = z.inflate(margin as usize);
        let inside = need.origin().coords().iter().zip(layout.window.origin().coords()).all(|(a, b)| a >= b)
            && need.far_corner().zip(layout.window.far_corner()).is_some_and(|(a, b)| {
                a.coords().iter().zip(b.coords()).all(|(x, y)| x <= y)
            });
        if !inside {
            return Err(Error::InvalidLayout(format!("zone at {} lacks a margin of {margin} inside the window", z.origin())));
        }
    }

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    for i in 0..n {
        for j in i + 1..n {
            let d = zones[i].distance(&zones[j]);
            if d == g + 1 {
                let overlap = overlap_extents(&layout.frame_region(i), &layout.frame_region(j));
                let mut sorted = overlap.clone();
                sorted.sort_unstable();
                let m = params.m;
                let f = params.frame_side();
                let corner = sorted.iter().all(|&e| e == m);
                let band = sorted[..sorted.len() - 1].iter().all(|&e| e == m) && sorted[sorted.len() - 1] == f;
                if !(corner || band) {
                    return Err(Error::InvalidLayout(format!(
                        "zones at {} and {} are at distance g+1 but their frames overlap in {overlap:?}",
                        zones[i].origin(),
                        zones[j].origin()
                    )));
                }
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            } else if d <= params.separation() {
                return Err(Error::SeparationViolation {
                    first: zones[i].origin().clone(),
                    second: zones[j].origin().clone(),
                    distance: d,
                    required: params.separation(),
                });
            }
        }
    }

    let mut islands: Vec<Island> = Vec::new();
    let mut root_index: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        let idx = *root_index[r].get_or_insert_with(|| {
            islands.push(Island { zones: Vec::new(), coords: Vec::new() });
            islands.len() - 1
        });
        islands[idx].zones.push(i);
    }
    for island in &mut islands {
        island.coords = (0..layout.dim)
            .map(|ax| {
                let cs: BTreeSet<i64> = island
                    .zones
                    .iter()
                    .flat_map(|&z| {
                        let lo = zones[z].origin().coord(ax);
                        lo..lo + zones[z].extents()[ax] as i64
                    })
                    .collect();
                let mut ivs: Vec<(i64, i64)> = Vec::new();
                for c in cs {
                    match ivs.last_mut() {
                        Some((_, hi)) if *hi + 1 == c => *hi = c,
                        _ => ivs.push((c, c)),
                    }
                }
                ivs
            })
            .collect();
    }

    for (a, ia) in islands.iter().enumerate() {
        for ib in &islands[a + 1..] {
            let d = ia
                .zones
                .iter()
                .flat_map(|&i| ib.zones.iter().map(move |&j| (i, j)))
                .map(|(i, j)| zones[i].distance(&zones[j]))
                .min()
                .expect("islands are nonempty");
            // Collars of width g on both sides.
            if d.saturating_sub(2 * g) <= 5 * g {
                return Err(Error::InvalidLayout(format!("islands are only {} apart", d.saturating_sub(2 * g))));
            }
        }
    }
    Ok(islands)
}
