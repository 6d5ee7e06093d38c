//! Finite patterns over a finite alphabet.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::{Shape, Site};
use crate::{Error, Result};

/// Index of a symbol in its [`Alphabet`]; comparison follows declaration order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Symbol(pub u16);

impl Symbol {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        if names.len() > u16::MAX as usize {
            return Err(Error::AlphabetTooLarge(names.len()));
        }
        let mut seen = BTreeSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(Error::DuplicateSymbol(n.clone()));
            }
        }
        Ok(Alphabet { names })
    }

    /// Symbols named `0, 1, …, n−1`.
    pub fn numeric(n: usize) -> Result<Self> {
        Alphabet::new((0..n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + Clone {
        (0..self.names.len() as u16).map(Symbol)
    }

    pub fn name(&self, s: Symbol) -> &str {
        &self.names[s.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        self.names.iter().position(|n| n == name).map(|i| Symbol(i as u16))
    }

    pub fn contains(&self, s: Symbol) -> bool {
        s.index() < self.names.len()
    }

    pub fn min_symbol(&self) -> Symbol {
        Symbol(0)
    }

    pub fn max_symbol(&self) -> Symbol {
        Symbol(self.names.len() as u16 - 1)
    }
}

/// A positioned finite pattern: a shape with one symbol per site.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pattern {
    dim: usize,
    #[serde(with = "cell_list")]
    cells: BTreeMap<Site, Symbol>,
}

/// Cells as a `[site, symbol]` list, so patterns fit formats with string-only map keys.
mod cell_list {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serializer};

    use super::{Site, Symbol};

    pub fn serialize<S: Serializer>(cells: &BTreeMap<Site, Symbol>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(cells.iter())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<Site, Symbol>, D::Error> {
        let list: Vec<(Site, Symbol)> = Vec::deserialize(d)?;
        Ok(list.into_iter().collect())
    }
}

impl Pattern {
    pub fn empty(dim: usize) -> Self {
        Pattern { dim, cells: BTreeMap::new() }
    }

    pub fn from_cells(dim: usize, cells: impl IntoIterator<Item = (Site, Symbol)>) -> Result<Self> {
        let mut p = Pattern::empty(dim);
        for (s, a) in cells {
            s.check_dim(dim)?;
            if p.cells.insert(s.clone(), a).is_some() {
                return Err(Error::DuplicateSite(s));
            }
        }
        Ok(p)
    }

    /// Assign `symbol` to every site of `shape`.
    pub fn constant(shape: &Shape, symbol: Symbol) -> Self {
        Pattern { dim: shape.dim(), cells: shape.iter().map(|s| (s.clone(), symbol)).collect() }
    }

    /// Zip the sites of `shape` (in coordinate order) with `symbols`.
    pub fn from_shape_symbols(shape: &Shape, symbols: &[Symbol]) -> Self {
        assert_eq!(shape.len(), symbols.len());
        Pattern { dim: shape.dim(), cells: shape.iter().cloned().zip(symbols.iter().copied()).collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn get(&self, s: &Site) -> Option<Symbol> {
        self.cells.get(s).copied()
    }

    pub fn set(&mut self, s: Site, a: Symbol) {
        debug_assert_eq!(s.dim(), self.dim);
        self.cells.insert(s, a);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Site, Symbol)> + '_ {
        self.cells.iter().map(|(s, a)| (s, *a))
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.cells.values().copied()
    }

    pub fn shape(&self) -> Shape {
        Shape::from_sites(self.dim, self.cells.keys().cloned()).expect("dimension checked on insert")
    }

    pub fn diameter(&self) -> u64 {
        self.shape().diameter()
    }

    pub fn translate(&self, t: &Site) -> Pattern {
        Pattern { dim: self.dim, cells: self.cells.iter().map(|(s, a)| (s + t, *a)).collect() }
    }

    /// The translate whose shape has its minimum corner at the origin.
    pub fn canonical(&self) -> Pattern {
        match self.shape().min_corner() {
            Some(lo) => self.translate(&-&lo),
            None => self.clone(),
        }
    }

    /// Every symbol of the pattern is the same `a`.
    pub fn constant_symbol(&self) -> Option<Symbol> {
        let mut it = self.symbols();
        let first = it.next()?;
        it.all(|a| a == first).then_some(first)
    }

    pub fn uses_symbol(&self, a: Symbol) -> bool {
        self.symbols().any(|b| b == a)
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.cells.iter().map(|(s, a)| (s, a.0))).finish()
    }
}

/// True iff the shapes are translates and the symbols agree under that translation.
pub fn equal_up_to_translation(u: &Pattern, v: &Pattern) -> bool {
    u.dim == v.dim && u.len() == v.len() && u.canonical() == v.canonical()
}

/// Concatenation `vw` of patterns on disjoint shapes.
pub fn concat(v: &Pattern, w: &Pattern) -> Result<Pattern> {
    if v.dim != w.dim {
        return Err(Error::DimensionMismatch { expected: v.dim, found: w.dim });
    }
    let mut out = v.clone();
    for (s, a) in w.iter() {
        if out.cells.insert(s.clone(), a).is_some() {
            return Err(Error::OverlappingShapes(s.clone()));
        }
    }
    Ok(out)
}

/// Restriction of `w` to `t`.
pub fn subpattern(w: &Pattern, t: &Shape) -> Result<Pattern> {
    let mut out = Pattern::empty(w.dim);
    for s in t {
        match w.get(s) {
            Some(a) => {
                out.cells.insert(s.clone(), a);
            }
            None => return Err(Error::NotContained(s.clone())),
        }
    }
    Ok(out)
}

/// Largest shape for which [`proper_subpatterns`] enumerates subsets.
pub const MAX_SUBPATTERN_SITES: usize = 20;

/// Restrictions of `w` to every strict subset of its shape, canonicalized
/// and deduplicated.
pub fn proper_subpatterns(w: &Pattern) -> Result<BTreeSet<Pattern>> {
    let cells: Vec<(&Site, Symbol)> = w.iter().collect();
    let n = cells.len();
    if n > MAX_SUBPATTERN_SITES {
        return Err(Error::BudgetExceeded(format!("{n} sites exceed the subpattern limit")));
    }
    let full = (1u32 << n) - 1;
    let mut out = BTreeSet::new();
    for mask in 0..full {
        let p = Pattern {
            dim: w.dim,
            cells: cells
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, (s, a))| ((*s).clone(), *a))
                .collect(),
        };
        out.insert(p.canonical());
    }
    Ok(out)
}

/// All `t` with `shape(needle) + t ⊆ shape(haystack)` and matching symbols.
/// The empty needle occurs only at the zero vector.
pub fn find_occurrences(haystack: &Pattern, needle: &Pattern) -> BTreeSet<Site> {
    let mut out = BTreeSet::new();
    let mut cells = needle.iter();
    let Some((anchor, anchor_sym)) = cells.next() else {
        out.insert(Site::origin(needle.dim));
        return out;
    };
    let rest: Vec<(&Site, Symbol)> = cells.collect();
    for (h, a) in haystack.iter() {
        if a != anchor_sym {
            continue;
        }
        let t = h - anchor;
        if rest.iter().all(|(s, b)| haystack.get(&(*s + &t)) == Some(*b)) {
            out.insert(t);
        }
    }
    out
}

/// `|A|^n`, or `None` on overflow.
pub fn assignment_count(alphabet_len: usize, sites: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..sites {
        acc = acc.checked_mul(alphabet_len as u128)?;
    }
    Some(acc)
}

/// Rank of `w` among all assignments on `shape`: sites in coordinate order,
/// the first site most significant, symbols in alphabet order.
pub fn lex_rank(w: &Pattern, shape: &Shape, alphabet: &Alphabet) -> Result<u128> {
    if w.len() != shape.len() || !shape.iter().all(|s| w.get(s).is_some()) {
        return Err(Error::ShapeMismatch);
    }
    let base = alphabet.len() as u128;
    let mut rank: u128 = 0;
    for s in shape {
        let a = w.get(s).expect("checked above");
        if !alphabet.contains(a) {
            return Err(Error::UnknownSymbolIndex(a.0));
        }
        rank = rank.checked_mul(base).and_then(|r| r.checked_add(a.0 as u128)).ok_or(Error::RankOverflow)?;
    }
    Ok(rank)
}

/// Inverse of [`lex_rank`].
pub fn lex_unrank(rank: u128, shape: &Shape, alphabet: &Alphabet) -> Result<Pattern> {
    if let Some(total) = assignment_count(alphabet.len(), shape.len()) {
        if rank >= total {
            return Err(Error::RankOutOfRange { rank, total });
        }
    }
    let base = alphabet.len() as u128;
    let mut digits = vec![Symbol(0); shape.len()];
    let mut r = rank;
    for d in digits.iter_mut().rev() {
        *d = Symbol((r % base) as u16);
        r /= base;
    }
    Ok(Pattern::from_shape_symbols(shape, &digits))
}
