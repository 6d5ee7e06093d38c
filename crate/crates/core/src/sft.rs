//! SFT specifications and the language machinery built on [`crate::search`].
//!
//! Membership in the language of a ℤ^d SFT is undecidable for d ≥ 2, so
//! every language operation takes an explicit verification radius `r`: a
//! pattern on `S` is accepted when it is locally admissible and extends to
//! a locally admissible pattern on `S + Q_r`. The answer is exact only when
//! the spec carries a g-extension certificate with `g ≤ r`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::geometry::{Region, Shape, Site};
use crate::pattern::{find_occurrences, Alphabet, Pattern, Symbol};
use crate::search::{LocalProblem, SearchBudget};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SftSpec {
    alphabet: Alphabet,
    dim: usize,
    forbidden: Vec<Pattern>,
    max_diameter: u64,
    certified_extension: Option<u64>,
}

impl SftSpec {
    pub fn new(dim: usize, alphabet: Alphabet, forbidden: Vec<Pattern>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParams("dimension must be at least 1".into()));
        }
        for f in &forbidden {
            if f.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: f.dim() });
            }
            if f.is_empty() {
                return Err(Error::EmptyPattern);
            }
            if let Some(a) = f.symbols().find(|a| !alphabet.contains(*a)) {
                return Err(Error::UnknownSymbolIndex(a.0));
            }
        }
        let max_diameter = forbidden.iter().map(Pattern::diameter).max().unwrap_or(0);
        Ok(SftSpec { alphabet, dim, forbidden, max_diameter, certified_extension: None })
    }

    pub fn full_shift(dim: usize, alphabet: Alphabet) -> Self {
        SftSpec::new(dim, alphabet, Vec::new()).expect("no forbidden patterns to validate")
    }

    /// Symbols `0, 1` with `11` forbidden along every axis.
    pub fn hard_square(dim: usize) -> Self {
        let forbidden = (0..dim)
            .map(|axis| {
                let mut e = vec![0i64; dim];
                e[axis] = 1;
                Pattern::from_cells(dim, [(Site::origin(dim), Symbol(1)), (Site::from(e), Symbol(1))]).unwrap()
            })
            .collect();
        SftSpec::new(dim, Alphabet::numeric(2).unwrap(), forbidden).unwrap()
    }

    /// Record that this presentation has the g-extension property, which
    /// makes radius-`g` membership tests exact.
    pub fn with_extension_certificate(mut self, g: u64) -> Self {
        self.certified_extension = Some(g);
        self
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn forbidden(&self) -> &[Pattern] {
        &self.forbidden
    }

    /// Largest diameter over the forbidden list (0 when empty).
    pub fn max_diameter(&self) -> u64 {
        self.max_diameter
    }

    pub fn certified_extension(&self) -> Option<u64> {
        self.certified_extension
    }

    pub fn is_full_shift(&self) -> bool {
        self.forbidden.is_empty()
    }

    /// Backtracking problem over `sites` with the given fixed context.
    pub fn problem(
        &self,
        sites: Vec<Site>,
        context: impl Fn(&Site) -> Option<Symbol>,
        budget: &SearchBudget,
    ) -> Result<LocalProblem> {
        LocalProblem::new(&self.forbidden, self.alphabet.len(), sites, context, budget)
    }

    fn check_pattern(&self, w: &Pattern) -> Result<()> {
        if w.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: w.dim() });
        }
        if let Some(a) = w.symbols().find(|a| !self.alphabet.contains(*a)) {
            return Err(Error::UnknownSymbolIndex(a.0));
        }
        Ok(())
    }
}

/// A forbidden pattern found inside a larger pattern.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Occurrence {
    /// Index into the spec's forbidden list.
    pub forbidden: usize,
    /// Translation carrying the forbidden pattern onto the occurrence.
    pub offset: Site,
}

/// The first forbidden occurrence in `w` (forbidden-list order, then
/// translation order), if any.
pub fn first_violation(w: &Pattern, spec: &SftSpec) -> Result<Option<Occurrence>> {
    spec.check_pattern(w)?;
    for (i, f) in spec.forbidden.iter().enumerate() {
        if let Some(t) = find_occurrences(w, f).into_iter().next() {
            return Ok(Some(Occurrence { forbidden: i, offset: t }));
        }
    }
    Ok(None)
}

pub fn is_locally_admissible(w: &Pattern, spec: &SftSpec) -> Result<bool> {
    Ok(first_violation(w, spec)?.is_none())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extension {
    Extended(Pattern),
    /// Every candidate fill of the target was tried and failed.
    Exhausted,
    /// The input already contains a forbidden pattern.
    Refuted(Occurrence),
}

/// Lexicographically first locally admissible pattern on `target` that
/// agrees with `w`.
pub fn extend_pattern(w: &Pattern, spec: &SftSpec, target: &Shape, budget: &SearchBudget) -> Result<Extension> {
    if let Some(occ) = first_violation(w, spec)? {
        return Ok(Extension::Refuted(occ));
    }
    if let Some((s, _)) = w.iter().find(|(s, _)| !target.contains(s)) {
        return Err(Error::NotContained(s.clone()));
    }
    let problem = spec.problem(target.iter().cloned().collect(), |_| None, budget)?;
    let pins = problem.pins_from(w);
    Ok(match problem.first(&pins, budget)? {
        Some(symbols) => Extension::Extended(Pattern::from_shape_symbols(target, &symbols)),
        None => Extension::Exhausted,
    })
}

/// Outcome of a radius-`r` membership test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdmissibilityCertificate {
    /// Locally admissible and extendable to `S + Q_r`; may still lie
    /// outside the language.
    LocallyAdmissible { radius: u64 },
    /// Extendable to `S + Q_r` under a g-extension certificate with
    /// `g ≤ r`: exact membership.
    ExtensionCertified { g: u64 },
    /// Contains a forbidden pattern.
    Refuted(Occurrence),
    /// Locally admissible but no admissible extension to `S + Q_r`.
    NotExtendable { radius: u64 },
}

impl AdmissibilityCertificate {
    pub fn accepted(&self) -> bool {
        matches!(self, Self::LocallyAdmissible { .. } | Self::ExtensionCertified { .. })
    }
}

pub fn membership(w: &Pattern, spec: &SftSpec, radius: u64, budget: &SearchBudget) -> Result<AdmissibilityCertificate> {
    let target = w.shape().dilate(radius);
    Ok(match extend_pattern(w, spec, &target, budget)? {
        Extension::Refuted(occ) => AdmissibilityCertificate::Refuted(occ),
        Extension::Exhausted => AdmissibilityCertificate::NotExtendable { radius },
        Extension::Extended(_) => match spec.certified_extension {
            Some(g) if g <= radius => AdmissibilityCertificate::ExtensionCertified { g },
            _ => AdmissibilityCertificate::LocallyAdmissible { radius },
        },
    })
}

/// Reusable radius-`r` membership test for patterns on one fixed shape.
pub struct MembershipOracle {
    shape: Shape,
    inner: LocalProblem,
    outer: LocalProblem,
    outer_vars: Vec<usize>,
}

impl MembershipOracle {
    pub fn new(spec: &SftSpec, shape: &Shape, radius: u64, budget: &SearchBudget) -> Result<Self> {
        let inner = spec.problem(shape.iter().cloned().collect(), |_| None, budget)?;
        let outer = spec.problem(shape.dilate(radius).iter().cloned().collect(), |_| None, budget)?;
        let outer_vars = shape.iter().map(|s| outer.var(s).expect("S ⊆ S + Q_r")).collect();
        Ok(MembershipOracle { shape: shape.clone(), inner, outer, outer_vars })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// The locally admissible patterns on the shape, lexicographically.
    pub fn problem(&self) -> &LocalProblem {
        &self.inner
    }

    /// `symbols` follows the shape's site order.
    pub fn extends(&self, symbols: &[Symbol], budget: &SearchBudget) -> Result<bool> {
        let mut pins = vec![None; self.outer.len()];
        for (&v, &a) in self.outer_vars.iter().zip(symbols) {
            pins[v] = Some(a);
        }
        Ok(self.outer.first(&pins, budget)?.is_some())
    }

    /// Full test: local admissibility on the shape, then extension.
    pub fn accepts(&self, symbols: &[Symbol], budget: &SearchBudget) -> Result<bool> {
        let pins: Vec<Option<Symbol>> = symbols.iter().map(|&a| Some(a)).collect();
        if self.inner.first(&pins, budget)?.is_none() {
            return Ok(false);
        }
        self.extends(symbols, budget)
    }

    /// Visit accepted patterns in lexicographic order.
    pub fn for_each(
        &self,
        budget: &SearchBudget,
        mut visit: impl FnMut(&[Symbol]) -> std::ops::ControlFlow<()>,
    ) -> Result<()> {
        let mut failure = None;
        self.inner.search(&vec![None; self.inner.len()], budget, |a| match self.extends(a, budget) {
            Err(e) => {
                failure = Some(e);
                std::ops::ControlFlow::Break(())
            }
            Ok(false) => std::ops::ControlFlow::Continue(()),
            Ok(true) => visit(a),
        })?;
        failure.map_or(Ok(()), Err)
    }
}

/// Patterns on a shape accepted at a verification radius.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Language {
    pub shape: Shape,
    pub radius: u64,
    /// Lexicographically ordered.
    pub patterns: Vec<Pattern>,
    /// True when the spec's extension certificate makes the list exactly
    /// `L_S(X)`; otherwise it is a superset.
    pub exact: bool,
}

impl Language {
    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn contains(&self, w: &Pattern) -> bool {
        self.patterns.binary_search(w).is_ok()
    }
}

fn is_exact(spec: &SftSpec, radius: u64) -> bool {
    spec.certified_extension.is_some_and(|g| g <= radius)
}

pub fn enumerate_language(shape: &Shape, spec: &SftSpec, radius: u64, budget: &SearchBudget) -> Result<Language> {
    if shape.dim() != spec.dim {
        return Err(Error::DimensionMismatch { expected: spec.dim, found: shape.dim() });
    }
    let oracle = MembershipOracle::new(spec, shape, radius, budget)?;
    let mut patterns = Vec::new();
    oracle.for_each(budget, |a| {
        patterns.push(Pattern::from_shape_symbols(shape, a));
        std::ops::ControlFlow::Continue(())
    })?;
    Ok(Language { shape: shape.clone(), radius, patterns, exact: is_exact(spec, radius) })
}

/// `|enumerate_language(shape)|` without materializing the patterns.
pub fn count_language(shape: &Shape, spec: &SftSpec, radius: u64, budget: &SearchBudget) -> Result<u128> {
    if radius == 0 {
        let problem = spec.problem(shape.iter().cloned().collect(), |_| None, budget)?;
        return problem.count(&vec![None; problem.len()], budget);
    }
    let oracle = MembershipOracle::new(spec, shape, radius, budget)?;
    let mut n: u128 = 0;
    oracle.for_each(budget, |_| {
        n += 1;
        std::ops::ControlFlow::Continue(())
    })?;
    Ok(n)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyEstimate {
    pub count: u128,
    /// `ln(count) / n^d`.
    pub h: f64,
}

pub fn entropy_estimate(spec: &SftSpec, side: usize, radius: u64, budget: &SearchBudget) -> Result<EntropyEstimate> {
    let cube = Region::cube(Site::origin(spec.dim), side).to_shape();
    let count = count_language(&cube, spec, radius, budget)?;
    let volume = (side as f64).powi(spec.dim as i32);
    let h = if count == 0 { f64::NEG_INFINITY } else { (count as f64).ln() / volume };
    Ok(EntropyEstimate { count, h })
}

/// Symbols `a` whose constant point `a^{ℤ^d}` avoids every forbidden pattern.
pub fn fixed_point_symbols(spec: &SftSpec) -> BTreeSet<Symbol> {
    spec.alphabet
        .symbols()
        .filter(|a| !spec.forbidden.iter().any(|f| f.constant_symbol() == Some(*a)))
        .collect()
}

/// `X_P`: the points of `X` avoiding `p`.
pub fn derive_restriction(spec: &SftSpec, p: &Pattern) -> Result<SftSpec> {
    if p.is_empty() {
        return Err(Error::EmptyPattern);
    }
    spec.check_pattern(p)?;
    let mut forbidden = spec.forbidden.clone();
    forbidden.push(p.clone());
    SftSpec::new(spec.dim, spec.alphabet.clone(), forbidden)
}
