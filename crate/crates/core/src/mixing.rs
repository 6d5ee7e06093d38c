//! Checkers for the mixing and extension properties of an SFT.
//!
//! Every checker is a bounded search. A refutation always carries a finite
//! [`Witness`] that can be replayed; verification only covers the searched
//! bounds, which are recorded in the report.

use std::collections::{BTreeMap, HashMap};
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::geometry::{hypercube, Cube, Region, Shape, Site};
use crate::pattern::{Alphabet, Pattern, Symbol};
use crate::search::SearchBudget;
use crate::sft::{enumerate_language, MembershipOracle, SftSpec};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    SafeSymbol,
    Ssf,
    FirstOffenders,
    GExtension,
    BlockGluing,
    TransportEquivalence,
    MarkerNonOverlap,
    FactorWindow,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    VerifiedUpToBound,
    SufficientConditionMet,
    Refuted(Witness),
    /// A counterexample within the searched bounds that a larger bound
    /// might still resolve.
    RefutedAtBound(Witness),
}

/// Finite evidence that a property fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Witness {
    /// Replacing `site` of `pattern` by the candidate symbol leaves the language.
    SafeSymbol { pattern: Pattern, site: Site, replaced: Pattern, radius: u64 },
    /// Neighbor symbols (order `−e_1, +e_1, −e_2, …`) that no center accepts.
    Neighbors { symbols: Vec<Symbol> },
    /// Extends to `S + Q_g` but not to `S + Q_radius`.
    Extension { pattern: Pattern, g: u64, radius: u64 },
    /// Two accepted rectangle patterns with no joint admissible extension.
    Gluing { first: Pattern, second: Pattern, window: Region },
    /// A pattern that breaks the transported presentation.
    Transport { pattern: Pattern, image: Pattern, direction: String },
    /// The marker center agrees with its own translate by `vector`.
    SelfOverlap { vector: Site },
    /// A site where a factor window assertion fails.
    Site { site: Site, reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: Property,
    pub verdict: Verdict,
    /// Search bounds and counts, by name.
    pub bounds: BTreeMap<String, u64>,
}

impl PropertyReport {
    pub fn new(property: Property, verdict: Verdict) -> Self {
        PropertyReport { property, verdict, bounds: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, value: u64) -> Self {
        self.bounds.insert(key.to_string(), value);
        self
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self.verdict, Verdict::Refuted(_) | Verdict::RefutedAtBound(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match &self.verdict {
            Verdict::Refuted(w) | Verdict::RefutedAtBound(w) => Some(w),
            _ => None,
        }
    }
}

/// Safe-symbol check. A forbidden list that never mentions `a` settles it
/// outright; otherwise every accepted pattern on `C_n` must stay accepted
/// after any single site is replaced by `a`.
pub fn check_safe_symbol(spec: &SftSpec, a: Symbol, n: usize, radius: u64, budget: &SearchBudget) -> Result<PropertyReport> {
    if !spec.alphabet().contains(a) {
        return Err(Error::UnknownSymbolIndex(a.0));
    }
    if !spec.forbidden().iter().any(|f| f.uses_symbol(a)) {
        return Ok(PropertyReport::new(Property::SafeSymbol, Verdict::SufficientConditionMet));
    }
    let cube = hypercube(Cube::C, n as i64, spec.dim())?;
    let lang = enumerate_language(&cube, spec, radius, budget)?;
    for w in &lang.patterns {
        for (s, b) in w.iter() {
            if b == a {
                continue;
            }
            let mut replaced = w.clone();
            replaced.set(s.clone(), a);
            if !lang.contains(&replaced) {
                let witness = Witness::SafeSymbol { pattern: w.clone(), site: s.clone(), replaced, radius };
                return Ok(PropertyReport::new(Property::SafeSymbol, Verdict::Refuted(witness))
                    .with("side", n as u64)
                    .with("radius", radius));
            }
        }
    }
    Ok(PropertyReport::new(Property::SafeSymbol, Verdict::VerifiedUpToBound)
        .with("side", n as u64)
        .with("radius", radius)
        .with("patterns", lang.len() as u64))
}

/// Axis and orientation of a nearest-neighbor domino: the second site is
/// the first plus `e_axis`.
fn domino_axis(f: &Pattern) -> Option<(usize, Symbol, Symbol)> {
    if f.len() != 2 {
        return None;
    }
    let cells: Vec<(&Site, Symbol)> = f.iter().collect();
    let (lo, hi) = (cells[0], cells[1]);
    let diff = hi.0 - lo.0;
    let nonzero: Vec<usize> = (0..diff.dim()).filter(|&i| diff.coord(i) != 0).collect();
    match nonzero.as_slice() {
        [axis] if diff.coord(*axis) == 1 => Some((*axis, lo.1, hi.1)),
        _ => None,
    }
}

/// `allowed[2*axis + side][center][neighbor]` for the neighbor at
/// `−e_axis` (side 0) or `+e_axis` (side 1).
fn neighbor_table(spec: &SftSpec) -> Result<Vec<Vec<Vec<bool>>>> {
    let n = spec.alphabet().len();
    let mut allowed = vec![vec![vec![true; n]; n]; 2 * spec.dim()];
    for (i, f) in spec.forbidden().iter().enumerate() {
        let (axis, lo, hi) = domino_axis(f).ok_or(Error::NotNearestNeighbor(i))?;
        // center `hi` with `lo` at −e_axis, and center `lo` with `hi` at +e_axis
        allowed[2 * axis][hi.index()][lo.index()] = false;
        allowed[2 * axis + 1][lo.index()][hi.index()] = false;
    }
    Ok(allowed)
}

/// Single-site fillability for nearest-neighbor specs, by exhaustive scan of
/// the `|A|^{2d}` neighbor tuples.
pub fn check_ssf(spec: &SftSpec) -> Result<PropertyReport> {
    let allowed = neighbor_table(spec)?;
    let n = spec.alphabet().len();
    let slots = 2 * spec.dim();
    let mut tuple = vec![0usize; slots];
    let mut scanned: u64 = 0;
    loop {
        scanned += 1;
        let fillable = (0..n).any(|e| tuple.iter().enumerate().all(|(slot, &b)| allowed[slot][e][b]));
        if !fillable {
            let symbols = tuple.iter().map(|&b| Symbol(b as u16)).collect();
            return Ok(PropertyReport::new(Property::Ssf, Verdict::Refuted(Witness::Neighbors { symbols }))
                .with("tuples", scanned));
        }
        // odometer, last slot fastest
        let mut k = slots;
        loop {
            if k == 0 {
                return Ok(PropertyReport::new(Property::Ssf, Verdict::VerifiedUpToBound).with("tuples", scanned));
            }
            k -= 1;
            tuple[k] += 1;
            if tuple[k] < n {
                break;
            }
            tuple[k] = 0;
        }
    }
}

/// Nearest-neighbor SFT on `{0, …, n−1}` forbidding `a` next to `f(a)` in
/// every axis direction. With `n ≥ 2d+1` it has single-site fillability.
pub fn make_involution_sft(dim: usize, involution: &[usize]) -> Result<SftSpec> {
    let n = involution.len();
    if n < 2 {
        return Err(Error::InvalidInvolution("alphabet needs at least two symbols".into()));
    }
    for (a, &b) in involution.iter().enumerate() {
        if b >= n || involution[b] != a {
            return Err(Error::InvalidInvolution(format!("f(f({a})) != {a}")));
        }
    }
    if involution.iter().enumerate().all(|(a, &b)| a == b) {
        return Err(Error::InvalidInvolution("identity".into()));
    }
    let mut forbidden = Vec::new();
    for axis in 0..dim {
        let mut e = vec![0i64; dim];
        e[axis] = 1;
        for (a, &b) in involution.iter().enumerate() {
            forbidden.push(Pattern::from_cells(
                dim,
                [(Site::origin(dim), Symbol(a as u16)), (Site::from(e.clone()), Symbol(b as u16))],
            )?);
        }
    }
    SftSpec::new(dim, Alphabet::numeric(n)?, forbidden)
}

/// Nonempty subsets of `C_n` whose minimum corner is the origin: one
/// representative per translation class of shapes with diameter `< n`.
pub fn canonical_subsets(n: usize, dim: usize) -> Result<Vec<Shape>> {
    let cells: Vec<Site> = hypercube(Cube::C, n as i64, dim)?.iter().cloned().collect();
    if cells.len() > 24 {
        return Err(Error::BudgetExceeded(format!("2^{} subsets", cells.len())));
    }
    let mut out = Vec::new();
    for mask in 1u64..(1 << cells.len()) {
        let shape = Shape::from_sites(dim, cells.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, s)| s.clone()))?;
        if shape.min_corner().is_some_and(|c| c.is_origin()) {
            out.push(shape);
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// All nonempty subsets of `C_n` (not reduced up to translation).
pub fn all_subsets(n: usize, dim: usize) -> Result<Vec<Shape>> {
    let cells: Vec<Site> = hypercube(Cube::C, n as i64, dim)?.iter().cloned().collect();
    if cells.len() > 24 {
        return Err(Error::BudgetExceeded(format!("2^{} subsets", cells.len())));
    }
    (1u64..(1 << cells.len()))
        .map(|mask| Shape::from_sites(dim, cells.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, s)| s.clone())))
        .collect()
}

/// Boxes anchored at the origin with every side in `1..=max_side`.
pub fn rectangles(max_side: usize, dim: usize) -> Vec<Region> {
    let mut out = Vec::new();
    let mut sides = vec![1usize; dim];
    loop {
        out.push(Region::new(Site::origin(dim), sides.clone()));
        let mut k = dim;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            sides[k] += 1;
            if sides[k] <= max_side {
                break;
            }
            sides[k] = 1;
        }
    }
}

/// Patterns of diameter `≤ max_diameter` (up to translation) rejected by
/// the radius-`r` membership test while every proper subpattern passes it.
pub fn enumerate_first_offenders(spec: &SftSpec, max_diameter: usize, radius: u64, budget: &SearchBudget) -> Result<Vec<Pattern>> {
    let mut memo: HashMap<Pattern, bool> = HashMap::new();
    let mut oracles: HashMap<Shape, MembershipOracle> = HashMap::new();
    let mut accepts = |w: &Pattern, oracles: &mut HashMap<Shape, MembershipOracle>| -> Result<bool> {
        if w.is_empty() {
            return Ok(true);
        }
        let w = w.canonical();
        if let Some(&known) = memo.get(&w) {
            return Ok(known);
        }
        let shape = w.shape();
        if !oracles.contains_key(&shape) {
            oracles.insert(shape.clone(), MembershipOracle::new(spec, &shape, radius, budget)?);
        }
        let symbols: Vec<Symbol> = w.symbols().collect();
        let ok = oracles[&shape].accepts(&symbols, budget)?;
        memo.insert(w, ok);
        Ok(ok)
    };

    let alphabet = spec.alphabet().len();
    let mut offenders = Vec::new();
    for shape in canonical_subsets(max_diameter + 1, spec.dim())? {
        let sites: Vec<Site> = shape.iter().cloned().collect();
        let mut digits = vec![0usize; sites.len()];
        loop {
            let w = Pattern::from_shape_symbols(&shape, &digits.iter().map(|&d| Symbol(d as u16)).collect::<Vec<_>>());
            if !accepts(&w, &mut oracles)? {
                let mut minimal = true;
                for s in &sites {
                    let mut sub = w.clone();
                    sub = Pattern::from_cells(sub.dim(), sub.iter().filter(|(t, _)| *t != s).map(|(t, a)| (t.clone(), a)))?;
                    if !accepts(&sub, &mut oracles)? {
                        minimal = false;
                        break;
                    }
                }
                if minimal {
                    offenders.push(w);
                }
            }
            let mut k = digits.len();
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                digits[k] += 1;
                if digits[k] < alphabet {
                    break;
                }
                digits[k] = 0;
            }
            if digits.iter().all(|&d| d == 0) {
                break;
            }
        }
    }
    Ok(offenders)
}

/// Bounded g-extension check: every pattern on a family shape that extends
/// to `S + Q_g` must also extend to `S + Q_test_radius`.
pub fn check_g_extension(spec: &SftSpec, g: u64, shapes: &[Shape], test_radius: u64, budget: &SearchBudget) -> Result<PropertyReport> {
    let mut checked: u64 = 0;
    for shape in shapes {
        let near = MembershipOracle::new(spec, shape, g, budget)?;
        let far = MembershipOracle::new(spec, shape, test_radius, budget)?;
        let mut failure: Option<Result<Pattern>> = None;
        near.for_each(budget, |a| {
            checked += 1;
            match far.extends(a, budget) {
                Ok(true) => ControlFlow::Continue(()),
                Ok(false) => {
                    failure = Some(Ok(Pattern::from_shape_symbols(shape, a)));
                    ControlFlow::Break(())
                }
                Err(e) => {
                    failure = Some(Err(e));
                    ControlFlow::Break(())
                }
            }
        })?;
        if let Some(f) = failure {
            let pattern = f?;
            return Ok(PropertyReport::new(
                Property::GExtension,
                Verdict::RefutedAtBound(Witness::Extension { pattern, g, radius: test_radius }),
            )
            .with("g", g)
            .with("radius", test_radius)
            .with("patterns", checked));
        }
    }
    Ok(PropertyReport::new(Property::GExtension, Verdict::VerifiedUpToBound)
        .with("g", g)
        .with("radius", test_radius)
        .with("shapes", shapes.len() as u64)
        .with("patterns", checked))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GluingBounds {
    /// Largest rectangle side.
    pub rectangle_side: usize,
    /// Side of the cubic window the rectangles are placed in.
    pub window_side: usize,
    /// Verification radius used to enumerate rectangle patterns.
    pub radius: u64,
}

/// Bounded block gluing at gap `g`: any two accepted rectangle patterns
/// placed in the window at distance `> g` must have a joint locally
/// admissible extension to the whole window.
pub fn check_block_gluing(spec: &SftSpec, g: u64, bounds: GluingBounds, budget: &SearchBudget) -> Result<PropertyReport> {
    let dim = spec.dim();
    let window = Region::cube(Site::origin(dim), bounds.window_side);
    let problem = spec.problem(window.sites().collect(), |_| None, budget)?;

    let mut placed: Vec<(Region, usize)> = Vec::new();
    let mut languages = Vec::new();
    for (li, rect) in rectangles(bounds.rectangle_side, dim).into_iter().enumerate() {
        if rect.extents().iter().any(|&e| e > bounds.window_side) {
            languages.push(Vec::new());
            continue;
        }
        let lang = enumerate_language(&rect.to_shape(), spec, bounds.radius, budget)?;
        languages.push(lang.patterns);
        let slack: Vec<usize> = rect.extents().iter().map(|e| bounds.window_side - e + 1).collect();
        for pos in Region::new(Site::origin(dim), slack).sites() {
            placed.push((rect.translate(&pos), li));
        }
    }

    let mut pairs: u64 = 0;
    for (i, (r1, l1)) in placed.iter().enumerate() {
        for (r2, l2) in &placed[i + 1..] {
            if r1.distance(r2) <= g {
                continue;
            }
            for w1 in &languages[*l1] {
                let w1 = w1.translate(r1.origin());
                for w2 in &languages[*l2] {
                    let w2 = w2.translate(r2.origin());
                    pairs += 1;
                    let mut pins = problem.pins_from(&w1);
                    for (s, a) in w2.iter() {
                        pins[problem.var(s).expect("inside window")] = Some(a);
                    }
                    if problem.first(&pins, budget)?.is_none() {
                        let witness = Witness::Gluing { first: w1, second: w2, window: window.clone() };
                        return Ok(PropertyReport::new(Property::BlockGluing, Verdict::Refuted(witness))
                            .with("gap", g)
                            .with("pairs", pairs));
                    }
                }
            }
        }
    }
    Ok(PropertyReport::new(Property::BlockGluing, Verdict::VerifiedUpToBound)
        .with("gap", g)
        .with("rectangle_side", bounds.rectangle_side as u64)
        .with("window_side", bounds.window_side as u64)
        .with("radius", bounds.radius)
        .with("pairs", pairs))
}

/// Runs the bounded g-extension check and, if it passes, block gluing at
/// gap `2g + max diameter`.
pub fn fep_implies_block_gluing(
    spec: &SftSpec,
    g: u64,
    shapes: &[Shape],
    test_radius: u64,
    gluing: GluingBounds,
    budget: &SearchBudget,
) -> Result<PropertyReport> {
    let ext = check_g_extension(spec, g, shapes, test_radius, budget)?;
    if ext.is_refuted() {
        return Err(Error::Precondition(format!("{g}-extension check failed: {:?}", ext.witness())));
    }
    let gap = 2 * g + spec.max_diameter();
    check_block_gluing(spec, gap, gluing, budget)
}

/// Re-run the failing check a witness describes; true when it still fails.
pub fn replay(witness: &Witness, spec: &SftSpec, budget: &SearchBudget) -> Result<bool> {
    let accepted = |w: &Pattern, r: u64| -> Result<bool> {
        let oracle = MembershipOracle::new(spec, &w.shape(), r, budget)?;
        oracle.accepts(&w.symbols().collect::<Vec<_>>(), budget)
    };
    match witness {
        Witness::SafeSymbol { pattern, replaced, radius, .. } => Ok(accepted(pattern, *radius)? && !accepted(replaced, *radius)?),
        Witness::Neighbors { symbols } => {
            let allowed = neighbor_table(spec)?;
            Ok(!(0..spec.alphabet().len())
                .any(|e| symbols.iter().enumerate().all(|(slot, b)| allowed[slot][e][b.index()])))
        }
        Witness::Extension { pattern, g, radius } => Ok(accepted(pattern, *g)? && !accepted(pattern, *radius)?),
        Witness::Gluing { first, second, window } => {
            let problem = spec.problem(window.sites().collect(), |_| None, budget)?;
            let mut pins = problem.pins_from(first);
            for (s, a) in second.iter() {
                pins[problem.var(s).ok_or_else(|| Error::NotContained(s.clone()))?] = Some(a);
            }
            Ok(problem.first(&pins, budget)?.is_none())
        }
        _ => Err(Error::Precondition("witness does not belong to a mixing property".into())),
    }
}
