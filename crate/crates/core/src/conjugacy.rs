//! Sliding block codes and transport of forbidden lists across a conjugacy.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::geometry::{hypercube, inner_boundary, Cube, Shape, Site};
use crate::mixing::{Property, PropertyReport, Verdict, Witness};
use crate::pattern::{find_occurrences, Alphabet, Pattern, Symbol};
use crate::search::SearchBudget;
use crate::sft::{is_locally_admissible, SftSpec};
use crate::{Error, Result};

/// A block map with a finite rule table. Keys list the symbols of the
/// neighborhood `t + Q_n` in coordinate order of the offsets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlidingBlockCode {
    dim: usize,
    source: Alphabet,
    target: Alphabet,
    radius: u64,
    rule: BTreeMap<Vec<Symbol>, Symbol>,
}

impl SlidingBlockCode {
    pub fn new(
        dim: usize,
        source: Alphabet,
        target: Alphabet,
        radius: u64,
        rule: BTreeMap<Vec<Symbol>, Symbol>,
    ) -> Result<Self> {
        let width = (2 * radius as usize + 1).pow(dim as u32);
        for (key, out) in &rule {
            if key.len() != width {
                return Err(Error::InvalidParams(format!("rule key has {} symbols, expected {width}", key.len())));
            }
            if let Some(bad) = key.iter().find(|a| !source.contains(**a)) {
                return Err(Error::UnknownSymbolIndex(bad.0));
            }
            if !target.contains(*out) {
                return Err(Error::UnknownSymbolIndex(out.0));
            }
        }
        Ok(SlidingBlockCode { dim, source, target, radius, rule })
    }

    /// Tabulates `f` on every neighborhood over the source alphabet.
    pub fn from_fn(
        dim: usize,
        source: Alphabet,
        target: Alphabet,
        radius: u64,
        f: impl Fn(&[Symbol]) -> Symbol,
    ) -> Result<Self> {
        let width = (2 * radius as usize + 1).pow(dim as u32);
        let total = crate::pattern::assignment_count(source.len(), width)
            .filter(|&t| t <= 1 << 22)
            .ok_or_else(|| Error::BudgetExceeded(format!("{}^{width} neighborhoods", source.len())))?;
        let mut rule = BTreeMap::new();
        let mut key = vec![Symbol(0); width];
        for _ in 0..total {
            rule.insert(key.clone(), f(&key));
            for k in (0..width).rev() {
                key[k].0 += 1;
                if key[k].index() < source.len() {
                    break;
                }
                key[k] = Symbol(0);
            }
        }
        Self::new(dim, source, target, radius, rule)
    }

    /// Radius-0 code sending symbol `a` to `map[a]`.
    pub fn relabel(dim: usize, source: Alphabet, target: Alphabet, map: &[Symbol]) -> Result<Self> {
        if map.len() != source.len() {
            return Err(Error::InvalidParams("relabeling must cover the source alphabet".into()));
        }
        let rule = map.iter().enumerate().map(|(a, &b)| (vec![Symbol(a as u16)], b)).collect();
        Self::new(dim, source, target, 0, rule)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> u64 {
        self.radius
    }

    pub fn source(&self) -> &Alphabet {
        &self.source
    }

    pub fn target(&self) -> &Alphabet {
        &self.target
    }

    pub fn rule(&self) -> &BTreeMap<Vec<Symbol>, Symbol> {
        &self.rule
    }

    /// Offsets of `Q_n` in key order.
    pub fn offsets(&self) -> Vec<Site> {
        hypercube(Cube::Q, self.radius as i64, self.dim).expect("radius fits").iter().cloned().collect()
    }

    pub fn lookup(&self, key: &[Symbol]) -> Option<Symbol> {
        self.rule.get(key).copied()
    }

    /// Offsets whose symbol can change the output with all other
    /// neighborhood symbols held fixed.
    pub fn support(&self) -> Vec<Site> {
        let offsets = self.offsets();
        let mut out = Vec::new();
        for (u, off) in offsets.iter().enumerate() {
            let mut seen: HashMap<Vec<Symbol>, Symbol> = HashMap::new();
            let depends = self.rule.iter().any(|(key, &b)| {
                let mut masked = key.clone();
                masked[u] = Symbol(u16::MAX);
                *seen.entry(masked).or_insert(b) != b
            });
            if depends {
                out.push(off.clone());
            }
        }
        out
    }
}

/// Image of `w` on `S \ ∂_n S`. A fully eroded shape gives the empty pattern.
pub fn apply_code(code: &SlidingBlockCode, w: &Pattern) -> Result<Pattern> {
    if w.dim() != code.dim {
        return Err(Error::DimensionMismatch { expected: code.dim, found: w.dim() });
    }
    let shape = w.shape();
    let eroded = shape.difference(&inner_boundary(&shape, code.radius));
    let offsets = code.offsets();
    let mut key = Vec::with_capacity(offsets.len());
    let mut cells = Vec::with_capacity(eroded.len());
    for t in eroded.iter() {
        key.clear();
        key.extend(offsets.iter().map(|o| w.get(&(t + o)).expect("neighborhood inside shape")));
        let b = code.lookup(&key).ok_or_else(|| Error::UndefinedNeighborhood(t.clone()))?;
        cells.push((t.clone(), b));
    }
    Pattern::from_cells(code.dim, cells)
}

fn odometer(digits: &mut [u16], base: usize) -> bool {
    for k in (0..digits.len()).rev() {
        digits[k] += 1;
        if (digits[k] as usize) < base {
            return true;
        }
        digits[k] = 0;
    }
    false
}

fn check_enumeration(base: usize, sites: usize, budget: &SearchBudget) -> Result<()> {
    match crate::pattern::assignment_count(base, sites) {
        Some(t) if t <= budget.max_nodes as u128 => Ok(()),
        _ => Err(Error::BudgetExceeded(format!("{base}^{sites} patterns to enumerate"))),
    }
}

/// Patterns `w` on `S + Q_s` over the target alphabet whose decoding
/// contains some `v ∈ F` of shape `S`, deduplicated up to translation.
pub fn transport_forbidden(forbidden: &[Pattern], inverse: &SlidingBlockCode, budget: &SearchBudget) -> Result<Vec<Pattern>> {
    let base = inverse.source.len();
    let mut out = BTreeSet::new();
    for v in forbidden {
        let shape = v.shape().dilate(inverse.radius);
        check_enumeration(base, shape.len(), budget)?;
        let mut digits = vec![0u16; shape.len()];
        loop {
            let w = Pattern::from_shape_symbols(&shape, &digits.iter().map(|&d| Symbol(d)).collect::<Vec<_>>());
            let decoded = apply_code(inverse, &w)?;
            if !find_occurrences(&decoded, v).is_empty() {
                out.insert(w.canonical());
            }
            if !odometer(&mut digits, base) {
                break;
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Patterns on `{0} ∪ (supp φ + supp φ⁻¹)` where re-encoding the decoded
/// point changes the symbol at the origin. Both codes must be total.
pub fn consistency_patterns(code: &SlidingBlockCode, inverse: &SlidingBlockCode, budget: &SearchBudget) -> Result<Vec<Pattern>> {
    let dim = code.dim;
    let d_phi = code.support();
    let d_psi = inverse.support();
    let mut domain = Shape::from_sites(dim, [Site::origin(dim)])?;
    for a in &d_phi {
        for b in &d_psi {
            domain.insert(a + b)?;
        }
    }
    let sites: Vec<Site> = domain.iter().cloned().collect();
    check_enumeration(inverse.source.len(), sites.len(), budget)?;

    let psi_offsets = inverse.offsets();
    let phi_offsets = code.offsets();
    let psi_filler = inverse.source.min_symbol();
    let phi_filler = code.source.min_symbol();
    let mut out = BTreeSet::new();
    let mut digits = vec![0u16; sites.len()];
    loop {
        let w = Pattern::from_shape_symbols(&domain, &digits.iter().map(|&d| Symbol(d)).collect::<Vec<_>>());
        let mut decoded: HashMap<Site, Symbol> = HashMap::new();
        for u in &d_phi {
            let key: Vec<Symbol> = psi_offsets
                .iter()
                .map(|o| if d_psi.contains(o) { w.get(&(u + o)).expect("in domain") } else { psi_filler })
                .collect();
            let x = inverse.lookup(&key).ok_or_else(|| Error::UndefinedNeighborhood(u.clone()))?;
            decoded.insert(u.clone(), x);
        }
        let key: Vec<Symbol> = phi_offsets.iter().map(|o| decoded.get(o).copied().unwrap_or(phi_filler)).collect();
        let y = code.lookup(&key).ok_or_else(|| Error::UndefinedNeighborhood(Site::origin(dim)))?;
        if Some(y) != w.get(&Site::origin(dim)) {
            out.insert(w.canonical());
        }
        if !odometer(&mut digits, inverse.source.len()) {
            break;
        }
    }
    Ok(out.into_iter().collect())
}

/// Forbidden list for the image of `source` under `code`: the transported
/// list together with the consistency patterns of `code ∘ inverse`.
pub fn transport_presentation(
    source: &SftSpec,
    code: &SlidingBlockCode,
    inverse: &SlidingBlockCode,
    budget: &SearchBudget,
) -> Result<SftSpec> {
    let mut list: BTreeSet<Pattern> = transport_forbidden(source.forbidden(), inverse, budget)?.into_iter().collect();
    list.extend(consistency_patterns(code, inverse, budget)?);
    SftSpec::new(source.dim(), code.target.clone(), list.into_iter().collect())
}

/// Checks on `window` that decoding maps target-admissible patterns to
/// source-admissible ones and encoding maps source-admissible patterns to
/// target-admissible ones. Counts of both sides are reported.
pub fn verify_transport_equivalence(
    source: &SftSpec,
    target: &SftSpec,
    code: &SlidingBlockCode,
    inverse: &SlidingBlockCode,
    window: &Shape,
    budget: &SearchBudget,
) -> Result<PropertyReport> {
    let reach = code.radius.max(inverse.radius);
    if window.difference(&inner_boundary(window, reach)).is_empty() {
        return Err(Error::Precondition(format!("window too small for radius {reach}")));
    }
    let sites: Vec<Site> = window.iter().cloned().collect();

    let run = |spec: &SftSpec, map: &SlidingBlockCode, check: &SftSpec, direction: &str| -> Result<(u128, Option<Witness>)> {
        let problem = spec.problem(sites.clone(), |_| None, budget)?;
        let mut count: u128 = 0;
        let mut outcome: Result<Option<Witness>> = Ok(None);
        problem.search(&vec![None; sites.len()], budget, |a| {
            count += 1;
            let w = Pattern::from_shape_symbols(window, a);
            let step = apply_code(map, &w).and_then(|image| Ok((is_locally_admissible(&image, check)?, image)));
            match step {
                Ok((true, _)) => ControlFlow::Continue(()),
                Ok((false, image)) => {
                    outcome = Ok(Some(Witness::Transport { pattern: w, image, direction: direction.into() }));
                    ControlFlow::Break(())
                }
                Err(e) => {
                    outcome = Err(e);
                    ControlFlow::Break(())
                }
            }
        })?;
        Ok((count, outcome?))
    };

    let (target_count, decode_failure) = run(target, inverse, source, "decode")?;
    let report = |verdict, source_count: Option<u128>| {
        let mut r = PropertyReport::new(Property::TransportEquivalence, verdict)
            .with("window", window.len() as u64)
            .with("target_count", target_count as u64);
        if let Some(c) = source_count {
            r = r.with("source_count", c as u64);
        }
        r
    };
    if let Some(w) = decode_failure {
        return Ok(report(Verdict::Refuted(w), None));
    }
    let (source_count, encode_failure) = run(source, code, target, "encode")?;
    Ok(match encode_failure {
        Some(w) => report(Verdict::Refuted(w), Some(source_count)),
        None => report(Verdict::VerifiedUpToBound, Some(source_count)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sft::count_language;
    use proptest::prelude::*;

    fn s2(x: i64, y: i64) -> Site {
        Site::new([x, y])
    }

    fn pat(cells: &[((i64, i64), u16)]) -> Pattern {
        Pattern::from_cells(2, cells.iter().map(|((x, y), a)| (s2(*x, *y), Symbol(*a)))).unwrap()
    }

    fn bits() -> Alphabet {
        Alphabet::numeric(2).unwrap()
    }

    fn swap() -> SlidingBlockCode {
        SlidingBlockCode::relabel(2, bits(), bits(), &[Symbol(1), Symbol(0)]).unwrap()
    }

    fn identity() -> SlidingBlockCode {
        SlidingBlockCode::relabel(2, bits(), bits(), &[Symbol(0), Symbol(1)]).unwrap()
    }

    #[test]
    fn relabel_row() {
        let w = pat(&[((0, 0), 0), ((1, 0), 1), ((2, 0), 0)]);
        assert_eq!(apply_code(&swap(), &w).unwrap(), pat(&[((0, 0), 1), ((1, 0), 0), ((2, 0), 1)]));
    }

    #[test]
    fn majority_rule_on_c3() {
        let maj = SlidingBlockCode::from_fn(2, bits(), bits(), 1, |k| {
            Symbol((k.iter().filter(|a| a.0 == 1).count() >= 5) as u16)
        })
        .unwrap();
        let c3 = hypercube(Cube::C, 3, 2).unwrap();
        let mostly_one: Vec<Symbol> = (0..9).map(|i| Symbol((i % 4 != 0) as u16)).collect();
        let w = Pattern::from_shape_symbols(&c3, &mostly_one);
        assert_eq!(apply_code(&maj, &w).unwrap(), pat(&[((1, 1), 1)]));
        let c1 = hypercube(Cube::C, 1, 2).unwrap();
        assert!(apply_code(&maj, &Pattern::constant(&c1, Symbol(1))).unwrap().is_empty());
        assert_eq!(maj.support().len(), 9);
    }

    #[test]
    fn undefined_neighborhood_is_an_error() {
        let mut rule = BTreeMap::new();
        rule.insert(vec![Symbol(0)], Symbol(1));
        let partial = SlidingBlockCode::new(2, bits(), bits(), 0, rule).unwrap();
        let w = pat(&[((0, 0), 0), ((3, 0), 1)]);
        assert!(matches!(apply_code(&partial, &w), Err(Error::UndefinedNeighborhood(s)) if s == s2(3, 0)));
    }

    #[test]
    fn transport_examples() {
        let budget = SearchBudget::default();
        let hs = SftSpec::hard_square(2);
        assert_eq!(transport_forbidden(hs.forbidden(), &identity(), &budget).unwrap(), {
            let mut f: Vec<Pattern> = hs.forbidden().to_vec();
            f.sort();
            f
        });
        let mut expected = vec![pat(&[((0, 0), 0), ((1, 0), 0)]), pat(&[((0, 0), 0), ((0, 1), 0)])];
        expected.sort();
        assert_eq!(transport_forbidden(hs.forbidden(), &swap(), &budget).unwrap(), expected);
        assert!(transport_forbidden(&[], &swap(), &budget).unwrap().is_empty());
        assert!(consistency_patterns(&swap(), &swap(), &budget).unwrap().is_empty());
    }

    #[test]
    fn transported_shapes_are_dilated_sources() {
        let budget = SearchBudget::default();
        let smear = SlidingBlockCode::from_fn(2, bits(), bits(), 1, |k| k[4]).unwrap();
        let v = pat(&[((0, 0), 1), ((1, 0), 1)]);
        let out = transport_forbidden(std::slice::from_ref(&v), &smear, &budget).unwrap();
        let want = v.shape().dilate(1).canonical();
        assert!(!out.is_empty());
        assert!(out.iter().all(|w| w.shape() == want));
        assert_eq!(smear.support(), vec![s2(0, 0)]);
    }

    #[test]
    fn relabel_equivalence_counts() {
        let budget = SearchBudget::default();
        let hs = SftSpec::hard_square(2);
        let image = transport_presentation(&hs, &swap(), &swap(), &budget).unwrap();
        let c3 = hypercube(Cube::C, 3, 2).unwrap();
        let r = verify_transport_equivalence(&hs, &image, &swap(), &swap(), &c3, &budget).unwrap();
        assert_eq!(r.verdict, Verdict::VerifiedUpToBound);
        assert_eq!(r.bounds["source_count"], 63);
        assert_eq!(r.bounds["target_count"], 63);

        let same = transport_presentation(&hs, &identity(), &identity(), &budget).unwrap();
        let mut f = hs.forbidden().to_vec();
        f.sort();
        assert_eq!(same.forbidden(), f.as_slice());
    }

    #[test]
    fn corrupted_list_is_refuted() {
        let budget = SearchBudget::default();
        let hs = SftSpec::hard_square(2);
        let full = transport_forbidden(hs.forbidden(), &swap(), &budget).unwrap();
        let dropped = SftSpec::new(2, bits(), full[1..].to_vec()).unwrap();
        let c3 = hypercube(Cube::C, 3, 2).unwrap();
        let r = verify_transport_equivalence(&hs, &dropped, &swap(), &swap(), &c3, &budget).unwrap();
        let Some(Witness::Transport { image, direction, .. }) = r.witness() else { panic!("{r:?}") };
        assert_eq!(direction, "decode");
        assert!(!is_locally_admissible(image, &hs).unwrap());
    }

    /// Horizontal 2-block recoding of hard square: y(t) = (x(t), x(t+e_1)).
    fn two_block() -> (SlidingBlockCode, SlidingBlockCode) {
        let pairs = Alphabet::new(["00", "01", "10", "11"]).unwrap();
        let q1 = hypercube(Cube::Q, 1, 2).unwrap();
        let offs: Vec<Site> = q1.iter().cloned().collect();
        let (c, e) = (offs.iter().position(|o| *o == s2(0, 0)).unwrap(), offs.iter().position(|o| *o == s2(1, 0)).unwrap());
        let code = SlidingBlockCode::from_fn(2, bits(), pairs.clone(), 1, |k| Symbol(2 * k[c].0 + k[e].0)).unwrap();
        let inverse = SlidingBlockCode::from_fn(2, pairs, bits(), 0, |k| Symbol(k[0].0 >> 1)).unwrap();
        (code, inverse)
    }

    fn independent_sets(w: usize, h: usize) -> u128 {
        let n = w * h;
        (0u32..1 << n)
            .filter(|m| {
                (0..n).all(|i| {
                    let (x, y) = (i % w, i / w);
                    let on = |x: usize, y: usize| m >> (y * w + x) & 1 == 1;
                    !(on(x, y) && ((x + 1 < w && on(x + 1, y)) || (y + 1 < h && on(x, y + 1))))
                })
            })
            .count() as u128
    }

    #[test]
    fn higher_block_round_trip() {
        let budget = SearchBudget::default();
        let hs = SftSpec::hard_square(2).with_extension_certificate(0);
        let (code, inverse) = two_block();
        assert_eq!(code.support(), vec![s2(0, 0), s2(1, 0)]);
        let transported = transport_forbidden(hs.forbidden(), &inverse, &budget).unwrap();
        assert_eq!(transported.len(), 8);
        let consistency = consistency_patterns(&code, &inverse, &budget).unwrap();
        assert_eq!(consistency.len(), 8);
        let image = transport_presentation(&hs, &code, &inverse, &budget).unwrap();

        // A 3x3 block of the recoding corresponds to a 4x3 block of hard square.
        let c3 = hypercube(Cube::C, 3, 2).unwrap();
        let y_count = count_language(&c3, &image, 2, &budget).unwrap();
        let rect = crate::geometry::Region::new(s2(0, 0), vec![4, 3]).to_shape();
        assert_eq!(count_language(&rect, &hs, 0, &budget).unwrap(), independent_sets(4, 3));
        assert_eq!(y_count, independent_sets(4, 3));

        let window = hypercube(Cube::C, 4, 2).unwrap();
        let r = verify_transport_equivalence(&hs, &image, &code, &inverse, &window, &budget).unwrap();
        assert_eq!(r.verdict, Verdict::VerifiedUpToBound);
    }

    proptest! {
        #[test]
        fn apply_code_commutes_with_translation(
            syms in proptest::collection::vec(0u16..2, 16),
            tx in -20i64..20, ty in -20i64..20,
        ) {
            let (code, _) = two_block();
            let c4 = hypercube(Cube::C, 4, 2).unwrap();
            let w = Pattern::from_shape_symbols(&c4, &syms.iter().map(|&a| Symbol(a)).collect::<Vec<_>>());
            let t = s2(tx, ty);
            prop_assert_eq!(apply_code(&code, &w.translate(&t)).unwrap(), apply_code(&code, &w).unwrap().translate(&t));
        }
    }
}
