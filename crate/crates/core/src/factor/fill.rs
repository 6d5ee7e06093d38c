//! The six-stage fill of a planar window.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::factor::codec::PsiCodec;
use crate::factor::layout::{DeterminedZoneLayout, Zone, ZoneCode};
use crate::factor::mask::SiteMask;
use crate::factor::regions::ZoneGeometry;
use crate::geometry::{hypercube, Cube, Region, Shape, Site};
use crate::mixing::{Property, PropertyReport, Verdict, Witness};
use crate::pattern::{assignment_count, lex_unrank, Pattern, Symbol};
use crate::search::SearchBudget;
use crate::sft::{fixed_point_symbols, MembershipOracle, SftSpec};
use crate::{Error, Result};

/// Directions for Stage 4, in association order: up, left, down, right.
pub const EDGE_DIRECTIONS: [(i64, i64); 4] = [(0, 1), (-1, 0), (0, -1), (1, 0)];
/// Directions for Stage 6: up-left, up-right, down-left, down-right.
pub const CORNER_DIRECTIONS: [(i64, i64); 4] = [(-1, 1), (1, 1), (-1, -1), (1, -1)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StageLabel {
    U1,
    S2,
    Trim3,
    S4,
    Trim5,
    S6,
}

impl StageLabel {
    pub const ALL: [StageLabel; 6] =
        [StageLabel::U1, StageLabel::S2, StageLabel::Trim3, StageLabel::S4, StageLabel::Trim5, StageLabel::S6];

    /// Gray level used in snapshots.
    pub fn level(self) -> u8 {
        match self {
            StageLabel::U1 => 230,
            StageLabel::S2 => 120,
            StageLabel::Trim3 => 200,
            StageLabel::S4 => 160,
            StageLabel::Trim5 => 190,
            StageLabel::S6 => 60,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StageLabel::U1 => "U_1 (stage 1, background)",
            StageLabel::S2 => "S_2 (stage 2, determined zones)",
            StageLabel::Trim3 => "stage 3 trim",
            StageLabel::S4 => "S_4 (stage 4, rectangles)",
            StageLabel::Trim5 => "stage 5 trim",
            StageLabel::S6 => "S_6 (stage 6, holes)",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZoneRecord {
    pub origin: Site,
    pub island: usize,
    pub digits: Vec<u128>,
    /// `i_1` exceeded the zone language and the maximal pattern was used.
    pub clamped: bool,
}

/// A Stage 4 rectangle or Stage 6 hole and the choice made for it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionRecord {
    pub stage: u8,
    pub sites: Vec<Site>,
    /// Origin of the associated zone.
    pub zone: Site,
    /// Index of the ψ-digit used.
    pub j: u8,
    /// Other zones adjacent in the same direction, passed over by the
    /// least-origin rule.
    pub tied_with: Vec<Site>,
    pub requested: u128,
    pub clamped: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageTrace {
    pub window: Region,
    pub star: Symbol,
    pub u1: SiteMask,
    pub s2: SiteMask,
    pub u3: SiteMask,
    pub s4: SiteMask,
    pub u5: SiteMask,
    pub s6: SiteMask,
    pub v2: Vec<Option<Symbol>>,
    pub v4: Vec<Option<Symbol>>,
    pub v6: Vec<Symbol>,
    pub zones: Vec<ZoneRecord>,
    pub regions: Vec<RegionRecord>,
}

impl StageTrace {
    /// Label of each window site once `stage` (1–6) has finished.
    pub fn labels_after(&self, stage: u8) -> Vec<Option<StageLabel>> {
        let n = self.window.len();
        let v2 = self.u1.union(&self.s2);
        let v4 = self.u3.union(&self.s4);
        (0..n)
            .map(|i| {
                let mut label = None;
                if self.u1.get(i) {
                    label = Some(StageLabel::U1);
                }
                if stage >= 2 && self.s2.get(i) {
                    label = Some(StageLabel::S2);
                }
                if stage >= 3 && v2.get(i) && !self.u3.get(i) {
                    label = Some(StageLabel::Trim3);
                }
                if stage >= 4 && self.s4.get(i) {
                    label = Some(StageLabel::S4);
                }
                if stage >= 5 && v4.get(i) && !self.u5.get(i) {
                    label = Some(StageLabel::Trim5);
                }
                if stage >= 6 && self.s6.get(i) {
                    label = Some(StageLabel::S6);
                }
                label
            })
            .collect()
    }

    pub fn translate(&self, t: &Site) -> StageTrace {
        let mut out = self.clone();
        out.window = self.window.translate(t);
        for m in [&mut out.u1, &mut out.s2, &mut out.u3, &mut out.s4, &mut out.u5, &mut out.s6] {
            *m = m.translate(t);
        }
        for z in &mut out.zones {
            z.origin = &z.origin + t;
        }
        for r in &mut out.regions {
            r.zone = &r.zone + t;
            r.tied_with = r.tied_with.iter().map(|s| s + t).collect();
            r.sites = r.sites.iter().map(|s| s + t).collect();
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StagedFill {
    pub output: Pattern,
    pub trace: StageTrace,
}

fn zone_digits(zone: &Zone, codec: Option<&PsiCodec>) -> Result<Vec<u128>> {
    let need_codec = || codec.ok_or_else(|| Error::Precondition("zone given by rank or pattern needs a codec".into()));
    let digits = match &zone.code {
        ZoneCode::Digits(d) => d.clone(),
        ZoneCode::Rank(r) => need_codec()?.encode_rank(*r)?,
        ZoneCode::Pattern(w) => need_codec()?.encode(w)?,
    };
    if digits.len() != 9 || digits.contains(&0) {
        return Err(Error::InvalidLayout(format!("zone at {} needs nine digits, each at least 1", zone.origin)));
    }
    Ok(digits)
}

/// The `n`-th (0-based) pattern on the sorted `sites` passing `accept`,
/// clamped to the maximal one. Full shifts are unranked directly.
fn select_pattern(
    spec: &SftSpec,
    sites: Vec<Site>,
    context: impl Fn(&Site) -> Option<Symbol>,
    n: u128,
    budget: &SearchBudget,
    accept: impl FnMut(&[Symbol]) -> Result<bool>,
) -> Result<Option<(Vec<Symbol>, bool)>> {
    if spec.is_full_shift() {
        let shape = Shape::from_sites(spec.dim(), sites)?;
        let (rank, clamped) = match assignment_count(spec.alphabet().len(), shape.len()) {
            Some(total) if n >= total => (total - 1, true),
            _ => (n, false),
        };
        let w = lex_unrank(rank, &shape, spec.alphabet())?;
        return Ok(Some((w.symbols().collect(), clamped)));
    }
    let problem = spec.problem(sites, context, budget)?;
    let pins = vec![None; problem.len()];
    Ok(problem.select(&pins, n, budget, accept)?.map(|s| (s.symbols, s.clamped)))
}

/// Runs Stages 1–6 on the layout window and returns the output together
/// with the full trace.
///
/// The target must forbid only patterns of diameter at most `g`, have `star`
/// as a fixed-point symbol, and carry an extension certificate of radius at
/// most `g`. Sites outside the window are treated as `star`.
pub fn run_staged_fill(
    layout: &DeterminedZoneLayout,
    spec: &SftSpec,
    star: Symbol,
    codec: Option<&PsiCodec>,
    budget: &SearchBudget,
) -> Result<StagedFill> {
    if layout.dim != 2 {
        return Err(Error::InvalidParams("the staged fill runs in dimension 2".into()));
    }
    if spec.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: spec.dim() });
    }
    let g = layout.params.g;
    if spec.max_diameter() > g {
        return Err(Error::Precondition(format!("forbidden patterns of diameter {} exceed g = {g}", spec.max_diameter())));
    }
    if !fixed_point_symbols(spec).contains(&star) {
        return Err(Error::Precondition(format!("`{}` is not a fixed-point symbol", spec.alphabet().name(star))));
    }
    match spec.certified_extension() {
        Some(c) if c <= g => {}
        _ => return Err(Error::Precondition(format!("target needs an extension certificate of radius at most {g}"))),
    }

    let geo = ZoneGeometry::new(layout)?;
    let window = layout.window.clone();
    let zones = &geo.zones;
    let mut zone_records = Vec::with_capacity(zones.len());
    for (i, z) in layout.zones.iter().enumerate() {
        zone_records.push(ZoneRecord { origin: z.origin.clone(), island: geo.zone_island[i], digits: zone_digits(z, codec)?, clamped: false });
    }

    // Stage 1
    let u1 = geo.u1();
    let mut assign: Vec<Option<Symbol>> = vec![None; window.len()];
    for i in u1.indices() {
        assign[i] = Some(star);
    }

    // Stage 2
    let s2 = geo.s2();
    if s2 != geo.zone_union() {
        return Err(Error::InvalidLayout("zones do not tile their islands' coordinate products".into()));
    }
    let side = layout.params.zone_side();
    let cube = hypercube(Cube::C, side as i64, 2)?;
    let cube_sites: Vec<Site> = cube.iter().cloned().collect();
    let mut contents: HashMap<u128, (Vec<Symbol>, bool)> = HashMap::new();
    for (zi, record) in zone_records.iter_mut().enumerate() {
        let i1 = record.digits[0];
        if let Entry::Vacant(slot) = contents.entry(i1) {
            let oracle = if spec.is_full_shift() { None } else { Some(MembershipOracle::new(spec, &cube, g, budget)?) };
            let picked = select_pattern(spec, cube_sites.clone(), |_| None, i1 - 1, budget, |a| match &oracle {
                Some(o) => o.extends(a, budget),
                None => Ok(true),
            })?
            .ok_or(Error::EmptyCandidates { stage: 2, region: zones[zi].origin().clone() })?;
            slot.insert(picked);
        }
        let (symbols, clamped) = &contents[&i1];
        record.clamped = *clamped;
        for (c, &a) in cube_sites.iter().zip(symbols) {
            let s = zones[zi].origin() + c;
            assign[window.index_of(&s).expect("zone inside window")] = Some(a);
        }
    }
    let v2 = assign.clone();

    // Stage 3
    let u3 = u1.union(&s2).trim(g);
    for (i, slot) in assign.iter_mut().enumerate() {
        if !u3.get(i) {
            *slot = None;
        }
    }

    let mut regions = Vec::new();
    let context_of = |assign: &Vec<Option<Symbol>>| {
        let assign = assign.clone();
        let window = window.clone();
        move |s: &Site| match window.index_of(s) {
            Some(i) => assign[i],
            None => Some(star),
        }
    };

    // Stage 4
    let s4 = geo.planar_s4();
    if !s4.is_disjoint(&u3) {
        return Err(Error::InvalidLayout("stage 4 region meets U_3".into()));
    }
    let reduced: Vec<Region> = zones.iter().map(|z| z.deflate(g as usize)).collect();
    let context = context_of(&assign);
    let mut fills: Vec<(Vec<Site>, Vec<Symbol>)> = Vec::new();
    for comp in s4.components() {
        let mut sites: Vec<Site> = comp.iter().map(|&i| window.site_at(i)).collect();
        sites.sort();
        let (zone, dir, tied) = associate(&sites, &reduced, zones, &EDGE_DIRECTIONS, |z, dir| {
            sites.iter().any(|r| z.contains(&(r + &Site::new([dir.0, dir.1]))))
        })
        .ok_or_else(|| Error::InvalidLayout(format!("rectangle at {} has no adjacent reduced zone", sites[0])))?;
        let j = 2 + dir;
        let requested = zone_records[zone].digits[j - 1];
        let (symbols, clamped) = select_pattern(spec, sites.clone(), &context, requested - 1, budget, |_| Ok(true))?
            .ok_or_else(|| Error::EmptyCandidates { stage: 4, region: sites[0].clone() })?;
        regions.push(RegionRecord {
            stage: 4,
            sites,
            zone: zones[zone].origin().clone(),
            j: j as u8,
            tied_with: tied,
            requested,
            clamped,
        });
        fills.push((regions.last().expect("just pushed").sites.clone(), symbols));
    }
    for (sites, symbols) in fills.drain(..) {
        for (s, a) in sites.iter().zip(symbols) {
            assign[window.index_of(s).expect("region inside window")] = Some(a);
        }
    }
    let v4 = assign.clone();

    // Stage 5
    let u5 = u3.union(&s4).trim(g);
    for (i, slot) in assign.iter_mut().enumerate() {
        if !u5.get(i) {
            *slot = None;
        }
    }

    // Stage 6
    let s6 = u5.complement();
    let doubly: Vec<Region> = zones.iter().map(|z| z.deflate(2 * g as usize)).collect();
    let context = context_of(&assign);
    for comp in s6.components() {
        let mut sites: Vec<Site> = comp.iter().map(|&i| window.site_at(i)).collect();
        sites.sort();
        let members: HashSet<&Site> = sites.iter().collect();
        let (zone, dir, tied) = associate(&sites, &doubly, zones, &CORNER_DIRECTIONS, |z, dir| {
            let Some(far) = z.far_corner() else { return false };
            let corner = Site::new([
                if dir.0 > 0 { z.origin().coord(0) } else { far.coord(0) },
                if dir.1 > 0 { z.origin().coord(1) } else { far.coord(1) },
            ]);
            members.contains(&(&corner - &Site::new([dir.0, dir.1])))
        })
        .ok_or_else(|| Error::InvalidLayout(format!("hole at {} has no adjacent doubly reduced zone", sites[0])))?;
        let j = 6 + dir;
        let requested = zone_records[zone].digits[j - 1];
        let (symbols, clamped) = select_pattern(spec, sites.clone(), &context, requested - 1, budget, |_| Ok(true))?
            .ok_or_else(|| Error::EmptyCandidates { stage: 6, region: sites[0].clone() })?;
        regions.push(RegionRecord {
            stage: 6,
            sites,
            zone: zones[zone].origin().clone(),
            j: j as u8,
            tied_with: tied,
            requested,
            clamped,
        });
        fills.push((regions.last().expect("just pushed").sites.clone(), symbols));
    }
    for (sites, symbols) in fills {
        for (s, a) in sites.iter().zip(symbols) {
            assign[window.index_of(s).expect("region inside window")] = Some(a);
        }
    }

    let v6: Vec<Symbol> = assign
        .iter()
        .enumerate()
        .map(|(i, a)| a.ok_or_else(|| Error::InvalidLayout(format!("site {} left unassigned", window.site_at(i)))))
        .collect::<Result<_>>()?;
    let output = Pattern::from_cells(2, window.sites().zip(v6.iter().copied()))?;
    let trace = StageTrace { window, star, u1, s2, u3, s4, u5, s6, v2, v4, v6, zones: zone_records, regions };
    Ok(StagedFill { output, trace })
}

/// First direction (in the given order) with an adjacent zone; ties go to
/// the least origin and the others are returned.
fn associate(
    _sites: &[Site],
    shrunk: &[Region],
    zones: &[Region],
    directions: &[(i64, i64); 4],
    adjacent: impl Fn(&Region, (i64, i64)) -> bool,
) -> Option<(usize, usize, Vec<Site>)> {
    for (d, &dir) in directions.iter().enumerate() {
        let mut hits: Vec<usize> = (0..zones.len()).filter(|&z| !shrunk[z].is_empty() && adjacent(&shrunk[z], dir)).collect();
        if hits.is_empty() {
            continue;
        }
        hits.sort_by(|&a, &b| zones[a].origin().cmp(zones[b].origin()));
        let tied = hits[1..].iter().map(|&z| zones[z].origin().clone()).collect();
        return Some((hits[0], d, tied));
    }
    None
}

/// First placement of a forbidden pattern fully inside the assigned sites,
/// with sites outside the window reading as `star`.
pub fn find_violation(spec: &SftSpec, window: &Region, assign: &[Option<Symbol>], star: Symbol) -> Option<Site> {
    let read = |s: &Site| match window.index_of(s) {
        Some(i) => assign[i],
        None => Some(star),
    };
    for f in spec.forbidden() {
        let cells: Vec<(&Site, Symbol)> = f.iter().collect();
        let mut seen = HashSet::new();
        for s in window.sites() {
            if assign[window.index_of(&s).expect("window site")].is_none() {
                continue;
            }
            for (o, _) in &cells {
                let t = &s - *o;
                if !seen.insert(t.clone()) {
                    continue;
                }
                if cells.iter().all(|(o, a)| read(&(*o + &t)) == Some(*a)) {
                    return Some(s);
                }
            }
        }
    }
    None
}

/// Checks the window assertions on a completed run: no forbidden pattern in
/// `v_2`, `v_4`, `v_6`; background beyond `3g`; the stage-region
/// invariants; separation of rectangles and of holes; and single use of
/// each ψ-digit.
pub fn verify_factor_window(
    output: &Pattern,
    trace: &StageTrace,
    spec: &SftSpec,
    layout: &DeterminedZoneLayout,
) -> Result<PropertyReport> {
    let g = layout.params.g;
    let window = &trace.window;
    let star = trace.star;
    let geo = ZoneGeometry::new(layout)?;
    let rectangles = trace.regions.iter().filter(|r| r.stage == 4).count() as u64;
    let holes = trace.regions.len() as u64 - rectangles;
    let fail = |site: Site, reason: String| {
        Ok(PropertyReport::new(Property::FactorWindow, Verdict::Refuted(Witness::Site { site, reason }))
            .with("radius", layout.params.code_radius()))
    };

    if window != &layout.window {
        return Err(Error::InvalidLayout("trace window differs from the layout window".into()));
    }
    let out: Vec<Option<Symbol>> = window.sites().map(|s| output.get(&s)).collect();
    if let Some(i) = out.iter().position(Option::is_none) {
        return fail(window.site_at(i), "output misses a window site".into());
    }

    // (a)
    for (name, v) in [("v_2", &trace.v2), ("v_4", &trace.v4), ("v_6", &out)] {
        if let Some(s) = find_violation(spec, window, v, star) {
            return fail(s, format!("forbidden pattern in {name}"));
        }
    }
    // (b)
    for (i, &d) in geo.distance.iter().enumerate() {
        if d > 3 * g && out[i] != Some(star) {
            return fail(window.site_at(i), format!("site beyond 3g = {} of every zone is not the background symbol", 3 * g));
        }
    }
    // (c)
    let full = SiteMask::full(window);
    let v2 = trace.u1.union(&trace.s2);
    let v4 = trace.u3.union(&trace.s4);
    let checks = [
        (trace.u1 == geo.u1(), "U_1 is not the set of sites farther than g from all zones"),
        (trace.s2 == geo.zone_union(), "S_2 is not the union of zones"),
        (trace.u1.is_disjoint(&trace.s2), "U_1 meets S_2"),
        (trace.u3 == v2.trim(g), "U_3 is not V_2 minus its inner g-boundary"),
        (trace.s4.is_disjoint(&trace.u3), "S_4 meets U_3"),
        (trace.u5 == v4.trim(g), "U_5 is not V_4 minus its inner g-boundary"),
        (trace.s6.is_disjoint(&trace.u5), "S_6 meets U_5"),
        (trace.u5.union(&trace.s6) == full, "V_6 is not the whole window"),
    ];
    if let Some((_, reason)) = checks.iter().find(|(ok, _)| !ok) {
        return fail(window.origin().clone(), (*reason).to_string());
    }
    for (name, mask, v) in [("v_2", &v2, &trace.v2), ("v_4", &v4, &trace.v4)] {
        if let Some(i) = (0..window.len()).find(|&i| mask.get(i) != v[i].is_some()) {
            return fail(window.site_at(i), format!("{name} is not defined exactly on its stage region"));
        }
    }
    // (d)
    for stage in [4u8, 6] {
        let mut owner: HashMap<&Site, usize> = HashMap::new();
        for (ri, r) in trace.regions.iter().enumerate().filter(|(_, r)| r.stage == stage) {
            for s in &r.sites {
                owner.insert(s, ri);
            }
        }
        let ball: Vec<Site> = hypercube(Cube::Q, g as i64, 2)?.iter().cloned().collect();
        for (&s, &ri) in &owner {
            for o in &ball {
                if let Some(&other) = owner.get(&(s + o)) {
                    if other != ri {
                        return fail(s.clone(), format!("two stage {stage} regions within distance {g}"));
                    }
                }
            }
        }
    }
    // (e)
    let mut used = HashSet::new();
    for r in &trace.regions {
        if !used.insert((r.zone.clone(), r.j)) {
            return fail(r.sites[0].clone(), format!("digit i_{} of zone {} used twice", r.j, r.zone));
        }
    }
    if let Some(i) = (0..window.len()).find(|&i| out[i] != Some(trace.v6[i])) {
        return fail(window.site_at(i), "output differs from the traced v_6".into());
    }

    Ok(PropertyReport::new(Property::FactorWindow, Verdict::VerifiedUpToBound)
        .with("radius", layout.params.code_radius())
        .with("zones", layout.zones.len() as u64)
        .with("rectangles", rectangles)
        .with("holes", holes))
}
