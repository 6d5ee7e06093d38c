//! Markers `M` and detection of surrounding frames.

use serde::{Deserialize, Serialize};

use crate::factor::layout::{DeterminedZoneLayout, MarkerParams, Zone, ZoneCode};
use crate::geometry::{hypercube, Cube, Region, Shape, Site};
use crate::mixing::{Property, PropertyReport, Verdict, Witness};
use crate::pattern::{Pattern, Symbol};
use crate::search::SearchBudget;
use crate::sft::{is_locally_admissible, membership, SftSpec};
use crate::{Error, Result};

/// The pieces of a planar marker. Each pattern is given with its least
/// corner at the origin: `p` on `C_p`, `q` on `C_q`, the up and down edges
/// on `[0,q) × [0,p)`, the left and right edges on `[0,p) × [0,q)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkerParts {
    pub p: Pattern,
    pub q: Pattern,
    /// Up, left, down, right.
    pub edges: [Pattern; 4],
}

fn cube_side(w: &Pattern) -> Result<u64> {
    let shape = w.shape();
    let side = shape.max_corner().map_or(0, |c| c.coord(0) + 1);
    if side <= 0 || shape != hypercube(Cube::C, side, w.dim())? {
        return Err(Error::InvalidParams("pattern must fill a cube C_n at the origin".into()));
    }
    Ok(side as u64)
}

fn check_box(w: &Pattern, extents: [usize; 2]) -> Result<()> {
    let want = Region::new(Site::origin(2), extents.to_vec()).to_shape();
    if w.shape() != want {
        return Err(Error::InvalidParams(format!("edge pattern must fill a {} × {} box at the origin", extents[0], extents[1])));
    }
    Ok(())
}

fn place(out: &mut Pattern, w: &Pattern, at: &Site) {
    for (s, a) in w.iter() {
        out.set(s + at, a);
    }
}

/// Assembles `M` on `C_m`, `m = 2p + 2g + q`: `P` at the four corners, `Q`
/// at `(p+g)·1`, the edge patterns between the corners, and the remaining
/// sites filled with the least locally admissible completion in `X`.
///
/// `P` must be accepted in `X_P` at `radius`; `Q` and the edges must be
/// locally admissible in `X_P`.
pub fn build_marker(
    parts: &MarkerParts,
    g: u64,
    spec_x: &SftSpec,
    spec_xp: &SftSpec,
    radius: u64,
    budget: &SearchBudget,
) -> Result<Pattern> {
    for spec in [spec_x, spec_xp] {
        if spec.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: spec.dim() });
        }
    }
    let p = cube_side(&parts.p)?;
    let q = cube_side(&parts.q)?;
    if p <= 5 * g {
        return Err(Error::InvalidParams(format!("p = {p} must exceed 5g = {}", 5 * g)));
    }
    let (pu, qu) = (p as usize, q as usize);
    for (i, e) in parts.edges.iter().enumerate() {
        check_box(e, if i % 2 == 0 { [qu, pu] } else { [pu, qu] })?;
    }
    if !membership(&parts.p, spec_xp, radius, budget)?.accepted() {
        return Err(Error::Precondition("P is not in the language of X_P at the test radius".into()));
    }
    for (name, w) in [("Q", &parts.q)].into_iter().chain(["G_up", "G_left", "G_down", "G_right"].into_iter().zip(&parts.edges)) {
        if !is_locally_admissible(w, spec_xp)? {
            return Err(Error::Precondition(format!("{name} is not locally admissible in X_P")));
        }
    }

    let m = 2 * p + 2 * g + q;
    let (far, mid) = ((m - p) as i64, (p + g) as i64);
    let mut out = Pattern::empty(2);
    for corner in [[0, 0], [far, 0], [0, far], [far, far]] {
        place(&mut out, &parts.p, &Site::new(corner));
    }
    place(&mut out, &parts.q, &Site::new([mid, mid]));
    let [up, left, down, right] = &parts.edges;
    place(&mut out, up, &Site::new([mid, far]));
    place(&mut out, left, &Site::new([0, mid]));
    place(&mut out, down, &Site::new([mid, 0]));
    place(&mut out, right, &Site::new([far, mid]));

    let cube = hypercube(Cube::C, m as i64, 2)?;
    let gaps: Vec<Site> = cube.iter().filter(|s| out.get(s).is_none()).cloned().collect();
    if !gaps.is_empty() {
        let fixed = out.clone();
        let problem = spec_x.problem(gaps, |s| fixed.get(s), budget)?;
        let fill = problem
            .first(&vec![None; problem.len()], budget)?
            .ok_or_else(|| Error::Precondition("no admissible fill of the marker gaps".into()))?;
        for (s, a) in problem.sites().iter().zip(fill) {
            out.set(s.clone(), a);
        }
    }
    if !is_locally_admissible(&out, spec_x)? {
        return Err(Error::Precondition("assembled marker contains a forbidden pattern of X".into()));
    }
    Ok(out)
}

/// Checks that `Q` disagrees with its translate by every nonzero
/// `t ∈ Q_{g+p}` somewhere on the overlap.
pub fn check_marker_non_overlap(q: &Pattern, g: u64, p: u64) -> Result<PropertyReport> {
    let side = cube_side(q)?;
    let reach = g + p;
    if side <= reach {
        return Err(Error::Precondition(format!("q = {side} must exceed g + p = {reach}")));
    }
    let offsets = hypercube(Cube::Q, reach as i64, q.dim())?;
    for t in offsets.iter().filter(|t| !t.is_origin()) {
        let agrees = q.iter().all(|(s, a)| q.get(&(s + t)).is_none_or(|b| b == a));
        if agrees {
            return Ok(PropertyReport::new(
                Property::MarkerNonOverlap,
                Verdict::Refuted(Witness::SelfOverlap { vector: t.clone() }),
            )
            .with("radius", reach));
        }
    }
    Ok(PropertyReport::new(Property::MarkerNonOverlap, Verdict::VerifiedUpToBound)
        .with("radius", reach)
        .with("vectors", offsets.len() as u64 - 1))
}

fn bounding_region(w: &Pattern) -> Result<Region> {
    let shape = w.shape();
    let (lo, hi) = shape.min_corner().zip(shape.max_corner()).ok_or(Error::EmptyPattern)?;
    let extents: Vec<usize> = (0..w.dim()).map(|a| (hi.coord(a) - lo.coord(a) + 1) as usize).collect();
    let region = Region::new(lo, extents);
    if region.len() != w.len() {
        return Err(Error::InvalidParams("window pattern must fill a box".into()));
    }
    Ok(region)
}

fn window_piece(w: &Pattern, region: &Region) -> Option<Pattern> {
    let cells: Option<Vec<(Site, Symbol)>> =
        region.sites().map(|s| w.get(&s).map(|a| (&s - region.origin(), a))).collect();
    Pattern::from_cells(w.dim(), cells?).ok()
}

/// Finds surrounding frames in a planar window: `M` at the four corners of
/// `t + C_{k+2g+2m}`, the four edge bands accepted in `X_P` at `radius`,
/// and the central `W` on `t + (g+m)·1 + C_k` accepted likewise. Each frame
/// yields a zone at `t + (g+m)·1` coded by `W`.
pub fn detect_frames(
    window: &Pattern,
    marker: &Pattern,
    params: MarkerParams,
    spec_xp: &SftSpec,
    radius: u64,
    budget: &SearchBudget,
) -> Result<DeterminedZoneLayout> {
    if window.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: window.dim() });
    }
    let region = bounding_region(window)?;
    let m = cube_side(marker)?;
    if m != params.m {
        return Err(Error::InvalidParams(format!("marker side {m} differs from m = {}", params.m)));
    }
    let (g, k) = (params.g, params.k);
    let f = params.frame_side();
    let span = (f - m) as i64;
    let accepted = |w: &Pattern| -> Result<bool> { Ok(membership(w, spec_xp, radius, budget)?.accepted()) };
    let marker_at = |t: &Site| marker.iter().all(|(s, a)| window.get(&(s + t)) == Some(a));

    let mut zones = Vec::new();
    let last = |a: usize| region.origin().coord(a) + region.extents()[a] as i64 - f as i64;
    for x in region.origin().coord(0)..=last(0) {
        for y in region.origin().coord(1)..=last(1) {
            let t = Site::new([x, y]);
            let corners = [[0, 0], [span, 0], [0, span], [span, span]];
            if !corners.iter().all(|c| marker_at(&(&t + &Site::new(*c)))) {
                continue;
            }
            let band = (k + 2 * g) as usize;
            let (mu, mi) = (m as usize, m as i64);
            let bands = [
                Region::new(&t + &Site::new([mi, span]), vec![band, mu]),
                Region::new(&t + &Site::new([0, mi]), vec![mu, band]),
                Region::new(&t + &Site::new([mi, 0]), vec![band, mu]),
                Region::new(&t + &Site::new([span, mi]), vec![mu, band]),
            ];
            let mut ok = true;
            for b in &bands {
                if !window_piece(window, b).map_or(Ok(false), |w| accepted(&w))? {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            let origin = &t + &Site::splat(2, (g + params.m) as i64);
            let Some(w) = window_piece(window, &Region::cube(origin.clone(), k as usize)) else { continue };
            if accepted(&w)? {
                zones.push(Zone { origin, code: ZoneCode::Pattern(w) });
            }
        }
    }
    DeterminedZoneLayout::new(2, params, zones, region)
}

/// Shape of the band between two marker corners, for reference in tests
/// and reports.
pub fn edge_band_shape(params: &MarkerParams) -> Shape {
    Region::new(Site::origin(2), vec![(params.k + 2 * params.g) as usize, params.m as usize]).to_shape()
}
