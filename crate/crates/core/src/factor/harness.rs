//! Finite check that surrounded patterns can produce a chosen block.

use serde::{Deserialize, Serialize};

use crate::factor::codec::PsiCodec;
use crate::factor::fill::run_staged_fill;
use crate::factor::layout::{DeterminedZoneLayout, MarkerParams, Zone, ZoneCode};
use crate::geometry::{hypercube, Cube, Region, Site};
use crate::pattern::{lex_rank, Pattern};
use crate::search::SearchBudget;
use crate::sft::{MembershipOracle, SftSpec};
use crate::{Error, Result};

/// Lattice parameters: `g = 1`, `k = 3`, `m = 4`, `p = 6`, zone side 8.
pub fn harness_params() -> MarkerParams {
    MarkerParams::synthetic(2, 1, 6, 4, 3).expect("valid harness parameters")
}

/// Offset of the target block inside the central zone.
pub const TARGET_OFFSET: i64 = 2;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarnessOutcome {
    /// Rank of the chosen central zone content in `L_{C_{k+g+m}}(Y)`.
    pub zone_rank: u128,
    /// Rank of the surrounded pattern fed to the codec.
    pub codec_rank: u128,
    pub digits: Vec<u128>,
    /// Origin of the target block in the output window.
    pub target_origin: Site,
    pub achieved: bool,
}

/// A 3×3 lattice of adjacent zones, spaced `k+2g+m`, inside its window.
pub fn lattice_layout(center: ZoneCode) -> Result<DeterminedZoneLayout> {
    let params = harness_params();
    let side = params.zone_side() as i64;
    let step = side + params.g as i64;
    let mut zones = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            let code = if (i, j) == (1, 1) { center.clone() } else { ZoneCode::Rank(0) };
            zones.push(Zone { origin: Site::new([i * step, j * step]), code });
        }
    }
    let margin = 3 * params.g as i64 + 1;
    let window = Region::cube(Site::splat(2, -margin), (2 * step + side + 2 * margin) as usize);
    DeterminedZoneLayout::new(2, params, zones, window)
}

/// Chooses the central zone's surrounded pattern so that the fill writes
/// `target` at the zone origin plus `(2,2)`, runs the fill, and checks the
/// block. The zone content is the least element of the zone language that
/// contains the target there.
pub fn surjectivity_harness(spec_y: &SftSpec, codec: &PsiCodec, target: &Pattern, budget: &SearchBudget) -> Result<HarnessOutcome> {
    if !codec.is_surjective() {
        return Err(Error::Precondition("codec domain is smaller than the product of its ranges".into()));
    }
    if codec.ranges().len() != 9 {
        return Err(Error::InvalidParams("a planar codec has nine ranges".into()));
    }
    let params = harness_params();
    let side = params.zone_side() as i64;
    let interior = params.zone_side() - 4 * params.g;
    let t_side = target.shape().max_corner().map_or(0, |c| c.coord(0) + 1);
    if target.shape() != hypercube(Cube::C, t_side, 2)? || t_side as u64 > interior {
        return Err(Error::InvalidParams(format!("target must fill C_n at the origin with n ≤ {interior}")));
    }
    let spec = if spec_y.is_full_shift() && spec_y.certified_extension().is_none() {
        spec_y.clone().with_extension_certificate(0)
    } else {
        spec_y.clone()
    };
    let star = *crate::sft::fixed_point_symbols(&spec)
        .iter()
        .next()
        .ok_or_else(|| Error::Precondition("target SFT has no fixed point".into()))?;

    let cube = hypercube(Cube::C, side, 2)?;
    let offset = Site::new([TARGET_OFFSET, TARGET_OFFSET]);
    let placed = target.translate(&offset);
    let zone_rank = if spec.is_full_shift() {
        let mut w = Pattern::constant(&cube, star);
        for (s, a) in placed.iter() {
            w.set(s.clone(), a);
        }
        lex_rank(&w, &cube, spec.alphabet())?
    } else {
        let oracle = MembershipOracle::new(&spec, &cube, params.g, budget)?;
        let sites: Vec<Site> = cube.iter().cloned().collect();
        let mut index = 0u128;
        let mut found = None;
        oracle.for_each(budget, |a| {
            let hit = sites.iter().zip(a).all(|(s, b)| placed.get(s).is_none_or(|x| x == *b));
            if hit {
                found = Some(index);
                return std::ops::ControlFlow::Break(());
            }
            index += 1;
            std::ops::ControlFlow::Continue(())
        })?;
        found.ok_or_else(|| Error::Precondition("no zone content contains the target".into()))?
    };
    if zone_rank >= codec.ranges()[0] {
        return Err(Error::Precondition(format!("zone rank {zone_rank} exceeds R_1 = {}", codec.ranges()[0])));
    }
    let mut digits = vec![1u128; 9];
    digits[0] = zone_rank + 1;
    let codec_rank = codec.decode(&digits)?;

    let layout = lattice_layout(ZoneCode::Rank(codec_rank))?;
    let run = run_staged_fill(&layout, &spec, star, Some(codec), budget)?;
    let step = side + params.g as i64;
    let target_origin = &Site::new([step, step]) + &offset;
    let achieved = target.iter().all(|(s, a)| run.output.get(&(s + &target_origin)) == Some(a));
    let digits = run.trace.zones.iter().find(|z| z.origin == Site::new([step, step])).map(|z| z.digits.clone()).unwrap_or(digits);
    Ok(HarnessOutcome { zone_rank, codec_rank, digits, target_origin, achieved })
}
