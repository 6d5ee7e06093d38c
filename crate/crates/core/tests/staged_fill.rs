use proptest::prelude::*;

use sftkit::factor::{run_staged_fill, verify_factor_window, CodecDomain, DeterminedZoneLayout, MarkerParams, PsiCodec, Zone, ZoneCode};
use sftkit::mixing::{make_involution_sft, Verdict};
use sftkit::{Region, SearchBudget, SftSpec, Site, Symbol};

fn spec() -> SftSpec {
    make_involution_sft(2, &[1, 0, 3, 2, 4]).unwrap().with_extension_certificate(0)
}

fn codec() -> PsiCodec {
    PsiCodec::new(vec![4, 3, 3, 3, 3, 2, 2, 2, 2], CodecDomain::Size(5184)).unwrap()
}

/// Two zones side by side, or one on top of the other, at adjacency distance.
fn pair_layout(vertical: bool, ranks: [u128; 2]) -> DeterminedZoneLayout {
    let params = MarkerParams::synthetic(2, 1, 6, 6, 8).unwrap();
    let second = if vertical { Site::new([0, 16]) } else { Site::new([16, 0]) };
    let zones = vec![
        Zone { origin: Site::new([0, 0]), code: ZoneCode::Rank(ranks[0]) },
        Zone { origin: second, code: ZoneCode::Rank(ranks[1]) },
    ];
    let extents = if vertical { vec![23, 40] } else { vec![40, 23] };
    DeterminedZoneLayout::new(2, params, zones, Region::new(Site::new([-4, -4]), extents)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pairs_verify_and_commute_with_shifts(
        vertical in any::<bool>(),
        a in 0u128..5184,
        b in 0u128..5184,
        tx in -500i64..500,
        ty in -500i64..500,
    ) {
        let layout = pair_layout(vertical, [a, b]);
        let budget = SearchBudget::default();
        let run = run_staged_fill(&layout, &spec(), Symbol(0), Some(&codec()), &budget).unwrap();
        let report = verify_factor_window(&run.output, &run.trace, &spec(), &layout).unwrap();
        prop_assert_eq!(report.verdict, Verdict::VerifiedUpToBound);

        let t = Site::new([tx, ty]);
        let moved = run_staged_fill(&layout.translate(&t), &spec(), Symbol(0), Some(&codec()), &budget).unwrap();
        prop_assert_eq!(moved.output, run.output.translate(&t));
        prop_assert_eq!(moved.trace, run.trace.translate(&t));
    }
}

#[test]
fn zone_digit_changes_only_its_zone() {
    let budget = SearchBudget::default();
    // Rank 1296 has digits [2, 1, ..., 1]: only the zone content changes.
    assert_eq!(codec().encode_rank(1296).unwrap(), vec![2, 1, 1, 1, 1, 1, 1, 1, 1]);
    let layout = pair_layout(false, [0, 0]);
    let first = run_staged_fill(&layout, &spec(), Symbol(0), Some(&codec()), &budget).unwrap();
    let second = run_staged_fill(&pair_layout(false, [0, 1296]), &spec(), Symbol(0), Some(&codec()), &budget).unwrap();
    let zone = Region::cube(Site::new([16, 0]), 15);
    let changed: Vec<Site> =
        layout.window.sites().filter(|s| first.trace.v2[layout.window.index_of(s).unwrap()] != second.trace.v2[layout.window.index_of(s).unwrap()]).collect();
    assert!(!changed.is_empty());
    assert!(changed.iter().all(|s| zone.contains(s)));
    for run in [&first, &second] {
        for s in zone.deflate(1).sites() {
            assert_eq!(run.output.get(&s), run.trace.v2[layout.window.index_of(&s).unwrap()]);
        }
    }
}

#[test]
fn trace_survives_json() {
    let run = run_staged_fill(&pair_layout(true, [7, 99]), &spec(), Symbol(0), Some(&codec()), &SearchBudget::default()).unwrap();
    let text = serde_json::to_string(&run.trace).unwrap();
    let back: sftkit::factor::StageTrace = serde_json::from_str(&text).unwrap();
    assert_eq!(back, run.trace);
}

