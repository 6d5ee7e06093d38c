//! Markers, determined zones and the staged fill.
//!
//! A layout of determined zones either comes from detected surrounding
//! frames or is given directly. The fill assigns the fixed-point symbol far
//! from zones, places a coded pattern on each zone, and then completes the
//! window in alternating trim and fill stages.

pub mod codec;
pub mod fill;
pub mod harness;
pub mod layout;
pub mod marker;
pub mod mask;
pub mod regions;

pub use codec::{CodecDomain, PsiCodec};
pub use fill::{run_staged_fill, verify_factor_window, RegionRecord, StageLabel, StageTrace, StagedFill, ZoneRecord};
pub use harness::{surjectivity_harness, HarnessOutcome};
pub use layout::{compute_islands, DeterminedZoneLayout, Island, MarkerParams, Zone, ZoneCode};
pub use marker::{build_marker, check_marker_non_overlap, detect_frames, MarkerParts};
pub use mask::SiteMask;
pub use regions::{general_stage_regions, StageRegions, ZoneGeometry};
