//! ASCII PGM rasters of the stage labels.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::factor::{StageLabel, StageTrace};
use crate::format::HEADER;
use crate::{Error, Result};

/// Gray level of sites no stage has reached yet.
pub const UNASSIGNED_LEVEL: u8 = 255;

/// One raster row per line, top row at the largest `y`, `x` increasing to
/// the right. Planar windows only.
pub fn render_pgm(trace: &StageTrace, stage: u8) -> Result<String> {
    if trace.window.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: trace.window.dim() });
    }
    if !(1..=6).contains(&stage) {
        return Err(Error::InvalidParams(format!("stage {stage} outside 1..=6")));
    }
    let labels = trace.labels_after(stage);
    let (w, h) = (trace.window.extents()[0], trace.window.extents()[1]);
    let origin = trace.window.origin();
    let mut out = format!("P2\n{HEADER}\n{w} {h}\n255\n");
    for row in (0..h as i64).rev() {
        let line: Vec<String> = (0..w as i64)
            .map(|col| {
                let s = crate::geometry::Site::new([origin.coord(0) + col, origin.coord(1) + row]);
                let i = trace.window.index_of(&s).expect("site inside window");
                labels[i].map_or(UNASSIGNED_LEVEL, StageLabel::level).to_string()
            })
            .collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
    Ok(out)
}

pub fn legend() -> String {
    let mut out = format!("{HEADER}\n");
    for label in StageLabel::ALL {
        writeln!(out, "{:3} {}", label.level(), label.name()).unwrap();
    }
    writeln!(out, "{UNASSIGNED_LEVEL:3} not yet assigned").unwrap();
    out
}

/// Writes `stage1.pgm` … `stage6.pgm` and `legend.txt` into `dir`.
pub fn write_snapshots(trace: &StageTrace, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for stage in 1..=6 {
        let path = dir.join(format!("stage{stage}.pgm"));
        std::fs::write(&path, render_pgm(trace, stage)?)?;
        paths.push(path);
    }
    let path = dir.join("legend.txt");
    std::fs::write(&path, legend())?;
    paths.push(path);
    Ok(paths)
}
