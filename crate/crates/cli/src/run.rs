use std::path::Path;

use serde::{Deserialize, Serialize};

use sftkit::factor::StageTrace;

use crate::Failure;

pub const RUN_FILE: &str = "run.json";

/// Everything `factor verify` needs, stored next to the snapshots.
#[derive(Serialize, Deserialize)]
pub struct RunRecord {
    pub target_spec: String,
    pub layout: String,
    pub codec: Option<String>,
    pub star: String,
    pub output: String,
    pub trace: StageTrace,
}

impl RunRecord {
    pub fn save(&self, dir: &Path) -> Result<(), Failure> {
        let path = dir.join(RUN_FILE);
        let text = serde_json::to_string(self).expect("run record serializes");
        std::fs::write(&path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
    }

    pub fn load(dir: &Path) -> Result<Self, Failure> {
        let path = dir.join(RUN_FILE);
        let text = std::fs::read_to_string(&path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
    }
}
