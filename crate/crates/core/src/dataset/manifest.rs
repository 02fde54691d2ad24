//! JSON dataset manifest.
//!
//! ```json
//! {
//!   "version": 1,
//!   "subjects": ["S01"],
//!   "trials": [
//!     {
//!       "file": "trials/s01_sg_apple_t01.csv",
//!       "subject_id": "S01",
//!       "object": { "name": "Apple", "grasp_type": "SG", "mass_g": 158.01 },
//!       "trial_index": 1,
//!       "scan_rate_hz": 40.0,
//!       "duration_s": 30.0,
//!       "phases": { "approach_start": 80, "grasp_start": 200, "lift_start": 360, "hold_start": 600, "hold_end": 1200 },
//!       "video": "videos/s01_sg_apple_t01.mp4"
//!     }
//!   ]
//! }
//! ```
//!
//! `phases` and `video` are optional. File paths are relative to the
//! manifest's directory.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::trial_csv::read_trial_csv;
use super::{Dataset, DatasetEntry, DatasetError, TrialKey};
use crate::hand::TrialMeta;
use crate::trial::{validate_trial, PhaseAnnotation};

pub const MANIFEST_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestTrial {
    pub file: String,
    #[serde(flatten)]
    pub meta: TrialMeta,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phases: Option<PhaseAnnotation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub video: Option<String>,
}

impl ManifestTrial {
    pub fn key(&self) -> TrialKey {
        TrialKey {
            subject_id: self.meta.subject_id.clone(),
            grasp_type: self.meta.object.grasp_type,
            object: self.meta.object.name.clone(),
            trial_index: self.meta.trial_index,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub version: u32,
    pub subjects: Vec<String>,
    pub trials: Vec<ManifestTrial>,
}

impl DatasetManifest {
    pub fn new(trials: Vec<ManifestTrial>) -> Self {
        let subjects: BTreeSet<String> = trials.iter().map(|t| t.meta.subject_id.clone()).collect();
        DatasetManifest {
            version: MANIFEST_VERSION,
            subjects: subjects.into_iter().collect(),
            trials,
        }
    }

    pub fn from_json(s: &str) -> Result<Self, DatasetError> {
        let m: DatasetManifest = serde_json::from_str(s).map_err(|e| DatasetError::Manifest(e.to_string()))?;
        if m.version != MANIFEST_VERSION {
            return Err(DatasetError::Manifest(format!("unsupported version {}", m.version)));
        }
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn read(path: &Path) -> Result<Self, DatasetError> {
        let s = std::fs::read_to_string(path).map_err(|e| DatasetError::io(path, e))?;
        Self::from_json(&s).map_err(|e| match e {
            DatasetError::Manifest(m) => DatasetError::Manifest(format!("{}: {m}", path.display())),
            e => e,
        })
    }

    pub fn write(&self, path: &Path) -> Result<(), DatasetError> {
        std::fs::write(path, self.to_json()).map_err(|e| DatasetError::io(path, e))
    }
}

/// Resolve a dataset argument: a manifest file or a directory holding
/// `manifest.json`.
pub fn manifest_path(p: &Path) -> PathBuf {
    if p.is_dir() {
        p.join(MANIFEST_FILE)
    } else {
        p.to_path_buf()
    }
}

/// Load and validate every trial of a manifest. All problems are collected
/// into one error; trials come back in canonical key order regardless of
/// manifest order.
pub fn load_dataset(path: &Path) -> Result<Dataset, DatasetError> {
    let path = manifest_path(path);
    let manifest = DatasetManifest::read(&path)?;
    let root = path.parent().unwrap_or(Path::new("."));
    let mut problems = Vec::new();
    let mut seen = BTreeSet::new();
    let mut entries = Vec::new();
    for mt in &manifest.trials {
        let key = mt.key();
        if !seen.insert(key.clone()) {
            problems.push(format!("duplicate trial {key}"));
            continue;
        }
        let file = root.join(&mt.file);
        if !file.is_file() {
            problems.push(format!("{key}: missing file {}", file.display()));
            continue;
        }
        let trial = match read_trial_csv(&file, mt.meta.clone()) {
            Ok(t) => t,
            Err(e) => {
                problems.push(format!("{key}: {e}"));
                continue;
            }
        };
        let report = validate_trial(&trial);
        if !report.passed() {
            for v in &report.violations {
                problems.push(format!("{key} ({}): {v}", mt.file));
            }
            continue;
        }
        if let Some(p) = mt.phases {
            if !p.is_valid_for(trial.len()) {
                problems.push(format!("{key}: manual phases {p:?} are not ordered within the trial"));
                continue;
            }
        }
        entries.push(DatasetEntry {
            key,
            file: PathBuf::from(&mt.file),
            trial,
            annotation: mt.phases,
            video: mt.video.clone(),
        });
    }
    if !problems.is_empty() {
        return Err(DatasetError::Invalid(problems));
    }
    Dataset::new(entries)
}
