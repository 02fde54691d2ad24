//! Trial files, dataset manifests and the synthetic trial generator.

pub mod manifest;
pub mod synthetic;
pub mod trial_csv;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hand::{GraspTrial, GraspType};
use crate::trial::PhaseAnnotation;

pub use manifest::{load_dataset, DatasetManifest, ManifestTrial, MANIFEST_VERSION};
pub use synthetic::{
    generate_synthetic_dataset, generate_synthetic_trial, read_ground_truth, synthetic_dataset, GroundTruth,
    NoiseConfig, PlantedCorrelation, SyntheticConfig, TrialTruth,
};
pub use trial_csv::{read_trial_csv, read_trial_series, write_trial_csv, TRIAL_CSV_HEADER};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DatasetError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: row {row}: {message}")]
    Parse { path: String, row: usize, message: String },
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("invalid synthetic config: {0}")]
    Config(String),
    #[error("dataset has {} problem(s):\n  {}", .0.len(), .0.join("\n  "))]
    Invalid(Vec<String>),
}

impl DatasetError {
    pub(crate) fn io(path: &Path, e: impl fmt::Display) -> Self {
        DatasetError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    /// Attach a path to an error raised by a reader or writer.
    pub(crate) fn at(self, path: &Path) -> Self {
        let p = path.display().to_string();
        match self {
            DatasetError::Io { message, .. } => DatasetError::Io { path: p, message },
            DatasetError::Parse { row, message, .. } => DatasetError::Parse { path: p, row, message },
            e => e,
        }
    }
}

/// Identity of a trial. Ordering is the canonical dataset order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TrialKey {
    pub subject_id: String,
    pub grasp_type: GraspType,
    pub object: String,
    pub trial_index: u32,
}

impl TrialKey {
    pub fn of(trial: &GraspTrial) -> Self {
        TrialKey {
            subject_id: trial.meta.subject_id.clone(),
            grasp_type: trial.meta.object.grasp_type,
            object: trial.meta.object.name.clone(),
            trial_index: trial.meta.trial_index,
        }
    }
}

impl fmt::Display for TrialKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{}/{}/t{}",
            self.subject_id, self.grasp_type, self.object, self.trial_index
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetEntry {
    pub key: TrialKey,
    /// Path of the trial file relative to the dataset root.
    pub file: PathBuf,
    pub trial: GraspTrial,
    /// Manual phase annotation; overrides detection when present.
    pub annotation: Option<PhaseAnnotation>,
    pub video: Option<String>,
}

/// Trials in canonical key order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub entries: Vec<DatasetEntry>,
}

impl Dataset {
    /// Sort entries by key and reject duplicates.
    pub fn new(mut entries: Vec<DatasetEntry>) -> Result<Self, DatasetError> {
        entries.sort_by(|a, b| a.key.cmp(&b.key));
        let dups: Vec<String> = entries
            .windows(2)
            .filter(|w| w[0].key == w[1].key)
            .map(|w| format!("duplicate trial {}", w[0].key))
            .collect();
        if !dups.is_empty() {
            return Err(DatasetError::Invalid(dups));
        }
        Ok(Dataset { entries })
    }

    pub fn from_trials(trials: Vec<GraspTrial>) -> Result<Self, DatasetError> {
        Dataset::new(
            trials
                .into_iter()
                .map(|trial| DatasetEntry {
                    key: TrialKey::of(&trial),
                    file: PathBuf::new(),
                    trial,
                    annotation: None,
                    video: None,
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn trials(&self) -> impl Iterator<Item = &GraspTrial> {
        self.entries.iter().map(|e| &e.trial)
    }

    /// Entry indices grouped by grasp type.
    pub fn by_grasp_type(&self) -> BTreeMap<GraspType, Vec<usize>> {
        let mut map: BTreeMap<GraspType, Vec<usize>> = BTreeMap::new();
        for (i, e) in self.entries.iter().enumerate() {
            map.entry(e.key.grasp_type).or_default().push(i);
        }
        map
    }

    pub fn subjects(&self) -> Vec<String> {
        let mut s: Vec<String> = self.entries.iter().map(|e| e.key.subject_id.clone()).collect();
        s.dedup();
        s.sort();
        s.dedup();
        s
    }
}
