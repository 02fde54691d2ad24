//! Synergy analysis: correlations, radar profiles, force against mass, PCA
//! and t-SNE over hold-phase features.

pub mod force_mass;
pub mod pca;
pub mod radar;
pub mod stats;
pub mod tsne;

use serde::Serialize;
use thiserror::Error;

use crate::dataset::{Dataset, TrialKey};
use crate::hand::{Domain, FingerId, GraspType, HandPosture};
use crate::trial::AnalyzedTrial;

pub use force_mass::{force_mass_eval, force_mass_fit, ForceMassEval, ForceMassModel, ForceMassPoint};
pub use pca::{elbow_select, pca_fit, pca_fit_with, pca_project, PcaModel, PcaOptions};
pub use radar::{pentagon_area, radar_area, radar_profiles, RadarProfile, RadarSet, Spoke};
pub use stats::{
    correlation_extrema, cross_domain_correlations, grasp_type_correlations, pearson, CorrelationExtrema,
    CorrelationMatrix, CorrelationWindow, PairExtrema,
};
pub use tsne::{tsne_embed, Embedding, TsneConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynergyError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("correlation undefined for a constant series")]
    UndefinedCorrelation,
    #[error("{0}")]
    Domain(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// One row of hold-phase features per analyzed trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureMatrix {
    pub domain: Domain,
    pub labels: Vec<String>,
    pub keys: Vec<TrialKey>,
    pub grasp_types: Vec<GraspType>,
    pub rows: Vec<Vec<f64>>,
}

/// Force rows are the five mean fingertip forces. Posture rows are the five
/// combined flexion angles, or the fifteen joint angles when `decomposed`.
pub fn feature_matrix(ds: &Dataset, analyzed: &[AnalyzedTrial], domain: Domain, decomposed: bool) -> FeatureMatrix {
    let labels = match (domain, decomposed) {
        (Domain::Posture, true) => HandPosture::joint_labels(),
        _ => FingerId::ALL.iter().map(|f| f.label().to_string()).collect(),
    };
    let mut m = FeatureMatrix {
        domain,
        labels,
        keys: Vec::with_capacity(analyzed.len()),
        grasp_types: Vec::with_capacity(analyzed.len()),
        rows: Vec::with_capacity(analyzed.len()),
    };
    for a in analyzed {
        let key = &ds.entries[a.index].key;
        let f = &a.features;
        let row = match (domain, decomposed) {
            (Domain::Force, _) => f.mean_forces.to_vec(),
            (Domain::Posture, false) => f.mean_angles.to_vec(),
            (Domain::Posture, true) => f.mean_posture.joint_vector(),
        };
        m.keys.push(key.clone());
        m.grasp_types.push(key.grasp_type);
        m.rows.push(row);
    }
    m
}
