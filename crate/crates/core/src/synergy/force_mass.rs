use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::SynergyError;
use crate::dataset::Dataset;
use crate::hand::{Channels, GraspType};
use crate::trial::AnalyzedTrial;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceMassPoint {
    pub mass_g: f64,
    /// Mean hold total force, N.
    pub force_n: f64,
    pub finger_forces: Channels,
    pub objects: Vec<String>,
    pub trials: usize,
}

/// Hold force against object mass for one grasp type, interpolated
/// piecewise-linearly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceMassModel {
    pub grasp_type: GraspType,
    pub samples: Vec<ForceMassPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceMassEval {
    pub force_n: f64,
    pub extrapolated: bool,
}

impl ForceMassModel {
    /// From (mass, total force) points with strictly increasing masses.
    pub fn from_points(grasp_type: GraspType, points: &[(f64, f64)]) -> Result<Self, SynergyError> {
        if points.len() < 2 {
            return Err(SynergyError::InsufficientData(format!(
                "{grasp_type}: need at least 2 object masses, got {}",
                points.len()
            )));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(SynergyError::Domain("masses must be strictly increasing".into()));
        }
        Ok(ForceMassModel {
            grasp_type,
            samples: points
                .iter()
                .map(|&(mass_g, force_n)| ForceMassPoint {
                    mass_g,
                    force_n,
                    finger_forces: [0.0; 5],
                    objects: Vec::new(),
                    trials: 0,
                })
                .collect(),
        })
    }

    pub fn eval(&self, mass_g: f64) -> ForceMassEval {
        let s = &self.samples;
        let seg = match s.partition_point(|p| p.mass_g <= mass_g) {
            0 => 0,
            i if i >= s.len() => s.len() - 2,
            i => i - 1,
        };
        let (a, b) = (&s[seg], &s[seg + 1]);
        let force_n = a.force_n + (b.force_n - a.force_n) * (mass_g - a.mass_g) / (b.mass_g - a.mass_g);
        ForceMassEval {
            force_n,
            extrapolated: mass_g < s[0].mass_g || mass_g > s[s.len() - 1].mass_g,
        }
    }
}

pub fn force_mass_eval(model: &ForceMassModel, mass_g: f64) -> ForceMassEval {
    model.eval(mass_g)
}

/// Mean hold total force per object of a grasp type; objects of equal mass
/// are pooled. Objects without a mass are skipped.
pub fn force_mass_fit(
    ds: &Dataset,
    analyzed: &[AnalyzedTrial],
    grasp_type: GraspType,
) -> Result<ForceMassModel, SynergyError> {
    // mass bits -> (objects, per-trial total and finger forces)
    let mut by_mass: BTreeMap<u64, (f64, Vec<String>, Vec<(f64, Channels)>)> = BTreeMap::new();
    for a in analyzed {
        let meta = &ds.entries[a.index].trial.meta;
        if meta.object.grasp_type != grasp_type {
            continue;
        }
        let Some(m) = meta.object.mass_g else { continue };
        let slot = by_mass.entry(m.to_bits()).or_insert_with(|| (m, Vec::new(), Vec::new()));
        if !slot.1.contains(&meta.object.name) {
            slot.1.push(meta.object.name.clone());
        }
        slot.2.push((a.features.total_force, a.features.mean_forces));
    }
    let mut samples: Vec<ForceMassPoint> = by_mass
        .into_values()
        .map(|(mass_g, mut objects, trials)| {
            let k = trials.len() as f64;
            let force_n = trials.iter().map(|t| t.0).sum::<f64>() / k;
            let mut finger_forces = [0.0; 5];
            for (_, f) in &trials {
                for c in 0..5 {
                    finger_forces[c] += f[c] / k;
                }
            }
            objects.sort();
            ForceMassPoint {
                mass_g,
                force_n,
                finger_forces,
                objects,
                trials: trials.len(),
            }
        })
        .collect();
    samples.sort_by(|a, b| a.mass_g.total_cmp(&b.mass_g));
    if samples.len() < 2 {
        return Err(SynergyError::InsufficientData(format!(
            "{grasp_type}: need at least 2 distinct object masses, got {}",
            samples.len()
        )));
    }
    Ok(ForceMassModel { grasp_type, samples })
}
