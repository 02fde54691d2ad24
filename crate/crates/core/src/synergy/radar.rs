use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::SynergyError;
use crate::dataset::Dataset;
use crate::hand::{Domain, FingerId, GraspType, HandPosture};
use crate::trial::AnalyzedTrial;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spoke {
    pub label: String,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadarProfile {
    pub grasp_type: GraspType,
    pub domain: Domain,
    pub trials: usize,
    pub spokes: Vec<Spoke>,
}

impl RadarProfile {
    pub fn radii(&self) -> Vec<f64> {
        self.spokes.iter().map(|s| s.radius).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RadarSet {
    pub posture: BTreeMap<GraspType, RadarProfile>,
    pub force: BTreeMap<GraspType, RadarProfile>,
    pub warnings: Vec<String>,
}

/// Mean hold-phase joint angles (15 spokes) and fingertip forces (5 spokes)
/// of every grasp type with at least one analyzed trial.
pub fn radar_profiles(ds: &Dataset, analyzed: &[AnalyzedTrial]) -> RadarSet {
    let mut groups: BTreeMap<GraspType, Vec<&AnalyzedTrial>> = BTreeMap::new();
    for a in analyzed {
        groups.entry(ds.entries[a.index].key.grasp_type).or_default().push(a);
    }
    let mut set = RadarSet::default();
    for g in ds.by_grasp_type().keys() {
        if !groups.contains_key(g) {
            set.warnings
                .push(format!("{g}: no usable trials, radar profile omitted"));
        }
    }
    let joint_labels = HandPosture::joint_labels();
    for (g, trials) in groups {
        let k = trials.len() as f64;
        let mut joints = vec![0.0; 15];
        let mut forces = [0.0; 5];
        for a in &trials {
            for (acc, v) in joints.iter_mut().zip(a.features.mean_posture.joint_vector()) {
                *acc += v / k;
            }
            for (acc, v) in forces.iter_mut().zip(a.features.mean_forces) {
                *acc += v / k;
            }
        }
        set.posture.insert(
            g,
            RadarProfile {
                grasp_type: g,
                domain: Domain::Posture,
                trials: trials.len(),
                spokes: joint_labels
                    .iter()
                    .zip(joints)
                    .map(|(l, r)| Spoke {
                        label: l.clone(),
                        radius: r,
                    })
                    .collect(),
            },
        );
        set.force.insert(
            g,
            RadarProfile {
                grasp_type: g,
                domain: Domain::Force,
                trials: trials.len(),
                spokes: FingerId::ALL
                    .iter()
                    .zip(forces)
                    .map(|(f, r)| Spoke {
                        label: f.label().to_string(),
                        radius: r,
                    })
                    .collect(),
            },
        );
    }
    set
}

/// Area of the pentagon with the given radii at 72 degree spacing.
pub fn pentagon_area(r: &[f64; 5]) -> f64 {
    let s = (72f64).to_radians().sin();
    0.5 * s * (0..5).map(|i| r[i] * r[(i + 1) % 5]).sum::<f64>()
}

pub fn radar_area(profile: &RadarProfile) -> Result<f64, SynergyError> {
    let r: [f64; 5] = profile
        .radii()
        .try_into()
        .map_err(|v: Vec<f64>| SynergyError::Domain(format!("radar area needs 5 spokes, got {}", v.len())))?;
    Ok(pentagon_area(&r))
}
