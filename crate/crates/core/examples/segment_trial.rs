//! Detect the reach-to-grasp phases of one trial and compare with the truth.

use grasp_synergy::dataset::{generate_synthetic_trial, SyntheticConfig};
use grasp_synergy::hand::lookup_object;
use grasp_synergy::trial::{hold_features, segment_phases, validate_trial, SegmentationConfig};

fn main() {
    let cfg = SyntheticConfig::with_seed(7);
    let object = lookup_object("Coffee Can").unwrap();
    let (trial, truth) = generate_synthetic_trial(&cfg, "S01", &object, 1).unwrap();

    let report = validate_trial(&trial);
    println!("validation passed: {}, usable: {}", report.passed(), report.usable());

    let phases = segment_phases(&trial, &SegmentationConfig::default()).unwrap();
    println!("detected {:?}", phases.boundaries());
    println!("planted  {:?}", truth.phases.boundaries());

    let f = hold_features(&trial, &phases).unwrap();
    println!("hold forces {:.3?} N, total {:.3} N", f.mean_forces, f.total_force);
    println!("hold angles {:.2?} deg", f.mean_angles);
}
