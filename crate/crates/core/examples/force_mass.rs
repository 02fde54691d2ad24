//! Hold force against object mass, interpolated per grasp type.

use grasp_synergy::dataset::{synthetic_dataset, SyntheticConfig};
use grasp_synergy::hand::GraspType;
use grasp_synergy::synergy::force_mass_fit;
use grasp_synergy::trial::{analyze_dataset, SegmentationConfig};

fn main() {
    let (ds, _) = synthetic_dataset(&SyntheticConfig::with_seed(8)).unwrap();
    let (analyzed, _) = analyze_dataset(&ds, &SegmentationConfig::default());
    for g in [GraspType::SphericalGrip, GraspType::CylindricalGrip, GraspType::PulpPinch] {
        let model = force_mass_fit(&ds, &analyzed, g).unwrap();
        println!("{}:", g.full_name());
        for p in &model.samples {
            println!("  {:8.2} g -> {:6.3} N  {:?}", p.mass_g, p.force_n, p.objects);
        }
        for m in [100.0, 1000.0] {
            let e = model.eval(m);
            println!("  at {m} g: {:.3} N{}", e.force_n, if e.extrapolated { " (extrapolated)" } else { "" });
        }
    }
}
