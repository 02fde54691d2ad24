//! Per-grasp-type finger correlations and the strongest pairs.

use grasp_synergy::dataset::{synthetic_dataset, SyntheticConfig};
use grasp_synergy::hand::Domain;
use grasp_synergy::synergy::{correlation_extrema, grasp_type_correlations, CorrelationWindow};
use grasp_synergy::trial::{analyze_dataset, SegmentationConfig};

fn main() {
    let (ds, _) = synthetic_dataset(&SyntheticConfig::with_seed(3)).unwrap();
    let (analyzed, _) = analyze_dataset(&ds, &SegmentationConfig::default());
    for domain in Domain::BOTH {
        let per_type = grasp_type_correlations(&ds, &analyzed, domain, CorrelationWindow::HoldOnly);
        let ext = correlation_extrema(domain, &per_type);
        println!("{} (hold phase):", domain.name());
        for p in &ext.pairs {
            println!(
                "  {:>6}-{:<6} max {:+.3} ({:?})  min {:+.3} ({:?})",
                p.a.name(),
                p.b.name(),
                p.max_r.unwrap_or(f64::NAN),
                p.max_type,
                p.min_r.unwrap_or(f64::NAN),
                p.min_type
            );
        }
    }
}
