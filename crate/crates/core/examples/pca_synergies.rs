//! Principal postural and force synergies with elbow selection.

use grasp_synergy::dataset::{synthetic_dataset, SyntheticConfig};
use grasp_synergy::hand::Domain;
use grasp_synergy::synergy::{elbow_select, feature_matrix, pca_fit_with, PcaOptions};
use grasp_synergy::trial::{analyze_dataset, SegmentationConfig};

fn main() {
    let (ds, _) = synthetic_dataset(&SyntheticConfig::with_seed(42)).unwrap();
    let (analyzed, _) = analyze_dataset(&ds, &SegmentationConfig::default());
    for (domain, decomposed) in [(Domain::Force, false), (Domain::Posture, false), (Domain::Posture, true)] {
        let fm = feature_matrix(&ds, &analyzed, domain, decomposed);
        let model = pca_fit_with(&fm.rows, PcaOptions { zscore: false }).unwrap();
        let k = elbow_select(&model.explained);
        let cum = model.cumulative();
        println!("{} ({} features): elbow k = {k}, cumulative {:.1}%", domain.name(), fm.labels.len(), 100.0 * cum[k - 1]);
        for (i, c) in model.components.iter().take(k).enumerate() {
            println!("  PC{} {:5.1}%  {:+.2?}", i + 1, 100.0 * model.explained[i], c);
        }
    }
}
