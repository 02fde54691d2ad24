//! Two-dimensional t-SNE embedding of hold postures, written as an SVG.

use grasp_synergy::dataset::{synthetic_dataset, SyntheticConfig};
use grasp_synergy::hand::Domain;
use grasp_synergy::plot::scatter_svg;
use grasp_synergy::synergy::{feature_matrix, tsne_embed, TsneConfig};
use grasp_synergy::trial::{analyze_dataset, SegmentationConfig};

fn main() {
    let (ds, _) = synthetic_dataset(&SyntheticConfig::with_seed(42)).unwrap();
    let (analyzed, _) = analyze_dataset(&ds, &SegmentationConfig::default());
    let fm = feature_matrix(&ds, &analyzed, Domain::Posture, false);
    let cfg = TsneConfig {
        seed: 7,
        ..TsneConfig::default()
    };
    let e = tsne_embed(&fm.rows, &cfg).unwrap();
    println!("{} points, perplexity {}, final KL {:.4}", e.points.len(), e.perplexity, e.final_kl);

    let path = std::env::temp_dir().join("grasp-synergy-example-tsne.svg");
    std::fs::write(&path, scatter_svg("t-SNE of hold postures", &e.points, &fm.grasp_types)).unwrap();
    println!("scatter in {}", path.display());
}
