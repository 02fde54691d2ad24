//! Write a seeded synthetic dataset to disk and read it back.

use grasp_synergy::dataset::{generate_synthetic_dataset, load_dataset, read_ground_truth, SyntheticConfig};

fn main() {
    let dir = std::env::temp_dir().join("grasp-synergy-example-dataset");
    let mut cfg = SyntheticConfig::with_seed(42);
    cfg.subjects = 2;
    let manifest = generate_synthetic_dataset(&cfg, &dir).unwrap();
    println!("wrote {} trials to {}", manifest.trials.len(), dir.display());

    let ds = load_dataset(&dir).unwrap();
    let truth = read_ground_truth(&dir).unwrap();
    let first = &truth.trials[0];
    println!("first trial {} planted phases {:?}", first.key, first.phases);
    println!("hold jitter per domain: {:?}", truth.hold_jitter);
    for (g, idx) in ds.by_grasp_type() {
        println!("{:>14}: {} trials", g.full_name(), idx.len());
    }
}
