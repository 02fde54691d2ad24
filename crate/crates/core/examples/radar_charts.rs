//! Mean hold profiles per grasp type, force pentagon areas and radar SVGs.

use grasp_synergy::dataset::{synthetic_dataset, SyntheticConfig};
use grasp_synergy::plot::radar_svg;
use grasp_synergy::synergy::{radar_area, radar_profiles};
use grasp_synergy::trial::{analyze_dataset, SegmentationConfig};

fn main() {
    let (ds, _) = synthetic_dataset(&SyntheticConfig::with_seed(5)).unwrap();
    let (analyzed, _) = analyze_dataset(&ds, &SegmentationConfig::default());
    let set = radar_profiles(&ds, &analyzed);
    let mut areas: Vec<_> = set.force.iter().map(|(g, p)| (radar_area(p).unwrap(), *g)).collect();
    areas.sort_by(|a, b| b.0.total_cmp(&a.0));
    for (a, g) in &areas {
        println!("{:>14} {:?}: {a:6.2} N^2", g.full_name(), g.class());
    }

    let out = std::env::temp_dir().join("grasp-synergy-example-radar");
    std::fs::create_dir_all(&out).unwrap();
    let force: Vec<_> = set.force.values().collect();
    let posture: Vec<_> = set.posture.values().collect();
    std::fs::write(out.join("force.svg"), radar_svg("Hold forces (N)", &force)).unwrap();
    std::fs::write(out.join("posture.svg"), radar_svg("Hold joint angles (deg)", &posture)).unwrap();
    println!("charts in {}", out.display());
}
