use grasp_synergy::dataset::{synthetic_dataset, NoiseConfig, PlantedCorrelation, SyntheticConfig};
use grasp_synergy::hand::{Domain, FingerId, GraspClass, GraspType};
use grasp_synergy::synergy::{
    correlation_extrema, cross_domain_correlations, feature_matrix, force_mass_fit, grasp_type_correlations, pca_fit,
    pca_fit_with, radar_area, radar_profiles, CorrelationWindow, PcaOptions,
};
use grasp_synergy::trial::{analyze_dataset, SegmentationConfig};

#[test]
fn thumb_carries_the_most_force_in_every_grasp() {
    let (ds, _) = synthetic_dataset(&SyntheticConfig::with_seed(1)).unwrap();
    let (an, _) = analyze_dataset(&ds, &SegmentationConfig::default());
    let set = radar_profiles(&ds, &an);
    for (g, p) in &set.force {
        if !g.is_grasp() {
            continue;
        }
        let r = p.radii();
        assert!(r[0] >= r[3] && r[0] >= r[4], "{g}: {r:?}");
    }
    assert_eq!(set.posture[&GraspType::HookGrip].spokes.len(), 15);
}

#[test]
fn power_grasps_outweigh_precision_grasps_on_average() {
    let (ds, _) = synthetic_dataset(&SyntheticConfig::with_seed(2)).unwrap();
    let (an, _) = analyze_dataset(&ds, &SegmentationConfig::default());
    let set = radar_profiles(&ds, &an);
    let mean_area = |class: GraspClass| {
        let v: Vec<f64> = set
            .force
            .iter()
            .filter(|(g, _)| g.class() == class)
            .map(|(_, p)| radar_area(p).unwrap())
            .collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    assert!(mean_area(GraspClass::Power) > mean_area(GraspClass::Precision));
}

#[test]
fn hold_force_rises_with_mass_within_a_grasp_type() {
    let (ds, _) = synthetic_dataset(&SyntheticConfig::with_seed(3)).unwrap();
    let (an, _) = analyze_dataset(&ds, &SegmentationConfig::default());
    let m = force_mass_fit(&ds, &an, GraspType::SphericalGrip).unwrap();
    let (light, heavy) = (m.samples.first().unwrap(), m.samples.last().unwrap());
    assert!(heavy.mass_g > light.mass_g);
    assert!(heavy.force_n > light.force_n, "{light:?} {heavy:?}");
    assert!(force_mass_fit(&ds, &an, GraspType::IndexPointing).is_err());
}

#[test]
fn hold_only_window_and_extrema() {
    let mut cfg = SyntheticConfig::with_seed(4);
    cfg.subjects = 3;
    cfg.planted.push(PlantedCorrelation {
        domain: Domain::Force,
        grasp_type: Some(GraspType::CylindricalGrip),
        a: FingerId::Thumb,
        b: FingerId::Ring,
        r: 0.95,
    });
    let (ds, _) = synthetic_dataset(&cfg).unwrap();
    let (an, _) = analyze_dataset(&ds, &SegmentationConfig::default());
    let full = grasp_type_correlations(&ds, &an, Domain::Force, CorrelationWindow::FullTrial);
    let hold = grasp_type_correlations(&ds, &an, Domain::Force, CorrelationWindow::HoldOnly);
    assert_eq!(full.len(), hold.len());
    assert!(hold.values().all(|m| m.samples < full[&GraspType::PulpPinch].samples));
    let ext = correlation_extrema(Domain::Force, &full);
    assert_eq!(ext.pairs.len(), 10);
    let planted = full[&GraspType::CylindricalGrip].get(FingerId::Thumb, FingerId::Ring).unwrap();
    assert!((planted - 0.95).abs() < 0.05, "{planted}");
    let tr = ext.pair(FingerId::Ring, FingerId::Thumb).unwrap();
    let all: Vec<f64> = full.values().filter_map(|m| m.get(FingerId::Thumb, FingerId::Ring)).collect();
    assert_eq!(tr.max_r, all.iter().copied().reduce(f64::max));
    assert_eq!(tr.min_r, all.iter().copied().reduce(f64::min));
    assert_eq!(full[&tr.max_type.unwrap()].get(FingerId::Thumb, FingerId::Ring), tr.max_r);
    let cross = cross_domain_correlations(&ds, &an, CorrelationWindow::FullTrial);
    assert_eq!(cross.len(), full.len());
}

#[test]
fn noiseless_features_reach_rank_three() {
    let mut cfg = SyntheticConfig::with_seed(5);
    cfg.noise = NoiseConfig::zero();
    let (ds, _) = synthetic_dataset(&cfg).unwrap();
    let (an, warnings) = analyze_dataset(&ds, &SegmentationConfig::default());
    assert!(warnings.is_empty());
    for d in Domain::BOTH {
        let m = pca_fit(&feature_matrix(&ds, &an, d, false).rows).unwrap();
        assert!(m.cumulative()[2] > 0.999, "{d:?}: {:?}", m.cumulative());
    }
}

#[test]
fn decomposed_posture_pca_matches_five_channel_rank() {
    let (ds, _) = synthetic_dataset(&SyntheticConfig::with_seed(6)).unwrap();
    let (an, _) = analyze_dataset(&ds, &SegmentationConfig::default());
    let fm = feature_matrix(&ds, &an, Domain::Posture, true);
    assert_eq!(fm.rows[0].len(), 15);
    let m = pca_fit(&fm.rows).unwrap();
    // joints are fixed multiples of the five flexions
    assert!(m.explained[5..].iter().all(|&e| e < 1e-10));
    let z = pca_fit_with(&fm.rows, PcaOptions { zscore: true }).unwrap();
    assert!((z.explained.iter().sum::<f64>() - 1.0).abs() < 1e-9);
}
