use std::path::Path;

use grasp_synergy::dataset::{
    generate_synthetic_dataset, load_dataset, read_ground_truth, synthetic_dataset, DatasetError, DatasetManifest,
    SyntheticConfig, TRIAL_CSV_HEADER,
};
use grasp_synergy::trial::{analyze_dataset, PhaseAnnotation, PhaseSource, SegmentationConfig};

fn small(seed: u64) -> SyntheticConfig {
    let mut cfg = SyntheticConfig::with_seed(seed);
    cfg.subjects = 2;
    cfg.objects.truncate(4);
    cfg
}

fn write(dir: &Path, seed: u64) -> DatasetManifest {
    generate_synthetic_dataset(&small(seed), dir).unwrap()
}

#[test]
fn written_dataset_loads_back_identically() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), 3);
    let loaded = load_dataset(tmp.path()).unwrap();
    let (memory, _) = synthetic_dataset(&small(3)).unwrap();
    assert_eq!(loaded.len(), memory.len());
    for (a, b) in loaded.entries.iter().zip(&memory.entries) {
        assert_eq!(a.key, b.key);
        assert_eq!(a.trial.meta, b.trial.meta);
        for (ra, rb) in a.trial.forces.iter().chain(&a.trial.angles).zip(b.trial.forces.iter().chain(&b.trial.angles)) {
            for c in 0..5 {
                assert!((ra[c] - rb[c]).abs() <= 1e-6);
            }
        }
    }
}

#[test]
fn manifest_file_path_is_accepted() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), 4);
    let by_dir = load_dataset(tmp.path()).unwrap();
    let by_file = load_dataset(&tmp.path().join("manifest.json")).unwrap();
    assert_eq!(by_dir, by_file);
}

#[test]
fn trial_csv_has_the_documented_header() {
    let tmp = tempfile::tempdir().unwrap();
    let m = write(tmp.path(), 5);
    let text = std::fs::read_to_string(tmp.path().join(&m.trials[0].file)).unwrap();
    assert_eq!(text.lines().next().unwrap(), TRIAL_CSV_HEADER.join(","));
    assert_eq!(text.lines().count(), 1 + 1200);
}

#[test]
fn problems_are_collected_across_trials() {
    let tmp = tempfile::tempdir().unwrap();
    let m = write(tmp.path(), 6);
    std::fs::remove_file(tmp.path().join(&m.trials[0].file)).unwrap();
    let bad = tmp.path().join(&m.trials[1].file);
    let text = std::fs::read_to_string(&bad).unwrap();
    let corrupted: Vec<String> = text
        .lines()
        .enumerate()
        .map(|(i, l)| if i == 10 { l.replacen(',', ",x", 2) } else { l.to_string() })
        .collect();
    std::fs::write(&bad, corrupted.join("\n")).unwrap();
    match load_dataset(tmp.path()) {
        Err(DatasetError::Invalid(problems)) => {
            assert_eq!(problems.len(), 2, "{problems:?}");
            assert!(problems[0].contains("missing file"));
            assert!(problems[1].contains("row"));
        }
        other => panic!("expected aggregated problems, got {other:?}"),
    }
}

#[test]
fn negative_forces_fail_validation_on_load() {
    let tmp = tempfile::tempdir().unwrap();
    let m = write(tmp.path(), 7);
    let path = tmp.path().join(&m.trials[2].file);
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let mut cells: Vec<String> = lines[500].split(',').map(str::to_string).collect();
    cells[1] = "-0.500000".into();
    lines[500] = cells.join(",");
    std::fs::write(&path, lines.join("\n") + "\n").unwrap();
    let err = load_dataset(tmp.path()).unwrap_err().to_string();
    assert!(err.contains("negative"), "{err}");
    assert!(err.contains(&m.trials[2].file), "{err}");
}

#[test]
fn duplicate_trials_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let mut m = write(tmp.path(), 8);
    m.trials.push(m.trials[0].clone());
    m.write(&tmp.path().join("manifest.json")).unwrap();
    let err = load_dataset(tmp.path()).unwrap_err().to_string();
    assert!(err.contains("duplicate"), "{err}");
}

#[test]
fn manual_phases_override_detection() {
    let tmp = tempfile::tempdir().unwrap();
    let mut m = write(tmp.path(), 9);
    let manual = PhaseAnnotation {
        approach_start: 10,
        grasp_start: 20,
        lift_start: 30,
        hold_start: 1000,
        hold_end: 1200,
    };
    m.trials[0].phases = Some(manual);
    m.trials[0].video = Some("video/s01.mp4".into());
    m.write(&tmp.path().join("manifest.json")).unwrap();
    let ds = load_dataset(tmp.path()).unwrap();
    let (an, _) = analyze_dataset(&ds, &SegmentationConfig::default());
    let key = m.trials[0].key();
    let entry = ds.entries.iter().position(|e| e.key == key).unwrap();
    assert_eq!(ds.entries[entry].video.as_deref(), Some("video/s01.mp4"));
    let a = an.iter().find(|a| a.index == entry).unwrap();
    assert_eq!(a.phases, manual);
    assert_eq!(a.source, PhaseSource::Manual);
    assert!(an.iter().filter(|a| a.index != entry).all(|a| a.source == PhaseSource::Detected));
}

#[test]
fn disordered_manual_phases_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let mut m = write(tmp.path(), 10);
    m.trials[0].phases = Some(PhaseAnnotation {
        approach_start: 50,
        grasp_start: 20,
        lift_start: 30,
        hold_start: 40,
        hold_end: 1200,
    });
    m.write(&tmp.path().join("manifest.json")).unwrap();
    assert!(load_dataset(tmp.path()).unwrap_err().to_string().contains("manual phases"));
}

#[test]
fn ground_truth_sidecar_matches_generation() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), 11);
    let gt = read_ground_truth(tmp.path()).unwrap();
    let (_, truths) = synthetic_dataset(&small(11)).unwrap();
    assert_eq!(gt.config, small(11));
    assert_eq!(gt.trials.len(), truths.len());
    for (a, b) in gt.trials.iter().zip(&truths) {
        assert_eq!(a.key, b.key);
        assert_eq!(a.phases, b.phases);
        for c in 0..5 {
            assert!((a.posture.hold[c] - b.posture.hold[c]).abs() < 1e-12);
        }
    }
}

#[test]
fn generation_is_reproducible_on_disk() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ma = write(a.path(), 12);
    write(b.path(), 12);
    for t in &ma.trials {
        assert_eq!(std::fs::read(a.path().join(&t.file)).unwrap(), std::fs::read(b.path().join(&t.file)).unwrap());
    }
    assert_eq!(
        std::fs::read(a.path().join("manifest.json")).unwrap(),
        std::fs::read(b.path().join("manifest.json")).unwrap()
    );
}
