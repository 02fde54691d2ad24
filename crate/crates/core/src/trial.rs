//! Trial validation, phase segmentation and hold-phase features.
//!
//! A protocol trial runs through four phases: approach (fingers close, no
//! contact), grasp (fingertip forces build), lift (forces adjust while the
//! object leaves the table) and hold (forces settle). Boundaries are found
//! from thresholds on the force and angle channels unless a manual
//! annotation is supplied.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::Dataset;
use crate::hand::{Channels, FingerId, GraspTrial, HandError, HandPosture, MAX_COMBINED_FLEX_DEG};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentationConfig {
    /// Contact threshold, N.
    pub f_on: f64,
    /// Approach motion threshold on the mean flex angle, degrees per sample.
    pub angle_rate_eps: f64,
    /// Hold stability threshold on each force channel's standard deviation, N.
    pub hold_std: f64,
    /// Stability window, samples.
    pub stable_window: usize,
}

impl Default for SegmentationConfig {
    fn default() -> Self {
        SegmentationConfig {
            f_on: 0.1,
            angle_rate_eps: 0.05,
            hold_std: 0.05,
            stable_window: 40,
        }
    }
}

impl SegmentationConfig {
    pub fn check(&self) -> Result<(), SegmentError> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if ok(self.f_on) && ok(self.angle_rate_eps) && ok(self.hold_std) && self.stable_window >= 4 {
            Ok(())
        } else {
            Err(SegmentError::InvalidConfig(*self))
        }
    }

    /// Consecutive samples of angle motion that mark the approach onset.
    pub fn onset_run(&self) -> usize {
        (self.stable_window / 4).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseAnnotation {
    pub approach_start: usize,
    pub grasp_start: usize,
    pub lift_start: usize,
    pub hold_start: usize,
    pub hold_end: usize,
}

impl PhaseAnnotation {
    pub fn is_valid_for(&self, len: usize) -> bool {
        self.approach_start <= self.grasp_start
            && self.grasp_start <= self.lift_start
            && self.lift_start <= self.hold_start
            && self.hold_start < self.hold_end
            && self.hold_end <= len
    }

    pub fn check(&self, len: usize) -> Result<(), SegmentError> {
        if self.is_valid_for(len) {
            Ok(())
        } else {
            Err(SegmentError::InvalidAnnotation { ann: *self, len })
        }
    }

    pub fn boundaries(&self) -> [usize; 5] {
        [
            self.approach_start,
            self.grasp_start,
            self.lift_start,
            self.hold_start,
            self.hold_end,
        ]
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SegmentError {
    #[error("no fingertip force reaches the contact threshold")]
    NoContact,
    #[error("forces never stabilize after lift; best window starts at {best_start} (max std {best_std:.4} N)")]
    UnstableHold { best_start: usize, best_std: f64 },
    #[error("trial has {len} samples, fewer than the {window}-sample stability window")]
    TooShort { len: usize, window: usize },
    #[error("invalid segmentation config {0:?}")]
    InvalidConfig(SegmentationConfig),
    #[error("annotation {ann:?} is not ordered within a {len}-sample trial")]
    InvalidAnnotation { ann: PhaseAnnotation, len: usize },
    #[error("force and angle series differ in length ({forces} vs {angles})")]
    LengthMismatch { forces: usize, angles: usize },
    #[error("hold window is empty")]
    EmptyHold,
    #[error(transparent)]
    Hand(#[from] HandError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Metadata { message: String },
    LengthMismatch { forces: usize, angles: usize },
    SampleCount { expected: usize, actual: usize },
    NonFinite { channel: String, first_index: usize, count: usize },
    NegativeForce { finger: FingerId, first_index: usize, count: usize },
    AngleOutOfRange { finger: FingerId, first_index: usize, count: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::Metadata { message } => write!(f, "metadata: {message}"),
            Violation::LengthMismatch { forces, angles } => {
                write!(f, "{forces} force samples but {angles} angle samples")
            }
            Violation::SampleCount { expected, actual } => {
                write!(f, "expected {expected} samples, found {actual}")
            }
            Violation::NonFinite {
                channel,
                first_index,
                count,
            } => write!(f, "{count} non-finite {channel} values from sample {first_index}"),
            Violation::NegativeForce {
                finger,
                first_index,
                count,
            } => write!(f, "{count} negative {finger} forces from sample {first_index}"),
            Violation::AngleOutOfRange {
                finger,
                first_index,
                count,
            } => write!(
                f,
                "{count} {finger} angles outside [0, {MAX_COMBINED_FLEX_DEG}] from sample {first_index}"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// No force sample reaches the contact threshold.
    pub no_contact: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Passed and segmentable.
    pub fn usable(&self) -> bool {
        self.passed() && !self.no_contact
    }
}

/// First index and count of samples of one channel matching `bad`.
fn scan(rows: &[Channels], col: usize, bad: impl Fn(f64) -> bool) -> Option<(usize, usize)> {
    let mut first = None;
    let mut count = 0;
    for (i, r) in rows.iter().enumerate() {
        if bad(r[col]) {
            first.get_or_insert(i);
            count += 1;
        }
    }
    first.map(|f| (f, count))
}

pub fn validate_trial(trial: &GraspTrial) -> ValidationReport {
    validate_trial_with(trial, SegmentationConfig::default().f_on)
}

pub fn validate_trial_with(trial: &GraspTrial, f_on: f64) -> ValidationReport {
    let mut v = Vec::new();
    if let Err(e) = trial.meta.check() {
        v.push(Violation::Metadata { message: e.to_string() });
    }
    let (nf, na) = (trial.forces.len(), trial.angles.len());
    if nf != na {
        v.push(Violation::LengthMismatch { forces: nf, angles: na });
    }
    let expected = trial.meta.sample_count();
    if nf != expected || na != expected {
        v.push(Violation::SampleCount {
            expected,
            actual: if nf != expected { nf } else { na },
        });
    }
    for finger in FingerId::ALL {
        let c = finger.index();
        if let Some((first_index, count)) = scan(&trial.forces, c, |x| !x.is_finite()) {
            v.push(Violation::NonFinite {
                channel: format!("f_{}", finger.name()),
                first_index,
                count,
            });
        }
        if let Some((first_index, count)) = scan(&trial.angles, c, |x| !x.is_finite()) {
            v.push(Violation::NonFinite {
                channel: format!("a_{}", finger.name()),
                first_index,
                count,
            });
        }
    }
    for finger in FingerId::ALL {
        if let Some((first_index, count)) = scan(&trial.forces, finger.index(), |x| x < 0.0) {
            v.push(Violation::NegativeForce {
                finger,
                first_index,
                count,
            });
        }
    }
    for finger in FingerId::ALL {
        let out = |x: f64| x.is_finite() && !(0.0..=MAX_COMBINED_FLEX_DEG).contains(&x);
        if let Some((first_index, count)) = scan(&trial.angles, finger.index(), out) {
            v.push(Violation::AngleOutOfRange {
                finger,
                first_index,
                count,
            });
        }
    }
    let no_contact = !trial.forces.iter().flatten().any(|&x| x >= f_on);
    ValidationReport {
        violations: v,
        no_contact,
    }
}

fn max_of(r: &Channels) -> f64 {
    r.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn mean_of(r: &Channels) -> f64 {
    r.iter().sum::<f64>() / 5.0
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn sample_std(x: impl Iterator<Item = f64> + Clone) -> f64 {
    let (n, s) = x.clone().fold((0usize, 0.0), |(n, s), v| (n + 1, s + v));
    if n < 2 {
        return 0.0;
    }
    let m = s / n as f64;
    let ss: f64 = x.map(|v| (v - m) * (v - m)).sum();
    (ss / (n - 1) as f64).sqrt()
}

/// Largest per-channel standard deviation of the forces in `[s, s + w)`.
fn window_std(forces: &[Channels], s: usize, w: usize) -> f64 {
    (0..5)
        .map(|c| sample_std(forces[s..s + w].iter().map(move |r| r[c])))
        .fold(0.0, f64::max)
}

fn detect_approach(angles: &[Channels], grasp_start: usize, cfg: &SegmentationConfig) -> usize {
    let q = cfg.onset_run();
    let mean: Vec<f64> = angles[..=grasp_start.min(angles.len() - 1)]
        .iter()
        .map(mean_of)
        .collect();
    let mut run = 0;
    for t in 0..mean.len().saturating_sub(1) {
        if mean[t + 1] - mean[t] > cfg.angle_rate_eps {
            run += 1;
            if run == q {
                return t + 1 - q;
            }
        } else {
            run = 0;
        }
    }
    grasp_start
}

/// Lift onset: after the contact build-up, the total-force derivative drops
/// into a quiescent stretch and then rises again to at least its median
/// over the first stability window after contact.
fn detect_lift(total: &[f64], grasp_start: usize, cfg: &SegmentationConfig) -> usize {
    let n = total.len();
    let w = cfg.stable_window;
    let q = cfg.onset_run();
    if grasp_start + w + 1 >= n {
        return grasp_start;
    }
    let d = |t: usize| total[t + 1] - total[t];
    let rate = |t: usize| (total[t + q] - total[t]) / q as f64;
    let m = median((grasp_start..grasp_start + w).map(d).collect());
    if m <= 0.0 {
        return grasp_start;
    }
    let last_rate = n - 1 - q;
    let win_end = (grasp_start + w).min(last_rate + 1);
    let Some(t_peak) = (grasp_start..win_end).max_by(|&a, &b| rate(a).total_cmp(&rate(b)).then(b.cmp(&a)))
    else {
        return grasp_start;
    };
    let Some(t_quiet) = (t_peak..=last_rate).find(|&t| rate(t) < m / 2.0) else {
        return grasp_start;
    };
    (t_quiet + 1..=last_rate)
        .find(|&t| d(t) >= m && rate(t) >= m)
        .unwrap_or(t_quiet)
}

/// Detect the four phase boundaries of a trial.
pub fn segment_phases(trial: &GraspTrial, cfg: &SegmentationConfig) -> Result<PhaseAnnotation, SegmentError> {
    cfg.check()?;
    let (forces, angles) = (&trial.forces, &trial.angles);
    if forces.len() != angles.len() {
        return Err(SegmentError::LengthMismatch {
            forces: forces.len(),
            angles: angles.len(),
        });
    }
    let n = forces.len();
    let w = cfg.stable_window;
    if n < w {
        return Err(SegmentError::TooShort { len: n, window: w });
    }
    let grasp_start = forces
        .iter()
        .position(|r| max_of(r) >= cfg.f_on)
        .ok_or(SegmentError::NoContact)?;
    let approach_start = detect_approach(angles, grasp_start, cfg);
    let total: Vec<f64> = forces.iter().map(|r| r.iter().sum()).collect();
    let lift_start = detect_lift(&total, grasp_start, cfg);

    let mut best = (lift_start.min(n - w), f64::INFINITY);
    for s in lift_start..=n.saturating_sub(w) {
        let sd = window_std(forces, s, w);
        if sd < cfg.hold_std {
            return Ok(PhaseAnnotation {
                approach_start,
                grasp_start,
                lift_start,
                hold_start: s,
                hold_end: n,
            });
        }
        if sd < best.1 {
            best = (s, sd);
        }
    }
    Err(SegmentError::UnstableHold {
        best_start: best.0,
        best_std: best.1,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoldFeatures {
    pub mean_forces: Channels,
    pub mean_angles: Channels,
    pub mean_posture: HandPosture,
    pub total_force: f64,
}

impl HoldFeatures {
    pub fn forces(&self) -> &Channels {
        &self.mean_forces
    }
}

/// Per-channel means over `[hold_start, hold_end)`.
pub fn hold_features(trial: &GraspTrial, ann: &PhaseAnnotation) -> Result<HoldFeatures, SegmentError> {
    let (s, e) = (ann.hold_start, ann.hold_end.min(trial.len()));
    if s >= e {
        return Err(SegmentError::EmptyHold);
    }
    let k = (e - s) as f64;
    let mut mean_forces = [0.0; 5];
    let mut mean_angles = [0.0; 5];
    for (f, a) in trial.forces[s..e].iter().zip(&trial.angles[s..e]) {
        for c in 0..5 {
            mean_forces[c] += f[c];
            mean_angles[c] += a[c];
        }
    }
    for c in 0..5 {
        mean_forces[c] /= k;
        mean_angles[c] /= k;
    }
    Ok(HoldFeatures {
        mean_forces,
        mean_angles,
        mean_posture: HandPosture::from_flex_angles(&mean_angles)?,
        total_force: mean_forces.iter().sum(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseSource {
    Manual,
    Detected,
}

/// A dataset trial with its phases and hold features. `index` points into
/// [`Dataset::entries`].
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzedTrial {
    pub index: usize,
    pub phases: PhaseAnnotation,
    pub source: PhaseSource,
    pub features: HoldFeatures,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialWarning {
    pub trial: String,
    pub message: String,
}

/// Segment every trial and extract hold features. Manual annotations take
/// precedence over detection; trials that cannot be segmented are skipped
/// with a warning.
pub fn analyze_dataset(ds: &Dataset, cfg: &SegmentationConfig) -> (Vec<AnalyzedTrial>, Vec<TrialWarning>) {
    let mut out = Vec::new();
    let mut warnings = Vec::new();
    for (index, entry) in ds.entries.iter().enumerate() {
        let phases = match entry.annotation {
            Some(ann) => ann.check(entry.trial.len()).map(|_| (ann, PhaseSource::Manual)),
            None => segment_phases(&entry.trial, cfg).map(|a| (a, PhaseSource::Detected)),
        };
        let result = phases.and_then(|(phases, source)| {
            Ok(AnalyzedTrial {
                index,
                phases,
                source,
                features: hold_features(&entry.trial, &phases)?,
            })
        });
        match result {
            Ok(a) => out.push(a),
            Err(e) => warnings.push(TrialWarning {
                trial: entry.key.to_string(),
                message: e.to_string(),
            }),
        }
    }
    (out, warnings)
}
