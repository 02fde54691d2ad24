//! Seeded synthetic trials with planted phase boundaries and a planted
//! low-rank hold structure.
//!
//! Each domain (posture, force) has its own rank-r basis `V` (rows
//! orthonormal). A trial's hold target is
//!
//! ```text
//! target = base + V^T (z_type + coef_sd * eps)        eps ~ N(0, 1) truncated at +-3
//! hold   = target + jitter                            jitter ~ N(0, sigma^2 I)
//! ```
//!
//! with an extra mass term on the first force coefficient, so heavier objects
//! of a grasp type are held harder. The hold jitter defaults to a 20 dB
//! signal-to-noise ratio against the config's own signal variance. Sample
//! noise on top of the waveforms is separate and much smaller.
//!
//! Waveforms: angles are zero until the approach onset, rise along a
//! logistic to the hold posture, wobble slightly during the lift and sit
//! exactly on the target from the hold sample. Forces stay below the
//! contact threshold until the contact sample, build along a logistic, rise
//! by a fraction with a tremor during the lift and settle exactly on the
//! target at the hold sample.

use std::collections::BTreeMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::manifest::{DatasetManifest, ManifestTrial, MANIFEST_FILE};
use super::trial_csv::write_trial_csv;
use super::{Dataset, DatasetEntry, DatasetError, TrialKey};
use crate::hand::{
    builtin_catalog, Channels, Domain, FingerId, GraspTrial, GraspType, ObjectSpec, TrialMeta,
    MAX_FINGERTIP_FORCE_N, PROTOCOL_DURATION_S, PROTOCOL_SCAN_RATE_HZ,
};
use crate::trial::PhaseAnnotation;

pub const GROUND_TRUTH_FILE: &str = "ground_truth.json";
pub const GROUND_TRUTH_VERSION: u32 = 1;

/// Truncation bound of the coefficient draws, in standard deviations.
const EPS_BOUND: f64 = 3.0;
/// Variance of a standard normal truncated at +-3.
const TRUNCATED_VARIANCE: f64 = 0.973_336_924_662_541_5;
const MAX_ANGLE_DEG: f64 = 90.0;

const POSTURE_BASE: Channels = [35.1923, 46.4231, 47.7308, 44.2308, 41.0385];
const POSTURE_BASIS: [Channels; 3] = [
    [0.0516, 0.2836, 0.5105, 0.5834, 0.5621],
    [-0.1475, 0.9425, -0.045, -0.1763, -0.2382],
    [0.9836, 0.1141, 0.0373, -0.0572, -0.1223],
];
/// Rows follow `GraspType::ALL`.
const POSTURE_LATENT: [[f64; 3]; 10] = [
    [-49.9306, 5.4083, 3.0393],
    [10.4627, 0.5321, -0.8033],
    [20.9568, -3.7133, 4.8799],
    [28.6882, 4.6022, 9.1177],
    [-25.6376, -3.8131, -4.4761],
    [-28.5647, 1.8958, 5.0941],
    [11.984, 5.0871, 5.1634],
    [39.3151, 10.0064, -15.8764],
    [-56.4122, -13.3275, -19.8365],
    [34.59, -46.689, 1.4201],
];

const FORCE_BASE: Channels = [2.8115, 2.0731, 1.65, 0.9596, 0.8904];
const FORCE_BASIS: [Channels; 3] = [
    [0.6783, 0.344, 0.504, 0.3008, 0.2776],
    [0.6414, 0.0906, -0.3978, -0.4622, -0.4566],
    [-0.2427, 0.8886, -0.3715, 0.1021, 0.0557],
];
const FORCE_LATENT: [[f64; 3]; 10] = [
    [-1.8101, 0.3081, 0.0684],
    [-1.5887, 0.3799, -0.0596],
    [0.4664, 0.1961, 0.1452],
    [2.1682, 0.1324, 0.0069],
    [1.0894, 0.1188, 0.0199],
    [-1.0145, 0.1177, -0.2134],
    [1.6116, 0.1211, -0.031],
    [0.5317, -0.8652, 0.0062],
    [-1.6625, -0.9717, -0.259],
    [-2.6996, -0.5547, 0.4317],
];

/// Planted low-rank model of one domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainModel {
    pub base: Channels,
    /// Orthonormal rows; the planted rank is the row count.
    pub basis: Vec<Channels>,
    /// Mean coefficients of each grasp type in the basis.
    pub type_latent: BTreeMap<GraspType, Vec<f64>>,
    /// Per-trial coefficient spread.
    pub coef_sd: Vec<f64>,
}

impl DomainModel {
    fn from_tables(base: Channels, basis: &[Channels; 3], latent: &[[f64; 3]; 10], coef_sd: [f64; 3]) -> Self {
        DomainModel {
            base,
            basis: orthonormalize(basis),
            type_latent: GraspType::ALL
                .iter()
                .zip(latent)
                .map(|(&g, z)| (g, z.to_vec()))
                .collect(),
            coef_sd: coef_sd.to_vec(),
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// `base + V^T z`.
    pub fn point(&self, z: &[f64]) -> Channels {
        let mut x = self.base;
        for (row, &zk) in self.basis.iter().zip(z) {
            for c in 0..5 {
                x[c] += row[c] * zk;
            }
        }
        x
    }

    /// Mean hold vector of a grasp type.
    pub fn type_mean(&self, g: GraspType) -> Option<Channels> {
        self.type_latent.get(&g).map(|z| self.point(z))
    }
}

fn orthonormalize(rows: &[Channels]) -> Vec<Channels> {
    let mut out: Vec<Channels> = Vec::new();
    for r in rows {
        let mut v = *r;
        for q in &out {
            let d: f64 = (0..5).map(|c| v[c] * q[c]).sum();
            for c in 0..5 {
                v[c] -= d * q[c];
            }
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        out.push(v.map(|x| x / n));
    }
    out
}

/// Planted phase boundaries, in samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub approach: usize,
    pub contact: usize,
    pub lift: usize,
    pub hold: usize,
}

impl Default for PhaseTimings {
    fn default() -> Self {
        PhaseTimings {
            approach: 80,
            contact: 200,
            lift: 360,
            hold: 600,
        }
    }
}

/// Shape parameters of the waveforms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveformConfig {
    /// 10-90% rise time of the approach and contact logistics, samples.
    pub rise_samples: f64,
    /// Fraction of the hold force present at the contact sample.
    pub contact_fraction: f64,
    /// Relative force increase during the lift.
    pub lift_overshoot: f64,
    /// 10-90% rise time of the lift increase, samples.
    pub lift_rise_samples: f64,
    /// Tremor amplitude during the lift: `base + gain * hold_force`, N.
    pub tremor_base: f64,
    pub tremor_gain: f64,
    pub tremor_period: f64,
    /// Relative angle excursion during the lift.
    pub angle_bump: f64,
    /// Ceiling of pre-contact force readings, N.
    pub precontact_max: f64,
}

impl Default for WaveformConfig {
    fn default() -> Self {
        WaveformConfig {
            rise_samples: 40.0,
            contact_fraction: 0.15,
            lift_overshoot: 0.4,
            lift_rise_samples: 10.0,
            tremor_base: 0.08,
            tremor_gain: 0.05,
            tremor_period: 40.0,
            angle_bump: 0.03,
            precontact_max: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    /// Per-sample force noise, N.
    pub force_n: f64,
    /// Per-sample angle noise, degrees.
    pub angle_deg: f64,
    /// Signal-to-noise ratio of the per-trial hold jitter; `None` disables it.
    pub hold_snr_db: Option<f64>,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            force_n: 0.02,
            angle_deg: 0.25,
            hold_snr_db: Some(20.0),
        }
    }
}

impl NoiseConfig {
    pub fn zero() -> Self {
        NoiseConfig {
            force_n: 0.0,
            angle_deg: 0.0,
            hold_snr_db: None,
        }
    }
}

/// Replace channel `b` so that it correlates with channel `a` at `r` over
/// each trial of the grasp type (all types when `grasp_type` is absent).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantedCorrelation {
    pub domain: Domain,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grasp_type: Option<GraspType>,
    pub a: FingerId,
    pub b: FingerId,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub seed: u64,
    pub subjects: usize,
    pub trials_per_object: u32,
    pub objects: Vec<ObjectSpec>,
    pub scan_rate_hz: f64,
    pub duration_s: f64,
    pub timings: PhaseTimings,
    pub waveform: WaveformConfig,
    pub posture: DomainModel,
    pub force: DomainModel,
    /// Extra first force coefficient per gram above the grasp type's mean
    /// object mass.
    pub mass_gain: f64,
    /// Coefficient spread multiplier of the non-grasp postures.
    pub non_grasp_scale: f64,
    pub noise: NoiseConfig,
    #[serde(default)]
    pub planted: Vec<PlantedCorrelation>,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig::with_seed(0)
    }
}

impl SyntheticConfig {
    /// Full protocol grid: 10 subjects, every catalog object, one trial each.
    pub fn with_seed(seed: u64) -> Self {
        SyntheticConfig {
            seed,
            subjects: 10,
            trials_per_object: 1,
            objects: builtin_catalog(),
            scan_rate_hz: PROTOCOL_SCAN_RATE_HZ,
            duration_s: PROTOCOL_DURATION_S,
            timings: PhaseTimings::default(),
            waveform: WaveformConfig::default(),
            posture: DomainModel::from_tables(POSTURE_BASE, &POSTURE_BASIS, &POSTURE_LATENT, [4.0, 4.0, 4.0]),
            force: DomainModel::from_tables(FORCE_BASE, &FORCE_BASIS, &FORCE_LATENT, [0.15, 0.12, 0.35]),
            mass_gain: 0.003,
            non_grasp_scale: 0.5,
            noise: NoiseConfig::default(),
            planted: Vec::new(),
        }
    }

    pub fn model(&self, domain: Domain) -> &DomainModel {
        match domain {
            Domain::Force => &self.force,
            Domain::Posture => &self.posture,
        }
    }

    pub fn sample_count(&self) -> usize {
        (self.scan_rate_hz * self.duration_s).round() as usize
    }

    pub fn planted_phases(&self) -> PhaseAnnotation {
        PhaseAnnotation {
            approach_start: self.timings.approach,
            grasp_start: self.timings.contact,
            lift_start: self.timings.lift,
            hold_start: self.timings.hold,
            hold_end: self.sample_count(),
        }
    }

    pub fn check(&self) -> Result<(), DatasetError> {
        let bad = |m: String| Err(DatasetError::Config(m));
        if self.subjects == 0 || self.trials_per_object == 0 || self.objects.is_empty() {
            return bad("need at least one subject, object and trial".into());
        }
        if !(self.scan_rate_hz > 0.0 && self.duration_s > 0.0) {
            return bad("scan rate and duration must be positive".into());
        }
        let t = self.timings;
        if !(t.approach <= t.contact && t.contact <= t.lift && t.lift < t.hold) {
            return bad(format!("timings out of order: {t:?}"));
        }
        if t.hold >= self.sample_count() {
            return bad(format!(
                "hold sample {} is beyond the {}-sample trial",
                t.hold,
                self.sample_count()
            ));
        }
        for o in &self.objects {
            o.check().map_err(|e| DatasetError::Config(e.to_string()))?;
        }
        for d in Domain::BOTH {
            let m = self.model(d);
            let r = m.rank();
            if r == 0 || r > 5 {
                return bad(format!("{d} rank {r} outside 1..=5"));
            }
            if m.coef_sd.len() != r || m.coef_sd.iter().any(|s| !(*s >= 0.0)) {
                return bad(format!("{d} coef_sd must hold {r} non-negative values"));
            }
            for o in &self.objects {
                match m.type_latent.get(&o.grasp_type) {
                    Some(z) if z.len() == r => {}
                    _ => return bad(format!("{d} model has no {r}-vector for {}", o.grasp_type)),
                }
            }
        }
        let n = self.noise;
        if !(n.force_n >= 0.0 && n.angle_deg >= 0.0) {
            return bad("noise must be non-negative".into());
        }
        for p in &self.planted {
            if p.a == p.b || !(p.r > 0.0 && p.r < 1.0) {
                return bad(format!("planted correlation needs distinct channels and 0 < r < 1: {p:?}"));
            }
        }
        Ok(())
    }

    fn mean_mass(&self, g: GraspType) -> Option<f64> {
        let m: Vec<f64> = self
            .objects
            .iter()
            .filter(|o| o.grasp_type == g)
            .filter_map(|o| o.mass_g)
            .collect();
        (!m.is_empty()).then(|| m.iter().sum::<f64>() / m.len() as f64)
    }

    fn coef_scale(&self, g: GraspType) -> f64 {
        if g.is_grasp() {
            1.0
        } else {
            self.non_grasp_scale
        }
    }

    fn mass_offset(&self, domain: Domain, object: &ObjectSpec) -> f64 {
        match (domain, object.mass_g, self.mean_mass(object.grasp_type)) {
            (Domain::Force, Some(m), Some(mean)) => self.mass_gain * (m - mean),
            _ => 0.0,
        }
    }

    fn expected_latent(&self, domain: Domain, object: &ObjectSpec) -> Vec<f64> {
        let mut z = self.model(domain).type_latent[&object.grasp_type].clone();
        z[0] += self.mass_offset(domain, object);
        z
    }

    /// Trace of the covariance of the hold targets over the object grid
    /// (every object weighted equally, jitter excluded).
    pub fn signal_trace(&self, domain: Domain) -> f64 {
        let m = self.model(domain);
        let means: Vec<Channels> = self
            .objects
            .iter()
            .map(|o| m.point(&self.expected_latent(domain, o)))
            .collect();
        let k = means.len() as f64;
        let mut centre = [0.0; 5];
        for x in &means {
            for c in 0..5 {
                centre[c] += x[c] / k;
            }
        }
        let between: f64 = means
            .iter()
            .map(|x| (0..5).map(|c| (x[c] - centre[c]).powi(2)).sum::<f64>())
            .sum::<f64>()
            / k;
        let sd2: f64 = m.coef_sd.iter().map(|s| s * s).sum();
        let within: f64 = self
            .objects
            .iter()
            .map(|o| self.coef_scale(o.grasp_type).powi(2) * sd2 * TRUNCATED_VARIANCE)
            .sum::<f64>()
            / k;
        between + within
    }

    /// Per-channel standard deviation of the hold jitter.
    pub fn hold_jitter(&self, domain: Domain) -> f64 {
        match self.noise.hold_snr_db {
            Some(db) => (self.signal_trace(domain) / (5.0 * 10f64.powf(db / 10.0))).sqrt(),
            None => 0.0,
        }
    }

    /// Lower bound on the top-r cumulative explained variance of the hold
    /// features: `signal / (signal + 5 sigma^2)`.
    pub fn explained_bound(&self, domain: Domain) -> f64 {
        let s = self.signal_trace(domain);
        let j = self.hold_jitter(domain);
        s / (s + 5.0 * j * j)
    }

    pub fn subject_id(i: usize) -> String {
        format!("S{:02}", i + 1)
    }

    pub fn subject_ids(&self) -> Vec<String> {
        (0..self.subjects).map(Self::subject_id).collect()
    }

    /// Relative path of a trial file.
    pub fn file_name(subject: &str, object: &ObjectSpec, trial_index: u32) -> String {
        format!(
            "trials/{}_{}_t{:02}.csv",
            subject.to_ascii_lowercase(),
            object.slug(),
            trial_index
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainTruth {
    /// Coefficients in the domain basis, type mean included.
    pub coefficients: Vec<f64>,
    pub jitter: Channels,
    /// Hold values of the emitted trial.
    pub hold: Channels,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedTruth {
    pub domain: Domain,
    pub a: FingerId,
    pub b: FingerId,
    pub r: f64,
    pub beta: f64,
    /// Multiplier offsets over [0, lift), [lift, hold), [hold, end).
    pub g: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialTruth {
    pub key: TrialKey,
    pub file: String,
    pub phases: PhaseAnnotation,
    /// Standardized coefficient draws shared by both domains.
    pub epsilon: Vec<f64>,
    pub posture: DomainTruth,
    pub force: DomainTruth,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub planted: Vec<PlantedTruth>,
}

impl TrialTruth {
    pub fn domain(&self, d: Domain) -> &DomainTruth {
        match d {
            Domain::Force => &self.force,
            Domain::Posture => &self.posture,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub version: u32,
    pub config: SyntheticConfig,
    pub hold_jitter: BTreeMap<Domain, f64>,
    pub trials: Vec<TrialTruth>,
}

fn trial_rng(seed: u64, subject: &str, object: &ObjectSpec, trial_index: u32) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(b"grasp-synergy/trial");
    h.update(seed.to_le_bytes());
    h.update(subject.as_bytes());
    h.update([0]);
    h.update(object.slug().as_bytes());
    h.update([0]);
    h.update(trial_index.to_le_bytes());
    ChaCha8Rng::from_seed(h.finalize().into())
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn truncated_normal(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let x = normal(rng);
        if x.abs() <= EPS_BOUND {
            return x;
        }
    }
}

/// Logistic step normalized to start at exactly 0 and approach 1, with a
/// 10-90% rise of `rise` samples.
fn logistic_step(t: f64, rise: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let k = 81f64.ln() / rise;
    let mid = rise / 2.0;
    let s = |x: f64| 1.0 / (1.0 + (-k * (x - mid)).exp());
    let s0 = s(0.0);
    (s(t) - s0) / (1.0 - s0)
}

fn pearson_factor(rows: &[Channels], a: usize, segments: [(usize, usize); 3], beta: f64, r: f64) -> [f64; 3] {
    let n = rows.len() as f64;
    let mut s1 = [0.0; 3];
    let mut s2 = [0.0; 3];
    for (k, &(lo, hi)) in segments.iter().enumerate() {
        for row in &rows[lo..hi] {
            s1[k] += row[a];
            s2[k] += row[a] * row[a];
        }
    }
    let mut g = [
        s1[1] * s2[2] - s1[2] * s2[1],
        s1[2] * s2[0] - s1[0] * s2[2],
        s1[0] * s2[1] - s1[1] * s2[0],
    ];
    if g[1] < g[0] {
        g = g.map(|x| -x);
    }
    let sum1: f64 = s1.iter().sum();
    let sum2: f64 = s2.iter().sum();
    let var = sum2 / n - (sum1 / n).powi(2);
    let target = beta * beta * var * (1.0 - r * r) / (r * r);
    let current: f64 = (0..3).map(|k| g[k] * g[k] * s2[k]).sum::<f64>() / n;
    if current <= 0.0 || target <= 0.0 {
        return [0.0; 3];
    }
    let scale = (target / current).sqrt();
    g.map(|x| x * scale)
}

/// One trial and its ground truth.
pub fn generate_synthetic_trial(
    cfg: &SyntheticConfig,
    subject: &str,
    object: &ObjectSpec,
    trial_index: u32,
) -> Result<(GraspTrial, TrialTruth), DatasetError> {
    cfg.check()?;
    let g = object.grasp_type;
    let mut rng = trial_rng(cfg.seed, subject, object, trial_index);
    let rank = cfg.posture.rank().max(cfg.force.rank());
    let scale = cfg.coef_scale(g);
    let epsilon: Vec<f64> = (0..rank).map(|_| truncated_normal(&mut rng) * scale).collect();

    let domain_truth = |d: Domain, rng: &mut ChaCha8Rng, limit: f64| {
        let m = cfg.model(d);
        let mut z = cfg.expected_latent(d, object);
        for (k, zk) in z.iter_mut().enumerate() {
            *zk += m.coef_sd[k] * epsilon[k];
        }
        let sigma = cfg.hold_jitter(d);
        let jitter: Channels = std::array::from_fn(|_| sigma * normal(rng));
        let target = m.point(&z);
        let hold = std::array::from_fn(|c| (target[c] + jitter[c]).clamp(0.0, limit));
        DomainTruth {
            coefficients: z,
            jitter,
            hold,
        }
    };
    let mut posture = domain_truth(Domain::Posture, &mut rng, MAX_ANGLE_DEG);
    let mut force = domain_truth(Domain::Force, &mut rng, MAX_FINGERTIP_FORCE_N);

    let n = cfg.sample_count();
    let t = cfg.timings;
    let w = cfg.waveform;
    let mut angles = Vec::with_capacity(n);
    let mut forces = Vec::with_capacity(n);
    let theta = posture.hold;
    let p = force.hold;
    for i in 0..n {
        let ti = i as f64;
        let mut a = [0.0; 5];
        let mut f = [0.0; 5];
        if i >= t.hold {
            a = theta;
            f = p;
        } else {
            if i >= t.approach {
                let mut level = logistic_step(ti - t.approach as f64, w.rise_samples);
                if i >= t.lift {
                    let u = (i - t.lift) as f64 / (t.hold - t.lift) as f64;
                    level += w.angle_bump * 0.5 * (1.0 - (2.0 * std::f64::consts::PI * u).cos());
                }
                a = theta.map(|x| x * level);
            }
            if i >= t.contact {
                let level =
                    w.contact_fraction + (1.0 - w.contact_fraction) * logistic_step(ti - t.contact as f64, w.rise_samples);
                f = p.map(|x| x * level);
                if i >= t.lift {
                    let u = (i - t.lift) as f64;
                    let k = 81f64.ln() / w.lift_rise_samples;
                    let lift = 1.0 + w.lift_overshoot * (k * u / 2.0).tanh();
                    let wave = (2.0 * std::f64::consts::PI * u / w.tremor_period).sin();
                    for c in 0..5 {
                        f[c] = f[c] * lift + (w.tremor_base + w.tremor_gain * p[c]) * wave;
                    }
                }
            }
        }
        for c in 0..5 {
            a[c] = (a[c] + cfg.noise.angle_deg * normal(&mut rng)).clamp(0.0, MAX_ANGLE_DEG);
        }
        for c in 0..5 {
            let x = f[c] + cfg.noise.force_n * normal(&mut rng);
            f[c] = if i < t.contact {
                x.clamp(0.0, w.precontact_max)
            } else {
                x.clamp(0.0, MAX_FINGERTIP_FORCE_N)
            };
        }
        angles.push(a);
        forces.push(f);
    }

    let segments = [(0, t.lift), (t.lift, t.hold), (t.hold, n)];
    let mut planted = Vec::new();
    for pc in cfg.planted.iter().filter(|pc| pc.grasp_type.is_none_or(|pg| pg == g)) {
        let model = cfg.model(pc.domain);
        let mean = model.type_mean(g).expect("checked");
        let (a, b) = (pc.a.index(), pc.b.index());
        let beta = mean[b] / mean[a];
        let (rows, limit, truth) = match pc.domain {
            Domain::Posture => (&mut angles, MAX_ANGLE_DEG, &mut posture),
            Domain::Force => (&mut forces, MAX_FINGERTIP_FORCE_N, &mut force),
        };
        let gs = pearson_factor(rows, a, segments, beta, pc.r);
        for (k, &(lo, hi)) in segments.iter().enumerate() {
            for row in &mut rows[lo..hi] {
                row[b] = (row[a] * (beta + gs[k])).clamp(0.0, limit);
            }
        }
        truth.hold[b] = (truth.hold[a] * (beta + gs[2])).clamp(0.0, limit);
        planted.push(PlantedTruth {
            domain: pc.domain,
            a: pc.a,
            b: pc.b,
            r: pc.r,
            beta,
            g: gs,
        });
    }

    let meta = TrialMeta {
        subject_id: subject.to_string(),
        object: object.clone(),
        trial_index,
        scan_rate_hz: cfg.scan_rate_hz,
        duration_s: cfg.duration_s,
    };
    let trial = GraspTrial { meta, forces, angles };
    let truth = TrialTruth {
        key: TrialKey::of(&trial),
        file: SyntheticConfig::file_name(subject, object, trial_index),
        phases: cfg.planted_phases(),
        epsilon,
        posture,
        force,
        planted,
    };
    Ok((trial, truth))
}

fn grid(cfg: &SyntheticConfig) -> impl Iterator<Item = (String, &ObjectSpec, u32)> {
    let mut out = Vec::new();
    for s in cfg.subject_ids() {
        for o in &cfg.objects {
            for k in 1..=cfg.trials_per_object {
                out.push((s.clone(), o, k));
            }
        }
    }
    out.into_iter()
}

/// The whole grid in memory.
pub fn synthetic_dataset(cfg: &SyntheticConfig) -> Result<(Dataset, Vec<TrialTruth>), DatasetError> {
    cfg.check()?;
    let mut entries = Vec::new();
    let mut truths = Vec::new();
    for (s, o, k) in grid(cfg) {
        let (trial, truth) = generate_synthetic_trial(cfg, &s, o, k)?;
        entries.push(DatasetEntry {
            key: truth.key.clone(),
            file: truth.file.clone().into(),
            trial,
            annotation: None,
            video: None,
        });
        truths.push(truth);
    }
    truths.sort_by(|a, b| a.key.cmp(&b.key));
    Ok((Dataset::new(entries)?, truths))
}

/// Write the grid to `dir`: one CSV per trial under `trials/`, the ground
/// truth sidecar, and finally the manifest.
pub fn generate_synthetic_dataset(cfg: &SyntheticConfig, dir: &Path) -> Result<DatasetManifest, DatasetError> {
    cfg.check()?;
    std::fs::create_dir_all(dir.join("trials")).map_err(|e| DatasetError::io(dir, e))?;
    let mut trials = Vec::new();
    let mut truths = Vec::new();
    for (s, o, k) in grid(cfg) {
        let (trial, truth) = generate_synthetic_trial(cfg, &s, o, k)?;
        write_trial_csv(&dir.join(&truth.file), &trial)?;
        trials.push(ManifestTrial {
            file: truth.file.clone(),
            meta: trial.meta,
            phases: None,
            video: None,
        });
        truths.push(truth);
    }
    truths.sort_by(|a, b| a.key.cmp(&b.key));
    let gt = GroundTruth {
        version: GROUND_TRUTH_VERSION,
        config: cfg.clone(),
        hold_jitter: Domain::BOTH.iter().map(|&d| (d, cfg.hold_jitter(d))).collect(),
        trials: truths,
    };
    let gt_path = dir.join(GROUND_TRUTH_FILE);
    let mut text = serde_json::to_string_pretty(&gt).expect("ground truth serializes");
    text.push('\n');
    std::fs::write(&gt_path, text).map_err(|e| DatasetError::io(&gt_path, e))?;
    let manifest = DatasetManifest::new(trials);
    manifest.write(&dir.join(MANIFEST_FILE))?;
    Ok(manifest)
}

pub fn read_ground_truth(dir: &Path) -> Result<GroundTruth, DatasetError> {
    let path = dir.join(GROUND_TRUTH_FILE);
    let s = std::fs::read_to_string(&path).map_err(|e| DatasetError::io(&path, e))?;
    serde_json::from_str(&s).map_err(|e| DatasetError::io(&path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hand::lookup_object;

    fn apple() -> ObjectSpec {
        lookup_object("Apple").unwrap()
    }

    #[test]
    fn default_config_is_valid() {
        let cfg = SyntheticConfig::default();
        cfg.check().unwrap();
        assert_eq!(cfg.objects.len() * cfg.subjects, 260);
        for d in Domain::BOTH {
            let m = cfg.model(d);
            for (i, a) in m.basis.iter().enumerate() {
                for (j, b) in m.basis.iter().enumerate() {
                    let dot: f64 = (0..5).map(|c| a[c] * b[c]).sum();
                    assert!((dot - f64::from(u8::from(i == j))).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn truncated_variance_constant() {
        // 1 - 2 b phi(b) / (2 Phi(b) - 1) at b = 3, with Phi(3) from a
        // high-order series.
        let phi = (-4.5f64).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut term = 3.0;
        let mut sum = 3.0;
        for k in 1..200 {
            term *= 9.0 / (2 * k + 1) as f64;
            sum += term;
        }
        let cdf = 0.5 + phi * sum;
        let v = 1.0 - 6.0 * phi / (2.0 * cdf - 1.0);
        assert!((v - TRUNCATED_VARIANCE).abs() < 1e-12, "{v}");
    }

    #[test]
    fn jitter_matches_twenty_db() {
        let cfg = SyntheticConfig::default();
        for d in Domain::BOTH {
            let s = cfg.signal_trace(d);
            let j = cfg.hold_jitter(d);
            assert!((10.0 * (s / (5.0 * j * j)).log10() - 20.0).abs() < 1e-9);
            assert!((cfg.explained_bound(d) - 100.0 / 101.0).abs() < 1e-12);
        }
    }

    #[test]
    fn timings_beyond_trial_are_rejected() {
        let mut cfg = SyntheticConfig::default();
        cfg.timings.hold = 1200;
        assert!(matches!(cfg.check(), Err(DatasetError::Config(_))));
        cfg.timings = PhaseTimings {
            approach: 10,
            contact: 5,
            lift: 20,
            hold: 30,
        };
        assert!(cfg.check().is_err());
    }

    #[test]
    fn zero_noise_forces_are_zero_before_contact() {
        let cfg = SyntheticConfig {
            noise: NoiseConfig::zero(),
            ..SyntheticConfig::with_seed(3)
        };
        let (trial, truth) = generate_synthetic_trial(&cfg, "S01", &apple(), 1).unwrap();
        assert_eq!(trial.forces.len(), 1200);
        assert!(trial.forces[..200].iter().flatten().all(|&x| x == 0.0));
        assert!(trial.forces[200].iter().any(|&x| x >= 0.1));
        assert!(trial.angles[..80].iter().flatten().all(|&x| x == 0.0));
        assert!(trial.forces[600..].iter().all(|r| *r == truth.force.hold));
        assert!(trial.angles[600..].iter().all(|r| *r == truth.posture.hold));
    }

    #[test]
    fn generation_is_deterministic_per_key() {
        let cfg = SyntheticConfig::with_seed(11);
        let a = generate_synthetic_trial(&cfg, "S03", &apple(), 2).unwrap();
        let b = generate_synthetic_trial(&cfg, "S03", &apple(), 2).unwrap();
        assert_eq!(a, b);
        let c = generate_synthetic_trial(&cfg, "S03", &apple(), 3).unwrap();
        assert_ne!(a.0.forces, c.0.forces);
    }

    #[test]
    fn coefficients_reproduce_hold_targets() {
        let cfg = SyntheticConfig::with_seed(5);
        for name in ["Apple", "Key", "Switch", "Plate"] {
            let (_, truth) = generate_synthetic_trial(&cfg, "S02", &lookup_object(name).unwrap(), 1).unwrap();
            for d in Domain::BOTH {
                let t = truth.domain(d);
                let x = cfg.model(d).point(&t.coefficients);
                for c in 0..5 {
                    assert!((x[c] + t.jitter[c] - t.hold[c]).abs() < 1e-12, "{name} {d}");
                }
            }
        }
    }

    #[test]
    fn switch_trials_point_with_the_index() {
        let cfg = SyntheticConfig::with_seed(1);
        let sw = lookup_object("Switch").unwrap();
        let (_, truth) = generate_synthetic_trial(&cfg, "S01", &sw, 1).unwrap();
        let a = truth.posture.hold;
        assert!(a[1] < a[2] && a[1] < a[3] && a[1] < a[4], "{a:?}");
        let f = truth.force.hold;
        assert!(f.iter().all(|&x| x < 2.5), "{f:?}");
    }

    #[test]
    fn planted_correlation_holds_within_a_trial() {
        let mut cfg = SyntheticConfig::with_seed(9);
        cfg.planted.push(PlantedCorrelation {
            domain: Domain::Posture,
            grasp_type: None,
            a: FingerId::Index,
            b: FingerId::Middle,
            r: 0.9,
        });
        let (trial, truth) = generate_synthetic_trial(&cfg, "S01", &apple(), 1).unwrap();
        let x = trial.channel(Domain::Posture, FingerId::Index);
        let y = trial.channel(Domain::Posture, FingerId::Middle);
        let r = crate::synergy::pearson(&x, &y).unwrap();
        assert!((r - 0.9).abs() < 0.1, "{r}");
        let hold = &trial.angles[cfg.timings.hold..];
        let mean = hold.iter().map(|a| a[2]).sum::<f64>() / hold.len() as f64;
        assert!((mean - truth.posture.hold[2]).abs() < 0.1, "{mean} vs {}", truth.posture.hold[2]);
    }
}
