//! Flex and capacitive force sensor physics, with forward (simulation) and
//! inverse (measurement) directions.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hand::FingerId;

/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;

/// Extrapolation allowance of the force calibration, as a fraction of the
/// knot capacitance range.
pub const FORCE_EXTRAPOLATION_FRACTION: f64 = 0.05;

/// Minimum force span of a calibration ramp that covers the protocol range.
pub const PROTOCOL_FORCE_SPAN_N: f64 = 15.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SensorError {
    #[error("{what} must be {expected}, got {value}")]
    Domain {
        what: &'static str,
        expected: &'static str,
        value: f64,
    },
    #[error("force {force} N closes the electrode gap (limit {limit} N)")]
    GapClosure { force: f64, limit: f64 },
    #[error("calibration rejected: {0}")]
    CalibrationRejected(String),
    #[error("capacitance {value:e} F outside calibrated range [{lo:e}, {hi:e}] F beyond the 5% margin")]
    OutOfRange { value: f64, lo: f64, hi: f64 },
    #[error("calibration file: {0}")]
    File(String),
}

fn require(cond: bool, what: &'static str, expected: &'static str, value: f64) -> Result<(), SensorError> {
    if cond {
        Ok(())
    } else {
        Err(SensorError::Domain {
            what,
            expected,
            value,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VoltageDividerConfig {
    pub v_cc: f64,
    pub r_pulldown: f64,
}

impl Default for VoltageDividerConfig {
    fn default() -> Self {
        VoltageDividerConfig {
            v_cc: 5.0,
            r_pulldown: 47_000.0,
        }
    }
}

impl VoltageDividerConfig {
    pub fn new(v_cc: f64, r_pulldown: f64) -> Result<Self, SensorError> {
        let cfg = VoltageDividerConfig { v_cc, r_pulldown };
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<(), SensorError> {
        require(self.v_cc.is_finite() && self.v_cc > 0.0, "v_cc", "> 0", self.v_cc)?;
        require(
            self.r_pulldown.is_finite() && self.r_pulldown > 0.0,
            "r_pulldown",
            "> 0",
            self.r_pulldown,
        )
    }

    /// Voltage across the pull-down resistor: `Vcc * R / (R + R_flex)`.
    pub fn output(&self, r_flex: f64) -> Result<f64, SensorError> {
        require(r_flex.is_finite() && r_flex >= 0.0, "r_flex", ">= 0", r_flex)?;
        Ok(self.v_cc * self.r_pulldown / (self.r_pulldown + r_flex))
    }

    /// Flex resistance that produces `v_out`.
    pub fn resistance(&self, v_out: f64) -> Result<f64, SensorError> {
        require(
            v_out.is_finite() && v_out > 0.0 && v_out <= self.v_cc,
            "v_out",
            "in (0, v_cc]",
            v_out,
        )?;
        Ok(self.r_pulldown * (self.v_cc - v_out) / v_out)
    }
}

pub fn divider_output(cfg: &VoltageDividerConfig, r_flex: f64) -> Result<f64, SensorError> {
    cfg.output(r_flex)
}

pub fn resistance_from_voltage(cfg: &VoltageDividerConfig, v_out: f64) -> Result<f64, SensorError> {
    cfg.resistance(v_out)
}

/// Two-point flex calibration: `r_flat` reads 0 degrees, `r_full` reads 90.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlexCalibration {
    pub r_flat: f64,
    pub r_full: f64,
}

impl Default for FlexCalibration {
    fn default() -> Self {
        FlexCalibration {
            r_flat: 25_000.0,
            r_full: 100_000.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleReading {
    pub angle_deg: f64,
    pub clamped: bool,
}

impl FlexCalibration {
    pub fn new(r_flat: f64, r_full: f64) -> Result<Self, SensorError> {
        let cal = FlexCalibration { r_flat, r_full };
        cal.check()?;
        Ok(cal)
    }

    /// Datasheet figures of the sensor: 10 kOhm flat, 110 kOhm at the top of
    /// the bend range.
    pub fn datasheet() -> Self {
        FlexCalibration {
            r_flat: 10_000.0,
            r_full: 110_000.0,
        }
    }

    pub fn check(&self) -> Result<(), SensorError> {
        require(self.r_flat.is_finite() && self.r_flat > 0.0, "r_flat", "> 0", self.r_flat)?;
        require(
            self.r_full.is_finite() && self.r_full > self.r_flat,
            "r_full",
            "> r_flat",
            self.r_full,
        )
    }

    pub fn angle(&self, r: f64) -> AngleReading {
        let raw = 90.0 * (r - self.r_flat) / (self.r_full - self.r_flat);
        if raw.is_nan() {
            return AngleReading {
                angle_deg: 0.0,
                clamped: true,
            };
        }
        let angle_deg = raw.clamp(0.0, 90.0);
        AngleReading {
            angle_deg,
            clamped: angle_deg != raw,
        }
    }

    /// Forward map used by simulation; angles outside [0, 90] extrapolate.
    pub fn resistance(&self, angle_deg: f64) -> f64 {
        self.r_flat + (self.r_full - self.r_flat) * angle_deg / 90.0
    }
}

pub fn resistance_to_angle(cal: &FlexCalibration, r: f64) -> AngleReading {
    cal.angle(r)
}

/// Parallel-plate capacitor whose gap closes linearly under load:
/// `d = d0 - F / k`, so `C(F) = c0 * d0 / (d0 - F / k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacitiveSensorModel {
    pub c0: f64,
    pub d0: f64,
    pub k_spring: f64,
}

impl CapacitiveSensorModel {
    pub fn new(c0: f64, d0: f64, k_spring: f64) -> Result<Self, SensorError> {
        require(c0.is_finite() && c0 > 0.0, "c0", "> 0", c0)?;
        require(d0.is_finite() && d0 > 0.0, "d0", "> 0", d0)?;
        require(k_spring.is_finite() && k_spring > 0.0, "k_spring", "> 0", k_spring)?;
        Ok(CapacitiveSensorModel { c0, d0, k_spring })
    }

    /// From relative permittivity, electrode area (m^2), rest gap (m) and
    /// gap stiffness (N/m).
    pub fn from_geometry(eps_r: f64, area_m2: f64, d0: f64, k_spring: f64) -> Result<Self, SensorError> {
        require(eps_r.is_finite() && eps_r > 0.0, "eps_r", "> 0", eps_r)?;
        require(area_m2.is_finite() && area_m2 > 0.0, "area", "> 0", area_m2)?;
        require(d0.is_finite() && d0 > 0.0, "d0", "> 0", d0)?;
        Self::new(eps_r * EPSILON_0 * area_m2 / d0, d0, k_spring)
    }

    /// Load at which the gap closes.
    pub fn closure_force(&self) -> f64 {
        self.k_spring * self.d0
    }

    pub fn capacitance(&self, force_n: f64) -> Result<f64, SensorError> {
        require(force_n.is_finite() && force_n >= 0.0, "force", ">= 0", force_n)?;
        let limit = self.closure_force();
        if force_n >= limit {
            return Err(SensorError::GapClosure {
                force: force_n,
                limit,
            });
        }
        Ok(self.c0 * self.d0 / (self.d0 - force_n / self.k_spring))
    }

    /// Load-cell ramp: `n` evenly spaced forces over `[0, max_force]` paired
    /// with the model capacitance.
    pub fn ramp(&self, max_force: f64, n: usize) -> Result<Vec<(f64, f64)>, SensorError> {
        require(n >= 2, "ramp points", ">= 2", n as f64)?;
        (0..n)
            .map(|i| {
                let f = max_force * i as f64 / (n - 1) as f64;
                Ok((self.capacitance(f)?, f))
            })
            .collect()
    }
}

impl Default for CapacitiveSensorModel {
    /// 10 pF at a 0.5 mm gap; the gap closes at 25 N.
    fn default() -> Self {
        CapacitiveSensorModel {
            c0: 10e-12,
            d0: 0.5e-3,
            k_spring: 50_000.0,
        }
    }
}

pub fn capacitance_of_force(model: &CapacitiveSensorModel, force_n: f64) -> Result<f64, SensorError> {
    model.capacitance(force_n)
}

/// Piecewise-linear capacitance to force map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceCalibration {
    knots: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceReading {
    pub force_n: f64,
    pub extrapolated: bool,
}

impl ForceCalibration {
    /// Knots must already be strictly increasing in both coordinates.
    pub fn from_knots(knots: Vec<(f64, f64)>) -> Result<Self, SensorError> {
        if knots.len() < 2 {
            return Err(SensorError::CalibrationRejected(format!(
                "need at least 2 knots, got {}",
                knots.len()
            )));
        }
        if knots.iter().any(|(c, f)| !(c.is_finite() && f.is_finite())) {
            return Err(SensorError::CalibrationRejected("non-finite knot".into()));
        }
        for (i, w) in knots.windows(2).enumerate() {
            if w[1].0 <= w[0].0 {
                return Err(SensorError::CalibrationRejected(format!(
                    "capacitance not strictly increasing at knot {}",
                    i + 1
                )));
            }
            if w[1].1 <= w[0].1 {
                return Err(SensorError::CalibrationRejected(format!(
                    "force not strictly increasing with capacitance at knot {} ({} N after {} N)",
                    i + 1,
                    w[1].1,
                    w[0].1
                )));
            }
        }
        Ok(ForceCalibration { knots })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn capacitance_range(&self) -> (f64, f64) {
        (self.knots[0].0, self.knots[self.knots.len() - 1].0)
    }

    pub fn force_span(&self) -> f64 {
        self.knots[self.knots.len() - 1].1 - self.knots[0].1
    }

    /// Whether the ramp reached the upper part of the protocol force range.
    pub fn spans_protocol_range(&self) -> bool {
        self.force_span() >= PROTOCOL_FORCE_SPAN_N
    }

    pub fn force(&self, c: f64) -> Result<ForceReading, SensorError> {
        let (lo, hi) = self.capacitance_range();
        let margin = FORCE_EXTRAPOLATION_FRACTION * (hi - lo);
        if !(c.is_finite() && c >= lo - margin && c <= hi + margin) {
            return Err(SensorError::OutOfRange { value: c, lo, hi });
        }
        let k = &self.knots;
        let seg = match k.partition_point(|&(kc, _)| kc <= c) {
            0 => 0,
            i if i >= k.len() => k.len() - 2,
            i => i - 1,
        };
        let (c0, f0) = k[seg];
        let (c1, f1) = k[seg + 1];
        Ok(ForceReading {
            force_n: f0 + (f1 - f0) * (c - c0) / (c1 - c0),
            extrapolated: c < lo || c > hi,
        })
    }
}

/// Fit a calibration curve to load-cell ramp samples `(capacitance, force)`.
pub fn fit_force_calibration(ramp: &[(f64, f64)]) -> Result<ForceCalibration, SensorError> {
    let mut knots = ramp.to_vec();
    knots.sort_by(|a, b| a.0.total_cmp(&b.0));
    if let Some(w) = knots.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(SensorError::CalibrationRejected(format!(
            "duplicate capacitance {:e} F",
            w[0].0
        )));
    }
    ForceCalibration::from_knots(knots)
}

pub fn force_from_capacitance(cal: &ForceCalibration, c: f64) -> Result<ForceReading, SensorError> {
    cal.force(c)
}

/// Uniform quantizer of the microcontroller front end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Adc {
    pub bits: u32,
    pub v_ref: f64,
}

impl Default for Adc {
    fn default() -> Self {
        Adc { bits: 10, v_ref: 5.0 }
    }
}

impl Adc {
    pub fn max_code(&self) -> u32 {
        (1u32 << self.bits) - 1
    }

    pub fn lsb(&self) -> f64 {
        self.v_ref / self.max_code() as f64
    }

    pub fn code(&self, volts: f64) -> u32 {
        let x = (volts / self.lsb()).round();
        x.clamp(0.0, self.max_code() as f64) as u32
    }

    pub fn volts(&self, code: u32) -> f64 {
        code.min(self.max_code()) as f64 * self.lsb()
    }

    pub fn quantize(&self, volts: f64) -> f64 {
        self.volts(self.code(volts))
    }
}

/// Per-finger calibration of a whole glove.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FingerCalibration {
    pub finger: FingerId,
    pub flex: FlexCalibration,
    pub force: ForceCalibration,
}

/// Calibration file contents. Stored as TOML:
///
/// ```toml
/// version = 1
///
/// [divider]
/// v_cc = 5.0
/// r_pulldown = 47000.0
///
/// [[fingers]]
/// finger = "thumb"
/// flex = { r_flat = 25000.0, r_full = 100000.0 }
/// force = { knots = [[1.0e-11, 0.0], [2.0e-11, 12.5]] }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GloveCalibration {
    pub version: u32,
    pub divider: VoltageDividerConfig,
    pub fingers: Vec<FingerCalibration>,
}

/// One calibrated sample of a finger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibratedSample {
    pub angle: AngleReading,
    pub force: ForceReading,
}

impl GloveCalibration {
    pub const VERSION: u32 = 1;

    /// Identical sensors on every finger, calibrated against the ramp of
    /// `model` up to 20 N.
    pub fn uniform(
        divider: VoltageDividerConfig,
        flex: FlexCalibration,
        model: &CapacitiveSensorModel,
        ramp_points: usize,
    ) -> Result<Self, SensorError> {
        let force = fit_force_calibration(&model.ramp(20.0, ramp_points)?)?;
        Ok(GloveCalibration {
            version: Self::VERSION,
            divider,
            fingers: FingerId::ALL
                .iter()
                .map(|&finger| FingerCalibration {
                    finger,
                    flex,
                    force: force.clone(),
                })
                .collect(),
        })
    }

    pub fn check(&self) -> Result<(), SensorError> {
        if self.version != Self::VERSION {
            return Err(SensorError::File(format!("unsupported version {}", self.version)));
        }
        self.divider.check()?;
        for finger in FingerId::ALL {
            let n = self.fingers.iter().filter(|f| f.finger == finger).count();
            if n != 1 {
                return Err(SensorError::File(format!("{n} entries for {finger}, expected 1")));
            }
        }
        for f in &self.fingers {
            f.flex.check()?;
            ForceCalibration::from_knots(f.force.knots.clone())?;
        }
        Ok(())
    }

    pub fn finger(&self, finger: FingerId) -> Option<&FingerCalibration> {
        self.fingers.iter().find(|f| f.finger == finger)
    }

    pub fn from_toml_str(s: &str) -> Result<Self, SensorError> {
        let cal: GloveCalibration = toml::from_str(s).map_err(|e| SensorError::File(e.to_string()))?;
        cal.check()?;
        Ok(cal)
    }

    pub fn to_toml_string(&self) -> Result<String, SensorError> {
        toml::to_string(self).map_err(|e| SensorError::File(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, SensorError> {
        let s = std::fs::read_to_string(path)
            .map_err(|e| SensorError::File(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&s)
    }

    pub fn save(&self, path: &Path) -> Result<(), SensorError> {
        std::fs::write(path, self.to_toml_string()?)
            .map_err(|e| SensorError::File(format!("{}: {e}", path.display())))
    }

    /// Convert a raw divider voltage and capacitance into an angle and force.
    pub fn convert(&self, finger: FingerId, v_out: f64, capacitance: f64) -> Result<CalibratedSample, SensorError> {
        let cal = self
            .finger(finger)
            .ok_or_else(|| SensorError::File(format!("no calibration for {finger}")))?;
        let r = self.divider.resistance(v_out)?;
        Ok(CalibratedSample {
            angle: cal.flex.angle(r),
            force: cal.force.force(capacitance)?,
        })
    }
}
