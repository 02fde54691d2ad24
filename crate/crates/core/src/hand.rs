//! Hand model: finger and grasp taxonomy, the household object catalog, and
//! the joint-ratio decomposition of a combined flex reading into MCP/PIP/DIP
//! joint angles.
//!
//! A dorsal flex sensor reports one angle per digit: the sum of the digit's
//! joint flexions. For the four fingers the joints move in fixed ratios,
//! `PIP = 3/4 MCP` and `DIP = 2/3 MCP`, so the sum is `29/12 MCP`. The thumb
//! has two instrumented joints with `IP = 1/2 MCP`, summing to `3/2 MCP`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Upper range of motion of the PIP joint of the four fingers, degrees.
pub const PIP_ROM_DEG: f64 = 110.0;
/// Upper range of motion of the DIP joint of the four fingers, degrees.
pub const DIP_ROM_DEG: f64 = 90.0;
/// Objects at or above this mass exceed the force sensor calibration.
pub const MAX_OBJECT_MASS_G: f64 = 1500.0;
/// Full scale of the fingertip force sensors (2 kg).
pub const MAX_FINGERTIP_FORCE_N: f64 = 19.6;
pub const PROTOCOL_SCAN_RATE_HZ: f64 = 40.0;
pub const PROTOCOL_DURATION_S: f64 = 30.0;
/// Largest combined flex angle a finger can report: 90 degrees of MCP
/// flexion carried through the joint ratios.
pub const MAX_COMBINED_FLEX_DEG: f64 = 90.0 * 29.0 / 12.0;

/// One value per digit, in canonical Thumb..Pinky order.
pub type Channels = [f64; 5];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HandError {
    #[error("{finger} flex angle must be finite and non-negative, got {value}")]
    InvalidAngle { finger: FingerId, value: f64 },
    #[error("{finger} {joint} angle {angle:.3} deg exceeds range of motion {limit} deg")]
    RomExceeded {
        finger: FingerId,
        joint: Joint,
        angle: f64,
        limit: f64,
    },
    #[error("joint layout does not match {finger}")]
    FingerMismatch { finger: FingerId },
    #[error("object '{name}': mass {mass_g} g outside [0, {MAX_OBJECT_MASS_G})")]
    InvalidMass { name: String, mass_g: f64 },
    #[error("{finger} force {value} N outside [0, {MAX_FINGERTIP_FORCE_N}]")]
    ForceOutOfRange { finger: FingerId, value: f64 },
    #[error("trial index must be >= 1")]
    InvalidTrialIndex,
    #[error("scan rate and duration must be positive")]
    InvalidTiming,
    #[error("unknown {what} '{value}'")]
    Unknown { what: &'static str, value: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FingerId {
    Thumb,
    Index,
    Middle,
    Ring,
    Pinky,
}

impl FingerId {
    pub const ALL: [FingerId; 5] = [
        FingerId::Thumb,
        FingerId::Index,
        FingerId::Middle,
        FingerId::Ring,
        FingerId::Pinky,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            FingerId::Thumb => "thumb",
            FingerId::Index => "index",
            FingerId::Middle => "middle",
            FingerId::Ring => "ring",
            FingerId::Pinky => "pinky",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            FingerId::Thumb => "Thumb",
            FingerId::Index => "Index",
            FingerId::Middle => "Middle",
            FingerId::Ring => "Ring",
            FingerId::Pinky => "Pinky",
        }
    }

    pub fn is_thumb(self) -> bool {
        self == FingerId::Thumb
    }
}

impl fmt::Display for FingerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for FingerId {
    type Err = HandError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FingerId::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| HandError::Unknown {
                what: "finger",
                value: s.to_string(),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Joint {
    Mcp,
    Pip,
    Dip,
    Ip,
}

impl fmt::Display for Joint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Joint::Mcp => "MCP",
            Joint::Pip => "PIP",
            Joint::Dip => "DIP",
            Joint::Ip => "IP",
        })
    }
}

/// Grasp taxonomy of the protocol: eight grasp types plus two non-grasp
/// postures. Declaration order is the canonical ordering used in every
/// per-type table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GraspType {
    PulpPinch,
    LateralPinch,
    DiagonalVolarGrip,
    CylindricalGrip,
    ExtensionGrip,
    TripodPinch,
    SphericalGrip,
    HookGrip,
    Platform,
    IndexPointing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraspClass {
    Power,
    Precision,
    NonGrasp,
}

impl GraspType {
    pub const ALL: [GraspType; 10] = [
        GraspType::PulpPinch,
        GraspType::LateralPinch,
        GraspType::DiagonalVolarGrip,
        GraspType::CylindricalGrip,
        GraspType::ExtensionGrip,
        GraspType::TripodPinch,
        GraspType::SphericalGrip,
        GraspType::HookGrip,
        GraspType::Platform,
        GraspType::IndexPointing,
    ];

    /// Short code used in files and tables.
    pub fn code(self) -> &'static str {
        match self {
            GraspType::PulpPinch => "PP",
            GraspType::LateralPinch => "LP",
            GraspType::DiagonalVolarGrip => "DVG",
            GraspType::CylindricalGrip => "CG",
            GraspType::ExtensionGrip => "EG",
            GraspType::TripodPinch => "TP",
            GraspType::SphericalGrip => "SG",
            GraspType::HookGrip => "H",
            GraspType::Platform => "Platform",
            GraspType::IndexPointing => "IndexPointing",
        }
    }

    pub fn full_name(self) -> &'static str {
        match self {
            GraspType::PulpPinch => "Pulp Pinch",
            GraspType::LateralPinch => "Lateral Pinch",
            GraspType::DiagonalVolarGrip => "Diagonal Volar Grip",
            GraspType::CylindricalGrip => "Cylindrical Grip",
            GraspType::ExtensionGrip => "Extension Grip",
            GraspType::TripodPinch => "Tripod Pinch",
            GraspType::SphericalGrip => "Spherical Grip",
            GraspType::HookGrip => "Hook Grip",
            GraspType::Platform => "Platform",
            GraspType::IndexPointing => "Index Pointing",
        }
    }

    /// Power/precision split of the grasp types; the two postures carry no
    /// grasp-force semantics.
    pub fn class(self) -> GraspClass {
        match self {
            GraspType::SphericalGrip
            | GraspType::CylindricalGrip
            | GraspType::ExtensionGrip
            | GraspType::HookGrip => GraspClass::Power,
            GraspType::TripodPinch
            | GraspType::LateralPinch
            | GraspType::PulpPinch
            | GraspType::DiagonalVolarGrip => GraspClass::Precision,
            GraspType::Platform | GraspType::IndexPointing => GraspClass::NonGrasp,
        }
    }

    pub fn is_grasp(self) -> bool {
        self.class() != GraspClass::NonGrasp
    }
}

impl fmt::Display for GraspType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for GraspType {
    type Err = HandError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        GraspType::ALL
            .into_iter()
            .find(|g| g.code().eq_ignore_ascii_case(s) || g.full_name().eq_ignore_ascii_case(s))
            .ok_or_else(|| HandError::Unknown {
                what: "grasp type",
                value: s.to_string(),
            })
    }
}

impl Serialize for GraspType {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.code())
    }
}

impl<'de> Deserialize<'de> for GraspType {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A catalog object. `mass_g` is absent for objects that are never lifted
/// (the light switch).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub name: String,
    pub grasp_type: GraspType,
    pub mass_g: Option<f64>,
}

impl ObjectSpec {
    pub fn new(
        name: impl Into<String>,
        grasp_type: GraspType,
        mass_g: Option<f64>,
    ) -> Result<Self, HandError> {
        let spec = ObjectSpec {
            name: name.into(),
            grasp_type,
            mass_g,
        };
        spec.check()?;
        Ok(spec)
    }

    pub fn check(&self) -> Result<(), HandError> {
        if let Some(m) = self.mass_g {
            if !(m.is_finite() && (0.0..MAX_OBJECT_MASS_G).contains(&m)) {
                return Err(HandError::InvalidMass {
                    name: self.name.clone(),
                    mass_g: m,
                });
            }
        }
        Ok(())
    }

    /// Filesystem-friendly identifier, unique across the catalog because it
    /// carries the grasp code (the plate appears under two postures).
    pub fn slug(&self) -> String {
        let mut out = self.grasp_type.code().to_ascii_lowercase();
        out.push('_');
        let mut dash = false;
        for c in self.name.chars() {
            if c.is_ascii_alphanumeric() {
                out.push(c.to_ascii_lowercase());
                dash = false;
            } else if !dash {
                out.push('-');
                dash = true;
            }
        }
        out.trim_end_matches('-').to_string()
    }
}

const CATALOG: [(&str, GraspType, Option<f64>); 26] = [
    ("Skillet lid", GraspType::HookGrip, Some(220.03)),
    ("Apple", GraspType::SphericalGrip, Some(158.01)),
    ("Large Marker", GraspType::TripodPinch, Some(12.16)),
    ("Plate", GraspType::ExtensionGrip, Some(453.26)),
    ("Chips Can", GraspType::CylindricalGrip, Some(107.27)),
    ("Screwdriver", GraspType::DiagonalVolarGrip, Some(68.8)),
    ("Bowl", GraspType::LateralPinch, Some(167.67)),
    ("Small Marker", GraspType::PulpPinch, Some(7.67)),
    ("Switch", GraspType::IndexPointing, None),
    ("Pitcher base", GraspType::HookGrip, Some(197.82)),
    ("Mini Soccer ball", GraspType::SphericalGrip, Some(16.89)),
    ("Tuna Can", GraspType::TripodPinch, Some(132.59)),
    ("Craker Box", GraspType::ExtensionGrip, Some(388.34)),
    ("Coffee Can", GraspType::CylindricalGrip, Some(174.42)),
    ("Spatula", GraspType::DiagonalVolarGrip, Some(19.72)),
    ("XS Clamp", GraspType::LateralPinch, Some(57.12)),
    ("Plastic Peer", GraspType::PulpPinch, Some(11.01)),
    ("Plate", GraspType::Platform, Some(453.26)),
    ("Coffee Cup", GraspType::HookGrip, Some(303.48)),
    ("Softball", GraspType::SphericalGrip, Some(59.54)),
    ("Table Tennis Ball", GraspType::TripodPinch, Some(2.74)),
    ("Tetra Pack", GraspType::ExtensionGrip, Some(174.94)),
    ("Power Drill", GraspType::CylindricalGrip, Some(450.07)),
    ("Skillet", GraspType::DiagonalVolarGrip, Some(549.11)),
    ("Key", GraspType::LateralPinch, Some(3.83)),
    ("Washer", GraspType::PulpPinch, Some(2.3)),
];

/// The 26 protocol tasks in catalog order: 25 distinct YCB objects, with the
/// plate used both for the extension grip and the platform posture. Names are
/// kept as they appear in the published object table.
pub fn builtin_catalog() -> Vec<ObjectSpec> {
    CATALOG
        .iter()
        .map(|&(name, grasp_type, mass_g)| ObjectSpec {
            name: name.to_string(),
            grasp_type,
            mass_g,
        })
        .collect()
}

/// First catalog object with the given name (case-insensitive).
pub fn lookup_object(name: &str) -> Option<ObjectSpec> {
    builtin_catalog()
        .into_iter()
        .find(|o| o.name.eq_ignore_ascii_case(name.trim()))
}

/// Joint angles of one digit, degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum JointAngles {
    Finger { mcp: f64, pip: f64, dip: f64 },
    Thumb { mcp: f64, ip: f64 },
}

impl JointAngles {
    pub fn mcp(&self) -> f64 {
        match *self {
            JointAngles::Finger { mcp, .. } | JointAngles::Thumb { mcp, .. } => mcp,
        }
    }

    /// Sum of the joint flexions, i.e. the combined flex angle.
    pub fn total(&self) -> f64 {
        match *self {
            JointAngles::Finger { mcp, pip, dip } => mcp + pip + dip,
            JointAngles::Thumb { mcp, ip } => mcp + ip,
        }
    }

    /// (MCP, PIP-or-IP, DIP) with the thumb's absent DIP reported as zero.
    pub fn as_triple(&self) -> [f64; 3] {
        match *self {
            JointAngles::Finger { mcp, pip, dip } => [mcp, pip, dip],
            JointAngles::Thumb { mcp, ip } => [mcp, ip, 0.0],
        }
    }

    fn matches(&self, finger: FingerId) -> bool {
        matches!(
            (self, finger.is_thumb()),
            (JointAngles::Thumb { .. }, true) | (JointAngles::Finger { .. }, false)
        )
    }
}

/// Split a combined flex angle into per-joint angles using the joint ratios.
pub fn decompose_flex_angle(finger: FingerId, theta_total: f64) -> Result<JointAngles, HandError> {
    if !(theta_total.is_finite() && theta_total >= 0.0) {
        return Err(HandError::InvalidAngle {
            finger,
            value: theta_total,
        });
    }
    if finger.is_thumb() {
        let mcp = theta_total * 2.0 / 3.0;
        let ip = mcp / 2.0;
        return Ok(JointAngles::Thumb { mcp, ip });
    }
    let mcp = theta_total * 12.0 / 29.0;
    let pip = mcp * 3.0 / 4.0;
    let dip = mcp * 2.0 / 3.0;
    if pip > PIP_ROM_DEG {
        return Err(HandError::RomExceeded {
            finger,
            joint: Joint::Pip,
            angle: pip,
            limit: PIP_ROM_DEG,
        });
    }
    if dip > DIP_ROM_DEG {
        return Err(HandError::RomExceeded {
            finger,
            joint: Joint::Dip,
            angle: dip,
            limit: DIP_ROM_DEG,
        });
    }
    Ok(JointAngles::Finger { mcp, pip, dip })
}

/// Inverse of [`decompose_flex_angle`]: the combined flex angle.
pub fn compose_joint_angles(finger: FingerId, angles: &JointAngles) -> Result<f64, HandError> {
    if !angles.matches(finger) {
        return Err(HandError::FingerMismatch { finger });
    }
    Ok(angles.total())
}

/// Decomposed joint angles of the whole hand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HandPosture {
    pub joints: [JointAngles; 5],
}

impl HandPosture {
    pub fn from_flex_angles(angles: &Channels) -> Result<Self, HandError> {
        let mut joints = [JointAngles::Thumb { mcp: 0.0, ip: 0.0 }; 5];
        for finger in FingerId::ALL {
            joints[finger.index()] = decompose_flex_angle(finger, angles[finger.index()])?;
        }
        Ok(HandPosture { joints })
    }

    pub fn finger(&self, finger: FingerId) -> &JointAngles {
        &self.joints[finger.index()]
    }

    pub fn flex_angles(&self) -> Channels {
        self.joints.map(|j| j.total())
    }

    /// 15 joint values, finger-major (MCP, PIP, DIP); the thumb's second
    /// slot is its IP joint and its third is zero.
    pub fn joint_vector(&self) -> Vec<f64> {
        self.joints.iter().flat_map(|j| j.as_triple()).collect()
    }

    /// Labels matching [`HandPosture::joint_vector`].
    pub fn joint_labels() -> Vec<String> {
        FingerId::ALL
            .iter()
            .flat_map(|f| {
                let names: [&str; 3] = if f.is_thumb() {
                    ["MCP", "IP", "DIP"]
                } else {
                    ["MCP", "PIP", "DIP"]
                };
                names.map(|j| format!("{} {}", f.label(), j))
            })
            .collect()
    }
}

/// Fingertip forces within the sensor range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FingertipForces(Channels);

impl FingertipForces {
    pub fn new(force_n: Channels) -> Result<Self, HandError> {
        for finger in FingerId::ALL {
            let v = force_n[finger.index()];
            if !(v.is_finite() && (0.0..=MAX_FINGERTIP_FORCE_N).contains(&v)) {
                return Err(HandError::ForceOutOfRange { finger, value: v });
            }
        }
        Ok(FingertipForces(force_n))
    }

    pub fn values(&self) -> &Channels {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// Which half of a trial's channels an analysis looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Force,
    Posture,
}

impl Domain {
    pub const BOTH: [Domain; 2] = [Domain::Force, Domain::Posture];

    pub fn name(self) -> &'static str {
        match self {
            Domain::Force => "force",
            Domain::Posture => "posture",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Domain {
    type Err = HandError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "force" => Ok(Domain::Force),
            "posture" => Ok(Domain::Posture),
            _ => Err(HandError::Unknown {
                what: "domain",
                value: s.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialMeta {
    pub subject_id: String,
    pub object: ObjectSpec,
    pub trial_index: u32,
    pub scan_rate_hz: f64,
    pub duration_s: f64,
}

impl TrialMeta {
    /// Metadata for a 30 s recording at 40 Hz.
    pub fn protocol(subject_id: impl Into<String>, object: ObjectSpec, trial_index: u32) -> Self {
        TrialMeta {
            subject_id: subject_id.into(),
            object,
            trial_index,
            scan_rate_hz: PROTOCOL_SCAN_RATE_HZ,
            duration_s: PROTOCOL_DURATION_S,
        }
    }

    pub fn check(&self) -> Result<(), HandError> {
        if self.trial_index < 1 {
            return Err(HandError::InvalidTrialIndex);
        }
        if !(self.scan_rate_hz > 0.0 && self.duration_s > 0.0) {
            return Err(HandError::InvalidTiming);
        }
        self.object.check()
    }

    pub fn sample_count(&self) -> usize {
        (self.scan_rate_hz * self.duration_s).round() as usize
    }

    pub fn sample_period_s(&self) -> f64 {
        1.0 / self.scan_rate_hz
    }
}

/// One recording: metadata plus synchronized force (N) and combined flex
/// angle (degrees) series, one row per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct GraspTrial {
    pub meta: TrialMeta,
    pub forces: Vec<Channels>,
    pub angles: Vec<Channels>,
}

impl GraspTrial {
    pub fn len(&self) -> usize {
        self.forces.len().min(self.angles.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rows(&self, domain: Domain) -> &[Channels] {
        match domain {
            Domain::Force => &self.forces,
            Domain::Posture => &self.angles,
        }
    }

    pub fn channel(&self, domain: Domain, finger: FingerId) -> Vec<f64> {
        self.rows(domain).iter().map(|r| r[finger.index()]).collect()
    }

    pub fn total_force(&self) -> Vec<f64> {
        self.forces.iter().map(|r| r.iter().sum()).collect()
    }
}
