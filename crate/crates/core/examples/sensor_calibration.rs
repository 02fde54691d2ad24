//! Flex sensor divider and capacitive force sensor calibration, end to end.

use grasp_synergy::hand::FingerId;
use grasp_synergy::sensor::{
    fit_force_calibration, CapacitiveSensorModel, FlexCalibration, GloveCalibration, VoltageDividerConfig,
};

fn main() {
    let divider = VoltageDividerConfig::default();
    let flex = FlexCalibration::default();
    for angle in [0.0, 30.0, 60.0, 90.0] {
        let r = flex.resistance(angle);
        let v = divider.output(r).unwrap();
        let back = flex.angle(divider.resistance(v).unwrap());
        println!("{angle:5.1} deg -> {r:8.0} ohm -> {v:.4} V -> {:5.1} deg", back.angle_deg);
    }

    let model = CapacitiveSensorModel::default();
    let ramp = model.ramp(18.0, 50).unwrap();
    let cal = fit_force_calibration(&ramp).unwrap();
    println!("force span {:.1} N, covers protocol range: {}", cal.force_span(), cal.spans_protocol_range());
    for f in [0.5, 5.0, 12.3] {
        let c = model.capacitance(f).unwrap();
        println!("{f:5.2} N -> {:.3} pF -> {:.3} N", c * 1e12, cal.force(c).unwrap().force_n);
    }

    let glove = GloveCalibration::uniform(divider, flex, &model, 50).unwrap();
    let toml = glove.to_toml_string().unwrap();
    println!("calibration file is {} bytes of TOML", toml.len());
    let sample = glove.convert(FingerId::Index, 2.5, model.capacitance(3.0).unwrap()).unwrap();
    println!("index sample: {sample:?}");
}
