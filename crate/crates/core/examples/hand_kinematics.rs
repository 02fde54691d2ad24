//! Split a combined flex reading into joint angles and check the ROM limits.

use grasp_synergy::hand::{compose_joint_angles, decompose_flex_angle, FingerId, HandPosture};

fn main() {
    for finger in FingerId::ALL {
        let joints = decompose_flex_angle(finger, 60.0).unwrap();
        let back = compose_joint_angles(finger, &joints).unwrap();
        println!("{:<6} 60.0 deg -> {:?} (sum {back:.3})", finger.name(), joints.as_triple());
    }

    let posture = HandPosture::from_flex_angles(&[40.0, 75.0, 80.0, 70.0, 65.0]).unwrap();
    for (label, v) in HandPosture::joint_labels().iter().zip(posture.joint_vector()) {
        println!("{label:>12}: {v:6.2}");
    }

    match decompose_flex_angle(FingerId::Index, 400.0) {
        Ok(_) => println!("unexpected: no ROM error"),
        Err(e) => println!("beyond range of motion: {e}"),
    }
}
