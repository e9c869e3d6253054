//! Converts a 22-joint depth-camera skeleton (DHG text layout) into the
//! 20-joint radar-frame layout: drops the palm joint, merges the two thumb
//! base joints, maps camera axes onto radar axes and hovers the palm above
//! the radar.

use std::path::Path;

use handsynth::hand_model::{parse_dhg_text, CoordFrame};
use handsynth::pipeline::{align_skeleton, AlignmentSpec, DHG_FRAME_RATE};

fn main() -> handsynth::Result<()> {
    // a small synthetic recording: a hand 40 cm in front of the camera,
    // drifting sideways
    let mut text = String::new();
    for f in 0..6 {
        let dx = 0.01 * f as f64;
        for j in 0..22 {
            let (x, y, z) = (dx + 0.01 * (j % 5) as f64, 0.015 * (j / 5) as f64, 0.40 + 0.002 * j as f64);
            text.push_str(&format!("{x} {y} {z} "));
        }
        text.push('\n');
    }
    let seq = parse_dhg_text(&text, DHG_FRAME_RATE, Path::new("inline"))?;
    let spec = AlignmentSpec::default();
    let aligned = align_skeleton(&seq, &spec)?;

    println!("alignment: {}", serde_json::to_string(&spec).expect("spec serializes"));
    println!(
        "{:?} / {} joints / {:?}  ->  {:?} / {} joints / {:?}",
        seq.layout(),
        seq.joints_per_frame(),
        seq.coord_frame(),
        aligned.layout(),
        aligned.joints_per_frame(),
        aligned.coord_frame()
    );
    assert_eq!(aligned.coord_frame(), CoordFrame::Radar);
    let (src, dst) = (&seq.frames()[0].joints, &aligned.frames()[0].joints);
    println!("thumb pair  {:.3?} {:.3?}", src[3].as_slice(), src[4].as_slice());
    println!("merged      {:.3?}", dst[2].as_slice());
    println!("wrist       {:.3?} -> {:.3?}", src[0].as_slice(), dst[0].as_slice());
    Ok(())
}
