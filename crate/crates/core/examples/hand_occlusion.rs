//! Builds the 19-cylinder hand mesh for a few poses and counts, per bone,
//! how many tessellation vertices the radar can see.

use handsynth::gestures::{hand_pose, place};
use handsynth::hand_model::{HandMesh, RadiiTable, Tessellation, BONES};
use handsynth::radar_sim::visibility_count;
use handsynth::Vec3;

fn main() -> handsynth::Result<()> {
    let poses = [
        ("flat", [0.0; 5], 0.0),
        ("fist", [1.2; 5], 0.0),
        ("edge-on", [0.0; 5], 1.4),
    ];
    let tess = Tessellation::default();
    println!("{} vertices per bone\n", tess.vertex_count());
    print!("{:<18}", "bone");
    for (name, _, _) in &poses {
        print!("{name:>10}");
    }
    println!();

    let counts: Vec<Vec<usize>> = poses
        .iter()
        .map(|(_, curl, pitch)| {
            let joints = place(&hand_pose(1.0, *curl), Vec3::new(0.0, -0.05, 0.25), *pitch, 0.0);
            let mesh = HandMesh::build(&joints, &RadiiTable::default(), tess)?;
            Ok(visibility_count(&mesh, Vec3::zeros()))
        })
        .collect::<handsynth::Result<_>>()?;
    for (b, bone) in BONES.iter().enumerate() {
        print!("{:<18}", format!("{}-{} {:?}", bone.from, bone.to, bone.kind));
        for c in &counts {
            print!("{:>10}", c[b]);
        }
        println!();
    }
    Ok(())
}
