//! Skeleton sequences, the cylinder hand mesh and per-chirp scatterer tracks.

mod io;
mod mesh;
mod skeleton;
mod tracks;
mod transform;

pub use io::{
    parse_dhg_text, parse_skeleton, read_dhg_text, read_skeleton, skeleton_to_string,
    write_skeleton, SkeletonHeader,
};
pub use mesh::{
    build_segments, tessellate, Bone, BoneKind, CylinderSegment, HandMesh, RadiiTable,
    Tessellation, BONES, SEGMENTS_PER_HAND,
};
pub use skeleton::{
    joint, normalize_bone_lengths, CoordFrame, JointFrameSequence, JointLayout, SkeletonFrame,
    STANDARD_BONE_LENGTHS,
};
pub use tracks::{resample_tracks, ChirpTimeline, HandModelConfig, ScattererTrack, TrackSet};
pub use transform::{leap_to_radar, radar_to_leap, SensorOffset};
