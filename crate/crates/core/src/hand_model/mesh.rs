use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::skeleton::joint;
use crate::geometry::{orthonormal_basis, SolidCylinder};
use crate::{Error, Result, Vec3};

/// Anatomical class of a bone, used to look up default radii.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoneKind {
    Metacarpal,
    Proximal,
    Intermediate,
    Distal,
}

/// A bone of the `Internal20` skeleton as a pair of joint indices.
#[derive(Debug, Clone, Copy)]
pub struct Bone {
    pub from: usize,
    pub to: usize,
    pub kind: BoneKind,
}

pub const SEGMENTS_PER_HAND: usize = 19;

const fn bone(from: usize, to: usize, kind: BoneKind) -> Bone {
    Bone { from, to, kind }
}

/// The 19 bones of one hand in segment-id order: thumb (metacarpal,
/// proximal, distal), then index, middle, ring and pinky with four bones each.
pub const BONES: [Bone; SEGMENTS_PER_HAND] = {
    use BoneKind::*;
    [
        bone(joint::WRIST, 1, Metacarpal),
        bone(1, 2, Proximal),
        bone(2, 3, Distal),
        bone(joint::WRIST, 4, Metacarpal),
        bone(4, 5, Proximal),
        bone(5, 6, Intermediate),
        bone(6, 7, Distal),
        bone(joint::WRIST, 8, Metacarpal),
        bone(8, 9, Proximal),
        bone(9, 10, Intermediate),
        bone(10, 11, Distal),
        bone(joint::WRIST, 12, Metacarpal),
        bone(12, 13, Proximal),
        bone(13, 14, Intermediate),
        bone(14, 15, Distal),
        bone(joint::WRIST, 16, Metacarpal),
        bone(16, 17, Proximal),
        bone(17, 18, Intermediate),
        bone(18, 19, Distal),
    ]
};

/// One radius per segment, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiiTable(pub [f64; SEGMENTS_PER_HAND]);

impl RadiiTable {
    pub fn by_kind(metacarpal: f64, proximal: f64, intermediate: f64, distal: f64) -> Self {
        let mut radii = [0.0; SEGMENTS_PER_HAND];
        for (r, b) in radii.iter_mut().zip(BONES.iter()) {
            *r = match b.kind {
                BoneKind::Metacarpal => metacarpal,
                BoneKind::Proximal => proximal,
                BoneKind::Intermediate => intermediate,
                BoneKind::Distal => distal,
            };
        }
        Self(radii)
    }

    fn validate(&self) -> Result<()> {
        if self.0.iter().all(|r| r.is_finite() && *r > 0.0) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(
                "cylinder radii must be positive".into(),
            ))
        }
    }
}

impl Default for RadiiTable {
    fn default() -> Self {
        Self::by_kind(8e-3, 7e-3, 6e-3, 5e-3)
    }
}

/// A bone replaced by a cylinder whose caps sit on the bone's two joints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderSegment {
    pub endpoint_a: Vec3,
    pub endpoint_b: Vec3,
    pub radius: f64,
    /// Segment index within its hand, `0..19`.
    pub segment_id: usize,
    pub hand: usize,
}

impl CylinderSegment {
    pub fn axis(&self) -> Vec3 {
        self.endpoint_b - self.endpoint_a
    }

    pub fn length(&self) -> f64 {
        self.axis().norm()
    }

    /// Bone midpoint, where the scatterer sits.
    pub fn center(&self) -> Vec3 {
        (self.endpoint_a + self.endpoint_b) * 0.5
    }

    pub fn solid(&self) -> SolidCylinder {
        SolidCylinder {
            a: self.endpoint_a,
            b: self.endpoint_b,
            radius: self.radius,
        }
    }
}

/// Builds the 19 cylinders of every hand in an `Internal20` joint frame
/// (20 joints per hand, hands stacked).
pub fn build_segments(joints: &[Vec3], radii: &RadiiTable) -> Result<Vec<CylinderSegment>> {
    build_segments_in_frame(joints, radii, 0)
}

pub(crate) fn build_segments_in_frame(
    joints: &[Vec3],
    radii: &RadiiTable,
    frame: usize,
) -> Result<Vec<CylinderSegment>> {
    radii.validate()?;
    if joints.is_empty() || joints.len() % 20 != 0 {
        return Err(Error::InvalidSequence(format!(
            "expected 20 joints per hand, got {}",
            joints.len()
        )));
    }
    let hands = joints.len() / 20;
    let mut out = Vec::with_capacity(hands * SEGMENTS_PER_HAND);
    for hand in 0..hands {
        let hj = &joints[hand * 20..(hand + 1) * 20];
        for (segment_id, b) in BONES.iter().enumerate() {
            let (a, e) = (hj[b.from], hj[b.to]);
            if (e - a).norm() < 1e-9 {
                return Err(Error::DegenerateBone {
                    frame,
                    hand,
                    segment: segment_id,
                    joint_a: b.from,
                    joint_b: b.to,
                });
            }
            out.push(CylinderSegment {
                endpoint_a: a,
                endpoint_b: e,
                radius: radii.0[segment_id],
                segment_id,
                hand,
            });
        }
    }
    Ok(out)
}

/// Ring/vertex counts of a tessellated cylinder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tessellation {
    pub rings: usize,
    pub verts_per_ring: usize,
}

impl Default for Tessellation {
    fn default() -> Self {
        Self {
            rings: 20,
            verts_per_ring: 20,
        }
    }
}

impl Tessellation {
    pub fn validate(&self) -> Result<()> {
        if self.rings < 2 || self.verts_per_ring < 3 {
            return Err(Error::InvalidTessellation {
                rings: self.rings,
                verts_per_ring: self.verts_per_ring,
            });
        }
        Ok(())
    }

    /// Ring vertices plus the two cap centers.
    pub fn vertex_count(&self) -> usize {
        self.rings * self.verts_per_ring + 2
    }
}

/// Surface vertices of a segment: `rings` evenly spaced circles from
/// `endpoint_a` to `endpoint_b`, then the two cap centers (a, b).
pub fn tessellate(segment: &CylinderSegment, tess: Tessellation) -> Result<Vec<Vec3>> {
    tess.validate()?;
    let axis = segment.axis();
    let (u, v) = orthonormal_basis(axis);
    let mut out = Vec::with_capacity(tess.vertex_count());
    for ring in 0..tess.rings {
        let frac = ring as f64 / (tess.rings - 1) as f64;
        let c = segment.endpoint_a + axis * frac;
        for k in 0..tess.verts_per_ring {
            let phi = TAU * k as f64 / tess.verts_per_ring as f64;
            out.push(c + (u * phi.cos() + v * phi.sin()) * segment.radius);
        }
    }
    out.push(segment.endpoint_a);
    out.push(segment.endpoint_b);
    Ok(out)
}

/// Tessellated cylinder hand for one time instant.
#[derive(Debug, Clone)]
pub struct HandMesh {
    pub segments: Vec<CylinderSegment>,
    pub vertices: Vec<Vec<Vec3>>,
    pub tessellation: Tessellation,
}

impl HandMesh {
    pub fn build(joints: &[Vec3], radii: &RadiiTable, tessellation: Tessellation) -> Result<Self> {
        let segments = build_segments(joints, radii)?;
        Self::from_segments(segments, tessellation)
    }

    pub fn from_segments(
        segments: Vec<CylinderSegment>,
        tessellation: Tessellation,
    ) -> Result<Self> {
        let vertices = segments
            .iter()
            .map(|s| tessellate(s, tessellation))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            segments,
            vertices,
            tessellation,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gestures::canonical_hand;
    use proptest::prelude::*;

    #[test]
    fn flat_hand_has_nineteen_segments_and_three_thumb_bones() {
        let segs = build_segments(&canonical_hand(1.0), &RadiiTable::default()).unwrap();
        assert_eq!(segs.len(), 19);
        // thumb bones are the first three and all start from joints 0..=2
        assert!(segs[..3].iter().all(|s| s.segment_id < 3));
        assert_eq!(BONES.iter().filter(|b| b.to <= 3).count(), 3);
    }

    #[test]
    fn two_hands_give_thirty_eight_segments() {
        let mut joints = canonical_hand(1.0);
        joints.extend(
            canonical_hand(1.0)
                .iter()
                .map(|j| j + Vec3::new(0.2, 0.0, 0.0)),
        );
        let segs = build_segments(&joints, &RadiiTable::default()).unwrap();
        assert_eq!(segs.len(), 38);
        assert_eq!(segs[19].hand, 1);
        assert_eq!(segs[19].segment_id, 0);
    }

    #[test]
    fn coincident_joints_are_rejected() {
        let mut joints = canonical_hand(1.0);
        joints[6] = joints[5];
        let err = build_segments(&joints, &RadiiTable::default()).unwrap_err();
        assert!(
            matches!(err, Error::DegenerateBone { segment: 5, .. }),
            "{err}"
        );
    }

    #[test]
    fn default_radii_follow_bone_kind() {
        let r = RadiiTable::default();
        assert_eq!(r.0[0], 8e-3);
        assert_eq!(r.0[1], 7e-3);
        assert_eq!(r.0[2], 5e-3);
        assert_eq!(r.0[5], 6e-3);
    }

    #[test]
    fn vertex_counts() {
        let seg = CylinderSegment {
            endpoint_a: Vec3::zeros(),
            endpoint_b: Vec3::new(0.0, 0.0, 1.0),
            radius: 1.0,
            segment_id: 0,
            hand: 0,
        };
        assert_eq!(
            tessellate(&seg, Tessellation::default()).unwrap().len(),
            402
        );
        let tiny = Tessellation {
            rings: 2,
            verts_per_ring: 3,
        };
        assert_eq!(tessellate(&seg, tiny).unwrap().len(), 8);
        assert!(tessellate(
            &seg,
            Tessellation {
                rings: 1,
                verts_per_ring: 3
            }
        )
        .is_err());
        assert!(tessellate(
            &seg,
            Tessellation {
                rings: 2,
                verts_per_ring: 2
            }
        )
        .is_err());
    }

    #[test]
    fn ring_vertices_lie_on_unit_cylinder() {
        let seg = CylinderSegment {
            endpoint_a: Vec3::zeros(),
            endpoint_b: Vec3::new(0.0, 0.0, 1.0),
            radius: 1.0,
            segment_id: 0,
            hand: 0,
        };
        let verts = tessellate(&seg, Tessellation::default()).unwrap();
        for p in &verts[..400] {
            let d = (p.x * p.x + p.y * p.y).sqrt();
            assert!((d - 1.0).abs() < 1e-12);
            assert!((-1e-12..=1.0 + 1e-12).contains(&p.z));
        }
        assert_eq!(verts[400], seg.endpoint_a);
        assert_eq!(verts[401], seg.endpoint_b);
    }

    fn vec3() -> impl Strategy<Value = Vec3> {
        (-0.2f64..0.2, -0.2f64..0.2, 0.05f64..0.5).prop_map(|(x, y, z)| Vec3::new(x, y, z))
    }

    proptest! {
        #[test]
        fn axes_parallel_to_bones(jitter in prop::collection::vec(vec3(), 20)) {
            let joints: Vec<Vec3> = canonical_hand(1.0)
                .iter()
                .zip(&jitter)
                .map(|(j, d)| j + d * 0.1)
                .collect();
            let segs = build_segments(&joints, &RadiiTable::default()).unwrap();
            for (s, b) in segs.iter().zip(BONES.iter()) {
                let diff = joints[b.to] - joints[b.from];
                let cross = s.axis().normalize().cross(&diff.normalize()).norm();
                prop_assert!(cross < 1e-12);
                prop_assert!(s.axis().dot(&diff) > 0.0);
            }
        }

        #[test]
        fn tessellated_vertices_on_surface(
            a in vec3(), b in vec3(), radius in 1e-3f64..0.02,
            rings in 2usize..12, verts in 3usize..24,
        ) {
            prop_assume!((b - a).norm() > 1e-3);
            let seg = CylinderSegment { endpoint_a: a, endpoint_b: b, radius, segment_id: 0, hand: 0 };
            let tess = Tessellation { rings, verts_per_ring: verts };
            let vs = tessellate(&seg, tess).unwrap();
            prop_assert_eq!(vs.len(), rings * verts + 2);
            let solid = seg.solid();
            for p in &vs[..rings * verts] {
                prop_assert!((solid.axis_distance(*p) - radius).abs() < 1e-9);
            }
        }
    }
}
