use crate::hand_model::HandMesh;
use crate::Vec3;

/// Intersections closer than this to the target vertex are treated as the
/// vertex's own surface, meters.
pub const SELF_EXCLUSION_EPS: f64 = 1e-6;

/// Whether the straight path from `origin` to `vertex` passes through any
/// cylinder of the mesh before reaching the vertex's own surface.
pub fn vertex_occluded(mesh: &HandMesh, origin: Vec3, vertex: Vec3) -> bool {
    let dir = vertex - origin;
    let len = dir.norm();
    if len <= SELF_EXCLUSION_EPS {
        return false;
    }
    let s_max = 1.0 - SELF_EXCLUSION_EPS / len;
    mesh.segments.iter().any(|seg| {
        seg.solid()
            .line_interval(origin, dir)
            .is_some_and(|(s0, s1)| s0.max(0.0) <= s1.min(s_max))
    })
}

/// Number of visible tessellation vertices per segment, in segment order.
pub fn visibility_count(mesh: &HandMesh, radar_origin: Vec3) -> Vec<usize> {
    mesh.vertices
        .iter()
        .map(|verts| {
            verts
                .iter()
                .filter(|&&v| !vertex_occluded(mesh, radar_origin, v))
                .count()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hand_model::{CylinderSegment, HandMesh, Tessellation};

    fn seg(a: Vec3, b: Vec3, radius: f64, id: usize) -> CylinderSegment {
        CylinderSegment {
            endpoint_a: a,
            endpoint_b: b,
            radius,
            segment_id: id,
            hand: 0,
        }
    }

    #[test]
    fn empty_mesh_gives_empty_counts() {
        let mesh = HandMesh::from_segments(vec![], Tessellation::default()).unwrap();
        assert!(visibility_count(&mesh, Vec3::zeros()).is_empty());
    }

    #[test]
    fn isolated_tilted_cylinder_sees_at_least_half() {
        let mesh = HandMesh::from_segments(
            vec![seg(
                Vec3::new(-0.02, 0.0, 0.30),
                Vec3::new(0.02, 0.01, 0.33),
                0.008,
                0,
            )],
            Tessellation::default(),
        )
        .unwrap();
        let count = visibility_count(&mesh, Vec3::zeros())[0];
        assert!(count >= 201, "count {count}");
        assert!(count < 402);
    }

    #[test]
    fn big_blocker_hides_everything_behind_it() {
        let target = seg(
            Vec3::new(-0.01, 0.0, 0.40),
            Vec3::new(0.01, 0.0, 0.40),
            0.005,
            0,
        );
        let blocker = seg(Vec3::new(0.0, 0.0, 0.15), Vec3::new(0.0, 0.0, 0.20), 0.2, 1);
        let mesh = HandMesh::from_segments(vec![target, blocker], Tessellation::default()).unwrap();
        let counts = visibility_count(&mesh, Vec3::zeros());
        assert_eq!(counts[0], 0);
        assert!(counts[1] > 0);
    }
}
