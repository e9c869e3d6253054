//! Small geometric helpers shared by the hand model and the occlusion test.

use crate::Vec3;

const PARALLEL_EPS: f64 = 1e-18;

/// Closed solid cylinder given by its two cap centers and radius.
#[derive(Debug, Clone, Copy)]
pub struct SolidCylinder {
    pub a: Vec3,
    pub b: Vec3,
    pub radius: f64,
}

impl SolidCylinder {
    /// Parameter interval `[s0, s1]` of the line `origin + s * dir` that lies
    /// inside the closed solid cylinder, or `None` if the line misses it.
    ///
    /// The interval is not clipped; callers restrict it to their segment.
    pub fn line_interval(&self, origin: Vec3, dir: Vec3) -> Option<(f64, f64)> {
        let axis = self.b - self.a;
        let height = axis.norm();
        let unit = axis / height;

        let rel = origin - self.a;
        let z0 = rel.dot(&unit);
        let dz = dir.dot(&unit);

        // Axial slab 0 <= z0 + s*dz <= height.
        let (mut lo, mut hi) = if dz.abs() < PARALLEL_EPS {
            if z0 < 0.0 || z0 > height {
                return None;
            }
            (f64::NEG_INFINITY, f64::INFINITY)
        } else {
            let s_a = -z0 / dz;
            let s_b = (height - z0) / dz;
            (s_a.min(s_b), s_a.max(s_b))
        };

        // Radial part |m + s*n|^2 <= r^2.
        let m = rel - unit * z0;
        let n = dir - unit * dz;
        let qa = n.norm_squared();
        let qb = m.dot(&n);
        let qc = m.norm_squared() - self.radius * self.radius;
        if qa < PARALLEL_EPS {
            if qc > 0.0 {
                return None;
            }
        } else {
            let disc = qb * qb - qa * qc;
            if disc < 0.0 {
                return None;
            }
            let root = disc.sqrt();
            // Numerically stable pair of roots.
            let q = -(qb + qb.signum() * root);
            let (r0, r1) = if q == 0.0 {
                (0.0, 0.0)
            } else {
                let x0 = q / qa;
                let x1 = qc / q;
                (x0.min(x1), x0.max(x1))
            };
            lo = lo.max(r0);
            hi = hi.min(r1);
        }

        (lo <= hi).then_some((lo, hi))
    }

    /// Distance from `p` to the cylinder axis line.
    pub fn axis_distance(&self, p: Vec3) -> f64 {
        let unit = (self.b - self.a).normalize();
        let rel = p - self.a;
        (rel - unit * rel.dot(&unit)).norm()
    }
}

/// Two unit vectors completing `axis` to a right-handed orthonormal basis.
pub fn orthonormal_basis(axis: Vec3) -> (Vec3, Vec3) {
    let w = axis.normalize();
    let helper = if w.x.abs() <= w.y.abs() && w.x.abs() <= w.z.abs() {
        Vec3::x()
    } else if w.y.abs() <= w.z.abs() {
        Vec3::y()
    } else {
        Vec3::z()
    };
    let u = w.cross(&helper).normalize();
    let v = w.cross(&u);
    (u, v)
}

/// Angle between a line direction and a line of sight, folded into `[0, π/2]`.
pub fn line_angle(direction: Vec3, line_of_sight: Vec3) -> f64 {
    let denom = direction.norm() * line_of_sight.norm();
    let cos = (direction.dot(&line_of_sight).abs() / denom).min(1.0);
    cos.acos()
}
