//! Rotations in three interchangeable representations: unit quaternions,
//! 3×3 special orthogonal matrices, and axis-angle pairs.
//!
//! Unit quaternions form the sphere S³ and project 2-to-1 onto rotation
//! matrices; `q` and `-q` always project to the same matrix. The reverse
//! conversion picks the canonical lift with non-negative scalar part
//! (ties at `w = 0` broken by making the first nonzero vector component
//! positive), so it is a genuine function.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tol::Tolerances;

const TOL: Tolerances = Tolerances::DEFAULT;

#[derive(Debug, Error)]
pub enum RotationError {
    #[error("axis must be a unit vector, got length {0}")]
    NonUnitAxis(f64),
    #[error("matrix is not special orthogonal (orthogonality defect {defect:.3e}, det {det})")]
    NotSpecialOrthogonal { defect: f64, det: f64 },
    #[error("cannot normalize a near-zero quaternion (norm {0:.3e})")]
    DegenerateQuaternion(f64),
}

/// A 3-vector with the handful of operations the charts need.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const EX: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const EY: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const EZ: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Vec3 {
        let n = self.norm();
        Vec3::new(self.x / n, self.y / n, self.z / n)
    }

    pub fn scaled(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// A point of S³: `w² + x² + y² + z² = 1`, renormalized on construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitQuaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl UnitQuaternion {
    pub const IDENTITY: UnitQuaternion = UnitQuaternion {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    /// Build from raw components, renormalizing. Fails on near-zero input.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Result<Self, RotationError> {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        if n < 1e-6 || !n.is_finite() {
            return Err(RotationError::DegenerateQuaternion(n));
        }
        Ok(UnitQuaternion {
            w: w / n,
            x: x / n,
            y: y / n,
            z: z / n,
        })
    }

    /// Internal constructor for components already known to be near unit norm.
    pub(crate) fn normalized_unchecked(w: f64, x: f64, y: f64, z: f64) -> Self {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        debug_assert!(n > 0.5, "degenerate quaternion in internal arithmetic");
        UnitQuaternion {
            w: w / n,
            x: x / n,
            y: y / n,
            z: z / n,
        }
    }

    /// Quaternion of the rotation by `angle` about the unit vector `axis`.
    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Result<Self, RotationError> {
        let n = axis.norm();
        if (n - 1.0).abs() > TOL.unit_axis {
            return Err(RotationError::NonUnitAxis(n));
        }
        let h = angle / 2.0;
        let s = h.sin();
        Ok(UnitQuaternion::normalized_unchecked(
            h.cos(),
            s * axis.x,
            s * axis.y,
            s * axis.z,
        ))
    }

    /// Group inverse under the projection: negates the vector part.
    pub fn conjugate(self) -> Self {
        UnitQuaternion {
            w: self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    pub fn dot(self, o: UnitQuaternion) -> f64 {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    /// Euclidean chord distance in R⁴.
    pub fn chord(self, o: UnitQuaternion) -> f64 {
        let d = (
            self.w - o.w,
            self.x - o.x,
            self.y - o.y,
            self.z - o.z,
        );
        (d.0 * d.0 + d.1 * d.1 + d.2 * d.2 + d.3 * d.3).sqrt()
    }

    /// Rotation angle in [0, π] between the two projected rotations.
    /// Chord-based so it stays accurate near zero, where acos of the dot
    /// product loses half the significant digits.
    pub fn rotation_angle_to(self, o: UnitQuaternion) -> f64 {
        let aligned = if self.dot(o) >= 0.0 { o } else { -o };
        let half_chord = self.chord(aligned) / 2.0;
        4.0 * half_chord.clamp(0.0, 1.0).asin()
    }

    /// Canonical representative of {q, -q}: `w > 0`, or at `w = 0` the first
    /// nonzero of (x, y, z) positive.
    pub fn canonicalized(self) -> Self {
        let tie = 1e-12;
        if self.w > tie {
            return self;
        }
        if self.w < -tie {
            return -self;
        }
        for c in [self.x, self.y, self.z] {
            if c > tie {
                return self;
            }
            if c < -tie {
                return -self;
            }
        }
        self
    }

    /// The projection to SO(3). Quadratic in the components, so the two lifts
    /// `q` and `-q` map to the same matrix exactly.
    pub fn to_matrix(self) -> RotationMatrix {
        let (w, x, y, z) = (self.w, self.x, self.y, self.z);
        RotationMatrix::from_rows_unchecked([
            [
                1.0 - 2.0 * (y * y + z * z),
                2.0 * (x * y - w * z),
                2.0 * (x * z + w * y),
            ],
            [
                2.0 * (x * y + w * z),
                1.0 - 2.0 * (x * x + z * z),
                2.0 * (y * z - w * x),
            ],
            [
                2.0 * (x * z - w * y),
                2.0 * (y * z + w * x),
                1.0 - 2.0 * (x * x + y * y),
            ],
        ])
    }
}

impl Mul for UnitQuaternion {
    type Output = UnitQuaternion;

    /// Hamilton product, renormalized.
    fn mul(self, o: UnitQuaternion) -> UnitQuaternion {
        let (a, b, c, d) = (self.w, self.x, self.y, self.z);
        let (e, f, g, h) = (o.w, o.x, o.y, o.z);
        UnitQuaternion::normalized_unchecked(
            a * e - b * f - c * g - d * h,
            a * f + b * e + c * h - d * g,
            a * g - b * h + c * e + d * f,
            a * h + b * g - c * f + d * e,
        )
    }
}

impl Neg for UnitQuaternion {
    type Output = UnitQuaternion;
    fn neg(self) -> UnitQuaternion {
        UnitQuaternion {
            w: -self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }
}

/// Spherical interpolation along the shorter great-circle arc of S³.
pub fn slerp(a: UnitQuaternion, b: UnitQuaternion, t: f64) -> UnitQuaternion {
    let mut b = b;
    let mut dot = a.dot(b);
    if dot < 0.0 {
        b = -b;
        dot = -dot;
    }
    let dot = dot.min(1.0);
    let omega = dot.acos();
    let (ca, cb) = if omega < 1e-9 {
        (1.0 - t, t)
    } else {
        let s = omega.sin();
        (((1.0 - t) * omega).sin() / s, (t * omega).sin() / s)
    };
    UnitQuaternion::normalized_unchecked(
        ca * a.w + cb * b.w,
        ca * a.x + cb * b.x,
        ca * a.y + cb * b.y,
        ca * a.z + cb * b.z,
    )
}

/// A 3×3 special orthogonal matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationMatrix {
    m: [[f64; 3]; 3],
}

impl RotationMatrix {
    pub const IDENTITY: RotationMatrix = RotationMatrix {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    /// Validated constructor: rejects matrices that are not special orthogonal.
    pub fn new(m: [[f64; 3]; 3]) -> Result<Self, RotationError> {
        let r = RotationMatrix { m };
        let defect = r.orthogonality_defect();
        let det = r.det();
        if defect > TOL.matrix_ortho || (det - 1.0).abs() > TOL.matrix_ortho {
            return Err(RotationError::NotSpecialOrthogonal { defect, det });
        }
        Ok(r)
    }

    pub(crate) fn from_rows_unchecked(m: [[f64; 3]; 3]) -> Self {
        RotationMatrix { m }
    }

    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Result<Self, RotationError> {
        Ok(UnitQuaternion::from_axis_angle(axis, angle)?.to_matrix())
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.m[i][j]
    }

    pub fn rows(&self) -> &[[f64; 3]; 3] {
        &self.m
    }

    pub fn transpose(&self) -> RotationMatrix {
        let m = &self.m;
        RotationMatrix::from_rows_unchecked([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    pub fn apply(&self, v: Vec3) -> Vec3 {
        let m = &self.m;
        Vec3::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }

    pub fn det(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Max-norm of mᵀm − I.
    pub fn orthogonality_defect(&self) -> f64 {
        let t = self.transpose();
        let p = t * *self;
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((p.m[i][j] - target).abs());
            }
        }
        worst
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1] + self.m[2][2]
    }

    /// Entrywise max-norm distance, used for matrix-equality assertions.
    pub fn max_entry_diff(&self, o: &RotationMatrix) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.m[i][j] - o.m[i][j]).abs());
            }
        }
        worst
    }

    /// Canonical lift to S³: the quaternion with `w ≥ 0` (Shepperd's method).
    pub fn to_quaternion(&self) -> UnitQuaternion {
        let m = &self.m;
        let t = self.trace();
        let q = if t > 0.0 {
            let s = (t + 1.0).sqrt() * 2.0;
            UnitQuaternion::normalized_unchecked(
                0.25 * s,
                (m[2][1] - m[1][2]) / s,
                (m[0][2] - m[2][0]) / s,
                (m[1][0] - m[0][1]) / s,
            )
        } else if m[0][0] > m[1][1] && m[0][0] > m[2][2] {
            let s = (1.0 + m[0][0] - m[1][1] - m[2][2]).sqrt() * 2.0;
            UnitQuaternion::normalized_unchecked(
                (m[2][1] - m[1][2]) / s,
                0.25 * s,
                (m[0][1] + m[1][0]) / s,
                (m[0][2] + m[2][0]) / s,
            )
        } else if m[1][1] > m[2][2] {
            let s = (1.0 + m[1][1] - m[0][0] - m[2][2]).sqrt() * 2.0;
            UnitQuaternion::normalized_unchecked(
                (m[0][2] - m[2][0]) / s,
                (m[0][1] + m[1][0]) / s,
                0.25 * s,
                (m[1][2] + m[2][1]) / s,
            )
        } else {
            let s = (1.0 + m[2][2] - m[0][0] - m[1][1]).sqrt() * 2.0;
            UnitQuaternion::normalized_unchecked(
                (m[1][0] - m[0][1]) / s,
                (m[0][2] + m[2][0]) / s,
                (m[1][2] + m[2][1]) / s,
                0.25 * s,
            )
        };
        q.canonicalized()
    }
}

impl Mul for RotationMatrix {
    type Output = RotationMatrix;
    fn mul(self, o: RotationMatrix) -> RotationMatrix {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).map(|k| self.m[i][k] * o.m[k][j]).sum();
            }
        }
        RotationMatrix::from_rows_unchecked(m)
    }
}

/// Geodesic distance on SO(3): the rotation angle of aᵀb, in [0, π].
/// Small angles are read from the antisymmetric part (sin θ) rather than the
/// trace (cos θ), which cannot resolve below ~1e-8.
pub fn rotation_distance(a: &RotationMatrix, b: &RotationMatrix) -> f64 {
    let rel = a.transpose() * *b;
    let cos = ((rel.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    if cos > 0.7 {
        let m = rel.rows();
        let sin_vec = Vec3::new(
            (m[2][1] - m[1][2]) / 2.0,
            (m[0][2] - m[2][0]) / 2.0,
            (m[1][0] - m[0][1]) / 2.0,
        );
        sin_vec.norm().clamp(0.0, 1.0).asin()
    } else {
        cos.acos()
    }
}

/// Axis-angle form of a rotation: unit axis and angle in [0, 2π).
#[derive(Clone, Copy, Debug)]
pub struct AxisAngle {
    pub axis: Vec3,
    pub angle: f64,
}

impl AxisAngle {
    pub fn new(axis: Vec3, angle: f64) -> Result<Self, RotationError> {
        let n = axis.norm();
        if (n - 1.0).abs() > 1e-12 {
            return Err(RotationError::NonUnitAxis(n));
        }
        Ok(AxisAngle {
            axis,
            angle: angle.rem_euclid(2.0 * std::f64::consts::PI),
        })
    }

    pub fn to_quaternion(self) -> UnitQuaternion {
        UnitQuaternion::from_axis_angle(self.axis, self.angle)
            .expect("AxisAngle invariant guarantees a unit axis")
    }
}
