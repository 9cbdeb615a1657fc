//! The ball model of SO(3) ≅ RP³: a rotation is a vector of length at most π
//! (direction = axis, length = angle), with diametrically opposite boundary
//! points naming the same rotation.
//!
//! `crossing_parity` counts how often a sufficiently refined loop jumps across
//! that antipodal boundary. With steps below 0.2 rad an interior step moves
//! the ball point by well under π/2 while a boundary crossing moves it by
//! nearly 2π, so the two regimes cannot be confused. The count mod 2 is the
//! homotopy class, computed without ever looking at quaternion lift signs.

use std::f64::consts::PI;

use thiserror::Error;

use crate::path::{HomotopyClass, Loop};
use crate::rotation::{UnitQuaternion, Vec3};
use crate::tol::Tolerances;

const TOL: Tolerances = Tolerances::DEFAULT;

#[derive(Debug, Error)]
pub enum BallError {
    #[error("vector of length {0} exceeds the ball radius π")]
    OutsideBall(f64),
    #[error("loop step {step:.3} rad at index {index} exceeds {max:.3}; refine the loop first")]
    RefinementRequired { step: f64, index: usize, max: f64 },
}

/// A point of the radius-π ball: axis-angle packed into a single vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallPoint {
    pub v: Vec3,
}

impl BallPoint {
    pub fn new(v: Vec3) -> Result<Self, BallError> {
        let n = v.norm();
        if n > PI + 1e-12 {
            return Err(BallError::OutsideBall(n));
        }
        Ok(BallPoint { v })
    }

    pub fn norm(&self) -> f64 {
        self.v.norm()
    }

    /// Within 1e-9 of the sphere ‖v‖ = π, where v and −v are identified.
    pub fn on_boundary(&self) -> bool {
        (self.norm() - PI).abs() < 1e-9
    }
}

/// Project a quaternion to the ball model. Uses the canonical lift (w ≥ 0),
/// so both lifts of a rotation map to the same point.
pub fn to_ball(q: UnitQuaternion) -> BallPoint {
    let q = q.canonicalized();
    let theta = 2.0 * q.w.clamp(-1.0, 1.0).acos();
    let vec = Vec3::new(q.x, q.y, q.z);
    let n = vec.norm();
    if theta < 1e-12 || n < 1e-15 {
        return BallPoint { v: Vec3::ZERO };
    }
    BallPoint {
        v: vec.scaled(theta / n),
    }
}

/// Rebuild the canonical quaternion from a ball point.
pub fn from_ball(p: BallPoint) -> Result<UnitQuaternion, BallError> {
    let theta = p.v.norm();
    if theta > PI + 1e-12 {
        return Err(BallError::OutsideBall(theta));
    }
    if theta < 1e-12 {
        return Ok(UnitQuaternion::IDENTITY);
    }
    let axis = p.v.normalized();
    let q = UnitQuaternion::from_axis_angle(axis, theta).expect("normalized axis");
    Ok(q.canonicalized())
}

/// Homotopy class by boundary-crossing count, the oracle independent of
/// quaternion lifting. Requires consecutive steps below 0.2 rad.
pub fn crossing_parity(l: &Loop) -> Result<HomotopyClass, BallError> {
    crossing_parity_with(l, TOL.parity_max_step, TOL.jump_threshold)
}

pub fn crossing_parity_with(
    l: &Loop,
    max_step: f64,
    jump_threshold: f64,
) -> Result<HomotopyClass, BallError> {
    for (index, w) in l.samples().windows(2).enumerate() {
        let step = w[0].rotation_angle_to(w[1]);
        if step >= max_step {
            return Err(BallError::RefinementRequired {
                step,
                index,
                max: max_step,
            });
        }
    }
    let points: Vec<BallPoint> = l.samples().iter().map(|q| to_ball(*q)).collect();
    let jumps = points
        .windows(2)
        .filter(|w| (w[1].v - w[0].v).norm() > jump_threshold)
        .count();
    Ok(if jumps % 2 == 0 {
        HomotopyClass::Trivial
    } else {
        HomotopyClass::NonTrivial
    })
}
