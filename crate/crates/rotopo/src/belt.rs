//! Dirac's belt trick as data.
//!
//! The belt is a path of frames: sample 0 is the fixed wall end (always the
//! identity), the last sample is the current orientation of the object.
//! Rotating the object appends an arc at the object end; whether the belt can
//! be untwisted without moving the object is the homotopy class of the
//! ribbon, and the untwisting movie is its contraction.

use thiserror::Error;

use crate::homotopy::{classify, contract, ContractOptions, HomotopyError, HomotopyGrid};
use crate::path::{HomotopyClass, Loop, PathError, RotationPath};
use crate::rotation::{rotation_distance, RotationMatrix, UnitQuaternion, Vec3};

const RIBBON_STEP: f64 = 0.1;

#[derive(Debug, Error)]
pub enum BeltError {
    #[error("a belt needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("axis must be a unit vector, got length {0}")]
    NonUnitAxis(f64),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Homotopy(#[from] HomotopyError),
}

/// Immutable belt configuration; every operation returns a new state.
#[derive(Clone, Debug)]
pub struct BeltState {
    ribbon: RotationPath,
    history: Vec<String>,
}

impl BeltState {
    /// Flat, untwisted belt: all samples at the identity.
    pub fn new(n: usize) -> Result<Self, BeltError> {
        if n < 2 {
            return Err(BeltError::TooFewSamples(n));
        }
        let ribbon = RotationPath::new(vec![UnitQuaternion::IDENTITY; n], "belt")?;
        Ok(BeltState {
            ribbon,
            history: Vec::new(),
        })
    }

    pub fn ribbon(&self) -> &RotationPath {
        &self.ribbon
    }

    pub fn history(&self) -> &[String] {
        &self.history
    }

    pub fn object_orientation(&self) -> RotationMatrix {
        self.ribbon.last().to_matrix()
    }

    /// Rotate the object end by `angle` about `axis` (body frame), dragging
    /// the belt along. The wall end never moves.
    pub fn rotate_object(&self, axis: Vec3, angle: f64) -> Result<BeltState, BeltError> {
        let n = axis.norm();
        if (n - 1.0).abs() > 1e-9 {
            return Err(BeltError::NonUnitAxis(n));
        }
        let end = self.ribbon.last();
        let mut samples = self.ribbon.samples().to_vec();
        let pieces = ((angle.abs() / RIBBON_STEP).ceil() as usize).max(1);
        for j in 1..=pieces {
            let partial = angle * j as f64 / pieces as f64;
            let inc = UnitQuaternion::from_axis_angle(axis, partial)
                .map_err(|_| BeltError::NonUnitAxis(n))?;
            samples.push(end * inc);
        }
        let ribbon = RotationPath::new(samples, "belt")?.refine(RIBBON_STEP)?;
        let mut history = self.history.clone();
        history.push(format!(
            "rotate_object(axis=({:.3},{:.3},{:.3}), angle={:.6})",
            axis.x, axis.y, axis.z, angle
        ));
        Ok(BeltState { ribbon, history })
    }

    /// The ribbon closed into a loop at the identity. When the object is away
    /// from its home orientation the loop is closed by the shortest geodesic
    /// return arc, and the convention is recorded in the loop's meta.
    pub fn closed_ribbon(&self) -> Result<Loop, BeltError> {
        let end = self.object_orientation();
        if rotation_distance(&end, &RotationMatrix::IDENTITY) <= 1e-6 {
            let mut samples = self.ribbon.samples().to_vec();
            *samples.last_mut().expect("non-empty") = {
                // snap the endpoint onto the basepoint so the loop closes exactly
                let last = self.ribbon.last();
                if last.w >= 0.0 {
                    UnitQuaternion::IDENTITY
                } else {
                    -UnitQuaternion::IDENTITY
                }
            };
            let path = RotationPath::new(samples, "belt ribbon (already closed)")?;
            return Ok(Loop::new(path, RotationMatrix::IDENTITY)?);
        }
        let mut samples = self.ribbon.samples().to_vec();
        let last = self.ribbon.last();
        let home = if last.w >= 0.0 {
            UnitQuaternion::IDENTITY
        } else {
            -UnitQuaternion::IDENTITY
        };
        samples.push(home);
        let path = RotationPath::new(samples, "belt ribbon closed by geodesic return arc")?
            .refine(RIBBON_STEP)?;
        Ok(Loop::new(path, RotationMatrix::IDENTITY)?)
    }

    /// True iff the belt can be untwisted while both ends stay fixed.
    pub fn untwistable(&self) -> Result<bool, BeltError> {
        let class = classify(&self.closed_ribbon()?)?;
        Ok(class == HomotopyClass::Trivial)
    }

    /// The untwisting movie: each grid row is a belt configuration with both
    /// ends fixed, ending in the flat belt.
    pub fn untwist(&self, opts: &ContractOptions) -> Result<HomotopyGrid, BeltError> {
        Ok(contract(&self.closed_ribbon()?, opts)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homotopy::verify_homotopy;
    use std::f64::consts::PI;

    const TAU: f64 = 2.0 * PI;

    #[test]
    fn new_belt_is_flat_and_untwistable() {
        let b = BeltState::new(2).unwrap();
        assert_eq!(b.ribbon().len(), 2);
        assert!(b
            .object_orientation()
            .max_entry_diff(&RotationMatrix::IDENTITY)
            < 1e-15);
        assert!(b.untwistable().unwrap());
    }

    #[test]
    fn too_small_belt_rejected() {
        assert!(matches!(BeltState::new(1), Err(BeltError::TooFewSamples(1))));
    }

    #[test]
    fn zero_rotation_keeps_the_belt_flat() {
        let b = BeltState::new(4).unwrap().rotate_object(Vec3::EZ, 0.0).unwrap();
        assert!(b.untwistable().unwrap());
        for q in b.ribbon().samples() {
            assert!(q.rotation_angle_to(UnitQuaternion::IDENTITY) < 1e-12);
        }
    }

    #[test]
    fn one_full_turn_twists_the_belt() {
        let b = BeltState::new(2).unwrap().rotate_object(Vec3::EZ, TAU).unwrap();
        assert!(!b.untwistable().unwrap());
        let err = b.untwist(&ContractOptions::default());
        assert!(matches!(
            err,
            Err(BeltError::Homotopy(HomotopyError::NotNullHomotopic))
        ));
    }

    #[test]
    fn two_full_turns_untwist() {
        let b = BeltState::new(2)
            .unwrap()
            .rotate_object(Vec3::EZ, 2.0 * TAU)
            .unwrap();
        assert!(b.untwistable().unwrap());
        let grid = b.untwist(&ContractOptions::default()).unwrap();
        let report = verify_homotopy(&grid, &b.closed_ribbon().unwrap());
        assert!(report.pass(), "{report}");
        // the wall end stays put in every frame of the movie
        for row in grid.rows() {
            assert!(row[0].rotation_angle_to(UnitQuaternion::IDENTITY) < 1e-9);
        }
    }

    #[test]
    fn turns_about_different_axes_cancel() {
        let b = BeltState::new(2)
            .unwrap()
            .rotate_object(Vec3::EX, TAU)
            .unwrap()
            .rotate_object(Vec3::EY, TAU)
            .unwrap();
        assert!(b.untwistable().unwrap());
    }

    #[test]
    fn untwistable_toggles_with_each_full_turn() {
        let mut b = BeltState::new(2).unwrap();
        let axes = [Vec3::EX, Vec3::EY, Vec3::EZ, Vec3::EX];
        let mut expect = true;
        for axis in axes {
            b = b.rotate_object(axis, TAU).unwrap();
            expect = !expect;
            assert_eq!(b.untwistable().unwrap(), expect);
        }
    }

    #[test]
    fn partial_rotation_closes_by_return_arc() {
        let b = BeltState::new(2).unwrap().rotate_object(Vec3::EX, PI).unwrap();
        // 180° out and straight back: contractible
        assert!(b.untwistable().unwrap());
        assert!(b.closed_ribbon().unwrap().path().meta.contains("return arc"));
    }
}
