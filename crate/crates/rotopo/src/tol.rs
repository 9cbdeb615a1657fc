//! Central tolerance configuration.
//!
//! Every numeric threshold used by the crate lives in one record so that
//! defaults are auditable in a single place and individual values can be
//! overridden by name (the CLI's `--tol name=value` flag goes through
//! [`Tolerances::set`]).

use std::f64::consts::PI;

use thiserror::Error;

#[derive(Debug, Error)]
#[error("unknown tolerance name `{0}`")]
pub struct UnknownTolerance(pub String);

/// All tunable thresholds, with the crate-wide defaults.
#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    /// Unit-norm invariant for quaternions.
    pub quat_norm: f64,
    /// Max orthogonality defect and determinant deviation for rotation matrices.
    pub matrix_ortho: f64,
    /// How close to unit length an input axis must be.
    pub unit_axis: f64,
    /// Loop-closure / projection-match tolerance (rotation distance).
    pub closure: f64,
    /// Chart round-trip tolerance.
    pub chart_roundtrip: f64,
    /// Matrix agreement tolerance for boundary identification on the torus.
    pub boundary_match: f64,
    /// Z·e_z must exceed -1 + this for the torus chart to apply.
    pub south_pole_cos: f64,
    /// alpha > pi - this counts as singular for chart_forward.
    pub south_pole_alpha: f64,
    /// Quaternion chord tolerance when deciding a homotopy class.
    pub class_chord: f64,
    /// Max rotation step allowed by the lifting algorithm.
    pub lift_max_step: f64,
    /// Max rotation step required before crossing parity may run.
    pub parity_max_step: f64,
    /// Ball-space chord above which a step counts as an antipodal jump.
    pub jump_threshold: f64,
    /// Max rotation step along rows and columns of a homotopy grid.
    pub grid_eps: f64,
    /// Min spherical distance from a stereographic pole to a lifted loop.
    pub pole_clearance: f64,
    /// Rejection-sampling attempts when searching for a pole.
    pub pole_attempts: usize,
    /// Refinement step applied to loops before contraction.
    pub contract_refine: f64,
    /// Base offset from alpha = pi when evaluating boundary limits.
    pub boundary_eps: f64,
    /// Stability requirement on the extrapolated boundary limit.
    pub boundary_stability: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        quat_norm: 1e-12,
        matrix_ortho: 1e-10,
        unit_axis: 1e-9,
        closure: 1e-9,
        chart_roundtrip: 1e-8,
        boundary_match: 1e-7,
        south_pole_cos: 1e-9,
        south_pole_alpha: 1e-6,
        class_chord: 1e-6,
        lift_max_step: 1.0,
        parity_max_step: 0.2,
        jump_threshold: PI / 2.0,
        grid_eps: 0.1,
        pole_clearance: 0.3,
        pole_attempts: 1000,
        contract_refine: 0.05,
        boundary_eps: 1e-6,
        boundary_stability: 1e-8,
    };

    /// Override a tolerance by name. Names match the field names.
    pub fn set(&mut self, name: &str, value: f64) -> Result<(), UnknownTolerance> {
        match name {
            "quat_norm" => self.quat_norm = value,
            "matrix_ortho" => self.matrix_ortho = value,
            "unit_axis" => self.unit_axis = value,
            "closure" => self.closure = value,
            "chart_roundtrip" => self.chart_roundtrip = value,
            "boundary_match" => self.boundary_match = value,
            "south_pole_cos" => self.south_pole_cos = value,
            "south_pole_alpha" => self.south_pole_alpha = value,
            "class_chord" => self.class_chord = value,
            "lift_max_step" => self.lift_max_step = value,
            "parity_max_step" => self.parity_max_step = value,
            "jump_threshold" => self.jump_threshold = value,
            "grid_eps" => self.grid_eps = value,
            "pole_clearance" => self.pole_clearance = value,
            "pole_attempts" => self.pole_attempts = value as usize,
            "contract_refine" => self.contract_refine = value,
            "boundary_eps" => self.boundary_eps = value,
            "boundary_stability" => self.boundary_stability = value,
            other => return Err(UnknownTolerance(other.to_string())),
        }
        Ok(())
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
