//! Executable topology of the rotation group.
//!
//! Three interchangeable coordinate models of SO(3):
//!
//! * unit quaternions on S³, the 2-to-1 double cover ([`rotation`]);
//! * the solid-torus chart — slide the z-axis to its image along a meridian
//!   with parallel transport, then spin about it ([`torus`]);
//! * the radius-π ball with antipodal boundary identification ([`ball`]).
//!
//! On top of them: sampled rotation paths and loops ([`path`]), continuity
//! lifting and the Z/2 homotopy classification with explicit contraction of
//! trivial loops ([`homotopy`]), and Dirac's belt trick as a state machine
//! ([`belt`]). Two independent classifiers — the lift-endpoint sign and the
//! ball-model boundary-crossing parity — are kept in agreement by the test
//! suite.

pub mod ball;
pub mod belt;
pub mod homotopy;
pub mod io;
pub mod path;
pub mod rotation;
pub mod tol;
pub mod torus;

pub use ball::{crossing_parity, from_ball, to_ball, BallPoint};
pub use belt::BeltState;
pub use homotopy::{classify, contract, lift, verify_homotopy, ContractOptions, HomotopyGrid};
pub use path::{axis_rotation_path, random_loop, HomotopyClass, Loop, RotationPath};
pub use rotation::{rotation_distance, RotationMatrix, UnitQuaternion, Vec3};
pub use tol::Tolerances;
pub use torus::{
    boundary_identified, boundary_limit_rotation, chart_forward, chart_inverse, slide_rotation,
    to_solid_torus, TorusChartPoint,
};
