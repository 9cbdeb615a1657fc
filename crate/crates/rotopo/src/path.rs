//! Sampled paths and loops of rotations.
//!
//! A path is a finite sequence of unit quaternions read through the double
//! cover, so sample signs carry no meaning here; continuity is a property
//! of the projected rotations and is enforced by `refine`. Loops carry a
//! basepoint and must close on it at both ends.

use std::fmt;
use std::ops::Mul;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::rotation::{rotation_distance, slerp, RotationMatrix, UnitQuaternion, Vec3};
use crate::tol::Tolerances;

const TOL: Tolerances = Tolerances::DEFAULT;
const TAU: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Error)]
pub enum PathError {
    #[error("a path needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("path endpoints differ from the basepoint by {0:.3e} rad")]
    NotClosed(f64),
    #[error("basepoints differ by {0:.3e} rad; concatenation needs a common basepoint")]
    BasepointMismatch(f64),
    #[error("refinement step must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("axis must be a unit vector, got length {0}")]
    NonUnitAxis(f64),
}

/// Element of π₁(SO(3)) ≅ Z/2, written multiplicatively as {+1, −1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HomotopyClass {
    /// Contractible loops: the class of the constant loop.
    Trivial,
    /// Non-contractible loops: a single full rotation.
    NonTrivial,
}

impl HomotopyClass {
    pub fn sign(self) -> i32 {
        match self {
            HomotopyClass::Trivial => 1,
            HomotopyClass::NonTrivial => -1,
        }
    }

    pub fn from_sign(sign: i32) -> Self {
        if sign >= 0 {
            HomotopyClass::Trivial
        } else {
            HomotopyClass::NonTrivial
        }
    }
}

impl Mul for HomotopyClass {
    type Output = HomotopyClass;
    fn mul(self, o: HomotopyClass) -> HomotopyClass {
        HomotopyClass::from_sign(self.sign() * o.sign())
    }
}

impl fmt::Display for HomotopyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.sign())
    }
}

/// A discretized path of rotations.
#[derive(Clone, Debug)]
pub struct RotationPath {
    samples: Vec<UnitQuaternion>,
    /// Constructor provenance, free text.
    pub meta: String,
}

impl RotationPath {
    pub fn new(samples: Vec<UnitQuaternion>, meta: impl Into<String>) -> Result<Self, PathError> {
        if samples.len() < 2 {
            return Err(PathError::TooFewSamples(samples.len()));
        }
        Ok(RotationPath {
            samples,
            meta: meta.into(),
        })
    }

    pub fn samples(&self) -> &[UnitQuaternion] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> UnitQuaternion {
        self.samples[0]
    }

    pub fn last(&self) -> UnitQuaternion {
        *self.samples.last().expect("paths are non-empty")
    }

    /// Largest rotation step between consecutive samples.
    pub fn max_step(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| w[0].rotation_angle_to(w[1]))
            .fold(0.0, f64::max)
    }

    pub fn reverse(&self) -> RotationPath {
        let mut samples = self.samples.clone();
        samples.reverse();
        RotationPath {
            samples,
            meta: format!("reverse({})", self.meta),
        }
    }

    /// Insert geodesic interpolants (shorter arc on S³) until every projected
    /// step is at most `eps`. Endpoints are untouched; a path that already
    /// satisfies the bound is returned unchanged.
    pub fn refine(&self, eps: f64) -> Result<RotationPath, PathError> {
        if eps <= 0.0 {
            return Err(PathError::NonPositiveStep(eps));
        }
        let mut out = Vec::with_capacity(self.samples.len());
        out.push(self.samples[0]);
        for w in self.samples.windows(2) {
            let (a, b) = (w[0], w[1]);
            let step = a.rotation_angle_to(b);
            if step > eps {
                let pieces = (step / eps).ceil() as usize;
                for j in 1..pieces {
                    out.push(slerp(a, b, j as f64 / pieces as f64));
                }
            }
            out.push(b);
        }
        Ok(RotationPath {
            samples: out,
            meta: self.meta.clone(),
        })
    }
}

/// A closed path with a basepoint.
#[derive(Clone, Debug)]
pub struct Loop {
    path: RotationPath,
    basepoint: RotationMatrix,
}

impl Loop {
    pub fn new(path: RotationPath, basepoint: RotationMatrix) -> Result<Self, PathError> {
        let d0 = rotation_distance(&path.first().to_matrix(), &basepoint);
        let d1 = rotation_distance(&path.last().to_matrix(), &basepoint);
        let worst = d0.max(d1);
        if worst > TOL.closure {
            return Err(PathError::NotClosed(worst));
        }
        Ok(Loop { path, basepoint })
    }

    /// Closed path based at its own first rotation.
    pub fn from_path(path: RotationPath) -> Result<Self, PathError> {
        let basepoint = path.first().to_matrix();
        Loop::new(path, basepoint)
    }

    /// Constant loop at `basepoint` with `n` samples.
    pub fn constant(basepoint: RotationMatrix, n: usize) -> Result<Self, PathError> {
        let q = basepoint.to_quaternion();
        let path = RotationPath::new(vec![q; n.max(2)], "constant")?;
        Loop::new(path, basepoint)
    }

    pub fn path(&self) -> &RotationPath {
        &self.path
    }

    pub fn samples(&self) -> &[UnitQuaternion] {
        self.path.samples()
    }

    pub fn basepoint(&self) -> &RotationMatrix {
        &self.basepoint
    }

    /// Concatenate two loops with a common basepoint, dropping the duplicated
    /// junction sample.
    pub fn concat(&self, other: &Loop) -> Result<Loop, PathError> {
        let d = rotation_distance(&self.basepoint, &other.basepoint);
        if d > TOL.closure {
            return Err(PathError::BasepointMismatch(d));
        }
        let mut samples = self.path.samples.clone();
        samples.extend_from_slice(&other.path.samples[1..]);
        let path = RotationPath {
            samples,
            meta: format!("concat({}, {})", self.path.meta, other.path.meta),
        };
        Loop::new(path, self.basepoint)
    }

    pub fn reverse(&self) -> Loop {
        Loop {
            path: self.path.reverse(),
            basepoint: self.basepoint,
        }
    }

    pub fn refine(&self, eps: f64) -> Result<Loop, PathError> {
        Ok(Loop {
            path: self.path.refine(eps)?,
            basepoint: self.basepoint,
        })
    }

    /// Traverse the loop twice.
    pub fn doubled(&self) -> Loop {
        self.concat(self).expect("a loop shares its own basepoint")
    }
}

/// Result of sampling a rotation arc: closed iff the total angle is a whole
/// number of turns.
#[derive(Clone, Debug)]
pub enum GeneratedPath {
    Closed(Loop),
    Open(RotationPath),
}

impl GeneratedPath {
    pub fn into_loop(self) -> Option<Loop> {
        match self {
            GeneratedPath::Closed(l) => Some(l),
            GeneratedPath::Open(_) => None,
        }
    }

    pub fn as_path(&self) -> &RotationPath {
        match self {
            GeneratedPath::Closed(l) => l.path(),
            GeneratedPath::Open(p) => p,
        }
    }
}

/// Uniformly sampled rotation arc about a fixed axis, from the identity to
/// the rotation by `total_angle`.
pub fn axis_rotation_path(
    axis: Vec3,
    total_angle: f64,
    n: usize,
) -> Result<GeneratedPath, PathError> {
    if n < 2 {
        return Err(PathError::TooFewSamples(n));
    }
    let len = axis.norm();
    if (len - 1.0).abs() > TOL.unit_axis {
        return Err(PathError::NonUnitAxis(len));
    }
    let samples: Vec<UnitQuaternion> = (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            UnitQuaternion::from_axis_angle(axis, t * total_angle)
                .expect("axis already validated")
        })
        .collect();
    let meta = format!("axis-loop(angle={total_angle:.6})");
    let path = RotationPath::new(samples, meta)?;
    let turns = total_angle / TAU;
    if (turns - turns.round()).abs() * TAU <= TOL.closure {
        Ok(GeneratedPath::Closed(Loop::new(
            path,
            RotationMatrix::IDENTITY,
        )?))
    } else {
        Ok(GeneratedPath::Open(path))
    }
}

/// Uniform random rotation: rejection-sample the unit 4-ball, normalize to S³.
pub fn random_rotation_quat(rng: &mut impl Rng) -> UnitQuaternion {
    loop {
        let w = rng.gen_range(-1.0..1.0f64);
        let x = rng.gen_range(-1.0..1.0f64);
        let y = rng.gen_range(-1.0..1.0f64);
        let z = rng.gen_range(-1.0..1.0f64);
        let n2 = w * w + x * x + y * y + z * z;
        if n2 <= 1.0 && n2 > 0.32 {
            return UnitQuaternion::normalized_unchecked(w, x, y, z);
        }
    }
}

/// Deterministic random loop: `k` uniform waypoints joined by geodesics,
/// closed back to the identity basepoint and refined to 0.05 rad.
pub fn random_loop(seed: u64, k: usize) -> Loop {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = vec![UnitQuaternion::IDENTITY];
    for _ in 0..k {
        samples.push(random_rotation_quat(&mut rng));
    }
    samples.push(UnitQuaternion::IDENTITY);
    let path = RotationPath::new(samples, format!("random(seed={seed}, k={k})"))
        .expect("waypoint list has length >= 2");
    let path = path.refine(0.05).expect("positive step");
    Loop::new(path, RotationMatrix::IDENTITY).expect("endpoints are the identity")
}
