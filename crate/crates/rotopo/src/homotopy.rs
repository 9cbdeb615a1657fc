//! Lifting rotation paths to S³, homotopy classification, and explicit
//! contraction of trivial loops.
//!
//! A refined path in SO(3) lifts uniquely to S³ once a starting quaternion is
//! fixed: each successive sign is the one closer to its predecessor. For a
//! loop, the lift ends at ± its starting point, and that sign is the loop's
//! class in π₁(SO(3)) ≅ Z/2.
//!
//! Contraction of a trivial loop works on the closed lifted curve in S³:
//! stereographically project from a pole kept clear of the curve, shrink the
//! image along straight lines onto the image of the starting point, and map
//! each stage back. Straight-line shrinking in the projected space is chosen
//! over geodesic interpolation toward the basepoint, which degenerates
//! whenever the loop passes through the basepoint's antipode.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::path::{HomotopyClass, Loop, RotationPath};
use crate::rotation::{rotation_distance, UnitQuaternion};
use crate::tol::Tolerances;

const TOL: Tolerances = Tolerances::DEFAULT;

#[derive(Debug, Error)]
pub enum HomotopyError {
    #[error("path step {step:.3} rad at index {index} is too coarse for lifting (max {max})")]
    RefinementRequired { step: f64, index: usize, max: f64 },
    #[error("initial quaternion does not project to the path's first rotation (off by {0:.3e})")]
    InitialMismatch(f64),
    #[error("lift endpoint matches neither ±initial (chords {to_plus:.3e} / {to_minus:.3e}); refine and retry")]
    NumericalDrift { to_plus: f64, to_minus: f64 },
    #[error("loop is not null-homotopic; only class +1 loops can be contracted")]
    NotNullHomotopic,
    #[error("no stereographic pole found clear of the lifted loop after {attempts} attempts")]
    PoleSearchFailed { attempts: usize },
    #[error("grid construction did not converge to step bound {0}")]
    GridConstructionFailed(f64),
    #[error(transparent)]
    Path(#[from] crate::path::PathError),
}

/// A path in S³ whose samples project to a given rotation path, with signs
/// resolved by continuity.
#[derive(Clone, Debug)]
pub struct LiftedPath {
    samples: Vec<UnitQuaternion>,
}

impl LiftedPath {
    pub fn samples(&self) -> &[UnitQuaternion] {
        &self.samples
    }

    pub fn endpoint(&self) -> UnitQuaternion {
        *self.samples.last().expect("lifts are non-empty")
    }
}

/// Continuity lift of `p` starting at `initial`. Each sample is `±p_i`, the
/// sign minimizing the quaternion chord to its predecessor; unique provided
/// every step is below 1 rad.
pub fn lift(p: &RotationPath, initial: UnitQuaternion) -> Result<LiftedPath, HomotopyError> {
    for (index, w) in p.samples().windows(2).enumerate() {
        let step = w[0].rotation_angle_to(w[1]);
        if step >= TOL.lift_max_step {
            return Err(HomotopyError::RefinementRequired {
                step,
                index,
                max: TOL.lift_max_step,
            });
        }
    }
    let first = p.first();
    let mismatch = initial.chord(first).min(initial.chord(-first));
    if mismatch > 1e-7 {
        return Err(HomotopyError::InitialMismatch(mismatch));
    }
    let mut samples = Vec::with_capacity(p.len());
    samples.push(initial);
    let mut prev = initial;
    for q in &p.samples()[1..] {
        let aligned = if prev.dot(*q) >= 0.0 { *q } else { -*q };
        samples.push(aligned);
        prev = aligned;
    }
    Ok(LiftedPath { samples })
}

/// The Z/2 invariant: lift from the canonical basepoint quaternion and read
/// the endpoint sign.
pub fn classify(l: &Loop) -> Result<HomotopyClass, HomotopyError> {
    classify_with(l, TOL.class_chord)
}

pub fn classify_with(l: &Loop, class_chord: f64) -> Result<HomotopyClass, HomotopyError> {
    let initial = l.basepoint().to_quaternion();
    let lifted = lift(l.path(), initial)?;
    let end = lifted.endpoint();
    let to_plus = end.chord(initial);
    let to_minus = end.chord(-initial);
    if to_plus <= class_chord {
        Ok(HomotopyClass::Trivial)
    } else if to_minus <= class_chord {
        Ok(HomotopyClass::NonTrivial)
    } else {
        Err(HomotopyError::NumericalDrift { to_plus, to_minus })
    }
}

/// A discrete homotopy: row 0 is the input loop, the last row the constant
/// loop at the basepoint, and every row and column is a fine path.
#[derive(Clone, Debug)]
pub struct HomotopyGrid {
    rows: Vec<Vec<UnitQuaternion>>,
    pub meta: GridMeta,
}

#[derive(Clone, Debug, Default)]
pub struct GridMeta {
    pub seed: u64,
    pub pole_attempts_used: usize,
    pub description: String,
}

impl HomotopyGrid {
    pub fn from_rows(rows: Vec<Vec<UnitQuaternion>>, meta: GridMeta) -> Self {
        assert!(!rows.is_empty() && !rows[0].is_empty());
        assert!(rows.iter().all(|r| r.len() == rows[0].len()), "ragged grid");
        HomotopyGrid { rows, meta }
    }

    /// Number of deformation stages (rows), S + 1.
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Samples per row, T + 1.
    pub fn n_cols(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<UnitQuaternion>] {
        &self.rows
    }

    pub fn get(&self, s: usize, t: usize) -> UnitQuaternion {
        self.rows[s][t]
    }

    /// Largest rotation step along rows and along columns.
    pub fn max_steps(&self) -> (f64, f64) {
        let mut row_worst: f64 = 0.0;
        let mut col_worst: f64 = 0.0;
        for r in &self.rows {
            for w in r.windows(2) {
                row_worst = row_worst.max(w[0].rotation_angle_to(w[1]));
            }
        }
        for s in 1..self.rows.len() {
            for t in 0..self.rows[s].len() {
                col_worst = col_worst.max(self.rows[s - 1][t].rotation_angle_to(self.rows[s][t]));
            }
        }
        (row_worst, col_worst)
    }
}

/// Knobs for the contraction algorithm; `Default` matches the crate-wide
/// tolerance record with seed 0.
#[derive(Clone, Copy, Debug)]
pub struct ContractOptions {
    pub seed: u64,
    pub grid_eps: f64,
    pub pole_clearance: f64,
    pub pole_attempts: usize,
    pub refine_step: f64,
}

impl Default for ContractOptions {
    fn default() -> Self {
        ContractOptions {
            seed: 0,
            grid_eps: TOL.grid_eps,
            pole_clearance: TOL.pole_clearance,
            pole_attempts: TOL.pole_attempts,
            refine_step: TOL.contract_refine,
        }
    }
}

type Vec4 = [f64; 4];

fn dot4(a: Vec4, b: Vec4) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn quat_as_vec4(q: UnitQuaternion) -> Vec4 {
    [q.w, q.x, q.y, q.z]
}

/// Orthonormal basis of the hyperplane orthogonal to `pole`.
fn orthonormal_complement(pole: Vec4) -> [Vec4; 3] {
    // drop the coordinate axis most parallel to the pole, orthonormalize the rest
    let mut axes: Vec<Vec4> = vec![
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ];
    let drop = (0..4)
        .max_by(|&i, &j| pole[i].abs().partial_cmp(&pole[j].abs()).unwrap())
        .unwrap();
    axes.remove(drop);

    let mut basis: Vec<Vec4> = Vec::with_capacity(3);
    for mut a in axes {
        let p = dot4(a, pole);
        for k in 0..4 {
            a[k] -= p * pole[k];
        }
        for b in &basis {
            let p = dot4(a, *b);
            for k in 0..4 {
                a[k] -= p * b[k];
            }
        }
        let n = dot4(a, a).sqrt();
        for ak in &mut a {
            *ak /= n;
        }
        basis.push(a);
    }
    [basis[0], basis[1], basis[2]]
}

struct Stereographic {
    pole: Vec4,
    basis: [Vec4; 3],
}

impl Stereographic {
    fn new(pole: UnitQuaternion) -> Self {
        let pole = quat_as_vec4(pole);
        Stereographic {
            basis: orthonormal_complement(pole),
            pole,
        }
    }

    fn project(&self, q: UnitQuaternion) -> [f64; 3] {
        let v = quat_as_vec4(q);
        let u0 = dot4(v, self.pole);
        let denom = 1.0 - u0;
        [
            dot4(v, self.basis[0]) / denom,
            dot4(v, self.basis[1]) / denom,
            dot4(v, self.basis[2]) / denom,
        ]
    }

    fn unproject(&self, x: [f64; 3]) -> UnitQuaternion {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        let scale = 2.0 / (r2 + 1.0);
        let u0 = (r2 - 1.0) / (r2 + 1.0);
        let mut v = [0.0f64; 4];
        for (k, vk) in v.iter_mut().enumerate() {
            *vk = u0 * self.pole[k]
                + scale * (x[0] * self.basis[0][k] + x[1] * self.basis[1][k] + x[2] * self.basis[2][k]);
        }
        UnitQuaternion::normalized_unchecked(v[0], v[1], v[2], v[3])
    }
}

fn lerp3(a: [f64; 3], b: [f64; 3], t: f64) -> [f64; 3] {
    [
        a[0] + (b[0] - a[0]) * t,
        a[1] + (b[1] - a[1]) * t,
        a[2] + (b[2] - a[2]) * t,
    ]
}

/// Contract a null-homotopic loop to its basepoint, returning the full
/// deformation as a grid. Fails with `NotNullHomotopic` on class −1 input.
pub fn contract(l: &Loop, opts: &ContractOptions) -> Result<HomotopyGrid, HomotopyError> {
    if classify(l)? == HomotopyClass::NonTrivial {
        return Err(HomotopyError::NotNullHomotopic);
    }
    let refined = l.refine(opts.refine_step)?;
    let lifted = lift(refined.path(), refined.samples()[0])?;

    // class +1 makes the lift closed up to numerical drift; pin it exactly
    let mut gamma: Vec<UnitQuaternion> = lifted.samples().to_vec();
    let n = gamma.len();
    gamma[n - 1] = gamma[0];

    // find a projection pole clear of the lifted curve
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut pole = None;
    let mut attempts_used = 0;
    for attempt in 1..=opts.pole_attempts {
        let candidate = crate::path::random_rotation_quat(&mut rng);
        let clearance = gamma
            .iter()
            .map(|q| candidate.dot(*q).clamp(-1.0, 1.0).acos())
            .fold(f64::INFINITY, f64::min);
        if clearance >= opts.pole_clearance {
            pole = Some(candidate);
            attempts_used = attempt;
            break;
        }
    }
    let pole = pole.ok_or(HomotopyError::PoleSearchFailed {
        attempts: opts.pole_attempts,
    })?;
    let proj = Stereographic::new(pole);

    let mut xs: Vec<[f64; 3]> = gamma.iter().map(|q| proj.project(*q)).collect();
    let t_last = xs.len() - 1;
    xs[t_last] = xs[0];
    let x0 = xs[0];

    // initial stage count: inverse projection stretches by at most 2 in chord,
    // and rotation angle is at most twice the chord
    let max_reach = xs
        .iter()
        .map(|x| {
            let d = [x[0] - x0[0], x[1] - x0[1], x[2] - x0[2]];
            (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
        })
        .fold(0.0, f64::max);
    let mut stages = ((4.0 * max_reach) / (opts.grid_eps / 2.0)).ceil().max(1.0) as usize;

    for _ in 0..24 {
        let rows: Vec<Vec<UnitQuaternion>> = (0..=stages)
            .map(|s| {
                let t = s as f64 / stages as f64;
                xs.iter().map(|x| proj.unproject(lerp3(*x, x0, t))).collect()
            })
            .collect();
        let grid = HomotopyGrid::from_rows(
            rows,
            GridMeta {
                seed: opts.seed,
                pole_attempts_used: attempts_used,
                description: format!("contract({})", l.path().meta),
            },
        );
        let (row_step, col_step) = grid.max_steps();
        let mut adjusted = false;
        if col_step > opts.grid_eps / 2.0 {
            stages *= 2;
            adjusted = true;
        }
        if row_step > opts.grid_eps {
            // subdivide the projected polyline where any stage's row is coarse
            let mut finer: Vec<[f64; 3]> = Vec::with_capacity(xs.len() * 2);
            for t in 0..xs.len() - 1 {
                finer.push(xs[t]);
                let coarse = grid.rows().iter().any(|row| {
                    row[t].rotation_angle_to(row[t + 1]) > opts.grid_eps
                });
                if coarse {
                    finer.push(lerp3(xs[t], xs[t + 1], 0.5));
                }
            }
            finer.push(xs[xs.len() - 1]);
            xs = finer;
            adjusted = true;
        }
        if !adjusted {
            return Ok(grid);
        }
    }
    Err(HomotopyError::GridConstructionFailed(opts.grid_eps))
}

/// Outcome of checking a grid against the homotopy contract.
#[derive(Clone, Debug)]
pub struct HomotopyReport {
    pub max_row_step: f64,
    pub max_col_step: f64,
    pub final_row_deviation: f64,
    pub pinned_end_deviation: f64,
    pub row0_fidelity: f64,
    pub failures: Vec<String>,
}

impl HomotopyReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for HomotopyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "steps: row {:.4} col {:.4} | final-row dev {:.2e} | pinned-end dev {:.2e} | row-0 fidelity {:.2e}",
            self.max_row_step,
            self.max_col_step,
            self.final_row_deviation,
            self.pinned_end_deviation,
            self.row0_fidelity
        )?;
        if self.pass() {
            write!(f, "PASS")
        } else {
            for msg in &self.failures {
                writeln!(f, "FAIL: {msg}")?;
            }
            Ok(())
        }
    }
}

/// Check that `g` is a valid homotopy from `l` to the constant loop: fine
/// rows and columns, pinned endpoints, constant final row, and row 0 passing
/// through every sample of `l` in order.
pub fn verify_homotopy(g: &HomotopyGrid, l: &Loop) -> HomotopyReport {
    let mut failures = Vec::new();
    let (max_row_step, max_col_step) = g.max_steps();
    if max_row_step > TOL.grid_eps + 1e-12 {
        failures.push(format!("row step {max_row_step:.4} exceeds {}", TOL.grid_eps));
    }
    if max_col_step > TOL.grid_eps + 1e-12 {
        failures.push(format!("column step {max_col_step:.4} exceeds {}", TOL.grid_eps));
    }

    let base = l.basepoint();
    let last_row = &g.rows()[g.n_rows() - 1];
    let final_row_deviation = last_row
        .iter()
        .map(|q| rotation_distance(&q.to_matrix(), base))
        .fold(0.0, f64::max);
    if final_row_deviation > TOL.closure {
        failures.push(format!(
            "final row deviates from basepoint by {final_row_deviation:.3e}"
        ));
    }

    let t_last = g.n_cols() - 1;
    let pinned_end_deviation = g
        .rows()
        .iter()
        .flat_map(|r| [r[0], r[t_last]])
        .map(|q| rotation_distance(&q.to_matrix(), base))
        .fold(0.0, f64::max);
    if pinned_end_deviation > TOL.closure {
        failures.push(format!(
            "pinned endpoint columns deviate by {pinned_end_deviation:.3e}"
        ));
    }

    // row 0 must pass through every loop sample, in order; take the first
    // match past the cursor (not the argmin: a loop may revisit rotations,
    // and a tie on a later visit would stall the scan)
    let row0 = &g.rows()[0];
    let mut cursor = 0usize;
    let mut row0_fidelity: f64 = 0.0;
    for (i, sample) in l.samples().iter().enumerate() {
        let mut matched = None;
        let mut closest = f64::INFINITY;
        for (t, q) in row0.iter().enumerate().skip(cursor) {
            let d = sample.rotation_angle_to(*q);
            closest = closest.min(d);
            if d <= 1e-6 {
                matched = Some((t, d));
                break;
            }
        }
        match matched {
            Some((t, d)) => {
                row0_fidelity = row0_fidelity.max(d);
                cursor = t;
            }
            None => {
                failures.push(format!(
                    "loop sample {i} missing from row 0 (closest {closest:.3e})"
                ));
                break;
            }
        }
    }

    HomotopyReport {
        max_row_step,
        max_col_step,
        final_row_deviation,
        pinned_end_deviation,
        row0_fidelity,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::{axis_rotation_path, random_loop};
    use crate::rotation::{RotationMatrix, Vec3};
    use std::f64::consts::PI;

    const TAU: f64 = 2.0 * PI;

    fn full_turn(axis: Vec3, turns: f64, n: usize) -> Loop {
        axis_rotation_path(axis, turns * TAU, n)
            .unwrap()
            .into_loop()
            .unwrap()
    }

    #[test]
    fn constant_path_lifts_constantly() {
        let l = Loop::constant(RotationMatrix::IDENTITY, 6).unwrap();
        let lifted = lift(l.path(), UnitQuaternion::IDENTITY).unwrap();
        for q in lifted.samples() {
            assert!(q.chord(UnitQuaternion::IDENTITY) < 1e-15);
        }
    }

    #[test]
    fn full_turn_lift_ends_at_minus_one() {
        let l = full_turn(Vec3::EZ, 1.0, 100);
        let lifted = lift(l.path(), UnitQuaternion::IDENTITY).unwrap();
        assert!(lifted.endpoint().chord(-UnitQuaternion::IDENTITY) < 1e-9);
    }

    #[test]
    fn double_turn_lift_ends_at_plus_one() {
        let l = full_turn(Vec3::EZ, 2.0, 200);
        let lifted = lift(l.path(), UnitQuaternion::IDENTITY).unwrap();
        assert!(lifted.endpoint().chord(UnitQuaternion::IDENTITY) < 1e-9);
    }

    #[test]
    fn coarse_paths_rejected() {
        let l = full_turn(Vec3::EZ, 1.0, 4);
        assert!(matches!(
            lift(l.path(), UnitQuaternion::IDENTITY),
            Err(HomotopyError::RefinementRequired { .. })
        ));
    }

    #[test]
    fn mismatched_initial_rejected() {
        let l = full_turn(Vec3::EZ, 1.0, 100);
        let wrong = UnitQuaternion::from_axis_angle(Vec3::EX, 1.0).unwrap();
        assert!(matches!(
            lift(l.path(), wrong),
            Err(HomotopyError::InitialMismatch(_))
        ));
    }

    #[test]
    fn negated_initial_negates_the_lift_but_not_the_class() {
        let l = random_loop(5, 3);
        let initial = l.basepoint().to_quaternion();
        let a = lift(l.path(), initial).unwrap();
        let b = lift(l.path(), -initial).unwrap();
        for (x, y) in a.samples().iter().zip(b.samples()) {
            assert!(x.chord(-*y) < 1e-15);
        }
        assert_eq!(classify(&l).unwrap(), classify(&l).unwrap());
    }

    #[test]
    fn classify_canonical_examples() {
        let c = Loop::constant(RotationMatrix::IDENTITY, 4).unwrap();
        assert_eq!(classify(&c).unwrap(), HomotopyClass::Trivial);
        assert_eq!(
            classify(&full_turn(Vec3::EY, 1.0, 150)).unwrap(),
            HomotopyClass::NonTrivial
        );
        assert_eq!(
            classify(&full_turn(Vec3::EY, 2.0, 300)).unwrap(),
            HomotopyClass::Trivial
        );
    }

    #[test]
    fn concat_of_two_nontrivial_loops_is_trivial() {
        let a = full_turn(Vec3::EX, 1.0, 150);
        let b = full_turn(Vec3::EY, 1.0, 150);
        assert_eq!(classify(&a.concat(&b).unwrap()).unwrap(), HomotopyClass::Trivial);
    }

    #[test]
    fn contract_rejects_nontrivial_loops() {
        let l = full_turn(Vec3::EZ, 1.0, 200);
        assert!(matches!(
            contract(&l, &ContractOptions::default()),
            Err(HomotopyError::NotNullHomotopic)
        ));
    }

    #[test]
    fn contract_constant_loop() {
        let l = Loop::constant(RotationMatrix::IDENTITY, 4).unwrap();
        let g = contract(&l, &ContractOptions::default()).unwrap();
        let report = verify_homotopy(&g, &l);
        assert!(report.pass(), "{report}");
        for row in g.rows() {
            for q in row {
                assert!(q.rotation_angle_to(UnitQuaternion::IDENTITY) < 1e-9);
            }
        }
    }

    #[test]
    fn contract_doubled_full_turn() {
        let l = full_turn(Vec3::EZ, 1.0, 200).doubled();
        let g = contract(&l, &ContractOptions::default()).unwrap();
        let report = verify_homotopy(&g, &l);
        assert!(report.pass(), "{report}");
    }

    #[test]
    fn contract_random_trivial_loops() {
        let mut done = 0;
        let mut seed = 0u64;
        while done < 10 {
            let l = random_loop(seed, 3);
            seed += 1;
            let l = match classify(&l).unwrap() {
                HomotopyClass::Trivial => l,
                HomotopyClass::NonTrivial => l.doubled(),
            };
            let g = contract(&l, &ContractOptions::default()).unwrap();
            let report = verify_homotopy(&g, &l);
            assert!(report.pass(), "seed {seed}: {report}");
            done += 1;
        }
    }

    // Adversarial mutation: swapping a row for an unrelated loop must break
    // the column step bound.
    #[test]
    fn verify_rejects_mutated_grids() {
        let l = full_turn(Vec3::EZ, 1.0, 200).doubled();
        let g = contract(&l, &ContractOptions::default()).unwrap();
        let mut rows = g.rows().to_vec();
        let bad = full_turn(Vec3::EX, 1.0, rows[0].len() + 1); // wrong class entirely
        let mid = rows.len() / 2;
        rows[mid] = bad.samples()[..rows[0].len()].to_vec();
        let mutated = HomotopyGrid::from_rows(rows, GridMeta::default());
        let report = verify_homotopy(&mutated, &l);
        assert!(!report.pass());
    }
}
