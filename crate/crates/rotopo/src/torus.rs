//! The solid-torus chart of SO(3).
//!
//! A rotation is decomposed as: slide the z-axis to its image Z along the
//! shortest meridian (carrying the x- and y-axes by parallel transport),
//! then rotate by a fiber angle φ about Z. The slide is realized by the
//! single rotation about e_z × Z, whose axis is normal to the plane of the
//! geodesic; that this equals small-step parallel transport is checked
//! numerically by the tests, not assumed.
//!
//! Positions of Z on the punctured sphere (south pole removed) flatten to
//! the open unit disk by the equidistant azimuthal projection, so the chart
//! covers the interior of a solid torus. On the boundary (Z at the south
//! pole) the chart degenerates: different meridians yield frames differing
//! by twice the meridian longitude. The resulting identification is exposed
//! through [`boundary_limit_rotation`] and [`boundary_identified`]; its
//! global sign is measured once at startup, not asserted.

use std::f64::consts::PI;

use once_cell::sync::Lazy;
use thiserror::Error;

use crate::rotation::{RotationMatrix, UnitQuaternion, Vec3};
use crate::tol::Tolerances;

const TOL: Tolerances = Tolerances::DEFAULT;
const TAU: f64 = 2.0 * PI;

#[derive(Debug, Error)]
pub enum TorusError {
    #[error("Z-axis at or near the south pole (Z·e_z = {0}); the torus chart is singular there")]
    SouthPoleSingular(f64),
    #[error("invalid chart coordinates: {0}")]
    InvalidCoordinates(String),
    #[error("boundary limit did not stabilize (residual {0:.3e})")]
    BoundaryLimitUnstable(f64),
}

/// Chart coordinates of a rotation: direction Z of the rotated z-axis in
/// spherical angles (λ, α), plus the fiber angle φ about Z.
#[derive(Clone, Copy, Debug)]
pub struct TorusChartPoint {
    /// Direction of the rotated z-axis, ‖Z‖ = 1.
    pub z_axis: Vec3,
    /// Longitude in [0, 2π), measured from the x-axis meridian.
    pub lambda: f64,
    /// Polar angle from the north pole, in [0, π).
    pub alpha: f64,
    /// Fiber angle in [0, 2π), right-handed about Z.
    pub phi: f64,
}

impl TorusChartPoint {
    pub fn from_angles(lambda: f64, alpha: f64, phi: f64) -> Result<Self, TorusError> {
        if !(0.0..PI).contains(&alpha) {
            return Err(TorusError::InvalidCoordinates(format!(
                "alpha {alpha} outside [0, pi)"
            )));
        }
        // longitude is undefined at the north pole
        let lambda = if alpha < 1e-12 {
            0.0
        } else {
            lambda.rem_euclid(TAU)
        };
        let phi = phi.rem_euclid(TAU);
        let z_axis = Vec3::new(
            alpha.sin() * lambda.cos(),
            alpha.sin() * lambda.sin(),
            alpha.cos(),
        );
        Ok(TorusChartPoint {
            z_axis,
            lambda,
            alpha,
            phi,
        })
    }
}

/// Coordinates in the open solid torus: disk position of Z and fiber angle.
#[derive(Clone, Copy, Debug)]
pub struct SolidTorusCoord {
    /// Equidistant azimuthal image of Z, ‖disk‖ < 1 strictly.
    pub disk: [f64; 2],
    pub phi: f64,
}

/// The rotation sliding e_z to Z along the shortest meridian with parallel
/// transport of the tangent frame: rotation about (e_z × Z)/‖e_z × Z‖ by
/// α = arccos(e_z · Z).
pub fn slide_rotation(z_axis: Vec3) -> Result<RotationMatrix, TorusError> {
    let c = z_axis.z.clamp(-1.0, 1.0);
    if c <= -1.0 + TOL.south_pole_cos {
        return Err(TorusError::SouthPoleSingular(c));
    }
    let axis = Vec3::EZ.cross(z_axis);
    let n = axis.norm();
    if n < 1e-12 {
        return Ok(RotationMatrix::IDENTITY);
    }
    let alpha = c.acos();
    RotationMatrix::from_axis_angle(axis.normalized(), alpha)
        .map_err(|e| TorusError::InvalidCoordinates(e.to_string()))
}

/// Decompose a rotation into torus-chart coordinates: R = A(Z, φ)·S(Z).
pub fn chart_forward(r: &RotationMatrix) -> Result<TorusChartPoint, TorusError> {
    let z_axis = r.apply(Vec3::EZ);
    let c = z_axis.z.clamp(-1.0, 1.0);
    let alpha = c.acos();
    if c <= -1.0 + TOL.south_pole_cos || alpha > PI - TOL.south_pole_alpha {
        return Err(TorusError::SouthPoleSingular(c));
    }
    let slide = slide_rotation(z_axis)?;
    // residual rotation about Z once the slide is removed
    let about_z = *r * slide.transpose();

    // measure the signed fiber angle in a frame adapted to Z
    let u = if z_axis.x.abs() < 0.9 {
        let proj = z_axis.scaled(Vec3::EX.dot(z_axis));
        (Vec3::EX - proj).normalized()
    } else {
        let proj = z_axis.scaled(Vec3::EY.dot(z_axis));
        (Vec3::EY - proj).normalized()
    };
    let v = z_axis.cross(u);
    let image = about_z.apply(u);
    let phi = image.dot(v).atan2(image.dot(u)).rem_euclid(TAU);

    let lambda = if alpha < 1e-12 {
        0.0
    } else {
        z_axis.y.atan2(z_axis.x).rem_euclid(TAU)
    };
    Ok(TorusChartPoint {
        z_axis,
        lambda,
        alpha,
        phi,
    })
}

/// Rebuild the rotation from chart coordinates: A(Z, φ)·S(Z).
pub fn chart_inverse(c: &TorusChartPoint) -> RotationMatrix {
    let slide = slide_rotation(c.z_axis)
        .expect("TorusChartPoint invariant keeps alpha < pi");
    let about_z = RotationMatrix::from_axis_angle(c.z_axis.normalized(), c.phi)
        .expect("normalized axis");
    about_z * slide
}

/// Flatten chart coordinates into the open solid torus via the equidistant
/// azimuthal projection of the punctured sphere.
pub fn to_solid_torus(c: &TorusChartPoint) -> SolidTorusCoord {
    let r = c.alpha / PI;
    SolidTorusCoord {
        disk: [r * c.lambda.cos(), r * c.lambda.sin()],
        phi: c.phi,
    }
}

fn boundary_sample(lambda: f64, phi: f64, eps: f64) -> RotationMatrix {
    let alpha = PI - eps;
    let z_axis = Vec3::new(
        alpha.sin() * lambda.cos(),
        alpha.sin() * lambda.sin(),
        alpha.cos(),
    );
    // slide axis along meridian lambda; constructed directly so no precision
    // is lost to arccos near alpha = pi
    let axis = Vec3::new(-lambda.sin(), lambda.cos(), 0.0);
    let slide = RotationMatrix::from_axis_angle(axis, alpha).expect("unit axis");
    let about_z = RotationMatrix::from_axis_angle(z_axis.normalized(), phi).expect("unit axis");
    about_z * slide
}

/// Richardson extrapolation of boundary_sample in eps: error drops from
/// O(eps) to O(eps²).
fn extrapolated_limit(lambda: f64, phi: f64, eps: f64) -> RotationMatrix {
    let r1 = boundary_sample(lambda, phi, eps);
    let r2 = boundary_sample(lambda, phi, 2.0 * eps);
    let mut m = [[0.0; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = 2.0 * r1.entry(i, j) - r2.entry(i, j);
        }
    }
    // re-project onto SO(3); the defect is O(eps²)
    RotationMatrix::from_rows_unchecked(m).to_quaternion().to_matrix()
}

/// Limit of the chart inverse along meridian `lambda` as α → π, with fiber
/// angle `phi`. Evaluated near the boundary and extrapolated; fails if two
/// extrapolation scales disagree beyond the configured stability bound.
pub fn boundary_limit_rotation(lambda: f64, phi: f64) -> Result<RotationMatrix, TorusError> {
    let eps = TOL.boundary_eps;
    let fine = extrapolated_limit(lambda, phi, eps);
    let coarse = extrapolated_limit(lambda, phi, 10.0 * eps);
    let residual = fine.max_entry_diff(&coarse);
    if residual > TOL.boundary_stability {
        return Err(TorusError::BoundaryLimitUnstable(residual));
    }
    Ok(fine)
}

/// True iff the two boundary coordinates name the same rotation.
pub fn boundary_identified(p1: (f64, f64), p2: (f64, f64)) -> Result<bool, TorusError> {
    let a = boundary_limit_rotation(p1.0, p1.1)?;
    let b = boundary_limit_rotation(p2.0, p2.1)?;
    Ok(a.max_entry_diff(&b) <= TOL.boundary_match)
}

/// The measured orientation sign s of the boundary identification: boundary
/// points (λ, φ) and (0, φ + 2sλ) name the same rotation. Determined
/// numerically once, by testing which sign matches at λ = π/4.
pub static IDENTIFICATION_SIGN: Lazy<f64> = Lazy::new(|| {
    let probe = boundary_limit_rotation(PI / 4.0, 0.0).expect("stable boundary limit");
    let plus = boundary_limit_rotation(0.0, PI / 2.0).expect("stable boundary limit");
    let minus = boundary_limit_rotation(0.0, 3.0 * PI / 2.0).expect("stable boundary limit");
    let d_plus = probe.max_entry_diff(&plus);
    let d_minus = probe.max_entry_diff(&minus);
    if d_plus <= TOL.boundary_match {
        1.0
    } else if d_minus <= TOL.boundary_match {
        -1.0
    } else {
        panic!(
            "identification sign undetermined (residuals {d_plus:.3e} / {d_minus:.3e})"
        );
    }
});

/// Convenience: random rotation whose chart stays away from the south pole.
pub fn random_in_domain_rotation(rng: &mut impl rand::Rng, alpha_margin: f64) -> RotationMatrix {
    loop {
        let q = loop {
            let w = rng.gen_range(-1.0..1.0f64);
            let x = rng.gen_range(-1.0..1.0f64);
            let y = rng.gen_range(-1.0..1.0f64);
            let z = rng.gen_range(-1.0..1.0f64);
            if let Ok(q) = UnitQuaternion::new(w, x, y, z) {
                break q;
            }
        };
        let r = q.to_matrix();
        let c = r.apply(Vec3::EZ).z.clamp(-1.0, 1.0);
        if c.acos() <= PI - alpha_margin {
            return r;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rotation::rotation_distance;
    use rand::Rng;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn slide_of_north_pole_is_identity() {
        let s = slide_rotation(Vec3::EZ).unwrap();
        assert!(s.max_entry_diff(&RotationMatrix::IDENTITY) < 1e-15);
    }

    #[test]
    fn slide_to_equator_is_quarter_turn_about_ey() {
        let s = slide_rotation(Vec3::EX).unwrap();
        let expected = RotationMatrix::from_axis_angle(Vec3::EY, FRAC_PI_2).unwrap();
        assert!(s.max_entry_diff(&expected) < 1e-12);
    }

    #[test]
    fn slide_near_south_pole_errors() {
        let r = slide_rotation(Vec3::new(0.0, 0.0, -1.0));
        assert!(matches!(r, Err(TorusError::SouthPoleSingular(_))));
    }

    // Oracle: parallel transport in small steps along the meridian must agree
    // with the single slide rotation, and keep a constant angle to the
    // meridian tangent at every waypoint.
    #[test]
    fn slide_matches_small_step_parallel_transport() {
        let mut rng = rand::thread_rng();
        for _ in 0..20 {
            let lambda: f64 = rng.gen_range(0.0..TAU);
            let alpha: f64 = rng.gen_range(0.1..PI - 0.1);
            let point = |a: f64| {
                Vec3::new(a.sin() * lambda.cos(), a.sin() * lambda.sin(), a.cos())
            };
            let tangent = |a: f64| {
                Vec3::new(a.cos() * lambda.cos(), a.cos() * lambda.sin(), -a.sin())
            };
            let n = 2000;
            let mut transported = Vec3::EX;
            let angle0 = Vec3::EX.dot(tangent(0.0)).clamp(-1.0, 1.0).acos();
            for k in 0..n {
                let a0 = alpha * k as f64 / n as f64;
                let a1 = alpha * (k + 1) as f64 / n as f64;
                let (z0, z1) = (point(a0), point(a1));
                let axis = z0.cross(z1).normalized();
                let step = z0.dot(z1).clamp(-1.0, 1.0).acos();
                let rot = RotationMatrix::from_axis_angle(axis, step).unwrap();
                transported = rot.apply(transported);
                let angle = transported.dot(tangent(a1)).clamp(-1.0, 1.0).acos();
                assert!(
                    (angle - angle0).abs() < 1e-6,
                    "transport angle drifted by {}",
                    (angle - angle0).abs()
                );
            }
            let slide = slide_rotation(point(alpha)).unwrap();
            assert!((slide.apply(Vec3::EZ) - point(alpha)).norm() < 1e-9);
            assert!(
                (slide.apply(Vec3::EX) - transported).norm() < 1e-6,
                "slide disagrees with stepwise transport"
            );
        }
    }

    #[test]
    fn chart_forward_identity() {
        let c = chart_forward(&RotationMatrix::IDENTITY).unwrap();
        assert!(c.alpha < 1e-12 && c.lambda == 0.0 && c.phi.min(TAU - c.phi) < 1e-9);
    }

    // Oracle: for R = quarter turn about e_x, Z = -e_y and the slide itself
    // reproduces R, so phi must come out zero.
    #[test]
    fn chart_forward_quarter_turn_about_ex() {
        let r = RotationMatrix::from_axis_angle(Vec3::EX, FRAC_PI_2).unwrap();
        let c = chart_forward(&r).unwrap();
        assert!((c.z_axis - Vec3::new(0.0, -1.0, 0.0)).norm() < 1e-12);
        assert!((c.alpha - FRAC_PI_2).abs() < 1e-12);
        assert!((c.lambda - 3.0 * FRAC_PI_2).abs() < 1e-12);
        let slide = slide_rotation(c.z_axis).unwrap();
        let residual = r * slide.transpose();
        assert!(residual.max_entry_diff(&RotationMatrix::IDENTITY) < 1e-12);
        assert!(c.phi.min(TAU - c.phi) < 1e-9);
    }

    #[test]
    fn chart_forward_pure_z_rotation() {
        for theta in [0.5, 1.0, 2.0, 3.0, 5.0] {
            let r = RotationMatrix::from_axis_angle(Vec3::EZ, theta).unwrap();
            let c = chart_forward(&r).unwrap();
            assert!(c.alpha < 1e-9);
            assert!((c.phi - theta).abs() < 1e-9);
        }
    }

    #[test]
    fn chart_inverse_examples() {
        let c = TorusChartPoint::from_angles(0.0, 0.0, 0.0).unwrap();
        assert!(chart_inverse(&c).max_entry_diff(&RotationMatrix::IDENTITY) < 1e-12);
        let c = TorusChartPoint::from_angles(0.0, 0.0, 1.3).unwrap();
        let expected = RotationMatrix::from_axis_angle(Vec3::EZ, 1.3).unwrap();
        assert!(chart_inverse(&c).max_entry_diff(&expected) < 1e-12);
    }

    #[test]
    fn chart_round_trip_random() {
        let mut rng = rand::thread_rng();
        for _ in 0..1000 {
            let r = random_in_domain_rotation(&mut rng, 0.05);
            let c = chart_forward(&r).unwrap();
            let back = chart_inverse(&c);
            assert!(
                back.max_entry_diff(&r) < 1e-8,
                "round trip off by {}",
                back.max_entry_diff(&r)
            );
            assert!(rotation_distance(&back, &r) < 1e-7);
        }
    }

    #[test]
    fn solid_torus_projection() {
        let c = TorusChartPoint::from_angles(0.0, 0.0, 1.0).unwrap();
        let s = to_solid_torus(&c);
        assert_eq!(s.disk, [0.0, 0.0]);
        assert_eq!(s.phi, 1.0);

        let c = TorusChartPoint::from_angles(0.0, FRAC_PI_2, 0.0).unwrap();
        let s = to_solid_torus(&c);
        assert!((s.disk[0] - 0.5).abs() < 1e-12 && s.disk[1].abs() < 1e-12);

        let c = TorusChartPoint::from_angles(0.3, PI - 1e-9, 0.0).unwrap();
        let s = to_solid_torus(&c);
        let r = (s.disk[0] * s.disk[0] + s.disk[1] * s.disk[1]).sqrt();
        assert!(r < 1.0 && r > 1.0 - 1e-9);
    }

    // Oracle: direct evaluation at two offsets from the boundary.
    #[test]
    fn boundary_limit_along_greenwich_is_flip_about_ey() {
        let l = boundary_limit_rotation(0.0, 0.0).unwrap();
        let expected = RotationMatrix::from_axis_angle(Vec3::EY, PI).unwrap();
        assert!(l.max_entry_diff(&expected) < 1e-8);
        let near1 = boundary_sample(0.0, 0.0, 1e-4);
        let near2 = boundary_sample(0.0, 0.0, 1e-5);
        assert!(near1.max_entry_diff(&near2) < 1e-3);
        assert!(near2.max_entry_diff(&l) < 1e-4);
    }

    #[test]
    fn ninety_degree_meridian_gives_half_turn_offset() {
        let a = boundary_limit_rotation(FRAC_PI_2, 0.0).unwrap();
        let b = boundary_limit_rotation(0.0, PI).unwrap();
        assert!(a.max_entry_diff(&b) < 1e-8);
    }

    #[test]
    fn one_eighty_meridian_gives_full_turn_offset() {
        let a = boundary_limit_rotation(PI, 0.0).unwrap();
        let b = boundary_limit_rotation(0.0, 0.0).unwrap();
        assert!(a.max_entry_diff(&b) < 1e-8);
    }

    #[test]
    fn boundary_identified_examples() {
        assert!(boundary_identified((0.7, 1.1), (0.7, 1.1)).unwrap());
        assert!(boundary_identified((FRAC_PI_2, 0.0), (0.0, PI)).unwrap());
        assert!(!boundary_identified((FRAC_PI_2, 0.0), (0.0, 0.5)).unwrap());
    }

    // Brute-force scan: the identified fiber offset is exactly 2*s*lambda.
    #[test]
    fn winding_law_scan() {
        let s = *IDENTIFICATION_SIGN;
        assert!(s == 1.0 || s == -1.0);
        for i in 0..=12 {
            let lambda = TAU * i as f64 / 12.0;
            for j in 0..4 {
                let phi = TAU * j as f64 / 4.0;
                let a = boundary_limit_rotation(lambda, phi).unwrap();
                let b =
                    boundary_limit_rotation(0.0, (phi + 2.0 * s * lambda).rem_euclid(TAU)).unwrap();
                assert!(
                    a.max_entry_diff(&b) < 1e-7,
                    "winding law failed at lambda={lambda}, phi={phi}"
                );
            }
        }
    }

    // Empirical continuity constant of the chart away from the poles.
    #[test]
    fn chart_is_locally_lipschitz() {
        let mut rng = rand::thread_rng();
        let delta = 1e-4;
        let mut worst: f64 = 0.0;
        for _ in 0..200 {
            let r = random_in_domain_rotation(&mut rng, 0.2);
            let c = chart_forward(&r).unwrap();
            if c.alpha < 0.2 {
                continue;
            }
            let axis = Vec3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            )
            .normalized();
            let perturbed = RotationMatrix::from_axis_angle(axis, delta).unwrap() * r;
            let cp = chart_forward(&perturbed).unwrap();
            let dz = (cp.z_axis - c.z_axis).norm();
            let dphi = (cp.phi - c.phi).rem_euclid(TAU);
            let dphi = dphi.min(TAU - dphi);
            worst = worst.max((dz + dphi) / delta);
        }
        // recorded distortion constant; O(1) away from the poles
        assert!(worst < 20.0, "continuity constant blew up: {worst}");
    }
}
