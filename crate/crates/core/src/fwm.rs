//! Four-wave-mixing phase matching for counter-propagating excitation.
//!
//! With `|k_i| = |k_a|` and `|k_s| = |k_b|`, the condition `dk = 0` reduces to
//!
//! ```text
//! r (cos ta - cos ti) = cos tb - cos ts
//! r (sin ta + sin ti) = sin tb + sin ts
//! ```
//!
//! where `r = lambda_b / lambda_a` and all angles are measured from the long
//! axis of the ensemble.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAX_ITER: usize = 100;
const RESIDUAL_TOL: f64 = 1e-12;

/// Excitation geometry. Angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FwmGeometry {
    pub theta_a: f64,
    pub theta_b: f64,
    /// Wavelength ratio `lambda_b / lambda_a`.
    pub ratio: f64,
}

impl FwmGeometry {
    pub fn new(theta_a: f64, theta_b: f64, ratio: f64) -> Self {
        Self {
            theta_a,
            theta_b,
            ratio,
        }
    }

    pub fn from_degrees(theta_a: f64, theta_b: f64, ratio: f64) -> Self {
        Self::new(theta_a.to_radians(), theta_b.to_radians(), ratio)
    }

    pub fn validate(&self) -> Result<()> {
        let half_pi = std::f64::consts::FRAC_PI_2;
        for (name, v) in [("theta_a", self.theta_a), ("theta_b", self.theta_b)] {
            if !(v.is_finite() && v.abs() < half_pi) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must lie in (-pi/2, pi/2), got {v}"),
                });
            }
        }
        if !(self.ratio.is_finite() && self.ratio > 0.0) {
            return Err(Error::InvalidParameter {
                name: "ratio",
                reason: format!("must be positive, got {}", self.ratio),
            });
        }
        Ok(())
    }
}

/// Emission angles in radians, with the residual they leave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FwmSolution {
    pub theta_i: f64,
    pub theta_s: f64,
    pub residual: [f64; 2],
    pub iterations: usize,
}

/// Residuals of the two phase matching equations at a candidate
/// `(theta_i, theta_s)`.
pub fn residual(geom: &FwmGeometry, theta_i: f64, theta_s: f64) -> [f64; 2] {
    let r = geom.ratio;
    [
        r * (geom.theta_a.cos() - theta_i.cos()) - (geom.theta_b.cos() - theta_s.cos()),
        r * (geom.theta_a.sin() + theta_i.sin()) - (geom.theta_b.sin() + theta_s.sin()),
    ]
}

fn inf_norm(r: [f64; 2]) -> f64 {
    r[0].abs().max(r[1].abs())
}

/// Newton iteration on [`residual`], started from `guess` or from the
/// excitation angles `(theta_a, theta_b)`.
pub fn solve_angles(geom: &FwmGeometry, guess: Option<(f64, f64)>) -> Result<FwmSolution> {
    geom.validate()?;
    let (mut ti, mut ts) = guess.unwrap_or((geom.theta_a, geom.theta_b));
    let r = geom.ratio;

    for iter in 0..=MAX_ITER {
        let res = residual(geom, ti, ts);
        let norm = inf_norm(res);
        if norm <= RESIDUAL_TOL {
            return Ok(FwmSolution {
                theta_i: ti,
                theta_s: ts,
                residual: res,
                iterations: iter,
            });
        }
        if iter == MAX_ITER || !norm.is_finite() {
            return Err(Error::Solver {
                reason: "did not converge",
                iterations: iter,
                theta_i: ti,
                theta_s: ts,
                residual: norm,
            });
        }
        // d(r1, r2) / d(ti, ts)
        let j11 = r * ti.sin();
        let j12 = -ts.sin();
        let j21 = r * ti.cos();
        let j22 = -ts.cos();
        let det = j11 * j22 - j12 * j21;
        if det.abs() < 1e-14 {
            return Err(Error::Solver {
                reason: "hit a singular Jacobian",
                iterations: iter,
                theta_i: ti,
                theta_s: ts,
                residual: norm,
            });
        }
        ti -= (j22 * res[0] - j12 * res[1]) / det;
        ts -= (-j21 * res[0] + j11 * res[1]) / det;
    }
    unreachable!("loop returns on its last iteration")
}

/// Leading-order small-angle solution for `theta_b = 2 theta_a`:
/// `theta_s ~ theta_b` and `theta_i ~ theta_s / 2`. Returns
/// `(theta_i, theta_s)`; only meaningful for angles well below one radian.
pub fn small_angle_approx(geom: &FwmGeometry) -> (f64, f64) {
    let theta_s = geom.theta_b;
    (theta_s / 2.0, theta_s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn residual_vanishes_in_degenerate_case() {
        let g = FwmGeometry::new(0.3, 0.3, 1.0);
        assert_eq!(residual(&g, 0.3, 0.3), [0.0, 0.0]);
    }

    #[test]
    fn rounded_published_angles_nearly_solve() {
        for (a, b, i, s) in [(5.0, 10.0, 4.9, 9.9), (4.0, 10.0, 7.9, 13.9)] {
            let g = FwmGeometry::from_degrees(a, b, 2.0);
            let r = residual(&g, f64::to_radians(i), f64::to_radians(s));
            assert!(inf_norm(r) < 5e-3, "{r:?}");
        }
    }

    #[test]
    fn solves_published_geometries() {
        for (a, b, i, s) in [(5.0, 10.0, 4.9, 9.9), (4.0, 10.0, 7.9, 13.9)] {
            let g = FwmGeometry::from_degrees(a, b, 2.0);
            let sol = solve_angles(&g, None).unwrap();
            assert!((sol.theta_i.to_degrees() - i).abs() <= 0.1);
            assert!((sol.theta_s.to_degrees() - s).abs() <= 0.1);
            assert!(inf_norm(sol.residual) <= 1e-12);
        }
    }

    #[test]
    fn degenerate_fixed_point() {
        let g = FwmGeometry::from_degrees(7.0, 7.0, 1.0);
        let sol = solve_angles(&g, None).unwrap();
        assert_eq!(sol.iterations, 0);
        assert_eq!((sol.theta_i, sol.theta_s), (g.theta_a, g.theta_b));
    }

    #[test]
    fn small_angle_matches_newton() {
        let g = FwmGeometry::new(0.01, 0.02, 2.0);
        let (ai, as_) = small_angle_approx(&g);
        assert_relative_eq!(ai, 0.01);
        assert_relative_eq!(as_, 0.02);
        let sol = solve_angles(&g, None).unwrap();
        assert!((ai - sol.theta_i).abs() / sol.theta_i < 0.05);
        assert!((as_ - sol.theta_s).abs() / sol.theta_s < 0.05);

        let g = FwmGeometry::from_degrees(5.0, 10.0, 2.0);
        let (ai, as_) = small_angle_approx(&g);
        let sol = solve_angles(&g, None).unwrap();
        assert!((ai - sol.theta_i).abs().to_degrees() < 0.2);
        assert!((as_ - sol.theta_s).abs().to_degrees() < 0.2);
    }

    #[test]
    fn rejects_bad_geometry() {
        assert!(solve_angles(&FwmGeometry::new(2.0, 0.1, 2.0), None).is_err());
        assert!(solve_angles(&FwmGeometry::new(0.1, 0.1, 0.0), None).is_err());
    }

    #[test]
    fn singular_start_is_reported() {
        // theta_i = theta_s makes the Jacobian singular
        let g = FwmGeometry::new(0.1, 0.2, 2.0);
        let err = solve_angles(&g, Some((0.3, 0.3))).unwrap_err();
        assert!(matches!(err, Error::Solver { .. }));
    }
}
