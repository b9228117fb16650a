//! Schmidt decomposition of biphoton amplitudes.
//!
//! On a uniform grid with spacing `dw` the amplitude becomes the matrix
//! `A = f * dw`. Its singular values `sigma_n` give the Schmidt eigenvalues
//! `lambda_n = sigma_n^2`, and its singular vectors, rescaled by `1/sqrt(dw)`,
//! sample the mode functions so that
//! `f(w, w') = sum_n sqrt(lambda_n) psi_n(w) phi_n(w')`.
//!
//! The one-photon kernels `K1 = A A^H` and `K2 = A^T conj(A)` share the same
//! spectrum; [`kernel_eigenvalues`] diagonalizes them directly and serves as
//! an independent check on [`decompose`].

use ndarray::{s, Array1, Array2, Axis};
use ndarray_linalg::{EigValsh, JobSvd, SVDDCInto, UPLO};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::SpectralParams;
use crate::projector::{project, AmplitudeGrid2D, GridSpec, Provenance};
use crate::route::{Photon, Route};

/// Eigenvalues below this are treated as numerical noise: they are left out
/// of entropy sums and no mode functions are kept for them.
pub const EIGEN_FLOOR: f64 = 1e-12;

/// Largest grid the convergence driver will try.
pub const MAX_POINTS: usize = 4096;

/// Default entropy tolerance (bits) for [`converge_entropy`].
pub const DEFAULT_TOL: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kernel {
    /// Traces out the second photon; acts on the first axis.
    K1,
    /// Traces out the first photon; acts on the second axis.
    K2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceLevel {
    pub n_points: usize,
    pub entropy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub converged: bool,
    /// `|S(2N) - S(N)|` of the last refinement, if one was made.
    pub delta_entropy: Option<f64>,
    pub levels: Vec<ConvergenceLevel>,
}

impl ConvergenceRecord {
    fn single(n_points: usize, entropy: f64) -> Self {
        Self {
            converged: false,
            delta_entropy: None,
            levels: vec![ConvergenceLevel { n_points, entropy }],
        }
    }
}

#[derive(Debug, Clone)]
pub struct SchmidtResult {
    /// All Schmidt eigenvalues, descending, summing to one.
    pub eigenvalues: Vec<f64>,
    /// Entropy of entanglement in bits.
    pub entropy: f64,
    /// Column `n` samples `psi_n` on `axis` (first photon).
    pub modes_psi: Array2<Complex64>,
    /// Column `n` samples `phi_n` on `axis` (second photon).
    pub modes_phi: Array2<Complex64>,
    pub spec: GridSpec,
    pub axis: Vec<f64>,
    pub provenance: Option<Provenance>,
    pub convergence: ConvergenceRecord,
}

impl SchmidtResult {
    /// Number of modes above [`EIGEN_FLOOR`] for which mode functions are kept.
    pub fn retained_modes(&self) -> usize {
        self.modes_psi.ncols()
    }

    /// Cooperativity `1 / sum lambda_n^2`.
    pub fn schmidt_number(&self) -> f64 {
        1.0 / self.eigenvalues.iter().map(|l| l * l).sum::<f64>()
    }

    /// `sum_n sqrt(lambda_n) psi_n(w) phi_n(w')` over the retained modes.
    pub fn reconstruct(&self) -> Array2<Complex64> {
        let m = self.retained_modes();
        let weights = Array1::from_iter(
            self.eigenvalues[..m]
                .iter()
                .map(|l| Complex64::new(l.sqrt(), 0.0)),
        );
        let scaled = &self.modes_psi * &weights.insert_axis(Axis(0));
        scaled.dot(&self.modes_phi.t())
    }
}

fn check_finite(grid: &AmplitudeGrid2D) -> Result<()> {
    if grid.values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

fn norm_sqr(grid: &AmplitudeGrid2D) -> f64 {
    let dw = grid.spacing();
    grid.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * dw * dw
}

/// Rescales the grid to unit norm, `sum |f|^2 dw^2 = 1`.
pub fn normalize(grid: &AmplitudeGrid2D) -> Result<AmplitudeGrid2D> {
    check_finite(grid)?;
    let norm = norm_sqr(grid).sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroGrid);
    }
    if !norm.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(grid.scaled(Complex64::new(1.0 / norm, 0.0)))
}

/// The quadrature-weighted, unit-norm matrix `A = f dw`.
fn weighted_matrix(grid: &AmplitudeGrid2D) -> Result<Array2<Complex64>> {
    let normalized = normalize(grid)?;
    let dw = grid.spacing();
    Ok(normalized.values.mapv(|v| v * dw))
}

/// Schmidt eigenvalues from squared singular values, descending and summing
/// to one.
fn eigenvalues_from_singular(s: &Array1<f64>) -> Vec<f64> {
    let mut lambda: Vec<f64> = s.iter().map(|x| x * x).collect();
    lambda.sort_by(|a, b| b.total_cmp(a));
    let total: f64 = lambda.iter().sum();
    lambda.iter_mut().for_each(|l| *l /= total);
    lambda
}

/// Schmidt eigenvalues only, without mode functions.
pub fn spectrum(grid: &AmplitudeGrid2D) -> Result<Vec<f64>> {
    let a = weighted_matrix(grid)?;
    let (_, s, _) = a.svddc_into(JobSvd::None)?;
    Ok(eigenvalues_from_singular(&s))
}

/// Full Schmidt decomposition of a biphoton grid. The grid is normalized
/// first, so raw amplitudes may be passed.
pub fn decompose(grid: &AmplitudeGrid2D) -> Result<SchmidtResult> {
    let a = weighted_matrix(grid)?;
    let (u, s, vt) = a.svddc_into(JobSvd::Some)?;
    let (u, vt) = match (u, vt) {
        (Some(u), Some(vt)) => (u, vt),
        _ => return Err(Error::Linalg("SVD returned no singular vectors".into())),
    };
    // LAPACK returns singular values in descending order already
    let eigenvalues = eigenvalues_from_singular(&s);
    let entropy = entropy(&eigenvalues)?;

    let kept = eigenvalues
        .iter()
        .take_while(|&&l| l >= EIGEN_FLOOR)
        .count()
        .max(1);
    let inv_sqrt_dw = Complex64::new(1.0 / grid.spacing().sqrt(), 0.0);
    let modes_psi = u.slice(s![.., ..kept]).mapv(|v| v * inv_sqrt_dw);
    let modes_phi = vt.slice(s![..kept, ..]).t().mapv(|v| v * inv_sqrt_dw);

    Ok(SchmidtResult {
        convergence: ConvergenceRecord::single(grid.spec.n_points, entropy),
        eigenvalues,
        entropy,
        modes_psi,
        modes_phi,
        spec: grid.spec.clone(),
        axis: grid.axis.clone(),
        provenance: grid.provenance.clone(),
    })
}

/// Eigenvalues of the discretized one-photon kernel, descending.
pub fn kernel_eigenvalues(grid: &AmplitudeGrid2D, which: Kernel) -> Result<Vec<f64>> {
    let a = weighted_matrix(grid)?;
    let a_conj = a.mapv(|v| v.conj());
    let kernel = match which {
        // K1[j, j'] = sum_k A[j, k] conj(A[j', k])
        Kernel::K1 => a.dot(&a_conj.t()),
        // K2[k, k'] = sum_j A[j, k] conj(A[j, k'])
        Kernel::K2 => a.t().dot(&a_conj),
    };
    let values = kernel.eigvalsh(UPLO::Lower)?;
    let mut values = values.to_vec();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Entropy of entanglement `-sum lambda_n log2 lambda_n` in bits.
///
/// Tiny negative eigenvalues (down to `-1e-12`) are clipped to zero and the
/// spectrum is renormalized; terms below [`EIGEN_FLOOR`] contribute nothing.
pub fn entropy(eigenvalues: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for &l in eigenvalues {
        if !l.is_finite() {
            return Err(Error::NonFinite);
        }
        if l < -1e-12 {
            return Err(Error::NegativeEigenvalue(l));
        }
        total += l.max(0.0);
    }
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::Unnormalized(total));
    }
    let s: f64 = eigenvalues
        .iter()
        .map(|&l| l.max(0.0) / total)
        .filter(|&l| l >= EIGEN_FLOOR)
        .map(|l| -l * l.log2())
        .sum();
    Ok(s.max(0.0))
}

/// Doubles the grid density of a projection until the entropy changes by
/// less than `tol` between successive grids, or until `max_points` would be
/// exceeded. The decomposition of the finest grid evaluated is returned, with
/// `convergence.converged` reporting whether the tolerance was met.
pub fn converge_entropy_capped(
    route: Route,
    params: &SpectralParams,
    fixed: &[(Photon, f64)],
    spec: &GridSpec,
    tol: f64,
    max_points: usize,
) -> Result<SchmidtResult> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: format!("must be positive, got {tol}"),
        });
    }
    let mut n = spec.n_points;
    let mut levels = Vec::new();
    let mut current = entropy(&spectrum(&project(route, params, fixed, spec)?)?)?;
    levels.push(ConvergenceLevel {
        n_points: n,
        entropy: current,
    });
    let mut delta = None;

    loop {
        let next = n.saturating_mul(2);
        if next > max_points {
            break;
        }
        let grid = project(route, params, fixed, &spec.with_points(next))?;
        let s = entropy(&spectrum(&grid)?)?;
        levels.push(ConvergenceLevel {
            n_points: next,
            entropy: s,
        });
        let d = (s - current).abs();
        delta = Some(d);
        n = next;
        current = s;
        if d < tol {
            let mut result = decompose(&grid)?;
            result.convergence = ConvergenceRecord {
                converged: true,
                delta_entropy: delta,
                levels,
            };
            return Ok(result);
        }
    }

    let mut result = decompose(&project(route, params, fixed, &spec.with_points(n))?)?;
    result.convergence = ConvergenceRecord {
        converged: false,
        delta_entropy: delta,
        levels,
    };
    Ok(result)
}

/// [`converge_entropy_capped`] with the default cap of [`MAX_POINTS`].
pub fn converge_entropy(
    route: Route,
    params: &SpectralParams,
    fixed: &[(Photon, f64)],
    spec: &GridSpec,
    tol: f64,
) -> Result<SchmidtResult> {
    converge_entropy_capped(route, params, fixed, spec, tol, MAX_POINTS)
}
