//! Spectral toolkit for multiphoton states emitted by cascaded cold atomic
//! ensembles in a diamond level configuration.
//!
//! The crate is organised bottom-up:
//!
//! * [`params`] and [`route`] describe a source: decay rates, pulse widths and
//!   which cascade topology produced the photons.
//! * [`spectral`] evaluates the closed-form joint spectral amplitude of every
//!   route at arbitrary detunings.
//! * [`projector`] collapses a multiphoton amplitude onto a biphoton (or
//!   three-photon) grid by fixing photon detunings.
//! * [`schmidt`] normalizes a biphoton grid and computes its Schmidt
//!   eigenvalues, mode functions and entropy of entanglement.
//! * [`fwm`] solves the four-wave-mixing phase matching condition for the
//!   emission angles.
//!
//! All frequencies are expressed in units of the intrinsic decay rate
//! `gamma3` and all durations in units of `1 / gamma3`.

pub mod error;
pub mod fwm;
pub mod params;
pub mod projector;
pub mod route;
pub mod schmidt;
pub mod spectral;

pub use error::{Error, Result};
pub use fwm::{residual, small_angle_approx, solve_angles, FwmGeometry, FwmSolution};
pub use params::SpectralParams;
pub use projector::{free_axes, make_grid, project, slice_3d, AmplitudeGrid2D, AmplitudeGrid3D, GridSpec, Provenance};
pub use route::{Photon, Route};
pub use schmidt::{
    converge_entropy, converge_entropy_capped, decompose, entropy, kernel_eigenvalues, normalize, spectrum, ConvergenceRecord,
    Kernel, SchmidtResult,
};
pub use spectral::{
    effective_pulse_width, eval, eval_biphoton, eval_four_photon, eval_three_photon, PreparedRoute,
};

pub use num_complex::Complex64;
