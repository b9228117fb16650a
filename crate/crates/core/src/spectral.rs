//! Closed-form joint spectral amplitudes.
//!
//! Each amplitude is a product of Gaussian envelopes, set by the pump pulse
//! widths, and Lorentzian factors `1 / (gamma/2 - i x)`, one per idler decay.
//! The Lorentzian of every stage carries the decay rate of the ensemble that
//! emitted the corresponding idler, in cascade order. Overall prefactors
//! (pump areas, couplings, atom number) are dropped; the returned value is
//! `gamma3^(arity - 1) * f`, which is dimensionless.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::SpectralParams;
use crate::route::Route;

/// Effective pulse width `sqrt(2) tau_a tau_b / sqrt(tau_a^2 + tau_b^2)` of
/// the two-pulse Gaussian envelope.
pub fn effective_pulse_width(tau_a: f64, tau_b: f64) -> Result<f64> {
    for (name, v) in [("tau_a", tau_a), ("tau_b", tau_b)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidParameter {
                name,
                reason: format!("must be positive and finite, got {v}"),
            });
        }
    }
    // hypot avoids overflow in the tau -> infinity limit
    Ok(std::f64::consts::SQRT_2 * tau_a * (tau_b / tau_a.hypot(tau_b)))
}

/// A route with its parameter-derived coefficients precomputed, ready for
/// repeated evaluation on grids.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedRoute {
    route: Route,
    /// Exponent coefficients: tau_eff^2 / 8, tau_a^2 / 4, tau_b^2 / 4.
    k_eff: f64,
    k_a: f64,
    k_b: f64,
    half_rates: [f64; 3],
    /// delta_a3 + delta_omega_i, only used by B1.
    shift: f64,
    scale: f64,
}

impl PreparedRoute {
    pub fn new(route: Route, params: &SpectralParams) -> Result<Self> {
        params.validate()?;
        let g = params.gamma3;
        // frequencies and times are in units of gamma3
        let tau_a = params.tau_a;
        let tau_b = params.tau_b;
        let tau_eff = effective_pulse_width(tau_a, tau_b)?;
        Ok(Self {
            route,
            k_eff: tau_eff * tau_eff / 8.0,
            k_a: tau_a * tau_a / 4.0,
            k_b: tau_b * tau_b / 4.0,
            half_rates: [params.rate(0) / 2.0, params.rate(1) / 2.0, params.rate(2) / 2.0],
            shift: params.delta_a3 + params.delta_omega_i,
            scale: g.powi(route.arity() as i32 - 1),
        })
    }

    pub fn route(&self) -> Route {
        self.route
    }

    /// Amplitude at detunings ordered as in [`Route::photon_labels`].
    ///
    /// Panics if `d` is shorter than the route's arity.
    #[inline]
    pub fn eval_unchecked(&self, d: &[f64]) -> Complex64 {
        let [h1, h2, h3] = self.half_rates;
        let lor = |h: f64, x: f64| Complex64::new(h, -x);
        let (gauss_exponent, denominator) = match self.route {
            Route::Biphoton => {
                let (s, i) = (d[0], d[1]);
                (self.k_eff * sq(s + i), lor(h1, i))
            }
            Route::B1 => {
                let (s, sp, ip) = (d[0], d[1], d[2]);
                let pair = sp + ip;
                (
                    self.k_eff * sq(s + pair + self.shift) + self.k_b * sq(pair),
                    lor(h1, pair + self.shift) * lor(h2, ip),
                )
            }
            Route::B2 => {
                let (i, sp, ip) = (d[0], d[1], d[2]);
                let pair = sp + ip;
                (
                    self.k_eff * sq(i + pair) + self.k_a * sq(pair),
                    lor(h1, i) * lor(h2, ip),
                )
            }
            Route::C1 => {
                let (s, sp, spp, ipp) = (d[0], d[1], d[2], d[3]);
                let last = spp + ipp;
                let mid = sp + last;
                (
                    self.k_eff * sq(s + mid) + self.k_b * sq(mid) + self.k_b * sq(last),
                    lor(h1, mid) * lor(h2, last) * lor(h3, ipp),
                )
            }
            Route::C2 => {
                let (s, ip, spp, ipp) = (d[0], d[1], d[2], d[3]);
                let last = spp + ipp;
                let mid = ip + last;
                (
                    self.k_eff * sq(s + mid) + self.k_b * sq(mid) + self.k_a * sq(last),
                    lor(h1, mid) * lor(h2, ip) * lor(h3, ipp),
                )
            }
            Route::C3 => {
                let (sp, ip, spp, ipp) = (d[0], d[1], d[2], d[3]);
                let first = sp + ip;
                let last = spp + ipp;
                (
                    self.k_eff * sq(first + last) + self.k_a * sq(first) + self.k_b * sq(last),
                    lor(h1, last) * lor(h2, ip) * lor(h3, ipp),
                )
            }
            Route::C4 => {
                let (i, sp, spp, ipp) = (d[0], d[1], d[2], d[3]);
                let last = spp + ipp;
                let mid = sp + last;
                (
                    self.k_eff * sq(i + mid) + self.k_a * sq(mid) + self.k_b * sq(last),
                    lor(h1, i) * lor(h2, last) * lor(h3, ipp),
                )
            }
            Route::C5 => {
                let (i, ip, spp, ipp) = (d[0], d[1], d[2], d[3]);
                let last = spp + ipp;
                let mid = ip + last;
                (
                    self.k_eff * sq(i + mid) + self.k_a * sq(mid) + self.k_a * sq(last),
                    lor(h1, i) * lor(h2, ip) * lor(h3, ipp),
                )
            }
        };
        // the Gaussian underflows to exactly zero far out in the tails
        let gauss = (-gauss_exponent).exp();
        if gauss == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::new(self.scale * gauss, 0.0) / denominator
    }

    pub fn eval(&self, d: &[f64]) -> Result<Complex64> {
        if d.len() != self.route.arity() {
            return Err(Error::Arity {
                route: self.route,
                expected: self.route.arity(),
                got: d.len(),
            });
        }
        Ok(self.eval_unchecked(d))
    }
}

#[inline]
fn sq(x: f64) -> f64 {
    x * x
}

/// Amplitude of any route at detunings ordered as in [`Route::photon_labels`].
pub fn eval(route: Route, params: &SpectralParams, d: &[f64]) -> Result<Complex64> {
    PreparedRoute::new(route, params)?.eval(d)
}

/// Seed pair amplitude at `(d_omega_s, d_omega_i)`.
pub fn eval_biphoton(params: &SpectralParams, d_omega_s: f64, d_omega_i: f64) -> Result<Complex64> {
    eval(Route::Biphoton, params, &[d_omega_s, d_omega_i])
}

/// Three-photon amplitude of route B1 or B2.
pub fn eval_three_photon(route: Route, params: &SpectralParams, d: [f64; 3]) -> Result<Complex64> {
    if route.arity() != 3 {
        return Err(Error::WrongRoute { route, expected: 3 });
    }
    eval(route, params, &d)
}

/// Four-photon amplitude of routes C1 through C5.
pub fn eval_four_photon(route: Route, params: &SpectralParams, d: [f64; 4]) -> Result<Complex64> {
    if route.arity() != 4 {
        return Err(Error::WrongRoute { route, expected: 4 });
    }
    eval(route, params, &d)
}
