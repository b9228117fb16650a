use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical parameters of a cascade source.
///
/// Frequencies are in units of `gamma3`, durations in units of `1 / gamma3`.
/// `gamma_n` lists the superradiant decay rate of each ensemble stage in
/// cascade order. A single entry is used for every stage; with two entries a
/// third stage reuses the last one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralParams {
    pub gamma3: f64,
    pub gamma_n: Vec<f64>,
    pub tau_a: f64,
    pub tau_b: f64,
    #[serde(default)]
    pub delta_a3: f64,
    #[serde(default)]
    pub delta_omega_i: f64,
}

impl Default for SpectralParams {
    fn default() -> Self {
        Self {
            gamma3: 1.0,
            gamma_n: vec![5.0],
            tau_a: 0.25,
            tau_b: 0.25,
            delta_a3: 0.0,
            delta_omega_i: 0.0,
        }
    }
}

impl SpectralParams {
    /// Equal decay rate `gamma_n` in every ensemble and pulse widths
    /// `tau_a`, `tau_b`.
    pub fn new(gamma_n: f64, tau_a: f64, tau_b: f64) -> Self {
        Self {
            gamma_n: vec![gamma_n],
            tau_a,
            tau_b,
            ..Self::default()
        }
    }

    pub fn with_rates(mut self, rates: &[f64]) -> Self {
        self.gamma_n = rates.to_vec();
        self
    }

    pub fn with_shifts(mut self, delta_a3: f64, delta_omega_i: f64) -> Self {
        self.delta_a3 = delta_a3;
        self.delta_omega_i = delta_omega_i;
        self
    }

    /// Decay rate of ensemble `stage` (0 = first ensemble).
    pub fn rate(&self, stage: usize) -> f64 {
        let last = self.gamma_n.len().saturating_sub(1);
        self.gamma_n[stage.min(last)]
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(name: &'static str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be positive and finite, got {v}"),
                })
            }
        }
        fn finite(name: &'static str, v: f64) -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite, got {v}"),
                })
            }
        }

        positive("gamma3", self.gamma3)?;
        if self.gamma_n.is_empty() {
            return Err(Error::InvalidParameter {
                name: "gamma_n",
                reason: "at least one decay rate is required".into(),
            });
        }
        if self.gamma_n.len() > 3 {
            return Err(Error::InvalidParameter {
                name: "gamma_n",
                reason: format!("at most three ensemble stages, got {}", self.gamma_n.len()),
            });
        }
        for &g in &self.gamma_n {
            positive("gamma_n", g)?;
        }
        positive("tau_a", self.tau_a)?;
        positive("tau_b", self.tau_b)?;
        finite("delta_a3", self.delta_a3)?;
        finite("delta_omega_i", self.delta_omega_i)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_rate_broadcasts() {
        let p = SpectralParams::new(5.0, 0.25, 0.25);
        assert_eq!((p.rate(0), p.rate(1), p.rate(2)), (5.0, 5.0, 5.0));
        let p = p.with_rates(&[1.0, 5.0]);
        assert_eq!((p.rate(0), p.rate(1), p.rate(2)), (1.0, 5.0, 5.0));
    }

    #[test]
    fn rejects_bad_values() {
        assert!(SpectralParams::default().validate().is_ok());
        assert!(SpectralParams::new(0.0, 0.25, 0.25).validate().is_err());
        assert!(SpectralParams::new(5.0, -1.0, 0.25).validate().is_err());
        assert!(SpectralParams::new(5.0, 0.25, f64::NAN).validate().is_err());
        assert!(SpectralParams::default().with_rates(&[]).validate().is_err());
        assert!(SpectralParams::default().with_rates(&[1.0; 4]).validate().is_err());
        assert!(SpectralParams::default()
            .with_shifts(f64::INFINITY, 0.0)
            .validate()
            .is_err());
    }
}
