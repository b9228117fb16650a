//! Projection of multiphoton amplitudes onto sampled grids.
//!
//! A conditional measurement that detects some photons at fixed detunings
//! collapses the multiphoton amplitude onto a function of the remaining
//! photons. Projection here is the exact substitution of the fixed detunings,
//! with no finite detection window.

use ndarray::{Array2, Array3, Axis, Zip};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::SpectralParams;
use crate::route::{Photon, Route};
use crate::spectral::PreparedRoute;

/// Largest number of cells [`slice_3d`] will allocate (2 GiB of amplitudes).
pub const MAX_VOLUME_CELLS: usize = 1 << 27;

/// Uniform sampling of `[-half_width, half_width]` with `n_points` samples
/// per axis, both endpoints included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub half_width: f64,
    pub n_points: usize,
    pub axes: Vec<Photon>,
}

impl GridSpec {
    pub const DEFAULT_HALF_WIDTH: f64 = 200.0;
    pub const DEFAULT_POINTS: usize = 1024;

    pub fn new(half_width: f64, n_points: usize, axes: Vec<Photon>) -> Self {
        Self {
            half_width,
            n_points,
            axes,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points < 2 {
            return Err(Error::GridTooSmall(self.n_points));
        }
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            return Err(Error::GridWidth(self.half_width));
        }
        Ok(())
    }

    /// Sample spacing, which is also the Riemann quadrature weight.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.n_points - 1) as f64
    }

    pub fn with_points(&self, n_points: usize) -> Self {
        Self {
            n_points,
            ..self.clone()
        }
    }
}

/// Sample points of one grid axis, ascending. The grid is exactly symmetric
/// about zero and contains zero when `n_points` is odd.
pub fn make_grid(spec: &GridSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let n = spec.n_points;
    let m = (n - 1) as f64;
    Ok((0..n)
        .map(|k| spec.half_width * ((2 * k) as f64 - m) / m)
        .collect())
}

/// Where a grid came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub route: Route,
    pub params: SpectralParams,
    pub fixed: Vec<(Photon, f64)>,
}

/// Raw (unnormalized) biphoton amplitude on a square grid.
/// `values[[j, k]]` is the amplitude at `(axis[j], axis[k])` for the photons
/// `spec.axes[0]` and `spec.axes[1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeGrid2D {
    pub spec: GridSpec,
    pub axis: Vec<f64>,
    pub values: Array2<Complex64>,
    pub provenance: Option<Provenance>,
}

impl AmplitudeGrid2D {
    /// Wraps an externally produced amplitude matrix sampled on `spec`.
    pub fn from_values(spec: GridSpec, values: Array2<Complex64>) -> Result<Self> {
        let axis = make_grid(&spec)?;
        let n = spec.n_points;
        if values.dim() != (n, n) {
            return Err(Error::InvalidParameter {
                name: "values",
                reason: format!("expected a {n}x{n} matrix, got {:?}", values.dim()),
            });
        }
        Ok(Self {
            spec,
            axis,
            values,
            provenance: None,
        })
    }

    pub fn spacing(&self) -> f64 {
        self.spec.spacing()
    }

    /// Same state with the two photons swapped.
    pub fn transposed(&self) -> Self {
        let mut spec = self.spec.clone();
        spec.axes.reverse();
        Self {
            spec,
            axis: self.axis.clone(),
            values: self.values.t().to_owned(),
            provenance: self.provenance.clone(),
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            values: self.values.mapv(|v| v * factor),
            ..self.clone()
        }
    }
}

/// Raw amplitude of a four-photon route with one photon fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeGrid3D {
    pub spec: GridSpec,
    pub axis: Vec<f64>,
    pub values: Array3<Complex64>,
    pub provenance: Provenance,
}

impl AmplitudeGrid3D {
    /// Fixes one of the free photons to the grid sample `index`, yielding a
    /// biphoton grid over the two remaining photons.
    pub fn plane(&self, photon: Photon, index: usize) -> Result<AmplitudeGrid2D> {
        let route = self.provenance.route;
        let ax = self
            .spec
            .axes
            .iter()
            .position(|&p| p == photon)
            .ok_or(Error::UnknownPhoton { route, photon })?;
        if index >= self.spec.n_points {
            return Err(Error::InvalidParameter {
                name: "index",
                reason: format!("{index} is outside a grid of {} points", self.spec.n_points),
            });
        }
        let mut axes = self.spec.axes.clone();
        axes.remove(ax);
        let mut provenance = self.provenance.clone();
        provenance.fixed.push((photon, self.axis[index]));
        Ok(AmplitudeGrid2D {
            spec: GridSpec { axes, ..self.spec.clone() },
            axis: self.axis.clone(),
            values: self.values.index_axis(Axis(ax), index).to_owned(),
            provenance: Some(provenance),
        })
    }

    /// Modulus scaled so the largest sample is one, for isosurface rendering.
    pub fn normalized_modulus(&self) -> Array3<f64> {
        let abs = self.values.mapv(|v| v.norm());
        let max = abs.iter().cloned().fold(0.0, f64::max);
        if max > 0.0 {
            abs.mapv(|v| v / max)
        } else {
            abs
        }
    }
}

/// Column positions of the free axes in the route's detuning tuple, plus the
/// tuple template holding the fixed values.
fn layout(route: Route, fixed: &[(Photon, f64)], axes: &[Photon]) -> Result<(Vec<usize>, [f64; 4])> {
    let partition = |reason: String| Error::Partition { route, reason };
    let arity = route.arity();
    if fixed.len() + axes.len() != arity {
        return Err(partition(format!(
            "{} fixed + {} free photons for a {arity}-photon route",
            fixed.len(),
            axes.len()
        )));
    }
    let mut seen = [false; 4];
    let mut template = [0.0; 4];
    let mut claim = |photon: Photon| -> Result<usize> {
        let idx = route
            .index_of(photon)
            .ok_or(Error::UnknownPhoton { route, photon })?;
        if seen[idx] {
            return Err(partition(format!("photon {photon} appears twice")));
        }
        seen[idx] = true;
        Ok(idx)
    };
    for &(photon, value) in fixed {
        if !value.is_finite() {
            return Err(Error::InvalidParameter {
                name: "fixed",
                reason: format!("detuning of {photon} must be finite, got {value}"),
            });
        }
        let idx = claim(photon)?;
        template[idx] = value;
    }
    let free = axes.iter().map(|&p| claim(p)).collect::<Result<Vec<_>>>()?;
    Ok((free, template))
}

/// Free axes of a route given its fixed photons, in route order.
pub fn free_axes(route: Route, fixed: &[(Photon, f64)]) -> Vec<Photon> {
    route
        .photon_labels()
        .iter()
        .copied()
        .filter(|p| !fixed.iter().any(|(q, _)| q == p))
        .collect()
}

/// Biphoton grid of `route` with the photons in `fixed` held at their
/// detunings and the two photons in `spec.axes` sampled on the grid.
pub fn project(
    route: Route,
    params: &SpectralParams,
    fixed: &[(Photon, f64)],
    spec: &GridSpec,
) -> Result<AmplitudeGrid2D> {
    if spec.axes.len() != 2 {
        return Err(Error::Partition {
            route,
            reason: format!("a biphoton grid needs 2 axes, got {}", spec.axes.len()),
        });
    }
    let axis = make_grid(spec)?;
    let (free, template) = layout(route, fixed, &spec.axes)?;
    let prepared = PreparedRoute::new(route, params)?;
    let n = spec.n_points;

    let mut values = Array2::<Complex64>::zeros((n, n));
    Zip::indexed(&mut values).par_for_each(|(j, k), v| {
        let mut d = template;
        d[free[0]] = axis[j];
        d[free[1]] = axis[k];
        *v = prepared.eval_unchecked(&d);
    });

    Ok(AmplitudeGrid2D {
        spec: spec.clone(),
        axis,
        values,
        provenance: Some(Provenance {
            route,
            params: params.clone(),
            fixed: fixed.to_vec(),
        }),
    })
}

/// Three-photon grid of a four-photon route with a single photon fixed.
pub fn slice_3d(
    route: Route,
    params: &SpectralParams,
    fixed: (Photon, f64),
    spec: &GridSpec,
) -> Result<AmplitudeGrid3D> {
    if route.arity() != 4 {
        return Err(Error::WrongRoute { route, expected: 4 });
    }
    if spec.axes.len() != 3 {
        return Err(Error::Partition {
            route,
            reason: format!("a volume needs 3 axes, got {}", spec.axes.len()),
        });
    }
    let axis = make_grid(spec)?;
    let n = spec.n_points;
    let cells = n.saturating_mul(n).saturating_mul(n);
    if cells > MAX_VOLUME_CELLS {
        return Err(Error::GridTooLarge {
            cells,
            limit: MAX_VOLUME_CELLS,
        });
    }
    let (free, template) = layout(route, &[fixed], &spec.axes)?;
    let prepared = PreparedRoute::new(route, params)?;

    let mut values = Array3::<Complex64>::zeros((n, n, n));
    Zip::indexed(&mut values).par_for_each(|(a, b, c), v| {
        let mut d = template;
        d[free[0]] = axis[a];
        d[free[1]] = axis[b];
        d[free[2]] = axis[c];
        *v = prepared.eval_unchecked(&d);
    });

    Ok(AmplitudeGrid3D {
        spec: spec.clone(),
        axis,
        values,
        provenance: Provenance {
            route,
            params: params.clone(),
            fixed: vec![fixed],
        },
    })
}
