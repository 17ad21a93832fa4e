//! Model parameters and the Ginzburg-Landau penalty.

use ndarray::{Array3, Zip};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{ScalarField, VectorField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Viscosity.
    #[serde(default = "one")]
    pub nu: f64,
    /// Penalty length; `f(d)` has Lipschitz scale `1/eta^2` near `|d| = 1`.
    pub eta: f64,
    /// Far-field director, unit length.
    #[serde(default = "w0_default")]
    pub w0: [f64; 3],
    /// Drop every nonlinear term: velocity follows Stokes flow and the
    /// director the heat equation.
    #[serde(default)]
    pub linear: bool,
}

fn one() -> f64 {
    1.0
}

fn w0_default() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

impl ModelParams {
    /// Validates `nu, eta > 0` and renormalises `w0` onto the unit sphere.
    pub fn new(nu: f64, eta: f64, w0: [f64; 3]) -> Result<Self> {
        ModelParams {
            nu,
            eta,
            w0,
            linear: false,
        }
        .normalized()
    }

    pub fn normalized(mut self) -> Result<Self> {
        if !(self.nu.is_finite() && self.nu > 0.0) {
            return Err(Error::config("model.nu", format!("{} must be positive", self.nu)));
        }
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return Err(Error::config("model.eta", format!("{} must be positive", self.eta)));
        }
        let norm = self.w0.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::config("model.w0", "must be a nonzero finite vector"));
        }
        if norm != 1.0 {
            self.w0 = self.w0.map(|c| c / norm);
        }
        Ok(self)
    }

    pub fn linearized(mut self) -> Self {
        self.linear = true;
        self
    }
}

/// `F(d) = (|d|^2 - 1)^2 / (4 eta^2)` at a point.
#[inline]
pub fn penalty_density(d: [f64; 3], eta: f64) -> f64 {
    let s = d[0] * d[0] + d[1] * d[1] + d[2] * d[2] - 1.0;
    s * s / (4.0 * eta * eta)
}

/// `f(d) = (|d|^2 - 1) d / eta^2 = grad_d F(d)` at a point.
#[inline]
pub fn gl_force_density(d: [f64; 3], eta: f64) -> [f64; 3] {
    let s = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2] - 1.0) / (eta * eta);
    [s * d[0], s * d[1], s * d[2]]
}

pub(crate) fn penalty_array(d: [&Array3<f64>; 3], eta: f64) -> Array3<f64> {
    let mut out = Array3::zeros(d[0].dim());
    Zip::from(&mut out)
        .and(d[0])
        .and(d[1])
        .and(d[2])
        .par_for_each(|o, &a, &b, &c| *o = penalty_density([a, b, c], eta));
    out
}

pub(crate) fn gl_force_arrays(d: [&Array3<f64>; 3], eta: f64) -> [Array3<f64>; 3] {
    let mut out = [(); 3].map(|_| Array3::zeros(d[0].dim()));
    let [fx, fy, fz] = &mut out;
    Zip::from(fx)
        .and(fy)
        .and(fz)
        .and(d[0])
        .and(d[1])
        .and(d[2])
        .par_for_each(|fx, fy, fz, &a, &b, &c| {
            let f = gl_force_density([a, b, c], eta);
            *fx = f[0];
            *fy = f[1];
            *fz = f[2];
        });
    out
}

/// Pointwise Ginzburg-Landau penalty of a physical director field.
pub fn penalty_f(d: &VectorField, params: &ModelParams) -> Result<ScalarField> {
    let values = penalty_array(d.physical()?, params.eta);
    ScalarField::from_physical(*d.grid(), values)
}

/// Pointwise `f(d)` of a physical director field.
pub fn gl_force_f(d: &VectorField, params: &ModelParams) -> Result<VectorField> {
    let arrays = gl_force_arrays(d.physical()?, params.eta);
    let grid = *d.grid();
    let [a, b, c] = arrays;
    VectorField::from_components([
        ScalarField::from_physical(grid, a)?,
        ScalarField::from_physical(grid, b)?,
        ScalarField::from_physical(grid, c)?,
    ])
}
