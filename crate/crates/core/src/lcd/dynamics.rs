//! Right-hand sides and the integrating-factor time stepper.
//!
//! Diffusion is integrated exactly per mode (`exp(-nu |k|^2 dt)` for the
//! velocity, `exp(-|k|^2 dt)` for the director); everything else is explicit.
//! Quadratic products are formed from dealiased copies of the state and every
//! tendency is dealiased again, so quadratic terms carry no aliasing error.
//! `f(d)` is evaluated pointwise on the full director.

use ndarray::{Array3, Zip};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::model::{gl_force_arrays, ModelParams};
use crate::error::{Error, Result};
use crate::spectral::fft::plans;
use crate::spectral::field::spectral_l2_sq;
use crate::spectral::ops::{divergence_array, gradient_arrays, leray_in_place, mask_in_place, partial_array};
use crate::spectral::{GridSpec, SpectralMask, VectorField, Wavenumbers};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Velocity and director, both held spectrally.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub u: VectorField,
    pub d: VectorField,
    pub t: f64,
}

impl State {
    pub fn new(u: VectorField, d: VectorField, t: f64) -> Result<Self> {
        if u.grid() != d.grid() {
            return Err(Error::GridMismatch);
        }
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::InvalidField(format!("time {t} must be finite and >= 0")));
        }
        let state = State {
            u: u.to_spectral()?,
            d: d.to_spectral()?,
            t,
        };
        if !state.is_finite() {
            return Err(Error::InvalidField("non-finite state".into()));
        }
        Ok(state)
    }

    /// Quiescent far-field state `(0, w0)`.
    pub fn rest(grid: GridSpec, params: &ModelParams) -> Self {
        State {
            u: VectorField::zeros_spectral(grid),
            d: VectorField::constant(grid, params.w0).forward().expect("finite"),
            t: 0.0,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        self.u.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.d.is_finite()
    }

    /// `||div u||_2 / ||grad u||_2`, zero for a uniform velocity.
    pub fn divergence_ratio(&self) -> f64 {
        let grid = self.grid();
        let wn = grid.wavenumbers();
        let u = self.u.spectral().expect("spectral state");
        let div = divergence_array(&wn, u);
        let grad: f64 = u
            .iter()
            .map(|c| gradient_arrays(&wn, c).iter().map(|g| spectral_l2_sq(grid, g)).sum::<f64>())
            .sum();
        if grad == 0.0 {
            0.0
        } else {
            (spectral_l2_sq(grid, &div) / grad).sqrt()
        }
    }

    /// Largest pointwise velocity magnitude on the grid.
    pub fn max_velocity(&self) -> Result<f64> {
        let mag = self.u.inverse()?.magnitude()?;
        Ok(mag.iter().fold(0.0, |m, &v| m.max(v)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Integrating-factor forward Euler, first order.
    #[default]
    Euler,
    /// Integrating-factor Heun: predict with Euler, re-evaluate the explicit
    /// terms at the prediction and average. Second order.
    PredictorCorrector,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_cfl")]
    pub cfl_safety: f64,
    #[serde(default = "default_output_every")]
    pub output_every: usize,
    #[serde(default)]
    pub scheme: Scheme,
    /// Apply the advective and reaction step limits. Switching this off is
    /// only useful for provoking instabilities on purpose.
    #[serde(default = "default_clamp")]
    pub clamp: bool,
}

fn default_cfl() -> f64 {
    0.5
}

fn default_output_every() -> usize {
    1
}

fn default_clamp() -> bool {
    true
}

impl TimeSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::config("time.dt", format!("{} must be positive", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::config("time.t_end", format!("{} must be >= 0", self.t_end)));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::config(
                "time.cfl_safety",
                format!("{} must lie in (0, 1]", self.cfl_safety),
            ));
        }
        if self.output_every == 0 {
            return Err(Error::config("time.output_every", "must be >= 1"));
        }
        Ok(())
    }

    /// Step size after the advective limit `max|u| dt <= cfl h` and the
    /// reaction limit `dt <= cfl eta^2 / 4`.
    pub fn step_size(&self, grid: &GridSpec, params: &ModelParams, max_velocity: f64) -> f64 {
        if !self.clamp {
            return self.dt;
        }
        let mut dt = self.dt;
        if max_velocity > 0.0 {
            dt = dt.min(self.cfl_safety * grid.spacing() / max_velocity);
        }
        if !params.linear {
            dt = dt.min(self.cfl_safety * params.eta * params.eta / 4.0);
        }
        dt
    }
}

type Triple<T> = [T; 3];

fn zeros3(grid: &GridSpec) -> Triple<Array3<Complex64>> {
    [(); 3].map(|_| Array3::zeros(grid.spectral_shape()))
}

fn masked(mask: &SpectralMask, c: &Array3<Complex64>) -> Array3<Complex64> {
    let mut out = c.clone();
    mask_in_place(mask, &mut out);
    out
}

fn sym_index(i: usize, j: usize) -> usize {
    match (i.min(j), i.max(j)) {
        (0, 0) => 0,
        (0, 1) => 1,
        (0, 2) => 2,
        (1, 1) => 3,
        (1, 2) => 4,
        _ => 5,
    }
}

const SYM_PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

/// Physical `d_j d^a` for a dealiased director, indexed `[a][j]`.
fn director_gradients(wn: &Wavenumbers, n: usize, d: &Triple<Array3<Complex64>>) -> [[Array3<f64>; 3]; 3] {
    let fft = plans(n);
    [0, 1, 2].map(|a| [0, 1, 2].map(|j| fft.inverse(&partial_array(wn, &d[a], j))))
}

/// Spectral symmetric tensor `T_ij` from pointwise products.
fn tensor_spectral(
    n: usize,
    u: Option<&Triple<Array3<f64>>>,
    grad_d: &[[Array3<f64>; 3]; 3],
) -> [Array3<Complex64>; 6] {
    let fft = plans(n);
    SYM_PAIRS.map(|(i, j)| {
        let mut t = Array3::<f64>::zeros(grad_d[0][0].dim());
        for g in grad_d {
            Zip::from(&mut t).and(&g[i]).and(&g[j]).par_for_each(|t, &a, &b| *t += a * b);
        }
        if let Some(u) = u {
            Zip::from(&mut t).and(&u[i]).and(&u[j]).par_for_each(|t, &a, &b| *t += a * b);
        }
        fft.forward(&t)
    })
}

/// `div T` of a symmetric spectral tensor.
fn tensor_divergence(wn: &Wavenumbers, t: &[Array3<Complex64>; 6]) -> Triple<Array3<Complex64>> {
    [0, 1, 2].map(|i| {
        let mut out = Array3::<Complex64>::zeros(t[0].dim());
        for j in 0..3 {
            let tij = &t[sym_index(i, j)];
            Zip::indexed(&mut out).and(tij).par_for_each(|(ix, iy, iz), o, &v| {
                *o += I * wn.k(ix, iy, iz)[j] * v;
            });
        }
        out
    })
}

/// Explicit tendencies `(-P div(u (x) u + grad d (x) grad d), -u.grad d - f(d))`.
pub(crate) fn explicit_arrays(
    grid: &GridSpec,
    u: [&Array3<Complex64>; 3],
    d: [&Array3<Complex64>; 3],
    params: &ModelParams,
) -> (Triple<Array3<Complex64>>, Triple<Array3<Complex64>>) {
    if params.linear {
        return (zeros3(grid), zeros3(grid));
    }
    let n = grid.n;
    let fft = plans(n);
    let wn = grid.wavenumbers();
    let mask = SpectralMask::dealias(grid);

    let u_t = u.map(|c| masked(&mask, c));
    let d_t = d.map(|c| masked(&mask, c));
    let u_phys = u_t.clone().map(|c| fft.inverse(&c));
    let grad_d = director_gradients(&wn, n, &d_t);
    let d_phys = d.map(|c| fft.inverse(c));

    let tensor = tensor_spectral(n, Some(&u_phys), &grad_d);
    let mut tu = tensor_divergence(&wn, &tensor);
    for c in &mut tu {
        mask_in_place(&mask, c);
        c.par_mapv_inplace(|v| -v);
    }
    leray_in_place(&wn, &mut tu);

    let force = gl_force_arrays([&d_phys[0], &d_phys[1], &d_phys[2]], params.eta);
    let td = [0, 1, 2].map(|a| {
        let mut r = Array3::<f64>::zeros(grid.physical_shape());
        Zip::from(&mut r)
            .and(&force[a])
            .and(&u_phys[0])
            .and(&grad_d[a][0])
            .and(&u_phys[1])
            .and(&grad_d[a][1])
            .par_for_each(|r, &f, &u0, &g0, &u1, &g1| *r = -(u0 * g0 + u1 * g1) - f);
        Zip::from(&mut r)
            .and(&u_phys[2])
            .and(&grad_d[a][2])
            .par_for_each(|r, &u2, &g2| *r -= u2 * g2);
        let mut c = fft.forward(&r);
        mask_in_place(&mask, &mut c);
        c
    });
    (tu, td)
}

/// `div(grad d (x) grad d)`, spectral and dealiased. Accepts either
/// representation of `d`.
pub fn ericksen_stress_div(d: &VectorField) -> Result<VectorField> {
    let grid = *d.grid();
    let d = d.to_spectral()?;
    let wn = grid.wavenumbers();
    let mask = SpectralMask::dealias(&grid);
    let d_t = d.spectral()?.map(|c| masked(&mask, c));
    let grad_d = director_gradients(&wn, grid.n, &d_t);
    let tensor = tensor_spectral(grid.n, None, &grad_d);
    let mut div = tensor_divergence(&wn, &tensor);
    for c in &mut div {
        mask_in_place(&mask, c);
    }
    Ok(VectorField::from_spectral_arrays(grid, div))
}

/// Pressure from `-lap p = div div (u (x) u + grad d (x) grad d)`, mean-free.
/// Only a diagnostic: the stepper removes pressure by projection.
pub fn pressure_solve(
    u: &VectorField,
    d: &VectorField,
    params: &ModelParams,
) -> Result<crate::spectral::ScalarField> {
    let grid = *u.grid();
    if d.grid() != &grid {
        return Err(Error::GridMismatch);
    }
    let mut p = Array3::<Complex64>::zeros(grid.spectral_shape());
    if !params.linear {
        let fft = plans(grid.n);
        let wn = grid.wavenumbers();
        let mask = SpectralMask::dealias(&grid);
        let u = u.to_spectral()?;
        let d = d.to_spectral()?;
        let u_phys = u.spectral()?.map(|c| fft.inverse(&masked(&mask, c)));
        let d_t = d.spectral()?.map(|c| masked(&mask, c));
        let grad_d = director_gradients(&wn, grid.n, &d_t);
        let tensor = tensor_spectral(grid.n, Some(&u_phys), &grad_d);
        Zip::indexed(&mut p).par_for_each(|(ix, iy, iz), p| {
            let k = wn.k(ix, iy, iz);
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            if k2 == 0.0 {
                return;
            }
            let mut s = Complex64::default();
            for (t, &(i, j)) in tensor.iter().zip(&SYM_PAIRS) {
                let weight = if i == j { 1.0 } else { 2.0 };
                s += weight * k[i] * k[j] * t[[ix, iy, iz]];
            }
            *p = -s / k2;
        });
        mask_in_place(&mask, &mut p);
    }
    crate::spectral::ScalarField::from_spectral(grid, p)
}

fn check_finite(arrays: &[Array3<Complex64>], t: f64, what: &str) -> Result<()> {
    if arrays
        .iter()
        .all(|a| a.iter().all(|c| c.re.is_finite() && c.im.is_finite()))
    {
        Ok(())
    } else {
        Err(Error::BlowUp {
            t,
            what: what.to_string(),
        })
    }
}

/// Explicit velocity and director tendencies at `state`; the velocity
/// tendency is divergence-free.
pub fn rhs_explicit(state: &State, params: &ModelParams) -> Result<(VectorField, VectorField)> {
    let grid = *state.grid();
    let (tu, td) = explicit_arrays(&grid, state.u.spectral()?, state.d.spectral()?, params);
    check_finite(&tu, state.t, "non-finite velocity tendency")?;
    check_finite(&td, state.t, "non-finite director tendency")?;
    Ok((
        VectorField::from_spectral_arrays(grid, tu),
        VectorField::from_spectral_arrays(grid, td),
    ))
}

/// Per-mode heat factors `exp(-rate |k|^2 dt)`.
fn heat_factors(grid: &GridSpec, rate: f64, dt: f64) -> Array3<f64> {
    let wn = grid.wavenumbers();
    Array3::from_shape_fn(grid.spectral_shape(), |(ix, iy, iz)| (-rate * wn.k2(ix, iy, iz) * dt).exp())
}

/// `E * (x + h * n)`, all per mode.
fn if_euler(factor: &Array3<f64>, x: &Array3<Complex64>, tend: &Array3<Complex64>, h: f64) -> Array3<Complex64> {
    let mut out = Array3::zeros(x.dim());
    Zip::from(&mut out)
        .and(factor)
        .and(x)
        .and(tend)
        .par_for_each(|o, &e, &x, &n| *o = e * (x + h * n));
    out
}

/// Advances `state` by `dt`.
pub fn step_imex(state: &State, params: &ModelParams, dt: f64, scheme: Scheme) -> Result<State> {
    let grid = *state.grid();
    let wn = grid.wavenumbers();
    let e_u = heat_factors(&grid, params.nu, dt);
    let e_d = heat_factors(&grid, 1.0, dt);
    let u0 = state.u.spectral()?;
    let d0 = state.d.spectral()?;

    let (nu0, nd0) = rhs_explicit(state, params)?;
    let nu0 = nu0.spectral()?;
    let nd0 = nd0.spectral()?;
    let mut u1 = [0, 1, 2].map(|a| if_euler(&e_u, u0[a], nu0[a], dt));
    let mut d1 = [0, 1, 2].map(|a| if_euler(&e_d, d0[a], nd0[a], dt));

    if scheme == Scheme::PredictorCorrector {
        let t1 = state.t + dt;
        let (nu1, nd1) = explicit_arrays(&grid, [&u1[0], &u1[1], &u1[2]], [&d1[0], &d1[1], &d1[2]], params);
        check_finite(&nu1, t1, "non-finite velocity tendency at predictor")?;
        check_finite(&nd1, t1, "non-finite director tendency at predictor")?;
        for a in 0..3 {
            let mut u = if_euler(&e_u, u0[a], nu0[a], 0.5 * dt);
            Zip::from(&mut u).and(&nu1[a]).par_for_each(|u, &n| *u += 0.5 * dt * n);
            u1[a] = u;
            let mut d = if_euler(&e_d, d0[a], nd0[a], 0.5 * dt);
            Zip::from(&mut d).and(&nd1[a]).par_for_each(|d, &n| *d += 0.5 * dt * n);
            d1[a] = d;
        }
    }

    leray_in_place(&wn, &mut u1);
    let t = state.t + dt;
    check_finite(&u1, t, "non-finite velocity")?;
    check_finite(&d1, t, "non-finite director")?;
    Ok(State {
        u: VectorField::from_spectral_arrays(grid, u1),
        d: VectorField::from_spectral_arrays(grid, d1),
        t,
    })
}
