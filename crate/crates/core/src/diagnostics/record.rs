//! Per-sample diagnostics.

use ndarray::{Array3, Zip};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lcd::dynamics::State;
use crate::lcd::model::{gl_force_arrays, penalty_array, ModelParams};
use crate::lcd::{ericksen_stress_div, pressure_solve};
use crate::spectral::fft::plans;
use crate::spectral::field::{det_sum, spectral_l2_sq, spectral_moment};
use crate::spectral::ops::{gradient_arrays, laplacian_array, mask_in_place};
use crate::spectral::{GridSpec, SpectralMask, VectorField};

/// Exponents of the `||d - w0||_p` columns.
pub const LP_EXPONENTS: [u32; 4] = [1, 2, 4, 8];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierSplitConfig {
    /// Splitting constant in `r(t) = (k / (1 + t))^{1/2}`.
    #[serde(default = "default_k")]
    pub k: f64,
    /// Radius of the small-frequency ball used for `sup |G| / |xi|`.
    #[serde(default = "default_xi_cut")]
    pub xi_cut: f64,
}

fn default_k() -> f64 {
    3.0
}

fn default_xi_cut() -> f64 {
    0.5
}

impl Default for FourierSplitConfig {
    fn default() -> Self {
        FourierSplitConfig {
            k: default_k(),
            xi_cut: default_xi_cut(),
        }
    }
}

impl FourierSplitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.k.is_finite() && self.k > 0.0) {
            return Err(Error::config("split.k", format!("{} must be positive", self.k)));
        }
        if !(self.xi_cut.is_finite() && self.xi_cut > 0.0) {
            return Err(Error::config("split.xi_cut", format!("{} must be positive", self.xi_cut)));
        }
        Ok(())
    }

    pub fn radius(&self, t: f64) -> f64 {
        (self.k / (1.0 + t)).sqrt()
    }
}

/// One sample of every monitored quantity.
///
/// `lowmode_sup` and `g_ratio_sup` are `None` when no nonzero resolved mode
/// lies in the relevant ball. Fourier transforms are the continuous ones,
/// approximated by `L^3` times the Fourier coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// `||u||^2 / 2 + ||grad d||^2 / 2 + int F(d)` (no penalty in linear mode).
    pub energy_basic: f64,
    /// `nu ||grad u||^2 + ||lap d - f(d)||^2` (`||lap d||^2` in linear mode).
    pub dissipation: f64,
    /// `||grad u||^2 + ||lap d||^2`.
    pub energy_lady: f64,
    /// `||d - w0||_p` for `p` in [`LP_EXPONENTS`].
    pub lp_director: [f64; 4],
    pub linf_director: f64,
    pub grad_director_l2sq: f64,
    pub velocity_l2sq: f64,
    pub d_min: f64,
    pub d_max: f64,
    /// `||d - w0||_inf / (||grad d||^{1/2} ||lap d||^{1/2})`, 0 when undefined.
    pub linfty_ratio: f64,
    pub lowmode_sup: Option<f64>,
    pub g_ratio_sup: Option<f64>,
    pub divergence_ratio: f64,
}

impl DiagnosticsRecord {
    /// `||d - w0||_p` for one of [`LP_EXPONENTS`].
    pub fn lp(&self, p: u32) -> Option<f64> {
        LP_EXPONENTS.iter().position(|&q| q == p).map(|i| self.lp_director[i])
    }

    pub fn is_finite(&self) -> bool {
        let scalars = [
            self.t,
            self.energy_basic,
            self.dissipation,
            self.energy_lady,
            self.linf_director,
            self.grad_director_l2sq,
            self.velocity_l2sq,
            self.d_min,
            self.d_max,
            self.linfty_ratio,
            self.divergence_ratio,
        ];
        scalars.iter().chain(&self.lp_director).all(|v| v.is_finite())
            && self.lowmode_sup.is_none_or(|v| v.is_finite())
            && self.g_ratio_sup.is_none_or(|v| v.is_finite())
    }
}

fn sum3(f: impl Fn(usize) -> f64) -> f64 {
    (0..3).map(f).sum()
}

/// `sup |xi| |F u(xi)|` over `0 < |xi| <= radius`.
fn ball_sup(grid: &GridSpec, v: [&Array3<Complex64>; 3], radius: f64, weight: impl Fn(f64) -> f64) -> Option<f64> {
    let ball = SpectralMask::ball(grid, radius);
    let k0 = grid.fundamental();
    let volume = grid.volume();
    let mut best: Option<f64> = None;
    for ((ix, iy, iz), &keep) in ball.as_array().indexed_iter() {
        if !keep || (ix, iy, iz) == (0, 0, 0) {
            continue;
        }
        let m2 = grid.mode_xy(ix).pow(2) + grid.mode_xy(iy).pow(2) + (iz as i64).pow(2);
        let xi = k0 * (m2 as f64).sqrt();
        let amp = volume * sum3(|a| v[a][[ix, iy, iz]].norm_sqr()).sqrt();
        let value = weight(xi) * amp;
        best = Some(best.map_or(value, |b: f64| b.max(value)));
    }
    best
}

/// `sup_{0 < |xi| <= r(t)} |xi| |F u(xi, t)|` with `t` taken from the state.
pub fn lowmode_bound(state: &State, split: &FourierSplitConfig) -> Result<Option<f64>> {
    let radius = split.radius(state.t);
    Ok(ball_sup(state.grid(), state.u.spectral()?, radius, |xi| xi))
}

/// Fourier coefficients of `G = -(u . grad u) - grad p - div(grad d (x) grad d)`,
/// each term dealiased. `L^3` times these approximates the continuous transform.
pub fn g_spectrum(state: &State, params: &ModelParams) -> Result<VectorField> {
    let grid = *state.grid();
    if params.linear {
        return Ok(VectorField::zeros_spectral(grid));
    }
    let fft = plans(grid.n);
    let wn = grid.wavenumbers();
    let mask = SpectralMask::dealias(&grid);
    let u_t = state.u.spectral()?.map(|c| {
        let mut c = c.clone();
        mask_in_place(&mask, &mut c);
        c
    });
    let u_phys = u_t.clone().map(|c| fft.inverse(&c));
    let advection = [0, 1, 2].map(|i| {
        let grad = gradient_arrays(&wn, &u_t[i]).map(|g| fft.inverse(&g));
        let mut r = Array3::<f64>::zeros(grid.physical_shape());
        for j in 0..3 {
            Zip::from(&mut r).and(&u_phys[j]).and(&grad[j]).par_for_each(|r, &u, &g| *r += u * g);
        }
        let mut c = fft.forward(&r);
        mask_in_place(&mask, &mut c);
        c
    });
    let p = pressure_solve(&state.u, &state.d, params)?;
    let grad_p = gradient_arrays(&wn, p.spectral()?);
    let stress = ericksen_stress_div(&state.d)?;
    let stress = stress.spectral()?;
    let g = [0, 1, 2].map(|i| {
        let mut out = Array3::<Complex64>::zeros(grid.spectral_shape());
        Zip::from(&mut out)
            .and(&advection[i])
            .and(&grad_p[i])
            .and(stress[i])
            .par_for_each(|o, &a, &p, &s| *o = -a - p - s);
        out
    });
    Ok(VectorField::from_spectral_arrays(grid, g))
}

/// `sup_{0 < |xi| <= xi_cut} |G(xi)| / |xi|` for a spectrum from [`g_spectrum`].
pub fn g_ratio(g: &VectorField, xi_cut: f64) -> Result<Option<f64>> {
    Ok(ball_sup(g.grid(), g.spectral()?, xi_cut, |xi| 1.0 / xi))
}

/// `||grad v||^2 / (||v|| ||lap v||)`, at most 1 for every band-limited
/// field on the torus; 0 for the zero field.
pub fn gn_check(v: &VectorField) -> Result<f64> {
    let grid = v.grid();
    let c = v.spectral()?;
    let l2 = sum3(|a| spectral_l2_sq(grid, c[a]));
    let h1 = sum3(|a| spectral_moment(grid, c[a], 1));
    let h2 = sum3(|a| spectral_moment(grid, c[a], 2));
    let denom = (l2 * h2).sqrt();
    Ok(if denom == 0.0 { 0.0 } else { h1 / denom })
}

/// Evaluates every monitored quantity of `state`.
pub fn compute_record(state: &State, params: &ModelParams, split: &FourierSplitConfig) -> Result<DiagnosticsRecord> {
    if !state.is_finite() {
        return Err(Error::BlowUp {
            t: state.t,
            what: "non-finite state in diagnostics".into(),
        });
    }
    let grid = *state.grid();
    let fft = plans(grid.n);
    let wn = grid.wavenumbers();
    let u = state.u.spectral()?;
    let d = state.d.spectral()?;
    let w0 = params.w0;

    let velocity_l2sq = sum3(|a| spectral_l2_sq(&grid, u[a]));
    let grad_u = sum3(|a| spectral_moment(&grid, u[a], 1));
    let grad_d = sum3(|a| spectral_moment(&grid, d[a], 1));
    let lap_d_sq = sum3(|a| spectral_moment(&grid, d[a], 2));

    let d_phys = d.map(|c| fft.inverse(c));
    let d_refs = [&d_phys[0], &d_phys[1], &d_phys[2]];

    let (penalty, residual) = if params.linear {
        (0.0, lap_d_sq)
    } else {
        let f = penalty_array(d_refs, params.eta);
        let penalty = grid.cell_volume() * det_sum(f.as_slice().expect("standard layout"), |_, v| *v);
        let force = gl_force_arrays(d_refs, params.eta);
        let residual = sum3(|a| {
            let mut r = laplacian_array(&wn, d[a]);
            let fa = fft.forward(&force[a]);
            Zip::from(&mut r).and(&fa).par_for_each(|r, &f| *r -= f);
            spectral_l2_sq(&grid, &r)
        });
        (penalty, residual)
    };

    let mut dev = Array3::<f64>::zeros(grid.physical_shape());
    let mut mag = Array3::<f64>::zeros(grid.physical_shape());
    Zip::from(&mut dev)
        .and(&mut mag)
        .and(d_refs[0])
        .and(d_refs[1])
        .and(d_refs[2])
        .par_for_each(|dev, mag, &a, &b, &c| {
            *dev = ((a - w0[0]).powi(2) + (b - w0[1]).powi(2) + (c - w0[2]).powi(2)).sqrt();
            *mag = (a * a + b * b + c * c).sqrt();
        });
    let dev_s = dev.as_slice().expect("standard layout");
    let lp_director = LP_EXPONENTS.map(|p| {
        let s = grid.cell_volume() * det_sum(dev_s, |_, v| v.powi(p as i32));
        s.powf(1.0 / p as f64)
    });
    let linf_director = dev_s.iter().fold(0.0f64, |m, &v| m.max(v));
    let d_min = mag.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let d_max = mag.iter().fold(0.0f64, |m, &v| m.max(v));

    let denom = (grad_d.sqrt() * lap_d_sq.sqrt()).sqrt();
    let linfty_ratio = if denom > 0.0 { linf_director / denom } else { 0.0 };

    let g = g_spectrum(state, params)?;
    let record = DiagnosticsRecord {
        t: state.t,
        energy_basic: 0.5 * velocity_l2sq + 0.5 * grad_d + penalty,
        dissipation: params.nu * grad_u + residual,
        energy_lady: grad_u + lap_d_sq,
        lp_director,
        linf_director,
        grad_director_l2sq: grad_d,
        velocity_l2sq,
        d_min,
        d_max,
        linfty_ratio,
        lowmode_sup: lowmode_bound(state, split)?,
        g_ratio_sup: g_ratio(&g, split.xi_cut)?,
        divergence_ratio: state.divergence_ratio(),
    };
    if !record.is_finite() {
        return Err(Error::BlowUp {
            t: state.t,
            what: "non-finite diagnostics".into(),
        });
    }
    Ok(record)
}

/// `||u||^2` by grid quadrature, for Parseval cross-checks.
pub fn velocity_l2sq_physical(state: &State) -> Result<f64> {
    let grid = *state.grid();
    let u = state.u.inverse()?;
    Ok(u.physical()?
        .iter()
        .map(|c| crate::spectral::field::physical_l2_sq(&grid, c))
        .sum())
}
