//! Initial-condition generators.
//!
//! The velocity is built from a raw pattern, Leray-projected and given zero
//! mean. The director is `d0 = (w0 + phi) / |w0 + phi|` when normalisation is
//! on and `w0 + phi` otherwise; in both cases `|w0 + phi| >= 1/2` is required.

use ndarray::{Array3, Zip};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dynamics::State;
use super::model::ModelParams;
use crate::error::{Error, Result};
use crate::spectral::field::{spectral_l2_sq, spectral_moment};
use crate::spectral::ops::{leray_in_place, mask_in_place};
use crate::spectral::{GridSpec, SpectralMask, VectorField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum VelocityPattern {
    #[default]
    Zero,
    /// `(sin kx cos ky cos kz, -cos kx sin ky cos kz, 0)` with `k = 2 pi / L`.
    TaylorGreen,
    /// `direction * exp(-|x|^2 / (2 sigma^2))` before projection. The
    /// projected field has a bounded, direction-dependent low-mode spectrum.
    GaussianJet { sigma: f64, direction: [f64; 3] },
    /// `sigma * curl(exp(-|x|^2 / (2 sigma^2)) e_z)`, a swirl whose spectrum
    /// vanishes linearly at the origin.
    CurlGaussian { sigma: f64 },
    /// Seeded noise keeping modes with every `|m_j| <= kmax`.
    Random { kmax: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DirectorPattern {
    #[default]
    Zero,
    /// `direction * sin(2 pi m . x / L)`.
    SineMode { mode: [i64; 3], direction: [f64; 3] },
    /// `direction * exp(-|x|^2 / (2 sigma^2))`, centred in the box.
    GaussianBump { sigma: f64, direction: [f64; 3] },
    /// Seeded noise keeping modes with every `|m_j| <= kmax`.
    Random { kmax: u32 },
}

impl VelocityPattern {
    /// Whether the pattern is the same function of `x` in every box that
    /// contains its support. Box-periodic modes and seeded noise are not.
    pub fn is_nested(&self) -> bool {
        matches!(
            self,
            VelocityPattern::Zero | VelocityPattern::GaussianJet { .. } | VelocityPattern::CurlGaussian { .. }
        )
    }
}

impl DirectorPattern {
    pub fn is_nested(&self) -> bool {
        matches!(self, DirectorPattern::Zero | DirectorPattern::GaussianBump { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct VelocityInit {
    #[serde(default, flatten)]
    pub pattern: VelocityPattern,
    #[serde(default)]
    pub amplitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct DirectorInit {
    #[serde(default, flatten)]
    pub pattern: DirectorPattern,
    #[serde(default)]
    pub amplitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitSpec {
    #[serde(default)]
    pub velocity: VelocityInit,
    #[serde(default)]
    pub director: DirectorInit,
    #[serde(default = "yes")]
    pub normalize: bool,
    /// Seed for the random patterns; set from the run configuration.
    #[serde(skip)]
    pub seed: u64,
}

fn yes() -> bool {
    true
}

impl Default for InitSpec {
    fn default() -> Self {
        InitSpec {
            velocity: VelocityInit::default(),
            director: DirectorInit::default(),
            normalize: true,
            seed: 0,
        }
    }
}

impl InitSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.velocity.amplitude.is_finite() {
            return Err(Error::config("init.velocity.amplitude", "must be finite"));
        }
        if !self.director.amplitude.is_finite() {
            return Err(Error::config("init.director.amplitude", "must be finite"));
        }
        match self.velocity.pattern {
            VelocityPattern::GaussianJet { sigma, direction } => {
                positive("init.velocity.sigma", sigma)?;
                unit("init.velocity.direction", direction)?;
            }
            VelocityPattern::CurlGaussian { sigma } => positive("init.velocity.sigma", sigma)?,
            VelocityPattern::Random { kmax: 0 } => {
                return Err(Error::config("init.velocity.kmax", "must be >= 1"))
            }
            _ => {}
        }
        match self.director.pattern {
            DirectorPattern::SineMode { direction, .. } => {
                unit("init.director.direction", direction)?;
            }
            DirectorPattern::GaussianBump { sigma, direction } => {
                positive("init.director.sigma", sigma)?;
                unit("init.director.direction", direction)?;
            }
            DirectorPattern::Random { kmax: 0 } => {
                return Err(Error::config("init.director.kmax", "must be >= 1"))
            }
            _ => {}
        }
        Ok(())
    }

    pub fn is_nested(&self) -> bool {
        self.velocity.pattern.is_nested() && self.director.pattern.is_nested()
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::config(field, format!("{v} must be positive")))
    }
}

fn unit(field: &str, v: [f64; 3]) -> Result<[f64; 3]> {
    let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    if norm.is_finite() && norm > 0.0 {
        Ok(v.map(|c| c / norm))
    } else {
        Err(Error::config(field, "must be a nonzero finite vector"))
    }
}

/// Norms of the generated data, reported for the smallness hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitReport {
    pub u_l2: f64,
    pub grad_u_l2: f64,
    pub d_minus_w0_l1: f64,
    pub d_minus_w0_l2: f64,
    pub d_minus_w0_h2: f64,
    /// `||u0||_{H^1}^2 + ||d0 - w0||_{H^2}^2`.
    pub smallness: f64,
    /// Smallest `|w0 + phi|` before normalisation.
    pub min_w0_plus_phi: f64,
    pub d_min: f64,
    pub d_max: f64,
}

fn gaussian(x: [f64; 3], sigma: f64) -> f64 {
    (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (2.0 * sigma * sigma)).exp()
}

/// Three seeded noise components restricted to `|m_j| <= kmax`, physical.
fn band_limited_noise(grid: &GridSpec, kmax: u32, rng: &mut ChaCha8Rng) -> [Array3<f64>; 3] {
    let fft = crate::spectral::fft::plans(grid.n);
    let keep = SpectralMask::from_fn(grid, |m| m.iter().all(|&c| c.unsigned_abs() <= kmax as u64));
    [(); 3].map(|_| {
        let noise = Array3::from_shape_simple_fn(grid.physical_shape(), || rng.gen_range(-1.0..1.0));
        let mut c = fft.forward(&noise);
        mask_in_place(&keep, &mut c);
        fft.inverse(&c)
    })
}

fn max_magnitude(v: &[Array3<f64>; 3]) -> f64 {
    let mut m = 0.0f64;
    Zip::from(&v[0]).and(&v[1]).and(&v[2]).for_each(|a, b, c| {
        m = m.max((a * a + b * b + c * c).sqrt());
    });
    m
}

fn scale_to_max(v: &mut [Array3<f64>; 3], amplitude: f64) {
    let m = max_magnitude(v);
    if m > 0.0 {
        for c in v.iter_mut() {
            c.mapv_inplace(|x| x * amplitude / m);
        }
    }
}

fn raw_velocity(spec: &InitSpec, grid: &GridSpec, rng: &mut ChaCha8Rng) -> Result<[Array3<f64>; 3]> {
    let a = spec.velocity.amplitude;
    let k = grid.fundamental();
    let field = match spec.velocity.pattern {
        VelocityPattern::Zero => VectorField::constant(*grid, [0.0; 3]),
        VelocityPattern::TaylorGreen => VectorField::from_fn(*grid, |[x, y, z]| {
            let (x, y, z) = (k * x, k * y, k * z);
            [a * x.sin() * y.cos() * z.cos(), -a * x.cos() * y.sin() * z.cos(), 0.0]
        }),
        VelocityPattern::GaussianJet { sigma, direction } => {
            let e = unit("init.velocity.direction", direction)?;
            VectorField::from_fn(*grid, |x| e.map(|c| a * c * gaussian(x, sigma)))
        }
        VelocityPattern::CurlGaussian { sigma } => VectorField::from_fn(*grid, |x| {
            let g = gaussian(x, sigma) / sigma;
            [-a * x[1] * g, a * x[0] * g, 0.0]
        }),
        VelocityPattern::Random { kmax } => {
            return Ok(band_limited_noise(grid, kmax, rng));
        }
    };
    Ok(field.physical()?.map(|c| c.clone()))
}

fn perturbation(spec: &InitSpec, grid: &GridSpec, rng: &mut ChaCha8Rng) -> Result<[Array3<f64>; 3]> {
    let a = spec.director.amplitude;
    let k = grid.fundamental();
    let field = match spec.director.pattern {
        DirectorPattern::Zero => VectorField::constant(*grid, [0.0; 3]),
        DirectorPattern::SineMode { mode, direction } => {
            let e = unit("init.director.direction", direction)?;
            let m = mode.map(|c| c as f64 * k);
            VectorField::from_fn(*grid, |x| {
                let s = (m[0] * x[0] + m[1] * x[1] + m[2] * x[2]).sin();
                e.map(|c| a * c * s)
            })
        }
        DirectorPattern::GaussianBump { sigma, direction } => {
            let e = unit("init.director.direction", direction)?;
            VectorField::from_fn(*grid, |x| e.map(|c| a * c * gaussian(x, sigma)))
        }
        DirectorPattern::Random { kmax } => {
            let mut v = band_limited_noise(grid, kmax, rng);
            scale_to_max(&mut v, a.abs());
            return Ok(v);
        }
    };
    Ok(field.physical()?.map(|c| c.clone()))
}

/// Raw (unprojected) velocity pattern and director perturbation `phi`,
/// physical, exactly as sampled on the grid.
pub fn raw_patterns(spec: &InitSpec, grid: &GridSpec) -> Result<(VectorField, VectorField)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let u = raw_velocity(spec, grid, &mut rng)?;
    let phi = perturbation(spec, grid, &mut rng)?;
    Ok((
        VectorField::from_physical_arrays(*grid, u),
        VectorField::from_physical_arrays(*grid, phi),
    ))
}

/// Builds `(u0, d0)` at `t = 0` and reports their norms.
pub fn make_initial_conditions(
    spec: &InitSpec,
    grid: &GridSpec,
    params: &ModelParams,
) -> Result<(State, InitReport)> {
    grid.validate()?;
    let params = params.normalized()?;
    let (raw_u, phi) = raw_patterns(spec, grid)?;

    let wn = grid.wavenumbers();
    let mut u_hat = raw_u.forward()?.spectral()?.map(|c| c.clone());
    leray_in_place(&wn, &mut u_hat);
    for c in &mut u_hat {
        c[[0, 0, 0]] = Complex64::default();
    }
    if let VelocityPattern::Random { .. } = spec.velocity.pattern {
        let fft = crate::spectral::fft::plans(grid.n);
        let m = max_magnitude(&u_hat.clone().map(|c| fft.inverse(&c)));
        if m > 0.0 {
            let s = spec.velocity.amplitude.abs() / m;
            for c in u_hat.iter_mut() {
                c.mapv_inplace(|z| z * s);
            }
        }
    }
    let u = VectorField::from_spectral_arrays(*grid, u_hat);

    let w0 = params.w0;
    let phi = phi.physical()?;
    let mut d = [(); 3].map(|_| Array3::<f64>::zeros(grid.physical_shape()));
    let mut min_norm = f64::INFINITY;
    {
        let [dx, dy, dz] = &mut d;
        Zip::from(dx).and(dy).and(dz).and(phi[0]).and(phi[1]).and(phi[2]).for_each(
            |dx, dy, dz, &p0, &p1, &p2| {
                let v = [w0[0] + p0, w0[1] + p1, w0[2] + p2];
                let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                min_norm = min_norm.min(norm);
                let s = if spec.normalize { 1.0 / norm } else { 1.0 };
                *dx = v[0] * s;
                *dy = v[1] * s;
                *dz = v[2] * s;
            },
        );
    }
    if !(min_norm >= 0.5) {
        return Err(Error::PerturbationTooLarge { min_norm });
    }
    let d_phys = VectorField::from_physical_arrays(*grid, d);
    let magnitude = d_phys.magnitude()?;
    let d_min = magnitude.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let d_max = magnitude.iter().fold(0.0f64, |m, &v| m.max(v));

    let mut l1 = 0.0;
    let [dx, dy, dz] = d_phys.physical()?;
    Zip::from(dx).and(dy).and(dz).for_each(|a, b, c| {
        l1 += ((a - w0[0]).powi(2) + (b - w0[1]).powi(2) + (c - w0[2]).powi(2)).sqrt();
    });
    let l1 = l1 * grid.cell_volume();

    let d = d_phys.forward()?;
    let u_sp = u.spectral()?;
    let u_l2sq: f64 = u_sp.iter().map(|c| spectral_l2_sq(grid, c)).sum();
    let grad_u_sq: f64 = u_sp.iter().map(|c| spectral_moment(grid, c, 1)).sum();
    let mut dev = d.spectral()?.map(|c| c.clone());
    for (c, w) in dev.iter_mut().zip(w0) {
        c[[0, 0, 0]] -= w;
    }
    let dev_l2sq: f64 = dev.iter().map(|c| spectral_l2_sq(grid, c)).sum();
    let dev_h1: f64 = dev.iter().map(|c| spectral_moment(grid, c, 1)).sum();
    let dev_h2: f64 = dev.iter().map(|c| spectral_moment(grid, c, 2)).sum();
    let h2sq = dev_l2sq + dev_h1 + dev_h2;

    let report = InitReport {
        u_l2: u_l2sq.sqrt(),
        grad_u_l2: grad_u_sq.sqrt(),
        d_minus_w0_l1: l1,
        d_minus_w0_l2: dev_l2sq.sqrt(),
        d_minus_w0_h2: h2sq.sqrt(),
        smallness: u_l2sq + grad_u_sq + h2sq,
        min_w0_plus_phi: min_norm,
        d_min,
        d_max,
    };
    Ok((State::new(u, d, 0.0)?, report))
}
