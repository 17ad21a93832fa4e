//! Power-law fits `v(t) ~ A (1 + t)^alpha`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_FIT_SAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub window: [f64; 2],
    pub r_squared: f64,
    pub samples: usize,
}

/// Least-squares line through `(x, y)`: slope, intercept, r^2.
///
/// A series with no spread in `y` beyond rounding gets `r^2 = 1`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let ss_tot: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let flat = ss_tot <= n * (64.0 * f64::EPSILON * scale).powi(2);
    let r2 = if flat { 1.0 } else { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) };
    (slope, intercept, r2)
}

fn window_samples(series: &[(f64, f64)], window: [f64; 2]) -> Result<Vec<(f64, f64)>> {
    let [t1, t2] = window;
    if !(t1.is_finite() && t2.is_finite() && t1 < t2 && t1 > -1.0) {
        return Err(Error::FitDomain(format!("window [{t1}, {t2}] is not an interval in t > -1")));
    }
    let picked: Vec<(f64, f64)> = series.iter().copied().filter(|&(t, _)| t >= t1 && t <= t2).collect();
    if picked.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientData {
            needed: MIN_FIT_SAMPLES,
            got: picked.len(),
        });
    }
    if let Some(&(t, v)) = picked.iter().find(|&&(_, v)| !(v > 0.0 && v.is_finite())) {
        return Err(Error::FitDomain(format!("value {v} at t = {t} is not positive")));
    }
    Ok(picked)
}

/// Fits `ln v = ln A + alpha ln(1 + t)` over the samples with `t` in `window`.
pub fn fit_decay(series: &[(f64, f64)], window: [f64; 2]) -> Result<DecayFit> {
    let picked = window_samples(series, window)?;
    let x: Vec<f64> = picked.iter().map(|(t, _)| (1.0 + t).ln()).collect();
    let y: Vec<f64> = picked.iter().map(|(_, v)| v.ln()).collect();
    let (slope, intercept, r2) = linear_fit(&x, &y);
    Ok(DecayFit {
        exponent: slope,
        prefactor: intercept.exp(),
        window,
        r_squared: r2,
        samples: picked.len(),
    })
}

/// Fits `ln v = c - lambda t`; returns `(lambda, r^2)`.
pub fn fit_exponential(series: &[(f64, f64)], window: [f64; 2]) -> Result<(f64, f64)> {
    let picked = window_samples(series, window)?;
    let x: Vec<f64> = picked.iter().map(|(t, _)| *t).collect();
    let y: Vec<f64> = picked.iter().map(|(_, v)| v.ln()).collect();
    let (slope, _, r2) = linear_fit(&x, &y);
    Ok((-slope, r2))
}
