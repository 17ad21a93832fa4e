//! Self-test of the discretisation on the configured grid and model.

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::report::SCHEMA_VERSION;
use crate::diagnostics::{compute_record, energy_inequality_audit, gn_check, DEFAULT_LADY_BOUND};
use crate::error::Result;
use crate::lcd::init::{DirectorInit, VelocityInit};
use crate::lcd::{make_initial_conditions, step_imex, DirectorPattern, InitSpec, Scheme, State, VelocityPattern};
use crate::spectral::{divergence, leray_project, VectorField};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub schema_version: u32,
    pub checks: Vec<CheckResult>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn at_most(name: &str, value: f64, limit: f64) -> CheckResult {
    CheckResult {
        name: name.into(),
        passed: value <= limit,
        value,
        limit,
    }
}

fn max_abs_diff(a: &VectorField, b: &VectorField) -> Result<f64> {
    let mut worst = 0.0f64;
    for (x, y) in a.physical()?.iter().zip(b.physical()?) {
        for (p, q) in x.iter().zip(y.iter()) {
            worst = worst.max((p - q).abs());
        }
    }
    Ok(worst)
}

/// Seeded noise initial data on the configured grid, band-limited so that
/// cubic products stay inside the retained modes.
fn noisy_state(config: &RunConfig, amplitude: f64) -> Result<State> {
    let kmax = (config.grid.kept_limit() / 4).max(1) as u32;
    let spec = InitSpec {
        velocity: VelocityInit {
            pattern: VelocityPattern::Random { kmax },
            amplitude,
        },
        director: DirectorInit {
            pattern: DirectorPattern::Random { kmax },
            amplitude,
        },
        normalize: true,
        seed: config.seed,
    };
    Ok(make_initial_conditions(&spec, &config.grid, &config.model)?.0)
}

/// Round trips, projection, stationarity, the interpolation inequality, and
/// a short nonlinear run against the pointwise and energy bounds.
pub fn check_suite(config: &RunConfig) -> Result<CheckReport> {
    let config = config.clone().validated()?;
    let params = config.model;
    let mut checks = Vec::new();

    let state = noisy_state(&config, 0.2)?;
    let d = state.d.to_physical()?;
    let back = d.forward()?.inverse()?;
    checks.push(at_most("fft_round_trip", max_abs_diff(&d, &back)?, 1e-12));

    let parseval = (d.l2_norm_sq() - state.d.l2_norm_sq()).abs() / d.l2_norm_sq();
    checks.push(at_most("parseval", parseval, 1e-12));

    let projected = leray_project(&state.d)?;
    let div = divergence(&projected)?.to_physical()?;
    let div_max = div.physical()?.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    checks.push(at_most("leray_divergence", div_max, 1e-10));

    let twice = leray_project(&projected)?.to_physical()?;
    checks.push(at_most("leray_idempotent", max_abs_diff(&projected.to_physical()?, &twice)?, 1e-12));

    checks.push(at_most("gagliardo_nirenberg", gn_check(&state.d)?, 1.0 + 1e-12));

    let mut rest = State::rest(config.grid, &params);
    for _ in 0..5 {
        rest = step_imex(&rest, &params, config.time.dt, config.time.scheme)?;
    }
    let drift = max_abs_diff(&rest.d.to_physical()?, &State::rest(config.grid, &params).d.to_physical()?)?
        .max(rest.max_velocity()?);
    checks.push(at_most("rest_is_stationary", drift, 0.0));

    let mut s = noisy_state(&config, 0.05)?;
    let mut records = vec![compute_record(&s, &params, &config.split)?];
    for _ in 0..20 {
        let dt = config.time.step_size(&config.grid, &params, s.max_velocity()?);
        s = step_imex(&s, &params, dt, Scheme::PredictorCorrector)?;
        records.push(compute_record(&s, &params, &config.split)?);
    }
    let div = records.iter().map(|r| r.divergence_ratio).fold(0.0, f64::max);
    checks.push(at_most("divergence_free_run", div, config.checks.divergence_tol));
    let d_max = records.iter().map(|r| r.d_max).fold(0.0, f64::max);
    checks.push(at_most("max_principle_run", d_max, 1.0 + config.checks.max_principle_tol));
    let audit = energy_inequality_audit(&records, &params, DEFAULT_LADY_BOUND)?;
    checks.push(at_most(
        "energy_law_run",
        audit.max_violation,
        config.checks.energy_rel_tol * audit.initial_energy,
    ));

    Ok(CheckReport {
        schema_version: SCHEMA_VERSION,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::parse_config;

    #[test]
    fn suite_passes_on_small_grid() {
        let c = parse_config("seed = 3\n[grid]\nn = 16\nbox_length = 12.0\n[time]\ndt = 0.02\nt_end = 1.0\n").unwrap();
        let r = check_suite(&c).unwrap();
        for c in &r.checks {
            assert!(c.passed, "{c:?}");
        }
        assert!(r.passed());
    }
}
