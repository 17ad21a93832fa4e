//! Audit of a record series against the energy inequalities and the
//! `L^1` growth envelope.

use serde::{Deserialize, Serialize};

use super::record::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::lcd::ModelParams;

/// Envelope `(C0 t + ||d0 - w0||_1) e^{C t}` for `||d(t) - w0||_1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct L1Envelope {
    /// `max_t ||u|| ||grad d||` over the run.
    pub c0: f64,
    /// `2 / eta^2`, the Lipschitz bound of `f` on `|d| <= 1`.
    pub c: f64,
    /// Smallest rate `C` for which the envelope with this `C0` would hold.
    pub c_required: f64,
    /// `max_t ||d - w0||_1 / envelope(t)`.
    pub max_ratio: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyAudit {
    pub samples: usize,
    pub initial_energy: f64,
    /// `max_n (E(t_n) + int_0^{t_n} D - E(0))^+`, trapezoidal in time.
    pub max_violation: f64,
    /// `max_n (E(t_{n+1}) - E(t_n) + int_{t_n}^{t_{n+1}} D)^+`.
    pub max_step_violation: f64,
    /// `max_n |E(t_n) + int_0^{t_n} D - E(0)|`.
    pub max_abs_defect: f64,
    /// `max_t energy_lady(t) / energy_lady(0)`; 1 when both vanish.
    pub lady_factor: f64,
    pub lady_bound: f64,
    pub lady_holds: bool,
    pub l1: L1Envelope,
}

pub const DEFAULT_LADY_BOUND: f64 = 1.0 + 1e-6;

/// Sequential fold over an ordered record series.
pub fn energy_inequality_audit(
    records: &[DiagnosticsRecord],
    params: &ModelParams,
    lady_bound: f64,
) -> Result<EnergyAudit> {
    if records.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: records.len(),
        });
    }
    let e0 = records[0].energy_basic;
    let mut integral = 0.0;
    let (mut max_violation, mut max_step, mut max_abs) = (0.0f64, 0.0f64, 0.0f64);
    for w in records.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let step = 0.5 * (b.t - a.t) * (a.dissipation + b.dissipation);
        integral += step;
        let defect = b.energy_basic + integral - e0;
        max_violation = max_violation.max(defect);
        max_abs = max_abs.max(defect.abs());
        max_step = max_step.max(b.energy_basic - a.energy_basic + step);
    }

    let lady0 = records[0].energy_lady;
    let lady_max = records.iter().map(|r| r.energy_lady).fold(0.0f64, f64::max);
    let lady_factor = if lady0 > 0.0 {
        lady_max / lady0
    } else if lady_max == 0.0 {
        1.0
    } else {
        f64::INFINITY
    };

    let l1_0 = records[0].lp_director[0];
    let c0 = records
        .iter()
        .map(|r| (r.velocity_l2sq * r.grad_director_l2sq).sqrt())
        .fold(0.0f64, f64::max);
    let c = 2.0 / (params.eta * params.eta);
    let mut max_ratio = 0.0f64;
    let mut c_required = 0.0f64;
    for r in records {
        let t = r.t - records[0].t;
        let base = c0 * t + l1_0;
        let envelope = base * (c * t).exp();
        let l1 = r.lp_director[0];
        if envelope > 0.0 {
            max_ratio = max_ratio.max(l1 / envelope);
        } else if l1 > 0.0 {
            max_ratio = f64::INFINITY;
        }
        if t > 0.0 && base > 0.0 && l1 > base {
            c_required = c_required.max((l1 / base).ln() / t);
        }
    }

    Ok(EnergyAudit {
        samples: records.len(),
        initial_energy: e0,
        max_violation,
        max_step_violation: max_step,
        max_abs_defect: max_abs,
        lady_factor,
        lady_bound,
        lady_holds: lady_factor <= lady_bound,
        l1: L1Envelope {
            c0,
            c,
            c_required,
            max_ratio,
            holds: max_ratio <= 1.0 + 1e-12,
        },
    })
}
