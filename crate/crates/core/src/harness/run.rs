//! Run orchestration and artifacts.
//!
//! An output directory receives:
//!
//! | file                | content                                              |
//! |---------------------|------------------------------------------------------|
//! | `config.toml`       | the validated configuration                          |
//! | `records.csv`       | one row per sample, columns [`CSV_COLUMNS`], flushed |
//! |                     | after every row so a crash leaves a readable prefix  |
//! | `init.json`         | norms of the initial data                            |
//! | `summary.json`      | status, invariant checks, energy audit               |
//! | `decay.json`        | decay fits against the whole-space exponents         |
//! | `checkpoint/`       | last good state (`u.field`, `d.field`, `meta.toml`)   |
//!
//! Every JSON document carries `"schema_version": 1`. Empty CSV cells mean
//! "undefined" (an empty Fourier-splitting ball).
//!
//! Diagnostics are evaluated after every step: the energy audit and the
//! invariant checks see the full series, while `time.output_every` only
//! thins the CSV rows and the samples used for decay fits.

use std::fs::{self, File};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{save_config, RunConfig};
use super::report::{decay_report, DecayReport, SCHEMA_VERSION};
use crate::diagnostics::{compute_record, energy_inequality_audit, DiagnosticsRecord, EnergyAudit};
use crate::error::{Error, Result};
use crate::lcd::{make_initial_conditions, save_checkpoint, step_imex, InitReport, State};

pub const CSV_COLUMNS: [&str; 19] = [
    "t",
    "step",
    "dt",
    "energy_basic",
    "dissipation",
    "energy_lady",
    "d_l1",
    "d_l2",
    "d_l4",
    "d_l8",
    "d_linf",
    "grad_d_l2sq",
    "u_l2sq",
    "d_min",
    "d_max",
    "linfty_ratio",
    "lowmode_sup",
    "g_ratio_sup",
    "divergence_ratio",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Completed,
    InvariantViolation,
    BlowUp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantCheck {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowUpInfo {
    pub t: f64,
    pub what: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub status: RunStatus,
    pub steps: u64,
    pub samples: usize,
    pub t_final: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blow_up: Option<BlowUpInfo>,
    pub invariants: Vec<InvariantCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub audit: Option<EnergyAudit>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub records: Vec<DiagnosticsRecord>,
    /// Sample step indices and step sizes, aligned with `records`.
    pub steps: Vec<(u64, f64)>,
    pub final_state: State,
    pub init: InitReport,
    pub decay: DecayReport,
    pub summary: RunSummary,
}

impl RunOutcome {
    pub fn status(&self) -> RunStatus {
        self.summary.status
    }
}

/// Streaming CSV sink for records.
pub struct RecordWriter {
    writer: csv::Writer<File>,
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |v| v.to_string())
}

impl RecordWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut writer = csv::Writer::from_writer(file);
        writer.write_record(CSV_COLUMNS)?;
        writer.flush().map_err(|e| Error::io(path, e))?;
        Ok(RecordWriter { writer })
    }

    pub fn write(&mut self, step: u64, dt: f64, r: &DiagnosticsRecord) -> Result<()> {
        let row = [
            r.t.to_string(),
            step.to_string(),
            dt.to_string(),
            r.energy_basic.to_string(),
            r.dissipation.to_string(),
            r.energy_lady.to_string(),
            r.lp_director[0].to_string(),
            r.lp_director[1].to_string(),
            r.lp_director[2].to_string(),
            r.lp_director[3].to_string(),
            r.linf_director.to_string(),
            r.grad_director_l2sq.to_string(),
            r.velocity_l2sq.to_string(),
            r.d_min.to_string(),
            r.d_max.to_string(),
            r.linfty_ratio.to_string(),
            opt(r.lowmode_sup),
            opt(r.g_ratio_sup),
            r.divergence_ratio.to_string(),
        ];
        self.writer.write_record(&row)?;
        self.writer.flush().map_err(|e| Error::Format(e.to_string()))?;
        Ok(())
    }
}

/// Reads back a `records.csv`, returning `(step, dt, record)` rows.
pub fn read_records_csv(path: &Path) -> Result<Vec<(u64, f64, DiagnosticsRecord)>> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    if headers.iter().ne(CSV_COLUMNS) {
        return Err(Error::Format(format!("{}: unexpected columns", path.display())));
    }
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row?;
        let f = |i: usize| -> Result<f64> {
            row[i]
                .parse::<f64>()
                .map_err(|e| Error::Format(format!("column {}: {e}", CSV_COLUMNS[i])))
        };
        let o = |i: usize| -> Result<Option<f64>> { if row[i].is_empty() { Ok(None) } else { f(i).map(Some) } };
        let step = row[1]
            .parse::<u64>()
            .map_err(|e| Error::Format(format!("column step: {e}")))?;
        out.push((
            step,
            f(2)?,
            DiagnosticsRecord {
                t: f(0)?,
                energy_basic: f(3)?,
                dissipation: f(4)?,
                energy_lady: f(5)?,
                lp_director: [f(6)?, f(7)?, f(8)?, f(9)?],
                linf_director: f(10)?,
                grad_director_l2sq: f(11)?,
                velocity_l2sq: f(12)?,
                d_min: f(13)?,
                d_max: f(14)?,
                linfty_ratio: f(15)?,
                lowmode_sup: o(16)?,
                g_ratio_sup: o(17)?,
                divergence_ratio: f(18)?,
            },
        ));
    }
    Ok(out)
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

fn invariant_checks(config: &RunConfig, init: &InitReport, records: &[DiagnosticsRecord], audit: Option<&EnergyAudit>) -> Vec<InvariantCheck> {
    let c = &config.checks;
    let mut checks = Vec::new();
    let max = |f: fn(&DiagnosticsRecord) -> f64| records.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    checks.push(InvariantCheck {
        name: "divergence_free".into(),
        value: max(|r| r.divergence_ratio),
        limit: c.divergence_tol,
        passed: max(|r| r.divergence_ratio) <= c.divergence_tol,
    });
    let bounded_start = init.d_max <= 1.0 + 1e-12;
    if bounded_start {
        let d_max = max(|r| r.d_max);
        checks.push(InvariantCheck {
            name: "max_principle".into(),
            value: d_max,
            limit: 1.0 + c.max_principle_tol,
            passed: d_max <= 1.0 + c.max_principle_tol,
        });
    }
    if let Some(small) = c.smallness {
        if init.smallness <= small {
            let d_min = records.iter().map(|r| r.d_min).fold(f64::INFINITY, f64::min);
            checks.push(InvariantCheck {
                name: "min_modulus".into(),
                value: d_min,
                limit: 0.5,
                passed: d_min >= 0.5,
            });
        }
    }
    if let Some(a) = audit {
        let limit = c.energy_rel_tol * a.initial_energy;
        checks.push(InvariantCheck {
            name: "energy_law".into(),
            value: a.max_violation,
            limit,
            passed: a.max_violation <= limit,
        });
        checks.push(InvariantCheck {
            name: "ladyzhenskaya".into(),
            value: a.lady_factor,
            limit: c.lady_factor,
            passed: a.lady_factor <= c.lady_factor,
        });
        if bounded_start {
            checks.push(InvariantCheck {
                name: "l1_envelope".into(),
                value: a.l1.max_ratio,
                limit: 1.0,
                passed: a.l1.holds,
            });
        }
    }
    checks
}

fn execute(config: &RunConfig, mut sink: Option<&mut RecordWriter>) -> Result<RunOutcome> {
    let config = config.clone().validated()?;
    let grid = config.grid;
    let params = config.model;
    let time = config.time;
    let (mut state, init) = make_initial_conditions(&config.init, &grid, &params)?;

    let mut records = Vec::new();
    let mut steps = Vec::new();
    let mut blow_up = None;
    let mut step: u64 = 0;

    let first = compute_record(&state, &params, &config.split)?;
    if let Some(w) = sink.as_deref_mut() {
        w.write(0, 0.0, &first)?;
    }
    records.push(first.clone());
    steps.push((0, 0.0));
    let mut every = vec![first];

    let finish = time.t_end;
    let slack = 1e-9 * time.dt;
    while finish - state.t > slack {
        let vmax = if time.clamp { state.max_velocity()? } else { 0.0 };
        let mut dt = time.step_size(&grid, &params, vmax);
        let last = finish - state.t <= dt + slack;
        if last {
            dt = finish - state.t;
        }
        let next = match step_imex(&state, &params, dt, time.scheme) {
            Ok(s) => s,
            Err(Error::BlowUp { t, what }) => {
                blow_up = Some(BlowUpInfo { t, what });
                break;
            }
            Err(e) => return Err(e),
        };
        step += 1;
        let r = match compute_record(&next, &params, &config.split) {
            Ok(r) => r,
            Err(Error::BlowUp { t, what }) => {
                blow_up = Some(BlowUpInfo { t, what });
                break;
            }
            Err(e) => return Err(e),
        };
        if step.is_multiple_of(time.output_every as u64) || last {
            if let Some(w) = sink.as_deref_mut() {
                w.write(step, dt, &r)?;
            }
            records.push(r.clone());
            steps.push((step, dt));
        }
        every.push(r);
        state = next;
        if last {
            state.t = finish;
        }
    }

    let audit = if every.len() >= 2 {
        Some(energy_inequality_audit(&every, &params, config.checks.lady_factor)?)
    } else {
        None
    };
    let invariants = invariant_checks(&config, &init, &every, audit.as_ref());
    let status = if blow_up.is_some() {
        RunStatus::BlowUp
    } else if invariants.iter().all(|c| c.passed) {
        RunStatus::Completed
    } else {
        RunStatus::InvariantViolation
    };
    let decay = decay_report(&records, &config.fit, &grid, &params);
    let summary = RunSummary {
        schema_version: SCHEMA_VERSION,
        status,
        steps: step,
        samples: records.len(),
        t_final: state.t,
        blow_up,
        invariants,
        audit,
    };
    Ok(RunOutcome {
        records,
        steps,
        final_state: state,
        init,
        decay,
        summary,
    })
}

/// Runs in memory, writing nothing.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    execute(config, None)
}

/// Runs and writes every artifact into `dir`. Records are streamed, so on
/// blow-up the CSV holds every sample up to the failure.
pub fn run_to_dir(config: &RunConfig, dir: &Path) -> Result<RunOutcome> {
    let config = config.clone().validated()?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    save_config(&dir.join("config.toml"), &config)?;
    let mut writer = RecordWriter::create(&dir.join("records.csv"))?;
    let outcome = execute(&config, Some(&mut writer))?;
    drop(writer);
    write_json(
        &dir.join("init.json"),
        &serde_json::json!({ "schema_version": SCHEMA_VERSION, "init": outcome.init }),
    )?;
    write_json(&dir.join("summary.json"), &outcome.summary)?;
    write_json(&dir.join("decay.json"), &outcome.decay)?;
    save_checkpoint(&dir.join("checkpoint"), &outcome.final_state, &config.model, outcome.summary.steps)?;
    Ok(outcome)
}
