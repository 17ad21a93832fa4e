//! Finite-box truncation study.
//!
//! The same nested initial data is run on boxes `L_1 < L_2 < ...` at a fixed
//! grid spacing, so each smaller grid is a centred sub-lattice of every
//! larger one. Quantities are then compared on common sample times: the
//! study converges at a time when successive box differences shrink.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{FitConfig, RunConfig};
use super::quantity::Quantity;
use super::report::{DecayReport, SCHEMA_VERSION};
use super::run::{run, run_to_dir, write_json, RunOutcome, RunStatus};
use crate::error::{Error, Result};
use crate::lcd::init::raw_patterns;
use crate::spectral::GridSpec;

/// Exponent interval the fitted exponents should approach as `L` grows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendTarget {
    pub quantity: Quantity,
    pub lo: f64,
    pub hi: f64,
}

impl TrendTarget {
    pub fn distance(&self, exponent: f64) -> f64 {
        if exponent < self.lo {
            self.lo - exponent
        } else if exponent > self.hi {
            exponent - self.hi
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone)]
pub struct TruncationStudy {
    /// Configuration of the smallest box; its `grid.box_length` must equal
    /// `box_lengths[0]`.
    pub base: RunConfig,
    pub box_lengths: Vec<f64>,
    pub quantities: Vec<Quantity>,
    pub trends: Vec<TrendTarget>,
    /// Run each box to the end of its own default fit window
    /// `0.1 (L / 2 pi)^2 / nu` instead of `base.time.t_end`.
    pub t_end_from_window: bool,
}

impl TruncationStudy {
    pub fn new(base: RunConfig, box_lengths: Vec<f64>) -> Self {
        TruncationStudy {
            base,
            box_lengths,
            quantities: vec![Quantity::DL2sq, Quantity::GradDL2sq, Quantity::UL2sq, Quantity::EnergyBasic],
            trends: vec![
                TrendTarget {
                    quantity: Quantity::DL2sq,
                    lo: -1.5,
                    hi: -1.5,
                },
                TrendTarget {
                    quantity: Quantity::UL2sq,
                    lo: -1.5,
                    hi: -0.5,
                },
            ],
            t_end_from_window: true,
        }
    }

    /// Grid sizes at the base spacing; errors if a box is not a whole,
    /// evenly offset number of cells.
    pub fn grid_sizes(&self) -> Result<Vec<usize>> {
        let base = &self.base.grid;
        if self.box_lengths.len() < 3 {
            return Err(Error::StudySetup(format!(
                "need at least 3 box sizes, got {}",
                self.box_lengths.len()
            )));
        }
        if self.box_lengths.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::StudySetup("box lengths must be strictly increasing".into()));
        }
        if (self.box_lengths[0] - base.box_length).abs() > 1e-12 * base.box_length {
            return Err(Error::StudySetup(format!(
                "base box length {} differs from the first study box {}",
                base.box_length, self.box_lengths[0]
            )));
        }
        let h = base.spacing();
        let mut sizes = Vec::with_capacity(self.box_lengths.len());
        for &l in &self.box_lengths {
            let cells = l / h;
            let n = cells.round() as usize;
            if (cells - n as f64).abs() > 1e-9 * cells || !n.is_multiple_of(2) || !(n - base.n).is_multiple_of(2) {
                return Err(Error::StudySetup(format!(
                    "box {l} is not an even number of cells of width {h}"
                )));
            }
            sizes.push(n);
        }
        Ok(sizes)
    }

    fn box_config(&self, l: f64, n: usize) -> Result<RunConfig> {
        let mut c = self.base.clone();
        c.grid = GridSpec::new(n, l, self.base.grid.dealias_fraction)?;
        if self.t_end_from_window {
            c.time.t_end = FitConfig::default_window(&c.grid, &c.model)[1];
        }
        c.output_dir = None;
        c.validated()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxResult {
    pub box_length: f64,
    pub n: usize,
    pub t_end: f64,
    pub status: RunStatus,
    pub decay: DecayReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantityTable {
    pub quantity: Quantity,
    /// `values[b][i]`: box `b` at `times[i]`.
    pub values: Vec<Vec<f64>>,
    /// `differences[k][i] = |values[k + 1][i] - values[k][i]|`.
    pub differences: Vec<Vec<f64>>,
    /// Whether differences are non-increasing in the box size, per time.
    pub converged: Vec<bool>,
    pub converged_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendReport {
    pub target: TrendTarget,
    /// Fitted exponent per box, smallest first.
    pub exponents: Vec<Option<f64>>,
    pub distances: Vec<Option<f64>>,
    /// Distances to the target interval are non-increasing in `L`.
    pub toward_target: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub schema_version: u32,
    pub spacing: f64,
    pub box_lengths: Vec<f64>,
    pub sizes: Vec<usize>,
    /// Largest difference between raw initial patterns on the overlap of the
    /// smallest box with each larger one.
    pub setup_max_difference: f64,
    pub times: Vec<f64>,
    pub tables: Vec<QuantityTable>,
    pub trends: Vec<TrendReport>,
    pub boxes: Vec<BoxResult>,
}

impl StudyReport {
    pub fn table(&self, q: Quantity) -> Option<&QuantityTable> {
        self.tables.iter().find(|t| t.quantity == q)
    }

    pub fn trend(&self, q: Quantity) -> Option<&TrendReport> {
        self.trends.iter().find(|t| t.target.quantity == q)
    }
}

pub const SETUP_TOLERANCE: f64 = 1e-14;

fn overlap_difference(study: &TruncationStudy, sizes: &[usize]) -> Result<f64> {
    let small = study.base.grid;
    let (u0, p0) = raw_patterns(&study.base.init, &small)?;
    let mut worst = 0.0f64;
    for (&l, &n) in study.box_lengths.iter().zip(sizes).skip(1) {
        let grid = GridSpec::new(n, l, small.dealias_fraction)?;
        let (u, p) = raw_patterns(&study.base.init, &grid)?;
        let o = (n - small.n) / 2;
        for (a, b) in [(&u0, &u), (&p0, &p)] {
            for (ca, cb) in a.physical()?.iter().zip(b.physical()?) {
                for ((i, j, k), &va) in ca.indexed_iter() {
                    worst = worst.max((va - cb[[i + o, j + o, k + o]]).abs());
                }
            }
        }
    }
    Ok(worst)
}

fn interpolate(series: &[(f64, f64)], t: f64) -> f64 {
    let i = series.partition_point(|&(s, _)| s < t);
    if i == 0 {
        return series[0].1;
    }
    if i == series.len() {
        return series[i - 1].1;
    }
    let (t0, v0) = series[i - 1];
    let (t1, v1) = series[i];
    if t1 == t0 {
        return v1;
    }
    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
}

fn table(q: Quantity, outcomes: &[RunOutcome], times: &[f64]) -> QuantityTable {
    let values: Vec<Vec<f64>> = outcomes
        .iter()
        .map(|o| {
            let s = q.series(&o.records);
            times.iter().map(|&t| if s.is_empty() { f64::NAN } else { interpolate(&s, t) }).collect()
        })
        .collect();
    let differences: Vec<Vec<f64>> = values
        .windows(2)
        .map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| (b - a).abs()).collect())
        .collect();
    let converged: Vec<bool> = (0..times.len())
        .map(|i| {
            let scale = values.iter().fold(0.0f64, |m, v| m.max(v[i].abs()));
            differences.windows(2).all(|d| d[1][i] <= d[0][i] + 1e-14 * scale)
        })
        .collect();
    let converged_fraction = if times.is_empty() {
        0.0
    } else {
        converged.iter().filter(|&&c| c).count() as f64 / times.len() as f64
    };
    QuantityTable {
        quantity: q,
        values,
        differences,
        converged,
        converged_fraction,
    }
}

fn trend(target: TrendTarget, outcomes: &[RunOutcome]) -> TrendReport {
    let exponents: Vec<Option<f64>> = outcomes
        .iter()
        .map(|o| o.decay.entry(target.quantity).and_then(|e| e.fit.map(|f| f.exponent)))
        .collect();
    let distances: Vec<Option<f64>> = exponents.iter().map(|e| e.map(|e| target.distance(e))).collect();
    let toward_target = distances.iter().all(Option::is_some)
        && distances.windows(2).all(|w| w[1].unwrap() <= w[0].unwrap());
    TrendReport {
        target,
        exponents,
        distances,
        toward_target,
    }
}

fn assemble(study: &TruncationStudy, sizes: Vec<usize>, setup: f64, outcomes: &[RunOutcome]) -> StudyReport {
    let horizon = outcomes.iter().map(|o| o.summary.t_final).fold(f64::INFINITY, f64::min);
    let times: Vec<f64> = outcomes[0].records.iter().map(|r| r.t).filter(|&t| t <= horizon).collect();
    StudyReport {
        schema_version: SCHEMA_VERSION,
        spacing: study.base.grid.spacing(),
        box_lengths: study.box_lengths.clone(),
        sizes,
        setup_max_difference: setup,
        tables: study.quantities.iter().map(|&q| table(q, outcomes, &times)).collect(),
        trends: study.trends.iter().map(|&t| trend(t, outcomes)).collect(),
        times,
        boxes: outcomes
            .iter()
            .map(|o| BoxResult {
                box_length: o.final_state.grid().box_length,
                n: o.final_state.grid().n,
                t_end: o.summary.t_final,
                status: o.status(),
                decay: o.decay.clone(),
            })
            .collect(),
    }
}

fn prepare(study: &TruncationStudy) -> Result<(Vec<usize>, f64, Vec<RunConfig>)> {
    let base = study.base.clone().validated()?;
    let study = TruncationStudy { base, ..study.clone() };
    if !study.base.init.is_nested() {
        return Err(Error::StudySetup(
            "initial patterns must be independent of the box (zero, gaussian jet, curl gaussian, gaussian bump)".into(),
        ));
    }
    let sizes = study.grid_sizes()?;
    let setup = overlap_difference(&study, &sizes)?;
    if setup > SETUP_TOLERANCE {
        return Err(Error::StudySetup(format!(
            "initial data differs by {setup:e} on the shared sub-lattice"
        )));
    }
    let configs = study
        .box_lengths
        .iter()
        .zip(&sizes)
        .map(|(&l, &n)| study.box_config(l, n))
        .collect::<Result<Vec<_>>>()?;
    Ok((sizes, setup, configs))
}

/// Runs every box (in parallel) and compares them.
pub fn truncation_study(study: &TruncationStudy) -> Result<(StudyReport, Vec<RunOutcome>)> {
    let (sizes, setup, configs) = prepare(study)?;
    let outcomes = configs.par_iter().map(run).collect::<Result<Vec<_>>>()?;
    Ok((assemble(study, sizes, setup, &outcomes), outcomes))
}

/// As [`truncation_study`], writing each box into `dir/box-<i>/` and the
/// comparison into `dir/study.json`.
pub fn truncation_study_to_dir(study: &TruncationStudy, dir: &Path) -> Result<(StudyReport, Vec<RunOutcome>)> {
    let (sizes, setup, configs) = prepare(study)?;
    let outcomes = configs
        .par_iter()
        .enumerate()
        .map(|(i, c)| run_to_dir(c, &dir.join(format!("box-{i}"))))
        .collect::<Result<Vec<_>>>()?;
    let report = assemble(study, sizes, setup, &outcomes);
    write_json(&dir.join("study.json"), &report)?;
    Ok((report, outcomes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::parse_config;

    fn base(n: usize, l: f64) -> RunConfig {
        parse_config(&format!(
            "[grid]\nn = {n}\nbox_length = {l}\n[time]\ndt = 0.05\nt_end = 0.5\n\
             [init.velocity]\nkind = \"gaussian-jet\"\nsigma = 1.5\ndirection = [0.0, 0.0, 1.0]\namplitude = 0.05\n\
             [init.director]\nkind = \"gaussian-bump\"\nsigma = 1.5\ndirection = [1.0, 0.0, 0.0]\namplitude = 0.1\n"
        ))
        .unwrap()
    }

    #[test]
    fn setup_validation() {
        let b = base(8, 8.0);
        let s = TruncationStudy::new(b.clone(), vec![8.0, 16.0]);
        assert!(matches!(truncation_study(&s), Err(Error::StudySetup(_))));
        let s = TruncationStudy::new(b.clone(), vec![8.0, 12.0, 16.0]);
        assert_eq!(s.grid_sizes().unwrap(), vec![8, 12, 16]);
        let s = TruncationStudy::new(b.clone(), vec![8.0, 9.0, 16.0]);
        assert!(matches!(s.grid_sizes(), Err(Error::StudySetup(_))));
        let s = TruncationStudy::new(b.clone(), vec![8.0, 16.0, 16.0]);
        assert!(matches!(s.grid_sizes(), Err(Error::StudySetup(_))));
        let mut random = b;
        random.init.director.pattern = crate::lcd::DirectorPattern::Random { kmax: 2 };
        let s = TruncationStudy::new(random, vec![8.0, 12.0, 16.0]);
        assert!(matches!(truncation_study(&s), Err(Error::StudySetup(_))));
    }

    #[test]
    fn nested_data_agree_on_overlap() {
        let mut s = TruncationStudy::new(base(8, 8.0), vec![8.0, 12.0, 16.0]);
        s.t_end_from_window = false;
        let (report, outcomes) = truncation_study(&s).unwrap();
        assert_eq!(report.setup_max_difference, 0.0);
        assert_eq!(report.sizes, vec![8, 12, 16]);
        assert_eq!(outcomes.len(), 3);
        let t = report.table(Quantity::DL2sq).unwrap();
        assert_eq!(t.values.len(), 3);
        assert_eq!(t.differences.len(), 2);
        assert_eq!(t.values[0].len(), report.times.len());
    }

    #[test]
    fn interpolation_and_distance() {
        let s = [(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)];
        assert_eq!(interpolate(&s, 0.5), 2.0);
        assert_eq!(interpolate(&s, 2.0), 5.0);
        assert_eq!(interpolate(&s, 9.0), 5.0);
        let t = TrendTarget {
            quantity: Quantity::UL2sq,
            lo: -1.5,
            hi: -0.5,
        };
        assert_eq!(t.distance(-1.0), 0.0);
        assert_eq!(t.distance(-0.25), 0.25);
        assert_eq!(t.distance(-2.0), 0.5);
    }
}
