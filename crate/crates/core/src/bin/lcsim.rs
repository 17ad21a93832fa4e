use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nematic::diagnostics::energy_inequality_audit;
use nematic::harness::{
    check_suite, decay_report, load_config, read_records_csv, run_to_dir, truncation_study_to_dir, DecayReport,
    RunConfig, RunStatus, TruncationStudy,
};
use nematic::Error;

#[derive(Parser)]
#[command(name = "lcsim", version, about = "Nematic liquid crystal flow simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct ConfigArgs {
    /// TOML configuration; defaults apply when omitted.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override a key, e.g. `--set time.dt=0.01`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory (beats LCSIM_OUTPUT_DIR and `output_dir`).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configuration and write its artifacts.
    Run(ConfigArgs),
    /// Run the same nested data on several boxes and compare.
    Study {
        #[command(flatten)]
        args: ConfigArgs,
        /// Box lengths, smallest first; the first must match `grid.box_length`.
        #[arg(long, value_delimiter = ',', required = true)]
        boxes: Vec<f64>,
        /// Use `time.t_end` for every box instead of each box's fit window.
        #[arg(long)]
        fixed_t_end: bool,
    },
    /// Recompute the decay fits and energy audit of a finished run.
    Report {
        /// Run directory holding `config.toml` and `records.csv`.
        dir: PathBuf,
        /// Fit window `T1,T2` applied to every quantity.
        #[arg(long, value_delimiter = ',', value_name = "T1,T2")]
        window: Option<Vec<f64>>,
    },
    /// Self-test the discretisation on the configured grid.
    Check(ConfigArgs),
}

const EXIT_CONFIG: u8 = 2;
const EXIT_INVARIANT: u8 = 3;
const EXIT_BLOW_UP: u8 = 4;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } | Error::Parse { .. } | Error::StudySetup(_) | Error::PerturbationTooLarge { .. } => {
            EXIT_CONFIG
        }
        Error::BlowUp { .. } => EXIT_BLOW_UP,
        _ => 1,
    }
}

fn status_code(status: RunStatus) -> u8 {
    match status {
        RunStatus::Completed => 0,
        RunStatus::InvariantViolation => EXIT_INVARIANT,
        RunStatus::BlowUp => EXIT_BLOW_UP,
    }
}

fn load(args: &ConfigArgs) -> nematic::Result<(RunConfig, PathBuf)> {
    let mut config = match &args.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    for o in &args.overrides {
        config = config.with_override(o)?;
    }
    let config = config.validated()?;
    let dir = args.output.clone().unwrap_or_else(|| config.resolve_output_dir());
    Ok((config, dir))
}

fn print_decay(report: &DecayReport) {
    for e in &report.entries {
        let exponent = e.fit.map_or("-".to_string(), |f| format!("{:+.4}", f.exponent));
        println!(
            "  {:<12} target {:+.4}  fitted {:>8}  {:?}{}{}",
            e.quantity.name(),
            e.target,
            exponent,
            e.regime,
            if e.passed { "" } else { "  FAIL" },
            if e.finite_box_caveat { "  (finite box)" } else { "" },
        );
    }
}

fn cmd_run(args: &ConfigArgs) -> nematic::Result<u8> {
    let (config, dir) = load(args)?;
    let out = run_to_dir(&config, &dir)?;
    let s = &out.summary;
    println!("{:?}: {} steps to t = {} -> {}", s.status, s.steps, s.t_final, dir.display());
    if let Some(b) = &s.blow_up {
        println!("  blow-up at t = {}: {}", b.t, b.what);
    }
    for c in &s.invariants {
        println!("  {:<16} {:<4} {:e} (limit {:e})", c.name, if c.passed { "ok" } else { "FAIL" }, c.value, c.limit);
    }
    print_decay(&out.decay);
    Ok(status_code(s.status))
}

fn cmd_study(args: &ConfigArgs, boxes: Vec<f64>, fixed_t_end: bool) -> nematic::Result<u8> {
    let (config, dir) = load(args)?;
    let mut study = TruncationStudy::new(config, boxes);
    study.t_end_from_window = !fixed_t_end;
    let (report, outcomes) = truncation_study_to_dir(&study, &dir)?;
    println!("study over L = {:?} (n = {:?}) -> {}", report.box_lengths, report.sizes, dir.display());
    for t in &report.tables {
        println!("  {:<12} converged at {:.0}% of common times", t.quantity.name(), 100.0 * t.converged_fraction);
    }
    for t in &report.trends {
        println!(
            "  {:<12} exponents {:?}  toward [{}, {}]: {}",
            t.target.quantity.name(),
            t.exponents,
            t.target.lo,
            t.target.hi,
            t.toward_target
        );
    }
    Ok(outcomes.iter().map(|o| status_code(o.status())).max().unwrap_or(0))
}

fn cmd_report(dir: &Path, window: Option<Vec<f64>>) -> nematic::Result<u8> {
    let mut config = load_config(&dir.join("config.toml"))?.validated()?;
    if let Some(w) = window {
        let [t1, t2] = w[..] else {
            return Err(Error::Config {
                field: "--window".into(),
                reason: format!("expected two times, got {}", w.len()),
            });
        };
        config.fit.window = Some([t1, t2]);
        config.fit.windows.clear();
    }
    let records: Vec<_> = read_records_csv(&dir.join("records.csv"))?.into_iter().map(|(_, _, r)| r).collect();
    let report = decay_report(&records, &config.fit, &config.grid, &config.model);
    let text = serde_json::to_string_pretty(&report)? + "\n";
    let path = dir.join("decay.json");
    std::fs::write(&path, text).map_err(|e| Error::Io { path, source: e })?;
    println!("{} samples from {}", records.len(), dir.display());
    if records.len() >= 2 {
        let a = energy_inequality_audit(&records, &config.model, config.checks.lady_factor)?;
        println!(
            "  energy law: max violation {:e} of E(0) = {:e}; lady factor {}; L1 envelope {}",
            a.max_violation,
            a.initial_energy,
            a.lady_factor,
            if a.l1.holds { "holds" } else { "fails" }
        );
    }
    print_decay(&report);
    Ok(0)
}

fn cmd_check(args: &ConfigArgs) -> nematic::Result<u8> {
    let (config, _) = load(args)?;
    let report = check_suite(&config)?;
    for c in &report.checks {
        println!("{:<22} {:<4} {:e} (limit {:e})", c.name, if c.passed { "ok" } else { "FAIL" }, c.value, c.limit);
    }
    Ok(if report.passed() { 0 } else { EXIT_INVARIANT })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(&args),
        Command::Study {
            args,
            boxes,
            fixed_t_end,
        } => cmd_study(&args, boxes, fixed_t_end),
        Command::Report { dir, window } => cmd_report(&dir, window),
        Command::Check(args) => cmd_check(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("lcsim: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
