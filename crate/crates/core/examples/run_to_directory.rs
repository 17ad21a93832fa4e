//! Loads a TOML configuration, applies command-line style overrides, and
//! writes every artifact of a run: records.csv, the JSON reports and a
//! checkpoint.
//!
//! cargo run --release --example run_to_directory [OUTPUT_DIR]

use nematic::harness::{parse_config, read_records_csv, run_to_dir, RunStatus};

const CONFIG: &str = r#"
seed = 3

[grid]
n = 32
box_length = 25.0

[model]
eta = 0.5

[time]
dt = 0.05
t_end = 2.0
scheme = "predictor-corrector"

[init.velocity]
kind = "curl-gaussian"
sigma = 2.5
amplitude = 0.1

[init.director]
kind = "gaussian-bump"
sigma = 2.5
direction = [0.0, 1.0, 0.0]
amplitude = 0.3
"#;

fn main() -> nematic::Result<()> {
    let dir = std::env::args().nth(1).map(Into::into).unwrap_or_else(|| std::env::temp_dir().join("nematic-run"));
    let config = parse_config(CONFIG)?.with_override("time.output_every=4")?;
    let out = run_to_dir(&config, &dir)?;
    assert_eq!(out.status(), RunStatus::Completed);
    println!("wrote {} samples to {}", out.records.len(), dir.display());
    for entry in std::fs::read_dir(&dir).map_err(|e| nematic::Error::Format(e.to_string()))? {
        let entry = entry.map_err(|e| nematic::Error::Format(e.to_string()))?;
        println!("  {}", entry.file_name().to_string_lossy());
    }
    let rows = read_records_csv(&dir.join("records.csv"))?;
    let (step, dt, last) = rows.last().unwrap();
    println!("last row: step {step}, dt {dt}, t {}, E {:.6e}", last.t, last.energy_basic);
    Ok(())
}
