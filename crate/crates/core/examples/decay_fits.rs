//! Fits `(1 + t)^alpha` to the decaying norms of one run and compares with
//! the whole-space exponents. On a finite box the late-time decay turns
//! exponential; the report flags that regime.
//!
//! cargo run --release --example decay_fits

use std::f64::consts::PI;

use nematic::harness::{parse_config, run};

fn main() -> nematic::Result<()> {
    let config = parse_config(&format!(
        "[grid]\nn = 32\nbox_length = {}\n[model]\neta = 1.0\n\
         [time]\ndt = 0.05\nt_end = 6.4\nscheme = \"predictor-corrector\"\n\
         [init.velocity]\nkind = \"gaussian-jet\"\nsigma = 1.5\ndirection = [0.0, 0.0, 1.0]\namplitude = 0.02\n\
         [init.director]\nkind = \"gaussian-bump\"\nsigma = 1.5\ndirection = [1.0, 0.0, 0.0]\namplitude = 0.05\n",
        16.0 * PI
    ))?;
    let out = run(&config)?;
    let report = &out.decay;
    println!("box time 0.1 (L / 2 pi)^2 / nu = {:.2}", report.box_time);
    for e in &report.entries {
        match e.fit {
            Some(f) => println!(
                "{:<12} target {:+.4}  fitted {:+.4}  r^2 {:.5}  {:?}  pass {}",
                e.quantity.name(),
                e.target,
                f.exponent,
                f.r_squared,
                e.regime,
                e.passed
            ),
            None => println!("{:<12} unfittable: {}", e.quantity.name(), e.note.as_deref().unwrap_or("")),
        }
    }
    Ok(())
}
