//! Stops a run halfway, saves a checkpoint, restarts from it and checks the
//! restarted trajectory is bit-identical to the uninterrupted one.
//!
//! cargo run --release --example checkpoint_restart

use nematic::harness::parse_config;
use nematic::lcd::{load_checkpoint, make_initial_conditions, save_checkpoint, step_imex};

fn main() -> nematic::Result<()> {
    let config = parse_config(
        "seed = 7\n[grid]\nn = 16\nbox_length = 12.0\n[time]\ndt = 0.02\nt_end = 0.4\n\
         [init.velocity]\nkind = \"random\"\nkmax = 2\namplitude = 0.2\n\
         [init.director]\nkind = \"random\"\nkmax = 2\namplitude = 0.2\n",
    )?
    .validated()?;
    let (params, time) = (config.model, config.time);
    let (mut state, _) = make_initial_conditions(&config.init, &config.grid, &params)?;

    let dir = std::env::temp_dir().join("nematic-checkpoint-example");
    let mut straight = state.clone();
    for step in 1..=20u64 {
        straight = step_imex(&straight, &params, time.dt, time.scheme)?;
        if step == 10 {
            let meta = save_checkpoint(&dir, &straight, &params, step)?;
            println!("saved t = {} after {} steps to {}", meta.t, meta.steps, dir.display());
        }
    }

    let (restored, meta) = load_checkpoint(&dir)?;
    state = restored;
    for _ in meta.steps..20 {
        state = step_imex(&state, &params, time.dt, time.scheme)?;
    }
    let same = state.u.spectral()? == straight.u.spectral()? && state.d.spectral()? == straight.d.spectral()?;
    println!("restarted run matches bit for bit: {same}");
    std::fs::remove_dir_all(&dir).ok();
    Ok(())
}
