//! Checkpoints: `u.field` and `d.field` spectral snapshots plus `meta.toml`.
//!
//! The metadata file is a flat key-value TOML document:
//!
//! ```text
//! format = "lcd-checkpoint"
//! version = 1
//! t = 1.25
//! steps = 250
//!
//! [grid]
//! n = 32
//! box_length = 50.26548245743669
//! dealias_fraction = 0.6666666666666666
//!
//! [model]
//! nu = 1.0
//! eta = 0.5
//! w0 = [0.0, 0.0, 1.0]
//! linear = false
//! ```
//!
//! Floats are written in shortest round-trip form, so a restart reproduces
//! the metadata bit for bit.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::dynamics::State;
use super::model::ModelParams;
use crate::error::{Error, Result};
use crate::spectral::snapshot::{read_vector, write_vector};
use crate::spectral::GridSpec;

pub const FORMAT: &str = "lcd-checkpoint";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckpointMeta {
    pub format: String,
    pub version: u32,
    pub t: f64,
    pub steps: u64,
    pub grid: GridSpec,
    pub model: ModelParams,
}

pub fn save_checkpoint(dir: &Path, state: &State, params: &ModelParams, steps: u64) -> Result<CheckpointMeta> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_vector(&dir.join("u.field"), &state.u)?;
    write_vector(&dir.join("d.field"), &state.d)?;
    let meta = CheckpointMeta {
        format: FORMAT.into(),
        version: VERSION,
        t: state.t,
        steps,
        grid: *state.grid(),
        model: *params,
    };
    let text = toml::to_string(&meta).map_err(|e| Error::Format(e.to_string()))?;
    let path = dir.join("meta.toml");
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(meta)
}

pub fn load_checkpoint(dir: &Path) -> Result<(State, CheckpointMeta)> {
    let path = dir.join("meta.toml");
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let meta: CheckpointMeta = toml::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    if meta.format != FORMAT || meta.version != VERSION {
        return Err(Error::Format(format!(
            "unsupported checkpoint {} v{}",
            meta.format, meta.version
        )));
    }
    let u = read_vector(&dir.join("u.field"))?;
    let d = read_vector(&dir.join("d.field"))?;
    if u.grid() != &meta.grid || d.grid() != &meta.grid {
        return Err(Error::GridMismatch);
    }
    Ok((State::new(u, d, meta.t)?, meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lcd::dynamics::{step_imex, Scheme};
    use crate::lcd::init::{make_initial_conditions, DirectorInit, DirectorPattern, InitSpec, VelocityInit, VelocityPattern};

    #[test]
    fn restart_is_exact() {
        let grid = GridSpec::cube(16, 7.3).unwrap();
        let params = ModelParams::new(0.9, 0.6, [1.0, 1.0, 0.0]).unwrap();
        let spec = InitSpec {
            velocity: VelocityInit {
                pattern: VelocityPattern::Random { kmax: 3 },
                amplitude: 0.2,
            },
            director: DirectorInit {
                pattern: DirectorPattern::Random { kmax: 3 },
                amplitude: 0.2,
            },
            normalize: true,
            seed: 3,
        };
        let (mut s, _) = make_initial_conditions(&spec, &grid, &params).unwrap();
        for _ in 0..3 {
            s = step_imex(&s, &params, 0.013, Scheme::PredictorCorrector).unwrap();
        }
        let dir = tempfile::tempdir().unwrap();
        let meta = save_checkpoint(dir.path(), &s, &params, 3).unwrap();
        let (restored, meta2) = load_checkpoint(dir.path()).unwrap();
        assert_eq!(meta, meta2);
        assert_eq!(restored, s);
        let a = step_imex(&s, &params, 0.013, Scheme::PredictorCorrector).unwrap();
        let b = step_imex(&restored, &params, 0.013, Scheme::PredictorCorrector).unwrap();
        assert_eq!(a, b);
    }
}
