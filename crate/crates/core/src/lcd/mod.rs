//! The simplified Ericksen-Leslie system: model terms, stepping, initial data
//! and checkpoints.

pub mod checkpoint;
pub mod dynamics;
pub mod init;
pub mod model;

pub use checkpoint::{load_checkpoint, save_checkpoint, CheckpointMeta};
pub use dynamics::{ericksen_stress_div, pressure_solve, rhs_explicit, step_imex, Scheme, State, TimeSpec};
pub use init::{make_initial_conditions, DirectorPattern, InitReport, InitSpec, VelocityPattern};
pub use model::{gl_force_f, penalty_f, ModelParams};
