//! Monitored quantities, decay fits and the energy audit.

pub mod audit;
pub mod fit;
pub mod record;

pub use audit::{energy_inequality_audit, EnergyAudit, L1Envelope, DEFAULT_LADY_BOUND};
pub use fit::{fit_decay, fit_exponential, DecayFit, MIN_FIT_SAMPLES};
pub use record::{
    compute_record, g_ratio, g_spectrum, gn_check, lowmode_bound, velocity_l2sq_physical, DiagnosticsRecord,
    FourierSplitConfig, LP_EXPONENTS,
};
