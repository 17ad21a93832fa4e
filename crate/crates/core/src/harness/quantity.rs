//! Named scalar series extracted from diagnostics records.

use serde::{Deserialize, Serialize};

use crate::diagnostics::DiagnosticsRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Quantity {
    DL1,
    DL2,
    DL4,
    DL8,
    DL2sq,
    GradDL2sq,
    UL2sq,
    EnergyBasic,
    EnergyLady,
    Dissipation,
    DMax,
    DMin,
    LowmodeSup,
    GRatioSup,
}

impl Quantity {
    pub const ALL: [Quantity; 14] = [
        Quantity::DL1,
        Quantity::DL2,
        Quantity::DL4,
        Quantity::DL8,
        Quantity::DL2sq,
        Quantity::GradDL2sq,
        Quantity::UL2sq,
        Quantity::EnergyBasic,
        Quantity::EnergyLady,
        Quantity::Dissipation,
        Quantity::DMax,
        Quantity::DMin,
        Quantity::LowmodeSup,
        Quantity::GRatioSup,
    ];

    /// Quantities with an algebraic decay target.
    pub const DECAYING: [Quantity; 7] = [
        Quantity::DL1,
        Quantity::DL2,
        Quantity::DL4,
        Quantity::DL8,
        Quantity::DL2sq,
        Quantity::GradDL2sq,
        Quantity::UL2sq,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::DL1 => "d_l1",
            Quantity::DL2 => "d_l2",
            Quantity::DL4 => "d_l4",
            Quantity::DL8 => "d_l8",
            Quantity::DL2sq => "d_l2sq",
            Quantity::GradDL2sq => "grad_d_l2sq",
            Quantity::UL2sq => "u_l2sq",
            Quantity::EnergyBasic => "energy_basic",
            Quantity::EnergyLady => "energy_lady",
            Quantity::Dissipation => "dissipation",
            Quantity::DMax => "d_max",
            Quantity::DMin => "d_min",
            Quantity::LowmodeSup => "lowmode_sup",
            Quantity::GRatioSup => "g_ratio_sup",
        }
    }

    pub fn from_name(name: &str) -> Option<Quantity> {
        Quantity::ALL.into_iter().find(|q| q.name() == name)
    }

    /// Whole-space decay exponent in `(1 + t)^alpha`: `-3/2 (1 - 1/p)` for
    /// `||d - w0||_p` (doubled for the square), `-3/4` for
    /// `||grad(d - w0)||^2`, `-1/2` for `||u||^2`.
    pub fn target(self) -> Option<f64> {
        let lp = |p: f64| 1.5 * (1.0 / p - 1.0);
        match self {
            Quantity::DL1 => Some(lp(1.0)),
            Quantity::DL2 => Some(lp(2.0)),
            Quantity::DL4 => Some(lp(4.0)),
            Quantity::DL8 => Some(lp(8.0)),
            Quantity::DL2sq => Some(2.0 * lp(2.0)),
            Quantity::GradDL2sq => Some(-0.75),
            Quantity::UL2sq => Some(-0.5),
            _ => None,
        }
    }

    pub fn value(self, r: &DiagnosticsRecord) -> Option<f64> {
        Some(match self {
            Quantity::DL1 => r.lp_director[0],
            Quantity::DL2 => r.lp_director[1],
            Quantity::DL4 => r.lp_director[2],
            Quantity::DL8 => r.lp_director[3],
            Quantity::DL2sq => r.lp_director[1] * r.lp_director[1],
            Quantity::GradDL2sq => r.grad_director_l2sq,
            Quantity::UL2sq => r.velocity_l2sq,
            Quantity::EnergyBasic => r.energy_basic,
            Quantity::EnergyLady => r.energy_lady,
            Quantity::Dissipation => r.dissipation,
            Quantity::DMax => r.d_max,
            Quantity::DMin => r.d_min,
            Quantity::LowmodeSup => return r.lowmode_sup,
            Quantity::GRatioSup => return r.g_ratio_sup,
        })
    }

    /// `(t, value)` pairs, skipping samples where the value is undefined.
    pub fn series(self, records: &[DiagnosticsRecord]) -> Vec<(f64, f64)> {
        records.iter().filter_map(|r| self.value(r).map(|v| (r.t, v))).collect()
    }
}

impl From<Quantity> for String {
    fn from(q: Quantity) -> String {
        q.name().to_string()
    }
}

impl TryFrom<String> for Quantity {
    type Error = String;

    fn try_from(name: String) -> Result<Self, String> {
        Quantity::from_name(&name).ok_or_else(|| format!("unknown quantity `{name}`"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn targets() {
        assert_eq!(Quantity::DL2.target(), Some(-0.75));
        assert_eq!(Quantity::DL2sq.target(), Some(-1.5));
        assert_eq!(Quantity::DL1.target(), Some(0.0));
        assert_eq!(Quantity::DL8.target(), Some(-1.5 * 7.0 / 8.0));
        assert_eq!(Quantity::UL2sq.target(), Some(-0.5));
        assert_eq!(Quantity::EnergyBasic.target(), None);
    }

    #[test]
    fn names_round_trip() {
        for q in Quantity::ALL {
            assert_eq!(Quantity::from_name(q.name()), Some(q));
        }
        assert_eq!(Quantity::from_name("nope"), None);
    }
}
