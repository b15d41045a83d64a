use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Orders with `|α − 1|` below this value use the Shannon / von Neumann formulas.
pub const ALPHA_ONE_THRESHOLD: f64 = 1e-6;

const REGIME_EDGE_TOL: f64 = 1e-12;

/// Rényi order α > 0.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Alpha(f64);

/// Direction in which an extremal-channel bound holds for a given order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// The BSC formula is a lower bound and the BEC formula an upper bound
    /// (for the check-node Hayashi entropy; mirrored for Arimoto).
    Standard,
    /// Inequalities exchanged.
    Reversed,
    /// Both formulas hold with equality for every channel.
    Equality,
}

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Alpha(value))
        } else {
            Err(Error::Domain(format!(
                "Renyi order must be finite and > 0, got {value}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_one(self) -> bool {
        (self.0 - 1.0).abs() < ALPHA_ONE_THRESHOLD
    }

    /// The conjugate order 1/α.
    pub fn inverse(self) -> Alpha {
        Alpha(1.0 / self.0)
    }

    /// Regime of the Hayashi check-node bounds: standard on (0,2] ∪ [3,∞),
    /// reversed on [2,3], equality at 2 and 3.
    pub fn hayashi_regime(self) -> Regime {
        let a = self.0;
        if (a - 2.0).abs() < REGIME_EDGE_TOL || (a - 3.0).abs() < REGIME_EDGE_TOL {
            Regime::Equality
        } else if a > 2.0 && a < 3.0 {
            Regime::Reversed
        } else {
            Regime::Standard
        }
    }

    /// Regime of the Arimoto variable-node bounds: standard on
    /// (0,1/3] ∪ [1/2,∞), reversed on [1/3,1/2], equality at 1/3 and 1/2.
    pub fn arimoto_regime(self) -> Regime {
        self.inverse().hayashi_regime()
    }
}

impl TryFrom<f64> for Alpha {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Alpha::new(value)
    }
}

impl From<Alpha> for f64 {
    fn from(a: Alpha) -> f64 {
        a.0
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
