//! Structural observability and controllability of directed networks and their
//! Kronecker composites.
//!
//! - [`structmat`]: zero/nonzero patterns, Kronecker composition, file I/O.
//! - [`decompose`]: SCCs, maximum matching, structural rank, exposable nodes.
//! - [`design`]: structural verdicts, minimal and composite sensor/input placement.
//! - [`numeric`]: rank oracles, spectral radius, Kalman Monte-Carlo and the
//!   distributed estimator.

pub mod decompose;
pub mod design;
pub mod error;
pub mod numeric;
pub mod structmat;

pub use error::{Error, Result};

use serde::{Deserialize, Serialize};

/// Which dual problem is being solved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Mode {
    #[default]
    #[serde(rename = "obs")]
    Observability,
    #[serde(rename = "ctl")]
    Controllability,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Observability => "obs",
            Mode::Controllability => "ctl",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "obs" | "observability" => Ok(Mode::Observability),
            "ctl" | "controllability" => Ok(Mode::Controllability),
            other => Err(Error::Parse(format!("unknown mode {other:?}, expected obs or ctl"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}
