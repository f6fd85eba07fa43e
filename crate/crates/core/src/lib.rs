//! Photon-pair generation in χ⁽²⁾ microring resonators.
//!
//! Models a ring resonator point-coupled to a bus ("actual") waveguide and a
//! fictitious phantom waveguide that stands in for scattering loss, so the
//! statistics of lost photons stay on the books. The crate computes, at desk
//! scale:
//!
//! - resonance combs and quasi-phase-matched (QPM) pump/signal/idler triples
//!   from effective-index dispersion data ([`dispersion`]),
//! - Lorentzian field-enhancement factors and decay-rate bookkeeping for each
//!   resonance ([`resonator`]),
//! - the quasi-phase-matched nonlinear overlap strength K̄ from ring
//!   cross-section mode profiles or a supplied effective area ([`overlap`]),
//! - continuous-wave pair rates, vacuum power, coupling sweeps and signal
//!   spectra ([`cw`]),
//! - pulsed-pump joint spectral amplitudes, squeezing matrices, Schmidt and
//!   Takagi decompositions, and photon-number moments ([`pulsed`]).
//!
//! All quantities are SI: angular frequencies in rad/s, wavenumbers in rad/m,
//! lengths in m, powers in W. Types are immutable after construction and all
//! operations are pure, so everything can be evaluated concurrently.

pub mod constants;
pub mod cw;
pub mod dispersion;
pub mod error;
pub mod numerics;
pub mod overlap;
pub mod pulsed;
pub mod resonator;

pub use error::{Error, Result};

/// Two-valued sign used both for the asymptotic-field branch of the
/// enhancement factors and for which quasi-phase-matching condition
/// (`m_P - m_S - m_I ± 2 = 0`) a resonance triple satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const ALL: [Sign; 2] = [Sign::Plus, Sign::Minus];

    /// +1.0 or -1.0.
    pub fn signum(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "plus" => Ok(Sign::Plus),
            "-" | "minus" => Ok(Sign::Minus),
            other => Err(Error::Domain(format!("not a sign: {other:?}"))),
        }
    }
}
