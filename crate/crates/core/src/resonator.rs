//! Ring geometry, per-resonance coupling/loss bookkeeping, and the Lorentzian
//! field-enhancement factors of the asymptotic-in/out fields.

use num_complex::Complex64;

use crate::constants::TWO_PI;
use crate::dispersion::qpm_check;
use crate::error::{Error, Result};
use crate::Sign;

/// Exit channel of a photon: the physical bus waveguide ("actual") or the
/// phantom waveguide that models scattering loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    Actual,
    Phantom,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 2] = [ChannelKind::Actual, ChannelKind::Phantom];

    pub fn label(self) -> &'static str {
        match self {
            ChannelKind::Actual => "ac",
            ChannelKind::Phantom => "ph",
        }
    }

    fn index(self) -> usize {
        match self {
            ChannelKind::Actual => 0,
            ChannelKind::Phantom => 1,
        }
    }
}

/// Which resonance a mode plays in the down-conversion process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeRole {
    Pump,
    Signal,
    Idler,
}

impl ModeRole {
    pub fn label(self) -> &'static str {
        match self {
            ModeRole::Pump => "P",
            ModeRole::Signal => "S",
            ModeRole::Idler => "I",
        }
    }
}

/// Ring cross-section and circumference.
#[derive(Debug, Clone)]
pub struct RingGeometry {
    /// Nominal radius, m.
    pub radius: f64,
    /// Cross-section width, m.
    pub width: f64,
    /// Cross-section height, m.
    pub height: f64,
    pub material: String,
}

impl RingGeometry {
    pub fn new(radius: f64, width: f64, height: f64, material: impl Into<String>) -> Result<Self> {
        if !(radius > 0.0) || !(width > 0.0) || !(height > 0.0) {
            return Err(Error::Domain(format!(
                "ring dimensions must be positive (R={radius}, w={width}, h={height})"
            )));
        }
        Ok(Self { radius, width, height, material: material.into() })
    }

    /// `L = 2πR`, m.
    pub fn circumference(&self) -> f64 {
        TWO_PI * self.radius
    }
}

/// Total and per-channel decay rates of one resonance, rad/s.
#[derive(Debug, Clone, Copy)]
pub struct DecayRates {
    pub total: f64,
    pub actual: f64,
    pub phantom: f64,
}

/// One ring resonance with its coupling and loss parameters.
///
/// `q_extrinsic` is the quality factor of the coupling to the bus waveguide,
/// `q_intrinsic` the one of the loss channel; `1/Q_load = 1/Q_ac + 1/Q_ph`.
/// The coupling amplitude γ is taken real and non-negative: every observable
/// computed downstream depends only on |γ|² = 2vΓ, so the phase is pure
/// convention.
#[derive(Debug, Clone)]
pub struct ResonanceMode {
    pub role: ModeRole,
    /// Azimuthal mode number.
    pub m: u32,
    /// Centre angular frequency, rad/s.
    pub omega: f64,
    /// Ring circumference, m (shared by the triple this mode belongs to).
    pub circumference: f64,
    /// Extrinsic quality factor (bus-waveguide coupling).
    pub q_extrinsic: f64,
    /// Intrinsic quality factor (loss channel); may be infinite.
    pub q_intrinsic: f64,
    /// Group velocity per channel, m/s.
    v: [f64; 2],
    /// Channel wavenumber at the bin centre, rad/m.
    k_center: [f64; 2],
}

impl ResonanceMode {
    /// The phantom channel mirrors the actual one (same group velocity, same
    /// centre wavenumber) unless overridden; it is a loss model and carries
    /// no dispersion of its own. The centre wavenumbers default to the ring
    /// value `κ = 2πm/L`; they cancel out of every observable.
    pub fn new(
        role: ModeRole,
        m: u32,
        omega: f64,
        geometry: &RingGeometry,
        v_group: f64,
        q_extrinsic: f64,
        q_intrinsic: f64,
    ) -> Result<Self> {
        if !(omega > 0.0) {
            return Err(Error::Domain(format!("resonance frequency must be positive ({omega})")));
        }
        if m == 0 {
            return Err(Error::Domain("mode number must be positive".into()));
        }
        if !(v_group > 0.0) {
            return Err(Error::Domain(format!("group velocity must be positive ({v_group})")));
        }
        if !(q_extrinsic > 0.0) || !(q_intrinsic > 0.0) {
            return Err(Error::Domain(format!(
                "quality factors must be positive (Q_ac={q_extrinsic}, Q_ph={q_intrinsic})"
            )));
        }
        let kappa = TWO_PI * m as f64 / geometry.circumference();
        Ok(Self {
            role,
            m,
            omega,
            circumference: geometry.circumference(),
            q_extrinsic,
            q_intrinsic,
            v: [v_group, v_group],
            k_center: [kappa, kappa],
        })
    }

    pub fn with_phantom_velocity(mut self, v: f64) -> Result<Self> {
        if !(v > 0.0) {
            return Err(Error::Domain(format!("group velocity must be positive ({v})")));
        }
        self.v[ChannelKind::Phantom.index()] = v;
        Ok(self)
    }

    pub fn with_k_center(mut self, channel: ChannelKind, k: f64) -> Self {
        self.k_center[channel.index()] = k;
        self
    }

    /// Resonant wavenumber in the ring, `κ = 2πm/L`, rad/m.
    pub fn kappa(&self) -> f64 {
        TWO_PI * self.m as f64 / self.circumference
    }

    pub fn radius(&self) -> f64 {
        self.circumference / TWO_PI
    }

    pub fn quality(&self, channel: ChannelKind) -> f64 {
        match channel {
            ChannelKind::Actual => self.q_extrinsic,
            ChannelKind::Phantom => self.q_intrinsic,
        }
    }

    /// Loaded quality factor, `1/Q_load = 1/Q_ac + 1/Q_ph`.
    pub fn q_loaded(&self) -> f64 {
        1.0 / (1.0 / self.q_extrinsic + 1.0 / self.q_intrinsic)
    }

    /// Total decay rate `Γ̄ = ω/(2 Q_load)`, rad/s.
    pub fn gamma_total(&self) -> f64 {
        self.omega / (2.0 * self.q_loaded())
    }

    /// Per-channel decay rate `Γ^λ = ω/(2 Q^λ)`, rad/s.
    pub fn gamma(&self, channel: ChannelKind) -> f64 {
        self.omega / (2.0 * self.quality(channel))
    }

    pub fn decay_rates(&self) -> DecayRates {
        DecayRates {
            total: self.gamma_total(),
            actual: self.gamma(ChannelKind::Actual),
            phantom: self.gamma(ChannelKind::Phantom),
        }
    }

    /// Escape efficiency `η^λ = Γ^λ/Γ̄`; the two channels sum to one.
    pub fn escape_efficiency(&self, channel: ChannelKind) -> f64 {
        self.gamma(channel) / self.gamma_total()
    }

    pub fn group_velocity(&self, channel: ChannelKind) -> f64 {
        self.v[channel.index()]
    }

    pub fn k_center(&self, channel: ChannelKind) -> f64 {
        self.k_center[channel.index()]
    }

    /// Coupling magnitude `|γ^λ| = √(2 v^λ Γ^λ)`.
    pub fn coupling_mag(&self, channel: ChannelKind) -> f64 {
        (2.0 * self.group_velocity(channel) * self.gamma(channel)).sqrt()
    }

    /// Field-enhancement factor of the asymptotic fields,
    /// `F^λ_±(k) = (1/√L) γ* / (v^λ(K^λ - k) ± iΓ̄)`, units m^(-1/2).
    /// `Sign::Plus` is the asymptotic-out branch, `Sign::Minus` asymptotic-in.
    pub fn enhancement(&self, channel: ChannelKind, sign: Sign, k: f64) -> Complex64 {
        let v = self.group_velocity(channel);
        let detune = v * (self.k_center(channel) - k);
        let denom = Complex64::new(detune, sign.signum() * self.gamma_total());
        Complex64::new(self.coupling_mag(channel) / self.circumference.sqrt(), 0.0) / denom
    }

    /// Finesse `F^λ = v^λ/(2 Γ̄ R)` of the resonance seen from `channel`.
    pub fn finesse(&self, channel: ChannelKind) -> f64 {
        self.group_velocity(channel) / (2.0 * self.gamma_total() * self.radius())
    }

    /// Free spectral range `v_g/L` expressed as an ordinary frequency, Hz.
    pub fn fsr_hz(&self, channel: ChannelKind) -> f64 {
        self.group_velocity(channel) / self.circumference
    }
}

/// A quasi-phase-matched pump/signal/idler resonance set on one ring,
/// `ω_S ≥ ω_I`, with the matched sign of `m_P - m_S - m_I ± 2 = 0`.
#[derive(Debug, Clone)]
pub struct ResonantTriple {
    pub pump: ResonanceMode,
    pub signal: ResonanceMode,
    pub idler: ResonanceMode,
    pub sign: Sign,
}

impl ResonantTriple {
    pub fn new(pump: ResonanceMode, signal: ResonanceMode, idler: ResonanceMode) -> Result<Self> {
        if signal.omega < idler.omega {
            return Err(Error::Domain(format!(
                "signal frequency {:.6e} below idler frequency {:.6e}; swap the roles",
                signal.omega, idler.omega
            )));
        }
        if pump.circumference != signal.circumference || pump.circumference != idler.circumference
        {
            return Err(Error::Domain("triple members sit on different rings".into()));
        }
        let sign = qpm_check(pump.m, signal.m, idler.m).ok_or_else(|| {
            Error::Domain(format!(
                "mode numbers ({}, {}, {}) satisfy no quasi-phase-matching condition",
                pump.m, signal.m, idler.m
            ))
        })?;
        Ok(Self { pump, signal, idler, sign })
    }

    /// Frequency-bin mismatch `Δω = ω₀ - ω_S - ω_I` for pump frequency `ω₀`.
    pub fn delta_omega(&self, omega0: f64) -> f64 {
        omega0 - self.signal.omega - self.idler.omega
    }

    /// Both photons generated in the same frequency bin.
    pub fn is_degenerate(&self) -> bool {
        self.signal.m == self.idler.m
    }

    pub fn radius(&self) -> f64 {
        self.pump.radius()
    }
}
