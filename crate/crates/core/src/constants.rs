//! Physical constants (SI, CODATA 2018) and small unit helpers.

/// Speed of light in vacuum, m/s.
pub const C: f64 = 299_792_458.0;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Vacuum permittivity, F/m.
pub const EPS0: f64 = 8.854_187_812_8e-12;

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Angular frequency (rad/s) of a vacuum wavelength (m).
pub fn omega_from_wavelength(lambda: f64) -> f64 {
    TWO_PI * C / lambda
}

/// Vacuum wavelength (m) of an angular frequency (rad/s).
pub fn wavelength_from_omega(omega: f64) -> f64 {
    TWO_PI * C / omega
}
