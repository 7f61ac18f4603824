//! Physical constants and unit conversions used at the public boundaries.

use std::f64::consts::PI;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub const NM: f64 = 1e-9;
pub const UM: f64 = 1e-6;
pub const MM: f64 = 1e-3;
pub const FS: f64 = 1e-15;

pub fn deg_to_rad(deg: f64) -> f64 {
    deg.to_radians()
}

/// Vacuum wavelength (m) to angular frequency (rad/s).
pub fn angular_frequency(wavelength: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / wavelength
}

/// Angular frequency (rad/s) to vacuum wavelength (m).
pub fn wavelength(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / omega
}

/// Converts a small wavelength interval around `center` into an angular
/// frequency interval: Δω = 2πc·Δλ/λ².
pub fn bandwidth_to_omega(delta_lambda: f64, center: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT * delta_lambda / (center * center)
}
