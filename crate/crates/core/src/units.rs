//! Unit conversions for config ingestion.
//!
//! Everything internal is SI with angular frequencies in rad/s. Inputs may
//! carry wavelength (nm, um, m), wavenumber (cm^-1), ordinary frequency
//! (Hz..THz), or rad/s directly; densities may be per m^3 or per cm^3;
//! dipole moments C*m or debye.

use crate::constants::C;
use crate::error::{ModelError, Result};
use std::f64::consts::PI;

/// 1 debye in C*m.
pub const DEBYE: f64 = 1e-21 / C;

/// Angular frequency (rad/s) of a vacuum wavelength (m).
pub fn wavelength_to_angular(lambda_m: f64) -> f64 {
    2.0 * PI * C / lambda_m
}

/// Vacuum wavelength (m) of an angular frequency (rad/s).
pub fn angular_to_wavelength(nu_rad_s: f64) -> f64 {
    2.0 * PI * C / nu_rad_s
}

/// Angular frequency (rad/s) of a spectroscopic wavenumber (cm^-1).
pub fn wavenumber_to_angular(sigma_cm: f64) -> f64 {
    2.0 * PI * C * (sigma_cm * 100.0)
}

/// Convert a (value, unit) pair to rad/s.
///
/// Accepted units: "rad/s", "Hz", "kHz", "MHz", "GHz", "THz", "nm", "um",
/// "m", "cm^-1". Wavelength units require value > 0.
pub fn to_angular_frequency(value: f64, unit: &str) -> Result<f64> {
    let out = match unit {
        "rad/s" => value,
        "Hz" => 2.0 * PI * value,
        "kHz" => 2.0 * PI * value * 1e3,
        "MHz" => 2.0 * PI * value * 1e6,
        "GHz" => 2.0 * PI * value * 1e9,
        "THz" => 2.0 * PI * value * 1e12,
        "cm^-1" => wavenumber_to_angular(value),
        "nm" | "um" | "m" => {
            if value <= 0.0 {
                return Err(ModelError::InvalidParameter {
                    name: "wavelength",
                    message: format!("must be positive, got {value}"),
                });
            }
            let lambda_m = match unit {
                "nm" => value * 1e-9,
                "um" => value * 1e-6,
                _ => value,
            };
            wavelength_to_angular(lambda_m)
        }
        other => {
            return Err(ModelError::UnknownName {
                kind: "frequency unit",
                got: other.to_string(),
                valid: "rad/s, Hz, kHz, MHz, GHz, THz, nm, um, m, cm^-1".into(),
            })
        }
    };
    if !out.is_finite() {
        return Err(ModelError::InvalidParameter {
            name: "frequency",
            message: format!("{value} {unit} is not finite in rad/s"),
        });
    }
    Ok(out)
}

/// Convert a (value, unit) pair to a number density in m^-3.
pub fn to_density(value: f64, unit: &str) -> Result<f64> {
    match unit {
        "m^-3" => Ok(value),
        "cm^-3" => Ok(value * 1e6),
        other => Err(ModelError::UnknownName {
            kind: "density unit",
            got: other.to_string(),
            valid: "m^-3, cm^-3".into(),
        }),
    }
}

/// Convert a (value, unit) pair to a dipole moment in C*m.
pub fn to_dipole(value: f64, unit: &str) -> Result<f64> {
    match unit {
        "C*m" => Ok(value),
        "debye" | "D" => Ok(value * DEBYE),
        other => Err(ModelError::UnknownName {
            kind: "dipole unit",
            got: other.to_string(),
            valid: "C*m, debye".into(),
        }),
    }
}

/// Convert a (value, unit) pair to a length in m.
pub fn to_length(value: f64, unit: &str) -> Result<f64> {
    match unit {
        "m" => Ok(value),
        "cm" => Ok(value * 1e-2),
        "mm" => Ok(value * 1e-3),
        "um" => Ok(value * 1e-6),
        "nm" => Ok(value * 1e-9),
        other => Err(ModelError::UnknownName {
            kind: "length unit",
            got: other.to_string(),
            valid: "m, cm, mm, um, nm".into(),
        }),
    }
}
