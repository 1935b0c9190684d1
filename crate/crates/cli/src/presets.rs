//! Scenario presets for the media the backward-wave estimates were made
//! for: NO and NO2 on rotational or vibrational Raman splittings, and Rb
//! on a double-optical V scheme.
//!
//! Each preset is a complete config plus the reference density its
//! density estimate should reproduce. The Doppler-to-radiative ratio
//! Delta_D / gamma_r is never part of the quoted scenarios, so every
//! preset pins an assumed value and reports it; changing the pin changes
//! the sqrt(Delta_D / gamma_r) dispersion factor and nothing else.

use backscatter_core::config::{
    ConfigFile, DecayConfig, DrivenFieldConfig, FieldsConfig, LevelsConfig, MediumConfig,
    Quantity, SchemeConfig, SignalFieldConfig, TransitionsConfig,
};
use backscatter_core::{ModelError, Result};

/// How close the computed density must land to the reference value.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub enum MatchClass {
    /// Relative tolerance; the preset's assumptions pin every input, so
    /// the estimate should land on the reference up to rounding of the
    /// quoted wavelengths.
    ExactUnderAssumption(f64),
    /// Agreement within a multiplicative factor; used where the
    /// reference itself blurs distinct cases together.
    OrderOfMagnitude(f64),
}

impl MatchClass {
    pub fn label(&self) -> &'static str {
        match self {
            MatchClass::ExactUnderAssumption(_) => "exact-under-assumption",
            MatchClass::OrderOfMagnitude(_) => "order-of-magnitude",
        }
    }

    /// Whether `got / expected` is inside this class's tolerance.
    pub fn accepts(&self, ratio: f64) -> bool {
        match *self {
            MatchClass::ExactUnderAssumption(tol) => (ratio - 1.0).abs() <= tol,
            MatchClass::OrderOfMagnitude(factor) => ratio <= factor && ratio >= 1.0 / factor,
        }
    }
}

/// One named scenario: a config constructor plus the reference numbers
/// it is expected to reproduce.
#[derive(Debug)]
pub struct ScenarioPreset {
    pub name: &'static str,
    /// The scenario this preset encodes, quoting its defining numbers.
    pub note: &'static str,
    /// Assumed Delta_D / gamma_r; printed in every report.
    pub doppler_ratio: f64,
    /// Reference density the estimate targets, m^-3.
    pub expected_density: f64,
    pub tolerance: MatchClass,
    /// Signal wavelength for the chi and density targets when it differs
    /// from the scheme's frequency closure, m.
    pub quoted_lambda4: Option<f64>,
    /// Caveat recorded in the report text, if any.
    pub extra_note: Option<&'static str>,
    build: fn() -> ConfigFile,
}

impl ScenarioPreset {
    /// The full config this preset stands for. Pure: two calls build
    /// identical values.
    pub fn config(&self) -> ConfigFile {
        (self.build)()
    }
}

fn q(value: f64, unit: &str) -> Option<Quantity> {
    Some(Quantity::new(value, unit))
}

fn driven(rabi_rad_s: f64) -> DrivenFieldConfig {
    DrivenFieldConfig { rabi: q(rabi_rad_s, "rad/s"), phase: None, detuning: None }
}

fn fields(omega2: f64) -> FieldsConfig {
    FieldsConfig {
        f1: driven(1.0e3),
        f2: driven(omega2),
        f3: driven(1.0e5),
        f4: SignalFieldConfig::default(),
    }
}

fn medium(density_cm3: f64, doppler: f64, gamma_r: f64, length_cm: f64) -> MediumConfig {
    MediumConfig {
        density: Quantity::new(density_cm3, "cm^-3"),
        doppler_width: q(doppler, "rad/s"),
        radiative_rate: Quantity::new(gamma_r, "rad/s"),
        length: Quantity::new(length_cm, "cm"),
    }
}

fn rb_config() -> ConfigFile {
    ConfigFile {
        scheme: SchemeConfig {
            variant: "v-lambda".into(),
            levels: None,
            transitions: Some(TransitionsConfig {
                g1: Quantity::new(780.0, "nm"),
                g2: Quantity::new(565.0, "nm"),
                g3: Quantity::new(335.0, "nm"),
                g4: None,
            }),
            decay: DecayConfig {
                a: q(3.8e7, "rad/s"),
                b: None,
                c: q(6.0e5, "rad/s"),
                d: q(1.0e6, "rad/s"),
            },
            dephasing: Default::default(),
            dipoles: Default::default(),
            branching: None,
        },
        fields: fields(1.2e7),
        // 2.5x the reference density: the estimate is a threshold, and the
        // exact dispersion bends sub-linearly near the window edge, so a
        // cell at exactly the threshold leaves the matching root just
        // outside the window. The density comparison in the report is
        // independent of this choice.
        medium: medium(3.5e13, 3.8e7, 3.8e7, 1.0),
    }
}

/// Ladder scheme on molecular levels given in wavenumbers: b is the
/// rovibrational ground state, a the electronically excited state, and
/// c, d two Raman levels below c < a with d carrying the signal
/// transition d-b.
fn molecular_config(
    a_cm: f64,
    c_cm: f64,
    d_cm: f64,
    omega2: f64,
    density_cm3: f64,
    doppler: f64,
) -> ConfigFile {
    let gamma_r = 5.0e7;
    ConfigFile {
        scheme: SchemeConfig {
            variant: "ladder-lambda".into(),
            levels: Some(LevelsConfig {
                a: Quantity::new(a_cm, "cm^-1"),
                c: Quantity::new(c_cm, "cm^-1"),
                d: Quantity::new(d_cm, "cm^-1"),
            }),
            transitions: None,
            decay: DecayConfig {
                a: q(gamma_r, "rad/s"),
                b: None,
                c: q(1.0e4, "rad/s"),
                d: q(1.0e4, "rad/s"),
            },
            dephasing: Default::default(),
            dipoles: Default::default(),
            branching: None,
        },
        fields: fields(omega2),
        medium: medium(density_cm3, doppler, gamma_r, 10.0),
    }
}

/// 236 nm resonance expressed in wavenumbers.
const NO_A_CM: f64 = 1.0e7 / 236.0;
/// 337 nm resonance expressed in wavenumbers.
const NO2_A_CM: f64 = 1.0e7 / 337.0;

const ROTATIONAL_SHARED_REFERENCE: &str = "the 1.2e13 cm^-3 reference is quoted for NO and \
     NO2 alike although the density estimate scales with 1/lambda_ab^2, so the two cases \
     cannot both match it exactly; the tolerance is a factor of ten";

/// The five presets, in the order reports list them.
pub static PRESETS: [ScenarioPreset; 5] = [
    ScenarioPreset {
        name: "NO_rotational",
        note: "NO on the 236 nm A-X resonance with a 10 cm^-1 rotational splitting \
               (rigid-rotor J = 0, 1, 2 ladder, signal near 1 mm); reference density \
               1.2e13 cm^-3",
        doppler_ratio: 10.0,
        expected_density: 1.2e19,
        tolerance: MatchClass::OrderOfMagnitude(10.0),
        quoted_lambda4: None,
        extra_note: Some(ROTATIONAL_SHARED_REFERENCE),
        build: || molecular_config(NO_A_CM, 30.0, 10.0, 2.0e7, 1.2e13, 5.0e8),
    },
    ScenarioPreset {
        name: "NO2_rotational",
        note: "NO2 on the 337 nm resonance with a 10 cm^-1 rotational splitting; \
               reference density 1.2e13 cm^-3",
        doppler_ratio: 10.0,
        expected_density: 1.2e19,
        tolerance: MatchClass::OrderOfMagnitude(10.0),
        quoted_lambda4: None,
        extra_note: Some(ROTATIONAL_SHARED_REFERENCE),
        build: || molecular_config(NO2_A_CM, 30.0, 10.0, 2.0e7, 1.2e13, 5.0e8),
    },
    ScenarioPreset {
        name: "NO_vibrational",
        note: "NO on the 236 nm A-X resonance with the 1900 cm^-1 fundamental \
               vibration carrying a 5.3 um signal; reference density 8e15 cm^-3",
        doppler_ratio: 100.0,
        expected_density: 8.0e21,
        tolerance: MatchClass::ExactUnderAssumption(0.15),
        quoted_lambda4: None,
        extra_note: None,
        build: || molecular_config(NO_A_CM, 3800.0, 1900.0, 5.0e7, 8.0e15, 5.0e9),
    },
    ScenarioPreset {
        name: "NO2_vibrational",
        note: "NO2 on the 337 nm resonance with a 750 cm^-1 bending-mode splitting \
               carrying a 13.3 um signal; reference density 1.4e15 cm^-3",
        doppler_ratio: 100.0,
        expected_density: 1.4e21,
        tolerance: MatchClass::ExactUnderAssumption(0.05),
        quoted_lambda4: None,
        extra_note: None,
        build: || molecular_config(NO2_A_CM, 1500.0, 750.0, 5.0e7, 1.4e15, 5.0e9),
    },
    ScenarioPreset {
        name: "Rb",
        note: "Rb vapor on b = 5S1/2, a = 5P, c = 7D, d = 8P with lambda_1 = 780 nm, \
               lambda_2 = 565 nm, lambda_3 = 335 nm, and a 23.4 um signal wavelength; \
               reference density 1.4e13 cm^-3",
        doppler_ratio: 1.0,
        expected_density: 1.4e19,
        tolerance: MatchClass::ExactUnderAssumption(0.10),
        quoted_lambda4: Some(23.4e-6),
        extra_note: Some(
            "the rounded pump wavelengths close to a 14.95 um signal transition rather \
             than the quoted 23.4 um; the quoted value is used for the chi and density \
             targets, the closure value everywhere the scheme itself is involved",
        ),
        build: rb_config,
    },
];

/// Comma-separated preset names for error messages and help text.
pub fn valid_names() -> String {
    PRESETS.iter().map(|p| p.name).collect::<Vec<_>>().join(", ")
}

/// Look up a preset by its exact name.
pub fn find(name: &str) -> Result<&'static ScenarioPreset> {
    PRESETS.iter().find(|p| p.name == name).ok_or_else(|| ModelError::UnknownName {
        kind: "scenario preset",
        got: name.to_string(),
        valid: valid_names(),
    })
}
