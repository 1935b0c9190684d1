//! Structured config ingestion: JSON with top-level `scheme`, `fields`,
//! `medium` keys and numeric values as {value, unit} pairs.
//!
//! Level structure may be given either as level energies (`scheme.levels`,
//! offsets from b) or as transition gaps per field (`scheme.transitions`,
//! keys "1".."4"); when both appear they must agree, and a redundant
//! field-4 gap must satisfy the variant's closure. Dipole moments default
//! to the value implied by the medium's radiative rate on each field's
//! transition.

use crate::error::{ModelError, Result};
use crate::medium::{
    dipole_from_radiative_rate, Dephasings, FieldSet, LevelScheme, MediumParams, SchemeVariant,
};
use crate::units::{to_angular_frequency, to_density, to_dipole, to_length};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A number with an explicit unit, e.g. {"value": 780, "unit": "nm"}.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Quantity {
    pub value: f64,
    pub unit: String,
}

impl Quantity {
    pub fn new(value: f64, unit: &str) -> Self {
        Quantity { value, unit: unit.to_string() }
    }

    pub fn angular(&self) -> Result<f64> {
        to_angular_frequency(self.value, &self.unit)
    }
}

fn angular_or_zero(q: &Option<Quantity>) -> Result<f64> {
    q.as_ref().map(|q| q.angular()).transpose().map(|v| v.unwrap_or(0.0))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelsConfig {
    pub a: Quantity,
    pub c: Quantity,
    pub d: Quantity,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionsConfig {
    #[serde(rename = "1")]
    pub g1: Quantity,
    #[serde(rename = "2")]
    pub g2: Quantity,
    #[serde(rename = "3")]
    pub g3: Quantity,
    /// Redundant; checked against the variant's closure when present.
    #[serde(rename = "4", default, skip_serializing_if = "Option::is_none")]
    pub g4: Option<Quantity>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayConfig {
    pub a: Option<Quantity>,
    pub b: Option<Quantity>,
    pub c: Option<Quantity>,
    pub d: Option<Quantity>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DephasingConfig {
    pub ab: Option<Quantity>,
    pub ca: Option<Quantity>,
    pub cb: Option<Quantity>,
    pub db: Option<Quantity>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DipolesConfig {
    #[serde(rename = "1")]
    pub d1: Option<Quantity>,
    #[serde(rename = "2")]
    pub d2: Option<Quantity>,
    #[serde(rename = "3")]
    pub d3: Option<Quantity>,
    #[serde(rename = "4")]
    pub d4: Option<Quantity>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    /// "double-lambda", "ladder-lambda", or "v-lambda".
    pub variant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<LevelsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transitions: Option<TransitionsConfig>,
    #[serde(default)]
    pub decay: DecayConfig,
    #[serde(default)]
    pub dephasing: DephasingConfig,
    #[serde(default)]
    pub dipoles: DipolesConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branching: Option<[[f64; 4]; 4]>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DrivenFieldConfig {
    pub rabi: Option<Quantity>,
    /// Phase in radians applied to the (signed) Rabi value.
    pub phase: Option<f64>,
    pub detuning: Option<Quantity>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalFieldConfig {
    pub rabi: Option<Quantity>,
    pub phase: Option<f64>,
    /// "backward" (default) or "forward".
    pub direction: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldsConfig {
    #[serde(rename = "1", default)]
    pub f1: DrivenFieldConfig,
    #[serde(rename = "2", default)]
    pub f2: DrivenFieldConfig,
    #[serde(rename = "3", default)]
    pub f3: DrivenFieldConfig,
    #[serde(rename = "4", default)]
    pub f4: SignalFieldConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumConfig {
    /// Number density; units m^-3 or cm^-3.
    pub density: Quantity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doppler_width: Option<Quantity>,
    pub radiative_rate: Quantity,
    pub length: Quantity,
}

/// The full config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub scheme: SchemeConfig,
    #[serde(default)]
    pub fields: FieldsConfig,
    pub medium: MediumConfig,
}

/// Parse the JSON text of a config file.
pub fn parse_config(text: &str) -> Result<ConfigFile> {
    serde_json::from_str(text).map_err(|e| ModelError::InvalidParameter {
        name: "config",
        message: e.to_string(),
    })
}

fn agree(got: f64, expect: f64) -> bool {
    (got - expect).abs() <= 1e-9 * got.abs().max(expect.abs())
}

/// Level offsets (E_a, E_c, E_d) implied by the three driven gaps.
fn levels_from_gaps(variant: SchemeVariant, g1: f64, g2: f64, g3: f64) -> (f64, f64, f64) {
    let e_a = g1;
    let e_c = match variant {
        SchemeVariant::DoubleLambda | SchemeVariant::LadderLambda => e_a - g2,
        SchemeVariant::VLambda => e_a + g2,
    };
    let e_d = match variant {
        SchemeVariant::DoubleLambda => e_c + g3,
        SchemeVariant::LadderLambda => e_c - g3,
        SchemeVariant::VLambda => g3,
    };
    (e_a, e_c, e_d)
}

fn resolve_levels(variant: SchemeVariant, scheme: &SchemeConfig) -> Result<(f64, f64, f64)> {
    let from_levels = scheme
        .levels
        .as_ref()
        .map(|l| Ok::<_, ModelError>((l.a.angular()?, l.c.angular()?, l.d.angular()?)))
        .transpose()?;
    let from_gaps = scheme
        .transitions
        .as_ref()
        .map(|t| {
            Ok::<_, ModelError>((
                t.g1.angular()?,
                t.g2.angular()?,
                t.g3.angular()?,
                t.g4.as_ref().map(|q| q.angular()).transpose()?,
            ))
        })
        .transpose()?;

    let (e_a, e_c, e_d) = match (from_levels, from_gaps) {
        (None, None) => {
            return Err(ModelError::MissingField {
                name: "scheme.levels",
                message: "provide level energies or scheme.transitions gaps".into(),
            })
        }
        (Some(levels), None) => levels,
        (None, Some((g1, g2, g3, _))) => levels_from_gaps(variant, g1, g2, g3),
        (Some((e_a, e_c, e_d)), Some((g1, g2, g3, _))) => {
            // Redundant specification: every derived level must agree.
            let (da, dc, dd) = levels_from_gaps(variant, g1, g2, g3);
            if !agree(e_a, da) {
                return Err(ModelError::Inconsistency {
                    identity: "omega_ab = E_a - E_b",
                    message: format!("levels give {e_a:e} rad/s, transitions give {da:e}"),
                });
            }
            if !agree(e_c, dc) {
                let identity = match variant {
                    SchemeVariant::VLambda => "omega_cb = omega_ab + omega_ca",
                    _ => "omega_cb = omega_ab - omega_ac",
                };
                return Err(ModelError::Inconsistency {
                    identity,
                    message: format!("levels give {e_c:e} rad/s, transitions give {dc:e}"),
                });
            }
            if !agree(e_d, dd) {
                let identity = match variant {
                    SchemeVariant::DoubleLambda => "omega_db = omega_ab - omega_ac + omega_dc",
                    SchemeVariant::LadderLambda => "omega_db = omega_ab - omega_ac - omega_cd",
                    SchemeVariant::VLambda => "omega_db = E_d - E_b",
                };
                return Err(ModelError::Inconsistency {
                    identity,
                    message: format!("levels give {e_d:e} rad/s, transitions give {dd:e}"),
                });
            }
            (e_a, e_c, e_d)
        }
    };

    if let Some((_, _, _, Some(g4))) = from_gaps {
        let signal = variant.signal_transition();
        let offsets = [e_a, 0.0, e_c, e_d];
        let expect = offsets[signal.upper.idx()] - offsets[signal.lower.idx()];
        if !agree(g4, expect) {
            return Err(ModelError::Inconsistency {
                identity: "field-4 gap = variant closure of gaps 1-3",
                message: format!(
                    "given {:e} rad/s, closure of the other transitions gives {:e}",
                    g4, expect
                ),
            });
        }
    }
    Ok((e_a, e_c, e_d))
}

/// Build the validated model objects from a parsed config.
pub fn build_scheme(config: &ConfigFile) -> Result<(LevelScheme, FieldSet, MediumParams)> {
    let variant = SchemeVariant::parse(&config.scheme.variant)?;
    let (e_a, e_c, e_d) = resolve_levels(variant, &config.scheme)?;

    let medium = MediumParams::new(
        to_density(config.medium.density.value, &config.medium.density.unit)?,
        angular_or_zero(&config.medium.doppler_width)?,
        config.medium.radiative_rate.angular()?,
        to_length(config.medium.length.value, &config.medium.length.unit)?,
    )?;

    let decay = [
        angular_or_zero(&config.scheme.decay.a)?,
        angular_or_zero(&config.scheme.decay.b)?,
        angular_or_zero(&config.scheme.decay.c)?,
        angular_or_zero(&config.scheme.decay.d)?,
    ];
    let dephasings = Dephasings {
        ab: angular_or_zero(&config.scheme.dephasing.ab)?,
        ca: angular_or_zero(&config.scheme.dephasing.ca)?,
        cb: angular_or_zero(&config.scheme.dephasing.cb)?,
        db: angular_or_zero(&config.scheme.dephasing.db)?,
    };

    // Dipoles default to the radiative-rate value on each field's own
    // transition gap.
    let offsets = [e_a, 0.0, e_c, e_d];
    let transitions = variant.transitions();
    let given = [
        &config.scheme.dipoles.d1,
        &config.scheme.dipoles.d2,
        &config.scheme.dipoles.d3,
        &config.scheme.dipoles.d4,
    ];
    let mut dipoles = [0.0; 4];
    for j in 0..4 {
        dipoles[j] = match given[j] {
            Some(q) => to_dipole(q.value, &q.unit)?,
            None => {
                let gap = offsets[transitions[j].upper.idx()] - offsets[transitions[j].lower.idx()];
                dipole_from_radiative_rate(gap, medium.gamma_r)?
            }
        };
    }

    let mut scheme = LevelScheme::new(variant, e_a, e_c, e_d, dipoles, decay, dephasings)?;
    if let Some(b) = config.scheme.branching {
        scheme = scheme.with_branching(b)?;
    }

    let rabi = |r: &Option<Quantity>, phase: &Option<f64>| -> Result<Complex64> {
        let magnitude = angular_or_zero(r)?;
        Ok(Complex64::from_polar(1.0, phase.unwrap_or(0.0)) * magnitude)
    };
    let rabis = [
        rabi(&config.fields.f1.rabi, &config.fields.f1.phase)?,
        rabi(&config.fields.f2.rabi, &config.fields.f2.phase)?,
        rabi(&config.fields.f3.rabi, &config.fields.f3.phase)?,
        rabi(&config.fields.f4.rabi, &config.fields.f4.phase)?,
    ];
    let detunings = [
        angular_or_zero(&config.fields.f1.detuning)?,
        angular_or_zero(&config.fields.f2.detuning)?,
        angular_or_zero(&config.fields.f3.detuning)?,
    ];
    let dir4 = match config.fields.f4.direction.as_deref() {
        None | Some("backward") => -1,
        Some("forward") => 1,
        Some(other) => {
            return Err(ModelError::UnknownName {
                kind: "field-4 direction",
                got: other.to_string(),
                valid: "backward, forward".into(),
            })
        }
    };
    let fields = FieldSet::with_detunings(&scheme, detunings, rabis, dir4)?;
    Ok((scheme, fields, medium))
}

/// Parse and build in one step.
pub fn load(text: &str) -> Result<(LevelScheme, FieldSet, MediumParams)> {
    build_scheme(&parse_config(text)?)
}
