//! Phase matching of the generated field: grating wavevector, direction
//! resolved mismatch, sinc envelope, the closed-form signal, and the
//! planner that inverts the feasibility conditions for backscattering.

use crate::constants::{C, EPSILON_0, HBAR};
use crate::dispersion::{eit_window, susceptibility_at_detuning};
use crate::error::{ModelError, Result};
use crate::medium::{FieldSet, Level, LevelScheme, MediumParams, SchemeVariant};
use num_complex::Complex64;
use serde::Serialize;

/// Margin interpreting the strict inequality in the coherence-floor
/// condition |Omega_2|^2 >> gamma_bc * Delta_D.
pub const INTENSITY_MARGIN: f64 = 10.0;

/// Grating wavevector imprinted on the Raman coherence by fields 1 and 2:
/// Delta_k = k_1 - k_2. With an ultra-dispersive k_1 this equals
/// (nu_1 - nu_2)/c + (nu_1 - omega_ab)/V_g.
pub fn coherence_wavevector(k1: f64, k2: f64) -> f64 {
    k1 - k2
}

/// Direction-resolved phase mismatch of the generated field:
/// kappa = (variant wavevector combination of k_1..k_3) - direction*|k_4|.
/// kappa = 0 is perfect matching in that direction.
pub fn mismatch(variant: SchemeVariant, k: [f64; 4], signal_direction: i8) -> Result<f64> {
    if signal_direction != 1 && signal_direction != -1 {
        return Err(ModelError::InvalidParameter {
            name: "signal_direction",
            message: format!("must be +1 or -1, got {signal_direction}"),
        });
    }
    Ok(variant.wavevector_combination(k[0], k[1], k[2]) - signal_direction as f64 * k[3].abs())
}

/// Which sinc convention the envelope uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnvelopeForm {
    /// e^{i kappa L / 2} sinc(kappa L / 2): the exact value of
    /// (1/L) integral_0^L e^{i kappa z} dz.
    #[default]
    Exact,
    /// sin(kappa L) / (kappa L): the printed shorthand, real-valued, with
    /// zeros at half the spacing of the exact form.
    PaperLiteral,
}

/// sin(x)/x with the removable singularity handled.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-6 {
        // Series keeps full precision where sin(x)/x loses it.
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Phase-matching envelope accumulated over a cell of length L.
pub fn envelope(kappa: f64, length: f64) -> Result<Complex64> {
    envelope_with_form(kappa, length, EnvelopeForm::Exact)
}

/// Envelope in an explicitly chosen convention.
pub fn envelope_with_form(kappa: f64, length: f64, form: EnvelopeForm) -> Result<Complex64> {
    if !(length > 0.0) {
        return Err(ModelError::InvalidParameter {
            name: "length",
            message: format!("cell length must be positive, got {length:e}"),
        });
    }
    let x = 0.5 * kappa * length;
    match form {
        EnvelopeForm::Exact => Ok(Complex64::from_polar(1.0, x) * sinc(x)),
        EnvelopeForm::PaperLiteral => Ok(Complex64::new(sinc(kappa * length), 0.0)),
    }
}

/// Generated-field amplitude after a cell of length L with a z-uniform
/// grating: Omega_4 = envelope(kappa, L) * eta_4 * L * rho_cb *
/// conj(Omega_3) / Gamma_db.
pub fn signal_closed_form(
    rho_cb: Complex64,
    omega3: Complex64,
    eta4: f64,
    gamma_db: Complex64,
    kappa: f64,
    length: f64,
) -> Result<Complex64> {
    if gamma_db.norm() == 0.0 {
        return Err(ModelError::Singularity { context: "signal_closed_form", value: 0.0 });
    }
    Ok(envelope(kappa, length)? * eta4 * length * rho_cb * omega3.conj() / gamma_db)
}

/// Target susceptibility that bends k_1 enough for backward matching:
/// chi_ab = 2(n_1 - 1) = -4 lambda_ab / lambda_db. Wavelengths must be
/// positive.
pub fn required_chi(lambda_ab: f64, lambda_db: f64) -> f64 {
    -4.0 * lambda_ab / lambda_db
}

/// Density estimates inverting the resonance condition.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DensityEstimate {
    /// N at the actual working detuning: (32 pi k_4 / 3 lambda_ab^2) *
    /// |Omega_2|^2 / (gamma_r |delta|).
    pub exact: f64,
    /// N at the transparency-window edge, where |Omega_2|^2/|delta|
    /// collapses to sqrt(Delta_D gamma_r):
    /// (32 pi k_4 / 3 lambda_ab^2) * sqrt(Delta_D / gamma_r).
    pub window_limit: f64,
}

/// Medium density required for backward phase matching at detuning
/// delta, in both the exact and window-limit forms.
pub fn required_density(
    lambda_ab: f64,
    k4: f64,
    omega2: f64,
    gamma_r: f64,
    delta: f64,
    doppler_width: f64,
) -> Result<DensityEstimate> {
    for (name, v) in [
        ("lambda_ab", lambda_ab),
        ("k4", k4),
        ("omega2", omega2),
        ("gamma_r", gamma_r),
        ("doppler_width", doppler_width),
    ] {
        if !(v > 0.0) {
            return Err(ModelError::InvalidParameter {
                name,
                message: format!("must be positive, got {v:e}"),
            });
        }
    }
    if delta == 0.0 {
        return Err(ModelError::Singularity { context: "required_density", value: 0.0 });
    }
    let prefactor = 32.0 * std::f64::consts::PI * k4 / (3.0 * lambda_ab * lambda_ab);
    Ok(DensityEstimate {
        exact: prefactor * omega2 * omega2 / (gamma_r * delta.abs()),
        window_limit: prefactor * (doppler_width / gamma_r).sqrt(),
    })
}

/// Left side of the resonance condition 3 lambda_ab^2 N gamma_r delta /
/// (16 pi |Omega_2|^2); equals -2 k_4 at the matched density.
pub fn resonance_condition(
    lambda_ab: f64,
    n_density: f64,
    gamma_r: f64,
    delta: f64,
    omega2: f64,
) -> f64 {
    3.0 * lambda_ab * lambda_ab * n_density * gamma_r * delta
        / (16.0 * std::f64::consts::PI * omega2 * omega2)
}

/// Minimum coupling power keeping the Raman coherence ahead of Doppler
/// dephasing.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IntensityFloor {
    /// Minimum |Omega|^2, rad^2/s^2.
    pub omega_sq_min: f64,
    /// Corresponding intensity, W/m^2, via I = 2 eps_0 c (hbar |Omega| / dipole)^2.
    pub intensity: f64,
}

/// Floor with the default margin of [`INTENSITY_MARGIN`].
pub fn intensity_floor(gamma_bc: f64, doppler_width: f64, dipole: f64) -> Result<IntensityFloor> {
    intensity_floor_with_margin(gamma_bc, doppler_width, dipole, INTENSITY_MARGIN)
}

/// Floor with an explicit margin factor interpreting the ">>".
pub fn intensity_floor_with_margin(
    gamma_bc: f64,
    doppler_width: f64,
    dipole: f64,
    margin: f64,
) -> Result<IntensityFloor> {
    if !(dipole > 0.0) || gamma_bc < 0.0 || doppler_width < 0.0 || !(margin > 0.0) {
        return Err(ModelError::InvalidParameter {
            name: "intensity_floor",
            message: format!(
                "need dipole > 0, margin > 0, rates >= 0; got dipole = {dipole:e}, \
                 gamma_bc = {gamma_bc:e}, doppler = {doppler_width:e}, margin = {margin:e}"
            ),
        });
    }
    let omega_sq_min = margin * gamma_bc * doppler_width;
    let intensity =
        2.0 * EPSILON_0 * C * (HBAR * omega_sq_min.sqrt() / dipole).powi(2);
    Ok(IntensityFloor { omega_sq_min, intensity })
}

/// Wavevectors [k_1, k_2, k_3, k_4] at probe detuning delta: k_1 from the
/// full dispersion relation, the others at vacuum values (fields 2..4 are
/// far from the dispersive resonance).
pub fn wavevectors_at(
    scheme: &LevelScheme,
    fields: &FieldSet,
    medium: &MediumParams,
    delta: f64,
) -> Result<[f64; 4]> {
    let chi = susceptibility_at_detuning(scheme, fields, medium, delta)?;
    let delta0 = fields.probe_detuning(scheme);
    let gap1 = scheme.gap(1);
    // Assembled so the detuning enters additively: the dispersive term
    // carries a slope of order 1/V_g and must not be quantized at the
    // optical-frequency ulp.
    let k1 = gap1 / C + delta / C + (gap1 + delta) * 0.5 * chi.re / C;
    let k4 = fields.f(4).nu / C + (delta - delta0) / C;
    Ok([k1, fields.f(2).nu / C, fields.f(3).nu / C, k4])
}

/// Grating wavevector Delta_k = k_1(delta) - k_2 with dispersive k_1.
pub fn grating_wavevector_at(
    scheme: &LevelScheme,
    fields: &FieldSet,
    medium: &MediumParams,
    delta: f64,
) -> Result<f64> {
    let k = wavevectors_at(scheme, fields, medium, delta)?;
    Ok(coherence_wavevector(k[0], k[1]))
}

/// Planner output: the matched detuning, the density the resonance
/// condition demands there, and the directional envelopes.
#[derive(Debug, Clone, Serialize)]
pub struct PhaseMatchReport {
    /// Grating wavevector at the working detuning, rad/m.
    pub delta_k: f64,
    /// Mismatch for forward emission at the working detuning, rad/m.
    pub kappa_forward: f64,
    /// Mismatch for backward emission at the working detuning, rad/m.
    pub kappa_backward: f64,
    /// |envelope| for forward emission, in [0, 1].
    pub envelope_forward: f64,
    /// |envelope| for backward emission, in [0, 1].
    pub envelope_backward: f64,
    /// Root of the backward matching condition, rad/s; absent when no
    /// root lies inside the transparency window.
    pub delta_star: Option<f64>,
    /// Density the resonance condition requires at delta_star, m^-3.
    #[serde(rename = "N_star")]
    pub n_star: Option<f64>,
    /// Susceptibility target -4 lambda_ab / lambda_db.
    pub chi_target: f64,
    pub feasible: bool,
    /// Why the plan failed, or how it succeeded.
    pub reason: String,
}

/// Plan a backward-matched configuration with the default exact envelope.
pub fn plan_backscatter(
    scheme: &LevelScheme,
    fields: &FieldSet,
    medium: &MediumParams,
) -> Result<PhaseMatchReport> {
    plan_backscatter_with(scheme, fields, medium, EnvelopeForm::Exact)
}

/// Plan a backward-matched configuration: root-find kappa_backward(delta)
/// = 0 over the transparency window using the exact dispersion, then
/// check the coherence floor. An unmatched geometry is a valid report
/// with `feasible = false`, not an error.
pub fn plan_backscatter_with(
    scheme: &LevelScheme,
    fields: &FieldSet,
    medium: &MediumParams,
    form: EnvelopeForm,
) -> Result<PhaseMatchReport> {
    fields.validate(scheme)?;
    let omega2 = fields.f(2).rabi.norm();
    if omega2 == 0.0 {
        return Err(ModelError::InvalidParameter {
            name: "fields.2.rabi",
            message: "grating computation requires |Omega_2| > 0".into(),
        });
    }

    // Search window: the Doppler-limited transparency width, or the
    // coupling Rabi frequency when no Doppler width is set.
    let window = if medium.doppler_width > 0.0 {
        eit_window(medium, fields.f(2).rabi)?
    } else {
        omega2
    };

    let kappa_b = |delta: f64| -> Result<f64> {
        let k = wavevectors_at(scheme, fields, medium, delta)?;
        mismatch(scheme.variant, k, -1)
    };

    let k4 = fields.f(4).nu / C;
    let mut lo = -window;
    let mut hi = 0.0;
    let mut f_lo = kappa_b(lo)?;
    let f_hi = kappa_b(hi)?;

    let root = if f_lo == 0.0 {
        Some(lo)
    } else if f_hi == 0.0 {
        Some(hi)
    } else if f_lo * f_hi > 0.0 {
        None
    } else {
        // Bisection; kappa_backward is monotone in delta (slope 1/V_g), so
        // the bracket stays valid. Tolerance well under the 1e-6 k_4
        // closure requirement.
        let mut best = 0.5 * (lo + hi);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let f_mid = kappa_b(mid)?;
            best = mid;
            if f_mid.abs() <= 1e-9 * k4 {
                break;
            }
            if f_mid * f_lo > 0.0 {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
        }
        Some(best)
    };

    // Evaluate the report at the root, or at the input detuning to show
    // how far from matching the nominal configuration stays.
    let at = root.unwrap_or_else(|| fields.probe_detuning(scheme));
    let k = wavevectors_at(scheme, fields, medium, at)?;
    let kappa_fwd = mismatch(scheme.variant, k, 1)?;
    let kappa_bwd = mismatch(scheme.variant, k, -1)?;
    let fs_at = fields.at_probe_detuning(scheme, at);
    let lambda_ab = 2.0 * std::f64::consts::PI * C / fs_at.f(1).nu;
    let lambda_db = 2.0 * std::f64::consts::PI * C / fs_at.f(4).nu;
    let chi_target = required_chi(lambda_ab, lambda_db);

    let n_star = match root {
        Some(delta) => {
            // Only the exact estimate is reported; the window-limit slot
            // needs a positive Doppler width, so substitute gamma_r when
            // none is set.
            let dw = if medium.doppler_width > 0.0 { medium.doppler_width } else { medium.gamma_r };
            Some(required_density(lambda_ab, k[3], omega2, medium.gamma_r, delta, dw)?.exact)
        }
        None => None,
    };

    let floor = intensity_floor(
        scheme.coherence_decay(Level::C, Level::B),
        medium.doppler_width,
        scheme.dipole_moments[1],
    )?;
    let floor_ok = omega2 * omega2 >= floor.omega_sq_min;

    let (feasible, reason) = match (root, floor_ok) {
        (Some(_), true) => (true, "backward matching root found inside the transparency window".to_string()),
        (Some(_), false) => (
            false,
            format!(
                "coupling power below the coherence floor: |Omega_2|^2 = {:e} < {:e}",
                omega2 * omega2,
                floor.omega_sq_min
            ),
        ),
        (None, _) => (false, "detuning exceeds EIT window".to_string()),
    };

    Ok(PhaseMatchReport {
        delta_k: coherence_wavevector(k[0], k[1]),
        kappa_forward: kappa_fwd,
        kappa_backward: kappa_bwd,
        envelope_forward: envelope_with_form(kappa_fwd, medium.length, form)?.norm(),
        envelope_backward: envelope_with_form(kappa_bwd, medium.length, form)?.norm(),
        delta_star: root,
        n_star,
        chi_target,
        feasible,
        reason,
    })
}
