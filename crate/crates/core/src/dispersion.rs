//! Linear response of the probe transition: susceptibility, wave vector,
//! absorption, group velocity, and the Doppler-limited transparency
//! window.

use crate::bloch::{weak_probe_coherence, ComplexRates};
use crate::constants::C;
use crate::error::{ModelError, Result};
use crate::medium::{coupling_constant, FieldSet, LevelScheme, MediumParams};
use num_complex::Complex64;

/// Probe susceptibility of the driven medium at the probe frequency.
///
/// Built from the ratio rho_ab / Omega_1, which is independent of the
/// probe amplitude in the linear regime, so the stored Omega_1 never
/// enters: chi = (2 c / nu_1) eta_1 i Gamma_cb / D with
/// D = Gamma_ab Gamma_cb + |Omega_2|^2. With the coupling field off this
/// degrades to the bare two-level form i / Gamma_ab.
pub fn susceptibility(
    scheme: &LevelScheme,
    fields: &FieldSet,
    medium: &MediumParams,
) -> Result<Complex64> {
    let nu1 = fields.f(1).nu;
    if nu1 <= 0.0 {
        return Err(ModelError::DispersionSingularity {
            nu: nu1,
            message: "probe frequency must be positive".into(),
        });
    }
    let eta1 = coupling_constant(nu1, medium.n_density, scheme.dipole_moments[0])?;
    let rates = ComplexRates::of(scheme, fields);
    // Unit probe amplitude: rho_ab is then exactly the ratio rho_ab/Omega_1.
    let unit = Complex64::new(1.0, 0.0);
    let (rho_ab, _) = weak_probe_coherence(unit, fields.f(2).rabi, rates.ab, rates.cb)?;
    Ok(2.0 * C / nu1 * eta1 * rho_ab)
}

/// Probe susceptibility as a smooth function of the probe detuning.
///
/// Equivalent to moving the probe with `at_probe_detuning` and calling
/// `susceptibility`, except that `delta` enters the complex rates
/// directly instead of being rounded into an absolute optical frequency,
/// whose ulp (about 0.5 rad/s at 2.4e15) would quantize the steep
/// dispersive response into a staircase. Root finders over the
/// transparency window need this exactness; coarse scans do not.
pub fn susceptibility_at_detuning(
    scheme: &LevelScheme,
    fields: &FieldSet,
    medium: &MediumParams,
    delta: f64,
) -> Result<Complex64> {
    // (2c/nu) eta(nu) with the frequency cancelled analytically.
    let prefactor = medium.n_density * scheme.dipole_moments[0] * scheme.dipole_moments[0]
        / (crate::constants::EPSILON_0 * crate::constants::HBAR);
    let delta2 = fields.f(2).nu - scheme.gap(2);
    let gamma_ab = Complex64::new(
        scheme.coherence_decay(crate::medium::Level::A, crate::medium::Level::B),
        -delta,
    );
    // Two-photon detuning of the Raman coherence in the rotating frame:
    // nu_1 - nu_2 for the Lambda-type stacks, nu_1 + nu_2 for the V stack.
    let raman = match scheme.variant {
        crate::medium::SchemeVariant::VLambda => -(delta + delta2),
        _ => delta2 - delta,
    };
    let gamma_cb = Complex64::new(
        scheme.coherence_decay(crate::medium::Level::C, crate::medium::Level::B),
        raman,
    );
    let unit = Complex64::new(1.0, 0.0);
    let (rho_ab, _) = weak_probe_coherence(unit, fields.f(2).rabi, gamma_ab, gamma_cb)?;
    Ok(prefactor * rho_ab)
}

/// Two-level susceptibility of an arbitrary driven transition, used for
/// absorption baselines: chi = (2 c / nu) eta i / Gamma.
pub fn two_level_susceptibility(
    nu: f64,
    n_density: f64,
    dipole: f64,
    gamma: Complex64,
) -> Result<Complex64> {
    if nu <= 0.0 {
        return Err(ModelError::DispersionSingularity {
            nu,
            message: "frequency must be positive".into(),
        });
    }
    if gamma.norm() == 0.0 {
        return Err(ModelError::Singularity { context: "two_level_susceptibility", value: 0.0 });
    }
    let eta = coupling_constant(nu, n_density, dipole)?;
    Ok((2.0 * C / nu) * eta * Complex64::i() / gamma)
}

/// Real wave vector and amplitude absorption coefficient of a weak probe.
#[derive(Debug, Clone, Copy)]
pub struct Wavevector {
    /// Propagation constant, rad/m.
    pub k: f64,
    /// Amplitude attenuation rate, 1/m.
    pub alpha: f64,
}

/// Dilute-medium dispersion relation: k = (nu/c)(1 + Re chi / 2) and
/// alpha = (nu/c) Im chi / 2.
pub fn wavevector(nu: f64, chi: Complex64) -> Wavevector {
    Wavevector { k: nu / C * (1.0 + 0.5 * chi.re), alpha: nu / C * 0.5 * chi.im }
}

/// Group velocity of the probe, from a centered finite difference of
/// k(nu) around the working point.
pub fn group_velocity(
    scheme: &LevelScheme,
    fields: &FieldSet,
    medium: &MediumParams,
) -> Result<f64> {
    // Step must resolve the transparency window, whose scale is set by
    // |Omega_2|^2 over the linewidths; a fraction of |Omega_2| is safe and
    // the 1 rad/s floor keeps the difference well conditioned even for
    // pathological inputs.
    let h = (1e-6 * fields.f(2).rabi.norm()).max(1.0);
    let delta = fields.probe_detuning(scheme);
    let sample = |d: f64| -> Result<(f64, f64)> {
        let fs = fields.at_probe_detuning(scheme, d);
        let chi = susceptibility(scheme, &fs, medium)?;
        Ok((fs.f(1).nu, wavevector(fs.f(1).nu, chi).k))
    };
    let (nu_plus, k_plus) = sample(delta + h)?;
    let (nu_minus, k_minus) = sample(delta - h)?;
    // The requested step is rounded at the optical-frequency scale, so
    // divide by the step that was actually realized.
    let dnu = nu_plus - nu_minus;
    if dnu <= 0.0 {
        return Err(ModelError::DispersionSingularity {
            nu: fields.f(1).nu,
            message: format!("step {h:e} rad/s is below the frequency resolution"),
        });
    }
    let dk = (k_plus - k_minus) / dnu;
    if !dk.is_finite() || dk == 0.0 {
        return Err(ModelError::DispersionSingularity {
            nu: fields.f(1).nu,
            message: format!("dk/dnu = {dk:e} does not define a group velocity"),
        });
    }
    Ok(1.0 / dk)
}

/// Analytic dk/dnu of the ideal lossless transparency window:
/// 1/c + eta_1 / |Omega_2|^2. Exact on resonance when the Raman coherence
/// is lossless; a reference point for the finite-difference route.
pub fn ideal_window_slope(
    scheme: &LevelScheme,
    fields: &FieldSet,
    medium: &MediumParams,
) -> Result<f64> {
    let o2 = fields.f(2).rabi.norm_sqr();
    if o2 == 0.0 {
        return Err(ModelError::Singularity { context: "ideal_window_slope", value: 0.0 });
    }
    let eta1 = coupling_constant(fields.f(1).nu, medium.n_density, scheme.dipole_moments[0])?;
    Ok(1.0 / C + eta1 / o2)
}

/// Doppler-averaged probe susceptibility near the two-photon resonance:
/// chi(delta) = (3 lambda^3 N / 8 pi^2)
///              (gamma_r delta / |Omega_2|^2
///               + i gamma_r Delta_D delta^2 / |Omega_2|^4).
pub fn doppler_susceptibility(
    delta: f64,
    lambda: f64,
    medium: &MediumParams,
    omega2: Complex64,
) -> Result<Complex64> {
    if lambda <= 0.0 {
        return Err(ModelError::InvalidParameter {
            name: "lambda",
            message: format!("wavelength must be positive, got {lambda:e}"),
        });
    }
    let o2 = omega2.norm_sqr();
    if o2 == 0.0 {
        return Err(ModelError::Singularity { context: "doppler_susceptibility", value: 0.0 });
    }
    let prefactor = 3.0 * lambda.powi(3) * medium.n_density
        / (8.0 * std::f64::consts::PI * std::f64::consts::PI);
    let re = medium.gamma_r * delta / o2;
    let im = medium.gamma_r * medium.doppler_width * delta * delta / (o2 * o2);
    Ok(prefactor * Complex64::new(re, im))
}

/// Half-width of the Doppler-limited transparency window,
/// |Omega_2|^2 / sqrt(gamma_r Delta_D): inside it the residual absorption
/// stays below the Raman dispersion.
pub fn eit_window(medium: &MediumParams, omega2: Complex64) -> Result<f64> {
    let scale = medium.gamma_r * medium.doppler_width;
    if scale <= 0.0 {
        return Err(ModelError::InvalidParameter {
            name: "eit_window",
            message: format!(
                "gamma_r * doppler_width = {scale:e} must be positive"
            ),
        });
    }
    Ok(omega2.norm_sqr() / scale.sqrt())
}

/// One point of a dispersion scan.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct DispersionSample {
    /// Probe angular frequency, rad/s.
    pub nu: f64,
    /// Probe wave vector, rad/m.
    pub k: f64,
    pub chi_re: f64,
    pub chi_im: f64,
    /// Group velocity, m/s; `None` where the slope vanishes.
    pub vg: Option<f64>,
}

/// Scan the probe detuning over [delta_min, delta_max] with `n` points
/// (n >= 2) and return the sampled linear response.
pub fn scan(
    scheme: &LevelScheme,
    fields: &FieldSet,
    medium: &MediumParams,
    delta_min: f64,
    delta_max: f64,
    n: usize,
) -> Result<Vec<DispersionSample>> {
    if n < 2 || !(delta_max > delta_min) {
        return Err(ModelError::InvalidParameter {
            name: "scan",
            message: format!("need n >= 2 and delta_max > delta_min, got n = {n}, [{delta_min:e}, {delta_max:e}]"),
        });
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let delta = delta_min + (delta_max - delta_min) * i as f64 / (n - 1) as f64;
        let fs = fields.at_probe_detuning(scheme, delta);
        let chi = susceptibility(scheme, &fs, medium)?;
        let wv = wavevector(fs.f(1).nu, chi);
        let vg = group_velocity(scheme, &fs, medium).ok();
        out.push(DispersionSample {
            nu: fs.f(1).nu,
            k: wv.k,
            chi_re: chi.re,
            chi_im: chi.im,
            vg,
        });
    }
    Ok(out)
}
