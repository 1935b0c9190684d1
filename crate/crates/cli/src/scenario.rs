//! End-to-end scenario evaluation: one preset in, one report out.
//!
//! A scenario run chains the analysis pipeline on the preset's config:
//! the susceptibility target, the density estimate it implies, the full
//! backward-matching plan, and the coupling-power floor. The report
//! compares the computed density against the preset's reference value
//! and labels the match class. Reports are pure functions of the preset.

use backscatter_core::config::build_scheme;
use backscatter_core::dispersion::eit_window;
use backscatter_core::medium::Level;
use backscatter_core::phasematch::{
    intensity_floor, plan_backscatter, required_chi, required_density, PhaseMatchReport,
};
use backscatter_core::constants::C;
use backscatter_core::Result;
use serde::Serialize;

use crate::presets::{find, ScenarioPreset};

/// Everything a scenario run produces.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub preset: String,
    pub note: String,
    /// The pinned, otherwise-unstated inputs, one line each.
    pub assumptions: Vec<String>,
    /// Probe wavelength, m.
    pub lambda_ab_m: f64,
    /// Signal wavelength used for the chi and density targets, m.
    pub lambda_db_m: f64,
    /// Susceptibility target -4 lambda_ab / lambda_db.
    pub chi_required: f64,
    /// Density estimate at the transparency-window edge, m^-3.
    pub density_required_m3: f64,
    /// Reference density the preset targets, m^-3.
    pub density_expected_m3: f64,
    /// required / expected.
    pub density_ratio: f64,
    pub match_class: String,
    pub density_matches: bool,
    /// Minimum |Omega_2|^2 keeping the Raman coherence ahead of Doppler
    /// dephasing, rad^2/s^2, and the preset's actual value.
    pub omega2_sq_floor: f64,
    pub omega2_sq: f64,
    /// The floor expressed as a field-2 intensity, W/m^2.
    pub intensity_floor_w_m2: f64,
    pub above_floor: bool,
    pub plan: PhaseMatchReport,
}

/// Run the full pipeline on a named preset.
pub fn run_scenario(name: &str) -> Result<ScenarioReport> {
    let preset = find(name)?;
    run_preset(preset)
}

fn run_preset(preset: &ScenarioPreset) -> Result<ScenarioReport> {
    let cfg = preset.config();
    let (scheme, fields, medium) = build_scheme(&cfg)?;

    let lambda_ab = 2.0 * std::f64::consts::PI * C / fields.f(1).nu;
    let lambda_db = preset
        .quoted_lambda4
        .unwrap_or(2.0 * std::f64::consts::PI * C / fields.f(4).nu);
    let chi = required_chi(lambda_ab, lambda_db);

    let plan = plan_backscatter(&scheme, &fields, &medium)?;

    // The window-limit density is detuning-free, but the estimator also
    // returns the exact form, so feed it the plan's root (or the window
    // edge when the plan found none).
    let window = eit_window(&medium, fields.f(2).rabi)?;
    let delta = plan.delta_star.unwrap_or(-window);
    let k4_target = 2.0 * std::f64::consts::PI / lambda_db;
    let omega2 = fields.f(2).rabi.norm();
    let density = required_density(
        lambda_ab,
        k4_target,
        omega2,
        medium.gamma_r,
        delta,
        medium.doppler_width,
    )?;

    let floor = intensity_floor(
        scheme.coherence_decay(Level::C, Level::B),
        medium.doppler_width,
        scheme.dipole_moments[1],
    )?;

    let mut assumptions = vec![
        format!(
            "Delta_D / gamma_r = {} (assumed; sets the sqrt(Delta_D / gamma_r) factor in \
             the density estimate)",
            preset.doppler_ratio
        ),
        "transition dipoles tied to the radiative rate on every transition".to_string(),
    ];
    if let Some(extra) = preset.extra_note {
        assumptions.push(extra.to_string());
    }

    let ratio = density.window_limit / preset.expected_density;
    Ok(ScenarioReport {
        preset: preset.name.to_string(),
        note: preset.note.to_string(),
        assumptions,
        lambda_ab_m: lambda_ab,
        lambda_db_m: lambda_db,
        chi_required: chi,
        density_required_m3: density.window_limit,
        density_expected_m3: preset.expected_density,
        density_ratio: ratio,
        match_class: preset.tolerance.label().to_string(),
        density_matches: preset.tolerance.accepts(ratio),
        omega2_sq_floor: floor.omega_sq_min,
        omega2_sq: omega2 * omega2,
        intensity_floor_w_m2: floor.intensity,
        above_floor: omega2 * omega2 >= floor.omega_sq_min,
        plan,
    })
}

/// Human-readable report text; every number comes from the report struct
/// so text and JSON cannot disagree.
pub fn render_report(r: &ScenarioReport) -> String {
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    line(format!("scenario {}", r.preset));
    line(format!("  {}", r.note));
    line("assumptions:".into());
    for a in &r.assumptions {
        line(format!("  - {a}"));
    }
    line(format!(
        "targets: lambda_ab = {:e} m, lambda_db = {:e} m, required chi = {:e}",
        r.lambda_ab_m, r.lambda_db_m, r.chi_required
    ));
    line(format!(
        "density: required {:e} m^-3 ({:e} cm^-3) vs reference {:e} m^-3, ratio {:.4} \
         [{}] {}",
        r.density_required_m3,
        r.density_required_m3 / 1.0e6,
        r.density_expected_m3,
        r.density_ratio,
        r.match_class,
        if r.density_matches { "MATCH" } else { "MISMATCH" }
    ));
    line(format!(
        "coupling floor: |Omega_2|^2 = {:e} vs floor {:e} rad^2/s^2 (intensity {:e} W/m^2) {}",
        r.omega2_sq,
        r.omega2_sq_floor,
        r.intensity_floor_w_m2,
        if r.above_floor { "OK" } else { "BELOW FLOOR" }
    ));
    line(format!("plan: feasible = {} ({})", r.plan.feasible, r.plan.reason));
    match (r.plan.delta_star, r.plan.n_star) {
        (Some(d), Some(n)) => line(format!(
            "  delta* = {:e} rad/s, N* = {:e} m^-3, kappa_backward = {:e} rad/m",
            d, n, r.plan.kappa_backward
        )),
        _ => line(format!(
            "  kappa_backward = {:e} rad/m at the nominal detuning",
            r.plan.kappa_backward
        )),
    }
    out
}
