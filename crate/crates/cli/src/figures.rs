//! Plot-ready curve emission from a completed run.
//!
//! Each figure is a two-column CSV: the dispersion curve k(nu) across the
//! transparency window, the phase-matching envelope against kappa, and
//! the backward/forward contrast against detuning. Emission requires a
//! run context; there is no standalone entry point, because the curves
//! are meaningless without the scheme the run resolved.

use std::path::{Path, PathBuf};

use backscatter_core::dispersion::eit_window;
use backscatter_core::medium::{FieldSet, LevelScheme, MediumParams};
use backscatter_core::phasematch::{
    envelope_with_form, mismatch, wavevectors_at, EnvelopeForm, PhaseMatchReport,
};
use backscatter_core::{ModelError, Result};

use crate::output;
use crate::sweep::Table;

/// The curves a run can emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureKind {
    DispersionCurve,
    EnvelopeCurve,
    BackwardContrast,
}

impl FigureKind {
    pub const ALL: [FigureKind; 3] =
        [FigureKind::DispersionCurve, FigureKind::EnvelopeCurve, FigureKind::BackwardContrast];

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "dispersion_curve" => Ok(FigureKind::DispersionCurve),
            "envelope_curve" => Ok(FigureKind::EnvelopeCurve),
            "backward_contrast" => Ok(FigureKind::BackwardContrast),
            _ => Err(ModelError::UnknownName {
                kind: "figure",
                got: name.to_string(),
                valid: "dispersion_curve, envelope_curve, backward_contrast".to_string(),
            }),
        }
    }

    pub fn file_name(&self) -> &'static str {
        match self {
            FigureKind::DispersionCurve => "dispersion_curve.csv",
            FigureKind::EnvelopeCurve => "envelope_curve.csv",
            FigureKind::BackwardContrast => "backward_contrast.csv",
        }
    }
}

/// A resolved run: the scheme in effect, plus the plan when one was made.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub scheme: LevelScheme,
    pub fields: FieldSet,
    pub medium: MediumParams,
    pub plan: Option<PhaseMatchReport>,
    pub form: EnvelopeForm,
}

/// Detuning half-width the curves cover: the transparency window when a
/// Doppler width is set, the coupling Rabi frequency otherwise.
pub fn scan_window(ctx: &RunContext) -> Result<f64> {
    let omega2 = ctx.fields.f(2).rabi.norm();
    let w = if ctx.medium.doppler_width > 0.0 {
        eit_window(&ctx.medium, ctx.fields.f(2).rabi)?
    } else {
        omega2
    };
    if w > 0.0 {
        Ok(w)
    } else {
        Err(ModelError::InvalidParameter {
            name: "fields.2.rabi",
            message: "figure scans need a nonzero coupling field to set their width".into(),
        })
    }
}

/// Compute one figure as an in-memory table.
pub fn figure_table(ctx: Option<&RunContext>, which: FigureKind) -> Result<Table> {
    let ctx = ctx.ok_or(ModelError::MissingField {
        name: "run context",
        message: "figure emission requires a completed run".to_string(),
    })?;
    match which {
        FigureKind::DispersionCurve => dispersion_curve(ctx),
        FigureKind::EnvelopeCurve => envelope_curve(ctx),
        FigureKind::BackwardContrast => backward_contrast(ctx),
    }
}

/// k_1(nu) over the transparency window, 501 samples. Detunings are
/// snapped to exactly representable probe frequencies so the two columns
/// stay consistent to the last bit; a slope read off neighboring rows
/// then matches 1/V_g without rounding noise.
fn dispersion_curve(ctx: &RunContext) -> Result<Table> {
    let w = scan_window(ctx)?;
    let gap1 = ctx.scheme.gap(1);
    let n = 501;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let raw = -w + 2.0 * w * i as f64 / (n - 1) as f64;
        let delta = (gap1 + raw) - gap1;
        let k = wavevectors_at(&ctx.scheme, &ctx.fields, &ctx.medium, delta)?[0];
        rows.push(vec![gap1 + delta, k]);
    }
    Ok(Table { columns: vec!["nu_rad_s".into(), "k_rad_m".into()], rows })
}

/// |envelope|(kappa) over kappa L in [-8 pi, 8 pi], 401 samples, peak at
/// kappa = 0.
fn envelope_curve(ctx: &RunContext) -> Result<Table> {
    let length = ctx.medium.length;
    let n = 401;
    let span = 8.0 * std::f64::consts::PI / length;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let kappa = -span + 2.0 * span * i as f64 / (n - 1) as f64;
        let env = envelope_with_form(kappa, length, ctx.form)?;
        rows.push(vec![kappa, env.norm()]);
    }
    Ok(Table { columns: vec!["kappa_rad_m".into(), "envelope_abs".into()], rows })
}

/// Backward envelope against detuning, scaled to the forward-emission
/// bound. When the context carries a plan with a matching root, the scan
/// is centered there at 1/100 of the window so the narrow backward lobe
/// is resolved; otherwise it covers the full window.
fn backward_contrast(ctx: &RunContext) -> Result<Table> {
    let w = scan_window(ctx)?;
    let root = ctx.plan.as_ref().and_then(|p| p.delta_star);
    let (center, half) = match root {
        Some(d) => (d, w / 100.0),
        None => (0.0, w),
    };
    let n = 201;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let delta = center - half + 2.0 * half * i as f64 / (n - 1) as f64;
        let k = wavevectors_at(&ctx.scheme, &ctx.fields, &ctx.medium, delta)?;
        let kappa_b = mismatch(ctx.scheme.variant, k, -1)?;
        let kappa_f = mismatch(ctx.scheme.variant, k, 1)?;
        let env_b = envelope_with_form(kappa_b, ctx.medium.length, ctx.form)?.norm();
        // The forward sinc oscillates on the kappa ~ 2 k_4 scale, far
        // below any plotting grid; its secular bound 2 / (|kappa_f| L)
        // stands in so the curve shows the matching peak, not aliasing.
        let bound_f = (2.0 / (kappa_f.abs() * ctx.medium.length)).min(1.0);
        rows.push(vec![delta, env_b / bound_f.max(f64::MIN_POSITIVE)]);
    }
    Ok(Table { columns: vec!["delta_rad_s".into(), "contrast".into()], rows })
}

/// Write one figure CSV into `dir` and return its path.
pub fn emit_figure_data(
    ctx: Option<&RunContext>,
    which: FigureKind,
    dir: &Path,
) -> anyhow::Result<PathBuf> {
    let table = figure_table(ctx, which)?;
    let path = dir.join(which.file_name());
    output::write_csv(&path, &table.columns, &table.rows)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::find;
    use approx::assert_relative_eq;
    use backscatter_core::config::build_scheme;
    use backscatter_core::constants::C;
    use backscatter_core::dispersion::group_velocity;

    fn rb_context() -> RunContext {
        let (scheme, fields, medium) = build_scheme(&find("Rb").unwrap().config()).unwrap();
        RunContext { scheme, fields, medium, plan: None, form: EnvelopeForm::Exact }
    }

    #[test]
    fn missing_context_is_an_error() {
        let err = figure_table(None, FigureKind::DispersionCurve).unwrap_err();
        assert!(err.to_string().contains("run context"));
        let err = emit_figure_data(None, FigureKind::EnvelopeCurve, Path::new(".")).unwrap_err();
        assert!(err.to_string().contains("run context"));
    }

    #[test]
    fn unknown_figure_name_is_rejected() {
        assert!(FigureKind::parse("contrast").is_err());
        assert_eq!(FigureKind::parse("envelope_curve").unwrap(), FigureKind::EnvelopeCurve);
    }

    #[test]
    fn vacuum_dispersion_curve_is_the_light_line() {
        let mut ctx = rb_context();
        ctx.medium.n_density = 0.0;
        let t = figure_table(Some(&ctx), FigureKind::DispersionCurve).unwrap();
        assert_eq!(t.columns, ["nu_rad_s", "k_rad_m"]);
        assert_eq!(t.rows.len(), 501);
        for row in &t.rows {
            assert_relative_eq!(row[1], row[0] / C, max_relative = 1e-13);
        }
    }

    #[test]
    fn dispersion_curve_slope_matches_group_velocity() {
        let ctx = rb_context();
        let t = figure_table(Some(&ctx), FigureKind::DispersionCurve).unwrap();
        let mid = t.rows.len() / 2;
        // Center row sits on resonance.
        assert_relative_eq!(t.rows[mid][0], ctx.scheme.gap(1), max_relative = 1e-15);
        let slope = (t.rows[mid + 1][1] - t.rows[mid - 1][1])
            / (t.rows[mid + 1][0] - t.rows[mid - 1][0]);
        let vg = group_velocity(&ctx.scheme, &ctx.fields, &ctx.medium).unwrap();
        assert_relative_eq!(slope, 1.0 / vg, max_relative = 1e-4);
        // Steep EIT slope: far slower than vacuum.
        assert!(slope > 100.0 / C);
    }

    #[test]
    fn envelope_curve_peaks_at_zero_mismatch() {
        let ctx = rb_context();
        let t = figure_table(Some(&ctx), FigureKind::EnvelopeCurve).unwrap();
        let (imax, _) = t
            .rows
            .iter()
            .enumerate()
            .max_by(|a, b| a.1[1].total_cmp(&b.1[1]))
            .unwrap();
        assert_eq!(t.rows[imax][0], 0.0);
        assert_relative_eq!(t.rows[imax][1], 1.0, max_relative = 1e-12);
    }

    #[test]
    fn backward_contrast_peaks_near_the_planner_root() {
        use backscatter_core::phasematch::plan_backscatter;
        let mut ctx = rb_context();
        let plan = plan_backscatter(&ctx.scheme, &ctx.fields, &ctx.medium).unwrap();
        let delta_star = plan.delta_star.expect("Rb preset plans feasible");
        ctx.plan = Some(plan);
        let t = figure_table(Some(&ctx), FigureKind::BackwardContrast).unwrap();
        let (imax, _) = t
            .rows
            .iter()
            .enumerate()
            .max_by(|a, b| a.1[1].total_cmp(&b.1[1]))
            .unwrap();
        let spacing = t.rows[1][0] - t.rows[0][0];
        assert!(
            (t.rows[imax][0] - delta_star).abs() <= spacing,
            "contrast peak at {} vs root {delta_star}",
            t.rows[imax][0]
        );
    }

    #[test]
    fn emitted_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let ctx = rb_context();
        for which in FigureKind::ALL {
            let path = emit_figure_data(Some(&ctx), which, dir.path()).unwrap();
            let text = std::fs::read_to_string(&path).unwrap();
            let mut lines = text.lines();
            let header = lines.next().unwrap();
            assert_eq!(header.split(',').count(), 2, "{which:?} is two-column");
            let count = lines
                .map(|l| {
                    for cell in l.split(',') {
                        cell.parse::<f64>().unwrap();
                    }
                })
                .count();
            assert!(count >= 201);
        }
    }
}
