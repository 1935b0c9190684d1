//! Parameter sweeps: one dotted-path knob, a value grid, and a named
//! pipeline evaluated at every point.
//!
//! Points run on the rayon worker pool in whatever order the pool picks;
//! rows are collected by sweep index, so the emitted table is ordered and
//! bitwise deterministic regardless of scheduling.

use backscatter_core::config::{build_scheme, ConfigFile, Quantity};
use backscatter_core::dispersion::{group_velocity, susceptibility, wavevector};
use backscatter_core::phasematch::{envelope_with_form, plan_backscatter_with, EnvelopeForm};
use backscatter_core::propagation::{propagate_fields, PropagateOptions};
use backscatter_core::{ModelError, Result};
use rayon::prelude::*;
use serde::Serialize;

/// Spacing of the sweep grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Scale {
    Linear,
    Log,
}

/// A sweep description: which knob, over what grid.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSpec {
    /// Dotted config path, or one of the envelope-scan virtual paths.
    pub path: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub scale: Scale,
}

/// The four computations a sweep can drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Pipeline {
    DispersionScan,
    EnvelopeScan,
    PlannerScan,
    Propagate,
}

impl Pipeline {
    pub const VALID: &'static str = "dispersion-scan, envelope-scan, planner-scan, propagate";

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "dispersion-scan" => Ok(Pipeline::DispersionScan),
            "envelope-scan" => Ok(Pipeline::EnvelopeScan),
            "planner-scan" => Ok(Pipeline::PlannerScan),
            "propagate" => Ok(Pipeline::Propagate),
            _ => Err(ModelError::UnknownName {
                kind: "sweep pipeline",
                got: name.to_string(),
                valid: Pipeline::VALID.to_string(),
            }),
        }
    }
}

/// Ordered sweep output: a header and one row of floats per point. The
/// first column is always the swept value.
#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Config paths a sweep may set. Values are applied in the unit the
/// config already uses for that entry (rad/s where the entry is absent).
pub const CONFIG_PATHS: [&str; 15] = [
    "medium.density",
    "medium.doppler_width",
    "medium.radiative_rate",
    "medium.length",
    "fields.1.rabi",
    "fields.1.detuning",
    "fields.1.phase",
    "fields.2.rabi",
    "fields.2.detuning",
    "fields.2.phase",
    "fields.3.rabi",
    "fields.3.detuning",
    "fields.3.phase",
    "fields.4.rabi",
    "scheme.dephasing.cb",
];

/// Virtual paths understood only by the envelope-scan pipeline, which
/// has no config knob for its abscissa.
pub const ENVELOPE_PATHS: [&str; 2] = ["envelope.kappa_l", "envelope.kappa"];

fn unknown_path(got: &str, valid: &[&str]) -> ModelError {
    ModelError::UnknownName {
        kind: "sweep parameter",
        got: got.to_string(),
        valid: valid.join(", "),
    }
}

fn set_quantity(slot: &mut Option<Quantity>, value: f64) {
    match slot {
        Some(q) => q.value = value,
        None => *slot = Some(Quantity::new(value, "rad/s")),
    }
}

/// Set the config entry named by a dotted path. Rejects paths outside
/// [`CONFIG_PATHS`].
pub fn apply_path(cfg: &mut ConfigFile, path: &str, value: f64) -> Result<()> {
    match path {
        "medium.density" => cfg.medium.density.value = value,
        "medium.doppler_width" => set_quantity(&mut cfg.medium.doppler_width, value),
        "medium.radiative_rate" => cfg.medium.radiative_rate.value = value,
        "medium.length" => cfg.medium.length.value = value,
        "fields.1.rabi" => set_quantity(&mut cfg.fields.f1.rabi, value),
        "fields.1.detuning" => set_quantity(&mut cfg.fields.f1.detuning, value),
        "fields.1.phase" => cfg.fields.f1.phase = Some(value),
        "fields.2.rabi" => set_quantity(&mut cfg.fields.f2.rabi, value),
        "fields.2.detuning" => set_quantity(&mut cfg.fields.f2.detuning, value),
        "fields.2.phase" => cfg.fields.f2.phase = Some(value),
        "fields.3.rabi" => set_quantity(&mut cfg.fields.f3.rabi, value),
        "fields.3.detuning" => set_quantity(&mut cfg.fields.f3.detuning, value),
        "fields.3.phase" => cfg.fields.f3.phase = Some(value),
        "fields.4.rabi" => set_quantity(&mut cfg.fields.f4.rabi, value),
        "scheme.dephasing.cb" => set_quantity(&mut cfg.scheme.dephasing.cb, value),
        _ => return Err(unknown_path(path, &CONFIG_PATHS)),
    }
    Ok(())
}

impl SweepSpec {
    /// Reject degenerate grids before any point runs.
    pub fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(ModelError::InvalidParameter {
                name: "sweep.count",
                message: format!("need at least 2 points, got {}", self.count),
            });
        }
        if self.start == self.stop {
            return Err(ModelError::InvalidParameter {
                name: "sweep.range",
                message: format!("start and stop coincide at {:e}", self.start),
            });
        }
        if self.scale == Scale::Log && self.start * self.stop <= 0.0 {
            return Err(ModelError::InvalidParameter {
                name: "sweep.range",
                message: format!(
                    "log spacing needs a sign-definite range, got [{:e}, {:e}]",
                    self.start, self.stop
                ),
            });
        }
        Ok(())
    }

    /// The value grid, endpoints exact.
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                if i == 0 {
                    self.start
                } else if i == n - 1 {
                    self.stop
                } else {
                    let t = i as f64 / (n - 1) as f64;
                    match self.scale {
                        Scale::Linear => self.start + (self.stop - self.start) * t,
                        Scale::Log => {
                            let sign = self.start.signum();
                            let la = self.start.abs().ln();
                            let lb = self.stop.abs().ln();
                            sign * (la + (lb - la) * t).exp()
                        }
                    }
                }
            })
            .collect()
    }
}

/// Run one pipeline over the sweep's value grid against a base config. The row
/// layout is fixed per pipeline; `nz` is the propagation grid, `form`
/// the envelope convention.
pub fn run_sweep(
    base: &ConfigFile,
    spec: &SweepSpec,
    pipeline: Pipeline,
    nz: usize,
    form: EnvelopeForm,
) -> Result<Table> {
    spec.validate()?;
    let values = spec.values();

    if pipeline == Pipeline::EnvelopeScan {
        let kappa_from_product = match spec.path.as_str() {
            "envelope.kappa_l" => true,
            "envelope.kappa" => false,
            other => return Err(unknown_path(other, &ENVELOPE_PATHS)),
        };
        let (_, _, medium) = build_scheme(base)?;
        let rows = collect_rows(&values, |v| {
            let kappa = if kappa_from_product { v / medium.length } else { v };
            let env = envelope_with_form(kappa, medium.length, form)?;
            Ok(vec![v, kappa, env.norm(), env.arg()])
        })?;
        return Ok(Table {
            columns: cols(&spec.path, &["kappa_rad_m", "envelope_abs", "envelope_phase"]),
            rows,
        });
    }

    // Config-path pipelines: an unresolvable path must fail before the
    // pool spins up, so probe it once.
    apply_path(&mut base.clone(), &spec.path, values[0])?;
    let at = |v: f64| -> Result<_> {
        let mut cfg = base.clone();
        apply_path(&mut cfg, &spec.path, v)?;
        build_scheme(&cfg)
    };

    match pipeline {
        Pipeline::DispersionScan => {
            let rows = collect_rows(&values, |v| {
                let (scheme, fields, medium) = at(v)?;
                let chi = susceptibility(&scheme, &fields, &medium)?;
                let wv = wavevector(fields.f(1).nu, chi);
                let vg = group_velocity(&scheme, &fields, &medium).unwrap_or(f64::NAN);
                Ok(vec![v, fields.f(1).nu, wv.k, chi.re, chi.im, vg])
            })?;
            Ok(Table {
                columns: cols(&spec.path, &["nu_rad_s", "k_rad_m", "chi_re", "chi_im", "vg_m_s"]),
                rows,
            })
        }
        Pipeline::PlannerScan => {
            let rows = collect_rows(&values, |v| {
                let (scheme, fields, medium) = at(v)?;
                let plan = plan_backscatter_with(&scheme, &fields, &medium, form)?;
                Ok(vec![
                    v,
                    if plan.feasible { 1.0 } else { 0.0 },
                    plan.delta_star.unwrap_or(f64::NAN),
                    plan.n_star.unwrap_or(f64::NAN),
                    plan.kappa_backward,
                    plan.envelope_backward,
                    plan.chi_target,
                ])
            })?;
            Ok(Table {
                columns: cols(
                    &spec.path,
                    &[
                        "feasible",
                        "delta_star_rad_s",
                        "n_star_m3",
                        "kappa_backward_rad_m",
                        "envelope_backward",
                        "chi_target",
                    ],
                ),
                rows,
            })
        }
        Pipeline::Propagate => {
            let rows = collect_rows(&values, |v| {
                let (scheme, fields, medium) = at(v)?;
                let profiles =
                    propagate_fields(&scheme, &fields, &medium, nz, PropagateOptions::default())?;
                let out = profiles.signal_output();
                Ok(vec![v, profiles.kappa, out.re, out.im, out.norm()])
            })?;
            Ok(Table {
                columns: cols(
                    &spec.path,
                    &["kappa_rad_m", "omega4_out_re", "omega4_out_im", "omega4_out_abs"],
                ),
                rows,
            })
        }
        Pipeline::EnvelopeScan => unreachable!("handled above"),
    }
}

fn cols(path: &str, rest: &[&str]) -> Vec<String> {
    std::iter::once(path.to_string())
        .chain(rest.iter().map(|s| s.to_string()))
        .collect()
}

/// Evaluate rows on the worker pool, then reassemble by index. The first
/// error by sweep order wins, keeping failures deterministic too.
fn collect_rows<F>(values: &[f64], point: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(f64) -> Result<Vec<f64>> + Sync,
{
    let results: Vec<Result<Vec<f64>>> = values.par_iter().map(|&v| point(v)).collect();
    let mut rows = Vec::with_capacity(results.len());
    for r in results {
        rows.push(r?);
    }
    Ok(rows)
}
