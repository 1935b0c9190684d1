//! Command-line driver: subcommand dispatch, file emission, exit codes.
//!
//! Exit codes: 0 success, 2 validation error (bad arguments, malformed
//! config, unknown names), 3 infeasible plan, 4 numerical failure
//! (singular systems, unstable integration, grids too coarse).

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::exit;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use backscatter_cli::figures::{emit_figure_data, scan_window, FigureKind, RunContext};
use backscatter_cli::output::{
    write_csv, write_json, write_labeled_csv, write_manifest, write_table, Manifest, Versions,
};
use backscatter_cli::scenario::{render_report, run_scenario};
use backscatter_cli::sweep::{run_sweep, Pipeline, Scale, SweepSpec, Table};
use backscatter_core::bloch::{steady_state, DensityMatrix};
use backscatter_core::config::{build_scheme, parse_config, ConfigFile};
use backscatter_core::dispersion::scan;
use backscatter_core::medium::Level;
use backscatter_core::phasematch::EnvelopeForm;
use backscatter_core::phasematch::plan_backscatter_with;
use backscatter_core::propagation::{propagate_fields, validity_report, PropagateOptions, RegimeCheck};
use backscatter_core::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Four-level EIT backscatter model: dispersion, phase matching, and
/// coupled-envelope propagation.
#[derive(Debug, Parser)]
#[command(name = "backscatter", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration (JSON), as documented in the README.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory; created if missing.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Primary table format. CSV artifacts are always written; `json`
    /// adds structured copies.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Propagation nodes / scan sample count.
    #[arg(long, global = true, default_value_t = 512)]
    grid: usize,

    /// Use the real sin(kappa L)/(kappa L) envelope shorthand instead of
    /// the exact complex form.
    #[arg(long, global = true)]
    paper_literal_envelope: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the steady-state density matrix for the configured drive.
    SteadyState,
    /// Scan the probe dispersion across the transparency window.
    DispersionScan,
    /// Find a backward phase-matched working point and emit its figures.
    Plan,
    /// March the four coupled field envelopes through the cell.
    Propagate,
    /// Run a named preset end to end and check its density estimate.
    Scenario {
        /// Preset name; an unknown name lists the valid ones.
        name: String,
    },
    /// Sweep one parameter through a pipeline and tabulate the results.
    Sweep {
        /// Dotted config path (e.g. fields.1.detuning, medium.density),
        /// or envelope.kappa_l / envelope.kappa for envelope-scan.
        #[arg(long)]
        param: String,
        #[arg(long)]
        start: f64,
        #[arg(long)]
        stop: f64,
        /// Number of sweep points (>= 2); endpoints are sampled exactly.
        #[arg(long, default_value_t = 21)]
        count: usize,
        /// Space the points logarithmically.
        #[arg(long)]
        log: bool,
        /// One of: dispersion-scan, envelope-scan, planner-scan, propagate.
        #[arg(long)]
        pipeline: String,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            exit(exit_code_for(&err));
        }
    }
}

/// Map failures onto the documented exit codes. Anything that is not a
/// model error (I/O, serialization) counts as a validation failure.
fn exit_code_for(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<ModelError>() {
        Some(ModelError::Infeasible { .. }) => 3,
        Some(
            ModelError::Singularity { .. }
            | ModelError::DegenerateSteadyState { .. }
            | ModelError::IntegratorUnstable { .. }
            | ModelError::DispersionSingularity { .. }
            | ModelError::IntegrationFailure { .. }
            | ModelError::RefinementNeeded { .. },
        ) => 4,
        _ => 2,
    }
}

fn run(cli: &Cli) -> anyhow::Result<i32> {
    fs::create_dir_all(&cli.out)
        .with_context(|| format!("creating output directory {}", cli.out.display()))?;
    let form = if cli.paper_literal_envelope {
        EnvelopeForm::PaperLiteral
    } else {
        EnvelopeForm::Exact
    };
    match &cli.command {
        Command::SteadyState => cmd_steady_state(cli),
        Command::DispersionScan => cmd_dispersion_scan(cli, form),
        Command::Plan => cmd_plan(cli, form),
        Command::Propagate => cmd_propagate(cli),
        Command::Scenario { name } => cmd_scenario(cli, name),
        Command::Sweep { param, start, stop, count, log, pipeline } => {
            cmd_sweep(cli, form, param, *start, *stop, *count, *log, pipeline)
        }
    }
}

/// Load the config file these subcommands require.
fn require_config(cli: &Cli) -> anyhow::Result<ConfigFile> {
    let path = cli.config.as_ref().ok_or(ModelError::MissingField {
        name: "--config",
        message: "this subcommand needs a run configuration file".into(),
    })?;
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_config(&text)?)
}

fn finish_manifest(
    cli: &Cli,
    command: &str,
    preset: Option<String>,
    config: Option<&ConfigFile>,
    sweep: Option<&SweepSpec>,
    outputs: Vec<String>,
) -> anyhow::Result<()> {
    let manifest = Manifest {
        command: command.to_string(),
        format: cli.format.name().to_string(),
        grid: cli.grid,
        paper_literal_envelope: cli.paper_literal_envelope,
        versions: Versions::current(),
        preset,
        config,
        sweep,
        outputs,
    };
    write_manifest(&cli.out, &manifest)
}

#[derive(Serialize)]
struct ComplexEntry {
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct SteadyStateDoc {
    populations: BTreeMap<&'static str, f64>,
    coherences: BTreeMap<&'static str, ComplexEntry>,
}

const COHERENCE_PAIRS: [(Level, Level, &str); 6] = [
    (Level::A, Level::B, "ab"),
    (Level::A, Level::C, "ac"),
    (Level::A, Level::D, "ad"),
    (Level::C, Level::B, "cb"),
    (Level::D, Level::B, "db"),
    (Level::C, Level::D, "cd"),
];

fn steady_state_doc(rho: &DensityMatrix) -> SteadyStateDoc {
    let mut populations = BTreeMap::new();
    for l in Level::ALL {
        populations.insert(l.name(), rho.get(l, l).re);
    }
    let mut coherences = BTreeMap::new();
    for (x, y, label) in COHERENCE_PAIRS {
        let v = rho.get(x, y);
        coherences.insert(label, ComplexEntry { re: v.re, im: v.im });
    }
    SteadyStateDoc { populations, coherences }
}

fn cmd_steady_state(cli: &Cli) -> anyhow::Result<i32> {
    let config = require_config(cli)?;
    let (scheme, fields, _) = build_scheme(&config)?;
    let rho = steady_state(&scheme, &fields)?;

    let mut rows: Vec<(String, Vec<f64>)> = Vec::new();
    for l in Level::ALL {
        rows.push((format!("rho_{0}{0}", l.name()), vec![rho.get(l, l).re, 0.0]));
    }
    for (x, y, label) in COHERENCE_PAIRS {
        let v = rho.get(x, y);
        rows.push((format!("rho_{label}"), vec![v.re, v.im]));
    }
    write_labeled_csv(&cli.out.join("steady_state.csv"), &["element", "re", "im"], &rows)?;
    let mut outputs = vec!["steady_state.csv".to_string()];
    if cli.format == Format::Json {
        write_json(&cli.out.join("steady_state.json"), &steady_state_doc(&rho))?;
        outputs.push("steady_state.json".to_string());
    }

    let pops: Vec<String> = Level::ALL
        .iter()
        .map(|l| format!("{} = {:e}", l.name(), rho.get(*l, *l).re))
        .collect();
    println!("steady-state populations: {}", pops.join(", "));
    println!(
        "|rho_ab| = {:e}, |rho_cb| = {:e}",
        rho.get(Level::A, Level::B).norm(),
        rho.get(Level::C, Level::B).norm()
    );
    finish_manifest(cli, "steady-state", None, Some(&config), None, outputs)?;
    Ok(0)
}

fn cmd_dispersion_scan(cli: &Cli, form: EnvelopeForm) -> anyhow::Result<i32> {
    let config = require_config(cli)?;
    let (scheme, fields, medium) = build_scheme(&config)?;
    let ctx = RunContext { scheme, fields, medium, plan: None, form };
    let window = scan_window(&ctx)?;
    let n = cli.grid.max(2);
    let samples = scan(&ctx.scheme, &ctx.fields, &ctx.medium, -window, window, n)?;

    let columns: Vec<String> =
        ["nu_rad_s", "k_rad_m", "chi_re", "chi_im", "vg_m_s"].map(String::from).to_vec();
    let rows: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| vec![s.nu, s.k, s.chi_re, s.chi_im, s.vg.unwrap_or(f64::NAN)])
        .collect();
    write_csv(&cli.out.join("dispersion_scan.csv"), &columns, &rows)?;
    let mut outputs = vec!["dispersion_scan.csv".to_string()];
    if cli.format == Format::Json {
        write_json(&cli.out.join("dispersion_scan.json"), &samples)?;
        outputs.push("dispersion_scan.json".to_string());
    }

    println!("dispersion scan: {n} samples over detuning +/- {window:e} rad/s");
    finish_manifest(cli, "dispersion-scan", None, Some(&config), None, outputs)?;
    Ok(0)
}

fn cmd_plan(cli: &Cli, form: EnvelopeForm) -> anyhow::Result<i32> {
    let config = require_config(cli)?;
    let (scheme, fields, medium) = build_scheme(&config)?;
    let plan = plan_backscatter_with(&scheme, &fields, &medium, form)?;
    write_json(&cli.out.join("plan.json"), &plan)?;
    let mut outputs = vec!["plan.json".to_string()];

    let ctx = RunContext { scheme, fields, medium, plan: Some(plan), form };
    for kind in FigureKind::ALL {
        emit_figure_data(Some(&ctx), kind, &cli.out)?;
        outputs.push(kind.file_name().to_string());
    }

    let plan = ctx.plan.as_ref().expect("plan was just stored");
    if plan.feasible {
        println!(
            "plan: feasible; delta_star = {:e} rad/s, N_star = {:e} m^-3, |envelope_backward| = {:e}",
            plan.delta_star.unwrap_or(f64::NAN),
            plan.n_star.unwrap_or(f64::NAN),
            plan.envelope_backward
        );
    } else {
        println!("plan: infeasible; {}", plan.reason);
    }
    finish_manifest(cli, "plan", None, Some(&config), None, outputs)?;
    Ok(if plan.feasible { 0 } else { 3 })
}

#[derive(Serialize)]
struct PropagateSummary {
    kappa_rad_m: f64,
    nz: usize,
    directions: [i8; 4],
    omega4_out: ComplexEntry,
    omega4_out_abs: f64,
    validity: Vec<RegimeCheck>,
    warnings: Vec<String>,
}

fn cmd_propagate(cli: &Cli) -> anyhow::Result<i32> {
    let config = require_config(cli)?;
    let (scheme, fields, medium) = build_scheme(&config)?;
    let profiles = propagate_fields(&scheme, &fields, &medium, cli.grid, PropagateOptions::default())?;

    let mut columns = vec!["z_m".to_string()];
    for j in 1..=4 {
        columns.push(format!("omega{j}_re"));
        columns.push(format!("omega{j}_im"));
    }
    let rows: Vec<Vec<f64>> = profiles
        .z
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            let mut row = vec![z];
            for field in &profiles.omega {
                row.push(field[i].re);
                row.push(field[i].im);
            }
            row
        })
        .collect();
    write_csv(&cli.out.join("profiles.csv"), &columns, &rows)?;
    let mut outputs = vec!["profiles.csv".to_string()];
    if cli.format == Format::Json {
        write_json(&cli.out.join("profiles.json"), &Table { columns, rows })?;
        outputs.push("profiles.json".to_string());
    }

    let out4 = profiles.signal_output();
    let summary = PropagateSummary {
        kappa_rad_m: profiles.kappa,
        nz: cli.grid,
        directions: profiles.directions,
        omega4_out: ComplexEntry { re: out4.re, im: out4.im },
        omega4_out_abs: out4.norm(),
        validity: validity_report(&fields),
        warnings: profiles.warnings.clone(),
    };
    write_json(&cli.out.join("summary.json"), &summary)?;
    outputs.push("summary.json".to_string());

    println!(
        "propagate: {} nodes, kappa = {:e} rad/m, |Omega_4 out| = {:e} rad/s",
        cli.grid, profiles.kappa, out4.norm()
    );
    for w in &profiles.warnings {
        eprintln!("warning: {w}");
    }
    finish_manifest(cli, "propagate", None, Some(&config), None, outputs)?;
    Ok(0)
}

fn cmd_scenario(cli: &Cli, name: &str) -> anyhow::Result<i32> {
    if cli.config.is_some() {
        return Err(ModelError::InvalidParameter {
            name: "--config",
            message: "scenario presets are self-contained; drop --config".into(),
        }
        .into());
    }
    let report = run_scenario(name)?;
    print!("{}", render_report(&report));
    let file = format!("scenario_{name}.json");
    write_json(&cli.out.join(&file), &report)?;
    finish_manifest(cli, "scenario", Some(name.to_string()), None, None, vec![file])?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    cli: &Cli,
    form: EnvelopeForm,
    param: &str,
    start: f64,
    stop: f64,
    count: usize,
    log: bool,
    pipeline_name: &str,
) -> anyhow::Result<i32> {
    let config = require_config(cli)?;
    let pipeline = Pipeline::parse(pipeline_name)?;
    let spec = SweepSpec {
        path: param.to_string(),
        start,
        stop,
        count,
        scale: if log { Scale::Log } else { Scale::Linear },
    };
    let table = run_sweep(&config, &spec, pipeline, cli.grid, form)?;
    let outputs = write_table(&cli.out, "sweep", &table, cli.format == Format::Json)?;

    println!(
        "sweep: {} rows, {} from {:e} to {:e} through {}",
        table.rows.len(),
        spec.path,
        start,
        stop,
        pipeline_name
    );
    finish_manifest(cli, "sweep", None, Some(&config), Some(&spec), outputs)?;
    Ok(0)
}
