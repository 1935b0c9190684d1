//! Density-matrix equations of the four-level scheme: rotating-frame
//! Hamiltonian, relaxation superoperator, steady-state linear solve,
//! fixed-step time integration, and the weak-probe closed forms.
//!
//! Sign convention: the interaction carries -hbar*Omega_j on each driven
//! transition, so the weak-probe coherences come out as
//! rho_ab = i Omega_1 Gamma_cb / D and rho_cb = -Omega_1 conj(Omega_2) / D
//! with D = Gamma_ab Gamma_cb + |Omega_2|^2. All derived signs (Maxwell
//! couplings, signal polarization) follow this one choice.

use crate::error::{ModelError, Result};
use crate::medium::{FieldSet, Level, LevelScheme, SchemeVariant};
use nalgebra::{DMatrix, DVector, Matrix4};
use num_complex::Complex64;

type CMat4 = Matrix4<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Validated 4x4 density matrix: Hermitian, unit trace, populations in
/// [0, 1].
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    rho: CMat4,
}

impl DensityMatrix {
    /// Wrap a matrix, enforcing Hermiticity and trace to 1e-10 and
    /// population bounds.
    pub fn new(rho: CMat4) -> Result<Self> {
        let herm_defect = (rho - rho.adjoint()).norm();
        if herm_defect > 1e-10 {
            return Err(ModelError::InvalidParameter {
                name: "density matrix",
                message: format!("Hermiticity defect {herm_defect:e} exceeds 1e-10"),
            });
        }
        let trace = rho.trace();
        if (trace.re - 1.0).abs() > 1e-10 || trace.im.abs() > 1e-10 {
            return Err(ModelError::InvalidParameter {
                name: "density matrix",
                message: format!("trace {trace} differs from 1 beyond 1e-10"),
            });
        }
        for l in Level::ALL {
            let p = rho[(l.idx(), l.idx())].re;
            if !(-1e-10..=1.0 + 1e-10).contains(&p) {
                return Err(ModelError::InvalidParameter {
                    name: "density matrix",
                    message: format!("population of {} is {p:e}", l.name()),
                });
            }
        }
        Ok(DensityMatrix { rho: (rho + rho.adjoint()).scale(0.5) })
    }

    /// Pure ground state |b><b|.
    pub fn ground() -> Self {
        let mut rho = CMat4::zeros();
        rho[(Level::B.idx(), Level::B.idx())] = Complex64::new(1.0, 0.0);
        DensityMatrix { rho }
    }

    /// Pure state on one level.
    pub fn pure(level: Level) -> Self {
        let mut rho = CMat4::zeros();
        rho[(level.idx(), level.idx())] = Complex64::new(1.0, 0.0);
        DensityMatrix { rho }
    }

    pub fn matrix(&self) -> &CMat4 {
        &self.rho
    }

    /// Element rho_xy.
    pub fn get(&self, x: Level, y: Level) -> Complex64 {
        self.rho[(x.idx(), y.idx())]
    }

    pub fn ab(&self) -> Complex64 {
        self.get(Level::A, Level::B)
    }

    pub fn cb(&self) -> Complex64 {
        self.get(Level::C, Level::B)
    }

    pub fn ca(&self) -> Complex64 {
        self.get(Level::C, Level::A)
    }

    pub fn db(&self) -> Complex64 {
        self.get(Level::D, Level::B)
    }

    pub fn dc(&self) -> Complex64 {
        self.get(Level::D, Level::C)
    }

    /// Populations in level order a, b, c, d.
    pub fn populations(&self) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (i, l) in Level::ALL.iter().enumerate() {
            out[i] = self.rho[(l.idx(), l.idx())].re;
        }
        out
    }
}

/// Complex coherence-decay rates: real part is the total dephasing, the
/// imaginary part the rotating-frame detuning of that coherence.
#[derive(Debug, Clone, Copy)]
pub struct ComplexRates {
    pub ab: Complex64,
    pub ca: Complex64,
    pub cb: Complex64,
    pub db: Complex64,
    /// Rate of the coherence radiating field 4: equals `db` for the
    /// Lambda-type variants, the c-d rate for the V-type.
    pub signal: Complex64,
}

impl ComplexRates {
    /// Rates implied by the scheme and the current field frequencies.
    pub fn of(scheme: &LevelScheme, fields: &FieldSet) -> Self {
        let phi = frame_phases(scheme.variant, fields);
        let rate = |x: Level, y: Level| {
            Complex64::new(
                scheme.coherence_decay(x, y),
                scheme.omega(x, y) - (phi[x.idx()] - phi[y.idx()]),
            )
        };
        let tr = scheme.variant.signal_transition();
        ComplexRates {
            ab: rate(Level::A, Level::B),
            ca: rate(Level::C, Level::A),
            cb: rate(Level::C, Level::B),
            db: rate(Level::D, Level::B),
            signal: rate(tr.upper, tr.lower),
        }
    }
}

/// Rotating-frame phase velocity assigned to each level, rad/s. Level b is
/// the frame anchor at zero; the chain of driven transitions fixes the
/// rest, and the frequency closure makes field 4's coupling static in
/// this frame.
pub fn frame_phases(variant: SchemeVariant, fields: &FieldSet) -> [f64; 4] {
    let nu1 = fields.f(1).nu;
    let nu2 = fields.f(2).nu;
    let nu3 = fields.f(3).nu;
    let mut phi = [0.0; 4];
    phi[Level::A.idx()] = nu1;
    match variant {
        SchemeVariant::DoubleLambda => {
            phi[Level::C.idx()] = nu1 - nu2;
            phi[Level::D.idx()] = nu1 - nu2 + nu3;
        }
        SchemeVariant::LadderLambda => {
            phi[Level::C.idx()] = nu1 - nu2;
            phi[Level::D.idx()] = nu1 - nu2 - nu3;
        }
        SchemeVariant::VLambda => {
            phi[Level::C.idx()] = nu1 + nu2;
            phi[Level::D.idx()] = nu3;
        }
    }
    phi
}

/// Rotating-frame Hamiltonian in units of rad/s (H/hbar). Diagonal entries
/// are the level detunings against the frame; off-diagonals are -Omega_j
/// on each driven transition (conjugated on the one slot the topology
/// requires), filled Hermitian.
pub fn interaction_hamiltonian(scheme: &LevelScheme, fields: &FieldSet) -> CMat4 {
    let phi = frame_phases(scheme.variant, fields);
    let mut h = CMat4::zeros();
    for l in Level::ALL {
        h[(l.idx(), l.idx())] = Complex64::new(scheme.offset(l) - phi[l.idx()], 0.0);
    }
    for (j, tr) in scheme.variant.transitions().iter().enumerate() {
        let mut amp = fields.f(j + 1).rabi;
        if tr.conjugated {
            amp = amp.conj();
        }
        h[(tr.upper.idx(), tr.lower.idx())] = -amp;
        h[(tr.lower.idx(), tr.upper.idx())] = -amp.conj();
    }
    h
}

/// Relaxation data: population decay, pure dephasing, and optional
/// repopulation branching.
#[derive(Debug, Clone)]
pub struct Relaxation {
    /// Population decay rate per level, rad/s.
    pub decay: [f64; 4],
    /// Pure-dephasing rate per element (zero on the diagonal), rad/s.
    pub dephasing: [[f64; 4]; 4],
    /// Repopulation branching: `Some` routes every decayed population
    /// back into the levels, conserving trace; `None` drops it, which
    /// reproduces the bare anticommutator form.
    pub branching: Option<[[f64; 4]; 4]>,
}

impl Relaxation {
    /// Trace-conserving relaxation for the scheme.
    pub fn of(scheme: &LevelScheme) -> Self {
        Relaxation {
            decay: scheme.decay_rates,
            dephasing: Self::dephasing_table(scheme),
            branching: Some(*scheme.branching()),
        }
    }

    /// Bare -(Gamma rho + rho Gamma)/2 relaxation without repopulation,
    /// for comparison runs; the trace then decays.
    pub fn without_repopulation(scheme: &LevelScheme) -> Self {
        Relaxation {
            decay: scheme.decay_rates,
            dephasing: Self::dephasing_table(scheme),
            branching: None,
        }
    }

    fn dephasing_table(scheme: &LevelScheme) -> [[f64; 4]; 4] {
        let mut table = [[0.0; 4]; 4];
        for x in Level::ALL {
            for y in Level::ALL {
                if x.idx() != y.idx() {
                    table[x.idx()][y.idx()] = scheme.dephasings.pair(x, y);
                }
            }
        }
        table
    }
}

/// Right-hand side of the master equation:
/// drho/dt = -i[H, rho] - (Gamma rho + rho Gamma)/2 - dephasing + repopulation.
///
/// Linear in rho; Hermitian for Hermitian input; traceless when
/// repopulation is enabled.
pub fn master_equation_rhs(rho: &CMat4, h: &CMat4, relax: &Relaxation) -> CMat4 {
    let mut out = (h * rho - rho * h) * (-I);
    for x in 0..4 {
        for y in 0..4 {
            let damp = 0.5 * (relax.decay[x] + relax.decay[y]) + relax.dephasing[x][y];
            out[(x, y)] -= damp * rho[(x, y)];
        }
    }
    if let Some(branch) = &relax.branching {
        for x in 0..4 {
            let feed = relax.decay[x] * rho[(x, x)].re;
            if feed != 0.0 {
                for y in 0..4 {
                    out[(y, y)] += Complex64::new(feed * branch[x][y], 0.0);
                }
            }
        }
    }
    out
}

/// Index of element (x, y) in the row-major vectorization of rho.
fn vec_idx(x: usize, y: usize) -> usize {
    4 * x + y
}

/// Assemble the 16x16 generator L with vec(drho/dt) = L vec(rho) by
/// applying the right-hand side to each basis matrix.
fn liouvillian(h: &CMat4, relax: &Relaxation) -> DMatrix<Complex64> {
    let mut l = DMatrix::zeros(16, 16);
    for x in 0..4 {
        for y in 0..4 {
            let mut basis = CMat4::zeros();
            basis[(x, y)] = Complex64::new(1.0, 0.0);
            let col = master_equation_rhs(&basis, h, relax);
            for r in 0..4 {
                for c in 0..4 {
                    l[(vec_idx(r, c), vec_idx(x, y))] = col[(r, c)];
                }
            }
        }
    }
    l
}

/// Steady state of the master equation with repopulation: solves
/// vec(drho/dt) = 0 with one row replaced by the unit-trace constraint.
///
/// The residual of the unmodified generator at the solution must stay
/// below 1e-10 of its norm; a rank-deficient system (for instance with no
/// dephasing at all) is reported with its null-space dimension.
pub fn steady_state(scheme: &LevelScheme, fields: &FieldSet) -> Result<DensityMatrix> {
    fields.validate(scheme)?;
    let h = interaction_hamiltonian(scheme, fields);
    let relax = Relaxation::of(scheme);
    let l = liouvillian(&h, &relax);

    // Scale of the generator, used both to condition the trace row and to
    // normalize the residual test.
    let l_norm = l.norm();
    let row_scale = if l_norm > 0.0 { l_norm } else { 1.0 };

    let mut system = l.clone();
    let trace_row = vec_idx(Level::B.idx(), Level::B.idx());
    for col in 0..16 {
        system[(trace_row, col)] = ZERO;
    }
    for d in 0..4 {
        system[(trace_row, vec_idx(d, d))] = Complex64::new(row_scale, 0.0);
    }
    let mut rhs = DVector::zeros(16);
    rhs[trace_row] = Complex64::new(row_scale, 0.0);

    let lu = system.clone().lu();
    let mut vec = match lu.solve(&rhs) {
        Some(v) => v,
        None => return Err(degenerate_error(&l)),
    };
    // Iterative refinement against the factored system: stiff rate
    // hierarchies (metastable levels under strong driving) leave the raw
    // solve with population errors near eps * condition, well above the
    // validation floor.
    for _ in 0..2 {
        let r = &rhs - &system * &vec;
        if r.norm() <= 1e-14 * row_scale {
            break;
        }
        match lu.solve(&r) {
            Some(dx) => vec += dx,
            None => break,
        }
    }

    let mut rho = CMat4::zeros();
    for x in 0..4 {
        for y in 0..4 {
            rho[(x, y)] = vec[vec_idx(x, y)];
        }
    }
    // Exact Hermitization; the solve leaves only rounding-level asymmetry.
    let rho = (rho + rho.adjoint()).scale(0.5);

    let residual = master_equation_rhs(&rho, &h, &relax).norm();
    if residual > 1e-10 * row_scale {
        return Err(degenerate_error(&l));
    }
    // A solution that satisfies the generator but lands outside the
    // physical bounds means the slowest relaxation sits below the f64
    // resolution of the coefficients: a numerically degenerate system,
    // not a bad input.
    DensityMatrix::new(rho).map_err(|_| degenerate_error(&l))
}

/// Diagnose a singular steady-state system via the numerical rank of the
/// generator (one zero singular value is the expected steady-state mode).
/// The tolerance matches the residual test: modes decaying more than ten
/// decades below the coefficient scale are unresolvable.
fn degenerate_error(l: &DMatrix<Complex64>) -> ModelError {
    let svd = l.clone().svd(false, false);
    let max_sv = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let tol = 1e-10 * max_sv.max(1e-300);
    let null_dim = svd.singular_values.iter().filter(|&&s| s <= tol).count();
    ModelError::DegenerateSteadyState { null_dim }
}

/// Options for the time integrator.
#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    /// Route decayed population back through the branching table.
    pub repopulation: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions { repopulation: true }
    }
}

/// Result of a time integration.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub rho: DensityMatrix,
    pub steps: usize,
    /// |trace - 1| at the final time.
    pub trace_drift: f64,
    pub warnings: Vec<String>,
}

/// Largest frequency scale of the problem, used by the step-size
/// heuristic.
pub fn max_frequency_scale(scheme: &LevelScheme, fields: &FieldSet) -> f64 {
    let h = interaction_hamiltonian(scheme, fields);
    let mut scale = 0.0f64;
    for x in 0..4 {
        for y in 0..4 {
            scale = scale.max(h[(x, y)].norm());
        }
        scale = scale.max(scheme.decay_rates[x]);
    }
    for x in Level::ALL {
        for y in Level::ALL {
            scale = scale.max(scheme.dephasings.pair(x, y));
        }
    }
    scale
}

/// Fixed-step fourth-order integration of the master equation from `rho0`
/// over time `t_final` with step `dt`. The state is re-Hermitized every
/// step; norm blow-up aborts with a step-size suggestion.
pub fn evolve(
    rho0: &DensityMatrix,
    scheme: &LevelScheme,
    fields: &FieldSet,
    t_final: f64,
    dt: f64,
    options: EvolveOptions,
) -> Result<Evolution> {
    fields.validate(scheme)?;
    if !(t_final >= 0.0) || !(dt > 0.0) {
        return Err(ModelError::InvalidParameter {
            name: "evolve",
            message: format!("t_final = {t_final:e}, dt = {dt:e}"),
        });
    }
    let mut warnings = Vec::new();
    let scale = max_frequency_scale(scheme, fields);
    if dt * scale > 0.1 {
        warnings.push(format!(
            "dt = {dt:e} s exceeds the stability heuristic 0.1/max_scale = {:e} s",
            0.1 / scale
        ));
    }

    let h = interaction_hamiltonian(scheme, fields);
    let relax = if options.repopulation {
        Relaxation::of(scheme)
    } else {
        Relaxation::without_repopulation(scheme)
    };

    let steps = (t_final / dt).ceil() as usize;
    let mut rho = *rho0.matrix();
    for step in 0..steps {
        // Final step is shortened to land exactly on t_final.
        let h_step = (t_final - step as f64 * dt).min(dt);
        let k1 = master_equation_rhs(&rho, &h, &relax);
        let r2 = rho + k1.scale(0.5 * h_step);
        let k2 = master_equation_rhs(&r2, &h, &relax);
        let r3 = rho + k2.scale(0.5 * h_step);
        let k3 = master_equation_rhs(&r3, &h, &relax);
        let r4 = rho + k3.scale(h_step);
        let k4 = master_equation_rhs(&r4, &h, &relax);
        rho += (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(h_step / 6.0);
        rho = (rho + rho.adjoint()).scale(0.5);

        let norm = rho.norm();
        if !norm.is_finite() || norm > 10.0 {
            return Err(ModelError::IntegratorUnstable {
                t: (step + 1) as f64 * dt,
                norm,
                dt_suggest: 0.05 / scale,
            });
        }
    }

    let trace_drift = (rho.trace().re - 1.0).abs() + rho.trace().im.abs();
    let rho = if options.repopulation {
        DensityMatrix::new(rho)?
    } else {
        // Without repopulation the trace legitimately decays; skip the
        // unit-trace validation.
        DensityMatrix { rho }
    };
    Ok(Evolution { rho, steps, trace_drift, warnings })
}

/// Closed-form steady coherences of the three-level probe-coupling
/// subsystem with the population pinned to the ground level:
/// rho_ab = i Omega_1 Gamma_cb / D, rho_cb = -Omega_1 conj(Omega_2) / D,
/// D = Gamma_ab Gamma_cb + |Omega_2|^2.
pub fn weak_probe_coherence(
    omega1: Complex64,
    omega2: Complex64,
    gamma_ab: Complex64,
    gamma_cb: Complex64,
) -> Result<(Complex64, Complex64)> {
    let denom = gamma_ab * gamma_cb + Complex64::new(omega2.norm_sqr(), 0.0);
    let floor = 1e-12 * (gamma_ab.norm() * gamma_cb.norm()).max(omega2.norm_sqr());
    if denom.norm() <= floor {
        return Err(ModelError::Singularity {
            context: "weak_probe_coherence",
            value: denom.norm(),
        });
    }
    let rho_ab = I * omega1 * gamma_cb / denom;
    let rho_cb = -omega1 * omega2.conj() / denom;
    Ok((rho_ab, rho_cb))
}

/// Steady signal-transition coherence sourced by the grating: with the
/// populations pinned to the ground level,
/// rho_db = (i Omega_4 + i rho_cb conj(Omega_3)) / Gamma_db.
pub fn signal_polarization(
    rho_cb: Complex64,
    omega3: Complex64,
    omega4: Complex64,
    gamma_db: Complex64,
) -> Result<Complex64> {
    if gamma_db.norm() == 0.0 {
        return Err(ModelError::Singularity { context: "signal_polarization", value: 0.0 });
    }
    Ok((I * omega4 + I * rho_cb * omega3.conj()) / gamma_db)
}
