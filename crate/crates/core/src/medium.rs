//! Level schemes, optical fields, medium parameters, and the field-medium
//! coupling constant.
//!
//! The model has four levels {a, b, c, d} with b the ground state and the
//! zero of energy. Three coupling topologies are supported; each fixes
//! which transition every field drives, the frequency closure that makes
//! the rotating frame time independent, and the wavevector combination
//! entering the phase-matching analysis.

use crate::constants::{C, EPSILON_0, HBAR};
use crate::error::{ModelError, Result};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Level labels. Indexing order is a, b, c, d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Level {
    A,
    B,
    C,
    D,
}

impl Level {
    pub const ALL: [Level; 4] = [Level::A, Level::B, Level::C, Level::D];

    /// Matrix index of the level.
    pub fn idx(self) -> usize {
        match self {
            Level::A => 0,
            Level::B => 1,
            Level::C => 2,
            Level::D => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Level::A => "a",
            Level::B => "b",
            Level::C => "c",
            Level::D => "d",
        }
    }
}

/// Coupling topology of the four fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SchemeVariant {
    /// Two Lambda systems sharing the b, c pair: fields 1, 2 close through
    /// upper level a; fields 3, 4 close through upper level d.
    DoubleLambda,
    /// Lambda on {a, b, c} with a ladder c -> d -> b below it, as realized
    /// on vibrational or rotational level stacks.
    LadderLambda,
    /// V on {b, a, c} with the signal generated on c-d, as realized on
    /// atomic level schemes.
    VLambda,
}

/// One driven transition: upper level, lower level, and whether the drive
/// amplitude enters the Hamiltonian conjugated.
///
/// The conjugated slot appears only for field 3 of the double-Lambda
/// variant, where the generated coherence is proportional to
/// `rho_cb * conj(Omega_3)`; carrying the conjugation in the Hamiltonian
/// keeps the full solve consistent with that closed form.
#[derive(Debug, Clone, Copy)]
pub struct DrivenTransition {
    pub upper: Level,
    pub lower: Level,
    pub conjugated: bool,
}

impl SchemeVariant {
    /// The transitions driven by fields 1..4, in field order.
    pub fn transitions(self) -> [DrivenTransition; 4] {
        use Level::*;
        let t = |upper, lower, conjugated| DrivenTransition { upper, lower, conjugated };
        match self {
            SchemeVariant::DoubleLambda => {
                [t(A, B, false), t(A, C, false), t(D, C, true), t(D, B, false)]
            }
            SchemeVariant::LadderLambda => {
                [t(A, B, false), t(A, C, false), t(C, D, false), t(D, B, false)]
            }
            SchemeVariant::VLambda => {
                [t(A, B, false), t(C, A, false), t(D, B, false), t(C, D, false)]
            }
        }
    }

    /// The transition on which field 4 is generated.
    pub fn signal_transition(self) -> DrivenTransition {
        self.transitions()[3]
    }

    /// Frequency of field 4 implied by fields 1..3.
    pub fn frequency_closure(self, nu1: f64, nu2: f64, nu3: f64) -> f64 {
        match self {
            SchemeVariant::DoubleLambda => nu1 - nu2 + nu3,
            SchemeVariant::LadderLambda => nu1 - nu2 - nu3,
            SchemeVariant::VLambda => nu1 + nu2 - nu3,
        }
    }

    /// Wavevector combination of fields 1..3 that the generated field must
    /// match; mirrors the frequency closure.
    pub fn wavevector_combination(self, k1: f64, k2: f64, k3: f64) -> f64 {
        match self {
            SchemeVariant::DoubleLambda => k1 - k2 + k3,
            SchemeVariant::LadderLambda => k1 - k2 - k3,
            SchemeVariant::VLambda => k1 + k2 - k3,
        }
    }

    /// Two-photon frequency at which the b-c coherence rotates: nu1 - nu2
    /// for the Lambda-type variants, nu1 + nu2 for the V-type.
    pub fn raman_frequency(self, nu1: f64, nu2: f64) -> f64 {
        match self {
            SchemeVariant::VLambda => nu1 + nu2,
            _ => nu1 - nu2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SchemeVariant::DoubleLambda => "double-lambda",
            SchemeVariant::LadderLambda => "ladder-lambda",
            SchemeVariant::VLambda => "v-lambda",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "double-lambda" => Ok(SchemeVariant::DoubleLambda),
            "ladder-lambda" => Ok(SchemeVariant::LadderLambda),
            "v-lambda" => Ok(SchemeVariant::VLambda),
            other => Err(ModelError::UnknownName {
                kind: "scheme variant",
                got: other.to_string(),
                valid: "double-lambda, ladder-lambda, v-lambda".into(),
            }),
        }
    }
}

/// Pure-dephasing rates added on top of the lifetime broadening
/// (Gamma_x + Gamma_y)/2 of the named coherences, rad/s.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Dephasings {
    pub ab: f64,
    pub ca: f64,
    pub cb: f64,
    pub db: f64,
}

impl Dephasings {
    fn all(&self) -> [f64; 4] {
        [self.ab, self.ca, self.cb, self.db]
    }

    /// Pure-dephasing rate of the (x, y) coherence; zero for pairs without
    /// a named rate.
    pub fn pair(&self, x: Level, y: Level) -> f64 {
        use Level::*;
        match (x, y) {
            (A, B) | (B, A) => self.ab,
            (C, A) | (A, C) => self.ca,
            (C, B) | (B, C) => self.cb,
            (D, B) | (B, D) => self.db,
            _ => 0.0,
        }
    }
}

/// Four-level scheme: energies, dipole moments, relaxation rates, and the
/// coupling topology.
#[derive(Debug, Clone)]
pub struct LevelScheme {
    pub variant: SchemeVariant,
    /// Level energies as offsets from b, rad/s, indexed by `Level::idx`.
    /// `offsets[1]` is zero by construction.
    offsets: [f64; 4],
    /// Dipole moments of the four driven transitions, C*m, field order.
    pub dipole_moments: [f64; 4],
    /// Population decay rate of each level, rad/s, level order.
    pub decay_rates: [f64; 4],
    /// Pure-dephasing add-ons for the tracked coherences.
    pub dephasings: Dephasings,
    /// Row x: fraction of level x's decayed population landing on each
    /// level. Rows sum to one.
    branching: [[f64; 4]; 4],
}

/// Branching table routing every decay to the ground level b.
pub const BRANCH_ALL_TO_GROUND: [[f64; 4]; 4] = [
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
];

impl LevelScheme {
    /// Build a validated scheme from level offsets (rad/s relative to b).
    ///
    /// Every transition driven by the variant's topology must have a
    /// positive frequency gap; rates must be nonnegative and dipole
    /// moments positive.
    pub fn new(
        variant: SchemeVariant,
        e_a: f64,
        e_c: f64,
        e_d: f64,
        dipole_moments: [f64; 4],
        decay_rates: [f64; 4],
        dephasings: Dephasings,
    ) -> Result<Self> {
        let scheme = LevelScheme {
            variant,
            offsets: [e_a, 0.0, e_c, e_d],
            dipole_moments,
            decay_rates,
            dephasings,
            branching: BRANCH_ALL_TO_GROUND,
        };
        scheme.validate()?;
        Ok(scheme)
    }

    /// Replace the repopulation branching table. Rows must be nonnegative
    /// and sum to one.
    pub fn with_branching(mut self, branching: [[f64; 4]; 4]) -> Result<Self> {
        for (i, row) in branching.iter().enumerate() {
            if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                return Err(ModelError::InvalidParameter {
                    name: "branching",
                    message: format!("row {i} has an entry outside [0, 1]"),
                });
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(ModelError::InvalidParameter {
                    name: "branching",
                    message: format!("row {i} sums to {sum}, expected 1"),
                });
            }
        }
        self.branching = branching;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        for (i, &e) in self.offsets.iter().enumerate() {
            if !e.is_finite() {
                return Err(ModelError::InvalidParameter {
                    name: "level offset",
                    message: format!("level {} offset is not finite", Level::ALL[i].name()),
                });
            }
        }
        for (j, tr) in self.variant.transitions().iter().enumerate() {
            let gap = self.offsets[tr.upper.idx()] - self.offsets[tr.lower.idx()];
            if gap <= 0.0 {
                return Err(ModelError::Inconsistency {
                    identity: "transition gap > 0",
                    message: format!(
                        "field {} drives {}-{} but the gap is {:e} rad/s",
                        j + 1,
                        tr.upper.name(),
                        tr.lower.name(),
                        gap
                    ),
                });
            }
        }
        if self.dipole_moments.iter().any(|&p| p <= 0.0 || !p.is_finite()) {
            return Err(ModelError::InvalidParameter {
                name: "dipole_moments",
                message: "all dipole moments must be positive".into(),
            });
        }
        if self.decay_rates.iter().any(|&g| g < 0.0 || !g.is_finite()) {
            return Err(ModelError::InvalidParameter {
                name: "decay_rates",
                message: "decay rates must be nonnegative".into(),
            });
        }
        if self.dephasings.all().iter().any(|&g| g < 0.0 || !g.is_finite()) {
            return Err(ModelError::InvalidParameter {
                name: "dephasings",
                message: "dephasing rates must be nonnegative".into(),
            });
        }
        Ok(())
    }

    /// Energy offset of a level from b, rad/s.
    pub fn offset(&self, level: Level) -> f64 {
        self.offsets[level.idx()]
    }

    /// Signed transition frequency omega_xy = E_x - E_y, rad/s.
    pub fn omega(&self, x: Level, y: Level) -> f64 {
        self.offsets[x.idx()] - self.offsets[y.idx()]
    }

    pub fn omega_ab(&self) -> f64 {
        self.omega(Level::A, Level::B)
    }

    pub fn omega_ac(&self) -> f64 {
        self.omega(Level::A, Level::C)
    }

    pub fn omega_cb(&self) -> f64 {
        self.omega(Level::C, Level::B)
    }

    pub fn omega_db(&self) -> f64 {
        self.omega(Level::D, Level::B)
    }

    pub fn omega_dc(&self) -> f64 {
        self.omega(Level::D, Level::C)
    }

    /// Resonance frequency of the transition driven by field j (1-based),
    /// always positive.
    pub fn gap(&self, j: usize) -> f64 {
        let tr = self.variant.transitions()[j - 1];
        self.omega(tr.upper, tr.lower)
    }

    /// Total decay rate of the (x, y) coherence: lifetime broadening plus
    /// any named pure-dephasing add-on.
    pub fn coherence_decay(&self, x: Level, y: Level) -> f64 {
        0.5 * (self.decay_rates[x.idx()] + self.decay_rates[y.idx()]) + self.dephasings.pair(x, y)
    }

    pub fn branching(&self) -> &[[f64; 4]; 4] {
        &self.branching
    }
}

/// One optical field: angular frequency, complex Rabi envelope, propagation
/// direction, and wavevector.
#[derive(Debug, Clone, Copy)]
pub struct Field {
    /// Angular frequency, rad/s.
    pub nu: f64,
    /// Complex Rabi amplitude, rad/s.
    pub rabi: Complex64,
    /// Propagation sign along z.
    pub direction: i8,
    /// Wavevector magnitude, rad/m. Initialized to the vacuum value nu/c;
    /// the dispersion layer refines field 1.
    pub k: f64,
}

/// The four fields of the mixing process, field order 1..4.
#[derive(Debug, Clone)]
pub struct FieldSet {
    pub fields: [Field; 4],
}

impl FieldSet {
    /// Fields 1..3 detuned from their transitions by the given amounts,
    /// field 4 on the variant's frequency closure. Wavevectors start at
    /// vacuum values. `dir4` is the propagation sign of the generated
    /// field; inputs co-propagate along +z.
    pub fn with_detunings(
        scheme: &LevelScheme,
        detunings: [f64; 3],
        rabis: [Complex64; 4],
        dir4: i8,
    ) -> Result<Self> {
        let nu1 = scheme.gap(1) + detunings[0];
        let nu2 = scheme.gap(2) + detunings[1];
        let nu3 = scheme.gap(3) + detunings[2];
        let nu4 = scheme.variant.frequency_closure(nu1, nu2, nu3);
        let mk = |nu: f64, rabi, direction| Field { nu, rabi, direction, k: nu / C };
        let set = FieldSet {
            fields: [
                mk(nu1, rabis[0], 1),
                mk(nu2, rabis[1], 1),
                mk(nu3, rabis[2], 1),
                mk(nu4, rabis[3], dir4),
            ],
        };
        set.validate(scheme)?;
        Ok(set)
    }

    /// All fields on resonance.
    pub fn resonant(scheme: &LevelScheme, rabis: [Complex64; 4], dir4: i8) -> Result<Self> {
        FieldSet::with_detunings(scheme, [0.0; 3], rabis, dir4)
    }

    /// Field j, 1-based.
    pub fn f(&self, j: usize) -> &Field {
        &self.fields[j - 1]
    }

    pub fn f_mut(&mut self, j: usize) -> &mut Field {
        &mut self.fields[j - 1]
    }

    /// Detuning of field 1 from its transition.
    pub fn probe_detuning(&self, scheme: &LevelScheme) -> f64 {
        self.f(1).nu - scheme.gap(1)
    }

    /// Copy with field 1 moved to detuning `delta` and field 4 re-closed.
    /// Rabi amplitudes, directions, and fields 2, 3 are unchanged.
    pub fn at_probe_detuning(&self, scheme: &LevelScheme, delta: f64) -> FieldSet {
        let mut out = self.clone();
        let nu1 = scheme.gap(1) + delta;
        out.fields[0].nu = nu1;
        out.fields[0].k = nu1 / C;
        let nu4 = scheme
            .variant
            .frequency_closure(nu1, out.fields[1].nu, out.fields[2].nu);
        out.fields[3].nu = nu4;
        out.fields[3].k = nu4 / C;
        out
    }

    /// Check positivity and the variant's frequency closure.
    pub fn validate(&self, scheme: &LevelScheme) -> Result<()> {
        for (i, f) in self.fields.iter().enumerate() {
            if f.nu <= 0.0 || !f.nu.is_finite() {
                return Err(ModelError::InvalidParameter {
                    name: "field frequency",
                    message: format!("field {} has nu = {:e} rad/s", i + 1, f.nu),
                });
            }
            if !f.rabi.re.is_finite() || !f.rabi.im.is_finite() {
                return Err(ModelError::InvalidParameter {
                    name: "rabi",
                    message: format!("field {} Rabi amplitude is not finite", i + 1),
                });
            }
            if f.direction != 1 && f.direction != -1 {
                return Err(ModelError::InvalidParameter {
                    name: "direction",
                    message: format!("field {} direction must be +1 or -1", i + 1),
                });
            }
        }
        let closure = scheme.variant.frequency_closure(
            self.fields[0].nu,
            self.fields[1].nu,
            self.fields[2].nu,
        );
        let nu4 = self.fields[3].nu;
        if (nu4 - closure).abs() > 1e-9 * nu4.abs().max(closure.abs()) {
            return Err(ModelError::Inconsistency {
                identity: "nu4 = frequency closure of nu1, nu2, nu3",
                message: format!(
                    "{} scheme requires nu4 = {:e} rad/s, got {:e}",
                    scheme.variant.name(),
                    closure,
                    nu4
                ),
            });
        }
        Ok(())
    }
}

/// Bulk medium parameters.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MediumParams {
    /// Number density, m^-3.
    pub n_density: f64,
    /// Doppler width, rad/s.
    pub doppler_width: f64,
    /// Radiative decay rate, rad/s.
    pub gamma_r: f64,
    /// Cell length, m.
    pub length: f64,
}

impl MediumParams {
    pub fn new(n_density: f64, doppler_width: f64, gamma_r: f64, length: f64) -> Result<Self> {
        let m = MediumParams { n_density, doppler_width, gamma_r, length };
        if !(n_density >= 0.0) || !n_density.is_finite() {
            return Err(ModelError::InvalidParameter {
                name: "n_density",
                message: format!("must be nonnegative, got {n_density:e}"),
            });
        }
        if !(doppler_width >= 0.0) || !doppler_width.is_finite() {
            return Err(ModelError::InvalidParameter {
                name: "doppler_width",
                message: format!("must be nonnegative, got {doppler_width:e}"),
            });
        }
        if !(gamma_r > 0.0) || !gamma_r.is_finite() {
            return Err(ModelError::InvalidParameter {
                name: "gamma_r",
                message: format!("must be positive, got {gamma_r:e}"),
            });
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(ModelError::InvalidParameter {
                name: "length",
                message: format!("must be positive, got {length:e}"),
            });
        }
        Ok(m)
    }
}

/// Field-medium coupling constant eta_j = nu_j N dipole^2 / (2 eps0 hbar c),
/// rad s^-1 m^-1.
///
/// With Omega = dipole * E / hbar this makes the envelope equation
/// dOmega/dz = i eta rho dimensionally consistent on both sides.
pub fn coupling_constant(nu: f64, n_density: f64, dipole: f64) -> Result<f64> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(ModelError::InvalidParameter {
            name: "nu",
            message: format!("must be positive, got {nu:e}"),
        });
    }
    if !(n_density >= 0.0) || !n_density.is_finite() {
        return Err(ModelError::InvalidParameter {
            name: "n_density",
            message: format!("must be nonnegative, got {n_density:e}"),
        });
    }
    if !(dipole > 0.0) || !dipole.is_finite() {
        return Err(ModelError::InvalidParameter {
            name: "dipole",
            message: format!("must be positive, got {dipole:e}"),
        });
    }
    Ok(nu * n_density * dipole * dipole / (2.0 * EPSILON_0 * HBAR * C))
}

/// Dipole moment of a transition at frequency `nu` whose spontaneous decay
/// rate is `gamma_r`: dipole^2 = 3 pi eps0 hbar c^3 gamma_r / nu^3.
///
/// Tying the dipole to the radiative rate this way makes the coupling
/// constant collapse to eta = 3 lambda^2 N gamma_r / (8 pi), the form the
/// density estimates below are built on.
pub fn dipole_from_radiative_rate(nu: f64, gamma_r: f64) -> Result<f64> {
    if !(nu > 0.0) || !(gamma_r > 0.0) {
        return Err(ModelError::InvalidParameter {
            name: "dipole_from_radiative_rate",
            message: format!("nu and gamma_r must be positive, got {nu:e}, {gamma_r:e}"),
        });
    }
    Ok((3.0 * PI * EPSILON_0 * HBAR * C.powi(3) * gamma_r / nu.powi(3)).sqrt())
}
