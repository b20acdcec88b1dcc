//! The double Stern-Gerlach device pipeline on the side-resolved pair space.
//!
//! Each atom carries a two-valued side label (Left ↔ x < 0, Right ↔ x > 0)
//! next to its spin, giving a 6-dimensional single-atom space indexed
//! `3·side + spin` and a 36-dimensional pair space indexed `6·a1 + a2`. The
//! external wavefunction is reduced to the symmetric side assignment
//! `(|L R⟩ + |R L⟩)/√2`; free flight between devices is the identity.
//!
//! Pipeline: polarizer `P`, trace renormalization, phase object `O`, then
//! projection on the symmetric coincidence state.

mod estimate;
mod scan;

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, re, Mat3, Mat36, Mat6, Mat9, Vec36, C64};
use crate::spinops;
use crate::twinstate::{self, is_physical_density, Coherence, DensityDiagnostics, TwoAtomSpinState};

pub use estimate::{estimate_lambda_from_ratio, fit_lambda, fit_samples, FitResult, RatioEstimate};
pub use scan::{scan, uniform_grid, Peak, ScanResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub const ALL: [Side; 2] = [Side::Left, Side::Right];

    pub fn index(self) -> usize {
        match self {
            Side::Left => 0,
            Side::Right => 1,
        }
    }
}

/// Index of `|side, m⟩` in the 6-dimensional single-atom space.
pub fn atom_index(side: Side, m: i32) -> Result<usize> {
    Ok(3 * side.index() + spinops::index_of(m)?)
}

/// Index of `|side1, m1⟩|side2, m2⟩` in the 36-dimensional pair space.
pub fn pair_index(side1: Side, m1: i32, side2: Side, m2: i32) -> Result<usize> {
    Ok(6 * atom_index(side1, m1)? + atom_index(side2, m2)?)
}

/// Zeeman phases of the left and right phase objects, radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSettings {
    pub phi_l: f64,
    pub phi_r: f64,
}

impl PhaseSettings {
    pub fn new(phi_l: f64, phi_r: f64) -> Result<Self> {
        if !phi_l.is_finite() || !phi_r.is_finite() {
            return Err(Error::invalid(format!("phases must be finite, got ({phi_l}, {phi_r})")));
        }
        Ok(PhaseSettings { phi_l, phi_r })
    }

    /// Both phases wrapped into `[0, 2π)`.
    pub fn canonical(self) -> Self {
        PhaseSettings { phi_l: self.phi_l.rem_euclid(TAU), phi_r: self.phi_r.rem_euclid(TAU) }
    }

    pub fn swapped(self) -> Self {
        PhaseSettings { phi_l: self.phi_r, phi_r: self.phi_l }
    }
}

/// Pair density on the side-resolved 36-dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct SidedDensity(pub Mat36);

impl SidedDensity {
    pub fn matrix(&self) -> &Mat36 {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        linalg::trace_re(&self.0)
    }

    /// Traces out both side labels, leaving the 9×9 spin density.
    pub fn spin_marginal(&self) -> Mat9 {
        let mut out = Mat9::zeros();
        for i1 in 0..3 {
            for i2 in 0..3 {
                for j1 in 0..3 {
                    for j2 in 0..3 {
                        let mut acc = C64::new(0.0, 0.0);
                        for s1 in 0..2 {
                            for s2 in 0..2 {
                                let row = 6 * (3 * s1 + i1) + 3 * s2 + i2;
                                let col = 6 * (3 * s1 + j1) + 3 * s2 + j2;
                                acc += self.0[(row, col)];
                            }
                        }
                        out[(3 * i1 + i2, 3 * j1 + j2)] = acc;
                    }
                }
            }
        }
        out
    }

    pub fn diagnostics(&self, tolerance: f64) -> DensityDiagnostics {
        is_physical_density(&DMatrix::from_iterator(36, 36, self.0.iter().copied()), tolerance)
    }
}

/// Symmetric side assignment `(|L⟩₁|R⟩₂ + |R⟩₁|L⟩₂)/√2` as amplitudes over `(s1, s2)`.
fn side_amplitudes() -> [[f64; 2]; 2] {
    [[0.0, FRAC_1_SQRT_2], [FRAC_1_SQRT_2, 0.0]]
}

/// Places a pair spin state onto the symmetric side assignment.
pub fn embed_spin_state(state: &TwoAtomSpinState) -> Vec36 {
    let chi = side_amplitudes();
    let mut v = Vec36::zeros();
    for s1 in 0..2 {
        for s2 in 0..2 {
            for i1 in 0..3 {
                for i2 in 0..3 {
                    v[6 * (3 * s1 + i1) + 3 * s2 + i2] = state.0[3 * i1 + i2] * chi[s1][s2];
                }
            }
        }
    }
    v
}

/// Swaps the complete labels (side and spin) of the two atoms.
pub fn sided_exchange_operator() -> Mat36 {
    let mut p = Mat36::zeros();
    for a1 in 0..6 {
        for a2 in 0..6 {
            p[(6 * a2 + a1, 6 * a1 + a2)] = re(1.0);
        }
    }
    p
}

/// Initial pair density: symmetric side assignment ⊗ spin density `rho0(λ)`.
pub fn initial_state(lambda: Coherence) -> SidedDensity {
    let chi = side_amplitudes();
    let spin = twinstate::rho0(lambda).0;
    let sides: Vec<(usize, usize, f64)> = (0..2)
        .flat_map(|s1| (0..2).map(move |s2| (s1, s2, chi[s1][s2])))
        .filter(|&(_, _, amp)| amp != 0.0)
        .collect();
    let mut m = Mat36::zeros();
    for &(s1, s2, ket) in &sides {
        for &(t1, t2, bra) in &sides {
            for i in 0..9 {
                for j in 0..9 {
                    let row = 6 * (3 * s1 + i / 3) + 3 * s2 + i % 3;
                    let col = 6 * (3 * t1 + j / 3) + 3 * t2 + j % 3;
                    m[(row, col)] = spin[(i, j)] * (ket * bra);
                }
            }
        }
    }
    SidedDensity(m)
}

fn block_diag(left: &Mat3, right: &Mat3) -> Mat6 {
    let mut m = Mat6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(left);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(right);
    m
}

/// Single-atom polarizer: the left arm removes `m_z = +1`, the right arm `m_z = -1`.
pub fn polarizer_single() -> Mat6 {
    let keep = |drop: usize| {
        let mut d = Mat3::identity();
        d[(drop, drop)] = re(0.0);
        d
    };
    block_diag(&keep(0), &keep(2))
}

/// `Q ⊗ Q` with `Q` the single-atom polarizer.
pub fn polarizer_operator() -> Mat36 {
    let q = polarizer_single();
    q.kronecker(&q)
}

/// `|L⟩⟨L| ⊗ left + |R⟩⟨R| ⊗ right`.
pub fn sided_block(left: &Mat3, right: &Mat3) -> Mat6 {
    block_diag(left, right)
}

/// Single-atom phase object `|L⟩⟨L| ⊗ e^{iφ_L F_x} + |R⟩⟨R| ⊗ e^{iφ_R F_x}`.
///
/// Built through the axis switch `D(-π/2) e^{iφ F_z} D(π/2)`, i.e. the
/// beam-splitter, phase, recombiner sequence.
pub fn phase_object_single(phases: PhaseSettings) -> Mat6 {
    block_diag(
        &spinops::longitudinal_phase(phases.phi_l),
        &spinops::longitudinal_phase(phases.phi_r),
    )
}

pub fn phase_object_operator(phases: PhaseSettings) -> Mat36 {
    let o = phase_object_single(phases);
    o.kronecker(&o)
}

const DETECTED: [(Side, i32); 2] = [(Side::Left, 1), (Side::Right, -1)];

/// Symmetrised coincidence state: the left analyzer passes `m_z = +1`, the
/// right one `m_z = -1`.
pub fn detection_state() -> Vec36 {
    let [(sa, ma), (sb, mb)] = DETECTED;
    let mut v = Vec36::zeros();
    v[pair_index(sa, ma, sb, mb).unwrap()] = re(FRAC_1_SQRT_2);
    v[pair_index(sb, mb, sa, ma).unwrap()] = re(FRAC_1_SQRT_2);
    v
}

/// Result of running the pipeline.
#[derive(Debug, Clone)]
pub struct Evolved {
    /// Final density, renormalised to unit trace after the polarizer.
    pub density: SidedDensity,
    /// `Tr(P ρ P)`, the fraction of pairs passing both polarizers.
    pub survival: f64,
}

const SURVIVAL_FLOOR: f64 = 1e-14;

/// `N P ρ P` with `N` restoring unit trace.
fn polarized(lambda: Coherence) -> Result<(Mat36, f64)> {
    let p = polarizer_operator();
    let rho = p * initial_state(lambda).0 * p.adjoint();
    let survival = linalg::trace_re(&rho);
    if survival < SURVIVAL_FLOOR {
        return Err(Error::DegenerateState(format!(
            "polarizer survival probability {survival:e} cannot be renormalised"
        )));
    }
    Ok((rho / re(survival), survival))
}

/// `N · O P ρ_init P† O†`.
pub fn evolve(lambda: Coherence, phases: PhaseSettings) -> Result<Evolved> {
    let (rho, survival) = polarized(lambda)?;
    let o = phase_object_operator(phases);
    Ok(Evolved { density: SidedDensity(o * rho * o.adjoint()), survival })
}

/// `⟨det|ρ|det⟩`.
pub fn coincidence(rho: &SidedDensity) -> f64 {
    let d = detection_state();
    d.dotc(&(rho.0 * d)).re
}

/// Polarized, renormalised state for one λ, reused across many phase settings.
#[derive(Debug, Clone)]
pub struct PreparedState {
    rho: Mat36,
    survival: f64,
}

impl PreparedState {
    pub fn new(lambda: Coherence) -> Result<Self> {
        let (rho, survival) = polarized(lambda)?;
        Ok(PreparedState { rho, survival })
    }

    pub fn survival(&self) -> f64 {
        self.survival
    }

    /// Coincidence rate, evaluated as `⟨O†det|ρ|O†det⟩`.
    pub fn signal(&self, phases: PhaseSettings) -> f64 {
        self.signal_with(&phase_object_single(phases))
    }

    /// Coincidence rate for an arbitrary single-atom phase object `o`
    /// (applied to both atoms).
    pub fn signal_with(&self, o: &Mat6) -> f64 {
        let v = pulled_back_detection(o);
        v.dotc(&(self.rho * v)).re
    }
}

/// `(o ⊗ o)† |det⟩`, using the product structure of the phase object.
fn pulled_back_detection(o: &Mat6) -> Vec36 {
    let od = o.adjoint();
    let [(sa, ma), (sb, mb)] = DETECTED;
    let ua = od.column(atom_index(sa, ma).unwrap()).into_owned();
    let ub = od.column(atom_index(sb, mb).unwrap()).into_owned();
    (ua.kronecker(&ub) + ub.kronecker(&ua)) * re(FRAC_1_SQRT_2)
}

/// Coincidence rate after the full pipeline, `coincidence(evolve(λ, phases))`.
pub fn signal(lambda: Coherence, phases: PhaseSettings) -> Result<f64> {
    Ok(PreparedState::new(lambda)?.signal(phases))
}

/// `(a, b)` with the closed-form signal equal to `C (a + λ b)`.
pub(crate) fn analytic_parts(phases: PhaseSettings) -> (f64, f64) {
    let (l, r) = (phases.phi_l, phases.phi_r);
    let envelope = (l / 2.0).sin().powi(2) * (r / 2.0).sin().powi(2);
    let base = l.cos() * (5.0 * r.cos() + 3.0) + 3.0 * r.cos() + 5.0;
    (envelope * base, envelope * 4.0 * l.sin() * r.sin())
}

/// Closed-form coincidence rate
/// `C sin²(φ_L/2) sin²(φ_R/2) [4λ sinφ_L sinφ_R + cosφ_L (5cosφ_R + 3) + 3cosφ_R + 5]`.
pub fn analytic_signal(lambda: Coherence, phases: PhaseSettings, scale: f64) -> f64 {
    let (a, b) = analytic_parts(phases);
    scale * (a + lambda.value() * b)
}

fn evolved_components(phases: PhaseSettings) -> Result<(Vec36, Vec36)> {
    let u = phase_object_operator(phases) * polarizer_operator();
    let a = u * embed_spin_state(&twinstate::psi0());
    let b = u * embed_spin_state(&twinstate::psi1());
    for (name, v) in [("psi0", &a), ("psi1", &b)] {
        if v.norm() < 1e-14 {
            return Err(Error::DegenerateState(format!("evolved {name} vanishes")));
        }
    }
    Ok((a, b))
}

/// `|⟨Uψ0|Uψ1⟩| / (‖Uψ0‖ ‖Uψ1‖)` with `U = O P`.
///
/// The polarizer keeps `ψ0` and `ψ1` on disjoint basis states and `O` is
/// unitary, so this vanishes for every phase setting.
pub fn evolved_overlap(phases: PhaseSettings) -> Result<f64> {
    let (a, b) = evolved_components(phases)?;
    Ok((a.dotc(&b).norm() / (a.norm() * b.norm())).min(1.0))
}

/// Overlap of the two evolved components once the analyzers have acted:
/// `|⟨Uψ0|det⟩⟨det|Uψ1⟩| / (‖Uψ0‖ ‖Uψ1‖)`.
///
/// This is the amplitude that carries the λ-dependent interference term of
/// the coincidence rate; it vanishes at `φ_R ∈ {0, π}`.
pub fn analyzed_overlap(phases: PhaseSettings) -> Result<f64> {
    let (a, b) = evolved_components(phases)?;
    let d = detection_state();
    Ok((d.dotc(&a) * d.dotc(&b)).norm() / (a.norm() * b.norm()))
}

/// The peak angles `(π/2, 3π/2)` used for the asymmetry statistic.
pub const PEAK_ANGLES: (f64, f64) = (PI / 2.0, 3.0 * PI / 2.0);

/// `(I₁ - I₂)/(I₁ + I₂)` for `I₁ = signal at φ_R = π/2`, `I₂ at φ_R = 3π/2`.
pub fn asymmetry(first: f64, second: f64) -> f64 {
    (first - second) / (first + second)
}
