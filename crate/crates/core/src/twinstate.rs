//! Two-atom spin states and the coherence-parametrised initial density matrix.
//!
//! The pair lives in the 9-dimensional space `|m1 m2⟩`, index `3·i1 + i2` with
//! `i` the single-atom basis index of [`crate::spinops`]. Zero total angular
//! momentum and bosonic exchange symmetry leave a two-dimensional physical
//! subspace spanned by [`psi0`] and [`psi1`]. Were the atoms distinguishable,
//! `|1,-1⟩` and `|-1,1⟩` would count separately and the subspace would be
//! three-dimensional; that case is not modelled.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, outer, re, Mat3, Mat9, Vec9, C64};
use crate::spinops::{self, clebsch_gordan_11, index_of, BASIS_M};

/// Default eigenvalue floor for positivity checks.
pub const POSITIVITY_TOL: f64 = 1e-10;

#[inline]
pub fn pair_index(m1: i32, m2: i32) -> Result<usize> {
    Ok(3 * index_of(m1)? + index_of(m2)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoAtomSpinState(pub Vec9);

impl TwoAtomSpinState {
    pub fn amplitudes(&self) -> &Vec9 {
        &self.0
    }

    pub fn amplitude(&self, m1: i32, m2: i32) -> Result<C64> {
        Ok(self.0[pair_index(m1, m2)?])
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn inner(&self, other: &TwoAtomSpinState) -> C64 {
        self.0.dotc(&other.0)
    }

    pub fn projector(&self) -> Mat9 {
        outer(&self.0, &self.0)
    }

    /// Coupled state `|F M⟩ = Σ ⟨1 m1; 1 m2|F M⟩ |m1 m2⟩`.
    pub fn coupled(total: i32, m_total: i32) -> Result<Self> {
        let mut v = Vec9::zeros();
        for m1 in BASIS_M {
            for m2 in BASIS_M {
                let c = clebsch_gordan_11(m1, m2, total, m_total)?;
                v[pair_index(m1, m2)?] = re(c);
            }
        }
        Ok(TwoAtomSpinState(v))
    }
}

/// `|0 0⟩`: both fragments with zero projection on O_z.
pub fn psi0() -> TwoAtomSpinState {
    let mut v = Vec9::zeros();
    v[4] = re(1.0);
    TwoAtomSpinState(v)
}

/// `(|1,-1⟩ + |-1,1⟩)/√2`: opposite projections, symmetrised.
pub fn psi1() -> TwoAtomSpinState {
    let mut v = Vec9::zeros();
    v[2] = re(FRAC_1_SQRT_2);
    v[6] = re(FRAC_1_SQRT_2);
    TwoAtomSpinState(v)
}

/// The `F = 0` pair state `-√(1/3) ψ0 + √(2/3) ψ1`.
pub fn singlet() -> TwoAtomSpinState {
    let a = -(1.0f64 / 3.0).sqrt();
    let b = (2.0f64 / 3.0).sqrt();
    TwoAtomSpinState(psi0().0 * re(a) + psi1().0 * re(b))
}

/// Permutation `|m1 m2⟩ ↦ |m2 m1⟩`.
pub fn exchange_operator() -> Mat9 {
    let mut p = Mat9::zeros();
    for i1 in 0..3 {
        for i2 in 0..3 {
            p[(3 * i2 + i1, 3 * i1 + i2)] = re(1.0);
        }
    }
    p
}

/// `F_z ⊗ 1 + 1 ⊗ F_z`.
pub fn total_fz() -> Mat9 {
    let fz = spinops::f_z();
    let id = Mat3::identity();
    fz.kronecker(&id) + id.kronecker(&fz)
}

/// Spin-coherence parameter λ ∈ [0, 1]; 0 is an incoherent mixture, 1 a pure singlet.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Coherence(f64);

impl Coherence {
    pub fn new(lambda: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&lambda) {
            Ok(Coherence(lambda))
        } else {
            Err(Error::invalid(format!("lambda must lie in [0, 1], got {lambda}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Coherence {
    type Error = Error;

    fn try_from(lambda: f64) -> Result<Self> {
        Coherence::new(lambda)
    }
}

/// Two-atom spin density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoAtomDensity(pub Mat9);

impl TwoAtomDensity {
    pub fn matrix(&self) -> &Mat9 {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        linalg::trace_re(&self.0)
    }

    /// `⟨a|ρ|b⟩`.
    pub fn element(&self, a: &TwoAtomSpinState, b: &TwoAtomSpinState) -> C64 {
        a.0.dotc(&(self.0 * b.0))
    }

    /// Bloch vector of the 2×2 block on `{ψ0, ψ1}`.
    pub fn bloch_vector(&self) -> [f64; 3] {
        let (p0, p1) = (psi0(), psi1());
        let r00 = self.element(&p0, &p0).re;
        let r11 = self.element(&p1, &p1).re;
        let r01 = self.element(&p0, &p1);
        [2.0 * r01.re, -2.0 * r01.im, r00 - r11]
    }
}

/// Initial pair density
/// `ρ = ⅓|ψ0⟩⟨ψ0| + ⅔|ψ1⟩⟨ψ1| - λ(√2/3)(|ψ0⟩⟨ψ1| + |ψ1⟩⟨ψ0|)`.
pub fn rho0(lambda: Coherence) -> TwoAtomDensity {
    let (p0, p1) = (psi0().0, psi1().0);
    let cross = outer(&p0, &p1) + outer(&p1, &p0);
    let m = outer(&p0, &p0) * re(1.0 / 3.0) + outer(&p1, &p1) * re(2.0 / 3.0)
        - cross * re(lambda.value() * 2f64.sqrt() / 3.0);
    TwoAtomDensity(m)
}

/// `Tr ρ²`.
pub fn purity(rho: &TwoAtomDensity) -> f64 {
    linalg::purity_of(&rho.0)
}

/// `1 - Tr ρ²`.
pub fn linear_entropy(rho: &TwoAtomDensity) -> f64 {
    1.0 - purity(rho)
}

/// Outcome of [`is_physical_density`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityDiagnostics {
    pub hermiticity_defect: f64,
    pub trace: C64,
    pub min_eigenvalue: f64,
    pub hermitian: bool,
    pub unit_trace: bool,
    pub positive: bool,
}

impl DensityDiagnostics {
    pub fn is_physical(&self) -> bool {
        self.hermitian && self.unit_trace && self.positive
    }
}

/// Checks Hermiticity, unit trace and positivity of a square matrix.
///
/// Violations are reported in the diagnostics, never raised.
pub fn is_physical_density(rho: &DMatrix<C64>, tolerance: f64) -> DensityDiagnostics {
    if !rho.is_square() || rho.nrows() == 0 {
        return DensityDiagnostics {
            hermiticity_defect: f64::INFINITY,
            trace: C64::new(f64::NAN, 0.0),
            min_eigenvalue: f64::NAN,
            hermitian: false,
            unit_trace: false,
            positive: false,
        };
    }
    let hermiticity_defect = linalg::hermiticity_defect(rho);
    let trace = rho.trace();
    let min_eigenvalue = linalg::hermitian_eigenvalues(rho)[0];
    DensityDiagnostics {
        hermiticity_defect,
        trace,
        min_eigenvalue,
        hermitian: hermiticity_defect <= tolerance,
        unit_trace: (trace - re(1.0)).norm() <= tolerance,
        positive: min_eigenvalue >= -tolerance,
    }
}
