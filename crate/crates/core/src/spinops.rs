//! Spin-1 operator algebra.
//!
//! Every 3×3 operator here is written in the `m_z` basis ordered
//! `m_z = +1, 0, -1` ↔ indices `0, 1, 2`. Angular momentum is in units of ħ.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use crate::error::{Error, Result};
use crate::linalg::{im, max_abs_diff, re, Mat3, Vec3};

/// A 3×3 complex operator on a single f=1 atom.
pub type SpinOperator = Mat3;

/// Magnetic quantum numbers in basis order.
pub const BASIS_M: [i32; 3] = [1, 0, -1];

/// Basis index of `m_z = m`.
pub fn index_of(m: i32) -> Result<usize> {
    match m {
        1 => Ok(0),
        0 => Ok(1),
        -1 => Ok(2),
        _ => Err(Error::invalid(format!("m = {m} is not a spin-1 projection"))),
    }
}

/// Basis ket `|m_z = m⟩`.
pub fn ket(m: i32) -> Result<Vec3> {
    let mut v = Vec3::zeros();
    v[index_of(m)?] = re(1.0);
    Ok(v)
}

pub fn f_z() -> SpinOperator {
    Mat3::from_diagonal(&Vec3::new(re(1.0), re(0.0), re(-1.0)))
}

pub fn f_x() -> SpinOperator {
    let s = re(FRAC_1_SQRT_2);
    let z = re(0.0);
    Mat3::new(z, s, z, s, z, s, z, s, z)
}

pub fn f_y() -> SpinOperator {
    let s = FRAC_1_SQRT_2;
    let z = re(0.0);
    Mat3::new(z, im(-s), z, im(s), z, im(-s), z, im(s), z)
}

pub fn identity() -> SpinOperator {
    Mat3::identity()
}

/// `exp(iθ F)` for any spin-1 component `F` with spectrum `{-1, 0, 1}`.
///
/// Uses `F³ = F`, so the series closes on `1 + i sinθ F + (cosθ - 1) F²`.
pub fn exp_i_theta(generator: &SpinOperator, theta: f64) -> SpinOperator {
    let sq = generator * generator;
    identity() + generator * im(theta.sin()) + sq * re(theta.cos() - 1.0)
}

/// Reduced Wigner matrix `d¹(β) = exp(-iβ F_y)`.
///
/// Real orthogonal; row index is `m'`, column index `m`, both in basis order.
pub fn wigner_d1(beta: f64) -> Result<SpinOperator> {
    if !beta.is_finite() {
        return Err(Error::invalid(format!("rotation angle must be finite, got {beta}")));
    }
    let (s, c) = beta.sin_cos();
    let r = FRAC_1_SQRT_2;
    Ok(Mat3::new(
        re((1.0 + c) / 2.0),
        re(-s * r),
        re((1.0 - c) / 2.0),
        re(s * r),
        re(c),
        re(-s * r),
        re((1.0 - c) / 2.0),
        re(s * r),
        re((1.0 + c) / 2.0),
    ))
}

/// Sign convention for the operator `D(β)` that turns the quantization axis
/// about O_y.
///
/// The axis-switching identity `F_x = D(-π/2) F_z D(π/2)` only holds for one
/// of the two signs; [`RotationConvention::AXIS_SWITCH`] records that one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotationConvention {
    /// `D(β) = d¹(β)`, an active rotation of the state.
    Active,
    /// `D(β) = d¹(-β)`: turning the quantization axis by `β` turns states by `-β`.
    Passive,
}

impl RotationConvention {
    /// The convention under which `D(-π/2) F_z D(π/2) = F_x`.
    pub const AXIS_SWITCH: Self = RotationConvention::Passive;

    pub fn rotation(self, beta: f64) -> Result<SpinOperator> {
        match self {
            RotationConvention::Active => wigner_d1(beta),
            RotationConvention::Passive => wigner_d1(-beta),
        }
    }

    /// Largest entrywise error of `D(-π/2) F_z D(π/2) - F_x` under this convention.
    pub fn axis_switch_defect(self) -> f64 {
        let back = self.rotation(-FRAC_PI_2).expect("finite angle");
        let fwd = self.rotation(FRAC_PI_2).expect("finite angle");
        max_abs_diff(&(back * f_z() * fwd), &f_x())
    }
}

/// `D(-π/2) · exp(iφ F_z) · D(π/2)`: a phase imprinted on the longitudinal
/// `m_x` components, expressed in the transverse `m_z` basis.
pub fn longitudinal_phase(phi: f64) -> SpinOperator {
    let convention = RotationConvention::AXIS_SWITCH;
    let back = convention.rotation(-FRAC_PI_2).expect("finite angle");
    let fwd = convention.rotation(FRAC_PI_2).expect("finite angle");
    back * exp_i_theta(&f_z(), phi) * fwd
}

fn factorial(n: i32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Clebsch-Gordan coefficient `⟨1 m1; 1 m2 | F M⟩` (Condon-Shortley phases).
pub fn clebsch_gordan_11(m1: i32, m2: i32, total: i32, m_total: i32) -> Result<f64> {
    index_of(m1)?;
    index_of(m2)?;
    if !(0..=2).contains(&total) {
        return Err(Error::invalid(format!("F = {total} not in 0..=2")));
    }
    if m_total.abs() > total {
        return Err(Error::invalid(format!("M = {m_total} outside [-{total}, {total}]")));
    }
    if m1 + m2 != m_total {
        return Ok(0.0);
    }

    // Racah's closed form with j1 = j2 = 1.
    let (j1, j2, j) = (1, 1, total);
    let prefactor = ((2 * j + 1) as f64 * factorial(j1 + j2 - j) * factorial(j1 - j2 + j)
        * factorial(-j1 + j2 + j)
        / factorial(j1 + j2 + j + 1))
    .sqrt()
        * (factorial(j + m_total)
            * factorial(j - m_total)
            * factorial(j1 - m1)
            * factorial(j1 + m1)
            * factorial(j2 - m2)
            * factorial(j2 + m2))
        .sqrt();

    let sum: f64 = (0..=j1 + j2 + j)
        .filter_map(|k| {
            let args = [
                k,
                j1 + j2 - j - k,
                j1 - m1 - k,
                j2 + m2 - k,
                j - j2 + m1 + k,
                j - j1 - m2 + k,
            ];
            if args.iter().any(|&a| a < 0) {
                return None;
            }
            let denom: f64 = args.iter().map(|&a| factorial(a)).product();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            Some(sign / denom)
        })
        .sum();

    Ok(prefactor * sum)
}

/// Beam and magnet parameters of one phase object, SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalBeamParams {
    /// Longitudinal momentum, kg·m/s.
    pub p0: f64,
    /// Atomic mass, kg.
    pub atom_mass: f64,
    pub g_factor: f64,
    /// J/T.
    pub bohr_magneton: f64,
    /// J·s.
    pub hbar: f64,
    /// ∫B dx over the phase-object zone, T·m.
    pub field_integral: f64,
}

impl PhysicalBeamParams {
    pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
    pub const HBAR: f64 = 1.054_571_817e-34;

    pub fn validate(&self) -> Result<()> {
        if !(self.p0.is_finite() && self.p0 > 0.0) {
            return Err(Error::invalid(format!("p0 must be positive, got {}", self.p0)));
        }
        if !(self.atom_mass.is_finite() && self.atom_mass > 0.0) {
            return Err(Error::invalid(format!(
                "atom mass must be positive, got {}",
                self.atom_mass
            )));
        }
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return Err(Error::invalid(format!("hbar must be positive, got {}", self.hbar)));
        }
        Ok(())
    }

    /// Kinetic energy `p0² / 2m` of the longitudinal motion.
    pub fn longitudinal_energy(&self) -> f64 {
        self.p0 * self.p0 / (2.0 * self.atom_mass)
    }

    /// Zeeman displacement `Δx = m g μ_B ∫B dx / (2 E_x)`.
    pub fn displacement(&self) -> f64 {
        self.atom_mass * self.g_factor * self.bohr_magneton * self.field_integral
            / (2.0 * self.longitudinal_energy())
    }
}

/// Zeeman phase `φ = (p0/ħ) Δx` imprinted by a phase object.
pub fn zeeman_phase(params: &PhysicalBeamParams) -> Result<f64> {
    params.validate()?;
    Ok(params.p0 / params.hbar * params.displacement())
}
