//! Small dense complex matrix helpers shared by the physics modules.

use nalgebra::{Complex, DMatrix, SMatrix, SVector};

pub type C64 = Complex<f64>;
pub type Mat3 = SMatrix<C64, 3, 3>;
pub type Mat6 = SMatrix<C64, 6, 6>;
pub type Mat9 = SMatrix<C64, 9, 9>;
pub type Mat36 = SMatrix<C64, 36, 36>;
pub type Vec3 = SVector<C64, 3>;
pub type Vec9 = SVector<C64, 9>;
pub type Vec36 = SVector<C64, 36>;

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[inline]
pub fn im(x: f64) -> C64 {
    C64::new(0.0, x)
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff<const R: usize, const C: usize>(
    a: &SMatrix<C64, R, C>,
    b: &SMatrix<C64, R, C>,
) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest entrywise modulus of `m - m†`.
pub fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let h = (m + m.adjoint()).scale(0.5);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn to_dynamic<const N: usize>(m: &SMatrix<C64, N, N>) -> DMatrix<C64> {
    DMatrix::from_iterator(N, N, m.iter().copied())
}

/// `A B - B A`.
pub fn commutator<const N: usize>(a: &SMatrix<C64, N, N>, b: &SMatrix<C64, N, N>) -> SMatrix<C64, N, N> {
    a * b - b * a
}

/// `Tr(ρ²)` for Hermitian `ρ`, computed as the squared Frobenius norm.
pub fn purity_of<const N: usize>(rho: &SMatrix<C64, N, N>) -> f64 {
    rho.iter().map(|z| z.norm_sqr()).sum()
}

pub fn trace_re<const N: usize>(m: &SMatrix<C64, N, N>) -> f64 {
    (0..N).map(|i| m[(i, i)].re).sum()
}

pub fn outer<const N: usize>(a: &SVector<C64, N>, b: &SVector<C64, N>) -> SMatrix<C64, N, N> {
    a * b.adjoint()
}
