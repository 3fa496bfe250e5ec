//! Small fixed-size complex linear algebra used throughout the crate.
//!
//! The two-qubit product basis is ordered |↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩, so the
//! amplitude of |ij⟩ sits at index `2 * i + j`.

use nalgebra::{Matrix2, Matrix4, SymmetricEigen, Vector2, Vector4};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;
pub type Vec2 = Vector2<C64>;
pub type Vec4 = Vector4<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Kronecker product `a ⊗ b` of two single-qubit operators.
pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    Mat4::from_fn(|r, col| a[(r / 2, col / 2)] * b[(r % 2, col % 2)])
}

/// Tensor product of two single-qubit states.
pub fn kron_vec(a: &Vec2, b: &Vec2) -> Vec4 {
    Vec4::new(a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
}

/// Qubit exchange |ij⟩ → |ji⟩.
pub fn swap_matrix() -> Mat4 {
    let mut m = Mat4::zeros();
    m[(0, 0)] = ONE;
    m[(1, 2)] = ONE;
    m[(2, 1)] = ONE;
    m[(3, 3)] = ONE;
    m
}

/// σ_y ⊗ σ_y, the two-qubit spin-flip operator.
pub fn spin_flip() -> Mat4 {
    let mut m = Mat4::zeros();
    m[(0, 3)] = -ONE;
    m[(1, 2)] = ONE;
    m[(2, 1)] = ONE;
    m[(3, 0)] = -ONE;
    m
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &Mat4, b: &Mat4) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest entrywise modulus of `m - m†`.
pub fn hermiticity_residual(m: &Mat4) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// `(m + m†) / 2`.
pub fn hermitian_part(m: &Mat4) -> Mat4 {
    (m + m.adjoint()).scale(0.5)
}

/// Eigen-decomposition of a Hermitian 4×4 matrix with eigenvalues sorted in
/// non-increasing order. Only the Hermitian part of `m` is used.
pub fn hermitian_eigen(m: &Mat4) -> ([f64; 4], [Vec4; 4]) {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.map(|k| eig.eigenvalues[k]);
    let vectors = order.map(|k| eig.eigenvectors.column(k).into_owned());
    (values, vectors)
}

/// Eigenvalues only, non-increasing.
pub fn hermitian_eigenvalues(m: &Mat4) -> [f64; 4] {
    let ev = hermitian_part(m).symmetric_eigenvalues();
    let mut v = [ev[0], ev[1], ev[2], ev[3]];
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub fn hermitian_function(m: &Mat4, f: impl Fn(f64) -> f64) -> Mat4 {
    let (values, vectors) = hermitian_eigen(m);
    let mut out = Mat4::zeros();
    for (lambda, v) in values.iter().zip(vectors.iter()) {
        out += (v * v.adjoint()).scale(f(*lambda));
    }
    out
}

/// Single-qubit unitary whose first row is ⟨a|, so that `U |a⟩ = |↑⟩` for a
/// normalized `a`.
pub fn unitary_to_up(a: &Vec2) -> Mat2 {
    Mat2::new(a[0].conj(), a[1].conj(), -a[1], a[0])
}

/// diag(e^{iα}, e^{-iα}).
pub fn z_phase(alpha: f64) -> Mat2 {
    Mat2::new(C64::from_polar(1.0, alpha), ZERO, ZERO, C64::from_polar(1.0, -alpha))
}

/// Principal argument, treating amplitudes below `1e-14` as real positive.
pub fn arg_or_zero(z: C64) -> f64 {
    if z.norm() < 1e-14 {
        0.0
    } else {
        z.arg()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_matches_vector_product() {
        let a = Mat2::new(c(0.0, 1.0), c(2.0, 0.0), c(1.0, -1.0), c(0.5, 0.0));
        let b = Mat2::new(c(1.0, 0.0), c(0.0, -1.0), c(3.0, 0.0), c(0.0, 2.0));
        let u = Vec2::new(c(1.0, 2.0), c(-0.5, 0.0));
        let v = Vec2::new(c(0.0, 1.0), c(2.0, 1.0));
        let lhs = kron(&a, &b) * kron_vec(&u, &v);
        let rhs = kron_vec(&(a * u), &(b * v));
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn swap_exchanges_factors() {
        let u = Vec2::new(c(0.6, 0.0), c(0.0, 0.8));
        let v = Vec2::new(c(1.0, 0.0), ZERO);
        assert!((swap_matrix() * kron_vec(&u, &v) - kron_vec(&v, &u)).norm() < 1e-15);
    }

    #[test]
    fn unitary_to_up_maps_state_to_up() {
        let a = Vec2::new(c(0.6, 0.0), c(0.0, 0.8));
        let u = unitary_to_up(&a);
        let out = u * a;
        assert!((out[0] - ONE).norm() < 1e-15 && out[1].norm() < 1e-15);
        assert!((u * u.adjoint() - Mat2::identity()).norm() < 1e-15);
    }

    #[test]
    fn eigen_sorted_descending() {
        let m = Mat4::from_diagonal(&Vec4::new(c(0.1, 0.0), c(0.4, 0.0), c(0.2, 0.0), c(0.3, 0.0)));
        let (vals, _) = hermitian_eigen(&m);
        assert_eq!(vals, [0.4, 0.3, 0.2, 0.1]);
    }
}
