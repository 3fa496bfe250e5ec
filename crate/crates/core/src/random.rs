//! Seeded random ensembles: Ginibre density matrices, Haar pure states and
//! Haar unitaries.
//!
//! Generators are explicit values; the `*_with` functions draw from a caller
//! supplied RNG and the seed-taking wrappers build a fresh [`ChaCha8Rng`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_part, Mat2, Mat4, Vec2, Vec4, C64};
use crate::state::{DensityMatrix, PureState};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex Gaussian with independent N(0, 1/2) real and imaginary parts.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `G G† / tr(G G†)` with `G` a 4×rank matrix of complex Gaussians.
pub fn random_density_matrix_with<R: Rng + ?Sized>(rng: &mut R, rank: usize) -> Result<DensityMatrix> {
    if !(1..=4).contains(&rank) {
        return Err(Error::InvalidRank(rank));
    }
    let mut m = Mat4::zeros();
    for _ in 0..rank {
        let g = Vec4::from_fn(|_, _| complex_gaussian(rng));
        m += g * g.adjoint();
    }
    let tr = m.trace().re;
    DensityMatrix::new(hermitian_part(&m.unscale(tr)))
}

pub fn random_density_matrix(rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_density_matrix_with(&mut rng_from_seed(seed), rank)
}

/// Uniformly distributed pure state (normalized isotropic Gaussian vector).
pub fn random_pure_state_with<R: Rng + ?Sized>(rng: &mut R) -> PureState {
    loop {
        let v = Vec4::from_fn(|_, _| complex_gaussian(rng));
        if let Ok(psi) = PureState::normalize(v) {
            return psi;
        }
    }
}

pub fn random_pure_state(seed: u64) -> PureState {
    random_pure_state_with(&mut rng_from_seed(seed))
}

/// Haar-random single-qubit unitary.
pub fn random_unitary2_with<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    let v = Vec2::new(complex_gaussian(rng), complex_gaussian(rng));
    let a = v.unscale(v.norm());
    let phase = C64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU);
    Mat2::new(a[0], -a[1].conj(), a[1], a[0].conj()) * phase
}

/// Haar-random 4×4 unitary from Gram–Schmidt on Gaussian columns.
pub fn random_unitary4_with<R: Rng + ?Sized>(rng: &mut R) -> Mat4 {
    let mut cols: Vec<Vec4> = Vec::with_capacity(4);
    while cols.len() < 4 {
        let mut v = Vec4::from_fn(|_, _| complex_gaussian(rng));
        for u in &cols {
            let overlap = u.dotc(&v);
            v -= u * overlap;
        }
        let n = v.norm();
        if n > 1e-8 {
            cols.push(v.unscale(n));
        }
    }
    Mat4::from_columns(&cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invalid_rank() {
        assert_eq!(random_density_matrix(0, 1), Err(Error::InvalidRank(0)));
        assert_eq!(random_density_matrix(5, 1), Err(Error::InvalidRank(5)));
    }

    #[test]
    fn rank_one_is_pure() {
        let rho = random_density_matrix(1, 3).unwrap();
        let m = rho.matrix();
        assert!((m * m - m).norm() < 1e-12);
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(random_density_matrix(4, 11), random_density_matrix(4, 11));
        assert_ne!(random_density_matrix(4, 11), random_density_matrix(4, 12));
        assert_eq!(random_pure_state(5), random_pure_state(5));
    }

    #[test]
    fn unitaries_are_unitary() {
        let mut rng = rng_from_seed(9);
        for _ in 0..100 {
            let u = random_unitary2_with(&mut rng);
            assert!((u * u.adjoint() - Mat2::identity()).norm() < 1e-12);
            let w = random_unitary4_with(&mut rng);
            assert!((w * w.adjoint() - Mat4::identity()).norm() < 1e-12);
        }
    }
}
