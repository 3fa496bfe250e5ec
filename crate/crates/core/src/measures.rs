//! Pure-state concurrence, Wootters concurrence and negativity.

use std::collections::VecDeque;

use crate::linalg::{hermitian_eigen, hermitian_eigenvalues, spin_flip, Mat4, Vec4, C64};
use crate::state::{ComplexMatrix4, DensityMatrix, PureState};

/// Symmetric bilinear form with `Q(ψ, ψ) = 2(α↑↑α↓↓ − α↑↓α↓↑)`.
pub fn concurrence_form(u: &Vec4, v: &Vec4) -> C64 {
    u[0] * v[3] + u[3] * v[0] - u[1] * v[2] - u[2] * v[1]
}

/// 2|α↑↑α↓↓ − α↑↓α↓↑|, clamped to [0, 1].
pub fn pure_entanglement(psi: &PureState) -> f64 {
    let a = psi.amplitudes();
    (2.0 * (a[0] * a[3] - a[1] * a[2]).norm()).min(1.0)
}

/// Eigenvalues of ρ below this are round-off and are dropped before taking
/// square roots in [`wootters_concurrence`].
pub const ROUNDOFF_EIGENVALUE: f64 = 1e-14;

/// Wootters concurrence `max(0, s1 − s2 − s3 − s4)`, where `s_i` are the
/// square roots of the eigenvalues of ρ(σy⊗σy)ρ*(σy⊗σy) in decreasing order.
///
/// The `s_i` are computed as the singular values of τ_ij = w_iᵀ(σy⊗σy)w_j
/// with w_i = √λ_i v_i from the spectral decomposition of ρ.
pub fn wootters_concurrence(rho: &DensityMatrix) -> f64 {
    let (values, vectors) = hermitian_eigen(rho.matrix());
    let flip = spin_flip();
    let w: Vec<Vec4> = values
        .iter()
        .zip(&vectors)
        .map(|(l, v)| {
            let l = if *l > ROUNDOFF_EIGENVALUE { *l } else { 0.0 };
            v.scale(l.sqrt())
        })
        .collect();
    let tau = Mat4::from_fn(|i, j| (w[i].transpose() * flip * w[j])[(0, 0)]);
    let mut s: Vec<f64> = tau.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    (s[0] - s[1] - s[2] - s[3]).clamp(0.0, 1.0)
}

/// Which tensor factor to transpose.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Transposes the indices of one tensor factor:
/// ⟨ij|ρ^{T_B}|kl⟩ = ⟨il|ρ|kj⟩ and ⟨ij|ρ^{T_A}|kl⟩ = ⟨kj|ρ|il⟩.
pub fn partial_transpose(rho: &DensityMatrix, subsystem: Subsystem) -> ComplexMatrix4 {
    ComplexMatrix4::new(partial_transpose_matrix(rho.matrix(), subsystem))
        .expect("entries of a valid density matrix are finite")
}

pub fn partial_transpose_matrix(m: &Mat4, subsystem: Subsystem) -> Mat4 {
    Mat4::from_fn(|row, col| {
        let (i, j) = (row / 2, row % 2);
        let (k, l) = (col / 2, col % 2);
        match subsystem {
            Subsystem::Second => m[(2 * i + l, 2 * k + j)],
            Subsystem::First => m[(2 * k + j, 2 * i + l)],
        }
    })
}

/// `max(0, −2 Σ negative eigenvalues of ρ^{T_B})`, normalized so a Bell
/// state has negativity 1.
pub fn negativity(rho: &DensityMatrix) -> f64 {
    let pt = partial_transpose_matrix(rho.matrix(), Subsystem::Second);
    let negative: f64 = hermitian_eigenvalues(&pt)
        .iter()
        .filter(|l| **l < 0.0)
        .sum();
    (-2.0 * negative).max(0.0)
}

/// A pair of ensemble members with nearly equal negativity and clearly
/// different concurrence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NonMonotonePair {
    pub first: usize,
    pub second: usize,
    pub negativity_gap: f64,
    pub concurrence_gap: f64,
}

/// Finds the pair with the largest concurrence gap among all pairs whose
/// negativities differ by less than `max_negativity_gap`, provided that gap
/// exceeds `min_concurrence_gap`. Rows are `(concurrence, negativity)`.
///
/// Sorts by negativity and slides a window holding the rows within the gap,
/// with monotone queues for the window's concurrence extremes.
pub fn find_non_monotone_pair(
    rows: &[(f64, f64)],
    max_negativity_gap: f64,
    min_concurrence_gap: f64,
) -> Option<NonMonotonePair> {
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| rows[a].1.total_cmp(&rows[b].1));
    let conc = |p: usize| rows[order[p]].0;
    let neg = |p: usize| rows[order[p]].1;
    let mut hi: VecDeque<usize> = VecDeque::new();
    let mut lo: VecDeque<usize> = VecDeque::new();
    let mut left = 0;
    let mut best: Option<NonMonotonePair> = None;
    for right in 0..order.len() {
        while neg(right) - neg(left) >= max_negativity_gap {
            left += 1;
        }
        while hi.front().is_some_and(|&p| p < left) {
            hi.pop_front();
        }
        while lo.front().is_some_and(|&p| p < left) {
            lo.pop_front();
        }
        let c = conc(right);
        for &other in [hi.front(), lo.front()].into_iter().flatten() {
            let dc = (c - conc(other)).abs();
            if dc > min_concurrence_gap && best.is_none_or(|p| dc > p.concurrence_gap) {
                let (a, b) = (order[other], order[right]);
                best = Some(NonMonotonePair {
                    first: a.min(b),
                    second: a.max(b),
                    negativity_gap: neg(right) - neg(other),
                    concurrence_gap: dc,
                });
            }
        }
        while hi.back().is_some_and(|&p| conc(p) <= c) {
            hi.pop_back();
        }
        hi.push_back(right);
        while lo.back().is_some_and(|&p| conc(p) >= c) {
            lo.pop_back();
        }
        lo.push_back(right);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, ZERO};

    fn state(v: [f64; 4]) -> PureState {
        PureState::normalize(Vec4::new(c(v[0], 0.0), c(v[1], 0.0), c(v[2], 0.0), c(v[3], 0.0)))
            .unwrap()
    }

    fn werner(eps: f64) -> DensityMatrix {
        let bell = PureState::bell_phi_plus();
        DensityMatrix::new(Mat4::identity().scale((1.0 - eps) / 4.0) + bell.projector().scale(eps))
            .unwrap()
    }

    #[test]
    fn pure_entanglement_examples() {
        assert!((pure_entanglement(&PureState::bell_phi_plus()) - 1.0).abs() < 1e-15);
        assert_eq!(pure_entanglement(&PureState::basis(1)), 0.0);
        let t = std::f64::consts::PI / 8.0;
        let psi = state([t.cos(), 0.0, 0.0, t.sin()]);
        assert!((pure_entanglement(&psi) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn concurrence_examples() {
        let bell = DensityMatrix::from_pure(&PureState::bell_phi_plus());
        assert!((wootters_concurrence(&bell) - 1.0).abs() < 1e-9);
        assert!(wootters_concurrence(&DensityMatrix::maximally_mixed()) < 1e-12);
        assert!((wootters_concurrence(&werner(0.5)) - 0.25).abs() < 1e-9);
    }

    #[test]
    fn negativity_examples() {
        let bell = DensityMatrix::from_pure(&PureState::bell_phi_plus());
        assert!((negativity(&bell) - 1.0).abs() < 1e-12);
        assert_eq!(negativity(&DensityMatrix::maximally_mixed()), 0.0);
        assert!((negativity(&werner(0.5)) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn partial_transpose_examples() {
        let diag = DensityMatrix::new(Mat4::from_diagonal(&Vec4::new(
            c(0.1, 0.0),
            c(0.2, 0.0),
            c(0.3, 0.0),
            c(0.4, 0.0),
        )))
        .unwrap();
        assert_eq!(partial_transpose(&diag, Subsystem::Second).matrix(), diag.matrix());
        assert_eq!(partial_transpose(&diag, Subsystem::First).matrix(), diag.matrix());

        let bell = DensityMatrix::from_pure(&PureState::bell_phi_plus());
        let pt = partial_transpose(&bell, Subsystem::Second);
        let ev = hermitian_eigenvalues(pt.matrix());
        assert!((ev[3] + 0.5).abs() < 1e-12);
        assert!(ev[..3].iter().all(|l| (l - 0.5).abs() < 1e-12));
        assert!((pt.trace() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn partial_transpose_is_involutive() {
        let m = Mat4::from_fn(|r, k| c((r * 4 + k) as f64, (r as f64) - (k as f64)));
        for sub in [Subsystem::First, Subsystem::Second] {
            assert_eq!(partial_transpose_matrix(&partial_transpose_matrix(&m, sub), sub), m);
        }
        let full = partial_transpose_matrix(&partial_transpose_matrix(&m, Subsystem::First), Subsystem::Second);
        assert_eq!(full, m.transpose());
    }

    #[test]
    fn concurrence_form_is_symmetric() {
        let u = Vec4::new(c(1.0, 2.0), c(0.5, -1.0), ZERO, c(0.0, 3.0));
        let v = Vec4::new(c(-1.0, 0.0), c(2.0, 2.0), c(1.0, 1.0), c(0.3, 0.0));
        assert!((concurrence_form(&u, &v) - concurrence_form(&v, &u)).norm() < 1e-15);
    }

    #[test]
    fn pair_search() {
        let rows = [(0.0, 0.0), (0.3, 0.1), (0.2, 0.1005), (0.5, 0.5)];
        let pair = find_non_monotone_pair(&rows, 1e-3, 0.05).unwrap();
        assert_eq!((pair.first, pair.second), (1, 2));
        assert!(find_non_monotone_pair(&rows, 1e-3, 0.2).is_none());
    }

    #[test]
    fn pair_search_matches_exhaustive_scan() {
        use rand::Rng;
        let mut rng = crate::random::rng_from_seed(9);
        for _ in 0..50 {
            let rows: Vec<(f64, f64)> = (0..200)
                .map(|_| {
                    let n: f64 = if rng.random::<f64>() < 0.4 { 0.0 } else { rng.random::<f64>() * 0.3 };
                    (n + rng.random::<f64>() * 0.2, n)
                })
                .collect();
            let mut best: f64 = 0.0;
            for i in 0..rows.len() {
                for j in i + 1..rows.len() {
                    if (rows[i].1 - rows[j].1).abs() < 1e-2 {
                        best = best.max((rows[i].0 - rows[j].0).abs());
                    }
                }
            }
            let found = find_non_monotone_pair(&rows, 1e-2, 0.0).unwrap();
            assert!((found.concurrence_gap - best).abs() < 1e-15);
            let (a, b) = (rows[found.first], rows[found.second]);
            assert!((a.1 - b.1).abs() < 1e-2 && ((a.0 - b.0).abs() - best).abs() < 1e-15);
        }
    }
}
