//! Spectral resolution of a density matrix with a deterministic eigenbasis.

use crate::linalg::{hermitian_eigen, Mat4, Vec4, C64};
use crate::state::{DensityMatrix, PureState};

/// Eigenvalues closer than this are treated as one degenerate block.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Eigenvalues in non-increasing order with an orthonormal eigenbasis.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: [f64; 4],
    pub eigenvectors: [PureState; 4],
}

impl SpectralDecomposition {
    /// Σ λ_i |ψ_i⟩⟨ψ_i|.
    pub fn reassemble(&self) -> Mat4 {
        self.eigenvalues
            .iter()
            .zip(self.eigenvectors.iter())
            .fold(Mat4::zeros(), |acc, (l, v)| acc + v.projector().scale(*l))
    }

    /// Projector onto the span of the top `k` eigenvectors.
    pub fn nested_projector(&self, k: usize) -> Mat4 {
        self.eigenvectors[..k]
            .iter()
            .fold(Mat4::zeros(), |acc, v| acc + v.projector())
    }
}

/// Diagonalizes `rho`.
///
/// Within a degenerate block (gaps below [`DEGENERACY_TOL`]) the basis is
/// rebuilt from the block projector applied to the product basis, greedily
/// taking the largest residual. Every eigenvector is then rotated so that its
/// largest-magnitude amplitude is real and positive, and block members are
/// ordered by the index of that amplitude.
pub fn eig_hermitian(rho: &DensityMatrix) -> SpectralDecomposition {
    let (values, vectors) = hermitian_eigen(rho.matrix());
    let mut out: Vec<Vec4> = Vec::with_capacity(4);
    let mut start = 0;
    while start < 4 {
        let mut end = start + 1;
        while end < 4 && values[end - 1] - values[end] < DEGENERACY_TOL {
            end += 1;
        }
        if end - start == 1 {
            out.push(orient(vectors[start]));
        } else {
            let projector = vectors[start..end]
                .iter()
                .fold(Mat4::zeros(), |acc, v| acc + v * v.adjoint());
            let mut block = block_basis(&projector, end - start);
            block.sort_by_key(|v| dominant_index(v));
            out.extend(block);
        }
        start = end;
    }
    let eigenvalues = values;
    let eigenvectors = [0, 1, 2, 3].map(|k| PureState::from_normalized_unchecked(out[k]));
    SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

fn block_basis(projector: &Mat4, rank: usize) -> Vec<Vec4> {
    let mut basis: Vec<Vec4> = Vec::with_capacity(rank);
    for _ in 0..rank {
        let mut best: Option<(f64, Vec4)> = None;
        for j in 0..4 {
            let mut w = projector.column(j).into_owned();
            for u in &basis {
                let overlap = u.dotc(&w);
                w -= u * overlap;
            }
            let n = w.norm();
            if best.as_ref().is_none_or(|(bn, _)| n > bn + 1e-12) {
                best = Some((n, w));
            }
        }
        let (n, w) = best.expect("four candidates");
        basis.push(orient(w.unscale(n)));
    }
    basis
}

fn dominant_index(v: &Vec4) -> usize {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    v.iter()
        .position(|z| z.norm() >= max - 1e-12)
        .unwrap_or(0)
}

fn orient(v: Vec4) -> Vec4 {
    let k = dominant_index(&v);
    let a = v[k];
    let n = a.norm();
    if n == 0.0 {
        return v;
    }
    let phase = C64::new(a.re / n, -a.im / n);
    let mut w = v * phase;
    w[k] = C64::new(w[k].re, 0.0);
    w
}
