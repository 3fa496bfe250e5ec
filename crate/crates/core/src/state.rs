//! Validated two-qubit states.

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigenvalues, hermitian_part, hermiticity_residual, kron, Mat2, Mat4, Vec4, C64, ONE,
    ZERO,
};

/// Entrywise Hermiticity tolerance.
pub const HERMITIAN_TOL: f64 = 1e-9;
/// Trace tolerance.
pub const TRACE_TOL: f64 = 1e-9;
/// Smallest admissible eigenvalue is `-POSITIVITY_TOL`.
pub const POSITIVITY_TOL: f64 = 1e-9;
/// Pure-state normalization tolerance.
pub const NORM_TOL: f64 = 1e-12;

/// A 4×4 complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix4(Mat4);

impl ComplexMatrix4 {
    pub fn new(m: Mat4) -> Result<Self> {
        check_finite(&m)?;
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    pub fn into_inner(self) -> Mat4 {
        self.0
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }
}

fn check_finite(m: &Mat4) -> Result<()> {
    for row in 0..4 {
        for col in 0..4 {
            let z = m[(row, col)];
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite { row, col });
            }
        }
    }
    Ok(())
}

/// A two-qubit density matrix: Hermitian, unit trace, positive semidefinite.
///
/// The stored matrix is the Hermitian part of the validated input, so
/// downstream code can rely on exact Hermiticity.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: Mat4,
}

impl DensityMatrix {
    pub fn new(m: Mat4) -> Result<Self> {
        check_finite(&m)?;
        let residual = hermiticity_residual(&m);
        if residual > HERMITIAN_TOL {
            return Err(Error::NotHermitian {
                residual,
                tolerance: HERMITIAN_TOL,
            });
        }
        let trace_residual = (m.trace() - ONE).norm();
        if trace_residual > TRACE_TOL {
            return Err(Error::TraceNotOne {
                residual: trace_residual,
                tolerance: TRACE_TOL,
            });
        }
        let matrix = hermitian_part(&m);
        let min_eigenvalue = hermitian_eigenvalues(&matrix)[3];
        if min_eigenvalue < -POSITIVITY_TOL {
            return Err(Error::NotPositive {
                min_eigenvalue,
                tolerance: POSITIVITY_TOL,
            });
        }
        Ok(Self { matrix })
    }

    /// Projector onto a pure state.
    pub fn from_pure(psi: &PureState) -> Self {
        let v = psi.amplitudes();
        Self {
            matrix: hermitian_part(&(v * v.adjoint())),
        }
    }

    pub fn maximally_mixed() -> Self {
        Self {
            matrix: Mat4::identity().scale(0.25),
        }
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.matrix
    }

    /// `U ρ U†` for a unitary `U`. Unitarity is the caller's responsibility.
    pub fn conjugate(&self, u: &Mat4) -> Self {
        Self {
            matrix: hermitian_part(&(u * self.matrix * u.adjoint())),
        }
    }

    /// `(U1 ⊗ U2) ρ (U1 ⊗ U2)†`.
    pub fn local_conjugate(&self, u1: &Mat2, u2: &Mat2) -> Self {
        self.conjugate(&kron(u1, u2))
    }
}

/// A normalized two-qubit pure state with amplitudes
/// (α↑↑, α↑↓, α↓↑, α↓↓).
#[derive(Clone, Debug, PartialEq)]
pub struct PureState(Vec4);

impl PureState {
    /// Accepts `v` only if it is already normalized within [`NORM_TOL`].
    pub fn new(v: Vec4) -> Result<Self> {
        if v.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NotNormalized { residual: f64::NAN });
        }
        let residual = (v.norm() - 1.0).abs();
        if residual > NORM_TOL {
            return Err(Error::NotNormalized { residual });
        }
        Ok(Self(v))
    }

    /// Normalizes `v`; fails if it is zero or non-finite.
    pub fn normalize(v: Vec4) -> Result<Self> {
        let n = v.norm();
        if !n.is_finite() || n < 1e-300 {
            return Err(Error::NotNormalized { residual: f64::NAN });
        }
        Ok(Self(v.unscale(n)))
    }

    pub(crate) fn from_normalized_unchecked(v: Vec4) -> Self {
        Self(v)
    }

    /// Product basis state |ij⟩ with `index = 2 * i + j`.
    pub fn basis(index: usize) -> Self {
        let mut v = Vec4::zeros();
        v[index] = ONE;
        Self(v)
    }

    /// (|↑↑⟩ + |↓↓⟩)/√2.
    pub fn bell_phi_plus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self(Vec4::new(C64::new(s, 0.0), ZERO, ZERO, C64::new(s, 0.0)))
    }

    pub fn amplitudes(&self) -> &Vec4 {
        &self.0
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &PureState) -> C64 {
        self.0.dotc(&other.0)
    }

    /// `U |ψ⟩`, renormalized to absorb rounding.
    pub fn apply(&self, u: &Mat4) -> Self {
        let v = u * self.0;
        let n = v.norm();
        Self(v.unscale(n))
    }

    pub fn projector(&self) -> Mat4 {
        self.0 * self.0.adjoint()
    }
}
