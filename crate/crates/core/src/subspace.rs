//! Canonical form of two-dimensional subspaces under local operations.
//!
//! Every 2-D subspace of the two-qubit space contains a product state. A local
//! unitary maps that product state to |↑↑⟩ and, after fixing phases with local
//! z-rotations, maps its orthogonal partner in the subspace to (0, x, y, z)
//! with x, y, z ≥ 0. The qubits are exchanged when needed so that x ≥ y.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::linalg::{
    arg_or_zero, c, kron, swap_matrix, unitary_to_up, z_phase, Mat2, Mat4, Vec2, Vec4, C64, ONE,
    ZERO,
};
use crate::measures::concurrence_form;
use crate::state::PureState;

const ORTHO_TOL: f64 = 1e-9;
const SUBSPACE_TOL: f64 = 1e-9;

/// A 2-D subspace given by an orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace2 {
    basis: [PureState; 2],
}

impl Subspace2 {
    pub fn new(b1: PureState, b2: PureState) -> Result<Self> {
        let residual = b1.inner(&b2).norm();
        if residual > ORTHO_TOL {
            return Err(Error::NotOrthonormal { residual });
        }
        Ok(Self { basis: [b1, b2] })
    }

    /// Orthonormalizes two linearly independent vectors.
    pub fn spanned_by(v1: &Vec4, v2: &Vec4) -> Result<Self> {
        let b1 = PureState::normalize(*v1)?;
        let overlap = b1.amplitudes().dotc(v2);
        let b2 = PureState::normalize(v2 - b1.amplitudes() * overlap)?;
        Self::new(b1, b2)
    }

    pub fn basis(&self) -> &[PureState; 2] {
        &self.basis
    }

    /// Norm of the component of `psi` outside the subspace.
    pub fn residual(&self, psi: &PureState) -> f64 {
        let v = psi.amplitudes();
        let p = self.basis.iter().fold(Vec4::zeros(), |acc, b| {
            acc + b.amplitudes() * b.amplitudes().dotc(v)
        });
        (v - p).norm()
    }
}

/// Product states inside a 2-D subspace.
#[derive(Clone, Debug, PartialEq)]
pub enum SeparableStates {
    /// Every state in the subspace is a product state.
    All,
    /// One or two product states (up to phase).
    States(Vec<PureState>),
}

/// Solves c1²Q(b1,b1) + 2c1c2Q(b1,b2) + c2²Q(b2,b2) = 0 for the product
/// states of the span. Roots are returned ordered by the principal argument
/// of c1/c2 (a root with c2 = 0 last).
pub fn find_separable_states(s: &Subspace2) -> SeparableStates {
    let [b1, b2] = &s.basis;
    let (u, v) = (b1.amplitudes(), b2.amplitudes());
    let qa = concurrence_form(u, u);
    let qb = concurrence_form(u, v);
    let qc = concurrence_form(v, v);
    let scale = qa.norm().max(qb.norm()).max(qc.norm());
    if scale < 1e-12 {
        return SeparableStates::All;
    }

    let disc = (qb * qb - qa * qc).sqrt();
    let q = if (qb + disc).norm() >= (qb - disc).norm() {
        -(qb + disc)
    } else {
        -(qb - disc)
    };
    // Homogeneous roots (c1, c2).
    let pairs: Vec<(C64, C64)> = if q.norm() < 1e-15 * scale {
        // Double root at the separable basis vector.
        if qa.norm() >= qc.norm() {
            vec![(ZERO, ONE)]
        } else {
            vec![(ONE, ZERO)]
        }
    } else if qa.norm() >= qc.norm() {
        vec![(q, qa), (qc, q)]
    } else {
        vec![(qc, q), (q, qa)]
    };

    let mut roots: Vec<(f64, f64, PureState)> = Vec::new();
    for (c1, c2) in pairs {
        let n = (c1.norm_sqr() + c2.norm_sqr()).sqrt();
        if n == 0.0 {
            continue;
        }
        let (c1, c2) = (c1 / n, c2 / n);
        let Ok(psi) = PureState::normalize(u * c1 + v * c2) else {
            continue;
        };
        if roots
            .iter()
            .any(|(_, _, r)| r.inner(&psi).norm() > 1.0 - 1e-9)
        {
            continue;
        }
        let (arg, modulus) = if c2.norm() < 1e-14 {
            (f64::INFINITY, f64::INFINITY)
        } else {
            let t = c1 / c2;
            (t.arg(), t.norm())
        };
        roots.push((arg, modulus, psi));
    }
    roots.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    SeparableStates::States(roots.into_iter().map(|r| r.2).collect())
}

/// Canonical parameters (x, y, z) of a 2-D subspace together with the
/// transformation that realizes them.
///
/// The transformation is `T = (V1 ⊗ V2) · SWAP^e` with `e = qubit_exchange`.
/// It maps `chi[0]` to (1, 0, 0, 0) and `chi[1]` to (0, x, y, z); `chi` is an
/// orthonormal basis of the original subspace, with phases fixed accordingly.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceCanonicalForm {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub local_ops: (Mat2, Mat2),
    pub qubit_exchange: bool,
    chi: [PureState; 2],
}

impl SubspaceCanonicalForm {
    /// A subspace already in canonical form; `T` is the identity.
    pub fn from_xy(x: f64, y: f64) -> Result<Self> {
        let (x, y, z) = canonical_xyz(x, y)?;
        let chi = [
            PureState::basis(0),
            PureState::from_normalized_unchecked(Vec4::new(ZERO, c(x, 0.0), c(y, 0.0), c(z, 0.0))),
        ];
        Ok(Self {
            x,
            y,
            z,
            local_ops: (Mat2::identity(), Mat2::identity()),
            qubit_exchange: false,
            chi,
        })
    }

    pub fn transform_matrix(&self) -> Mat4 {
        let local = kron(&self.local_ops.0, &self.local_ops.1);
        if self.qubit_exchange {
            local * swap_matrix()
        } else {
            local
        }
    }

    /// Maps a state from the original frame into the canonical frame.
    pub fn to_canonical(&self, psi: &PureState) -> PureState {
        psi.apply(&self.transform_matrix())
    }

    /// Maps a state from the canonical frame back to the original frame.
    pub fn from_canonical(&self, psi: &PureState) -> PureState {
        psi.apply(&self.transform_matrix().adjoint())
    }

    /// ((1,0,0,0), (0,x,y,z)).
    pub fn canonical_basis(&self) -> (PureState, PureState) {
        canonical_pair(self.x, self.y, self.z)
    }

    /// Original-frame basis mapped onto the canonical basis by `T`.
    pub fn original_basis(&self) -> &[PureState; 2] {
        &self.chi
    }

    /// True when every state of the subspace is separable (x = 1).
    pub fn is_all_separable(&self) -> bool {
        self.y * self.y + self.z * self.z < 1e-12
    }
}

fn canonical_xyz(x: f64, y: f64) -> Result<(f64, f64, f64)> {
    if !(x.is_finite() && y.is_finite()) || x < 0.0 || y < 0.0 {
        return Err(Error::InvalidParameter {
            name: "x, y",
            reason: format!("need finite x, y >= 0, got ({x}, {y})"),
        });
    }
    let s = x * x + y * y;
    if s > 1.0 + 1e-12 {
        return Err(Error::InvalidParameter {
            name: "x, y",
            reason: format!("x^2 + y^2 = {s} exceeds 1"),
        });
    }
    Ok((x, y, (1.0 - s).max(0.0).sqrt()))
}

fn canonical_pair(x: f64, y: f64, z: f64) -> (PureState, PureState) {
    (
        PureState::basis(0),
        PureState::from_normalized_unchecked(Vec4::new(ZERO, c(x, 0.0), c(y, 0.0), c(z, 0.0))),
    )
}

/// Factors a product state as `a ⊗ b` with unit-norm factors.
pub fn product_factors(psi: &PureState) -> (Vec2, Vec2) {
    let v = psi.amplitudes();
    let rows = [Vec2::new(v[0], v[1]), Vec2::new(v[2], v[3])];
    let k = if rows[0].norm() >= rows[1].norm() { 0 } else { 1 };
    let b = rows[k].unscale(rows[k].norm());
    let a = Vec2::new(b.dotc(&rows[0]), b.dotc(&rows[1]));
    (a.unscale(a.norm()), b)
}

/// Brings a 2-D subspace into canonical form.
///
/// When two product states exist, the one with the larger overlap with the
/// first basis vector becomes |↑↑⟩ (ties fall back to the root order of
/// [`find_separable_states`]). The resulting (x, y, z) do not depend on that
/// choice; the transformation does, and keying it to the first basis vector
/// keeps it covariant under local unitaries.
pub fn canonicalize(s: &Subspace2) -> SubspaceCanonicalForm {
    let [b1, b2] = &s.basis;
    let chi1 = match find_separable_states(s) {
        SeparableStates::All => b1.clone(),
        SeparableStates::States(roots) => {
            let mut best = &roots[0];
            for r in &roots[1..] {
                if r.inner(b1).norm() > best.inner(b1).norm() + 1e-12 {
                    best = r;
                }
            }
            best.clone()
        }
    };
    let other = if chi1.inner(b1).norm() <= chi1.inner(b2).norm() {
        b1
    } else {
        b2
    };
    let overlap = chi1.inner(other);
    let chi2 = PureState::normalize(other.amplitudes() - chi1.amplitudes() * overlap)
        .expect("basis vectors are independent");

    let (a, b) = product_factors(&chi1);
    let (u1, u2) = (unitary_to_up(&a), unitary_to_up(&b));
    let rotated = kron(&u1, &u2) * chi2.amplitudes();
    let (mut p, mut q, r) = (rotated[1], rotated[2], rotated[3]);
    let qubit_exchange = p.norm() < q.norm();
    if qubit_exchange {
        std::mem::swap(&mut p, &mut q);
    }

    // Local z-rotations diag(e^{iα}, e^{-iα}) ⊗ diag(e^{iβ}, e^{-iβ}) and a
    // phase g on the second vector make p, q, r real and non-negative.
    let (ap, aq, ar) = (arg_or_zero(p), arg_or_zero(q), arg_or_zero(r));
    let g = -(ap + aq) / 2.0;
    let diff = (aq - ap) / 2.0;
    let sum = ar + g;
    let alpha = (diff + sum) / 2.0;
    let beta = (sum - diff) / 2.0;

    let (w1, w2) = if qubit_exchange { (u2, u1) } else { (u1, u2) };
    let local_ops = (z_phase(alpha) * w1, z_phase(beta) * w2);
    let x = p.norm();
    let y = q.norm();
    let z = (1.0 - x * x - y * y).max(0.0).sqrt();
    let chi = [
        PureState::from_normalized_unchecked(chi1.amplitudes() * C64::from_polar(1.0, -(alpha + beta))),
        PureState::from_normalized_unchecked(chi2.amplitudes() * C64::from_polar(1.0, g)),
    ];
    SubspaceCanonicalForm {
        x,
        y,
        z,
        local_ops,
        qubit_exchange,
        chi,
    }
}

/// Canonical basis of the orthogonal complement of span{(1,0,0,0), (0,x,y,z)}:
/// χ1ᶜ = (0, 0, z, −y)/√(y²+z²) and
/// χ2ᶜ = (0, √(y²+z²), −xy/√(y²+z²), −xz/√(y²+z²)).
pub fn complement_basis(form: &SubspaceCanonicalForm) -> Result<(PureState, PureState)> {
    complement_basis_xyz(form.x, form.y, form.z)
}

pub fn complement_basis_xyz(x: f64, y: f64, z: f64) -> Result<(PureState, PureState)> {
    let norm_sq = y * y + z * z;
    if norm_sq < 1e-12 {
        return Err(Error::DegenerateComplement { norm_sq });
    }
    let n = norm_sq.sqrt();
    let c1 = Vec4::new(ZERO, ZERO, c(z / n, 0.0), c(-y / n, 0.0));
    let c2 = Vec4::new(ZERO, c(n, 0.0), c(-x * y / n, 0.0), c(-x * z / n, 0.0));
    Ok((PureState::normalize(c1)?, PureState::normalize(c2)?))
}

/// Like [`complement_basis_xyz`], but falls back to Gram–Schmidt on the
/// product basis when the closed form degenerates.
pub fn complement_basis_or_fallback(x: f64, y: f64, z: f64) -> (PureState, PureState) {
    if let Ok(pair) = complement_basis_xyz(x, y, z) {
        return pair;
    }
    let (chi1, chi2) = canonical_pair(x, y, z);
    let mut found: Vec<Vec4> = vec![*chi1.amplitudes(), *chi2.amplitudes()];
    for k in [2, 3, 1, 0] {
        let mut v = *PureState::basis(k).amplitudes();
        for u in &found {
            let o = u.dotc(&v);
            v -= u * o;
        }
        let n = v.norm();
        if n > 0.5 {
            found.push(v.unscale(n));
        }
        if found.len() == 4 {
            break;
        }
    }
    (
        PureState::from_normalized_unchecked(found[2]),
        PureState::from_normalized_unchecked(found[3]),
    )
}

/// Bloch-sphere angles of a state in a 2-D subspace:
/// |ψ⟩ ∝ χ1 cos(θ/2) e^{iφ/2} + χ2 sin(θ/2) e^{−iφ/2}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochAngles {
    /// In [0, π].
    pub theta: f64,
    /// In [0, 2π); 0 at the poles.
    pub phi: f64,
}

pub fn bloch_angles(psi: &PureState, basis: (&PureState, &PureState)) -> Result<BlochAngles> {
    let (chi1, chi2) = basis;
    let c1 = chi1.inner(psi);
    let c2 = chi2.inner(psi);
    let residual = (psi.amplitudes() - chi1.amplitudes() * c1 - chi2.amplitudes() * c2).norm();
    if residual > SUBSPACE_TOL {
        return Err(Error::NotInSubspace { residual });
    }
    let theta = 2.0 * c2.norm().atan2(c1.norm());
    let phi = if c1.norm() < 1e-12 || c2.norm() < 1e-12 {
        0.0
    } else {
        let p = (c1.arg() - c2.arg()).rem_euclid(TAU);
        if p >= TAU {
            0.0
        } else {
            p
        }
    };
    Ok(BlochAngles { theta, phi })
}

pub fn from_bloch_angles(angles: BlochAngles, basis: (&PureState, &PureState)) -> PureState {
    let (chi1, chi2) = basis;
    let h = angles.theta / 2.0;
    let v = chi1.amplitudes() * C64::from_polar(h.cos(), angles.phi / 2.0)
        + chi2.amplitudes() * C64::from_polar(h.sin(), -angles.phi / 2.0);
    PureState::normalize(v).expect("orthonormal basis")
}

/// The state orthogonal to `from_bloch_angles(angles, basis)` within the span.
pub fn bloch_antipode(angles: BlochAngles, basis: (&PureState, &PureState)) -> PureState {
    from_bloch_angles(
        BlochAngles {
            theta: PI - angles.theta,
            phi: angles.phi + PI,
        },
        basis,
    )
}
