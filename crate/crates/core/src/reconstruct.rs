//! Rebuilding a state from its marker set, up to local unitaries.

use crate::compose::{extract_markers, MarkerAngles, MarkerSet};
use crate::error::{Error, Result};
use crate::linalg::{c, Mat4, Vec4};
use crate::measures::pure_entanglement;
use crate::spectral::{eig_hermitian, DEGENERACY_TOL};
use crate::state::{DensityMatrix, PureState};
use crate::subspace::{
    bloch_antipode, complement_basis_or_fallback, from_bloch_angles, BlochAngles,
};

/// Tolerance for the consistency between an entanglement marker and the
/// entanglement of the state its angles describe.
pub const CONSISTENCY_TOL: f64 = 1e-6;

fn infeasible(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InfeasibleMarkers {
        field,
        reason: reason.into(),
    }
}

/// Canonical (x, y, z) with x ≥ y from (E_max, E_cusp):
/// z² = E_cusp·E_max, xy = (E_max − E_cusp)/2, x² + y² = 1 − z².
pub fn invert_pi2(e_max: f64, e_cusp: f64) -> Result<(f64, f64, f64)> {
    if !(e_max.is_finite() && e_cusp.is_finite()) {
        return Err(infeasible("e_max", "non-finite marker"));
    }
    if !(-1e-12..=1.0 + 1e-12).contains(&e_max) {
        return Err(infeasible("e_max", format!("{e_max} outside [0, 1]")));
    }
    if e_cusp < -1e-12 || e_cusp > e_max + 1e-12 {
        return Err(infeasible("e_cusp", format!("{e_cusp} outside [0, e_max = {e_max}]")));
    }
    let (e_max, e_cusp) = (e_max.clamp(0.0, 1.0), e_cusp.clamp(0.0, e_max.clamp(0.0, 1.0)));
    let z2 = e_cusp * e_max;
    let xy = (e_max - e_cusp) / 2.0;
    let s = 1.0 - z2;
    let disc = s * s - 4.0 * xy * xy;
    if disc < -1e-12 {
        return Err(infeasible("e_cusp", format!("negative discriminant {disc}")));
    }
    let x = ((s + disc.max(0.0).sqrt()) / 2.0).sqrt();
    let y = if x > 0.0 { (xy / x).min(x) } else { 0.0 };
    Ok((x, y, z2.sqrt()))
}

fn real(v: [f64; 4]) -> PureState {
    PureState::normalize(Vec4::new(c(v[0], 0.0), c(v[1], 0.0), c(v[2], 0.0), c(v[3], 0.0)))
        .expect("non-zero vector")
}

fn check_unit(field: &'static str, v: Option<f64>) -> Result<()> {
    match v {
        Some(e) if !(0.0..=1.0 + 1e-12).contains(&e) => {
            Err(infeasible(field, format!("{e} outside [0, 1]")))
        }
        _ => Ok(()),
    }
}

fn check_entanglement(field: &'static str, psi: &PureState, expected: Option<f64>) -> Result<()> {
    if let Some(e) = expected {
        let actual = pure_entanglement(psi);
        if (actual - e).abs() > CONSISTENCY_TOL {
            return Err(infeasible(
                field,
                format!("angles give entanglement {actual}, marker says {e}"),
            ));
        }
    }
    Ok(())
}

/// A density matrix whose marker set is `m`.
///
/// ψ1 and ψ4 are placed by their angles in the canonical Π2 basis and its
/// complement basis. Without Π2 markers, ψ1, ψ2 are taken in span{|↑↑⟩, |↓↓⟩}
/// and ψ3, ψ4 in span{|↑↓⟩, |↓↑⟩} with the required entanglements.
pub fn build_state(m: &MarkerSet) -> Result<DensityMatrix> {
    let mu = m.mu;
    if mu.iter().any(|v| !v.is_finite() || *v < -1e-12) {
        return Err(infeasible("mu", format!("{mu:?} has a negative entry")));
    }
    let total: f64 = mu.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(infeasible("mu", format!("weights sum to {total}")));
    }
    let mu = mu.map(|v| v.max(0.0));
    let lambda1 = 1.0 / (mu[0] + 2.0 * mu[1] + 3.0 * mu[2] + 4.0 * mu[3]);
    let diffs = mu.map(|v| v * lambda1);
    let needs = diffs.map(|d| d > DEGENERACY_TOL);
    check_unit("e1", m.e1)?;
    check_unit("e_perp", m.e_perp)?;
    if needs[0] && m.e1.is_none() {
        return Err(infeasible("e1", "required when mu1 > 0"));
    }
    if needs[2] && m.e_perp.is_none() {
        return Err(infeasible("e_perp", "required when mu3 > 0"));
    }
    let pi2 = match (m.e_max, m.e_cusp) {
        (Some(e_max), Some(e_cusp)) => Some(invert_pi2(e_max, e_cusp)?),
        (None, None) if !needs[1] => None,
        (None, _) => return Err(infeasible("e_max", "required when mu2 > 0")),
        (_, None) => return Err(infeasible("e_cusp", "required when mu2 > 0")),
    };

    let (psi1, psi2, psi3, _psi4) = match pi2 {
        Some((x, y, z)) => {
            let chi1 = PureState::basis(0);
            let chi2 = real([0.0, x, y, z]);
            let (psi1, psi2) = match (m.e1, m.angles.psi1) {
                (Some(_), Some(a)) => (
                    from_bloch_angles(a, (&chi1, &chi2)),
                    bloch_antipode(a, (&chi1, &chi2)),
                ),
                (Some(_), None) => return Err(Error::MissingAngles("theta, phi")),
                (None, _) => (chi1, chi2),
            };
            check_entanglement("e1", &psi1, m.e1)?;
            let (c1, c2) = complement_basis_or_fallback(x, y, z);
            let (psi4, psi3) = match (m.e_perp, m.angles.perp) {
                (Some(_), Some(a)) => (from_bloch_angles(a, (&c1, &c2)), bloch_antipode(a, (&c1, &c2))),
                (Some(_), None) => return Err(Error::MissingAngles("theta_perp, phi_perp")),
                (None, _) => (c2, c1),
            };
            check_entanglement("e_perp", &psi4, m.e_perp)?;
            (psi1, psi2, psi3, psi4)
        }
        None => {
            let t = 0.5 * m.e1.unwrap_or(0.0).min(1.0).asin();
            let s = 0.5 * m.e_perp.unwrap_or(0.0).min(1.0).asin();
            (
                real([t.cos(), 0.0, 0.0, t.sin()]),
                real([-t.sin(), 0.0, 0.0, t.cos()]),
                real([0.0, -s.sin(), s.cos(), 0.0]),
                real([0.0, s.cos(), s.sin(), 0.0]),
            )
        }
    };

    let p1 = psi1.projector();
    let p2 = p1 + psi2.projector();
    let p3 = p2 + psi3.projector();
    let rho: Mat4 = p1.scale(diffs[0]) + p2.scale(diffs[1]) + p3.scale(diffs[2]) + Mat4::identity().scale(diffs[3]);
    DensityMatrix::new(rho)
}

/// Bloch angles of a state in span{χ1, χ2} with entanglement `target`,
/// found by bisection in θ along the first meridian φ ∈ {0, π/2, π, 3π/2}
/// that reaches it. The state is the one closest to χ1 on that meridian.
pub fn find_angles(basis: (&PureState, &PureState), target: f64) -> Option<BlochAngles> {
    const STEPS: usize = 2000;
    let e_at = |theta: f64, phi: f64| pure_entanglement(&from_bloch_angles(BlochAngles { theta, phi }, basis));
    for phi in [0.0, 0.5, 1.0, 1.5].map(|f| f * std::f64::consts::PI) {
        let start = e_at(0.0, phi);
        let above = start > target;
        let mut prev = 0.0;
        for s in 1..=STEPS {
            let theta = std::f64::consts::PI * s as f64 / STEPS as f64;
            if (e_at(theta, phi) > target) != above {
                let (mut lo, mut hi) = (prev, theta);
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if (e_at(mid, phi) > target) == above {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return Some(BlochAngles { theta: 0.5 * (lo + hi), phi });
            }
            prev = theta;
        }
    }
    None
}

/// A state with weights `mu` and the given entanglement markers, with the
/// angles of ψ1 and ψ4 chosen by [`find_angles`].
pub fn build_state_from_entanglements(
    mu: [f64; 4],
    e1: Option<f64>,
    pi2: Option<(f64, f64)>,
    e_perp: Option<f64>,
) -> Result<DensityMatrix> {
    let mut angles = MarkerAngles::default();
    if let Some((e_max, e_cusp)) = pi2 {
        let (x, y, z) = invert_pi2(e_max, e_cusp)?;
        let (chi1, chi2) = (PureState::basis(0), real([0.0, x, y, z]));
        if let Some(e) = e1 {
            angles.psi1 = Some(
                find_angles((&chi1, &chi2), e)
                    .ok_or_else(|| infeasible("e1", format!("{e} not reached in the subspace")))?,
            );
        }
        if let Some(e) = e_perp {
            let (c1, c2) = complement_basis_or_fallback(x, y, z);
            angles.perp = Some(
                find_angles((&c1, &c2), e)
                    .ok_or_else(|| infeasible("e_perp", format!("{e} not reached in the complement")))?,
            );
        }
    }
    build_state(&MarkerSet {
        mu,
        e1,
        e_max: pi2.map(|p| p.0),
        e_cusp: pi2.map(|p| p.1),
        e_perp,
        angles,
    })
}

/// Tolerance of [`lo_equivalent`].
pub const LO_TOL: f64 = 1e-6;

/// Marker-level local equivalence: equal spectra and equal marker sets,
/// angles included, within [`LO_TOL`].
pub fn lo_equivalent(a: &DensityMatrix, b: &DensityMatrix) -> bool {
    let (sa, sb) = (eig_hermitian(a), eig_hermitian(b));
    let spectra = sa
        .eigenvalues
        .iter()
        .zip(&sb.eigenvalues)
        .all(|(x, y)| (x - y).abs() <= LO_TOL);
    spectra
        && extract_markers(a)
            .difference(&extract_markers(b))
            .is_some_and(|d| d <= LO_TOL)
}
