//! Nested-projection weights, the marker set of a state, and the composite
//! entanglement density Σ μ_i P_i(E).

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::haar::{
    pi2_markers, pi3_cdf, sample_pi2, universal_cdf, Atom, Histogram, SamplingConfig,
};
use crate::measures::pure_entanglement;
use crate::reconstruct::invert_pi2;
use crate::spectral::{eig_hermitian, SpectralDecomposition, DEGENERACY_TOL};
use crate::state::DensityMatrix;
use crate::subspace::{
    bloch_angles, canonicalize, complement_basis_or_fallback, BlochAngles, Subspace2,
};

/// Λ = (λ1−λ2, λ2−λ3, λ3−λ4, λ4) and μ = Λ/λ1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightVector {
    pub lambda_diffs: [f64; 4],
    pub mu: [f64; 4],
}

/// Weights of the nested projections Π1..Π4 for the spectrum of `sd`.
pub fn weights(sd: &SpectralDecomposition) -> Result<WeightVector> {
    weights_from_eigenvalues(sd.eigenvalues)
}

/// Like [`weights`]; the eigenvalues are sorted and clamped at zero first.
pub fn weights_from_eigenvalues(eigenvalues: [f64; 4]) -> Result<WeightVector> {
    let mut l = eigenvalues.map(|v| v.max(0.0));
    l.sort_by(|a, b| b.total_cmp(a));
    if l[0] < 1e-12 {
        return Err(Error::ZeroState { lambda1: l[0] });
    }
    let lambda_diffs = [l[0] - l[1], l[1] - l[2], l[2] - l[3], l[3]];
    let mu = lambda_diffs.map(|d| d / l[0]);
    Ok(WeightVector { lambda_diffs, mu })
}

/// Bloch angles of ψ1 in the Π2 canonical basis and of ψ4 in the
/// complement basis.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MarkerAngles {
    pub psi1: Option<BlochAngles>,
    pub perp: Option<BlochAngles>,
}

/// Parameters characterizing the entanglement density of a state.
///
/// Fields belonging to a projection with vanishing weight are `None`.
/// `e_max = e_cusp = 0` encodes a Π2 in which every state is separable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MarkerSet {
    pub mu: [f64; 4],
    pub e1: Option<f64>,
    pub e_max: Option<f64>,
    pub e_cusp: Option<f64>,
    pub e_perp: Option<f64>,
    pub angles: MarkerAngles,
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn field_gap(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (None, None) => Some(0.0),
        (Some(x), Some(y)) => Some((x - y).abs()),
        _ => None,
    }
}

fn angle_gap(a: Option<BlochAngles>, b: Option<BlochAngles>) -> Option<f64> {
    match (a, b) {
        (None, None) => Some(0.0),
        (Some(x), Some(y)) => Some((x.theta - y.theta).abs().max(circular_distance(x.phi, y.phi))),
        _ => None,
    }
}

impl MarkerSet {
    /// Largest difference over the scalar fields, or `None` when the two sets
    /// do not have the same fields present.
    pub fn scalar_difference(&self, other: &MarkerSet) -> Option<f64> {
        let mut gap = self
            .mu
            .iter()
            .zip(&other.mu)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        for (a, b) in [
            (self.e1, other.e1),
            (self.e_max, other.e_max),
            (self.e_cusp, other.e_cusp),
            (self.e_perp, other.e_perp),
        ] {
            gap = gap.max(field_gap(a, b)?);
        }
        Some(gap)
    }

    /// Like [`Self::scalar_difference`], including the angles (φ compared on
    /// the circle).
    pub fn difference(&self, other: &MarkerSet) -> Option<f64> {
        let gap = self.scalar_difference(other)?;
        let a = angle_gap(self.angles.psi1, other.angles.psi1)?;
        let b = angle_gap(self.angles.perp, other.angles.perp)?;
        Some(gap.max(a).max(b))
    }
}

/// Marker set of `rho`.
pub fn extract_markers(rho: &DensityMatrix) -> MarkerSet {
    let sd = eig_hermitian(rho);
    let w = weights(&sd).expect("a density matrix has λ1 >= 1/4");
    markers_from_spectral(&sd, &w)
}

pub fn markers_from_spectral(sd: &SpectralDecomposition, w: &WeightVector) -> MarkerSet {
    let [has1, has2, has3, _] = w.lambda_diffs.map(|d| d > DEGENERACY_TOL);
    let [psi1, psi2, _, psi4] = &sd.eigenvectors;
    let mut m = MarkerSet {
        mu: w.mu,
        e1: has1.then(|| pure_entanglement(psi1)),
        e_max: None,
        e_cusp: None,
        e_perp: has3.then(|| pure_entanglement(psi4)),
        angles: MarkerAngles::default(),
    };
    if !has2 {
        return m;
    }
    let s = Subspace2::new(psi1.clone(), psi2.clone()).expect("eigenvectors are orthonormal");
    let form = canonicalize(&s);
    let (e_max, e_cusp) = if form.is_all_separable() {
        (0.0, 0.0)
    } else {
        match pi2_markers(form.x, form.y) {
            Ok(p) => (p.e_max, p.e_cusp),
            Err(_) => (0.0, 0.0),
        }
    };
    m.e_max = Some(e_max);
    m.e_cusp = Some(e_cusp);
    let [chi1, chi2] = form.original_basis();
    if has1 {
        m.angles.psi1 = bloch_angles(psi1, (chi1, chi2)).ok();
    }
    if has3 {
        let (c1, c2) = complement_basis_or_fallback(form.x, form.y, form.z);
        let (c1, c2) = (form.from_canonical(&c1), form.from_canonical(&c2));
        m.angles.perp = bloch_angles(psi4, (&c1, &c2)).ok();
    }
    m
}

/// Continuous part of a subspace density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Component {
    /// Π2 density of the canonical subspace with parameters (x, y).
    Subspace2 { x: f64, y: f64 },
    /// Closed-form Π3 density for a dual state of entanglement `e_perp`.
    Subspace3 { e_perp: f64 },
    /// Density over the full state space.
    Universal,
}

impl Component {
    /// Cumulative distribution, when known in closed form.
    pub fn cdf(&self, e: f64) -> Option<f64> {
        match *self {
            Component::Subspace2 { .. } => None,
            Component::Subspace3 { e_perp } if e_perp >= 1.0 - 1e-9 => {
                // Limit of the closed form: density 2E.
                Some(e.clamp(0.0, 1.0).powi(2))
            }
            Component::Subspace3 { e_perp } => pi3_cdf(e, e_perp).ok(),
            Component::Universal => Some(universal_cdf(e)),
        }
    }
}

/// Atoms plus weighted continuous components; all weights sum to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct EntanglementPDF {
    pub atoms: Vec<Atom>,
    pub continuous: Vec<(f64, Component)>,
}

impl EntanglementPDF {
    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum::<f64>()
            + self.continuous.iter().map(|(w, _)| w).sum::<f64>()
    }
}

/// Σ μ_i P_i as atoms and components. Components whose markers are absent
/// carry weight below the degeneracy tolerance and are dropped; the remaining
/// weights are renormalized.
pub fn compose_pdf(markers: &MarkerSet) -> Result<EntanglementPDF> {
    let mu = markers.mu;
    let mut atoms = Vec::new();
    let mut continuous = Vec::new();
    if let (Some(e1), true) = (markers.e1, mu[0] > 0.0) {
        atoms.push(Atom {
            weight: mu[0],
            location: e1,
        });
    }
    if let (Some(e_max), Some(e_cusp), true) = (markers.e_max, markers.e_cusp, mu[1] > 0.0) {
        if e_max == 0.0 {
            atoms.push(Atom {
                weight: mu[1],
                location: 0.0,
            });
        } else {
            let (x, y, _) = invert_pi2(e_max, e_cusp)?;
            continuous.push((mu[1], Component::Subspace2 { x, y }));
        }
    }
    if let (Some(e_perp), true) = (markers.e_perp, mu[2] > 0.0) {
        continuous.push((mu[2], Component::Subspace3 { e_perp }));
    }
    if mu[3] > 0.0 {
        continuous.push((mu[3], Component::Universal));
    }
    let mut pdf = EntanglementPDF { atoms, continuous };
    let total = pdf.total_weight();
    if total <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "mu",
            reason: "no component with positive weight".into(),
        });
    }
    pdf.atoms.iter_mut().for_each(|a| a.weight /= total);
    pdf.continuous.iter_mut().for_each(|(w, _)| *w /= total);
    Ok(pdf)
}

/// Continuous part on a bin grid plus the atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct RenderedPdf {
    /// Weighted density; its mass is the total continuous weight.
    pub histogram: Histogram,
    pub atoms: Vec<Atom>,
}

/// Renders `pdf` on `cfg.bins` bins. Closed-form components are integrated
/// exactly per bin; Π2 components are sampled with seed `cfg.seed + k` for the
/// k-th component. Nothing is smoothed.
pub fn evaluate_pdf(pdf: &EntanglementPDF, cfg: &SamplingConfig) -> Result<RenderedPdf> {
    let mut histogram = Histogram::empty(cfg.bins);
    let mut sampled = false;
    for (k, (weight, component)) in pdf.continuous.iter().enumerate() {
        let part = match *component {
            Component::Subspace2 { x, y } => {
                sampled = true;
                let c = SamplingConfig {
                    seed: cfg.seed.wrapping_add(k as u64),
                    ..*cfg
                };
                sample_pi2(x, y, &c)?
            }
            other => Histogram::from_cdf(cfg.bins, |e| other.cdf(e).expect("closed form")),
        };
        histogram.add_scaled(&part, *weight);
    }
    if sampled {
        histogram.sample_count = cfg.samples;
        histogram.seed = cfg.seed;
    }
    Ok(RenderedPdf {
        histogram,
        atoms: pdf.atoms.clone(),
    })
}
