//! Entanglement densities of uniformly random states in the projections
//! Π1..Π4, closed forms and Monte-Carlo estimators.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{kron_vec, Vec2, Vec4, C64};
use crate::measures::pure_entanglement;
use crate::random::{complex_gaussian, random_pure_state_with};
use crate::state::PureState;

/// Number of independent RNG substreams a sampling run is split into.
pub const SUBSTREAMS: u64 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplingConfig {
    pub samples: u64,
    pub seed: u64,
    pub bins: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            seed: 42,
            bins: 100,
        }
    }
}

/// Density estimate on uniform bins over [0, 1].
///
/// `sample_count == 0` marks an exact rendering from a closed form.
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub densities: Vec<f64>,
    pub sample_count: u64,
    pub seed: u64,
}

/// Bin containing `e`; values outside [0, 1] are clamped and E = 1 falls in
/// the last bin.
pub fn bin_index(e: f64, bins: usize) -> usize {
    let e = e.clamp(0.0, 1.0);
    ((e * bins as f64) as usize).min(bins - 1)
}

fn uniform_edges(bins: usize) -> Vec<f64> {
    (0..=bins).map(|i| i as f64 / bins as f64).collect()
}

impl Histogram {
    pub fn from_counts(counts: &[u64], sample_count: u64, seed: u64) -> Self {
        let bins = counts.len();
        let width = 1.0 / bins as f64;
        let n = sample_count.max(1) as f64;
        Self {
            bin_edges: uniform_edges(bins),
            densities: counts.iter().map(|&k| k as f64 / (n * width)).collect(),
            sample_count,
            seed,
        }
    }

    /// Bin averages of a density with the given CDF.
    pub fn from_cdf(bins: usize, cdf: impl Fn(f64) -> f64) -> Self {
        let edges = uniform_edges(bins);
        let width = 1.0 / bins as f64;
        let densities = edges
            .windows(2)
            .map(|w| ((cdf(w[1]) - cdf(w[0])) / width).max(0.0))
            .collect();
        Self {
            bin_edges: edges,
            densities,
            sample_count: 0,
            seed: 0,
        }
    }

    /// All-zero histogram.
    pub fn empty(bins: usize) -> Self {
        Self {
            bin_edges: uniform_edges(bins),
            densities: vec![0.0; bins],
            sample_count: 0,
            seed: 0,
        }
    }

    pub fn bins(&self) -> usize {
        self.densities.len()
    }

    pub fn bin_width(&self) -> f64 {
        1.0 / self.bins() as f64
    }

    pub fn centers(&self) -> Vec<f64> {
        self.bin_edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.densities.iter().sum::<f64>() * self.bin_width()
    }

    /// ∫|p − q| over [0, 1], bin by bin.
    pub fn l1_distance(&self, other: &Histogram) -> f64 {
        assert_eq!(self.bins(), other.bins(), "bin grids differ");
        self.densities
            .iter()
            .zip(&other.densities)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            * self.bin_width()
    }

    /// Index of the largest density; the lowest such bin on ties.
    pub fn modal_bin(&self) -> usize {
        let mut best = 0;
        for (i, d) in self.densities.iter().enumerate() {
            if *d > self.densities[best] {
                best = i;
            }
        }
        best
    }

    /// `self + weight · other`, bin by bin.
    pub fn add_scaled(&mut self, other: &Histogram, weight: f64) {
        assert_eq!(self.bins(), other.bins(), "bin grids differ");
        for (a, b) in self.densities.iter_mut().zip(&other.densities) {
            *a += weight * b;
        }
    }
}

/// Runs `draw` `cfg.samples` times split over [`SUBSTREAMS`] ChaCha8
/// substreams of `cfg.seed` and bins the results. The output depends only on
/// `cfg`, not on thread scheduling.
pub fn sample_histogram<F>(cfg: &SamplingConfig, draw: F) -> Histogram
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let bins = cfg.bins.max(1);
    let per = cfg.samples / SUBSTREAMS;
    let extra = cfg.samples % SUBSTREAMS;
    let counts = (0..SUBSTREAMS)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(k);
            let n = per + u64::from(k < extra);
            let mut counts = vec![0u64; bins];
            for _ in 0..n {
                counts[bin_index(draw(&mut rng), bins)] += 1;
            }
            counts
        })
        .reduce(
            || vec![0u64; bins],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Histogram::from_counts(&counts, cfg.samples, cfg.seed)
}

/// Closed-form anchors of the Π2 density for the canonical subspace
/// span{(1,0,0,0), (0,x,y,z)}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pi2Markers {
    pub e_max: f64,
    pub e_cusp: f64,
    /// Density at `e_max`; infinite when `mu_angle` = 0.
    pub p_at_emax: f64,
    pub mu_angle: f64,
}

fn check_xy(x: f64, y: f64) -> Result<f64> {
    if !(x.is_finite() && y.is_finite()) || x < 0.0 || y < 0.0 || x * x + y * y > 1.0 + 1e-12 {
        return Err(Error::InvalidParameter {
            name: "x, y",
            reason: format!("need x, y >= 0 and x^2 + y^2 <= 1, got ({x}, {y})"),
        });
    }
    Ok((1.0 - x * x - y * y).max(0.0).sqrt())
}

pub fn pi2_markers(x: f64, y: f64) -> Result<Pi2Markers> {
    let z = check_xy(x, y)?;
    let xy = x * y;
    let e_max = xy + (z * z + xy * xy).sqrt();
    if e_max < 1e-12 {
        return Err(Error::DegenerateSubspace { e_max });
    }
    let e_cusp = z * z / e_max;
    // sin and cos of the angle are computed separately so that neither
    // loses precision near 0 or π/2.
    let sin_mu = (2.0 * (xy * (xy * e_max + z * z)).sqrt() / e_max.powf(1.5)).min(1.0);
    let cos_mu = e_cusp / e_max;
    let mu_angle = sin_mu.atan2(cos_mu);
    Ok(Pi2Markers {
        e_max,
        e_cusp,
        p_at_emax: 1.0 / (e_max * sin_mu),
        mu_angle,
    })
}

/// E(θ, φ) = |z sinθ − xy(1 − cosθ)e^{−iφ}| for the state
/// cos(θ/2)e^{iφ/2}χ1 + sin(θ/2)e^{−iφ/2}χ2 of the canonical subspace.
pub fn pi2_entanglement_at(x: f64, y: f64, theta: f64, phi: f64) -> f64 {
    let z = (1.0 - x * x - y * y).max(0.0).sqrt();
    entanglement_cs(x * y, z, theta.cos(), theta.sin(), phi)
}

fn entanglement_cs(xy: f64, z: f64, cos_t: f64, sin_t: f64, phi: f64) -> f64 {
    let w = C64::new(z * sin_t, 0.0) - C64::from_polar(xy * (1.0 - cos_t), -phi);
    w.norm().min(1.0)
}

/// Monte-Carlo Π2 density with cosθ ~ U[−1, 1] and φ ~ U[0, 2π).
pub fn sample_pi2(x: f64, y: f64, cfg: &SamplingConfig) -> Result<Histogram> {
    let z = check_xy(x, y)?;
    let xy = x * y;
    Ok(sample_histogram(cfg, |rng| {
        let c: f64 = 2.0 * rng.random::<f64>() - 1.0;
        let phi = TAU * rng.random::<f64>();
        entanglement_cs(xy, z, c, (1.0 - c * c).max(0.0).sqrt(), phi)
    }))
}

/// Monte-Carlo density for uniformly random states in the span of two
/// orthonormal states.
pub fn sample_subspace2(basis: (&PureState, &PureState), cfg: &SamplingConfig) -> Histogram {
    let (b1, b2) = (*basis.0.amplitudes(), *basis.1.amplitudes());
    sample_histogram(cfg, |rng| {
        let c = Vec2::new(complex_gaussian(rng), complex_gaussian(rng));
        let v = b1 * c[0] + b2 * c[1];
        entanglement_of(&v)
    })
}

fn entanglement_of(v: &Vec4) -> f64 {
    let n2 = v.norm_squared();
    (2.0 * (v[0] * v[3] - v[1] * v[2]).norm() / n2).min(1.0)
}

fn check_dual(e_perp: f64) -> Result<f64> {
    if !(0.0..1.0 - 1e-12).contains(&e_perp) {
        return Err(Error::DivergentDual { e_perp });
    }
    Ok((1.0 - e_perp * e_perp).sqrt())
}

/// P3(E) = 2E arccosh(1/max(E, E⊥)) / √(1 − E⊥²).
pub fn pi3_density(e: f64, e_perp: f64) -> Result<f64> {
    let c = check_dual(e_perp)?;
    if e <= 0.0 || e >= 1.0 {
        return Ok(0.0);
    }
    Ok(2.0 * e * (1.0 / e.max(e_perp)).acosh() / c)
}

/// E² arccosh(1/E) − √(1 − E²), an antiderivative of 2E arccosh(1/E).
fn pi3_antiderivative(e: f64) -> f64 {
    if e <= 0.0 {
        return -1.0;
    }
    e * e * (1.0 / e).acosh() - (1.0 - e * e).max(0.0).sqrt()
}

/// Cumulative distribution of [`pi3_density`].
pub fn pi3_cdf(e: f64, e_perp: f64) -> Result<f64> {
    let c = check_dual(e_perp)?;
    let e = e.clamp(0.0, 1.0);
    if e <= e_perp {
        if e == 0.0 {
            return Ok(0.0);
        }
        Ok(e * e * (1.0 / e_perp).acosh() / c)
    } else {
        Ok(((pi3_antiderivative(e) + c) / c).min(1.0))
    }
}

/// Orthonormal basis of the complement of `xi`: two product states and
/// one state with the same entanglement as `xi`.
pub fn dual_basis(xi: &PureState) -> [Vec4; 3] {
    let a = xi.amplitudes();
    let coeffs = nalgebra::Matrix2::new(a[0], a[1], a[2], a[3]);
    let svd = coeffs.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    let s = svd.singular_values;
    // ξ = Σ s_k |u_k⟩ ⊗ |w_k⟩ with |w_k⟩ the k-th row of V†, conjugated twice.
    let uk = |k: usize| Vec2::new(u[(0, k)], u[(1, k)]);
    let wk = |k: usize| Vec2::new(v_t[(k, 0)], v_t[(k, 1)]);
    let chi1 = kron_vec(&uk(0), &wk(1));
    let chi2 = kron_vec(&uk(1), &wk(0));
    let chi3 = kron_vec(&uk(0), &wk(0)) * C64::new(s[1], 0.0)
        - kron_vec(&uk(1), &wk(1)) * C64::new(s[0], 0.0);
    [chi1, chi2, chi3.unscale(chi3.norm())]
}

/// Monte-Carlo Π3 density for the complement of `e_perp_state`, using
/// ψ = cosθ χ1 + e^{i(α+γ)} sinθ cosβ χ2 − e^{i(α−γ)} sinθ sinβ χ3 with
/// sin⁴θ and sin²β uniform and α, γ uniform on [0, 2π).
pub fn sample_pi3(e_perp_state: &PureState, cfg: &SamplingConfig) -> Histogram {
    let [chi1, chi2, chi3] = dual_basis(e_perp_state);
    sample_histogram(cfg, |rng| {
        let sin_t = rng.random::<f64>().powf(0.25);
        let cos_t = (1.0 - sin_t * sin_t).max(0.0).sqrt();
        let sin_b = rng.random::<f64>().sqrt();
        let cos_b = (1.0 - sin_b * sin_b).max(0.0).sqrt();
        let alpha = TAU * rng.random::<f64>();
        let gamma = TAU * rng.random::<f64>();
        let v = chi1 * C64::new(cos_t, 0.0)
            + chi2 * C64::from_polar(sin_t * cos_b, alpha + gamma)
            - chi3 * C64::from_polar(sin_t * sin_b, alpha - gamma);
        entanglement_of(&v)
    })
}

/// 3E√(1 − E²), the density over uniformly random two-qubit pure states.
pub fn universal_density(e: f64) -> f64 {
    if !(0.0..=1.0).contains(&e) {
        return 0.0;
    }
    3.0 * e * (1.0 - e * e).sqrt()
}

pub fn universal_cdf(e: f64) -> f64 {
    let e = e.clamp(0.0, 1.0);
    1.0 - (1.0 - e * e).powf(1.5)
}

pub fn sample_pi4(cfg: &SamplingConfig) -> Histogram {
    sample_histogram(cfg, |rng| pure_entanglement(&random_pure_state_with(rng)))
}

/// A Dirac component of a density on [0, 1].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub weight: f64,
    pub location: f64,
}

/// The Π1 density is a single atom at the entanglement of the state.
pub fn pi1_atom(psi: &PureState) -> Atom {
    Atom {
        weight: 1.0,
        location: pure_entanglement(psi),
    }
}
