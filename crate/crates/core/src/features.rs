//! Locating the marker features (atom, cusp, support edge, derivative kink)
//! in a rendered entanglement density.

use nalgebra::{Matrix4, Vector4};

use crate::error::{Error, Result};
use crate::haar::{Atom, Histogram};

/// Detection thresholds.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureConfig {
    /// A cusp bin must rise above both neighbours by this multiple of the
    /// median absolute slope.
    pub cusp_slope_factor: f64,
    /// Bins with at most this many samples count as empty.
    pub edge_min_count: f64,
    /// Line-fit window lengths tried for kinks, smallest first.
    pub kink_scales: Vec<usize>,
    /// |J_i| must exceed this multiple of |J_{i±k}|.
    pub kink_prominence: f64,
    /// Required significance of the slope jump in noise standard deviations.
    pub kink_significance: f64,
    /// |J_i| must exceed this fraction of the peak density.
    pub kink_floor: f64,
    /// Minimum expected samples per bin.
    pub min_expected_per_bin: f64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            cusp_slope_factor: 3.0,
            edge_min_count: 5.0,
            kink_scales: vec![3, 5, 8],
            kink_prominence: 2.0,
            kink_significance: 6.0,
            kink_floor: 1e-3,
            min_expected_per_bin: 100.0,
        }
    }
}

/// Feature locations; `None` when not detected.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DetectedFeatures {
    pub e1: Option<f64>,
    pub e_cusp: Option<f64>,
    pub e_max: Option<f64>,
    pub e_perp: Option<f64>,
}

pub fn detect_features(h: &Histogram, atoms: &[Atom]) -> Result<DetectedFeatures> {
    detect_features_with(h, atoms, &FeatureConfig::default())
}

pub fn detect_features_with(
    h: &Histogram,
    atoms: &[Atom],
    cfg: &FeatureConfig,
) -> Result<DetectedFeatures> {
    let n = h.bins();
    if h.sample_count > 0 {
        let expected = h.sample_count as f64 / n as f64;
        if expected < cfg.min_expected_per_bin {
            return Err(Error::InsufficientResolution {
                expected_per_bin: expected,
            });
        }
    }
    let d = &h.densities;
    let e1 = atoms
        .iter()
        .filter(|a| a.weight > 0.0)
        .max_by(|a, b| a.weight.total_cmp(&b.weight))
        .map(|a| a.location);

    let cusp = find_cusp(d, cfg.cusp_slope_factor);
    let edge = find_edge(h, cusp, cfg.edge_min_count);
    let mut excluded = Vec::new();
    if let Some(c) = cusp {
        excluded.push(c * h.bin_width());
    }
    if let Some(b) = edge {
        excluded.push(h.bin_edges[b]);
    }
    let kink = cfg
        .kink_scales
        .iter()
        .find_map(|&k| find_kink(h, k, &excluded, cfg))
        .map(|b| h.bin_edges[b]);

    Ok(DetectedFeatures {
        e1,
        e_cusp: cusp.map(|c| c * h.bin_width()),
        e_max: edge.map(|b| h.bin_edges[b]),
        e_perp: kink,
    })
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Cusp location in bin units: the highest interior bin that rises above
/// both neighbours by `factor` times the median absolute slope (reported at
/// its centre), or failing that the highest pair of adjacent bins that rises
/// above the bins on either side (a divergence on a bin edge; reported at the
/// shared edge).
fn find_cusp(d: &[f64], factor: f64) -> Option<f64> {
    let n = d.len();
    if n < 4 {
        return None;
    }
    let slopes: Vec<f64> = d.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let threshold = factor * median(slopes);
    let single = (1..n - 1)
        .filter(|&i| d[i] - d[i - 1] > threshold && d[i] - d[i + 1] > threshold)
        .max_by(|&a, &b| d[a].total_cmp(&d[b]));
    if let Some(i) = single {
        return Some(i as f64 + 0.5);
    }
    (1..n - 2)
        .filter(|&i| d[i].min(d[i + 1]) - d[i - 1].max(d[i + 2]) > threshold)
        .max_by(|&a, &b| d[a].max(d[a + 1]).total_cmp(&d[b].max(d[b + 1])))
        .map(|i| i as f64 + 1.0)
}

/// Bin boundary where the support ends: after the last occupied bin if
/// empty bins trail it, else (given a cusp) the largest drop right of it.
fn find_edge(h: &Histogram, cusp: Option<f64>, min_count: f64) -> Option<usize> {
    let d = &h.densities;
    let n = d.len();
    let occupied = |v: f64| {
        if h.sample_count > 0 {
            v * h.sample_count as f64 * h.bin_width() > min_count
        } else {
            v > 1e-12
        }
    };
    let last = d.iter().rposition(|&v| occupied(v))?;
    if last + 1 < n {
        return Some(last + 1);
    }
    let c = cusp?.floor() as usize;
    (c + 1..n - 1)
        .min_by(|&a, &b| (d[a + 1] - d[a]).total_cmp(&(d[b + 1] - d[b])))
        .filter(|&i| d[i + 1] < d[i])
        .map(|i| i + 1)
}

/// Least-squares slope weights for `k` equally spaced points.
fn slope_weights(k: usize) -> Vec<f64> {
    let xs: Vec<f64> = (0..k).map(|j| j as f64 - (k as f64 - 1.0) / 2.0).collect();
    let ss: f64 = xs.iter().map(|x| x * x).sum();
    xs.into_iter().map(|x| x / ss).collect()
}

/// Boundary index with the most significant slope jump at scale `k`.
fn find_kink(h: &Histogram, k: usize, excluded: &[f64], cfg: &FeatureConfig) -> Option<usize> {
    let d = &h.densities;
    let n = d.len();
    if n < 4 * k + 1 || k < 2 {
        return None;
    }
    let wt = slope_weights(k);
    let fit = |start: usize| wt.iter().zip(&d[start..start + k]).map(|(w, v)| w * v).sum::<f64>();
    // J[i]: slope right of boundary i minus slope left of it.
    let mut jump = vec![f64::NAN; n + 1];
    for (i, j) in jump.iter_mut().enumerate().take(n - k + 1).skip(k) {
        *j = fit(i) - fit(i - k);
    }
    let r: Vec<f64> = (1..n - 1).map(|i| d[i] - 0.5 * (d[i - 1] + d[i + 1])).collect();
    let med = median(r.clone());
    let mad = median(r.iter().map(|v| (v - med).abs()).collect());
    let sigma = 1.4826 * mad / 1.5f64.sqrt();
    let wsq: f64 = wt.iter().map(|w| w * w).sum();
    let sigma_jump = sigma * (2.0 * wsq).sqrt() * 1.5f64.sqrt();
    let floor = cfg.kink_floor * d.iter().cloned().fold(0.0, f64::max);
    if floor <= 0.0 {
        return None;
    }
    let width = h.bin_width();

    let mut best: Option<(f64, usize)> = None;
    for i in 2 * k..=n - 2 * k {
        if excluded
            .iter()
            .any(|e| (h.bin_edges[i] - e).abs() <= (k as f64 + 1.0) * width + 1e-12)
        {
            continue;
        }
        let a = jump[i].abs();
        let neighbours = jump[i - k].abs().max(jump[i + k].abs());
        let excess = (jump[i] - 0.5 * (jump[i - k] + jump[i + k])).abs();
        if a < floor || a < cfg.kink_prominence * neighbours || excess < cfg.kink_significance * sigma_jump {
            continue;
        }
        let local_max = jump[i - k..=i + k]
            .iter()
            .filter(|v| !v.is_nan())
            .fold(0.0, |m: f64, v| m.max(v.abs()));
        if a < local_max {
            continue;
        }
        if best.is_none_or(|(e, _)| excess > e) {
            best = Some((excess, i));
        }
    }
    best.map(|(_, i)| refine_kink(d, i, k))
}

/// Boundary minimizing the residual of a quadratic-plus-hinge fit over
/// ±2k bins, scanned over ±k/2 around the initial estimate.
fn refine_kink(d: &[f64], i0: usize, k: usize) -> usize {
    let n = d.len();
    let lo = i0.saturating_sub(2 * k);
    let hi = (i0 + 2 * k).min(n);
    let first = (lo + 3).max(i0.saturating_sub(k / 2));
    let last = (hi.saturating_sub(3)).min(i0 + k / 2);
    let mut best: Option<(f64, usize)> = None;
    for c in first..=last {
        let rows: Vec<([f64; 4], f64)> = (lo..hi)
            .map(|j| {
                let t = j as f64 + 0.5;
                ([1.0, t, t * t, (t - c as f64).max(0.0)], d[j])
            })
            .collect();
        let Some(rss) = least_squares_rss(&rows) else {
            continue;
        };
        if best.is_none_or(|(r, _)| rss < r) {
            best = Some((rss, c));
        }
    }
    best.map_or(i0, |(_, c)| c)
}

fn least_squares_rss(rows: &[([f64; 4], f64)]) -> Option<f64> {
    // Centre and scale the abscissa-dependent columns for conditioning.
    let mut ata = Matrix4::<f64>::zeros();
    let mut atb = Vector4::<f64>::zeros();
    let scale: Vec<f64> = (0..4)
        .map(|c| rows.iter().map(|(x, _)| x[c].abs()).fold(0.0, f64::max).max(1e-300))
        .collect();
    for (x, y) in rows {
        let v = Vector4::from_fn(|r, _| x[r] / scale[r]);
        ata += v * v.transpose();
        atb += v * *y;
    }
    let coef = ata.svd(true, true).solve(&atb, 1e-12).ok()?;
    Some(
        rows.iter()
            .map(|(x, y)| {
                let fit: f64 = (0..4).map(|c| coef[c] * x[c] / scale[c]).sum();
                (fit - y).powi(2)
            })
            .sum(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::{pi3_cdf, universal_cdf};

    #[test]
    fn exact_pi3_kink() {
        for ep in [0.2, 0.4, 0.6, 0.8] {
            let h = Histogram::from_cdf(100, |e| pi3_cdf(e, ep).unwrap());
            let f = detect_features(&h, &[]).unwrap();
            let k = f.e_perp.expect("kink");
            assert!((k - ep).abs() <= 0.01 + 1e-12, "ep {ep}: {k}");
            assert_eq!(f.e_cusp, None);
        }
    }

    #[test]
    fn universal_curve_has_no_features() {
        let h = Histogram::from_cdf(100, universal_cdf);
        assert_eq!(detect_features(&h, &[]).unwrap(), DetectedFeatures::default());
    }

    #[test]
    fn too_few_samples() {
        let mut h = Histogram::from_cdf(100, universal_cdf);
        h.sample_count = 5_000;
        assert!(matches!(
            detect_features(&h, &[]),
            Err(Error::InsufficientResolution { .. })
        ));
    }

    #[test]
    fn atom_reported() {
        let h = Histogram::from_cdf(100, universal_cdf);
        let atoms = [Atom { weight: 0.3, location: 0.7 }];
        assert_eq!(detect_features(&h, &atoms).unwrap().e1, Some(0.7));
    }

    #[test]
    fn empty_density_has_no_features() {
        let h = Histogram::empty(100);
        let atoms = [Atom { weight: 1.0, location: 1.0 }];
        let f = detect_features(&h, &atoms).unwrap();
        assert_eq!(f, DetectedFeatures { e1: Some(1.0), ..Default::default() });
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
