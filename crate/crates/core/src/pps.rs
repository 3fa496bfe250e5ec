//! NMR pseudopure states ρ = (1−ε)/4·1 + ε|ψ⟩⟨ψ|.

use crate::error::{Error, Result};
use crate::linalg::Mat4;
use crate::measures::{negativity, wootters_concurrence};
use crate::state::{DensityMatrix, PureState};

#[derive(Clone, Debug, PartialEq)]
pub struct PseudoPureSpec {
    epsilon: f64,
    psi: PureState,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            reason: format!("{epsilon} outside [0, 1]"),
        });
    }
    Ok(())
}

impl PseudoPureSpec {
    pub fn new(epsilon: f64, psi: PureState) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(Self { epsilon, psi })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn psi(&self) -> &PureState {
        &self.psi
    }
}

pub fn build_pps(spec: &PseudoPureSpec) -> DensityMatrix {
    let e = spec.epsilon;
    let m = Mat4::identity().scale((1.0 - e) / 4.0) + spec.psi.projector().scale(e);
    DensityMatrix::new(m).expect("convex combination of states")
}

/// (μ1, μ4) = (4ε/(1+3ε), (1−ε)/(1+3ε)); μ2 = μ3 = 0.
pub fn pps_pdf_weights(epsilon: f64) -> Result<(f64, f64)> {
    check_epsilon(epsilon)?;
    let d = 1.0 + 3.0 * epsilon;
    Ok((4.0 * epsilon / d, (1.0 - epsilon) / d))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdRow {
    pub epsilon: f64,
    pub mu1: f64,
    pub concurrence: f64,
    pub negativity: f64,
}

pub fn concurrence_threshold_scan(psi: &PureState, epsilons: &[f64]) -> Result<Vec<ThresholdRow>> {
    epsilons
        .iter()
        .map(|&epsilon| {
            let rho = build_pps(&PseudoPureSpec::new(epsilon, psi.clone())?);
            Ok(ThresholdRow {
                epsilon,
                mu1: pps_pdf_weights(epsilon)?.0,
                concurrence: wootters_concurrence(&rho),
                negativity: negativity(&rho),
            })
        })
        .collect()
}

/// Smallest ε at which the concurrence exceeds `positive`, located by
/// bisection on [0, 1] to within `tol`. `None` if even ε = 1 is not
/// entangled.
pub fn concurrence_onset(psi: &PureState, positive: f64, tol: f64) -> Option<f64> {
    let conc = |e: f64| {
        wootters_concurrence(&build_pps(&PseudoPureSpec {
            epsilon: e,
            psi: psi.clone(),
        }))
    };
    if conc(1.0) <= positive {
        return None;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    if conc(lo) > positive {
        return Some(0.0);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if conc(mid) > positive {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(0.5 * (lo + hi))
}
