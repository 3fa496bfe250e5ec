//! JSON file formats.

use entpdf_core::compose::{MarkerAngles, MarkerSet};
use entpdf_core::linalg::{c, Mat4, Vec4};
use entpdf_core::subspace::BlochAngles;
use entpdf_core::{DensityMatrix, PureState};
use serde::{Deserialize, Serialize};

use crate::format::round15;
use crate::CliError;

/// `{"rho": [[[re, im] × 4] × 4]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub rho: Vec<Vec<[f64; 2]>>,
}

impl StateFile {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        Self {
            rho: (0..4)
                .map(|i| (0..4).map(|j| [round15(m[(i, j)].re), round15(m[(i, j)].im)]).collect())
                .collect(),
        }
    }

    pub fn to_density(&self) -> Result<DensityMatrix, CliError> {
        if self.rho.len() != 4 || self.rho.iter().any(|r| r.len() != 4) {
            return Err(CliError::Input("rho must be a 4x4 array of [re, im] pairs".into()));
        }
        let m = Mat4::from_fn(|i, j| c(self.rho[i][j][0], self.rho[i][j][1]));
        Ok(DensityMatrix::new(m)?)
    }
}

/// `{"psi": [[re, im] × 4]}`, a normalized pure state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiFile {
    pub psi: [[f64; 2]; 4],
}

impl PsiFile {
    pub fn to_state(&self) -> Result<PureState, CliError> {
        let v = Vec4::from_fn(|i, _| c(self.psi[i][0], self.psi[i][1]));
        Ok(PureState::new(v)?)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnglesFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_perp: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_perp: Option<f64>,
}

impl AnglesFile {
    fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

/// JSON form of a [`MarkerSet`]; absent markers are omitted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkerFile {
    pub mu: [f64; 4],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_cusp: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_perp: Option<f64>,
    #[serde(default, skip_serializing_if = "AnglesFile::is_empty")]
    pub angles: AnglesFile,
}

fn pair(a: Option<f64>, b: Option<f64>) -> Option<BlochAngles> {
    Some(BlochAngles { theta: a?, phi: b? })
}

impl From<&MarkerSet> for MarkerFile {
    fn from(m: &MarkerSet) -> Self {
        let r = |v: Option<f64>| v.map(round15);
        Self {
            mu: m.mu.map(round15),
            e1: r(m.e1),
            e_cusp: r(m.e_cusp),
            e_max: r(m.e_max),
            e_perp: r(m.e_perp),
            angles: AnglesFile {
                theta: r(m.angles.psi1.map(|a| a.theta)),
                phi: r(m.angles.psi1.map(|a| a.phi)),
                theta_perp: r(m.angles.perp.map(|a| a.theta)),
                phi_perp: r(m.angles.perp.map(|a| a.phi)),
            },
        }
    }
}

impl From<&MarkerFile> for MarkerSet {
    /// An angle pair with one member missing is dropped.
    fn from(f: &MarkerFile) -> Self {
        let a = &f.angles;
        MarkerSet {
            mu: f.mu,
            e1: f.e1,
            e_max: f.e_max,
            e_cusp: f.e_cusp,
            e_perp: f.e_perp,
            angles: MarkerAngles {
                psi1: pair(a.theta, a.phi),
                perp: pair(a.theta_perp, a.phi_perp),
            },
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}
