//! Subcommands. Each writes its files and returns a summary for standard
//! output.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use entpdf_core::compose::{compose_pdf, evaluate_pdf, extract_markers, MarkerSet};
use entpdf_core::features::{detect_features, DetectedFeatures};
use entpdf_core::haar::{
    pi2_markers, pi3_cdf, pi3_density, sample_pi2, sample_pi3, Atom, Histogram, Pi2Markers,
    SamplingConfig,
};
use entpdf_core::linalg::{c, Vec4, ZERO};
use entpdf_core::measures::{
    find_non_monotone_pair, negativity, pure_entanglement, wootters_concurrence, NonMonotonePair,
};
use entpdf_core::pps::{build_pps, pps_pdf_weights, PseudoPureSpec};
use entpdf_core::random::{random_density_matrix_with, rng_from_seed};
use entpdf_core::reconstruct::{build_state, invert_pi2};
use entpdf_core::spectral::eig_hermitian;
use entpdf_core::PureState;
use serde::{Deserialize, Serialize};

use crate::files::{to_json, MarkerFile, PsiFile, StateFile};
use crate::format::{csv, fmt15, round15};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "entpdf", version, about = "Entanglement probability densities of two-qubit states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Markers and composite density of a density matrix.
    Analyze(AnalyzeArgs),
    /// Density of a two-dimensional subspace.
    Subspace(SubspaceArgs),
    /// Closed-form and sampled density of a three-dimensional subspace.
    Pi3(Pi3Args),
    /// Pseudopure state report.
    Pps(PpsArgs),
    /// A density matrix with the given markers.
    Reconstruct(ReconstructArgs),
    /// Concurrence and negativity over random density matrices.
    Compare(CompareArgs),
}

#[derive(Clone, Debug, Args)]
pub struct SamplingArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Clone, Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub bins: usize,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Debug, Args)]
pub struct SubspaceArgs {
    #[arg(long, requires = "y", conflicts_with_all = ["emax", "ecusp"])]
    pub x: Option<f64>,
    #[arg(long, requires = "x")]
    pub y: Option<f64>,
    #[arg(long, requires = "ecusp")]
    pub emax: Option<f64>,
    #[arg(long, requires = "emax")]
    pub ecusp: Option<f64>,
    #[arg(long, default_value_t = 100)]
    pub bins: usize,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Debug, Args)]
pub struct Pi3Args {
    #[arg(long)]
    pub eperp: f64,
    #[arg(long, default_value_t = 100)]
    pub bins: usize,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Debug, Args)]
pub struct PpsArgs {
    #[arg(long)]
    pub epsilon: f64,
    /// `bell` or a JSON file {"psi": [[re, im] x 4]}.
    #[arg(long, default_value = "bell")]
    pub psi: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Debug, Args)]
pub struct ReconstructArgs {
    #[arg(long)]
    pub markers: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Debug, Args)]
pub struct CompareArgs {
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(cli: &Cli) -> Result<String, CliError> {
    Ok(match &cli.command {
        Command::Analyze(a) => analyze(a)?.to_string(),
        Command::Subspace(a) => subspace(a)?.to_string(),
        Command::Pi3(a) => pi3(a)?.to_string(),
        Command::Pps(a) => pps(a)?.to_string(),
        Command::Reconstruct(a) => reconstruct(a)?.to_string(),
        Command::Compare(a) => compare(a)?.to_string(),
    })
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn sampling_config(bins: usize, s: &SamplingArgs) -> Result<SamplingConfig, CliError> {
    if bins == 0 || s.samples == 0 {
        return Err(CliError::Input("bins and samples must be positive".into()));
    }
    Ok(SamplingConfig {
        samples: s.samples,
        seed: s.seed,
        bins,
    })
}

fn density_rows(h: &Histogram) -> Vec<Vec<f64>> {
    h.centers().into_iter().zip(&h.densities).map(|(e, d)| vec![e, *d]).collect()
}

fn atom_rows(atoms: &[Atom]) -> Vec<Vec<f64>> {
    atoms.iter().map(|a| vec![a.location, a.weight]).collect()
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), fmt15)
}

pub struct AnalyzeSummary {
    pub markers: MarkerSet,
    pub detected: Option<DetectedFeatures>,
    pub mass: f64,
}

impl fmt::Display for AnalyzeSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.markers;
        let mu: Vec<String> = m.mu.iter().copied().map(fmt15).collect();
        writeln!(f, "mu      {}", mu.join(" "))?;
        writeln!(f, "e1      {}", opt(m.e1))?;
        writeln!(f, "e_max   {}", opt(m.e_max))?;
        writeln!(f, "e_cusp  {}", opt(m.e_cusp))?;
        writeln!(f, "e_perp  {}", opt(m.e_perp))?;
        writeln!(f, "mass    {}", fmt15(self.mass))?;
        match &self.detected {
            Some(d) => write!(
                f,
                "detected e1 {} e_cusp {} e_max {} e_perp {}",
                opt(d.e1),
                opt(d.e_cusp),
                opt(d.e_max),
                opt(d.e_perp)
            ),
            None => write!(f, "detected (resolution too coarse)"),
        }
    }
}

pub fn analyze(a: &AnalyzeArgs) -> Result<AnalyzeSummary, CliError> {
    let cfg = sampling_config(a.bins, &a.sampling)?;
    let rho = parse_json::<StateFile>(&a.state)?.to_density()?;
    let markers = extract_markers(&rho);
    let pdf = compose_pdf(&markers)?;
    let rendered = evaluate_pdf(&pdf, &cfg)?;
    create_dir(&a.out)?;
    write(&a.out.join("markers.json"), &to_json(&MarkerFile::from(&markers)))?;
    let rows = if pdf.continuous.is_empty() {
        Vec::new()
    } else {
        density_rows(&rendered.histogram)
    };
    write(&a.out.join("pdf.csv"), &csv(&["bin_center", "density"], rows))?;
    write(&a.out.join("atoms.csv"), &csv(&["location", "weight"], atom_rows(&rendered.atoms)))?;
    let mass = rendered.histogram.total_mass() + rendered.atoms.iter().map(|x| x.weight).sum::<f64>();
    Ok(AnalyzeSummary {
        markers,
        detected: detect_features(&rendered.histogram, &rendered.atoms).ok(),
        mass,
    })
}

pub struct SubspaceSummary {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// `None` when every state of the subspace is separable.
    pub markers: Option<Pi2Markers>,
}

impl fmt::Display for SubspaceSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "x {} y {} z {}", fmt15(self.x), fmt15(self.y), fmt15(self.z))?;
        match &self.markers {
            Some(m) => write!(
                f,
                "e_max {} e_cusp {} mu_angle {} p_at_emax {}",
                fmt15(m.e_max),
                fmt15(m.e_cusp),
                fmt15(m.mu_angle),
                fmt15(m.p_at_emax)
            ),
            None => write!(f, "all states separable: atom at E = 0"),
        }
    }
}

pub fn subspace(a: &SubspaceArgs) -> Result<SubspaceSummary, CliError> {
    let cfg = sampling_config(a.bins, &a.sampling)?;
    let (x, y, z) = match (a.x, a.y, a.emax, a.ecusp) {
        (Some(x), Some(y), None, None) => {
            let z2 = 1.0 - x * x - y * y;
            if x < 0.0 || y < 0.0 || z2 < -1e-12 {
                return Err(CliError::Input(format!(
                    "need x, y >= 0 and x^2 + y^2 <= 1, got x = {x}, y = {y}"
                )));
            }
            (x, y, z2.max(0.0).sqrt())
        }
        (None, None, Some(e_max), Some(e_cusp)) => invert_pi2(e_max, e_cusp)?,
        _ => {
            return Err(CliError::Input(
                "give exactly one of (--x, --y) or (--emax, --ecusp)".into(),
            ))
        }
    };
    let markers = pi2_markers(x, y).ok();
    create_dir(&a.out)?;
    let (e_max, e_cusp) = markers.map_or((0.0, 0.0), |m| (m.e_max, m.e_cusp));
    let file = MarkerFile {
        mu: [0.0, 1.0, 0.0, 0.0],
        e1: None,
        e_cusp: Some(round15(e_cusp)),
        e_max: Some(round15(e_max)),
        e_perp: None,
        angles: Default::default(),
    };
    write(&a.out.join("markers.json"), &to_json(&file))?;
    let (rows, atoms) = match markers {
        Some(_) => (density_rows(&sample_pi2(x, y, &cfg)?), Vec::new()),
        None => (Vec::new(), vec![Atom { weight: 1.0, location: 0.0 }]),
    };
    write(&a.out.join("pdf.csv"), &csv(&["bin_center", "density"], rows))?;
    write(&a.out.join("atoms.csv"), &csv(&["location", "weight"], atom_rows(&atoms)))?;
    Ok(SubspaceSummary { x, y, z, markers })
}

/// Grid size of `closed_form.csv`.
pub const CLOSED_FORM_POINTS: usize = 10_001;

/// cos t |00⟩ + sin t |11⟩ with entanglement `e`.
pub fn schmidt_state(e: f64) -> PureState {
    let t = 0.5 * e.clamp(0.0, 1.0).asin();
    PureState::new(Vec4::new(c(t.cos(), 0.0), ZERO, ZERO, c(t.sin(), 0.0)))
        .expect("unit vector")
}

pub struct Pi3Summary {
    pub e_perp: f64,
    pub l1: f64,
    pub sampled: Histogram,
}

impl fmt::Display for Pi3Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e_perp {} L1 {}", fmt15(self.e_perp), fmt15(self.l1))
    }
}

pub fn pi3(a: &Pi3Args) -> Result<Pi3Summary, CliError> {
    let cfg = sampling_config(a.bins, &a.sampling)?;
    let ep = a.eperp;
    if !(0.0..1.0).contains(&ep) {
        return Err(CliError::Input(format!("need 0 <= eperp < 1, got {ep}")));
    }
    pi3_density(0.5, ep)?;
    create_dir(&a.out)?;
    let last = (CLOSED_FORM_POINTS - 1) as f64;
    let grid = (0..CLOSED_FORM_POINTS).map(|k| {
        let e = k as f64 / last;
        vec![e, pi3_density(e, ep).expect("checked above")]
    });
    write(&a.out.join("closed_form.csv"), &csv(&["e", "density"], grid))?;
    let sampled = sample_pi3(&schmidt_state(ep), &cfg);
    write(&a.out.join("sampled.csv"), &csv(&["bin_center", "density"], density_rows(&sampled)))?;
    let exact = Histogram::from_cdf(cfg.bins, |e| pi3_cdf(e, ep).expect("checked above"));
    Ok(Pi3Summary {
        e_perp: ep,
        l1: sampled.l1_distance(&exact),
        sampled,
    })
}

/// Contents of `report.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PpsReport {
    pub epsilon: f64,
    pub mu1: f64,
    pub mu4: f64,
    pub atom_location: f64,
    pub concurrence: f64,
    pub negativity: f64,
}

impl fmt::Display for PpsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "epsilon {} mu1 {} mu4 {} atom at {} concurrence {} negativity {}",
            fmt15(self.epsilon),
            fmt15(self.mu1),
            fmt15(self.mu4),
            fmt15(self.atom_location),
            fmt15(self.concurrence),
            fmt15(self.negativity)
        )
    }
}

pub fn pps(a: &PpsArgs) -> Result<PpsReport, CliError> {
    let psi = if a.psi == "bell" {
        PureState::bell_phi_plus()
    } else {
        parse_json::<PsiFile>(Path::new(&a.psi))?.to_state()?
    };
    let spec = PseudoPureSpec::new(a.epsilon, psi)?;
    let rho = build_pps(&spec);
    let (mu1, mu4) = pps_pdf_weights(a.epsilon)?;
    let report = PpsReport {
        epsilon: round15(a.epsilon),
        mu1: round15(mu1),
        mu4: round15(mu4),
        atom_location: round15(pure_entanglement(spec.psi())),
        concurrence: round15(wootters_concurrence(&rho)),
        negativity: round15(negativity(&rho)),
    };
    create_dir(&a.out)?;
    write(&a.out.join("report.json"), &to_json(&report))?;
    Ok(report)
}

pub struct ReconstructSummary {
    pub eigenvalues: [f64; 4],
}

impl fmt::Display for ReconstructSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ev: Vec<String> = self.eigenvalues.iter().copied().map(fmt15).collect();
        write!(f, "eigenvalues {}", ev.join(" "))
    }
}

pub fn reconstruct(a: &ReconstructArgs) -> Result<ReconstructSummary, CliError> {
    let file: MarkerFile = parse_json(&a.markers)?;
    let rho = build_state(&MarkerSet::from(&file))?;
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    write(&a.out, &to_json(&StateFile::from_density(&rho)))?;
    Ok(ReconstructSummary {
        eigenvalues: eig_hermitian(&rho).eigenvalues,
    })
}

/// Smallest ensemble accepted by [`compare`].
pub const MIN_COMPARE_SAMPLES: usize = 1_000;
/// Pairs must have negativities closer than this...
pub const NEGATIVITY_GAP: f64 = 1e-3;
/// ...and concurrences further apart than this.
pub const CONCURRENCE_GAP: f64 = 0.05;
/// Allowed round-off in C ≥ N.
pub const BOUND_TOL: f64 = 1e-9;

/// One ensemble member.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompareRow {
    pub concurrence: f64,
    pub negativity: f64,
    pub rank: usize,
}

pub struct CompareSummary {
    pub rows: Vec<CompareRow>,
    pub pair: NonMonotonePair,
    /// Largest N − C over all rows.
    pub worst_bound_excess: f64,
    /// Largest |C − N| over the rank-1 rows.
    pub worst_pure_gap: f64,
}

impl fmt::Display for CompareSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = (self.rows[self.pair.first], self.rows[self.pair.second]);
        writeln!(f, "states {}", self.rows.len())?;
        writeln!(
            f,
            "pair {} (C {}, N {}) and {} (C {}, N {}): |dN| {} |dC| {}",
            self.pair.first,
            fmt15(a.concurrence),
            fmt15(a.negativity),
            self.pair.second,
            fmt15(b.concurrence),
            fmt15(b.negativity),
            fmt15(self.pair.negativity_gap),
            fmt15(self.pair.concurrence_gap)
        )?;
        writeln!(f, "max N - C {}", fmt15(self.worst_bound_excess))?;
        write!(f, "max |C - N| on rank 1 {}", fmt15(self.worst_pure_gap))
    }
}

/// Concurrence and negativity of `n` random density matrices with ranks
/// cycling through 1..=4.
pub fn compare_rows(n: usize, seed: u64) -> Vec<CompareRow> {
    let mut rng = rng_from_seed(seed);
    (0..n)
        .map(|i| {
            let rank = 1 + i % 4;
            let rho = random_density_matrix_with(&mut rng, rank).expect("valid rank");
            CompareRow {
                concurrence: wootters_concurrence(&rho),
                negativity: negativity(&rho),
                rank,
            }
        })
        .collect()
}

pub fn compare(a: &CompareArgs) -> Result<CompareSummary, CliError> {
    if a.samples < MIN_COMPARE_SAMPLES {
        return Err(CliError::Input(format!(
            "need at least {MIN_COMPARE_SAMPLES} samples, got {}",
            a.samples
        )));
    }
    let rows = compare_rows(a.samples, a.seed);
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    let body = csv(
        &["concurrence", "negativity", "rank"],
        rows.iter().map(|r| vec![r.concurrence, r.negativity, r.rank as f64]),
    );
    write(&a.out, &body)?;
    let worst_bound_excess = rows.iter().map(|r| r.negativity - r.concurrence).fold(f64::MIN, f64::max);
    let worst_pure_gap = rows
        .iter()
        .filter(|r| r.rank == 1)
        .map(|r| (r.concurrence - r.negativity).abs())
        .fold(0.0, f64::max);
    if worst_bound_excess > BOUND_TOL {
        return Err(CliError::GoalNotMet(format!(
            "a row violates C >= N by {worst_bound_excess:e}"
        )));
    }
    let cn: Vec<(f64, f64)> = rows.iter().map(|r| (r.concurrence, r.negativity)).collect();
    let pair = find_non_monotone_pair(&cn, NEGATIVITY_GAP, CONCURRENCE_GAP).ok_or_else(|| {
        CliError::GoalNotMet(format!(
            "no pair with |dN| < {NEGATIVITY_GAP} and |dC| > {CONCURRENCE_GAP}; increase --samples"
        ))
    })?;
    Ok(CompareSummary {
        rows,
        pair,
        worst_bound_excess,
        worst_pure_gap,
    })
}
