use std::fs;
use std::path::Path;
use std::process::Command;

use entpdf_cli::files::{MarkerFile, StateFile};
use entpdf_core::compose::extract_markers;
use entpdf_core::haar::{sample_pi4, Histogram, SamplingConfig};
use entpdf_core::linalg::Mat4;
use entpdf_core::measures::pure_entanglement;
use entpdf_core::random::{random_density_matrix, random_unitary4_with, rng_from_seed};
use entpdf_core::reconstruct::lo_equivalent;
use entpdf_core::spectral::eig_hermitian;
use entpdf_core::{DensityMatrix, PureState};
use tempfile::TempDir;

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn entpdf(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_entpdf")).args(args).output().unwrap();
    Output {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

fn write_state(dir: &Path, name: &str, rho: &DensityMatrix) -> String {
    let p = path(dir, name);
    fs::write(&p, serde_json::to_string(&StateFile::from_density(rho)).unwrap()).unwrap();
    p
}

fn read_state(p: &str) -> DensityMatrix {
    serde_json::from_str::<StateFile>(&fs::read_to_string(p).unwrap())
        .unwrap()
        .to_density()
        .unwrap()
}

fn read_markers(p: &Path) -> MarkerFile {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

/// Rows of a CSV after checking the header and the trailing newline.
fn read_csv(p: &Path, header: &str) -> Vec<Vec<f64>> {
    let text = fs::read_to_string(p).unwrap();
    assert!(text.ends_with('\n') && !text.ends_with("\n\n"), "{}", p.display());
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(header));
    lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

fn histogram_of(rows: &[Vec<f64>]) -> Histogram {
    let mut h = Histogram::empty(rows.len());
    for (d, r) in h.densities.iter_mut().zip(rows) {
        *d = r[1];
    }
    h
}

fn spectrum_state(eigenvalues: [f64; 4], seed: u64) -> DensityMatrix {
    let u = random_unitary4_with(&mut rng_from_seed(seed));
    let d = Mat4::from_diagonal(&eigenvalues.map(|l| entpdf_core::linalg::c(l, 0.0)).into());
    DensityMatrix::new(u * d * u.adjoint()).unwrap()
}

#[test]
fn analyze_four_level_state() {
    let dir = TempDir::new().unwrap();
    let state = write_state(dir.path(), "s.json", &spectrum_state([0.385, 0.288, 0.231, 0.096], 1));
    let out = path(dir.path(), "out");
    let r = entpdf(&["analyze", "--state", &state, "--out", &out]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let m = read_markers(&dir.path().join("out/markers.json"));
    for (a, b) in m.mu.iter().zip([0.25195, 0.14805, 0.35065, 0.24935]) {
        assert!((a - b).abs() < 1e-5);
    }
    assert!(m.e1.is_some() && m.e_max.is_some() && m.e_cusp.is_some() && m.e_perp.is_some());
    let pdf = read_csv(&dir.path().join("out/pdf.csv"), "bin_center,density");
    let atoms = read_csv(&dir.path().join("out/atoms.csv"), "location,weight");
    assert_eq!(pdf.len(), 100);
    assert_eq!(atoms.len(), 1);
    let mass = histogram_of(&pdf).total_mass() + atoms[0][1];
    assert!((mass - 1.0).abs() < 2e-3);

    let again = path(dir.path(), "again");
    assert_eq!(entpdf(&["analyze", "--state", &state, "--out", &again]).code, 0);
    for f in ["markers.json", "pdf.csv", "atoms.csv"] {
        let a = fs::read(dir.path().join("out").join(f)).unwrap();
        let b = fs::read(dir.path().join("again").join(f)).unwrap();
        assert_eq!(a, b, "{f} differs between runs");
    }
}

#[test]
fn analyze_bell_projector() {
    let dir = TempDir::new().unwrap();
    let state = write_state(dir.path(), "bell.json", &DensityMatrix::from_pure(&PureState::bell_phi_plus()));
    let out = path(dir.path(), "out");
    assert_eq!(entpdf(&["analyze", "--state", &state, "--out", &out]).code, 0);
    assert_eq!(fs::read_to_string(dir.path().join("out/atoms.csv")).unwrap(), "location,weight\n1,1\n");
    assert_eq!(fs::read_to_string(dir.path().join("out/pdf.csv")).unwrap(), "bin_center,density\n");
}

#[test]
fn analyze_maximally_mixed_matches_sampled_universal_density() {
    let dir = TempDir::new().unwrap();
    let state = write_state(dir.path(), "mm.json", &DensityMatrix::maximally_mixed());
    let out = path(dir.path(), "out");
    assert_eq!(entpdf(&["analyze", "--state", &state, "--out", &out]).code, 0);
    let pdf = histogram_of(&read_csv(&dir.path().join("out/pdf.csv"), "bin_center,density"));
    assert!(pdf.l1_distance(&sample_pi4(&SamplingConfig::default())) < 0.02);
}

#[test]
fn analyze_rejects_invalid_state() {
    let dir = TempDir::new().unwrap();
    let p = path(dir.path(), "bad.json");
    let mut rho = vec![vec![[0.0, 0.0]; 4]; 4];
    (0..4).for_each(|i| rho[i][i] = [1.0, 0.0]);
    fs::write(&p, serde_json::to_string(&StateFile { rho }).unwrap()).unwrap();
    let r = entpdf(&["analyze", "--state", &p, "--out", &path(dir.path(), "out")]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("trace"), "{}", r.stderr);
    fs::write(&p, "{\"rho\": 3}").unwrap();
    assert_eq!(entpdf(&["analyze", "--state", &p, "--out", &path(dir.path(), "out")]).code, 2);
}

#[test]
fn subspace_from_entanglement_markers() {
    let dir = TempDir::new().unwrap();
    let out = path(dir.path(), "m");
    let r = entpdf(&["subspace", "--emax", "0.89", "--ecusp", "0.80", "--out", &out]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let m = read_markers(&dir.path().join("m/markers.json"));
    assert!((m.e_max.unwrap() - 0.89).abs() < 1e-12 && (m.e_cusp.unwrap() - 0.80).abs() < 1e-12);
    let h = histogram_of(&read_csv(&dir.path().join("m/pdf.csv"), "bin_center,density"));
    assert!((h.centers()[h.modal_bin()] - 0.80).abs() <= 0.01 + 1e-12);

    // The (x, y) form of the same subspace gives the same markers.
    let xy = r.stdout.lines().next().unwrap().split_whitespace().collect::<Vec<_>>();
    let out2 = path(dir.path(), "xy");
    assert_eq!(entpdf(&["subspace", "--x", xy[1], "--y", xy[3], "--out", &out2]).code, 0);
    let m2 = read_markers(&dir.path().join("xy/markers.json"));
    assert!((m2.e_max.unwrap() - 0.89).abs() < 1e-12 && (m2.e_cusp.unwrap() - 0.80).abs() < 1e-12);
}

#[test]
fn subspace_extreme_cases() {
    let dir = TempDir::new().unwrap();
    let flat = path(dir.path(), "flat");
    assert_eq!(entpdf(&["subspace", "--x", "0.7071", "--y", "0.7071", "--out", &flat]).code, 0);
    for row in read_csv(&dir.path().join("flat/pdf.csv"), "bin_center,density") {
        assert!((row[1] - 1.0).abs() < 0.05, "{row:?}");
    }
    let mono = path(dir.path(), "mono");
    assert_eq!(entpdf(&["subspace", "--x", "0", "--y", "0", "--out", &mono]).code, 0);
    let rows = read_csv(&dir.path().join("mono/pdf.csv"), "bin_center,density");
    assert!(rows[99][1] > 10.0 && rows[99][1] > rows[90][1] && rows[90][1] > rows[10][1]);
}

#[test]
fn subspace_input_errors() {
    let dir = TempDir::new().unwrap();
    let out = path(dir.path(), "o");
    assert_eq!(entpdf(&["subspace", "--emax", "0.5", "--ecusp", "0.8", "--out", &out]).code, 2);
    assert_eq!(entpdf(&["subspace", "--x", "0.9", "--y", "0.9", "--out", &out]).code, 2);
    let both = ["subspace", "--x", "0.5", "--y", "0.1", "--emax", "0.9", "--ecusp", "0.8", "--out", &out];
    assert_eq!(entpdf(&both).code, 2);
    assert_eq!(entpdf(&["subspace", "--out", &out]).code, 2);
}

fn trapezoid(rows: &[Vec<f64>]) -> f64 {
    rows.windows(2).map(|w| 0.5 * (w[1][0] - w[0][0]) * (w[0][1] + w[1][1])).sum()
}

#[test]
fn pi3_outputs() {
    let dir = TempDir::new().unwrap();
    for ep in ["0", "0.4", "0.8"] {
        let out = path(dir.path(), ep);
        let r = entpdf(&["pi3", "--eperp", ep, "--out", &out]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        let l1: f64 = r.stdout.split_whitespace().last().unwrap().parse().unwrap();
        assert!(l1 < 0.02, "{ep}: {l1}");
        let grid = read_csv(&dir.path().join(ep).join("closed_form.csv"), "e,density");
        assert_eq!(grid.len(), 10_001);
        assert!((trapezoid(&grid) - 1.0).abs() < 1e-6, "{ep}: {}", trapezoid(&grid));
        read_csv(&dir.path().join(ep).join("sampled.csv"), "bin_center,density");
        if ep == "0" {
            for row in &grid[1..grid.len() - 1] {
                let e = row[0];
                assert!((row[1] - 2.0 * e * (1.0 / e).acosh()).abs() < 1e-12);
            }
        }
    }
    assert_eq!(entpdf(&["pi3", "--eperp", "1", "--out", &path(dir.path(), "x")]).code, 2);
}

#[test]
fn pps_reports() {
    let dir = TempDir::new().unwrap();
    let report = |eps: &str| {
        let out = path(dir.path(), eps);
        let r = entpdf(&["pps", "--epsilon", eps, "--psi", "bell", "--out", &out]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        serde_json::from_str::<serde_json::Value>(&fs::read_to_string(dir.path().join(eps).join("report.json")).unwrap()).unwrap()
    };
    let r = report("1e-6");
    assert!((r["mu1"].as_f64().unwrap() - 3.999_988e-6).abs() < 1e-12);
    assert_eq!(r["concurrence"].as_f64(), Some(0.0));
    assert_eq!(r["negativity"].as_f64(), Some(0.0));
    let r = report("1");
    assert_eq!((r["mu1"].as_f64(), r["concurrence"].as_f64()), (Some(1.0), Some(1.0)));
    let r = report("0.5");
    assert!((r["concurrence"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert_eq!(entpdf(&["pps", "--epsilon", "1.5", "--out", &path(dir.path(), "bad")]).code, 2);

    let psi = path(dir.path(), "psi.json");
    fs::write(&psi, r#"{"psi": [[1, 0], [0, 0], [0, 0], [0, 0]]}"#).unwrap();
    let out = path(dir.path(), "product");
    assert_eq!(entpdf(&["pps", "--epsilon", "0.9", "--psi", &psi, "--out", &out]).code, 0);
}

#[test]
fn reconstruct_round_trip() {
    let dir = TempDir::new().unwrap();
    for seed in 0..5 {
        let rho = random_density_matrix(4, seed).unwrap();
        let state = write_state(dir.path(), "in.json", &rho);
        let a = path(dir.path(), "a");
        assert_eq!(entpdf(&["analyze", "--state", &state, "--samples", "10000", "--out", &a]).code, 0);
        let rebuilt = path(dir.path(), "rebuilt.json");
        let r = entpdf(&["reconstruct", "--markers", &path(dir.path(), "a/markers.json"), "--out", &rebuilt]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        let back = read_state(&rebuilt);
        let gap = extract_markers(&rho).difference(&extract_markers(&back)).unwrap();
        assert!(gap < 1e-6, "seed {seed}: {gap}");
        assert!(lo_equivalent(&rho, &back));
    }
}

#[test]
fn reconstruct_pure_and_invalid() {
    let dir = TempDir::new().unwrap();
    let write = |name: &str, json: &str| {
        let p = path(dir.path(), name);
        fs::write(&p, json).unwrap();
        p
    };
    let out = path(dir.path(), "s.json");
    let pure = write("pure.json", r#"{"mu": [1, 0, 0, 0], "e1": 1}"#);
    assert_eq!(entpdf(&["reconstruct", "--markers", &pure, "--out", &out]).code, 0);
    let sd = eig_hermitian(&read_state(&out));
    assert!((sd.eigenvalues[0] - 1.0).abs() < 1e-9);
    assert!((pure_entanglement(&sd.eigenvectors[0]) - 1.0).abs() < 1e-9);

    let bad = write("bad.json", r#"{"mu": [0, 1, 0, 0], "e_max": 0.5, "e_cusp": 0.8}"#);
    let r = entpdf(&["reconstruct", "--markers", &bad, "--out", &out]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("e_cusp"), "{}", r.stderr);

    let missing = write(
        "missing.json",
        r#"{"mu": [0.5, 0.5, 0, 0], "e1": 0.3, "e_max": 0.89, "e_cusp": 0.8}"#,
    );
    let r = entpdf(&["reconstruct", "--markers", &missing, "--out", &out]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("theta"), "{}", r.stderr);
}

#[test]
fn compare_small_ensemble() {
    let dir = TempDir::new().unwrap();
    let out = path(dir.path(), "c.csv");
    let r = entpdf(&["compare", "--samples", "4000", "--seed", "3", "--out", &out]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rows = read_csv(Path::new(&out), "concurrence,negativity,rank");
    assert_eq!(rows.len(), 4000);
    for row in &rows {
        assert!(row[0] >= row[1] - 1e-9);
        if row[2] == 1.0 {
            assert!((row[0] - row[1]).abs() < 1e-9);
        }
    }
    let first = fs::read(&out).unwrap();
    assert_eq!(entpdf(&["compare", "--samples", "4000", "--seed", "3", "--out", &out]).code, 0);
    assert_eq!(fs::read(&out).unwrap(), first);
    assert_eq!(entpdf(&["compare", "--samples", "10", "--out", &out]).code, 2);
}
