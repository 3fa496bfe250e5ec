use entpdf_core::compose::{compose_pdf, evaluate_pdf, extract_markers, weights_from_eigenvalues};
use entpdf_core::features::detect_features;
use entpdf_core::haar::SamplingConfig;
use entpdf_core::reconstruct::build_state_from_entanglements;
use entpdf_core::spectral::eig_hermitian;

const SPECTRUM: [f64; 4] = [0.385, 0.288, 0.231, 0.096];

#[test]
fn four_level_state_keeps_its_features() {
    let mu = weights_from_eigenvalues(SPECTRUM).unwrap().mu;
    let rho = build_state_from_entanglements(mu, Some(0.09), Some((0.89, 0.80)), Some(0.6)).unwrap();
    let sd = eig_hermitian(&rho);
    for (a, b) in sd.eigenvalues.iter().zip(SPECTRUM) {
        assert!((a - b).abs() < 1e-9);
    }
    let m = extract_markers(&rho);
    assert!((m.e1.unwrap() - 0.09).abs() < 1e-6);
    assert!((m.e_max.unwrap() - 0.89).abs() < 1e-9);
    assert!((m.e_cusp.unwrap() - 0.80).abs() < 1e-9);
    assert!((m.e_perp.unwrap() - 0.6).abs() < 1e-6);

    let pdf = compose_pdf(&m).unwrap();
    assert!((pdf.total_weight() - 1.0).abs() < 1e-9);
    let rendered = evaluate_pdf(&pdf, &SamplingConfig::default()).unwrap();
    let atom_mass: f64 = rendered.atoms.iter().map(|a| a.weight).sum();
    assert!((rendered.histogram.total_mass() + atom_mass - 1.0).abs() < 2e-3);

    let f = detect_features(&rendered.histogram, &rendered.atoms).unwrap();
    println!("{f:?}");
    assert!((f.e1.unwrap() - 0.09).abs() <= 0.01);
    assert!((f.e_cusp.unwrap() - 0.80).abs() <= 0.01 + 1e-12);
    assert!((f.e_perp.unwrap() - 0.6).abs() <= 0.01 + 1e-12);
}

#[test]
fn features_found_across_seeds_and_dual_entanglements() {
    let mu = weights_from_eigenvalues(SPECTRUM).unwrap().mu;
    for ep in [0.2, 0.4, 0.6] {
        let rho = build_state_from_entanglements(mu, Some(0.09), Some((0.89, 0.80)), Some(ep)).unwrap();
        let pdf = compose_pdf(&extract_markers(&rho)).unwrap();
        for seed in 0..5 {
            let r = evaluate_pdf(&pdf, &SamplingConfig { seed, ..Default::default() }).unwrap();
            let f = detect_features(&r.histogram, &r.atoms).unwrap();
            assert!((f.e_cusp.unwrap() - 0.8).abs() <= 0.01 + 1e-12, "ep {ep} seed {seed}");
            assert!((f.e_max.unwrap() - 0.89).abs() <= 0.01 + 1e-12, "ep {ep} seed {seed}");
            assert!((f.e_perp.unwrap() - ep).abs() <= 0.01 + 1e-12, "ep {ep} seed {seed}");
        }
    }
}
