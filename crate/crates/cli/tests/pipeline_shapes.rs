//! Shape and distribution checks on data emitted by the scan pipeline.

use fock_core::{loss_channel, thermal_state, TruncationDim};
use opsim::{run_phase_scan, ExperimentConfig};
use quadrature::quadrature_pdf;

#[test]
fn scan_shows_bell_to_volcano_transition() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = ExperimentConfig::default();
    config.v = 1.0;
    config.seed = 2;
    let summary = run_phase_scan(&config, dir.path()).unwrap();
    assert_eq!(summary.phases.len(), 9);

    let read_counts = |file: &str| -> Vec<(f64, f64, f64)> {
        let text = std::fs::read_to_string(dir.path().join(file)).unwrap();
        text.lines()
            .skip(1)
            .map(|line| {
                let mut parts = line.split(',');
                let left: f64 = parts.next().unwrap().parse().unwrap();
                let right: f64 = parts.next().unwrap().parse().unwrap();
                let count: f64 = parts.next().unwrap().parse().unwrap();
                (left, right, count)
            })
            .collect()
    };

    // φ = 0: bell shape, maximum bin at the origin (averaged over a small
    // central window against shot noise)
    let bell = read_counts(&summary.phases[0].histogram_file);
    let center_of = |row: &(f64, f64, f64)| 0.5 * (row.0 + row.1);
    let max_bin = bell
        .iter()
        .max_by(|a, b| a.2.partial_cmp(&b.2).unwrap())
        .unwrap();
    assert!(
        center_of(max_bin).abs() < 0.5,
        "bell maximum at x = {}",
        center_of(max_bin)
    );

    // φ = π: volcano, central window clearly below the side lobes
    let volcano = read_counts(&summary.phases[8].histogram_file);
    let window_mean = |rows: &[(f64, f64, f64)], lo: f64, hi: f64| -> f64 {
        let picked: Vec<f64> = rows
            .iter()
            .filter(|r| center_of(r) >= lo && center_of(r) <= hi)
            .map(|r| r.2)
            .collect();
        picked.iter().sum::<f64>() / picked.len() as f64
    };
    let center = window_mean(&volcano, -0.3, 0.3);
    let left_lobe = window_mean(&volcano, -1.6, -0.9);
    let right_lobe = window_mean(&volcano, 0.9, 1.6);
    assert!(
        center < 0.93 * left_lobe && center < 0.93 * right_lobe,
        "no central dip: center {center}, lobes {left_lobe}/{right_lobe}"
    );
}

#[test]
fn commutator_scan_matches_lossy_thermal() {
    // phi_list = [0] with an arbitrary K: the emitted histogram must be
    // statistically indistinguishable (χ² at the 1% level) from the plain
    // lossy thermal distribution.
    let dir = tempfile::tempdir().unwrap();
    let mut config = ExperimentConfig::default();
    config.phi_list = vec![0.0];
    config.k = 2.7;
    config.v = 1.0;
    config.samples_per_phase = 50_000;
    config.seed = 4;
    let summary = run_phase_scan(&config, dir.path()).unwrap();

    let text =
        std::fs::read_to_string(dir.path().join(&summary.phases[0].histogram_file)).unwrap();
    let rows: Vec<(f64, f64, f64)> = text
        .lines()
        .skip(1)
        .map(|line| {
            let mut parts = line.split(',');
            (
                parts.next().unwrap().parse().unwrap(),
                parts.next().unwrap().parse().unwrap(),
                parts.next().unwrap().parse().unwrap(),
            )
        })
        .collect();
    let observed_total: f64 = rows.iter().map(|r| r.2).sum();

    // expected bin masses of the lossy thermal model, Simpson per bin
    let dim = TruncationDim::new(config.n_max).unwrap();
    let (th, _) = thermal_state(config.mean_n, dim).unwrap();
    let lossy = loss_channel(&th, config.eta_total).unwrap();
    let bin_mass = |a: f64, b: f64| -> f64 {
        let steps = 16;
        let h = (b - a) / steps as f64;
        let mut acc = quadrature_pdf(&lossy, a) + quadrature_pdf(&lossy, b);
        for i in 1..steps {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * quadrature_pdf(&lossy, a + i as f64 * h);
        }
        acc * h / 3.0
    };
    let masses: Vec<f64> = rows.iter().map(|r| bin_mass(r.0, r.1)).collect();
    let in_range: f64 = masses.iter().sum();

    let mut chi2 = 0.0;
    let mut dof = 0usize;
    for (row, mass) in rows.iter().zip(&masses) {
        let expected = observed_total * mass / in_range;
        if expected < 5.0 {
            continue;
        }
        let delta = row.2 - expected;
        chi2 += delta * delta / expected;
        dof += 1;
    }
    // 1%-level cut via the normal approximation to χ²_dof
    let cut = dof as f64 + 2.33 * (2.0 * dof as f64).sqrt();
    assert!(chi2 < cut, "chi2 = {chi2:.1} over {dof} bins (cut {cut:.1})");
}
