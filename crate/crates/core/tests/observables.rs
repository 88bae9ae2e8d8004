use rabi_core::observables::level_diagram;
use rabi_core::solver::{FockBasis, SectorPair};
use rabi_core::{emission_spectrum, mean_photon_ground, solve_fock_oracle, ModelParams, SpectrumConfig};

#[test]
fn weights_are_complete() {
    for &g in &[0.05, 0.1, 0.5, 0.8, 2.0] {
        let s = emission_spectrum(&ModelParams::resonant(g), &SpectrumConfig::default()).unwrap();
        assert!((s.weight_sum - 1.0).abs() < 1e-8, "g={g}: {}", s.weight_sum);
        assert!(s.lines.iter().all(|l| l.frequency >= 0.0));
    }
}

#[test]
fn peak_count_transition() {
    let count = |g: f64| {
        emission_spectrum(&ModelParams::resonant(g), &SpectrumConfig::default())
            .unwrap()
            .peaks
            .len()
    };
    assert_eq!(count(0.0), 1);
    assert_eq!(count(0.1), 2);
    assert_eq!(count(0.8), 3);
}

#[test]
fn splittings_at_g08() {
    let s = emission_spectrum(&ModelParams::resonant(0.8), &SpectrumConfig::default()).unwrap();
    assert!((s.splittings[0] - 1.18).abs() < 0.01, "{:?}", s.splittings);
    assert!((s.splittings[1] - 0.697).abs() < 0.01, "{:?}", s.splittings);
    assert!(s.has_resolved_splitting());
}

#[test]
fn no_splitting_at_strong_coupling() {
    let s = emission_spectrum(&ModelParams::resonant(2.0), &SpectrumConfig::default()).unwrap();
    assert!(s.lines[0].frequency < 1e-3, "{}", s.lines[0].frequency);
    assert_eq!(s.peaks.len(), 1);
    assert!(s.peaks[0].weight > 0.99);
    assert!(!s.has_resolved_splitting());
}

#[test]
fn rwa_limit_peaks() {
    let g = 0.01;
    let s = emission_spectrum(&ModelParams::resonant(g), &SpectrumConfig::default()).unwrap();
    assert_eq!(s.peaks.len(), 2);
    assert!((s.peaks[0].frequency - (1.0 - g)).abs() < 0.02 * g);
    assert!((s.peaks[1].frequency - (1.0 + g)).abs() < 0.02 * g);
}

#[test]
fn curve_integrates_to_the_window_mass() {
    let cfg = SpectrumConfig {
        nu_min: -2.0,
        nu_max: 6.0,
        nu_step: 0.0005,
        ..Default::default()
    };
    let s = emission_spectrum(&ModelParams::resonant(0.3), &cfg).unwrap();
    let area: f64 = s.curve.iter().sum::<f64>() * cfg.nu_step;
    // Lorentzian tails beyond the window carry about 2κ/(π·distance)
    assert!((area - 1.0).abs() < 0.01, "{area}");
    let mid = s.grid.len() / 2;
    assert!((s.curve[mid] - s.intensity(s.grid[mid])).abs() < 1e-14);
}

#[test]
fn photon_number_against_oracle() {
    let p = ModelParams::resonant(1.0);
    let oracle = solve_fock_oracle(&p, 120).unwrap();
    let want = oracle.states[0].mean_photon();
    let got = mean_photon_ground(&p).unwrap();
    assert!((got - want).abs() < 1e-8, "{got} vs {want}");
}

#[test]
fn large_coupling_ground_energy() {
    let lv = level_diagram(&ModelParams::resonant(0.0), &[4.0], 2).unwrap();
    let e0 = lv[0].levels[0].energy;
    assert!((e0 + 16.0).abs() < 0.01 * 16.0, "{e0}");
}

#[test]
fn level_diagram_is_grid_ordered() {
    let grid: Vec<f64> = (0..=10).map(|i| 0.3 * i as f64).collect();
    let rows = level_diagram(&ModelParams::resonant(0.0), &grid, 6).unwrap();
    for (row, g) in rows.iter().zip(&grid) {
        assert_eq!(row.g, *g);
        assert_eq!(row.levels.len(), 6);
        assert!(row.levels.windows(2).all(|w| w[0].energy <= w[1].energy));
    }
}

#[test]
fn spectrum_from_prebuilt_basis() {
    let pair = SectorPair::solve(&ModelParams::resonant(0.8)).unwrap();
    let basis = FockBasis::build(&pair).unwrap();
    let a = rabi_core::observables::emission_from_basis(&basis, &SpectrumConfig::default()).unwrap();
    let b = emission_spectrum(&ModelParams::resonant(0.8), &SpectrumConfig::default()).unwrap();
    assert_eq!(a.lines, b.lines);
}
