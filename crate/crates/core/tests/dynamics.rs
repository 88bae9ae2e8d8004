use std::f64::consts::PI;

use proptest::prelude::*;
use rabi_core::dynamics::{expand_initial_state, recommended_n_tr, rms_difference};
use rabi_core::strong::perturbative_evolution;
use rabi_core::{evolve_exact, DynamicsConfig, ModelParams, TimeAxis};

fn sized(p: ModelParams, nbar: f64) -> ModelParams {
    p.with_n_tr(recommended_n_tr(&p, nbar))
}

fn omega_t(t_max: f64, t_step: f64, nbar: f64) -> DynamicsConfig {
    DynamicsConfig {
        nbar,
        t_max,
        t_step,
        axis: TimeAxis::OmegaT,
        ..Default::default()
    }
}

#[test]
fn uncoupled_atom_is_stationary_off_resonance() {
    let p = sized(ModelParams::resonant(0.0).with_omega_eg(1.7), 5.0);
    let r = evolve_exact(&p, &omega_t(30.0, 0.25, 5.0)).unwrap();
    assert!(r.p.iter().all(|v| (v + 1.0).abs() < 1e-12));
}

#[test]
fn expansion_captures_the_initial_state() {
    let p = sized(ModelParams::resonant(1.0), 10.0);
    let e = expand_initial_state(&p, 10.0).unwrap();
    assert!((e.captured_norm - 1.0).abs() < 1e-8);
    assert_eq!(e.f_even.len(), p.n_tr + 1);
    // |g⟩|α⟩ has weight in both sectors
    let we: f64 = e.f_even.iter().map(|f| f * f).sum();
    assert!(we > 0.1 && we < 0.9);
}

#[test]
fn zeroth_order_pipeline_equals_exact_without_splitting() {
    let p = sized(ModelParams::resonant(2.0).with_omega_eg(0.0), 10.0);
    let cfg = omega_t(4.0 * PI, 2.0 * PI / 200.0, 10.0);
    let exact = evolve_exact(&p, &cfg).unwrap();
    let zeroth = perturbative_evolution(&p, &cfg, 0).unwrap();
    let d = rms_difference(&exact, &zeroth, cfg.t_max).unwrap();
    assert!(d < 1e-8, "{d}");
}

#[test]
fn strong_coupling_is_two_pi_periodic_without_splitting() {
    let p = sized(ModelParams::resonant(2.0).with_omega_eg(0.0), 10.0);
    let n = 200;
    let r = evolve_exact(&p, &omega_t(4.0 * PI, 2.0 * PI / n as f64, 10.0)).unwrap();
    for i in 0..n {
        assert!((r.p[i] - r.p[i + n]).abs() < 1e-9);
    }
}

#[test]
fn tau_axis_scales_with_coupling() {
    let cfg = DynamicsConfig {
        t_max: 20.0,
        t_step: 0.5,
        nbar: 4.0,
        ..Default::default()
    };
    let p = sized(ModelParams::resonant(0.3), 4.0);
    let r = evolve_exact(&p, &cfg).unwrap();
    let q = sized(ModelParams::resonant(0.3), 4.0);
    let s = evolve_exact(
        &q,
        &DynamicsConfig {
            axis: TimeAxis::OmegaT,
            t_max: 20.0 / 0.6,
            t_step: 0.5 / 0.6,
            ..cfg
        },
    )
    .unwrap();
    for (a, b) in r.p.iter().zip(&s.p) {
        assert!((a - b).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn conservation_laws(g in 0.0f64..2.5, w_eg in 0.0f64..2.0, nbar in 0.0f64..8.0) {
        let p = sized(ModelParams { omega: 1.0, omega_eg: w_eg, g, n_tr: 1 }, nbar);
        let r = evolve_exact(&p, &omega_t(15.0, 0.3, nbar)).unwrap();
        prop_assert!((r.p[0] + 1.0).abs() < 1e-8);
        prop_assert!(r.p.iter().all(|v| v.abs() <= 1.0 + 1e-9));
        for rho in r.rho.as_ref().unwrap() {
            prop_assert!((rho.trace() - 1.0).abs() < 1e-9);
            let [lo, hi] = rho.eigenvalues();
            prop_assert!(lo >= -1e-9 && hi <= 1.0 + 1e-9);
        }
        let width = r.spectral_width.unwrap();
        if width > 0.0 {
            prop_assert!(r.energy_drift.unwrap() < 1e-8 * width);
        }
    }
}
