//! Property-based checks of structural invariants.

use drsc::chain_dynamics::{build_transfer_matrix, evolve_chain, ChainPropagator};
use drsc::cooling::{suppression_factor, SuppressionWindow};
use drsc::manifold::{build_coupling_chain, two_level_chain, CouplingChain, ManifoldScheme};
use drsc::motional::{fock_coupling, mean_n, thermal_distribution, PhononDistribution, TrapParams};
use drsc::thermometry::{rdp_filter, sideband_probe};
use proptest::prelude::*;

fn chain_for(i: usize) -> CouplingChain {
    match i {
        0 => build_coupling_chain(&ManifoldScheme::f7()).unwrap(),
        1 => build_coupling_chain(&ManifoldScheme::f8()).unwrap(),
        _ => two_level_chain(),
    }
}

fn scaled(d: &PhononDistribution, s: f64) -> PhononDistribution {
    PhononDistribution::new(d.probs().iter().map(|p| p * s).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fock_coupling_is_symmetric(n in 0i64..400, m in 0i64..400, eta in 0.01f64..0.3) {
        prop_assert_eq!(fock_coupling(n, m, eta).unwrap(), fock_coupling(m, n, eta).unwrap());
    }

    #[test]
    fn transfer_matrix_is_column_stochastic(c in 0usize..3, t in 0.0f64..2.0, eta in 0.02f64..0.15) {
        let chain = chain_for(c);
        let w = build_transfer_matrix(&chain, &TrapParams::with_eta(eta), t, 80).unwrap();
        for i in 0..=80 {
            let s: f64 = (0..=i).map(|j| w.get(i, j)).sum();
            prop_assert!((s - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn coupling_signs_do_not_matter(c in 0usize..3, n in 0usize..150, t in 0.0f64..1.5, mask in any::<u16>()) {
        let chain = chain_for(c);
        let mut flipped = chain.clone();
        for (k, s) in flipped.steps.iter_mut().enumerate().skip(1) {
            if mask >> (k % 16) & 1 == 1 {
                s.g = -s.g;
            }
        }
        let trap = TrapParams::with_eta(0.07);
        let a = evolve_chain(n, &chain, &trap, t).unwrap();
        let b = evolve_chain(n, &flipped, &trap, t).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn pulses_conserve_probability_and_never_heat(c in 0usize..3, nbar in 0.1f64..10.0, t in 0.0f64..2.0) {
        let chain = chain_for(c);
        let d = thermal_distribution(nbar, 120).unwrap();
        let prop = ChainPropagator::new(&chain, &TrapParams::with_eta(0.07), 120).unwrap();
        let out = prop.apply(&d, t).unwrap();
        prop_assert!((out.total() - d.total()).abs() < 1e-10);
        prop_assert!(mean_n(&out).unwrap() <= mean_n(&d).unwrap() + 1e-12);
    }

    #[test]
    fn thermal_sideband_identity(nbar in 0.05f64..8.0, t in 0.05f64..5.0) {
        let d = thermal_distribution(nbar, 600).unwrap();
        let r = sideband_probe(&d, &TrapParams::with_eta(0.07), t).unwrap();
        prop_assert!((r.p_red / r.p_blue - nbar / (nbar + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn sideband_estimate_is_scale_free(nbar in 0.05f64..5.0, t in 0.1f64..3.0, s in 0.01f64..1.0) {
        let trap = TrapParams::with_eta(0.07);
        let d = thermal_distribution(nbar, 80).unwrap();
        let a = sideband_probe(&d, &trap, t).unwrap().nbar_sb;
        let b = sideband_probe(&scaled(&d, s), &trap, t).unwrap().nbar_sb;
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn suppression_is_scale_free(c in 0usize..3, t in 0.01f64..1.0, s in 0.01f64..1.0) {
        let chain = chain_for(c);
        let trap = TrapParams::with_eta(0.07);
        let w = SuppressionWindow { lo: 30, hi: 60 };
        let d = thermal_distribution(20.0, w.required_n_max(&chain)).unwrap();
        let a = suppression_factor(&chain, &trap, t, &d, Some(w)).unwrap();
        let b = suppression_factor(&chain, &trap, t, &scaled(&d, s), Some(w)).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn rdp_never_raises_mean(c in 0usize..3, nbar in 0.01f64..3.0, t in 0.05f64..2.0, cut in 0usize..5) {
        let chain = chain_for(c);
        let mut p = thermal_distribution(nbar, 60).unwrap().probs().to_vec();
        p[cut] *= 3.0;
        let d = PhononDistribution::new(p).unwrap();
        let out = rdp_filter(&d, &chain, &TrapParams::with_eta(0.07), t).unwrap();
        prop_assert!(mean_n(&out.conditioned).unwrap() <= mean_n(&d).unwrap() + 1e-12);
    }
}
