//! Chain evolution against direct RK4 integration of the Schrödinger equation.

mod common;

use common::chain_ode::rk4_chain;
use drsc::chain_dynamics::{chain_hamiltonian_offdiag, evolve_chain, pi_time};
use drsc::manifold::{build_coupling_chain, two_level_chain, CouplingChain, ManifoldScheme};
use drsc::motional::TrapParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn check(chain: &CouplingChain, eta: f64, n: usize, t: f64) {
    let trap = TrapParams::with_eta(eta);
    let h = chain_hamiltonian_offdiag(chain, eta, n).unwrap();
    let tau = t * pi_time(chain, eta).unwrap();
    let steps = ((tau * 200.0).ceil() as usize).max(200);
    let want = rk4_chain(&h, tau, steps);
    let got = evolve_chain(n, chain, &trap, t).unwrap();
    for (k, (a, b)) in got.iter().zip(&want).enumerate() {
        assert!((a - b).abs() < 1e-8, "n={n} t={t} eta={eta} site {k}: {a} vs {b}");
    }
}

#[test]
fn randomized_grid_matches_rk4() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let chains = [
        build_coupling_chain(&ManifoldScheme::f7()).unwrap(),
        build_coupling_chain(&ManifoldScheme::f8()).unwrap(),
        two_level_chain(),
    ];
    for _ in 0..40 {
        let chain = &chains[rng.gen_range(0..3)];
        let eta = rng.gen_range(0.03..0.15);
        let n = rng.gen_range(0..220);
        let t = rng.gen_range(0.0..1.5);
        check(chain, eta, n, t);
    }
}
