//! Heating propagation against RK4 integration of the rate equation.

mod common;

use common::heating_ode::rk4;
use drsc::heating::{propagate_heating, HeatingModel};
use drsc::motional::{mean_n, thermal_distribution, PhononDistribution};

#[test]
fn thermal_one_after_one_second() {
    let d = thermal_distribution(1.0, 60).unwrap();
    let got = propagate_heating(&d, &HeatingModel::symmetric(1.0), 1.0).unwrap();
    let want = rk4(d.probs(), 1.0, 1.0, 1.0, 20_000);
    let worst = got.probs().iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-6, "max per-bin deviation {worst}");
}

#[test]
fn asymmetric_rates_relax_to_steady_state() {
    // <n>(t) = n_inf + (n0 - n_inf) exp(-(A- - A+) t), n_inf = A+/(A- - A+)
    let model = HeatingModel { a_plus: 1.0, a_minus: 3.0 };
    let d = thermal_distribution(2.0, 80).unwrap();
    let t: f64 = 1.0;
    let got = mean_n(&propagate_heating(&d, &model, t).unwrap()).unwrap();
    let n_inf = 0.5;
    let want = n_inf + (2.0 - n_inf) * (-2.0 * t).exp();
    assert!((got - want).abs() / want < 1e-3, "{got} vs {want}");
}

#[test]
fn mean_slope_over_many_steps() {
    let a = 5.58;
    let d = PhononDistribution::ground_state(150);
    let mut cur = d;
    let dt = 1e-4;
    for _ in 0..10_000 {
        cur = propagate_heating(&cur, &HeatingModel::symmetric(a), dt).unwrap();
    }
    let slope = mean_n(&cur).unwrap() / 1.0;
    assert!((slope - a).abs() / a < 0.01, "{slope}");
}
