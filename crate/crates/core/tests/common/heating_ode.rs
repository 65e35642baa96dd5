//! RK4 integration of the heating rate equation.

/// `dp_n/dt = A+[n p_{n-1} - (n+1) p_n] + A-[(n+1) p_{n+1} - n p_n]`, with the
/// flow out of the top bin discarded.
pub fn rate_rhs(p: &[f64], ap: f64, am: f64) -> Vec<f64> {
    let n = p.len();
    (0..n)
        .map(|i| {
            let fi = i as f64;
            let mut v = -((fi + 1.0) * ap + fi * am) * p[i];
            if i > 0 {
                v += fi * ap * p[i - 1];
            }
            if i + 1 < n {
                v += (fi + 1.0) * am * p[i + 1];
            }
            v
        })
        .collect()
}

pub fn rk4(p0: &[f64], ap: f64, am: f64, t: f64, steps: usize) -> Vec<f64> {
    let dt = t / steps as f64;
    let mut p = p0.to_vec();
    let axpy = |y: &[f64], d: &[f64], s: f64| -> Vec<f64> { y.iter().zip(d).map(|(a, b)| a + s * b).collect() };
    for _ in 0..steps {
        let k1 = rate_rhs(&p, ap, am);
        let k2 = rate_rhs(&axpy(&p, &k1, dt / 2.0), ap, am);
        let k3 = rate_rhs(&axpy(&p, &k2, dt / 2.0), ap, am);
        let k4 = rate_rhs(&axpy(&p, &k3, dt), ap, am);
        for i in 0..p.len() {
            p[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    p
}
