//! RK4 integration of the chain Schrödinger equation.

use num_complex::Complex64;

/// Site populations after time `t` starting from site 0.
pub fn rk4_chain(h: &[f64], t: f64, steps: usize) -> Vec<f64> {
    let k = h.len() + 1;
    let deriv = |psi: &[Complex64]| -> Vec<Complex64> {
        (0..k)
            .map(|i| {
                let mut v = Complex64::new(0.0, 0.0);
                if i > 0 {
                    v += psi[i - 1] * h[i - 1];
                }
                if i + 1 < k {
                    v += psi[i + 1] * h[i];
                }
                v * Complex64::new(0.0, -1.0)
            })
            .collect()
    };
    let mut psi = vec![Complex64::new(0.0, 0.0); k];
    psi[0] = Complex64::new(1.0, 0.0);
    let dt = t / steps as f64;
    for _ in 0..steps {
        let k1 = deriv(&psi);
        let y2: Vec<_> = psi.iter().zip(&k1).map(|(y, d)| y + d * (dt / 2.0)).collect();
        let k2 = deriv(&y2);
        let y3: Vec<_> = psi.iter().zip(&k2).map(|(y, d)| y + d * (dt / 2.0)).collect();
        let k3 = deriv(&y3);
        let y4: Vec<_> = psi.iter().zip(&k3).map(|(y, d)| y + d * dt).collect();
        let k4 = deriv(&y4);
        for i in 0..k {
            psi[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
        }
    }
    psi.iter().map(|a| a.norm_sqr()).collect()
}
