//! Derivative-free minimizers: Brent's bounded scalar search and a restarted
//! Nelder–Mead simplex.

/// Result of a scalar minimization.
#[derive(Clone, Copy, Debug)]
pub struct ScalarMin {
    pub x: f64,
    pub f: f64,
    pub evals: usize,
}

/// Brent's method on `[lo, hi]` (golden section with parabolic steps).
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, xtol: f64) -> ScalarMin {
    const GOLD: f64 = 0.381_966_011_250_105_1;
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut x = a + GOLD * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let mut evals = 1;
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;

    for _ in 0..500 {
        let m = 0.5 * (a + b);
        let tol1 = xtol + 1e-12 * x.abs();
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            e = d;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if m >= x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= m { a - x } else { b - x };
            d = GOLD * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else if d > 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = f(u);
        evals += 1;
        if fu <= fx {
            if u >= x {
                a = x
            } else {
                b = x
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u
            } else {
                b = u
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    ScalarMin { x, f: fx, evals }
}

/// Locates the first local minimum of `f` on a uniform grid over `[lo, hi]`
/// and polishes it with [`brent`] inside the bracketing grid cells.
///
/// Falls back to the global grid minimum when the sampled curve never turns
/// upward.
pub fn first_local_min<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, steps: usize, xtol: f64) -> ScalarMin {
    let h = (hi - lo) / steps as f64;
    let values: Vec<f64> = (0..=steps).map(|i| f(lo + h * i as f64)).collect();
    let idx = (1..steps)
        .find(|&i| values[i] <= values[i - 1] && values[i] < values[i + 1])
        .unwrap_or_else(|| values.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i).unwrap_or(0));
    let a = lo + h * idx.saturating_sub(1) as f64;
    let b = (lo + h * (idx + 1) as f64).min(hi);
    let mut best = brent(&mut f, a, b, xtol);
    best.evals += steps + 1;
    if values[idx] < best.f {
        best.x = lo + h * idx as f64;
        best.f = values[idx];
    }
    best
}

#[derive(Clone, Debug)]
pub struct NelderMeadOptions {
    pub max_evals: usize,
    /// Convergence threshold on the simplex extent (infinity norm).
    pub xtol: f64,
    /// Convergence threshold on the spread of objective values.
    pub ftol: f64,
    pub initial_step: f64,
    /// Number of simplex rebuilds around the incumbent after convergence.
    pub restarts: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { max_evals: 20_000, xtol: 1e-4, ftol: 1e-12, initial_step: 0.05, restarts: 3 }
    }
}

#[derive(Clone, Debug)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub converged: bool,
    /// Best objective after every simplex iteration.
    pub trace: Vec<f64>,
}

/// Nelder–Mead with standard coefficients and restarts from the incumbent.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], opts: &NelderMeadOptions) -> NelderMeadResult {
    let dim = x0.len();
    let mut evals = 0usize;
    let mut trace = Vec::new();
    let mut best_x = x0.to_vec();
    let mut best_f = f(x0);
    evals += 1;
    let mut converged = false;

    for round in 0..=opts.restarts {
        let start_f = best_f;
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
        simplex.push((best_x.clone(), best_f));
        for i in 0..dim {
            let mut x = best_x.clone();
            let step = if x[i].abs() > 1e-8 { opts.initial_step * x[i].abs().max(0.1) } else { opts.initial_step };
            x[i] += step;
            let fx = f(&x);
            evals += 1;
            simplex.push((x, fx));
        }

        converged = false;
        while evals < opts.max_evals {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            trace.push(simplex[0].1);
            let f_spread = simplex[dim].1 - simplex[0].1;
            let extent = simplex[1..]
                .iter()
                .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if extent < opts.xtol && f_spread.abs() <= opts.ftol.max(1e-15 * simplex[0].1.abs()) {
                converged = true;
                break;
            }
            if extent < opts.xtol * 1e-3 {
                converged = true;
                break;
            }

            let mut centroid = vec![0.0; dim];
            for (x, _) in &simplex[..dim] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / dim as f64;
                }
            }
            let along = |coef: f64, worst: &[f64]| -> Vec<f64> {
                centroid.iter().zip(worst).map(|(c, w)| c + coef * (c - w)).collect()
            };
            let worst = simplex[dim].0.clone();
            let xr = along(1.0, &worst);
            let fr = f(&xr);
            evals += 1;
            if fr < simplex[0].1 {
                let xe = along(2.0, &worst);
                let fe = f(&xe);
                evals += 1;
                simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[dim - 1].1 {
                simplex[dim] = (xr, fr);
            } else {
                let (xc, fc) = if fr < simplex[dim].1 {
                    let xc = along(0.5, &worst);
                    let fc = f(&xc);
                    (xc, fc)
                } else {
                    let xc = along(-0.5, &worst);
                    let fc = f(&xc);
                    (xc, fc)
                };
                evals += 1;
                if fc < simplex[dim].1.min(fr) {
                    simplex[dim] = (xc, fc);
                } else {
                    let x_best = simplex[0].0.clone();
                    for (x, fx) in simplex.iter_mut().skip(1) {
                        for (xi, bi) in x.iter_mut().zip(&x_best) {
                            *xi = bi + 0.5 * (*xi - bi);
                        }
                        *fx = f(x);
                        evals += 1;
                    }
                }
            }
        }

        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[0].1 < best_f {
            best_f = simplex[0].1;
            best_x = simplex[0].0.clone();
        }
        let improved = start_f - best_f > opts.ftol.max(1e-14 * best_f.abs());
        if (round > 0 && !improved) || evals >= opts.max_evals {
            break;
        }
    }

    NelderMeadResult { x: best_x, f: best_f, evals, converged, trace }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_parabola_vertex() {
        let r = brent(|x| (x - 0.3).powi(2) + 1.0, -1.0, 2.0, 1e-10);
        assert!((r.x - 0.3).abs() < 1e-8);
        assert!((r.f - 1.0).abs() < 1e-15);
    }

    #[test]
    fn first_local_min_prefers_shortest() {
        // two wells, the second slightly deeper
        let f = |x: f64| -(-(x - 0.2f64).powi(2) / 0.005).exp() - 1.05 * (-(x - 1.4f64).powi(2) / 0.005).exp();
        let r = first_local_min(f, 0.0, 2.0, 200, 1e-9);
        assert!((r.x - 0.2).abs() < 1e-4, "{r:?}");
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let opts = NelderMeadOptions { xtol: 1e-8, ftol: 1e-16, initial_step: 0.5, ..Default::default() };
        let r = nelder_mead(rosen, &[-1.2, 1.0], &opts);
        assert!((r.x[0] - 1.0).abs() < 1e-5 && (r.x[1] - 1.0).abs() < 1e-5, "{r:?}");
        assert!(r.trace.windows(2).all(|w| w[1] <= w[0]));
    }
}
