//! Suppression factors, pulse-sequence strategies and the dual-thermal
//! decomposition of cooling histories.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain_dynamics::ChainPropagator;
use crate::error::{Error, Result};
use crate::manifold::{CoolingScheme, CouplingChain};
use crate::motional::{
    mean_n, red_sideband_plateau, thermal_distribution, thermal_with_coverage, PhononDistribution, TrapParams,
    DEFAULT_COVERAGE,
};
use crate::optim::{brent, first_local_min, nelder_mead, NelderMeadOptions};

/// Upper end of the pulse-length search, in units of `T_f`.
pub const MAX_PULSE_TIME: f64 = 2.5;
const SCAN_STEPS: usize = 500;
/// Relative coupling level bounding the default suppression window.
pub const PLATEAU_FRACTION: f64 = 0.98;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Fixed,
    GlobalOpt,
    Heuristic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseSequence {
    pub strategy: Strategy,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scheme: Option<CoolingScheme>,
    pub times: Vec<f64>,
}

impl PulseSequence {
    pub fn new(strategy: Strategy, times: Vec<f64>) -> Self {
        Self { strategy, scheme: None, times }
    }

    pub fn total_time(&self) -> f64 {
        self.times.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Band of phonon numbers over which the per-pulse suppression is averaged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuppressionWindow {
    pub lo: usize,
    pub hi: usize,
}

impl SuppressionWindow {
    /// Band where the red-sideband coupling `|Ω_{n,n-1}|` lies within
    /// [`PLATEAU_FRACTION`] of its first maximum.
    ///
    /// Deep in the thermal tail the per-pulse ratio is set by this nearly
    /// constant coupling, which gives the parallel asymptotes their common
    /// spacing. The window never starts inside the first `bandwidth` phonon
    /// numbers.
    pub fn asymptotic(chain: &CouplingChain, trap: &TrapParams) -> Result<Self> {
        let (lo, hi) = red_sideband_plateau(trap.eta, PLATEAU_FRACTION)?;
        let lo = lo.max(chain.bandwidth());
        Ok(Self { lo, hi: hi.max(lo) })
    }

    /// Truncation an initial distribution needs so every inflow into the
    /// window is represented.
    pub fn required_n_max(&self, chain: &CouplingChain) -> usize {
        self.hi + chain.bandwidth() - 1
    }
}

fn resolve_window(
    window: Option<SuppressionWindow>,
    chain: &CouplingChain,
    trap: &TrapParams,
) -> Result<SuppressionWindow> {
    match window {
        Some(w) if w.lo > w.hi => Err(Error::InvalidArgument(format!("window [{}, {}] is empty", w.lo, w.hi))),
        Some(w) => Ok(w),
        None => SuppressionWindow::asymptotic(chain, trap),
    }
}

fn suppression_with(prop: &ChainPropagator, p: &[f64], t: f64, w: SuppressionWindow) -> Result<f64> {
    let mut ln_sum = 0.0;
    for n in w.lo..=w.hi {
        let mut inflow = 0.0;
        for d in 0..prop.bandwidth() {
            if p[n + d] > 0.0 {
                inflow += prop.column(n + d, t).get(d).copied().unwrap_or(0.0) * p[n + d];
            }
        }
        ln_sum += (inflow / p[n]).ln();
    }
    Ok((ln_sum / (w.hi - w.lo + 1) as f64).exp())
}

fn check_window(init: &PhononDistribution, chain: &CouplingChain, w: SuppressionWindow) -> Result<()> {
    let need = w.required_n_max(chain);
    if init.n_max() < need {
        return Err(Error::DimensionMismatch { expected: need, got: init.n_max() });
    }
    if let Some(n) = (w.lo..=w.hi).find(|&n| init.get(n) <= 0.0) {
        return Err(Error::ZeroProbabilityInWindow { lo: w.lo, hi: w.hi, n });
    }
    Ok(())
}

/// Geometric mean of `(W(t)p)(n) / p(n)` over the suppression window.
pub fn suppression_factor(
    chain: &CouplingChain,
    trap: &TrapParams,
    t: f64,
    init: &PhononDistribution,
    window: Option<SuppressionWindow>,
) -> Result<f64> {
    let w = resolve_window(window, chain, trap)?;
    check_window(init, chain, w)?;
    let prop = ChainPropagator::new(chain, trap, w.required_n_max(chain))?;
    suppression_with(&prop, init.probs(), t, w)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPulse {
    pub t: f64,
    pub a: f64,
}

/// Pulse length at the first local minimum of the suppression factor.
///
/// Later minima can be marginally deeper but need pulses several times
/// longer; the first one is the operating point.
pub fn optimize_fixed_pulse(
    chain: &CouplingChain,
    trap: &TrapParams,
    init: &PhononDistribution,
    window: Option<SuppressionWindow>,
) -> Result<FixedPulse> {
    let w = resolve_window(window, chain, trap)?;
    check_window(init, chain, w)?;
    let prop = ChainPropagator::new(chain, trap, w.required_n_max(chain))?;
    let p = init.probs();
    let eval = |t: f64| suppression_with(&prop, p, t, w).unwrap_or(f64::INFINITY);
    let h = MAX_PULSE_TIME / SCAN_STEPS as f64;
    let best = first_local_min(eval, h, MAX_PULSE_TIME, SCAN_STEPS - 1, 1e-7);
    Ok(FixedPulse { t: best.x, a: best.f })
}

/// Thermal initial state long enough for suppression analysis of `nbar`.
pub fn thermal_for_suppression(chain: &CouplingChain, trap: &TrapParams, nbar: f64) -> Result<PhononDistribution> {
    let w = SuppressionWindow::asymptotic(chain, trap)?;
    thermal_distribution(nbar, w.required_n_max(chain))
}

/// Smallest `N` with `a^N < target`.
pub fn pulses_for_tail(a: f64, target: f64) -> Result<usize> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidArgument(format!("suppression factor {a} must lie in (0, 1)")));
    }
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::ProbabilityOutOfRange(target));
    }
    let n = (target.ln() / a.ln()).floor() as usize + 1;
    Ok(n)
}

/// Common pulse length minimizing the final mean phonon number after
/// `n_pulses` identical pulses.
pub fn optimize_fixed_duration(
    prop: &ChainPropagator,
    init: &PhononDistribution,
    n_pulses: usize,
) -> Result<FixedPulse> {
    let eval = |t: f64| prop.apply_sequence(init, &vec![t; n_pulses]).and_then(|d| mean_n(&d)).unwrap_or(f64::INFINITY);
    let steps = 250;
    let h = MAX_PULSE_TIME / steps as f64;
    let (mut best_i, mut best_f) = (1, f64::INFINITY);
    for i in 1..=steps {
        let f = eval(h * i as f64);
        if f < best_f {
            best_i = i;
            best_f = f;
        }
    }
    let lo = h * (best_i - 1).max(1) as f64;
    let hi = (h * (best_i + 1) as f64).min(MAX_PULSE_TIME);
    let polished = brent(eval, lo, hi, 1e-6);
    if polished.f < best_f {
        Ok(FixedPulse { t: polished.x, a: polished.f })
    } else {
        Ok(FixedPulse { t: h * best_i as f64, a: best_f })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GlobalOptions {
    pub seed: u64,
    /// Number of starting points, the first being the best fixed-duration
    /// sequence.
    pub starts: usize,
    /// Relative spread of the random starts around the fixed-duration solution.
    pub spread: f64,
    pub max_evals: usize,
    pub restarts: usize,
}

impl Default for GlobalOptions {
    fn default() -> Self {
        Self { seed: 0, starts: 4, spread: 0.3, max_evals: 20_000, restarts: 3 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GlobalOptResult {
    pub sequence: PulseSequence,
    pub final_nbar: f64,
    pub evals: usize,
    pub converged: bool,
    /// Best objective after each simplex iteration of the winning start.
    pub trace: Vec<f64>,
}

fn final_nbar(prop: &ChainPropagator, init: &PhononDistribution, times: &[f64]) -> f64 {
    let t: Vec<f64> = times.iter().map(|x| x.abs()).collect();
    prop.apply_sequence(init, &t).and_then(|d| mean_n(&d)).unwrap_or(f64::INFINITY)
}

/// Multi-start Nelder–Mead over all pulse lengths, minimizing the final mean
/// phonon number. `warm_start` is tried in addition to the generated starts.
pub fn optimize_global_with(
    prop: &ChainPropagator,
    init: &PhononDistribution,
    n_pulses: usize,
    opts: &GlobalOptions,
    warm_start: Option<&[f64]>,
) -> Result<GlobalOptResult> {
    if n_pulses == 0 {
        return Err(Error::InvalidArgument("at least one pulse is required".into()));
    }
    if init.n_max() != prop.n_max() {
        return Err(Error::DimensionMismatch { expected: prop.n_max(), got: init.n_max() });
    }
    let fixed = optimize_fixed_duration(prop, init, n_pulses)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts = vec![vec![fixed.t; n_pulses]];
    if let Some(w) = warm_start {
        if w.len() != n_pulses {
            return Err(Error::DimensionMismatch { expected: n_pulses, got: w.len() });
        }
        starts.push(w.to_vec());
    }
    for _ in 1..opts.starts {
        starts.push((0..n_pulses).map(|_| fixed.t * (1.0 + opts.spread * rng.gen_range(-1.0..1.0))).collect());
    }
    let nm = NelderMeadOptions {
        max_evals: opts.max_evals,
        restarts: opts.restarts,
        initial_step: 0.1 * fixed.t.max(0.05),
        ..NelderMeadOptions::default()
    };
    let runs: Vec<_> = starts.par_iter().map(|x0| nelder_mead(|x| final_nbar(prop, init, x), x0, &nm)).collect();
    let mut best: Option<(Vec<f64>, f64, usize, bool, Vec<f64>)> = None;
    let mut evals = 0;
    for r in runs {
        evals += r.evals;
        let times: Vec<f64> = r.x.iter().map(|x| x.abs()).collect();
        let better = match &best {
            None => true,
            Some((bt, bf, ..)) => {
                let tol = 1e-12 * bf.abs().max(1e-300);
                r.f < bf - tol || ((r.f - bf).abs() <= tol && times.iter().sum::<f64>() < bt.iter().sum::<f64>())
            }
        };
        if better {
            best = Some((times, r.f, r.evals, r.converged, r.trace));
        }
    }
    let (times, f, _, converged, trace) = best.expect("at least one start");
    Ok(GlobalOptResult {
        sequence: PulseSequence::new(Strategy::GlobalOpt, times),
        final_nbar: f,
        evals,
        converged,
        trace,
    })
}

pub fn optimize_global(
    chain: &CouplingChain,
    trap: &TrapParams,
    init: &PhononDistribution,
    n_pulses: usize,
    opts: &GlobalOptions,
) -> Result<GlobalOptResult> {
    let prop = ChainPropagator::new(chain, trap, init.n_max())?;
    optimize_global_with(&prop, init, n_pulses, opts, None)
}

/// Globally optimized sequences for every pulse count `1..=max_pulses`.
///
/// Each count is warm-started from the previous optimum with one extra pulse,
/// so the optimal final mean phonon number never increases with the count.
pub fn optimize_global_sweep(
    chain: &CouplingChain,
    trap: &TrapParams,
    init: &PhononDistribution,
    max_pulses: usize,
    opts: &GlobalOptions,
) -> Result<Vec<GlobalOptResult>> {
    let prop = ChainPropagator::new(chain, trap, init.n_max())?;
    let mut out: Vec<GlobalOptResult> = Vec::with_capacity(max_pulses);
    for n in 1..=max_pulses {
        let warm = match out.last() {
            None => None,
            Some(prev) => {
                let after = prop.apply_sequence(init, &prev.sequence.times)?;
                let extra = optimize_fixed_duration(&prop, &after, 1)?;
                let mut w = prev.sequence.times.clone();
                w.push(extra.t);
                Some(w)
            }
        };
        let r = optimize_global_with(&prop, init, n, opts, warm.as_deref())?;
        out.push(r);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HeuristicOptions {
    /// Residual thermal fraction the short pulses must reach.
    pub tail_target: f64,
    /// Number of longer clean-up pulses.
    pub n_final: usize,
    /// Mean phonon number of the thermal state the clean-up pulses are
    /// optimized for.
    pub final_nbar: f64,
    pub window: Option<SuppressionWindow>,
}

impl Default for HeuristicOptions {
    fn default() -> Self {
        Self { tail_target: 0.01, n_final: 5, final_nbar: 5.0, window: None }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HeuristicPlan {
    pub sequence: PulseSequence,
    pub fixed: FixedPulse,
    pub n_short: usize,
}

/// `N` pulses of the suppression-optimal length, with `a^N` below the tail
/// target, followed by clean-up pulses optimized for a cold thermal state.
pub fn heuristic_sequence(
    chain: &CouplingChain,
    trap: &TrapParams,
    init: &PhononDistribution,
    opts: &HeuristicOptions,
    global: &GlobalOptions,
) -> Result<HeuristicPlan> {
    let nbar = mean_n(init)?;
    let w = resolve_window(opts.window, chain, trap)?;
    let probe = thermal_distribution(nbar, w.required_n_max(chain))?;
    let fixed = optimize_fixed_pulse(chain, trap, &probe, Some(w))?;
    let n_short = pulses_for_tail(fixed.a, opts.tail_target)?;
    let mut times = vec![fixed.t; n_short];
    if opts.n_final > 0 {
        let cold = thermal_with_coverage(opts.final_nbar, DEFAULT_COVERAGE)?;
        let tail = optimize_global(chain, trap, &cold, opts.n_final, global)?;
        times.extend(tail.sequence.times);
    }
    Ok(HeuristicPlan { sequence: PulseSequence::new(Strategy::Heuristic, times), fixed, n_short })
}

#[derive(Clone, Debug, Serialize)]
pub struct SuppressionFit {
    pub a: f64,
    pub window: SuppressionWindow,
    pub r_squared: f64,
    pub n_pulses: usize,
    /// Non-thermal part recovered after the last pulse.
    pub residual: PhononDistribution,
}

/// Minimum coefficient of determination for a geometric tail history.
pub const GEOMETRIC_R2_THRESHOLD: f64 = 0.99;

/// Splits a cooling history into a geometrically suppressed thermal part and
/// a residual.
///
/// `history[0]` is the initial thermal state and `history[k]` the state after
/// `k` pulses. The tail mass in `window` is fitted to `a^k`; the residual is
/// `(p_N - a^N p_0) / (1 - a^N)`.
pub fn dual_thermal_decompose(history: &[PhononDistribution], window: SuppressionWindow) -> Result<SuppressionFit> {
    if history.len() < 4 {
        return Err(Error::InvalidArgument(format!(
            "need at least three pulses of history, got {}",
            history.len().saturating_sub(1)
        )));
    }
    let n_max = history[0].n_max();
    if let Some(d) = history.iter().find(|d| d.n_max() != n_max) {
        return Err(Error::DimensionMismatch { expected: n_max, got: d.n_max() });
    }
    if window.lo > window.hi || window.hi > n_max {
        return Err(Error::InvalidArgument(format!("window [{}, {}] outside 0..={n_max}", window.lo, window.hi)));
    }
    let ys: Vec<f64> = history.iter().map(|d| d.probs()[window.lo..=window.hi].iter().sum::<f64>().ln()).collect();
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(Error::ZeroProbabilityInWindow { lo: window.lo, hi: window.hi, n: window.lo });
    }
    let k = ys.len() as f64;
    let xm = (k - 1.0) / 2.0;
    let ym = ys.iter().sum::<f64>() / k;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, y) in ys.iter().enumerate() {
        sxy += (i as f64 - xm) * (y - ym);
        sxx += (i as f64 - xm).powi(2);
    }
    let slope = sxy / sxx;
    let ss_tot: f64 = ys.iter().map(|y| (y - ym).powi(2)).sum();
    let ss_res: f64 = ys.iter().enumerate().map(|(i, y)| (y - ym - slope * (i as f64 - xm)).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    if r_squared < GEOMETRIC_R2_THRESHOLD {
        return Err(Error::NonGeometricHistory { r_squared, threshold: GEOMETRIC_R2_THRESHOLD });
    }
    let a = slope.exp();
    let n_pulses = history.len() - 1;
    let an = a.powi(n_pulses as i32);
    let (p0, pn) = (history[0].probs(), history[n_pulses].probs());
    let residual = PhononDistribution::from_raw(p0.iter().zip(pn).map(|(a0, b)| (b - an * a0) / (1.0 - an)).collect());
    Ok(SuppressionFit { a, window, r_squared, n_pulses, residual })
}

/// Optimizer trace as `iteration,objective` CSV rows.
pub fn trace_csv(trace: &[f64]) -> String {
    let mut out = String::from("iteration,objective\n");
    for (i, f) in trace.iter().enumerate() {
        out.push_str(&format!("{i},{f:.12e}\n"));
    }
    out
}
