//! Sideband-ratio thermometry and Raman dark preparation.

use serde::{Deserialize, Serialize};

use crate::chain_dynamics::ChainPropagator;
use crate::error::{Error, Result};
use crate::manifold::CouplingChain;
use crate::motional::{fock_coupling, mean_n, thermal_distribution, PhononDistribution, TrapParams};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SidebandProbeResult {
    pub p_red: f64,
    pub p_blue: f64,
    /// In units of the red-sideband π-time of `n = 1`.
    pub probe_time: f64,
    pub nbar_sb: f64,
}

/// Red and blue sideband excitation after a resonant probe of length
/// `probe_time`, and the mean occupation inferred from their ratio.
pub fn sideband_probe(dist: &PhononDistribution, trap: &TrapParams, probe_time: f64) -> Result<SidebandProbeResult> {
    if !(probe_time > 0.0 && probe_time.is_finite()) {
        return Err(Error::InvalidArgument(format!("probe time {probe_time} must be positive")));
    }
    let eta = trap.eta;
    let tau = probe_time * std::f64::consts::PI / fock_coupling(1, 0, eta)?.abs();
    let (mut red, mut blue) = (0.0, 0.0);
    for (n, &p) in dist.probs().iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let n = n as i64;
        if n > 0 {
            red += p * (0.5 * fock_coupling(n, n - 1, eta)? * tau).sin().powi(2);
        }
        blue += p * (0.5 * fock_coupling(n, n + 1, eta)? * tau).sin().powi(2);
    }
    if blue == 0.0 {
        return Err(Error::ZeroBlueSideband);
    }
    let r = red / blue;
    if r >= 1.0 {
        return Err(Error::SidebandRatioNotBelowOne(r));
    }
    Ok(SidebandProbeResult { p_red: red, p_blue: blue, probe_time, nbar_sb: r / (1.0 - r) })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RdpOutcome {
    pub conditioned: PhononDistribution,
    pub success_probability: f64,
}

/// Keeps the part of each Fock state that a clearing pulse of length `t_clear`
/// leaves on the chain's start sublevel, then renormalizes.
pub fn rdp_filter(
    dist: &PhononDistribution,
    chain: &CouplingChain,
    trap: &TrapParams,
    t_clear: f64,
) -> Result<RdpOutcome> {
    rdp_filter_with_detection_error(dist, chain, trap, t_clear, 0.0)
}

/// As [`rdp_filter`], with a symmetric dark/bright misclassification
/// probability.
pub fn rdp_filter_with_detection_error(
    dist: &PhononDistribution,
    chain: &CouplingChain,
    trap: &TrapParams,
    t_clear: f64,
    detection_error: f64,
) -> Result<RdpOutcome> {
    if !(t_clear > 0.0 && t_clear.is_finite()) {
        return Err(Error::InvalidArgument(format!("clearing time {t_clear} must be positive")));
    }
    if !(0.0..=1.0).contains(&detection_error) {
        return Err(Error::ProbabilityOutOfRange(detection_error));
    }
    let total = dist.total();
    if total <= 0.0 {
        return Err(Error::ZeroMass);
    }
    let prop = ChainPropagator::new(chain, trap, dist.n_max())?;
    let kept: Vec<f64> = dist
        .probs()
        .iter()
        .enumerate()
        .map(|(n, &p)| {
            if p == 0.0 {
                return 0.0;
            }
            let stay = prop.column(n, t_clear)[0];
            p * ((1.0 - detection_error) * stay + detection_error * (1.0 - stay))
        })
        .collect();
    let retained: f64 = kept.iter().sum();
    if retained <= 0.0 {
        return Err(Error::ZeroRetainedMass);
    }
    let conditioned = PhononDistribution::from_raw(kept.iter().map(|k| k / retained).collect());
    Ok(RdpOutcome { conditioned, success_probability: retained / total })
}

/// Default clearing pulse, in units of `T_f`.
pub const DEFAULT_RDP_CLEAR_TIME: f64 = 1.0;

/// Kolmogorov–Smirnov distance between `dist` (normalized) and the thermal
/// state with the same mean. Returns `(n̄, D)`.
pub fn ks_distance_to_thermal(dist: &PhononDistribution) -> Result<(f64, f64)> {
    let d = dist.normalized()?;
    let nbar = mean_n(&d)?;
    let th = thermal_distribution(nbar, d.n_max())?;
    let (mut c1, mut c2, mut worst) = (0.0, 0.0, 0.0f64);
    for (a, b) in d.probs().iter().zip(th.probs()) {
        c1 += a;
        c2 += b;
        worst = worst.max((c1 - c2).abs());
    }
    Ok((nbar, worst))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{build_coupling_chain, ManifoldScheme};
    use crate::motional::thermal_with_coverage;

    fn trap() -> TrapParams {
        TrapParams::with_eta(0.07)
    }

    #[test]
    fn ground_state_probe() {
        let r = sideband_probe(&PhononDistribution::ground_state(10), &trap(), 1.0).unwrap();
        assert_eq!(r.p_red, 0.0);
        assert_eq!(r.nbar_sb, 0.0);
        assert!(r.p_blue > 0.0);
    }

    #[test]
    fn thermal_ratio_identity() {
        let d = thermal_with_coverage(2.0, 1.0 - 1e-15).unwrap();
        for t in [0.3, 1.0, 2.7] {
            let r = sideband_probe(&d, &trap(), t).unwrap();
            assert!((r.p_red / r.p_blue - 2.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn probe_rejects_bad_input() {
        let d = PhononDistribution::new(vec![0.0, 0.0]).unwrap();
        assert_eq!(sideband_probe(&d, &trap(), 1.0), Err(Error::ZeroBlueSideband));
        assert!(sideband_probe(&d, &trap(), 0.0).is_err());
    }

    #[test]
    fn rdp_on_ground_state() {
        let chain = build_coupling_chain(&ManifoldScheme::f7()).unwrap();
        let d = PhononDistribution::ground_state(20);
        let out = rdp_filter(&d, &chain, &trap(), 1.0).unwrap();
        assert_eq!(out.success_probability, 1.0);
        assert_eq!(out.conditioned, d);
    }

    #[test]
    fn rdp_lowers_mean() {
        let chain = build_coupling_chain(&ManifoldScheme::f7()).unwrap();
        let d = thermal_distribution(0.3, 50).unwrap();
        let out = rdp_filter(&d, &chain, &trap(), 1.0).unwrap();
        assert!(mean_n(&out.conditioned).unwrap() < mean_n(&d).unwrap());
        assert!(out.success_probability < 1.0);
    }

    #[test]
    fn rdp_detection_error_bounds() {
        let chain = build_coupling_chain(&ManifoldScheme::f7()).unwrap();
        let d = thermal_distribution(0.3, 50).unwrap();
        assert!(rdp_filter_with_detection_error(&d, &chain, &trap(), 1.0, 1.5).is_err());
        let noisy = rdp_filter_with_detection_error(&d, &chain, &trap(), 1.0, 0.1).unwrap();
        let clean = rdp_filter(&d, &chain, &trap(), 1.0).unwrap();
        assert!(mean_n(&noisy.conditioned).unwrap() > mean_n(&clean.conditioned).unwrap());
    }

    #[test]
    fn ks_of_thermal_is_small() {
        let d = thermal_distribution(0.5, 60).unwrap();
        let (nbar, ks) = ks_distance_to_thermal(&d).unwrap();
        assert!((nbar - 0.5).abs() < 1e-9);
        assert!(ks < 1e-9);
    }
}
