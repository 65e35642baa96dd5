//! Trap parameters, phonon-number distributions and Fock-state couplings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{bessel_j, laguerre, ln_factorial_ratio};

/// Default retained probability for thermal truncation.
pub const DEFAULT_COVERAGE: f64 = 0.9999;
/// Smallest truncation used for thermal distributions.
pub const MIN_THERMAL_N_MAX: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrapParams {
    /// Lamb–Dicke parameter of the Raman beam pair.
    pub eta: f64,
    /// Trap angular frequency in rad/s.
    pub omega: f64,
    /// Optical-pumping transition linewidth in rad/s.
    pub linewidth: f64,
}

impl Default for TrapParams {
    fn default() -> Self {
        Self { eta: 0.07, omega: 2.0 * std::f64::consts::PI * 1.0e6, linewidth: 2.0 * std::f64::consts::PI * 2.4e6 }
    }
}

impl TrapParams {
    pub fn with_eta(eta: f64) -> Self {
        Self { eta, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::InvalidArgument(format!("eta = {} must be positive", self.eta)));
        }
        if !(self.omega > 0.0 && self.linewidth > 0.0) {
            return Err(Error::InvalidArgument("trap frequency and linewidth must be positive".into()));
        }
        Ok(())
    }
}

/// Phonon-number populations on `0..=n_max`.
///
/// Mass that leaves the truncated range is never renormalized away; it shows
/// up as `tail_loss`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhononDistribution {
    probs: Vec<f64>,
}

impl PhononDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidArgument("empty distribution".into()));
        }
        if let Some(&bad) = probs.iter().find(|p| !(**p >= 0.0 && p.is_finite())) {
            return Err(Error::ProbabilityOutOfRange(bad));
        }
        Ok(Self { probs })
    }

    /// Builds a distribution, clipping round-off negatives to zero.
    pub(crate) fn from_raw(mut probs: Vec<f64>) -> Self {
        for p in &mut probs {
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        Self { probs }
    }

    pub fn ground_state(n_max: usize) -> Self {
        let mut probs = vec![0.0; n_max + 1];
        probs[0] = 1.0;
        Self { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn n_max(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn tail_loss(&self) -> f64 {
        1.0 - self.total()
    }

    pub fn get(&self, n: usize) -> f64 {
        self.probs.get(n).copied().unwrap_or(0.0)
    }

    /// Same populations on a different truncation; shrinking drops the cut
    /// bins into `tail_loss`.
    pub fn resized(&self, n_max: usize) -> Self {
        let mut probs = self.probs.clone();
        probs.resize(n_max + 1, 0.0);
        Self { probs }
    }

    pub fn normalized(&self) -> Result<Self> {
        let total = self.total();
        if total <= 0.0 {
            return Err(Error::ZeroMass);
        }
        Ok(Self { probs: self.probs.iter().map(|p| p / total).collect() })
    }

    pub fn mean_n(&self) -> Result<f64> {
        mean_n(self)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,probability\n");
        for (n, p) in self.probs.iter().enumerate() {
            out.push_str(&format!("{n},{p:.17e}\n"));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n_max": self.n_max(),
            "tail_loss": self.tail_loss(),
            "probs": self.probs,
        })
    }
}

fn ln_thermal_ratio(nbar: f64) -> f64 {
    (nbar / (nbar + 1.0)).ln()
}

/// Thermal populations `n̄ⁿ / (n̄+1)ⁿ⁺¹` truncated at `n_max`.
pub fn thermal_distribution(nbar: f64, n_max: usize) -> Result<PhononDistribution> {
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(Error::InvalidArgument(format!("nbar = {nbar} must be non-negative")));
    }
    if nbar == 0.0 {
        return Ok(PhononDistribution::ground_state(n_max));
    }
    let lr = ln_thermal_ratio(nbar);
    let l0 = -(nbar + 1.0).ln();
    let probs = (0..=n_max).map(|n| (l0 + n as f64 * lr).exp()).collect();
    Ok(PhononDistribution { probs })
}

/// Smallest truncation retaining at least `coverage` of a thermal state, no
/// smaller than [`MIN_THERMAL_N_MAX`] or `10 n̄`.
pub fn thermal_n_max(nbar: f64, coverage: f64) -> Result<usize> {
    if !(0.0..1.0).contains(&coverage) {
        return Err(Error::ProbabilityOutOfRange(coverage));
    }
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(Error::InvalidArgument(format!("nbar = {nbar} must be non-negative")));
    }
    let floor = MIN_THERMAL_N_MAX.max((10.0 * nbar).ceil() as usize);
    if nbar == 0.0 {
        return Ok(floor);
    }
    // retained mass through n is 1 - x^(n+1)
    let needed = ((1.0 - coverage).ln() / ln_thermal_ratio(nbar)).ceil() as usize;
    Ok(floor.max(needed.saturating_sub(1)))
}

pub fn thermal_with_coverage(nbar: f64, coverage: f64) -> Result<PhononDistribution> {
    thermal_distribution(nbar, thermal_n_max(nbar, coverage)?)
}

/// Mean phonon number of the retained populations, normalized by their sum.
pub fn mean_n(dist: &PhononDistribution) -> Result<f64> {
    let total = dist.total();
    if total <= 0.0 {
        return Err(Error::ZeroMass);
    }
    Ok(dist.probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum::<f64>() / total)
}

fn check_index(n: i64) -> Result<u64> {
    u64::try_from(n).map_err(|_| Error::NegativeIndex(n))
}

/// Relative coupling `Ω_{n,n'}/Ω₀` between Fock states of the motion.
///
/// Evaluated as `e^{-η²/2} √(n<!/n>!) η^{|Δn|} L_{n<}^{|Δn|}(η²)` with the
/// prefactor formed in log space. Symmetric in its two indices; the sign is the
/// Laguerre sign.
pub fn fock_coupling(n: i64, n_prime: i64, eta: f64) -> Result<f64> {
    let (a, b) = (check_index(n)?, check_index(n_prime)?);
    let (lo, hi) = (a.min(b), a.max(b));
    let d = hi - lo;
    let x = eta * eta;
    let l = laguerre(lo, d as f64, x);
    if l == 0.0 {
        return Ok(0.0);
    }
    let ln_eta_pow = if d == 0 { 0.0 } else { d as f64 * eta.ln() };
    let ln_mag = -0.5 * x + 0.5 * ln_factorial_ratio(lo, hi) + ln_eta_pow;
    Ok(ln_mag.exp() * l)
}

/// Bessel-function approximation `J_{Δn}(2η√(n + (Δn+1)/2))`, valid for
/// `|Δn| <= 1`.
pub fn fock_coupling_bessel(n: i64, delta_n: i64, eta: f64) -> Result<f64> {
    if delta_n.abs() > 1 {
        return Err(Error::BesselOutOfRange(delta_n));
    }
    check_index(n)?;
    check_index(n + delta_n)?;
    let arg = 2.0 * eta * (n as f64 + (delta_n as f64 + 1.0) / 2.0).sqrt();
    Ok(bessel_j(delta_n as i32, arg))
}

/// Doppler-limited mean phonon number `Γ / (2ω)`.
pub fn doppler_limit(linewidth: f64, omega: f64) -> f64 {
    linewidth / (2.0 * omega)
}

/// Phonon number at which the red-sideband coupling `|Ω_{n,n-1}|` reaches its
/// first maximum.
pub fn red_sideband_peak(eta: f64) -> Result<usize> {
    let mut prev = fock_coupling(1, 0, eta)?.abs();
    let mut n = 1usize;
    loop {
        let next = fock_coupling(n as i64 + 1, n as i64, eta)?.abs();
        if next < prev {
            return Ok(n);
        }
        prev = next;
        n += 1;
        if n > 10_000_000 {
            return Err(Error::InvalidArgument(format!("eta = {eta} too small to locate the coupling peak")));
        }
    }
}

/// Phonon numbers `[lo, hi]` where `|Ω_{n,n-1}|` stays within `fraction` of
/// its first maximum.
pub fn red_sideband_plateau(eta: f64, fraction: f64) -> Result<(usize, usize)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::ProbabilityOutOfRange(fraction));
    }
    let peak = red_sideband_peak(eta)?;
    let top = fock_coupling(peak as i64, peak as i64 - 1, eta)?.abs();
    let inside = |n: usize| -> Result<bool> { Ok(fock_coupling(n as i64, n as i64 - 1, eta)?.abs() >= fraction * top) };
    let mut lo = peak;
    while lo > 1 && inside(lo - 1)? {
        lo -= 1;
    }
    let mut hi = peak;
    while inside(hi + 1)? {
        hi += 1;
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thermal_truncation_rule() {
        assert_eq!(thermal_n_max(0.5, DEFAULT_COVERAGE).unwrap(), 50);
        let n = thermal_n_max(15.87, DEFAULT_COVERAGE).unwrap();
        assert_eq!(n, 159);
        let d = thermal_distribution(15.87, n).unwrap();
        assert!(d.tail_loss() <= 1e-4);
        // one fewer bin would also satisfy 10 n̄ only through the floor
        let n = thermal_n_max(3.0, 1.0 - 1e-12).unwrap();
        let d = thermal_distribution(3.0, n).unwrap();
        assert!(d.tail_loss() <= 1e-12);
        assert!(thermal_distribution(3.0, n - 1).unwrap().tail_loss() > 1e-12);
    }

    #[test]
    fn thermal_is_not_renormalized() {
        let d = thermal_distribution(20.0, 10).unwrap();
        let expect = 1.0 - (20.0f64 / 21.0).powi(11);
        assert!((d.total() - expect).abs() < 1e-14);
        assert!((d.tail_loss() - (20.0f64 / 21.0).powi(11)).abs() < 1e-14);
    }

    #[test]
    fn mean_of_thermal() {
        let d = thermal_distribution(6.08, 800).unwrap();
        assert!((mean_n(&d).unwrap() - 6.08).abs() < 1e-10);
        assert_eq!(mean_n(&PhononDistribution::ground_state(5)).unwrap(), 0.0);
    }

    #[test]
    fn zero_mass_is_error() {
        let d = PhononDistribution::new(vec![0.0; 3]).unwrap();
        assert_eq!(mean_n(&d), Err(Error::ZeroMass));
        assert!(PhononDistribution::new(vec![0.5, -0.1]).is_err());
    }

    #[test]
    fn fock_coupling_small_cases() {
        let eta: f64 = 0.07;
        let e = (-eta * eta / 2.0).exp();
        assert!((fock_coupling(0, 0, eta).unwrap() - e).abs() < 1e-15);
        assert!((fock_coupling(1, 0, eta).unwrap() - e * eta).abs() < 1e-15);
        assert!((fock_coupling(1, 1, eta).unwrap() - e * (1.0 - eta * eta)).abs() < 1e-15);
        assert!((fock_coupling(2, 0, eta).unwrap() - e * eta * eta / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn fock_coupling_negative_index() {
        assert_eq!(fock_coupling(-1, 0, 0.1), Err(Error::NegativeIndex(-1)));
        assert_eq!(fock_coupling_bessel(0, -1, 0.1), Err(Error::NegativeIndex(-1)));
        assert_eq!(fock_coupling_bessel(5, 2, 0.1), Err(Error::BesselOutOfRange(2)));
    }

    #[test]
    fn first_zero_of_red_sideband() {
        // Ω_{n,n-1} vanishes near η√n ≈ 1.916 (zero of L¹ at large n)
        let eta = 0.07;
        let mut n = 1i64;
        while fock_coupling(n, n - 1, eta).unwrap() > 0.0 {
            n += 1;
        }
        let r = eta * (n as f64).sqrt();
        assert!((r - 1.916).abs() < 0.02, "{r}");
    }

    #[test]
    fn red_sideband_peak_location() {
        assert_eq!(red_sideband_peak(0.07).unwrap(), 173);
        assert_eq!(red_sideband_plateau(0.07, 0.98).unwrap(), (132, 220));
    }

    #[test]
    fn bessel_matches_exact_in_lamb_dicke_regime() {
        for n in 1..30 {
            let exact = fock_coupling(n, n - 1, 0.02).unwrap();
            let approx = fock_coupling_bessel(n, -1, 0.02).unwrap();
            assert!((exact.abs() - approx.abs()).abs() < 1e-4, "n={n}");
        }
    }

    #[test]
    fn doppler() {
        assert!((doppler_limit(2.0, 1.0) - 1.0).abs() < 1e-15);
    }
}
