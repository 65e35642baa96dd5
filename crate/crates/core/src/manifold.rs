//! Zeeman-manifold Raman coupling chains and the ³D₁ ↔ ³P₀ level structure.
//!
//! The ground manifold is ³D₁ (J = 1) of an I = 7 nucleus; the intermediate
//! and optical-pumping excited level is ³P₀ (J = 0), which carries the single
//! hyperfine level F' = 7.

use serde::{Deserialize, Serialize};

use crate::angular::{clebsch_gordan, SqrtRational};
use crate::error::{Error, Result};

pub const NUCLEAR_SPIN: i32 = 7;
pub const GROUND_J: i32 = 1;
pub const EXCITED_F: i32 = 7;

/// Single-photon polarization relative to the quantization axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarization {
    Pi,
    SigmaPlus,
    SigmaMinus,
}

impl Polarization {
    /// Change of atomic `m` on absorption.
    pub fn q(self) -> i32 {
        match self {
            Polarization::Pi => 0,
            Polarization::SigmaPlus => 1,
            Polarization::SigmaMinus => -1,
        }
    }
}

/// Polarizations of the two Raman beams.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolarizationPair {
    PiSigmaMinus,
    PiSigmaPlus,
}

impl PolarizationPair {
    /// Direction the chain walks in `m`.
    pub fn direction(self) -> i32 {
        match self {
            PolarizationPair::PiSigmaMinus => -1,
            PolarizationPair::PiSigmaPlus => 1,
        }
    }

    fn sigma(self) -> Polarization {
        match self {
            PolarizationPair::PiSigmaMinus => Polarization::SigmaMinus,
            PolarizationPair::PiSigmaPlus => Polarization::SigmaPlus,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldScheme {
    pub f: i32,
    pub f_excited: i32,
    pub polarization_pair: PolarizationPair,
    pub start_m: i32,
}

impl ManifoldScheme {
    /// F = 7 cooling from m = 0 toward m = -7 with π/σ⁻ beams.
    pub const fn f7() -> Self {
        Self { f: 7, f_excited: EXCITED_F, polarization_pair: PolarizationPair::PiSigmaMinus, start_m: 0 }
    }

    /// F = 8 cooling from m = -8 upward with π/σ⁺ beams.
    pub const fn f8() -> Self {
        Self { f: 8, f_excited: EXCITED_F, polarization_pair: PolarizationPair::PiSigmaPlus, start_m: -8 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.f < 1 {
            return Err(Error::InvalidScheme(format!("F = {} must be >= 1", self.f)));
        }
        if self.start_m.abs() > self.f {
            return Err(Error::InvalidScheme(format!("|start_m| = {} exceeds F = {}", self.start_m.abs(), self.f)));
        }
        if (self.f_excited - self.f).abs() > 1 || self.f_excited < 0 {
            return Err(Error::InvalidScheme(format!(
                "F' = {} not dipole-connected to F = {}",
                self.f_excited, self.f
            )));
        }
        Ok(())
    }
}

/// Which ladder a cooling run drives: a Zeeman manifold or the two-level baseline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoolingScheme {
    Manifold(ManifoldScheme),
    TwoLevel,
}

impl CoolingScheme {
    pub fn chain(&self) -> Result<CouplingChain> {
        match self {
            CoolingScheme::Manifold(s) => build_coupling_chain(s),
            CoolingScheme::TwoLevel => Ok(two_level_chain()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            CoolingScheme::Manifold(s) => format!("F{}", s.f),
            CoolingScheme::TwoLevel => "two_level".to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingStep {
    pub m_from: i32,
    pub m_to: i32,
    pub g: f64,
}

/// Relative Raman couplings along the cooling ladder, first step scaled to 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingChain {
    pub steps: Vec<CouplingStep>,
    /// Index of the step whose coupling is 1.
    pub normalization: usize,
}

impl CouplingChain {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Number of phonon-number bands a single pulse can populate.
    pub fn bandwidth(&self) -> usize {
        self.steps.len() + 1
    }

    pub fn couplings(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.g).collect()
    }

    /// Records `{m_from, m_to, g}` as a JSON array.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.steps).expect("chain serializes")
    }
}

/// Two-photon Raman amplitude between `|F, m_from>` and `|F, m_to>` through the
/// intermediate level, as the list of exact path terms.
///
/// Each path absorbs one beam (moving `m` onto the intermediate sublevel) and
/// emits into the other. An empty list means the step is forbidden.
pub fn raman_path_terms(scheme: &ManifoldScheme, m_from: i32, m_to: i32) -> Vec<SqrtRational> {
    let pair = [Polarization::Pi, scheme.polarization_pair.sigma()];
    let (f, fe) = (scheme.f, scheme.f_excited);
    let mut terms = Vec::new();
    for (absorb, emit) in [(pair[0], pair[1]), (pair[1], pair[0])] {
        let m_mid = m_from + absorb.q();
        if m_mid - emit.q() != m_to || m_mid.abs() > fe || m_from.abs() > f || m_to.abs() > f {
            continue;
        }
        let up = clebsch_gordan(f, m_from, 1, absorb.q(), fe, m_mid);
        let down = clebsch_gordan(f, m_to, 1, emit.q(), fe, m_mid);
        let term = &up * &down;
        if !term.is_zero() {
            terms.push(term);
        }
    }
    terms
}

/// Signed Raman amplitude in units of the reduced matrix elements.
pub fn raman_amplitude(scheme: &ManifoldScheme, m_from: i32, m_to: i32) -> f64 {
    raman_path_terms(scheme, m_from, m_to).iter().map(SqrtRational::to_f64).sum()
}

pub fn build_coupling_chain(scheme: &ManifoldScheme) -> Result<CouplingChain> {
    scheme.validate()?;
    let dir = scheme.polarization_pair.direction();
    let mut raw = Vec::new();
    let mut m = scheme.start_m;
    while (m + dir).abs() <= scheme.f {
        let amp = raman_amplitude(scheme, m, m + dir);
        if amp == 0.0 {
            break;
        }
        raw.push((m, m + dir, amp.abs()));
        m += dir;
    }
    let Some(&(_, _, g0)) = raw.first() else {
        return Err(Error::EmptyChain { start_m: scheme.start_m });
    };
    let steps = raw.into_iter().map(|(m_from, m_to, g)| CouplingStep { m_from, m_to, g: g / g0 }).collect();
    Ok(CouplingChain { steps, normalization: 0 })
}

/// Conventional two-level sideband cooling: one step with unit coupling.
pub fn two_level_chain() -> CouplingChain {
    CouplingChain { steps: vec![CouplingStep { m_from: 0, m_to: -1, g: 1.0 }], normalization: 0 }
}

/// Exact dipole amplitude between the ³D₁ sublevel `|F, m>` and the ³P₀
/// sublevel `|F'=7, m_excited>`, up to the reduced matrix element.
///
/// With J' = 0 the excited state is a pure nuclear state, so the amplitude is
/// the overlap `<J=1, m - m_excited; I, m_excited | F, m>`.
pub fn d1_p0_amplitude(f: i32, m: i32, m_excited: i32) -> SqrtRational {
    clebsch_gordan(GROUND_J, m - m_excited, NUCLEAR_SPIN, m_excited, f, m)
}

/// Probability that a single excitation–decay cycle driven with `polarization`
/// returns `|F, m>` of ³D₁ to itself.
pub fn depump_return_probability(level: (i32, i32), polarization: Polarization) -> Result<f64> {
    let (f, m) = level;
    if !(NUCLEAR_SPIN - GROUND_J..=NUCLEAR_SPIN + GROUND_J).contains(&f) || m.abs() > f {
        return Err(Error::InvalidArgument(format!("|{f}, {m}> is not a ³D₁ sublevel")));
    }
    let m_excited = m + polarization.q();
    let amp = d1_p0_amplitude(f, m, m_excited);
    if amp.is_zero() {
        return Err(Error::NoScatteringChannel(format!("|{f}, {m}> cannot be excited with {polarization:?}")));
    }
    // decay channels from one excited sublevel are weighted by |amp|^2 / (2J+1)
    let return_weight = amp.to_f64().powi(2) / (2 * GROUND_J + 1) as f64;
    Ok(return_weight)
}

/// Resonant weak-drive scattering rate `(Ω²/Γ)(1 - p)`.
pub fn weak_coupling_scatter_rate(rabi: f64, linewidth: f64, p_return: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p_return) {
        return Err(Error::ProbabilityOutOfRange(p_return));
    }
    if linewidth <= 0.0 {
        return Err(Error::InvalidArgument(format!("linewidth {linewidth} must be positive")));
    }
    Ok(rabi * rabi / linewidth * (1.0 - p_return))
}
