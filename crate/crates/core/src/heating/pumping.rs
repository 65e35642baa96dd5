use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{d1_p0_amplitude, EXCITED_F, GROUND_J, NUCLEAR_SPIN};

/// Ground-manifold sublevel `(F, m)`.
pub type Level = (i32, i32);

/// Optical-pumping target.
pub const DARK_LEVEL: Level = (7, 0);

/// Measured Raman-beam scattering rate, 1/s.
pub const RAMAN_SCATTER_RATE: f64 = 7.35;
/// Measured total scattering rate while optically pumping, 1/s.
pub const OPTICAL_PUMPING_SCATTER_RATE: f64 = 41.0;
/// Mean scattering events per repump used to calibrate the geometric factors.
pub const REFERENCE_MEAN_STEPS: f64 = 62.1;
const REFERENCE_ETA: f64 = 0.07;
/// Geometric factor fitted so the Raman channel predicts 0.8 quanta/s.
pub const RAMAN_GEOMETRY: f64 = 0.8 / (RAMAN_SCATTER_RATE * REFERENCE_MEAN_STEPS * REFERENCE_ETA * REFERENCE_ETA);
/// Geometric factor fitted so the pumping channel predicts 4 quanta/s.
pub const OPTICAL_PUMPING_GEOMETRY: f64 =
    4.0 / (OPTICAL_PUMPING_SCATTER_RATE * REFERENCE_MEAN_STEPS * REFERENCE_ETA * REFERENCE_ETA);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeamPolarization {
    Pi,
    SigmaPlus,
    SigmaMinus,
    /// Linear polarization perpendicular to the field: equal σ⁺ and σ⁻ parts.
    Linear,
}

impl BeamPolarization {
    /// `(q, relative intensity)` of each spherical component.
    fn components(self) -> &'static [(i32, f64)] {
        match self {
            BeamPolarization::Pi => &[(0, 1.0)],
            BeamPolarization::SigmaPlus => &[(1, 1.0)],
            BeamPolarization::SigmaMinus => &[(-1, 1.0)],
            BeamPolarization::Linear => &[(1, 0.5), (-1, 0.5)],
        }
    }
}

/// A repump beam driving ³D₁ `F` → ³P₀ `F' = 7`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Beam {
    pub label: String,
    pub f: i32,
    pub polarization: BeamPolarization,
    #[serde(default = "unit_weight")]
    pub weight: f64,
}

fn unit_weight() -> f64 {
    1.0
}

/// `D_π` on F = 7 and linearly polarized `D_6`, `D_8`, equal weights.
pub fn default_beams() -> Vec<Beam> {
    vec![
        Beam { label: "D_pi".into(), f: 7, polarization: BeamPolarization::Pi, weight: 1.0 },
        Beam { label: "D_6".into(), f: 6, polarization: BeamPolarization::Linear, weight: 1.0 },
        Beam { label: "D_8".into(), f: 8, polarization: BeamPolarization::Linear, weight: 1.0 },
    ]
}

/// Squared dipole factors between ³D₁ sublevels and the ³P₀ `F' = 7` sublevels.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchingTable {
    pub states: Vec<Level>,
    /// `strength[m' + 7][s]`: `|<J=1 m-m'; I m' | F m>|²` for state `s`.
    pub strength: Vec<Vec<f64>>,
}

impl BranchingTable {
    pub fn d1_p0() -> Self {
        let states: Vec<Level> =
            (NUCLEAR_SPIN - GROUND_J..=NUCLEAR_SPIN + GROUND_J).flat_map(|f| (-f..=f).map(move |m| (f, m))).collect();
        let strength = (-EXCITED_F..=EXCITED_F)
            .map(|me| {
                states
                    .iter()
                    .map(
                        |&(f, m)| {
                            if (m - me).abs() > GROUND_J {
                                0.0
                            } else {
                                d1_p0_amplitude(f, m, me).to_f64().powi(2)
                            }
                        },
                    )
                    .collect()
            })
            .collect();
        Self { states, strength }
    }

    pub fn index(&self, level: Level) -> Option<usize> {
        self.states.iter().position(|&s| s == level)
    }

    fn excitation(&self, s: usize, q: i32) -> f64 {
        let me = self.states[s].1 + q;
        if me.abs() > EXCITED_F {
            0.0
        } else {
            self.strength[(me + EXCITED_F) as usize][s]
        }
    }

    /// Decay probabilities from excited sublevel `m'` into every state.
    fn decay(&self, me: i32) -> Vec<f64> {
        let row = &self.strength[(me + EXCITED_F) as usize];
        let total: f64 = row.iter().sum();
        row.iter().map(|x| x / total).collect()
    }
}

/// One-scattering-event Markov chain over the ³D₁ sublevels.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PumpingGraph {
    pub states: Vec<Level>,
    pub absorbing: usize,
    pub beams: Vec<Beam>,
    /// Row-stochastic; dark states carry a unit self-loop.
    pub step_matrix: Vec<Vec<f64>>,
}

pub fn build_pumping_graph(beams: &[Beam], branching: &BranchingTable) -> Result<PumpingGraph> {
    for b in beams {
        if !(b.weight >= 0.0 && b.weight.is_finite()) {
            return Err(Error::InvalidArgument(format!("beam {} has invalid weight {}", b.label, b.weight)));
        }
        if (b.f - EXCITED_F).abs() > 1 || !branching.states.iter().any(|s| s.0 == b.f) {
            return Err(Error::InvalidArgument(format!("beam {} addresses F = {} with no dipole path", b.label, b.f)));
        }
    }
    let n = branching.states.len();
    let absorbing = branching
        .index(DARK_LEVEL)
        .ok_or_else(|| Error::InvalidArgument("branching table lacks the dark level".into()))?;
    let mut step_matrix = vec![vec![0.0; n]; n];
    for (s, &(f, _)) in branching.states.iter().enumerate() {
        let mut total = 0.0;
        let mut row = vec![0.0; n];
        for b in beams.iter().filter(|b| b.f == f) {
            for &(q, share) in b.polarization.components() {
                let rate = b.weight * share * branching.excitation(s, q);
                if rate > 0.0 {
                    total += rate;
                    let me = branching.states[s].1 + q;
                    for (r, p) in row.iter_mut().zip(branching.decay(me)) {
                        *r += rate * p;
                    }
                }
            }
        }
        if total > 0.0 {
            if s == absorbing {
                return Err(Error::NonDarkAbsorber(format!(
                    "|{}, {}> scatters under the configured beams",
                    DARK_LEVEL.0, DARK_LEVEL.1
                )));
            }
            for (dst, r) in step_matrix[s].iter_mut().zip(row) {
                *dst = r / total;
            }
        } else {
            step_matrix[s][s] = 1.0;
        }
    }
    Ok(PumpingGraph { states: branching.states.clone(), absorbing, beams: beams.to_vec(), step_matrix })
}

/// Initial condition for [`mean_steps_to_dark`].
#[derive(Clone, Debug, PartialEq)]
pub enum StartState {
    Level(Level),
    /// Equal weight on every sublevel, the dark one included.
    Uniform,
    Distribution(Vec<f64>),
}

impl PumpingGraph {
    pub fn transient(&self) -> Vec<usize> {
        (0..self.states.len()).filter(|&s| s != self.absorbing).collect()
    }

    /// Transient states from which the dark level cannot be reached.
    pub fn unreachable(&self) -> Vec<Level> {
        let n = self.states.len();
        let mut reach = vec![false; n];
        reach[self.absorbing] = true;
        let mut queue = VecDeque::from([self.absorbing]);
        while let Some(t) = queue.pop_front() {
            for s in 0..n {
                if !reach[s] && self.step_matrix[s][t] > 0.0 {
                    reach[s] = true;
                    queue.push_back(s);
                }
            }
        }
        (0..n).filter(|&s| !reach[s]).map(|s| self.states[s]).collect()
    }

    /// `N = (I - Q)⁻¹` over the transient states, ordered as [`Self::transient`].
    pub fn fundamental_matrix(&self) -> Result<DMatrix<f64>> {
        let bad = self.unreachable();
        if !bad.is_empty() {
            return Err(Error::AbsorptionUnreachable(bad));
        }
        let t = self.transient();
        let m = t.len();
        let i_minus_q = DMatrix::from_fn(m, m, |r, c| f64::from(u8::from(r == c)) - self.step_matrix[t[r]][t[c]]);
        i_minus_q.try_inverse().ok_or_else(|| Error::AbsorptionUnreachable(t.iter().map(|&s| self.states[s]).collect()))
    }

    /// Expected scattering events to reach the dark level from each state.
    pub fn steps_per_state(&self) -> Result<Vec<(Level, f64)>> {
        let n = self.fundamental_matrix()?;
        let x = &n * DVector::from_element(n.ncols(), 1.0);
        let mut out = vec![0.0; self.states.len()];
        for (k, &s) in self.transient().iter().enumerate() {
            out[s] = x[k];
        }
        Ok(self.states.iter().copied().zip(out).collect())
    }

    pub fn step_matrix_json(&self) -> serde_json::Value {
        serde_json::json!({
            "states": self.states,
            "absorbing": self.states[self.absorbing],
            "beams": self.beams,
            "step_matrix": self.step_matrix,
        })
    }
}

pub fn mean_steps_to_dark(graph: &PumpingGraph, start: &StartState) -> Result<f64> {
    let per_state = graph.steps_per_state()?;
    let n = graph.states.len();
    let weights: Vec<f64> = match start {
        StartState::Level(l) => {
            let idx = graph
                .states
                .iter()
                .position(|s| s == l)
                .ok_or_else(|| Error::InvalidArgument(format!("{l:?} is not a ³D₁ sublevel")))?;
            let mut w = vec![0.0; n];
            w[idx] = 1.0;
            w
        }
        StartState::Uniform => vec![1.0 / n as f64; n],
        StartState::Distribution(w) => {
            if w.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: w.len() });
            }
            let total: f64 = w.iter().sum();
            if total <= 0.0 || w.iter().any(|x| *x < 0.0) {
                return Err(Error::InvalidArgument(
                    "start distribution must be non-negative with positive mass".into(),
                ));
            }
            w.iter().map(|x| x / total).collect()
        }
    };
    Ok(weights.iter().zip(&per_state).map(|(w, (_, x))| w * x).sum())
}

/// Recoil heating rate `rate · steps · η² · geometry` in quanta per second.
pub fn recoil_heating_estimate(scatter_rate: f64, mean_steps: f64, eta: f64, geometry: f64) -> f64 {
    scatter_rate * mean_steps * eta * eta * geometry
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph() -> PumpingGraph {
        build_pumping_graph(&default_beams(), &BranchingTable::d1_p0()).unwrap()
    }

    #[test]
    fn forty_five_states_and_stochastic_rows() {
        let g = graph();
        assert_eq!(g.states.len(), 45);
        for row in &g.step_matrix {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn decay_from_each_excited_sublevel_is_complete() {
        let b = BranchingTable::d1_p0();
        for row in &b.strength {
            assert!((row.iter().sum::<f64>() - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dark_start_needs_no_steps() {
        assert_eq!(mean_steps_to_dark(&graph(), &StartState::Level(DARK_LEVEL)).unwrap(), 0.0);
    }

    #[test]
    fn adjacent_levels_are_symmetric() {
        let g = graph();
        let a = mean_steps_to_dark(&g, &StartState::Level((7, 1))).unwrap();
        let b = mean_steps_to_dark(&g, &StartState::Level((7, -1))).unwrap();
        assert!((a - b).abs() < 1e-9);
        assert!((a - 41.4).abs() < 1.0, "{a}");
    }

    #[test]
    fn pi_on_the_dark_level_is_rejected() {
        let beams = vec![Beam { label: "bad".into(), f: 7, polarization: BeamPolarization::Linear, weight: 1.0 }];
        assert!(matches!(build_pumping_graph(&beams, &BranchingTable::d1_p0()), Err(Error::NonDarkAbsorber(_))));
    }

    #[test]
    fn missing_beam_leaves_levels_stranded() {
        let beams: Vec<Beam> = default_beams().into_iter().filter(|b| b.label != "D_6").collect();
        let g = build_pumping_graph(&beams, &BranchingTable::d1_p0()).unwrap();
        let bad = g.unreachable();
        assert_eq!(bad.len(), 13);
        assert!(bad.iter().all(|l| l.0 == 6));
        assert!(matches!(mean_steps_to_dark(&g, &StartState::Uniform), Err(Error::AbsorptionUnreachable(_))));
    }

    #[test]
    fn recoil_defaults_reproduce_calibration() {
        let raman = recoil_heating_estimate(RAMAN_SCATTER_RATE, REFERENCE_MEAN_STEPS, 0.07, RAMAN_GEOMETRY);
        assert!((raman - 0.8).abs() < 1e-12);
        assert_eq!(recoil_heating_estimate(0.0, 62.1, 0.07, 1.0), 0.0);
    }
}
