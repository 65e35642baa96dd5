//! Coherent evolution along a coupled (m, n) chain and the resulting
//! phonon-number transfer matrices.
//!
//! A Raman pulse starting in `|m₀, n>` only couples the ladder
//! `|m_k, n-k>`, `k = 0..K-1`, so every initial phonon number evolves in its own
//! small tridiagonal block. Time is measured in units of the π-time
//! `T_f = π / (g₀ Ω_{1,0})` of the first chain step.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::manifold::CouplingChain;
use crate::motional::{fock_coupling, PhononDistribution, TrapParams};

/// Amplitudes on the chain sites `|m_k, start_n - k>`.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseChainState {
    pub start_n: usize,
    pub amplitudes: Vec<Complex64>,
}

impl PulseChainState {
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Couplings `½ g_k Ω_{n-k, n-k-1}` between neighbouring sites for a chain
/// starting at phonon number `start_n`, in units of the bare Rabi frequency.
pub fn chain_hamiltonian_offdiag(chain: &CouplingChain, eta: f64, start_n: usize) -> Result<Vec<f64>> {
    let sites = (chain.len() + 1).min(start_n + 1);
    (0..sites - 1)
        .map(|k| {
            let n = (start_n - k) as i64;
            Ok(0.5 * chain.steps[k].g * fock_coupling(n, n - 1, eta)?)
        })
        .collect()
}

/// Duration of `T_f` in units of the inverse bare Rabi frequency.
pub fn pi_time(chain: &CouplingChain, eta: f64) -> Result<f64> {
    let g0 = chain.steps.first().ok_or(Error::EmptyChain { start_m: 0 })?.g;
    Ok(std::f64::consts::PI / (g0 * fock_coupling(1, 0, eta)?).abs())
}

#[derive(Clone, Debug)]
struct ChainEigen {
    values: Vec<f64>,
    /// `V[k][j] V[0][j]`, row-major in `k`.
    weights: Vec<f64>,
}

impl ChainEigen {
    fn new(offdiag: &[f64]) -> Self {
        let k = offdiag.len() + 1;
        if k == 1 {
            return Self { values: vec![0.0], weights: vec![1.0] };
        }
        let mut h = DMatrix::<f64>::zeros(k, k);
        for (i, &c) in offdiag.iter().enumerate() {
            h[(i, i + 1)] = c;
            h[(i + 1, i)] = c;
        }
        let eig = h.symmetric_eigen();
        let v = &eig.eigenvectors;
        let mut weights = Vec::with_capacity(k * k);
        for row in 0..k {
            for j in 0..k {
                weights.push(v[(row, j)] * v[(0, j)]);
            }
        }
        Self { values: eig.eigenvalues.iter().copied().collect(), weights }
    }

    fn sites(&self) -> usize {
        self.values.len()
    }

    fn amplitudes(&self, tau: f64) -> Vec<Complex64> {
        let k = self.sites();
        if tau == 0.0 {
            // exact identity instead of the eigenbasis round trip
            let mut psi = vec![Complex64::new(0.0, 0.0); k];
            psi[0] = Complex64::new(1.0, 0.0);
            return psi;
        }
        let phases: Vec<Complex64> = self.values.iter().map(|&l| Complex64::from_polar(1.0, -l * tau)).collect();
        (0..k).map(|row| self.weights[row * k..(row + 1) * k].iter().zip(&phases).map(|(&w, &p)| p * w).sum()).collect()
    }

    fn probabilities(&self, tau: f64) -> Vec<f64> {
        self.amplitudes(tau).iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Evolves `|m₀, start_n>` for `t` (in units of `T_f`).
pub fn evolve_state(start_n: usize, chain: &CouplingChain, trap: &TrapParams, t: f64) -> Result<PulseChainState> {
    let tau = t * pi_time(chain, trap.eta)?;
    let eig = ChainEigen::new(&chain_hamiltonian_offdiag(chain, trap.eta, start_n)?);
    Ok(PulseChainState { start_n, amplitudes: eig.amplitudes(tau) })
}

/// Populations `|ψ_k|²` after a pulse of length `t`; entry `k` belongs to the
/// final phonon number `start_n - k`.
pub fn evolve_chain(start_n: usize, chain: &CouplingChain, trap: &TrapParams, t: f64) -> Result<Vec<f64>> {
    Ok(evolve_state(start_n, chain, trap, t)?.probabilities())
}

/// Cached chain eigensystems for every starting phonon number up to `n_max`.
///
/// The eigensystems are independent of the pulse length, so sweeps over `t`
/// only pay for the phase sums.
#[derive(Clone, Debug)]
pub struct ChainPropagator {
    n_max: usize,
    bandwidth: usize,
    time_unit: f64,
    systems: Vec<ChainEigen>,
}

impl ChainPropagator {
    pub fn new(chain: &CouplingChain, trap: &TrapParams, n_max: usize) -> Result<Self> {
        trap.validate()?;
        let time_unit = pi_time(chain, trap.eta)?;
        let systems = (0..=n_max)
            .into_par_iter()
            .map(|n| Ok(ChainEigen::new(&chain_hamiltonian_offdiag(chain, trap.eta, n)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n_max, bandwidth: chain.bandwidth(), time_unit, systems })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// Transition probabilities out of `start_n`; entry `k` lands on `start_n - k`.
    pub fn column(&self, start_n: usize, t: f64) -> Vec<f64> {
        self.systems[start_n].probabilities(t * self.time_unit)
    }

    pub fn transfer_matrix(&self, t: f64) -> TransferMatrix {
        let columns: Vec<Vec<f64>> = (0..=self.n_max).into_par_iter().map(|n| self.column(n, t)).collect();
        let mut bands = vec![vec![0.0; self.n_max + 1]; self.bandwidth];
        for (i, col) in columns.iter().enumerate() {
            for (d, &p) in col.iter().enumerate() {
                bands[d][i] = p;
            }
        }
        TransferMatrix { n_max: self.n_max, bandwidth: self.bandwidth, time: t, bands }
    }

    /// Applies one pulse without materializing the matrix.
    pub fn apply(&self, dist: &PhononDistribution, t: f64) -> Result<PhononDistribution> {
        if dist.n_max() != self.n_max {
            return Err(Error::DimensionMismatch { expected: self.n_max, got: dist.n_max() });
        }
        let p = dist.probs();
        let columns: Vec<Vec<f64>> = (0..=self.n_max)
            .into_par_iter()
            .map(|n| if p[n] == 0.0 { Vec::new() } else { self.column(n, t) })
            .collect();
        let mut out = vec![0.0; self.n_max + 1];
        for (i, col) in columns.iter().enumerate() {
            for (d, &a) in col.iter().enumerate() {
                out[i - d] += a * p[i];
            }
        }
        Ok(PhononDistribution::from_raw(out))
    }

    pub fn apply_sequence(&self, dist: &PhononDistribution, times: &[f64]) -> Result<PhononDistribution> {
        times.iter().try_fold(dist.clone(), |d, &t| self.apply(&d, t))
    }
}

/// Banded upper-triangular transfer matrix `W(t)`.
///
/// `bands[d][i]` is the probability `a_{i,i-d}` that a pulse takes phonon
/// number `i` to `i-d`; each initial `i` sums to one over `d`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransferMatrix {
    pub n_max: usize,
    pub bandwidth: usize,
    pub time: f64,
    pub bands: Vec<Vec<f64>>,
}

impl TransferMatrix {
    /// Probability of moving from phonon number `i` to `j`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i || i - j >= self.bandwidth || i > self.n_max {
            0.0
        } else {
            self.bands[i - j][i]
        }
    }

    pub fn apply(&self, dist: &PhononDistribution) -> Result<PhononDistribution> {
        if dist.n_max() != self.n_max {
            return Err(Error::DimensionMismatch { expected: self.n_max, got: dist.n_max() });
        }
        let p = dist.probs();
        let out = (0..=self.n_max)
            .map(|j| {
                (0..self.bandwidth).take_while(|d| j + d <= self.n_max).map(|d| self.bands[d][j + d] * p[j + d]).sum()
            })
            .collect();
        Ok(PhononDistribution::from_raw(out))
    }

    /// Dense matrix with rows indexed by the final and columns by the initial
    /// phonon number.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..=self.n_max).map(|j| (0..=self.n_max).map(|i| self.get(i, j)).collect()).collect()
    }

    pub fn to_dense_csv(&self) -> String {
        let mut out = String::from("n_final");
        for i in 0..=self.n_max {
            out.push_str(&format!(",{i}"));
        }
        out.push('\n');
        for (j, row) in self.to_dense().iter().enumerate() {
            out.push_str(&j.to_string());
            for v in row {
                out.push_str(&format!(",{v:.12e}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_banded_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("transfer matrix serializes")
    }
}

pub fn build_transfer_matrix(chain: &CouplingChain, trap: &TrapParams, t: f64, n_max: usize) -> Result<TransferMatrix> {
    Ok(ChainPropagator::new(chain, trap, n_max)?.transfer_matrix(t))
}

/// Applies `matrices` in order.
pub fn apply_sequence(dist: &PhononDistribution, matrices: &[TransferMatrix]) -> Result<PhononDistribution> {
    matrices.iter().try_fold(dist.clone(), |d, w| w.apply(&d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{build_coupling_chain, two_level_chain, ManifoldScheme};
    use crate::motional::thermal_distribution;

    fn trap() -> TrapParams {
        TrapParams::with_eta(0.07)
    }

    #[test]
    fn first_step_pi_time() {
        // a pulse of length T_f fully transfers |m0, 1> to |m1, 0>
        for chain in [two_level_chain(), build_coupling_chain(&ManifoldScheme::f7()).unwrap()] {
            let p = evolve_chain(1, &chain, &trap(), 1.0).unwrap();
            assert_eq!(p.len(), 2);
            assert!((p[1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ground_state_is_dark() {
        let chain = build_coupling_chain(&ManifoldScheme::f8()).unwrap();
        assert_eq!(evolve_chain(0, &chain, &trap(), 0.7).unwrap(), vec![1.0]);
    }

    #[test]
    fn chain_sites_truncate_at_zero_phonons() {
        let chain = build_coupling_chain(&ManifoldScheme::f7()).unwrap();
        assert_eq!(evolve_chain(3, &chain, &trap(), 0.3).unwrap().len(), 4);
        assert_eq!(evolve_chain(30, &chain, &trap(), 0.3).unwrap().len(), 8);
    }

    #[test]
    fn columns_are_stochastic() {
        let chain = build_coupling_chain(&ManifoldScheme::f8()).unwrap();
        let w = build_transfer_matrix(&chain, &trap(), 0.63, 120).unwrap();
        for i in 0..=120 {
            let s: f64 = (0..=i).map(|j| w.get(i, j)).sum();
            assert!((s - 1.0).abs() < 1e-12, "i={i} sum={s}");
        }
        assert_eq!(w.get(3, 5), 0.0);
        assert_eq!(w.get(40, 40 - 16), 0.0);
    }

    #[test]
    fn matrix_and_propagator_agree() {
        let chain = build_coupling_chain(&ManifoldScheme::f7()).unwrap();
        let prop = ChainPropagator::new(&chain, &trap(), 80).unwrap();
        let d = thermal_distribution(8.0, 80).unwrap();
        let a = prop.apply(&d, 0.4).unwrap();
        let b = prop.transfer_matrix(0.4).apply(&d).unwrap();
        for (x, y) in a.probs().iter().zip(b.probs()) {
            assert!((x - y).abs() < 1e-15);
        }
        assert!((a.total() - d.total()).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let chain = two_level_chain();
        let w = build_transfer_matrix(&chain, &trap(), 0.4, 20).unwrap();
        let d = thermal_distribution(1.0, 21).unwrap();
        assert_eq!(w.apply(&d), Err(Error::DimensionMismatch { expected: 20, got: 21 }));
    }

    #[test]
    fn dense_layout() {
        let w = build_transfer_matrix(&two_level_chain(), &trap(), 1.0, 3).unwrap();
        let dense = w.to_dense();
        // row 0, column 1: |1> -> |0>
        assert!((dense[0][1] - 1.0).abs() < 1e-12);
        assert_eq!(dense[0][0], 1.0);
        assert!(w.to_dense_csv().starts_with("n_final,0,1,2,3\n"));
    }
}
