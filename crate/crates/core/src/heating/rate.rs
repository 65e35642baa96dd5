use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::motional::PhononDistribution;

/// Sub-step used by [`propagate_heating`], as a fraction of the validity bound.
pub const DEFAULT_SUBSTEP_FRACTION: f64 = 1e-3;

/// Upward and downward diffusion rates in quanta per second.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatingModel {
    pub a_plus: f64,
    pub a_minus: f64,
}

impl HeatingModel {
    /// Recoil-type diffusion with equal up and down rates.
    pub fn symmetric(rate: f64) -> Self {
        Self { a_plus: rate, a_minus: rate }
    }

    pub fn max_rate(&self) -> f64 {
        self.a_plus.max(self.a_minus)
    }

    fn validate(&self) -> Result<()> {
        if !(self.a_plus >= 0.0 && self.a_minus >= 0.0 && self.a_plus.is_finite() && self.a_minus.is_finite()) {
            return Err(Error::InvalidArgument(format!("heating rates {self:?} must be non-negative")));
        }
        Ok(())
    }
}

/// Measured heating rates per source, in quanta per second.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HeatingChannels {
    pub optical_pumping: f64,
    pub raman: f64,
    pub trap: f64,
}

impl Default for HeatingChannels {
    fn default() -> Self {
        Self { optical_pumping: 5.58, raman: 2.078, trap: 0.553 }
    }
}

impl HeatingChannels {
    /// Raman beams plus trap heating, active during a cooling pulse.
    pub fn during_pulse(&self) -> HeatingModel {
        HeatingModel::symmetric(self.raman + self.trap)
    }

    /// Optical pumping plus trap heating, active during repumping.
    pub fn during_repump(&self) -> HeatingModel {
        HeatingModel::symmetric(self.optical_pumping + self.trap)
    }

    pub fn trap_only(&self) -> HeatingModel {
        HeatingModel::symmetric(self.trap)
    }
}

/// Largest step `1/(n_max A_max)` for which the first-order propagator holds.
pub fn validity_bound(model: &HeatingModel, n_max: usize) -> f64 {
    let a = model.max_rate();
    if a == 0.0 || n_max == 0 {
        f64::INFINITY
    } else {
        1.0 / (n_max as f64 * a)
    }
}

/// Tridiagonal short-time heating matrix `H(τ)`.
///
/// `down[i]` is `b_{i,i-1}`, `up[i]` is `b_{i,i+1}`; the upward flow out of
/// `n_max` leaves the truncated space.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeatingStep {
    pub tau: f64,
    pub diag: Vec<f64>,
    pub up: Vec<f64>,
    pub down: Vec<f64>,
}

pub fn heating_step_matrix(model: &HeatingModel, tau: f64, n_max: usize) -> Result<HeatingStep> {
    model.validate()?;
    if !(tau >= 0.0) {
        return Err(Error::InvalidArgument(format!("tau = {tau} must be non-negative")));
    }
    let bound = validity_bound(model, n_max);
    if tau > bound {
        return Err(Error::HeatingStepTooLarge { tau, bound });
    }
    let n = n_max + 1;
    let mut diag = Vec::with_capacity(n);
    let mut up = Vec::with_capacity(n);
    let mut down = Vec::with_capacity(n);
    for i in 0..n {
        let fi = i as f64;
        let u = (fi + 1.0) * model.a_plus * tau;
        let d = fi * model.a_minus * tau;
        diag.push(1.0 - u - d);
        up.push(u);
        down.push(d);
    }
    Ok(HeatingStep { tau, diag, up, down })
}

impl HeatingStep {
    fn apply_into(&self, p: &[f64], out: &mut [f64]) {
        let n = p.len();
        for j in 0..n {
            let mut v = self.diag[j] * p[j];
            if j > 0 {
                v += self.up[j - 1] * p[j - 1];
            }
            if j + 1 < n {
                v += self.down[j + 1] * p[j + 1];
            }
            out[j] = v;
        }
    }

    pub fn apply(&self, dist: &PhononDistribution) -> Result<PhononDistribution> {
        if dist.n_max() + 1 != self.diag.len() {
            return Err(Error::DimensionMismatch { expected: self.diag.len() - 1, got: dist.n_max() });
        }
        let mut out = vec![0.0; self.diag.len()];
        self.apply_into(dist.probs(), &mut out);
        Ok(PhononDistribution::from_raw(out))
    }
}

/// Evolves `dist` for `duration` seconds under the heating rate equation using
/// the default sub-step.
pub fn propagate_heating(dist: &PhononDistribution, model: &HeatingModel, duration: f64) -> Result<PhononDistribution> {
    let tau = DEFAULT_SUBSTEP_FRACTION * validity_bound(model, dist.n_max());
    propagate_heating_with_step(dist, model, duration, tau)
}

/// As [`propagate_heating`] with an explicit maximum sub-step `tau_max`; the
/// duration is split into equal steps no longer than it.
pub fn propagate_heating_with_step(
    dist: &PhononDistribution,
    model: &HeatingModel,
    duration: f64,
    tau_max: f64,
) -> Result<PhononDistribution> {
    model.validate()?;
    if !(duration >= 0.0 && duration.is_finite()) {
        return Err(Error::InvalidArgument(format!("duration = {duration} must be non-negative")));
    }
    if duration == 0.0 || model.max_rate() == 0.0 {
        return Ok(dist.clone());
    }
    let steps = (duration / tau_max).ceil().max(1.0) as usize;
    let h = heating_step_matrix(model, duration / steps as f64, dist.n_max())?;
    let mut p = dist.probs().to_vec();
    let mut scratch = vec![0.0; p.len()];
    for _ in 0..steps {
        h.apply_into(&p, &mut scratch);
        std::mem::swap(&mut p, &mut scratch);
    }
    Ok(PhononDistribution::from_raw(p))
}
