//! Full cooling runs: pulses interleaved with heating, sideband thermometry
//! after every pulse and optional Raman dark preparation.

use serde::{Deserialize, Serialize};

use crate::chain_dynamics::ChainPropagator;
use crate::cooling::PulseSequence;
use crate::error::Result;
use crate::heating::{propagate_heating, HeatingChannels};
use crate::manifold::CoolingScheme;
use crate::motional::{mean_n, thermal_distribution, thermal_n_max, PhononDistribution, TrapParams};
use crate::thermometry::{rdp_filter_with_detection_error, sideband_probe, DEFAULT_RDP_CLEAR_TIME};

/// Wall-clock timing of the heating sources around each pulse.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HeatingSchedule {
    pub channels: HeatingChannels,
    /// Duration of `T_f` in seconds.
    pub pulse_unit_seconds: f64,
    /// Optical-pumping interval after every pulse, in seconds.
    pub repump_seconds: f64,
}

impl Default for HeatingSchedule {
    fn default() -> Self {
        Self { channels: HeatingChannels::default(), pulse_unit_seconds: 1.0e-3, repump_seconds: 10.0e-3 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RdpSettings {
    /// Clearing pulse in units of `T_f`.
    pub t_clear: f64,
    pub detection_error: f64,
}

impl Default for RdpSettings {
    fn default() -> Self {
        Self { t_clear: DEFAULT_RDP_CLEAR_TIME, detection_error: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProtocolConfig {
    pub scheme: CoolingScheme,
    pub trap: TrapParams,
    pub initial_nbar: f64,
    pub coverage: f64,
    /// Lower bound on the truncation, for runs whose analysis needs deep tails.
    pub min_n_max: usize,
    pub sequence: PulseSequence,
    pub heating: Option<HeatingSchedule>,
    pub rdp: Option<RdpSettings>,
    /// Thermometry probe length in units of the `n = 1` red-sideband π-time.
    pub probe_time: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RdpRow {
    pub nbar: f64,
    pub nbar_sb: f64,
    pub success_probability: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HistoryRow {
    pub pulse: usize,
    pub nbar: f64,
    pub nbar_sb: f64,
    pub tail_loss: f64,
    pub rdp: Option<RdpRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProtocolReport {
    pub rows: Vec<HistoryRow>,
    pub distributions: Vec<PhononDistribution>,
    pub final_rdp: Option<PhononDistribution>,
}

impl ProtocolReport {
    pub fn final_row(&self) -> &HistoryRow {
        self.rows.last().expect("report has the initial row")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("pulse,nbar,nbar_sb,tail_loss,rdp_nbar,rdp_nbar_sb,rdp_success\n");
        for r in &self.rows {
            out.push_str(&format!("{},{:.10e},{:.10e},{:.3e}", r.pulse, r.nbar, r.nbar_sb, r.tail_loss));
            match r.rdp {
                Some(x) => {
                    out.push_str(&format!(",{:.10e},{:.10e},{:.10e}\n", x.nbar, x.nbar_sb, x.success_probability))
                }
                None => out.push_str(",,,\n"),
            }
        }
        out
    }
}

/// Runs the thermal Doppler-cooled start through `config.sequence`.
///
/// With heating on, each pulse of length `t` adds Raman and trap heating for
/// `t · pulse_unit_seconds`, and each repump adds optical-pumping and trap
/// heating for `repump_seconds`. The RDP columns apply the clearing pulse to a
/// copy of the state after every pulse, with Raman heating during the clearing
/// pulse.
pub fn end_to_end_protocol(config: &ProtocolConfig) -> Result<ProtocolReport> {
    config.trap.validate()?;
    let chain = config.scheme.chain()?;
    let n_max = thermal_n_max(config.initial_nbar, config.coverage)?.max(config.min_n_max);
    let mut dist = thermal_distribution(config.initial_nbar, n_max)?;
    let prop = ChainPropagator::new(&chain, &config.trap, dist.n_max())?;
    let mut rows = Vec::with_capacity(config.sequence.len() + 1);
    let mut distributions = Vec::with_capacity(config.sequence.len() + 1);
    let mut final_rdp = None;
    let record = |k: usize, d: &PhononDistribution, final_rdp: &mut Option<PhononDistribution>| -> Result<HistoryRow> {
        let rdp = match config.rdp {
            None => None,
            Some(s) => {
                let out = rdp_filter_with_detection_error(d, &chain, &config.trap, s.t_clear, s.detection_error)?;
                let mut c = out.conditioned;
                if let Some(h) = config.heating {
                    c = propagate_heating(&c, &h.channels.during_pulse(), s.t_clear * h.pulse_unit_seconds)?;
                }
                let row = RdpRow {
                    nbar: mean_n(&c)?,
                    nbar_sb: sideband_probe(&c, &config.trap, config.probe_time)?.nbar_sb,
                    success_probability: out.success_probability,
                };
                *final_rdp = Some(c);
                Some(row)
            }
        };
        Ok(HistoryRow {
            pulse: k,
            nbar: mean_n(d)?,
            nbar_sb: sideband_probe(d, &config.trap, config.probe_time)?.nbar_sb,
            tail_loss: d.tail_loss(),
            rdp,
        })
    };
    rows.push(record(0, &dist, &mut final_rdp)?);
    distributions.push(dist.clone());
    for (k, &t) in config.sequence.times.iter().enumerate() {
        dist = prop.apply(&dist, t)?;
        if let Some(h) = config.heating {
            dist = propagate_heating(&dist, &h.channels.during_pulse(), t * h.pulse_unit_seconds)?;
            dist = propagate_heating(&dist, &h.channels.during_repump(), h.repump_seconds)?;
        }
        rows.push(record(k + 1, &dist, &mut final_rdp)?);
        distributions.push(dist.clone());
    }
    Ok(ProtocolReport { rows, distributions, final_rdp })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cooling::Strategy;
    use crate::manifold::ManifoldScheme;
    use crate::motional::DEFAULT_COVERAGE;

    fn config(heating: bool, rdp: bool) -> ProtocolConfig {
        ProtocolConfig {
            scheme: CoolingScheme::Manifold(ManifoldScheme::f7()),
            trap: TrapParams::with_eta(0.07),
            initial_nbar: 2.0,
            coverage: DEFAULT_COVERAGE,
            min_n_max: 0,
            sequence: PulseSequence::new(Strategy::Fixed, vec![0.4; 6]),
            heating: heating.then(HeatingSchedule::default),
            rdp: rdp.then(RdpSettings::default),
            probe_time: 1.0,
        }
    }

    #[test]
    fn cooling_without_heating_is_monotone() {
        let r = end_to_end_protocol(&config(false, false)).unwrap();
        assert_eq!(r.rows.len(), 7);
        for w in r.rows.windows(2) {
            assert!(w[1].nbar <= w[0].nbar + 1e-12);
        }
        assert!(r.rows[0].rdp.is_none());
    }

    #[test]
    fn heating_raises_the_floor() {
        let cold = end_to_end_protocol(&config(false, false)).unwrap();
        let hot = end_to_end_protocol(&config(true, false)).unwrap();
        assert!(hot.final_row().nbar > cold.final_row().nbar);
    }

    #[test]
    fn rdp_columns_are_filled() {
        let r = end_to_end_protocol(&config(true, true)).unwrap();
        let last = r.final_row();
        let rdp = last.rdp.unwrap();
        assert!(rdp.nbar < last.nbar);
        assert!(rdp.success_probability > 0.0 && rdp.success_probability <= 1.0);
        assert!(r.to_csv().lines().count() == 8);
    }
}
