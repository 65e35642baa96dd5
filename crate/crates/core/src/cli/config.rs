use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::cooling::{GlobalOptions, HeuristicOptions, Strategy};
use crate::heating::{
    default_beams, Beam, HeatingChannels, OPTICAL_PUMPING_GEOMETRY, OPTICAL_PUMPING_SCATTER_RATE, RAMAN_GEOMETRY,
    RAMAN_SCATTER_RATE,
};
use crate::manifold::{CoolingScheme, ManifoldScheme};
use crate::motional::{TrapParams, DEFAULT_COVERAGE};
use crate::protocol::{HeatingSchedule, RdpSettings};
use crate::thermometry::DEFAULT_RDP_CLEAR_TIME;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SchemeConfig {
    F7,
    F8,
    TwoLevel,
    Custom { f: i32, f_excited: i32, polarization_pair: crate::manifold::PolarizationPair, start_m: i32 },
}

impl SchemeConfig {
    pub fn scheme(&self) -> CoolingScheme {
        match *self {
            SchemeConfig::F7 => CoolingScheme::Manifold(ManifoldScheme::f7()),
            SchemeConfig::F8 => CoolingScheme::Manifold(ManifoldScheme::f8()),
            SchemeConfig::TwoLevel => CoolingScheme::TwoLevel,
            SchemeConfig::Custom { f, f_excited, polarization_pair, start_m } => {
                CoolingScheme::Manifold(ManifoldScheme { f, f_excited, polarization_pair, start_m })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialConfig {
    pub nbar: f64,
    pub coverage: f64,
}

impl Default for InitialConfig {
    fn default() -> Self {
        Self { nbar: 15.0, coverage: DEFAULT_COVERAGE }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StrategyConfig {
    pub kind: Strategy,
    /// Pulse count; for fixed pulses it defaults to the tail target rule.
    pub n_pulses: Option<usize>,
    /// Fixed pulse length in `T_f`; defaults to the suppression optimum.
    pub time: Option<f64>,
    pub tail_target: f64,
    pub n_final: usize,
    pub final_nbar: f64,
    pub starts: usize,
    pub max_evals: usize,
    /// `optimize` only: optimize every pulse count up to `n_pulses`.
    pub sweep: bool,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        let h = HeuristicOptions::default();
        let g = GlobalOptions::default();
        Self {
            kind: Strategy::Fixed,
            n_pulses: None,
            time: None,
            tail_target: h.tail_target,
            n_final: h.n_final,
            final_nbar: h.final_nbar,
            starts: g.starts,
            max_evals: g.max_evals,
            sweep: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HeatingConfig {
    pub enabled: bool,
    pub optical_pumping: f64,
    pub raman: f64,
    pub trap: f64,
    pub pulse_unit_seconds: f64,
    pub repump_seconds: f64,
}

impl Default for HeatingConfig {
    fn default() -> Self {
        let s = HeatingSchedule::default();
        Self {
            enabled: true,
            optical_pumping: s.channels.optical_pumping,
            raman: s.channels.raman,
            trap: s.channels.trap,
            pulse_unit_seconds: s.pulse_unit_seconds,
            repump_seconds: s.repump_seconds,
        }
    }
}

impl HeatingConfig {
    pub fn schedule(&self) -> Option<HeatingSchedule> {
        self.enabled.then_some(HeatingSchedule {
            channels: HeatingChannels { optical_pumping: self.optical_pumping, raman: self.raman, trap: self.trap },
            pulse_unit_seconds: self.pulse_unit_seconds,
            repump_seconds: self.repump_seconds,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RdpConfig {
    pub enabled: bool,
    pub t_clear: f64,
    pub detection_error: f64,
}

impl Default for RdpConfig {
    fn default() -> Self {
        Self { enabled: false, t_clear: DEFAULT_RDP_CLEAR_TIME, detection_error: 0.0 }
    }
}

impl RdpConfig {
    pub fn settings(&self) -> Option<RdpSettings> {
        self.enabled.then_some(RdpSettings { t_clear: self.t_clear, detection_error: self.detection_error })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeConfig {
    /// Probe length used for the sideband estimate in cooling histories.
    pub time: f64,
    /// Probe lengths scanned by the `probe` subcommand.
    pub times: Vec<f64>,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self { time: 1.0, times: vec![0.25, 0.5, 1.0, 1.5, 2.0] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransferConfig {
    pub n_max: usize,
    pub times: Vec<f64>,
}

impl Default for TransferConfig {
    fn default() -> Self {
        Self { n_max: 49, times: vec![0.2, 0.4, 0.6, 0.8] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Table1Config {
    pub nbars: Vec<f64>,
    pub schemes: Vec<SchemeConfig>,
}

impl Default for Table1Config {
    fn default() -> Self {
        Self { nbars: vec![10.0, 20.0, 30.0, 40.0], schemes: vec![SchemeConfig::F7, SchemeConfig::F8] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PumpingConfig {
    pub beams: Vec<Beam>,
    pub raman_scatter_rate: f64,
    pub optical_pumping_scatter_rate: f64,
    pub raman_geometry: f64,
    pub optical_pumping_geometry: f64,
}

impl Default for PumpingConfig {
    fn default() -> Self {
        Self {
            beams: default_beams(),
            raman_scatter_rate: RAMAN_SCATTER_RATE,
            optical_pumping_scatter_rate: OPTICAL_PUMPING_SCATTER_RATE,
            raman_geometry: RAMAN_GEOMETRY,
            optical_pumping_geometry: OPTICAL_PUMPING_GEOMETRY,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub scheme: SchemeConfig,
    pub trap: TrapParams,
    pub initial: InitialConfig,
    pub strategy: StrategyConfig,
    pub heating: HeatingConfig,
    pub rdp: RdpConfig,
    pub probe: ProbeConfig,
    pub transfer: TransferConfig,
    pub table1: Table1Config,
    pub pumping: PumpingConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            scheme: SchemeConfig::F7,
            trap: TrapParams::default(),
            initial: InitialConfig::default(),
            strategy: StrategyConfig::default(),
            heating: HeatingConfig::default(),
            rdp: RdpConfig::default(),
            probe: ProbeConfig::default(),
            transfer: TransferConfig::default(),
            table1: Table1Config::default(),
            pumping: PumpingConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

fn positive(name: &str, v: f64) -> Result<(), String> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(format!("{name} must be positive, got {v}"))
    }
}

fn non_negative(name: &str, v: f64) -> Result<(), String> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(format!("{name} must be non-negative, got {v}"))
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn global_options(&self) -> GlobalOptions {
        GlobalOptions {
            seed: self.seed,
            starts: self.strategy.starts,
            max_evals: self.strategy.max_evals,
            ..GlobalOptions::default()
        }
    }

    pub fn heuristic_options(&self) -> HeuristicOptions {
        HeuristicOptions {
            tail_target: self.strategy.tail_target,
            n_final: self.strategy.n_final,
            final_nbar: self.strategy.final_nbar,
            window: None,
        }
    }

    /// Schema-level checks run before any computation or file output.
    pub fn validate(&self) -> Result<(), String> {
        self.trap.validate().map_err(|e| e.to_string())?;
        self.scheme.scheme().chain().map_err(|e| e.to_string())?;
        for s in &self.table1.schemes {
            s.scheme().chain().map_err(|e| e.to_string())?;
        }
        non_negative("initial.nbar", self.initial.nbar)?;
        if !(self.initial.coverage > 0.0 && self.initial.coverage < 1.0) {
            return Err(format!("initial.coverage must lie in (0, 1), got {}", self.initial.coverage));
        }
        if self.strategy.n_pulses == Some(0) {
            return Err("strategy.n_pulses must be at least 1".into());
        }
        if let Some(t) = self.strategy.time {
            non_negative("strategy.time", t)?;
        }
        if !(self.strategy.tail_target > 0.0 && self.strategy.tail_target < 1.0) {
            return Err(format!("strategy.tail_target must lie in (0, 1), got {}", self.strategy.tail_target));
        }
        non_negative("strategy.final_nbar", self.strategy.final_nbar)?;
        if self.strategy.starts == 0 {
            return Err("strategy.starts must be at least 1".into());
        }
        for (name, v) in [
            ("heating.optical_pumping", self.heating.optical_pumping),
            ("heating.raman", self.heating.raman),
            ("heating.trap", self.heating.trap),
            ("heating.repump_seconds", self.heating.repump_seconds),
        ] {
            non_negative(name, v)?;
        }
        positive("heating.pulse_unit_seconds", self.heating.pulse_unit_seconds)?;
        positive("rdp.t_clear", self.rdp.t_clear)?;
        if !(0.0..=1.0).contains(&self.rdp.detection_error) {
            return Err(format!("rdp.detection_error must lie in [0, 1], got {}", self.rdp.detection_error));
        }
        positive("probe.time", self.probe.time)?;
        for &t in &self.probe.times {
            positive("probe.times", t)?;
        }
        for &t in &self.transfer.times {
            non_negative("transfer.times", t)?;
        }
        for &n in &self.table1.nbars {
            positive("table1.nbars", n)?;
        }
        for (name, v) in [
            ("pumping.raman_scatter_rate", self.pumping.raman_scatter_rate),
            ("pumping.optical_pumping_scatter_rate", self.pumping.optical_pumping_scatter_rate),
            ("pumping.raman_geometry", self.pumping.raman_geometry),
            ("pumping.optical_pumping_geometry", self.pumping.optical_pumping_geometry),
        ] {
            non_negative(name, v)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml("sed = 3").is_err());
        assert!(RunConfig::from_toml("[trap]\netta = 0.1").is_err());
        assert!(RunConfig::from_toml("[scheme]\nkind = \"f9\"").is_err());
    }

    #[test]
    fn scheme_variants_parse() {
        let c = RunConfig::from_toml("[scheme]\nkind = \"two_level\"").unwrap();
        assert_eq!(c.scheme, SchemeConfig::TwoLevel);
        let c = RunConfig::from_toml(
            "[scheme]\nkind = \"custom\"\nf = 8\nf_excited = 7\npolarization_pair = \"pi_sigma_plus\"\nstart_m = -8",
        )
        .unwrap();
        assert_eq!(c.scheme.scheme(), SchemeConfig::F8.scheme());
    }

    #[test]
    fn validation_catches_nonphysical_values() {
        let c = RunConfig::from_toml("[trap]\neta = -0.1").unwrap();
        assert!(c.validate().is_err());
        let c = RunConfig::from_toml(
            "[scheme]\nkind = \"custom\"\nf = 7\nf_excited = 7\npolarization_pair = \"pi_sigma_minus\"\nstart_m = 1",
        )
        .unwrap();
        assert!(c.validate().is_err());
        assert!(RunConfig::default().validate().is_ok());
    }
}
