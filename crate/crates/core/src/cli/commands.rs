use serde_json::json;

use super::config::RunConfig;
use super::output::{Meta, Outputs};
use super::{CliError, Command};
use crate::chain_dynamics::ChainPropagator;
use crate::cooling::{
    dual_thermal_decompose, heuristic_sequence, optimize_fixed_pulse, optimize_global_sweep, optimize_global_with,
    pulses_for_tail, suppression_factor, thermal_for_suppression, trace_csv, PulseSequence, Strategy,
    SuppressionWindow,
};
use crate::heating::{
    build_pumping_graph, mean_steps_to_dark, recoil_heating_estimate, BranchingTable, StartState, REFERENCE_MEAN_STEPS,
};
use crate::manifold::CoolingScheme;
use crate::motional::{mean_n, thermal_with_coverage, PhononDistribution};
use crate::protocol::{end_to_end_protocol, ProtocolConfig};
use crate::thermometry::sideband_probe;

/// Reference optimum `(a, t)` at η = 0.07 for F = 7 and F = 8.
const TABLE1_REFERENCE: [(i32, f64, f64, f64); 8] = [
    (7, 10.0, 0.633, 0.173),
    (7, 20.0, 0.787, 0.169),
    (7, 30.0, 0.850, 0.167),
    (7, 40.0, 0.884, 0.166),
    (8, 10.0, 0.348, 0.639),
    (8, 20.0, 0.577, 0.644),
    (8, 30.0, 0.689, 0.645),
    (8, 40.0, 0.754, 0.645),
];
const TABLE1_REFERENCE_ETA: f64 = 0.07;

pub fn table1_reference(f: i32, nbar: f64) -> Option<(f64, f64)> {
    TABLE1_REFERENCE.iter().find(|r| r.0 == f && r.1 == nbar).map(|r| (r.2, r.3))
}

pub fn execute(command: &Command, cfg: &RunConfig) -> Result<Outputs, CliError> {
    let mut out = Outputs::new(Meta::new(command.name(), cfg));
    match command {
        Command::TransferMatrix { .. } => transfer_matrix(cfg, &mut out)?,
        Command::Cool => cool(cfg, &mut out)?,
        Command::Table1 => table1(cfg, &mut out)?,
        Command::Pumping => pumping(cfg, &mut out)?,
        Command::Probe => probe(cfg, &mut out)?,
        Command::Optimize => optimize(cfg, &mut out)?,
    }
    Ok(out)
}

fn transfer_matrix(cfg: &RunConfig, out: &mut Outputs) -> Result<(), CliError> {
    let chain = cfg.scheme.scheme().chain()?;
    let prop = ChainPropagator::new(&chain, &cfg.trap, cfg.transfer.n_max)?;
    let mut files = Vec::new();
    for (i, &t) in cfg.transfer.times.iter().enumerate() {
        let w = prop.transfer_matrix(t);
        let name = format!("transfer_{i:02}_t{t:.4}.csv");
        out.csv(&name, &w.to_dense_csv());
        files.push(json!({ "time": t, "file": name, "bands": w.bands }));
    }
    out.json(
        "transfer_manifest.json",
        &json!({
            "scheme": cfg.scheme.scheme(),
            "chain": chain.to_json(),
            "eta": cfg.trap.eta,
            "n_max": cfg.transfer.n_max,
            "bandwidth": chain.bandwidth(),
            "matrices": files,
        }),
    );
    Ok(())
}

/// Resolves the configured strategy into concrete pulse lengths.
fn plan(cfg: &RunConfig, init: &PhononDistribution) -> Result<(PulseSequence, serde_json::Value), CliError> {
    let scheme = cfg.scheme.scheme();
    let chain = scheme.chain()?;
    let trap = &cfg.trap;
    let s = &cfg.strategy;
    let (mut seq, detail) = match s.kind {
        Strategy::Fixed => {
            let probe = thermal_for_suppression(&chain, trap, mean_n(init)?)?;
            let (t, a) = match s.time {
                Some(t) => (t, suppression_factor(&chain, trap, t, &probe, None)?),
                None => {
                    let f = optimize_fixed_pulse(&chain, trap, &probe, None)?;
                    (f.t, f.a)
                }
            };
            let n = match s.n_pulses {
                Some(n) => n,
                None => pulses_for_tail(a, s.tail_target)?,
            };
            (PulseSequence::new(Strategy::Fixed, vec![t; n]), json!({ "time": t, "suppression_factor": a }))
        }
        Strategy::GlobalOpt => {
            let prop = ChainPropagator::new(&chain, trap, init.n_max())?;
            let r = optimize_global_with(&prop, init, s.n_pulses.unwrap_or(10), &cfg.global_options(), None)?;
            let detail = json!({ "final_nbar_no_heating": r.final_nbar, "evals": r.evals, "converged": r.converged });
            (r.sequence, detail)
        }
        Strategy::Heuristic => {
            let p = heuristic_sequence(&chain, trap, init, &cfg.heuristic_options(), &cfg.global_options())?;
            let detail = json!({ "time": p.fixed.t, "suppression_factor": p.fixed.a, "n_short": p.n_short });
            (p.sequence, detail)
        }
    };
    seq.scheme = Some(scheme);
    Ok((seq, detail))
}

fn distributions_csv(dists: &[PhononDistribution]) -> String {
    let n_max = dists.iter().map(|d| d.n_max()).max().unwrap_or(0);
    let mut s = String::from("n");
    for k in 0..dists.len() {
        s.push_str(&format!(",pulse_{k}"));
    }
    s.push('\n');
    for n in 0..=n_max {
        s.push_str(&n.to_string());
        for d in dists {
            s.push_str(&format!(",{:.10e}", d.get(n)));
        }
        s.push('\n');
    }
    s
}

fn cool(cfg: &RunConfig, out: &mut Outputs) -> Result<(), CliError> {
    let scheme = cfg.scheme.scheme();
    let chain = scheme.chain()?;
    let init = thermal_with_coverage(cfg.initial.nbar, cfg.initial.coverage)?;
    let (sequence, detail) = plan(cfg, &init)?;
    let window = SuppressionWindow::asymptotic(&chain, &cfg.trap)?;
    let fit_wanted = sequence.strategy == Strategy::Fixed && sequence.len() >= 3;
    let protocol = ProtocolConfig {
        scheme,
        trap: cfg.trap,
        initial_nbar: cfg.initial.nbar,
        coverage: cfg.initial.coverage,
        min_n_max: if fit_wanted { window.required_n_max(&chain) } else { 0 },
        sequence: sequence.clone(),
        heating: cfg.heating.schedule(),
        rdp: cfg.rdp.settings(),
        probe_time: cfg.probe.time,
    };
    let report = end_to_end_protocol(&protocol)?;
    out.csv("history.csv", &report.to_csv());
    out.csv("distributions.csv", &distributions_csv(&report.distributions));
    out.json("sequence.json", &json!({ "sequence": sequence, "plan": detail }));
    if fit_wanted {
        let fit = match dual_thermal_decompose(&report.distributions, window) {
            Ok(f) => json!({
                "a": f.a,
                "window": f.window,
                "r_squared": f.r_squared,
                "n_pulses": f.n_pulses,
                "residual_nbar": mean_n(&f.residual).ok(),
                "residual": f.residual.probs(),
            }),
            Err(e) => json!({ "error": e.to_string() }),
        };
        out.json("suppression_fit.json", &fit);
    }
    let last = report.final_row();
    out.json(
        "summary.json",
        &json!({
            "final": last,
            "rdp_t_clear": protocol.rdp.map(|r| r.t_clear),
            "heating": protocol.heating,
        }),
    );
    Ok(())
}

fn table1(cfg: &RunConfig, out: &mut Outputs) -> Result<(), CliError> {
    let mut csv = String::from("scheme,nbar,a,t,a_reference,t_reference,delta_a,delta_t\n");
    let mut rows = Vec::new();
    for sc in &cfg.table1.schemes {
        let scheme = sc.scheme();
        let chain = scheme.chain()?;
        for &nbar in &cfg.table1.nbars {
            let init = thermal_for_suppression(&chain, &cfg.trap, nbar)?;
            let f = optimize_fixed_pulse(&chain, &cfg.trap, &init, None)?;
            let reference = match scheme {
                CoolingScheme::Manifold(m) if cfg.trap.eta == TABLE1_REFERENCE_ETA => table1_reference(m.f, nbar),
                _ => None,
            };
            let (ra, rt, da, dt) = match reference {
                Some((ra, rt)) => {
                    (format!("{ra}"), format!("{rt}"), format!("{:.4}", f.a - ra), format!("{:.4}", f.t - rt))
                }
                None => Default::default(),
            };
            csv.push_str(&format!("{},{nbar},{:.6},{:.6},{ra},{rt},{da},{dt}\n", scheme.label(), f.a, f.t));
            rows.push(json!({ "scheme": scheme.label(), "nbar": nbar, "a": f.a, "t": f.t, "reference": reference }));
        }
    }
    out.csv("table1.csv", &csv);
    out.json("table1.json", &rows);
    Ok(())
}

fn pumping(cfg: &RunConfig, out: &mut Outputs) -> Result<(), CliError> {
    let p = &cfg.pumping;
    let graph = build_pumping_graph(&p.beams, &BranchingTable::d1_p0()).map_err(|e| match e {
        crate::Error::NonDarkAbsorber(_) | crate::Error::InvalidArgument(_) => CliError::Config(e.to_string()),
        other => CliError::Numerical(other),
    })?;
    let per_state = graph.steps_per_state()?;
    let uniform = mean_steps_to_dark(&graph, &StartState::Uniform)?;
    let plus = mean_steps_to_dark(&graph, &StartState::Level((7, 1)))?;
    let minus = mean_steps_to_dark(&graph, &StartState::Level((7, -1)))?;
    let eta = cfg.trap.eta;
    let estimate = |rate: f64, steps: f64, geometry: f64| recoil_heating_estimate(rate, steps, eta, geometry);
    let mut csv = String::from("f,m,mean_steps\n");
    for ((f, m), x) in &per_state {
        csv.push_str(&format!("{f},{m},{x:.10}\n"));
    }
    out.csv("pumping_steps.csv", &csv);
    let fundamental = graph.fundamental_matrix()?;
    let fundamental: Vec<Vec<f64>> = fundamental.row_iter().map(|r| r.iter().copied().collect()).collect();
    out.json(
        "pumping.json",
        &json!({
            "mean_steps_uniform": uniform,
            "mean_steps_7_plus1": plus,
            "mean_steps_7_minus1": minus,
            "recoil_heating": {
                "raman": estimate(p.raman_scatter_rate, uniform, p.raman_geometry),
                "optical_pumping": estimate(p.optical_pumping_scatter_rate, uniform, p.optical_pumping_geometry),
                "raman_at_reference_steps": estimate(p.raman_scatter_rate, REFERENCE_MEAN_STEPS, p.raman_geometry),
                "optical_pumping_at_reference_steps":
                    estimate(p.optical_pumping_scatter_rate, REFERENCE_MEAN_STEPS, p.optical_pumping_geometry),
            },
            "transient_states": graph.transient().iter().map(|&s| graph.states[s]).collect::<Vec<_>>(),
            "fundamental_matrix": fundamental,
            "graph": graph.step_matrix_json(),
        }),
    );
    Ok(())
}

fn probe(cfg: &RunConfig, out: &mut Outputs) -> Result<(), CliError> {
    let init = thermal_with_coverage(cfg.initial.nbar, cfg.initial.coverage)?;
    let nbar = mean_n(&init)?;
    let mut csv = String::from("probe_time,p_red,p_blue,nbar_sb,nbar\n");
    for &t in &cfg.probe.times {
        let r = sideband_probe(&init, &cfg.trap, t)?;
        csv.push_str(&format!("{t},{:.12e},{:.12e},{:.12e},{nbar:.12e}\n", r.p_red, r.p_blue, r.nbar_sb));
    }
    out.csv("probe.csv", &csv);
    Ok(())
}

fn optimize(cfg: &RunConfig, out: &mut Outputs) -> Result<(), CliError> {
    let scheme = cfg.scheme.scheme();
    let chain = scheme.chain()?;
    let init = thermal_with_coverage(cfg.initial.nbar, cfg.initial.coverage)?;
    let n = cfg.strategy.n_pulses.unwrap_or(10);
    let opts = cfg.global_options();
    let best = if cfg.strategy.sweep {
        let runs = optimize_global_sweep(&chain, &cfg.trap, &init, n, &opts)?;
        let mut csv = String::from("n_pulses,final_nbar,total_time\n");
        for r in &runs {
            csv.push_str(&format!("{},{:.12e},{:.6}\n", r.sequence.len(), r.final_nbar, r.sequence.total_time()));
        }
        out.csv("sweep.csv", &csv);
        runs.into_iter().last().expect("at least one pulse count")
    } else {
        let prop = ChainPropagator::new(&chain, &cfg.trap, init.n_max())?;
        optimize_global_with(&prop, &init, n, &opts, None)?
    };
    let mut seq = best.sequence.clone();
    seq.scheme = Some(scheme);
    out.json(
        "sequence.json",
        &json!({ "sequence": seq, "final_nbar": best.final_nbar, "converged": best.converged, "evals": best.evals }),
    );
    out.csv("trace.csv", &trace_csv(&best.trace));
    let final_dist = ChainPropagator::new(&chain, &cfg.trap, init.n_max())?.apply_sequence(&init, &seq.times)?;
    out.csv("final_distribution.csv", &final_dist.to_csv());
    Ok(())
}
