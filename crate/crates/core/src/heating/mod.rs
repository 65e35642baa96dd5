//! Motional heating by photon recoil and trap noise, and the optical-pumping
//! Markov chain that sets the recoil budget.

mod pumping;
mod rate;

pub use pumping::{
    build_pumping_graph, default_beams, mean_steps_to_dark, recoil_heating_estimate, Beam, BeamPolarization,
    BranchingTable, Level, PumpingGraph, StartState, OPTICAL_PUMPING_GEOMETRY, OPTICAL_PUMPING_SCATTER_RATE,
    RAMAN_GEOMETRY, RAMAN_SCATTER_RATE, REFERENCE_MEAN_STEPS,
};
pub use rate::{
    heating_step_matrix, propagate_heating, propagate_heating_with_step, validity_bound, HeatingChannels, HeatingModel,
    HeatingStep, DEFAULT_SUBSTEP_FRACTION,
};
