//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

pub mod chain_ode;
pub mod fock;
pub mod heating_ode;
pub mod markov;
