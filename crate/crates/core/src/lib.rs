//! Degenerate Raman sideband cooling in a large Zeeman manifold: coupling
//! chains, transfer matrices, pulse-sequence optimization, heating and
//! sideband thermometry.

pub mod angular;
pub mod chain_dynamics;
pub mod cli;
pub mod cooling;
pub mod error;
pub mod heating;
pub mod manifold;
pub mod motional;
pub mod optim;
pub mod protocol;
mod special;
pub mod thermometry;

pub use error::{Error, Result};
