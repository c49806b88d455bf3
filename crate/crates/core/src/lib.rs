//! Symblicit strategy synthesis for monotonic Markov decision processes.

pub mod error;
pub mod lattice;
pub mod lump;
pub mod mdp;
pub mod numeric;
pub mod oracle;
pub mod partition;
pub mod rational;
pub mod solver;
pub mod strips;

pub use error::{Error, Result};
