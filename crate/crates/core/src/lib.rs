//! Path-integral toolkit for the XY spin chain: closed-form correlators,
//! driven dynamics, entanglement and independent numerical oracles.

pub mod driven;
pub mod dynamic_correlators;
pub mod entanglement;
pub mod error;
pub mod numerics;
pub mod oracle;
pub mod propagators;
pub mod spectrum;
pub mod static_correlators;

pub use error::{Error, Result};
pub use spectrum::{ChainParams, Mode};
