//! Concentrated-information toolkit: dense small-system quantum information
//! numerics, POVM optimization and the bounds built on them.
//!
//! Entropies are in bits. Party order in a layout fixes tensor significance,
//! leftmost most significant.

pub mod ci;
pub mod cli;
pub mod error;
pub mod info;
pub mod measures;
pub mod optim;
pub mod qmat;
pub mod rng;
pub mod states;

pub use error::{Error, Result};
pub use info::Partition;
pub use qmat::{CMatrix, C64};
pub use states::{AnyState, Ensemble, EnsembleMember, Mstate, Party, PureState, SystemLayout};
