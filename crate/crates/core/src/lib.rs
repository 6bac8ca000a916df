//! Fidelity, energy and purity of single-mode Gaussian states, together with
//! the closed-form tradeoff bounds between fidelity and relative energy
//! difference, brute-force oracles that check them, and a randomized
//! explorer for the general pure-state case.

pub mod bounds;
pub mod cli;
pub mod explorer;
pub mod fidelity;
pub mod oracle;
pub mod states;
pub mod tables;

pub use bounds::{BoundFamily, BoundResult, EnergyInterval};
pub use fidelity::{EnergyComparison, Fidelity};
pub use states::{GaussianState, MixedGaussianState, PureGaussianState, SecondMoments};
