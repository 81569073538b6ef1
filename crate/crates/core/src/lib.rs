//! Exact concentration bounds for the Hamming distance under arbitrary
//! (dependent) probability distributions on the Boolean cube.
//!
//! * [`dist`]: distributions on `I_n`, marginals, conditionals and the
//!   deviation variables `eps_{x', y_k}`.
//! * [`hamming`]: the centered moment generating function of `d_H(., y)`,
//!   the inductive error bound, correlation verdicts and the small-variance
//!   product bound.
//! * [`set`]: set distances, enlargements, the concentration function and
//!   the uniform Lipschitz set-distance bound.

pub mod capacity;
pub mod dist;
pub mod error;
pub mod hamming;
pub mod point;
pub mod report;
pub mod set;

pub use dist::{CubeDistribution, Kind, Marginal, TransitionRow};
pub use error::{Error, Result};
pub use point::CubePoint;
