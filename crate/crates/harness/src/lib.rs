//! Experiment sweeps, Monte Carlo estimates and CSV reports on top of
//! `cubeconc`.

pub mod mc;
pub mod spec;
pub mod sweep;

pub use mc::{mc_estimate_tail, MonteCarloEstimate};
pub use spec::{DistSource, GeneratorSpec, SetSelect, SweepSpec, YSelect};
pub use sweep::{run_on, run_sweep, Row, Status, SweepOutcome};
