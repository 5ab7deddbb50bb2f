//! Workbench for testing characteristics of Lévy processes from equidistant
//! increments through the empirical characteristic function.

pub mod ecf;
pub mod error;
pub mod harness;
pub mod model;
pub mod outcome;
pub mod quad;
pub mod sampler;

pub use error::{LevyError, Result};
pub use model::{JumpLaw, JumpMeasureSpec, LevyTriplet, Moment, SamplingScheme};
pub use sampler::{simulate, simulate_stream, IncrementSample, StreamKey};
pub use outcome::{Decision, Region, TestOutcome};
