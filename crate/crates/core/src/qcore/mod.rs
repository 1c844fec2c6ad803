//! State-vector and density-matrix simulation.

pub mod circuit;
pub mod gate;
pub mod linalg;
pub mod measure;
pub mod state;

pub use circuit::{Branch, Circuit, Condition, Step, Trajectory};
pub use gate::{qudit_shift, rotation, Axis, Gate, GateKind};
pub use linalg::{Matrix, Vector, C64};
pub use measure::{bell_vectors, MeasurementResult, ProjectiveMeasurement};
pub use state::{equal_up_to_phase, fidelity, haar_random_pure, trace_distance, MixedState, PureState, State};

#[cfg(test)]
mod tests;
