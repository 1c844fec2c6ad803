//! Exact simulation of quantum network protocols.
//!
//! The [`qcore`] module supplies states, gates, measurements and circuits;
//! each protocol module builds on it and exposes both an exact mode and a
//! seeded sampling mode.

pub mod blindqc;
pub mod dqc;
pub mod encodings;
pub mod error;
pub mod infotheory;
pub mod network;
pub mod qcore;
pub mod qkd;
pub mod qsdc;
pub mod rng;
pub mod transfer;
pub mod voting;

pub use error::{Error, Result};
pub use network::{NodeLabel, Partition};
pub use qcore::{
    equal_up_to_phase, fidelity, haar_random_pure, trace_distance, Axis, Circuit, Condition, Gate, GateKind, Matrix,
    MeasurementResult, MixedState, ProjectiveMeasurement, PureState, State, Vector, C64,
};
