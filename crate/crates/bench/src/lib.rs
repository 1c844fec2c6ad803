//! Fixtures shared by the criterion targets.

use qnetlab_core::{haar_random_pure, rng, PureState};

/// Seeded Haar-random `n`-qubit state, identical across runs.
pub fn random_qubits(n: usize, seed: u64) -> PureState {
    haar_random_pure(&vec![2; n], &mut rng::seeded(seed)).expect("qubit dims are valid")
}
