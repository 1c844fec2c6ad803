use std::f64::consts::FRAC_1_SQRT_2;

use proptest::prelude::*;

use super::linalg::{self, c, r, Matrix, ONE, ZERO};
use super::*;
use crate::rng;

fn plus() -> PureState {
    PureState::from_amplitudes(vec![2], &[r(FRAC_1_SQRT_2), r(FRAC_1_SQRT_2)]).unwrap()
}

fn bell(k: usize) -> PureState {
    PureState::new(vec![2, 2], bell_vectors()[k].clone()).unwrap()
}

fn w_state() -> PureState {
    let s = r(1.0 / 3f64.sqrt());
    PureState::from_amplitudes(vec![2, 2, 2], &[ZERO, s, s, ZERO, s, ZERO, ZERO, ZERO]).unwrap()
}

#[test]
fn plus_plus_is_uniform_over_four_outcomes() {
    let s = plus().tensor(&plus());
    let d = s.distribution(&ProjectiveMeasurement::computational(4), &[0, 1]).unwrap();
    for p in d {
        assert!((p - 0.25).abs() < 1e-12);
    }
}

#[test]
fn x_tensor_z_maps_phi_plus_to_psi_minus() {
    let s = bell(0).apply(&Gate::x(0)).unwrap().apply(&Gate::z(1)).unwrap();
    assert!(equal_up_to_phase(&s, &bell(3), 1e-12));
}

#[test]
fn w_state_two_qubit_marginal() {
    let rho = w_state().partial_trace(&[0, 1]).unwrap();
    let mut expect = Matrix::zeros(4, 4);
    expect[(0, 0)] = r(1.0 / 3.0);
    for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        expect[(i, j)] = r(1.0 / 3.0);
    }
    assert!(linalg::max_abs(&(rho.matrix() - expect)) < 1e-12);
}

#[test]
fn classical_mixture_in_bell_basis() {
    let rho =
        MixedState::from_ensemble(&[(0.5, PureState::qubits(2, 0).unwrap()), (0.5, PureState::qubits(2, 3).unwrap())])
            .unwrap();
    let d = rho.distribution(&ProjectiveMeasurement::bell(), &[0, 1]).unwrap();
    let expect = [0.5, 0.5, 0.0, 0.0];
    for (a, b) in d.iter().zip(expect) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn haar_mean_overlap_with_zero() {
    let mut g = rng::seeded(11);
    for n in 1..=3usize {
        let zero = PureState::zeros(n);
        let trials = 20_000;
        let mean: f64 = (0..trials)
            .map(|_| {
                fidelity(&State::Pure(haar_random_pure(&vec![2; n], &mut g).unwrap()), &State::Pure(zero.clone()))
                    .unwrap()
            })
            .sum::<f64>()
            / trials as f64;
        let expect = 1.0 / (1u32 << n) as f64;
        assert!((mean - expect).abs() < 0.01, "n={n}: {mean}");
    }
}

#[test]
fn partial_trace_rejects_bad_keep_sets() {
    let s = w_state();
    assert!(s.partial_trace(&[]).is_err());
    assert!(s.partial_trace(&[3]).is_err());
}

#[test]
fn incomplete_projector_family_is_rejected() {
    let mut p = Matrix::zeros(2, 2);
    p[(0, 0)] = ONE;
    assert!(matches!(ProjectiveMeasurement::from_projectors(vec![p]), Err(crate::Error::IncompleteMeasurement(_))));
}

#[test]
fn mixing_kinds_in_tensor_is_rejected() {
    let a = State::Pure(plus());
    let b = State::Mixed(plus().to_density());
    assert_eq!(a.tensor(&b), Err(crate::Error::MixedKinds));
}

#[test]
fn invalid_density_matrices_are_rejected() {
    let mut m = Matrix::zeros(2, 2);
    m[(0, 0)] = r(1.5);
    m[(1, 1)] = r(-0.5);
    assert!(MixedState::new(vec![2], m).is_err());
    assert!(PureState::from_amplitudes(vec![2], &[ONE, ONE]).is_err());
}

#[test]
fn mixed_fidelity_agrees_with_pure_overlap() {
    let a = plus();
    let b = PureState::from_amplitudes(vec![2], &[r(0.6), c(0.0, 0.8)]).unwrap();
    let pure = fidelity(&State::Pure(a.clone()), &State::Pure(b.clone())).unwrap();
    let mixed = fidelity(&State::Mixed(a.to_density()), &State::Mixed(b.to_density())).unwrap();
    assert!((pure - mixed).abs() < 1e-9);
}

#[test]
fn qudit_shift_rejects_trivial_dimension() {
    assert!(Gate::qudit_shift(1, 0).is_err());
    let s = PureState::basis(vec![3], 2).unwrap().apply(&Gate::qudit_shift(3, 0).unwrap()).unwrap();
    assert_eq!(s.amplitude(0), ONE);
}

fn arb_state(n: usize) -> impl Strategy<Value = PureState> {
    any::<u64>().prop_map(move |seed| haar_random_pure(&vec![2; n], &mut rng::seeded(seed)).unwrap())
}

fn arb_unitary_gate() -> impl Strategy<Value = Gate> {
    (0usize..3, -3.0f64..3.0, 0usize..6).prop_map(|(q, t, k)| match k {
        0 => Gate::rotation(Axis::X, q, t),
        1 => Gate::rotation(Axis::Y, q, t),
        2 => Gate::rotation(Axis::Z, q, t),
        3 => Gate::cnot(q, (q + 1) % 3),
        4 => Gate::cphase(q, (q + 2) % 3, t),
        _ => Gate::h(q),
    })
}

proptest! {
    #[test]
    fn unitaries_preserve_norm(s in arb_state(3), g in arb_unitary_gate()) {
        prop_assert!((s.apply(&g).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_of_product_is_factor(a in arb_state(1), b in arb_state(2)) {
        let rho = a.tensor(&b).partial_trace(&[1, 2]).unwrap();
        prop_assert!(linalg::max_abs(&(rho.matrix() - b.to_density().matrix())) < 1e-12);
    }

    #[test]
    fn distributions_sum_to_one(s in arb_state(2)) {
        for m in [ProjectiveMeasurement::bell(), ProjectiveMeasurement::computational(4)] {
            let total: f64 = s.distribution(&m, &[0, 1]).unwrap().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn repeated_measurement_repeats_outcome(s in arb_state(2), seed in any::<u64>()) {
        let mut g = rng::seeded(seed);
        let m = ProjectiveMeasurement::bell();
        let first = s.measure(&m, &[0, 1], &mut g).unwrap();
        let second = first.post_state.measure(&m, &[0, 1], &mut g).unwrap();
        prop_assert_eq!(first.outcome, second.outcome);
        prop_assert!((second.probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trace_distance_is_a_metric(a in arb_state(1), b in arb_state(1), cc in arb_state(1)) {
        let (a, b, cc) = (State::Pure(a), State::Pure(b), State::Pure(cc));
        prop_assert!(trace_distance(&a, &a).unwrap().abs() < 1e-12);
        let ab = trace_distance(&a, &b).unwrap();
        let bc = trace_distance(&b, &cc).unwrap();
        let ac = trace_distance(&a, &cc).unwrap();
        prop_assert!(ac <= ab + bc + 1e-12);
    }

    #[test]
    fn global_phase_is_invisible(s in arb_state(2), phase in -3.0f64..3.0) {
        prop_assert!(equal_up_to_phase(&s, &s.with_global_phase(phase), 1e-12));
    }

    #[test]
    fn permutation_round_trips(s in arb_state(3)) {
        let p = s.permute(&[2, 0, 1]).unwrap().permute(&[1, 2, 0]).unwrap();
        prop_assert!((p.amplitudes() - s.amplitudes()).norm() < 1e-12);
    }
}

#[test]
fn density_apply_matches_pure_apply() {
    let s = w_state();
    let g = Gate::cnot(0, 2);
    let a = s.apply(&g).unwrap().to_density();
    let b = s.to_density().apply(&g).unwrap();
    assert!(linalg::max_abs(&(a.matrix() - b.matrix())) < 1e-12);
}
