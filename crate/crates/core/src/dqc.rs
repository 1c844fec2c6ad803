//! Phase estimation, the recursive inverse QFT, and non-local gate counts
//! for distributed circuits.
//!
//! Bit order: ancilla wire `t` controls `U^{2^t}`. After the inverse QFT
//! wire `q` holds bit `j_{n-1-q}` of `j = Σ_k j_k 2^k`, so reading the
//! register with wire 0 as the most significant bit yields `j` directly.
//! No final swaps are applied; consequently the circuit matrix is
//! `F† P`, where `F` is the DFT and `P` reverses the qubit order.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::Partition;
use crate::qcore::gate::matrices;
use crate::qcore::linalg::{self, Matrix};
use crate::qcore::{Circuit, Gate, PureState};

/// Controlled `R_k†` with `R_k = diag(1, e^{2πi/2^k})`.
fn controlled_rk_dagger(control: usize, target: usize, k: usize) -> Gate {
    Gate::cphase(control, target, -2.0 * PI / (1u64 << k) as f64)
}

/// Appends the inverse QFT on wires `offset..offset+n`.
fn push_inverse_qft(c: &mut Circuit, offset: usize, n: usize) -> Result<()> {
    for q in (0..n).rev() {
        for ctrl in (q + 1..n).rev() {
            c.add(controlled_rk_dagger(offset + ctrl, offset + q, ctrl - q + 1))?;
        }
        c.add(Gate::h(offset + q))?;
    }
    Ok(())
}

pub fn build_inverse_qft(n: usize) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::Domain("inverse QFT needs at least one qubit".into()));
    }
    let mut c = Circuit::new(n);
    push_inverse_qft(&mut c, 0, n)?;
    Ok(c)
}

fn matrix_power_of_two(u: &Matrix, t: usize) -> Matrix {
    (0..t).fold(u.clone(), |acc, _| &acc * &acc)
}

/// QPE on `n` ancillas (wires `0..n`) followed by the `m`-qubit system.
/// The ancilla measurements are left to the caller.
pub fn build_qpe_circuit(u: &Matrix, n: usize) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::Domain("phase estimation needs at least one ancilla".into()));
    }
    let dim = u.nrows();
    if dim < 2 || !dim.is_power_of_two() || u.ncols() != dim {
        return Err(Error::Dimension(format!("{}x{} is not a multi-qubit operator", dim, u.ncols())));
    }
    let m = dim.trailing_zeros() as usize;
    let mut c = Circuit::new(n + m);
    for t in 0..n {
        c.add(Gate::h(t))?;
    }
    for t in 0..n {
        let cu = matrices::controlled(&matrix_power_of_two(u, t));
        let targets = std::iter::once(t).chain(n..n + m).collect();
        c.add(Gate::custom(format!("c-U^{}", 1u64 << t), cu, targets)?)?;
    }
    push_inverse_qft(&mut c, 0, n)?;
    Ok(c)
}

/// Residual `‖U|ψ⟩ - ⟨ψ|U|ψ⟩|ψ⟩‖`.
fn eigen_residual(u: &Matrix, psi: &PureState) -> f64 {
    let v = psi.amplitudes();
    let uv = u * v;
    let lambda = v.dotc(&uv);
    (uv - v * lambda).norm()
}

/// Checks the eigenvector precondition and builds the QPE circuit.
pub fn build_qpe(u: &Gate, eigenstate: &PureState, n: usize) -> Result<Circuit> {
    let m = u.arity();
    if eigenstate.dims() != vec![2; m].as_slice() {
        return Err(Error::Dimension(format!("eigenstate dims {:?} for a {m}-qubit unitary", eigenstate.dims())));
    }
    let residual = eigen_residual(u.matrix(), eigenstate);
    if residual > 1e-9 {
        return Err(Error::NotEigenvector(residual));
    }
    build_qpe_circuit(u.matrix(), n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseEstimate {
    pub n: usize,
    pub j: u64,
    pub theta_hat: f64,
    pub probability: f64,
}

/// Exact distribution of the ancilla readout, one entry per `j`.
pub fn run_qpe(u: &Gate, eigenstate: &PureState, n: usize) -> Result<Vec<PhaseEstimate>> {
    let c = build_qpe(u, eigenstate, n)?;
    let init = PureState::zeros(n).tensor(eigenstate);
    let out = c.run_unitary(&init)?;
    let rest = eigenstate.dim();
    let probs = out.probabilities();
    let scale = (1u64 << n) as f64;
    Ok((0..1usize << n)
        .map(|j| PhaseEstimate {
            n,
            j: j as u64,
            theta_hat: j as f64 / scale,
            probability: probs[j * rest..(j + 1) * rest].iter().sum(),
        })
        .collect())
}

pub fn most_likely(dist: &[PhaseEstimate]) -> Option<PhaseEstimate> {
    dist.iter().copied().max_by(|a, b| a.probability.total_cmp(&b.probability))
}

/// `diag(1, e^{2πiθ})` with eigenstate `|1⟩`.
pub fn phase_oracle(theta: f64) -> (Gate, PureState) {
    (Gate::phase(0, 2.0 * PI * theta), PureState::qubits(1, 1).expect("basis state"))
}

/// Two-qubit gates whose endpoints sit in different blocks.
pub fn nonlocal_count(circuit: &Circuit, partition: &Partition) -> Result<usize> {
    let n = circuit.num_subsystems();
    if let Some(q) = (0..n).find(|&q| partition.node_of(q).is_none()) {
        return Err(Error::Domain(format!("qubit {q} is not assigned to a node")));
    }
    Ok(circuit
        .gates()
        .filter(|(g, _)| {
            let nodes: Vec<usize> = g.targets().iter().filter_map(|&q| partition.node_of(q)).collect();
            nodes.iter().any(|x| *x != nodes[0])
        })
        .count())
}

/// Near-equal contiguous block sizes, larger blocks first.
pub fn balanced_sizes(n: usize, k: usize) -> Vec<usize> {
    (0..k).map(|i| n / k + usize::from(i < n % k)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QftCostRow {
    pub n: usize,
    pub k: usize,
    pub sizes: Vec<usize>,
    pub two_qubit_gates: usize,
    pub nonlocal_gates: usize,
}

/// Costs of the inverse QFT on `n` qubits for every node count `1..=k`
/// with balanced contiguous blocks.
pub fn qft_nonlocal_table(n: usize, k: usize) -> Result<Vec<QftCostRow>> {
    if k == 0 || k > n {
        return Err(Error::Domain(format!("{k} nodes for {n} qubits")));
    }
    let c = build_inverse_qft(n)?;
    let two_qubit = c.gates().filter(|(g, _)| g.arity() == 2).count();
    (1..=k)
        .map(|nodes| {
            let sizes = balanced_sizes(n, nodes);
            let p = Partition::contiguous(&sizes)?;
            Ok(QftCostRow { n, k: nodes, nonlocal_gates: nonlocal_count(&c, &p)?, sizes, two_qubit_gates: two_qubit })
        })
        .collect()
}

/// Ancillas on one node, the `m` system qubits on another. Returns the
/// partition and the number of gates crossing the cut.
pub fn qpe_split_registers(m: usize, n: usize) -> Result<(Partition, usize)> {
    if m == 0 {
        return Err(Error::Domain("system register needs at least one qubit".into()));
    }
    let u = Matrix::identity(1 << m, 1 << m);
    let c = build_qpe_circuit(&u, n)?;
    let p = Partition::contiguous(&[n, m])?;
    let count = nonlocal_count(&c, &p)?;
    Ok((p, count))
}

/// Unitary DFT `F[j][k] = e^{2πi jk/N}/√N`.
pub fn dft_matrix(n: usize) -> Matrix {
    let dim = 1usize << n;
    let s = 1.0 / (dim as f64).sqrt();
    Matrix::from_fn(dim, dim, |j, k| linalg::cis(2.0 * PI * (j * k % dim) as f64 / dim as f64) * s)
}

/// Permutation reversing the order of `n` qubits.
pub fn bit_reversal(n: usize) -> Matrix {
    let dim = 1usize << n;
    let rev = |x: usize| (0..n).fold(0, |acc, b| acc | ((x >> b & 1) << (n - 1 - b)));
    Matrix::from_fn(dim, dim, |i, j| if rev(j) == i { linalg::ONE } else { linalg::ZERO })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::max_abs;
    use proptest::prelude::*;

    #[test]
    fn inverse_qft_matches_dft() {
        assert!(max_abs(&(build_inverse_qft(1).unwrap().unitary().unwrap() - matrices::h())) < 1e-12);
        for n in 1..=6 {
            let u = build_inverse_qft(n).unwrap().unitary().unwrap();
            let expect = dft_matrix(n).adjoint() * bit_reversal(n);
            assert!(max_abs(&(&u - expect)) < 1e-9, "n={n}");
        }
    }

    #[test]
    fn inverse_qft_undoes_forward_dft() {
        for n in 1..=6 {
            let u = build_inverse_qft(n).unwrap().unitary().unwrap();
            let id = Matrix::identity(1 << n, 1 << n);
            assert!(max_abs(&(u * bit_reversal(n) * dft_matrix(n) - id)) < 1e-9);
        }
    }

    #[test]
    fn controlled_phase_count() {
        for n in 1..=8 {
            let c = build_inverse_qft(n).unwrap();
            assert_eq!(c.gates().filter(|(g, _)| g.arity() == 2).count(), n * (n - 1) / 2);
        }
    }

    #[test]
    fn dyadic_phases_are_exact() {
        let (u, psi) = phase_oracle(0.25);
        let d = run_qpe(&u, &psi, 2).unwrap();
        assert!((d[1].probability - 1.0).abs() < 1e-9);
        let (u, psi) = phase_oracle(5.0 / 16.0);
        let best = most_likely(&run_qpe(&u, &psi, 4).unwrap()).unwrap();
        assert_eq!(best.j, 5);
        assert!((best.probability - 1.0).abs() < 1e-9);
    }

    #[test]
    fn third_is_estimated_as_three_eighths() {
        let (u, psi) = phase_oracle(1.0 / 3.0);
        let d = run_qpe(&u, &psi, 3).unwrap();
        let best = most_likely(&d).unwrap();
        assert_eq!(best.j, 3);
        assert!(best.probability >= 4.0 / (PI * PI) - 1e-9);
        // independent oracle: |Σ_t e^{2πi t (θ - j/N)}|² / N²
        let delta = 1.0 / 3.0 - 3.0 / 8.0;
        let amp: linalg::C64 = (0..8).map(|t| linalg::cis(2.0 * PI * t as f64 * delta)).sum();
        assert!((best.probability - amp.norm_sqr() / 64.0).abs() < 1e-12);
    }

    #[test]
    fn non_eigenvector_is_rejected() {
        let plus = PureState::qubits(1, 0).unwrap().apply(&Gate::h(0)).unwrap();
        let (u, _) = phase_oracle(0.25);
        assert!(matches!(build_qpe(&u, &plus, 2), Err(Error::NotEigenvector(_))));
    }

    #[test]
    fn two_qubit_unitary_estimation() {
        // U = Z ⊗ S has eigenvalue e^{2πi·3/4} on |11⟩
        let u = Gate::custom("ZS", linalg::kron(&matrices::z(), &matrices::phase(PI / 2.0)), vec![0, 1]).unwrap();
        let psi = PureState::qubits(2, 3).unwrap();
        let best = most_likely(&run_qpe(&u, &psi, 3).unwrap()).unwrap();
        assert_eq!(best.j, 6);
    }

    #[test]
    fn nonlocal_counts() {
        let c = build_inverse_qft(4).unwrap();
        assert_eq!(nonlocal_count(&c, &Partition::singletons(4)).unwrap(), 6);
        assert_eq!(nonlocal_count(&c, &Partition::contiguous(&[2, 2]).unwrap()).unwrap(), 4);
        assert_eq!(nonlocal_count(&c, &Partition::contiguous(&[4]).unwrap()).unwrap(), 0);
        assert!(nonlocal_count(&c, &Partition::contiguous(&[3]).unwrap()).is_err());
    }

    #[test]
    fn one_qubit_per_node_is_quadratic() {
        for k in 3..=8 {
            let rows = qft_nonlocal_table(k, k).unwrap();
            assert_eq!(rows[k - 1].nonlocal_gates, k * (k - 1) / 2);
            // every qubit pair shares exactly one controlled phase
            for row in &rows {
                let expect: usize = (0..row.sizes.len())
                    .flat_map(|a| (a + 1..row.sizes.len()).map(move |b| (a, b)))
                    .map(|(a, b)| row.sizes[a] * row.sizes[b])
                    .sum();
                assert_eq!(row.nonlocal_gates, expect);
            }
        }
    }

    #[test]
    fn register_split() {
        assert_eq!(qpe_split_registers(1, 3).unwrap().1, 3);
        assert_eq!(qpe_split_registers(2, 1).unwrap().1, 1);
        let (p, _) = qpe_split_registers(2, 3).unwrap();
        let qft = build_inverse_qft(3).unwrap().extended(2);
        assert_eq!(nonlocal_count(&qft, &p).unwrap(), 0);
    }

    proptest! {
        #[test]
        fn qpe_distribution_is_normalized(theta in 0.0f64..1.0, n in 1usize..5, phase in -3.0f64..3.0) {
            let (u, psi) = phase_oracle(theta);
            let d = run_qpe(&u, &psi, n).unwrap();
            let total: f64 = d.iter().map(|e| e.probability).sum();
            prop_assert!((total - 1.0).abs() < 1e-10);
            let rephased = run_qpe(&u, &psi.with_global_phase(phase), n).unwrap();
            for (a, b) in d.iter().zip(&rephased) {
                prop_assert!((a.probability - b.probability).abs() < 1e-12);
            }
        }

        #[test]
        fn phase_on_u_shifts_the_estimate(theta in 0.0f64..1.0, n in 1usize..5, phase in -3.0f64..3.0) {
            // controlled e^{iφ}U kicks φ back onto the ancillas, so it acts as θ + φ/2π
            let (u, psi) = phase_oracle(theta);
            let shifted = Gate::custom("eU", u.matrix() * linalg::cis(phase), vec![0]).unwrap();
            let (u2, _) = phase_oracle(theta + phase / (2.0 * PI));
            let a = run_qpe(&shifted, &psi, n).unwrap();
            let b = run_qpe(&u2, &psi, n).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x.probability - y.probability).abs() < 1e-9);
            }
        }

        #[test]
        fn refinement_never_lowers_the_count(sizes in proptest::collection::vec(1usize..4, 1..4), cut in 0usize..8) {
            let n: usize = sizes.iter().sum();
            let c = build_inverse_qft(n).unwrap();
            let coarse = Partition::contiguous(&sizes).unwrap();
            let block = cut % sizes.len();
            let members = coarse.blocks()[block].clone();
            if members.len() > 1 {
                let fine = coarse.split_block(block, &members[..1]).unwrap();
                prop_assert!(nonlocal_count(&c, &fine).unwrap() >= nonlocal_count(&c, &coarse).unwrap());
            }
        }
    }
}
