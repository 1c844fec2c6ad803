//! Qubit transfer over a single quantum link: direct transfer by SWAP (DIT),
//! direct teleportation (DQTp) and standard teleportation (QTp), with gate
//! accounting and entanglement swapping along repeater chains.
//!
//! Register layout: sender qubits `a_0..a_{n-1}`, then QTp ancillas, then
//! receiver qubits `b_0..b_{n-1}`. The only inter-node link joins the last
//! sender-side qubit and `b_0`. Qubit `a_q`'s state ends on `b_q`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::NodeLabel;
use crate::qcore::linalg::{r, Matrix};
use crate::qcore::{Circuit, Condition, Gate, GateKind, MixedState, PureState, State, Step};
use crate::rng::SimRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Protocol {
    Dit,
    Dqtp,
    Qtp,
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [Protocol::Dit, Protocol::Dqtp, Protocol::Qtp];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Dit => "DIT",
            Protocol::Dqtp => "DQTp",
            Protocol::Qtp => "QTp",
        }
    }

    /// Counts stated for this protocol: ancillas, local gates, nonlocal gates.
    pub fn reference_tally(self, n: usize) -> ResourceTally {
        let n = n as i64;
        let (ancilla, local, nonlocal) = match self {
            Protocol::Dit => (0, 6 * (n - 1), 3 * n),
            Protocol::Dqtp => (0, 8 * n - 6, n),
            Protocol::Qtp => (n, 9 * n - 6, n),
        };
        ResourceTally {
            ancilla_qubits: ancilla as usize,
            local_gates: local as usize,
            nonlocal_gates: nonlocal as usize,
        }
    }
}

/// A transfer circuit with its register roles.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferCircuit {
    pub protocol: Protocol,
    pub n: usize,
    pub circuit: Circuit,
    pub senders: Vec<usize>,
    pub ancillas: Vec<usize>,
    pub receivers: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ResourceTally {
    pub ancilla_qubits: usize,
    pub local_gates: usize,
    pub nonlocal_gates: usize,
}

/// Measured tally next to the reference formulas.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResourceReport {
    pub protocol: Protocol,
    pub n: usize,
    pub measured: ResourceTally,
    pub reference: ResourceTally,
    /// Classically controlled corrections included in `measured.local_gates`.
    pub classical_corrections: usize,
    pub local_matches: bool,
}

/// Traffic between nodes, in program order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Message {
    /// A nonlocal gate consuming the quantum link.
    Quantum { gate: String },
    /// A measurement result sent to the node holding a controlled gate;
    /// `bit` is known only in sampled runs.
    Classical { label: usize, bit: Option<u8> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferTranscript {
    pub protocol: Protocol,
    pub input: PureState,
    pub messages: Vec<Message>,
    /// Joint state of the receivers (and any reference qubits).
    pub output: MixedState,
    pub fidelity: f64,
}

fn node_a() -> NodeLabel {
    NodeLabel::new("A")
}

fn node_b() -> NodeLabel {
    NodeLabel::new("B")
}

struct Builder {
    circuit: Circuit,
}

impl Builder {
    fn new(a_qubits: usize, b_qubits: usize) -> Result<Self> {
        let mut circuit = Circuit::new(a_qubits + b_qubits);
        for q in 0..a_qubits {
            circuit.assign(q, node_a())?;
        }
        for q in a_qubits..a_qubits + b_qubits {
            circuit.assign(q, node_b())?;
        }
        Ok(Self { circuit })
    }

    fn gate(&mut self, g: Gate) -> Result<()> {
        let node = self.circuit.node_of(g.targets()[0]).cloned().expect("assigned");
        self.circuit.add(g.at(node))?;
        Ok(())
    }

    fn controlled(&mut self, g: Gate, label: usize) -> Result<()> {
        let node = self.circuit.node_of(g.targets()[0]).cloned().expect("assigned");
        self.circuit.controlled(g.at(node), Condition::on(label))?;
        Ok(())
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::Domain("transfer needs at least one qubit".into()));
    }
    Ok(())
}

/// SWAP chain: each qubit is swapped onto the link, across it, and off it.
pub fn build_dit(n: usize) -> Result<TransferCircuit> {
    check_n(n)?;
    let mut b = Builder::new(n, n)?;
    let link_a = n - 1;
    let bq = |q: usize| n + q;
    for t in 0..n {
        let q = n - 1 - t;
        if t > 0 {
            b.gate(Gate::swap(q, link_a))?;
        }
        b.gate(Gate::swap(link_a, bq(0)))?;
        if t < n - 1 {
            b.gate(Gate::swap(bq(0), bq(q)))?;
        }
    }
    Ok(TransferCircuit {
        protocol: Protocol::Dit,
        n,
        circuit: b.circuit,
        senders: (0..n).collect(),
        ancillas: Vec::new(),
        receivers: (n..2 * n).collect(),
    })
}

/// Nonlocal CNOT copies each qubit onto the receiver in the Z basis; the
/// sender's qubit is then measured in X and its bit drives a Z correction.
pub fn build_dqtp(n: usize) -> Result<TransferCircuit> {
    check_n(n)?;
    let mut b = Builder::new(n, n)?;
    let link_a = n - 1;
    let bq = |q: usize| n + q;
    // key[q]: sender-side qubit that holds the measurement key for a_q
    let mut key = vec![0usize; n];
    let mut pending: Option<usize> = None;
    for t in 0..n {
        let q = n - 1 - t;
        if t > 0 {
            b.gate(Gate::swap(q, link_a))?;
            if let Some(prev) = pending {
                key[prev] = q;
            }
        }
        b.gate(Gate::cnot(link_a, bq(0)))?;
        b.gate(Gate::h(link_a))?;
        if t < n - 1 {
            b.gate(Gate::swap(bq(0), bq(q)))?;
        }
        key[q] = link_a;
        pending = Some(q);
    }
    for (q, &k) in key.iter().enumerate() {
        let label = b.circuit.measure(k)?;
        b.controlled(Gate::z(bq(q)), label)?;
    }
    Ok(TransferCircuit {
        protocol: Protocol::Dqtp,
        n,
        circuit: b.circuit,
        senders: (0..n).collect(),
        ancillas: Vec::new(),
        receivers: (n..2 * n).collect(),
    })
}

/// Distributes `n` Bell pairs over the link, then teleports each qubit with
/// a local Bell measurement and two classically controlled corrections.
pub fn build_qtp(n: usize) -> Result<TransferCircuit> {
    check_n(n)?;
    let mut b = Builder::new(2 * n, n)?;
    let link_a = 2 * n - 1;
    let bq = |q: usize| 2 * n + q;
    let anc = |k: usize| 2 * n - 1 - k;
    for k in (0..n).rev() {
        b.gate(Gate::h(link_a))?;
        b.gate(Gate::cnot(link_a, bq(0)))?;
        if k > 0 {
            b.gate(Gate::swap(link_a, anc(k)))?;
            b.gate(Gate::swap(bq(0), bq(k)))?;
        }
    }
    for q in 0..n {
        b.gate(Gate::cnot(q, anc(q)))?;
        b.gate(Gate::h(q))?;
        let mz = b.circuit.measure(q)?;
        let mx = b.circuit.measure(anc(q))?;
        b.controlled(Gate::x(bq(q)), mx)?;
        b.controlled(Gate::z(bq(q)), mz)?;
    }
    Ok(TransferCircuit {
        protocol: Protocol::Qtp,
        n,
        circuit: b.circuit,
        senders: (0..n).collect(),
        ancillas: (n..2 * n).collect(),
        receivers: (2 * n..3 * n).collect(),
    })
}

pub fn build(protocol: Protocol, n: usize) -> Result<TransferCircuit> {
    match protocol {
        Protocol::Dit => build_dit(n),
        Protocol::Dqtp => build_dqtp(n),
        Protocol::Qtp => build_qtp(n),
    }
}

fn is_nonlocal(c: &Circuit, g: &Gate) -> bool {
    let first = c.node_of(g.targets()[0]);
    g.targets().iter().any(|&q| c.node_of(q) != first)
}

/// Cost of a gate as (local, nonlocal) counts over {H, T, CNOT}: SWAP is
/// three CNOTs, CZ is a CNOT between two Hadamards on the target, and Pauli
/// or phase gates count as one local single-qubit gate.
fn gate_cost(g: &Gate, nonlocal: bool) -> Result<(usize, usize)> {
    let (single, cnots) = match g.kind() {
        GateKind::I => (0, 0),
        GateKind::H | GateKind::T | GateKind::Tdg | GateKind::S | GateKind::Sdg => (1, 0),
        GateKind::X | GateKind::Y | GateKind::Z => (1, 0),
        GateKind::Cnot => (0, 1),
        GateKind::Cz => (2, 1),
        GateKind::Swap => (0, 3),
        other => return Err(Error::UnsupportedGate(other.to_string())),
    };
    Ok(if nonlocal { (single, cnots) } else { (single + cnots, 0) })
}

pub fn tally_resources(tc: &TransferCircuit) -> Result<ResourceTally> {
    let mut local = 0;
    let mut nonlocal = 0;
    for (g, _) in tc.circuit.gates() {
        let (l, nl) = gate_cost(g, is_nonlocal(&tc.circuit, g))?;
        local += l;
        nonlocal += nl;
    }
    Ok(ResourceTally { ancilla_qubits: tc.ancillas.len(), local_gates: local, nonlocal_gates: nonlocal })
}

pub fn resource_report(tc: &TransferCircuit) -> Result<ResourceReport> {
    let measured = tally_resources(tc)?;
    let reference = tc.protocol.reference_tally(tc.n);
    let classical_corrections = tc.circuit.gates().filter(|(_, controlled)| *controlled).count();
    Ok(ResourceReport {
        protocol: tc.protocol,
        n: tc.n,
        measured,
        reference,
        classical_corrections,
        local_matches: measured.local_gates == reference.local_gates,
    })
}

fn messages(c: &Circuit, record: Option<&[u8]>) -> Vec<Message> {
    let mut sent = vec![false; c.num_labels()];
    let mut out = Vec::new();
    for step in c.steps() {
        match step {
            Step::Gate(g) if is_nonlocal(c, g) => out.push(Message::Quantum { gate: g.kind().to_string() }),
            Step::Controlled { gate, condition } => {
                let here = c.node_of(gate.targets()[0]);
                for &l in condition.labels() {
                    if !sent[l] && c.node_of(c.measured_qubits()[l]) != here {
                        sent[l] = true;
                        out.push(Message::Classical { label: l, bit: record.map(|r| r[l]) });
                    }
                }
            }
            _ => {}
        }
    }
    out
}

/// Reduced state on `order`, in that order.
fn reduced_in_order(rho: &MixedState, order: &[usize]) -> Result<MixedState> {
    let red = rho.partial_trace(order)?;
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    let perm: Vec<usize> = order.iter().map(|q| sorted.iter().position(|s| s == q).expect("kept")).collect();
    red.permute(&perm)
}

/// Runs a transfer circuit on `input`, whose first `n` qubits are the
/// senders' and any further qubits are untouched references. Exact when
/// `rng` is `None`: every measurement branch is enumerated and averaged.
pub fn run_transfer(tc: &TransferCircuit, input: &PureState, rng: Option<&mut SimRng>) -> Result<TransferTranscript> {
    let k = input.num_subsystems();
    if k < tc.n || input.dims().iter().any(|&d| d != 2) {
        return Err(Error::Dimension(format!("input has {k} subsystems, protocol sends {}", tc.n)));
    }
    let refs = k - tc.n;
    let width = tc.circuit.num_subsystems();
    let circuit = tc.circuit.extended(refs);
    // input ⊗ |0…0⟩ is ordered [senders, refs, rest]; move refs to the end
    let joined = input.tensor(&PureState::zeros(width - tc.n));
    let order: Vec<usize> = (0..tc.n).chain(k..k + width - tc.n).chain(tc.n..k).collect();
    let init = if width > tc.n { joined.permute(&order)? } else { joined };
    let keep: Vec<usize> = tc.receivers.iter().copied().chain(width..width + refs).collect();

    let (output, msgs) = match rng {
        None => {
            let dim = 1usize << keep.len();
            let mut acc = Matrix::zeros(dim, dim);
            for b in circuit.branches(&init)? {
                let red = reduced_in_order(&b.state.to_density(), &keep)?;
                acc += red.matrix() * r(b.probability);
            }
            (MixedState::new(vec![2; keep.len()], acc)?, messages(&tc.circuit, None))
        }
        Some(g) => {
            let t = circuit.run_sampled(&init, g)?;
            (reduced_in_order(&t.state.to_density(), &keep)?, messages(&tc.circuit, Some(&t.record)))
        }
    };
    let fidelity = crate::qcore::fidelity(&State::Mixed(output.clone()), &State::Pure(input.clone()))?.clamp(0.0, 1.0);
    Ok(TransferTranscript { protocol: tc.protocol, input: input.clone(), messages: msgs, output, fidelity })
}

/// `(1 - p) ρ + p (I/2 ⊗ Tr_q ρ)` on each listed qubit.
pub fn depolarize(state: &MixedState, p_err: f64, subsystems: &[usize]) -> Result<MixedState> {
    if !(0.0..=1.0).contains(&p_err) {
        return Err(Error::Domain(format!("error probability {p_err} outside [0, 1]")));
    }
    let mut rho = state.clone();
    for &q in subsystems {
        if state.dims().get(q) != Some(&2) {
            return Err(Error::InvalidSubsystems(format!("subsystem {q} is not a qubit")));
        }
        let mut acc = rho.matrix() * r(1.0 - 0.75 * p_err);
        for pauli in [Gate::x(q), Gate::y(q), Gate::z(q)] {
            acc += rho.apply(&pauli)?.matrix() * r(0.25 * p_err);
        }
        rho = MixedState::new(state.dims().to_vec(), acc)?;
    }
    Ok(rho)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwapChainResult {
    pub hops: usize,
    /// State of the two end qubits.
    pub end_state: MixedState,
    pub fidelity: f64,
    /// Sampled Bell outcomes as (control, target) bits per repeater.
    pub outcomes: Option<Vec<(u8, u8)>>,
    /// Sampled correction `(x, z)` applied at the far end.
    pub correction: Option<(u8, u8)>,
}

/// Chain of `hops` links, each holding Φ+ on qubits `(2i, 2i+1)`. Every
/// repeater Bell-measures its two qubits; the far end applies
/// `X^{⊕ targets} Z^{⊕ controls}`.
pub fn swap_chain_circuit(hops: usize) -> Result<Circuit> {
    if hops < 1 {
        return Err(Error::Domain("a chain needs at least one hop".into()));
    }
    let n = 2 * hops;
    let mut c = Circuit::new(n);
    c.assign(0, NodeLabel::new("A"))?;
    c.assign(n - 1, NodeLabel::new("B"))?;
    let mut controls = Vec::new();
    let mut targets = Vec::new();
    for i in 1..hops {
        let node = NodeLabel::new(format!("R{i}"));
        let (u, v) = (2 * i - 1, 2 * i);
        c.assign(u, node.clone())?.assign(v, node.clone())?;
        c.add(Gate::cnot(u, v).at(node.clone()))?.add(Gate::h(u).at(node))?;
        controls.push(c.measure(u)?);
        targets.push(c.measure(v)?);
    }
    if hops > 1 {
        c.controlled(Gate::z(n - 1).at(NodeLabel::new("B")), Condition::parity(controls))?;
        c.controlled(Gate::x(n - 1).at(NodeLabel::new("B")), Condition::parity(targets))?;
    }
    Ok(c)
}

fn chain_input(hops: usize) -> PureState {
    let phi = crate::qsdc::phi_plus();
    (1..hops).fold(phi.clone(), |acc, _| acc.tensor(&phi))
}

/// End-to-end pair after swapping along `hops` links, each link's far qubit
/// depolarized with `p_err`. Exact when `rng` is `None`.
pub fn entanglement_swap_chain(hops: usize, p_err: f64, rng: Option<&mut SimRng>) -> Result<SwapChainResult> {
    if !(0.0..=1.0).contains(&p_err) {
        return Err(Error::Domain(format!("error probability {p_err} outside [0, 1]")));
    }
    let c = swap_chain_circuit(hops)?;
    let n = 2 * hops;
    let links: Vec<usize> = (0..hops).map(|i| 2 * i + 1).collect();
    let phi = crate::qsdc::phi_plus();
    match rng {
        // noiseless chains stay pure, so branch enumeration avoids the
        // 4^hops density matrix
        None if p_err == 0.0 => {
            let mut acc = Matrix::zeros(4, 4);
            for b in c.branches(&chain_input(hops))? {
                acc += b.state.partial_trace(&[0, n - 1])?.matrix() * r(b.probability);
            }
            let out = MixedState::new(vec![2, 2], acc)?;
            let fidelity = out.expectation(&phi)?;
            Ok(SwapChainResult { hops, end_state: out, fidelity, outcomes: None, correction: None })
        }
        None => {
            let rho = depolarize(&chain_input(hops).to_density(), p_err, &links)?;
            let out = c.run_density(&rho)?.partial_trace(&[0, n - 1])?;
            let fidelity = out.expectation(&phi)?;
            Ok(SwapChainResult { hops, end_state: out, fidelity, outcomes: None, correction: None })
        }
        Some(g) => {
            let mut init = chain_input(hops);
            for &q in &links {
                if g.random::<f64>() < p_err {
                    let pauli = match g.random_range(0..4) {
                        0 => None,
                        1 => Some(Gate::x(q)),
                        2 => Some(Gate::y(q)),
                        _ => Some(Gate::z(q)),
                    };
                    if let Some(p) = pauli {
                        init = init.apply(&p)?;
                    }
                }
            }
            let t = c.run_sampled(&init, g)?;
            let out = t.state.partial_trace(&[0, n - 1])?;
            let fidelity = out.expectation(&phi)?;
            let outcomes: Vec<(u8, u8)> = t.record.chunks(2).map(|p| (p[0], p[1])).collect();
            let x = outcomes.iter().fold(0, |a, o| a ^ o.1);
            let z = outcomes.iter().fold(0, |a, o| a ^ o.0);
            Ok(SwapChainResult { hops, end_state: out, fidelity, outcomes: Some(outcomes), correction: Some((x, z)) })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{haar_random_pure, trace_distance};
    use crate::rng;

    #[test]
    fn dit_three_uses_three_link_swaps() {
        let tc = build_dit(3).unwrap();
        let link_swaps = tc.circuit.gates().filter(|(g, _)| is_nonlocal(&tc.circuit, g)).count();
        assert_eq!(link_swaps, 3);
        assert_eq!(tc.circuit.gates().count(), 7);
    }

    #[test]
    fn classical_message_counts() {
        let count = |tc: &TransferCircuit| {
            messages(&tc.circuit, None).iter().filter(|m| matches!(m, Message::Classical { .. })).count()
        };
        assert_eq!(count(&build_qtp(1).unwrap()), 2);
        assert_eq!(count(&build_dqtp(1).unwrap()), 1);
        assert_eq!(count(&build_dit(2).unwrap()), 0);
    }

    #[test]
    fn every_gate_is_labelled_and_a_single_link_is_used() {
        for p in Protocol::ALL {
            let tc = build(p, 3).unwrap();
            for (g, _) in tc.circuit.gates() {
                assert!(g.node().is_some());
                if is_nonlocal(&tc.circuit, g) {
                    let mut t = g.targets().to_vec();
                    t.sort_unstable();
                    let link = if p == Protocol::Qtp { vec![5, 6] } else { vec![2, 3] };
                    assert_eq!(t, link, "{p:?}");
                }
            }
        }
    }

    #[test]
    fn tally_examples() {
        let t = |p, n| tally_resources(&build(p, n).unwrap()).unwrap();
        assert_eq!(t(Protocol::Dit, 3), ResourceTally { ancilla_qubits: 0, local_gates: 12, nonlocal_gates: 9 });
        assert_eq!(t(Protocol::Dqtp, 1), ResourceTally { ancilla_qubits: 0, local_gates: 2, nonlocal_gates: 1 });
        let q = t(Protocol::Qtp, 2);
        assert_eq!((q.ancilla_qubits, q.nonlocal_gates), (2, 2));
        assert_eq!(Protocol::Qtp.reference_tally(2).local_gates, 12);
    }

    #[test]
    fn qtp_local_gap_is_the_classical_corrections() {
        for n in 1..=6 {
            let rep = resource_report(&build_qtp(n).unwrap()).unwrap();
            assert_eq!(rep.classical_corrections, 2 * n);
            assert_eq!(rep.measured.local_gates, rep.reference.local_gates + 2 * n);
        }
    }

    #[test]
    fn unknown_gate_is_not_tallied() {
        let mut tc = build_dit(1).unwrap();
        tc.circuit.add(Gate::rotation(crate::Axis::X, 0, 0.1).at(node_a())).unwrap();
        assert!(matches!(tally_resources(&tc), Err(Error::UnsupportedGate(_))));
    }

    #[test]
    fn protocols_transfer_haar_states_exactly() {
        let mut g = rng::seeded(21);
        for p in Protocol::ALL {
            for n in 1..=2 {
                let tc = build(p, n).unwrap();
                for _ in 0..5 {
                    let psi = haar_random_pure(&vec![2; n], &mut g).unwrap();
                    let t = run_transfer(&tc, &psi, None).unwrap();
                    assert!((t.fidelity - 1.0).abs() < 1e-9, "{p:?} n={n}: {}", t.fidelity);
                }
            }
        }
    }

    #[test]
    fn sampled_runs_also_deliver() {
        let mut g = rng::seeded(5);
        for p in Protocol::ALL {
            let tc = build(p, 2).unwrap();
            let psi = haar_random_pure(&[2, 2], &mut g).unwrap();
            let t = run_transfer(&tc, &psi, Some(&mut g)).unwrap();
            assert!((t.fidelity - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn qtp_preserves_entanglement_with_reference() {
        let phi = crate::qsdc::phi_plus();
        let t = run_transfer(&build_qtp(1).unwrap(), &phi, None).unwrap();
        assert!((t.fidelity - 1.0).abs() < 1e-9);
    }

    #[test]
    fn qtp_sends_only_bits_after_distribution() {
        let msgs = messages(&build_qtp(3).unwrap().circuit, None);
        let first_bit = msgs.iter().position(|m| matches!(m, Message::Classical { .. })).unwrap();
        assert!(msgs[first_bit..].iter().all(|m| matches!(m, Message::Classical { .. })));
    }

    #[test]
    fn mismatched_input_is_rejected() {
        let tc = build_dit(2).unwrap();
        assert!(run_transfer(&tc, &PureState::zeros(1), None).is_err());
        assert!(build_qtp(0).is_err());
    }

    #[test]
    fn noiseless_chains_end_in_phi_plus() {
        for hops in 1..=4 {
            assert!((entanglement_swap_chain(hops, 0.0, None).unwrap().fidelity - 1.0).abs() < 1e-9);
        }
        let mut g = rng::seeded(8);
        for hops in 1..=4 {
            assert!((entanglement_swap_chain(hops, 0.0, Some(&mut g)).unwrap().fidelity - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn noisy_chain_fidelity_decreases_with_hops() {
        let f: Vec<f64> = (1..=4).map(|h| entanglement_swap_chain(h, 0.1, None).unwrap().fidelity).collect();
        // single link: 1 - 3p/4
        assert!((f[0] - (1.0 - 0.75 * 0.1)).abs() < 1e-12);
        for w in f.windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn full_depolarization_gives_maximally_mixed_marginal() {
        let phi = crate::qsdc::phi_plus().to_density();
        let out = depolarize(&phi, 1.0, &[1]).unwrap();
        let expect = MixedState::maximally_mixed(vec![2, 2]).unwrap();
        assert!(trace_distance(&State::Mixed(out), &State::Mixed(expect)).unwrap() < 1e-12);
        assert_eq!(depolarize(&phi, 0.0, &[0]).unwrap(), phi);
        assert!(depolarize(&phi, 1.5, &[0]).is_err());
    }
}
