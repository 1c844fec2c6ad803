//! Hidden-gate blind computing and a blind two-qubit Grover search.
//!
//! Grover layout: data qubits 0 and 1, ancillas 2..=5. Ancillas 2 and 4 are
//! entangled with qubit 0, ancillas 3 and 5 with qubit 1. Each CNOT followed
//! by a Y-basis measurement (S†, H, measure) applies `S^{±1}` to the data
//! qubit, so a pair of ancillas leaves `Z^{1⊕m⊕m'}` behind. Oscar's
//! classically controlled `R_Z(π)` flags cancel that and implement the
//! oracle, masked by his random bits `k̄`, `l̄`.
//!
//! Hidden parameters `i, j, k, l ∈ {1, 3}` rotate either the data qubits
//! (X mode) or ancillas 4 and 5 (Y mode) by `(i+k)π/2` and `(j+l)π/2`,
//! which is a bit flip exactly when `i = k` (resp. `j = l`). Writing
//! `x̄ = [x = 3]`, the raw output is `(w_0 ⊕ j̄, w_1 ⊕ ī)` and Alice removes
//! the mask.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::linalg::{self, Matrix};
use crate::qcore::{Axis, Circuit, Condition, Gate, MixedState, PureState};

/// `Z^i X^j H Z^j X^i` equals `H` up to global phase.
pub fn hidden_gate_identity(i: u8, j: u8) -> Result<bool> {
    if i > 1 || j > 1 {
        return Err(Error::Domain(format!("hiding bits ({i}, {j}) must be 0 or 1")));
    }
    use crate::qcore::gate::matrices::{h, x, z};
    let pow = |m: Matrix, e: u8| if e == 1 { m } else { Matrix::identity(2, 2) };
    let seq = pow(z(), i) * pow(x(), j) * h() * pow(z(), j) * pow(x(), i);
    // every entry of H is nonzero, so one ratio fixes the global phase
    let phase = seq[(0, 0)] / h()[(0, 0)];
    Ok((phase.norm() - 1.0).abs() < 1e-12 && linalg::max_abs(&(seq - h() * phase)) < 1e-12)
}

/// Alice's Pauli corrections around one hidden H.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HiddenGateRecord {
    pub i: u8,
    pub j: u8,
    pub gate: &'static str,
    /// Applied before sending, in order.
    pub pre: Vec<&'static str>,
    /// Applied after receiving, in order.
    pub post: Vec<&'static str>,
}

impl HiddenGateRecord {
    pub fn for_h(i: u8, j: u8) -> Self {
        let pick = |b: u8, name| if b == 1 { vec![name] } else { vec![] };
        let mut pre = pick(i, "X");
        pre.extend(pick(j, "Z"));
        let mut post = pick(j, "X");
        post.extend(pick(i, "Z"));
        Self { i, j, gate: "H", pre, post }
    }
}

/// `(1/4) Σ_{i,j} X^i Z^j ρ Z^j X^i`.
pub fn pauli_twirl(rho: &MixedState) -> Result<MixedState> {
    if rho.dims() != [2] {
        return Err(Error::Dimension(format!("twirl acts on one qubit, got dims {:?}", rho.dims())));
    }
    use crate::qcore::gate::matrices::{x, z};
    let mut acc = Matrix::zeros(2, 2);
    for i in 0..2 {
        for j in 0..2 {
            let xi = if i == 1 { x() } else { Matrix::identity(2, 2) };
            let zj = if j == 1 { z() } else { Matrix::identity(2, 2) };
            let p = xi * zj;
            acc += &p * rho.matrix() * p.adjoint();
        }
    }
    MixedState::new(vec![2], acc * linalg::r(0.25))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BlindGroverInstance {
    /// Marked string `w = 2 w_0 + w_1`.
    pub oracle: u8,
    pub i: u8,
    pub j: u8,
    pub k: u8,
    pub l: u8,
    /// `X` rotates the data qubits, `Y` rotates ancillas 4 and 5.
    pub axis: Axis,
}

impl BlindGroverInstance {
    pub fn new(oracle: u8, [i, j, k, l]: [u8; 4], axis: Axis) -> Result<Self> {
        if oracle > 3 {
            return Err(Error::Domain(format!("oracle {oracle} outside 0..4")));
        }
        if [i, j, k, l].iter().any(|v| *v != 1 && *v != 3) {
            return Err(Error::Domain("hidden parameters must be 1 or 3".into()));
        }
        if axis == Axis::Z {
            return Err(Error::Domain("hiding rotations use the X or Y axis".into()));
        }
        Ok(Self { oracle, i, j, k, l, axis })
    }

    pub fn random<R: Rng + ?Sized>(oracle: u8, rng: &mut R) -> Result<Self> {
        let mut p = || if rng.random::<bool>() { 3 } else { 1 };
        let params = [p(), p(), p(), p()];
        let axis = if rng.random::<bool>() { Axis::Y } else { Axis::X };
        Self::new(oracle, params, axis)
    }

    /// Every hidden-parameter choice for `oracle`: 16 parameter sets times
    /// two axes.
    pub fn all(oracle: u8) -> Vec<Self> {
        let mut out = Vec::with_capacity(32);
        for axis in [Axis::X, Axis::Y] {
            for bits in 0..16u8 {
                let v = |b: u8| if bits >> b & 1 == 1 { 3 } else { 1 };
                out.push(Self::new(oracle, [v(3), v(2), v(1), v(0)], axis).expect("valid"));
            }
        }
        out
    }

    fn bar(v: u8) -> u8 {
        u8::from(v == 3)
    }

    /// Alice's output mask `(j̄, ī)`.
    pub fn mask(&self) -> [u8; 2] {
        [Self::bar(self.j), Self::bar(self.i)]
    }

    fn marked(&self) -> [u8; 2] {
        [self.oracle >> 1, self.oracle & 1]
    }
}

/// Measurement labels in the order they are recorded.
const M2: usize = 0;
const M3: usize = 1;
const M4: usize = 2;
const M5: usize = 3;
const OUT0: usize = 4;
const OUT1: usize = 5;

pub fn blind_grover_circuit(inst: &BlindGroverInstance) -> Result<Circuit> {
    let mut c = Circuit::new(6);
    let (rot0, rot1) = match inst.axis {
        Axis::Y => (4, 5),
        _ => (0, 1),
    };
    for (q, a, b) in [(rot0, inst.i, inst.k), (rot1, inst.j, inst.l)] {
        c.add(Gate::rotation(inst.axis, q, a as f64 * PI / 2.0))?;
        c.add(Gate::rotation(inst.axis, q, b as f64 * PI / 2.0))?;
    }
    c.add(Gate::h(0))?.add(Gate::h(1))?;
    for (ctrl, anc) in [(0, 2), (1, 3), (0, 4), (1, 5)] {
        c.add(Gate::cnot(ctrl, anc))?;
    }
    c.add(Gate::cz(0, 1))?;
    for q in 2..6 {
        c.add(Gate::sdg(q))?.add(Gate::h(q))?;
    }
    for q in 2..6 {
        c.measure(q)?;
    }
    // Oscar: o_0 = 1 ⊕ w_1 on qubit 0, o_1 = 1 ⊕ w_0 on qubit 1.
    let [w0, w1] = inst.marked();
    let f0 = Condition::parity(vec![M2, M4]).inverted((1 ^ w1) ^ BlindGroverInstance::bar(inst.k) == 1);
    let f1 = Condition::parity(vec![M3, M5]).inverted((1 ^ w0) ^ BlindGroverInstance::bar(inst.l) == 1);
    c.controlled(Gate::rotation(Axis::Z, 0, PI), f0)?;
    c.controlled(Gate::rotation(Axis::Z, 1, PI), f1)?;
    for q in 0..2 {
        c.add(Gate::h(q))?;
    }
    for q in 0..2 {
        c.add(Gate::z(q))?;
    }
    c.add(Gate::cz(0, 1))?;
    for q in 0..2 {
        c.add(Gate::h(q))?;
    }
    c.measure(0)?;
    c.measure(1)?;
    Ok(c)
}

/// Everything Bob sees: ancilla outcomes, whether each oracle rotation was
/// applied, and the raw output bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct BobRecord {
    pub ancillas: [u8; 4],
    pub oracle_flags: [u8; 2],
    pub output: [u8; 2],
}

fn bob_record(inst: &BlindGroverInstance, record: &[u8]) -> BobRecord {
    let [w0, w1] = inst.marked();
    let f0 = record[M2] ^ record[M4] ^ 1 ^ w1 ^ BlindGroverInstance::bar(inst.k);
    let f1 = record[M3] ^ record[M5] ^ 1 ^ w0 ^ BlindGroverInstance::bar(inst.l);
    BobRecord {
        ancillas: [record[M2], record[M3], record[M4], record[M5]],
        oracle_flags: [f0, f1],
        output: [record[OUT0], record[OUT1]],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlindGroverTranscript {
    pub instance: BlindGroverInstance,
    pub bob: BobRecord,
    pub decoded: u8,
}

fn decode(inst: &BlindGroverInstance, output: [u8; 2]) -> u8 {
    let [a, b] = inst.mask();
    ((output[0] ^ a) << 1) | (output[1] ^ b)
}

pub fn blind_grover_run<R: Rng + ?Sized>(inst: &BlindGroverInstance, rng: &mut R) -> Result<BlindGroverTranscript> {
    let c = blind_grover_circuit(inst)?;
    let t = c.run_sampled(&PureState::zeros(6), rng)?;
    let bob = bob_record(inst, &t.record);
    Ok(BlindGroverTranscript { instance: *inst, bob, decoded: decode(inst, bob.output) })
}

/// Exact probability that Alice decodes the marked item.
pub fn blind_grover_success(inst: &BlindGroverInstance) -> Result<f64> {
    let c = blind_grover_circuit(inst)?;
    let branches = c.branches(&PureState::zeros(6))?;
    Ok(branches
        .iter()
        .filter(|b| decode(inst, bob_record(inst, &b.record).output) == inst.oracle)
        .map(|b| b.probability)
        .sum())
}

pub type BobDistribution = BTreeMap<BobRecord, f64>;

/// Exact distribution of Bob's records for one fixed instance.
pub fn bob_view_given(inst: &BlindGroverInstance) -> Result<BobDistribution> {
    let c = blind_grover_circuit(inst)?;
    let mut dist = BobDistribution::new();
    for b in c.branches(&PureState::zeros(6))? {
        *dist.entry(bob_record(inst, &b.record)).or_insert(0.0) += b.probability;
    }
    Ok(dist)
}

/// Bob's view for `oracle`, averaged uniformly over all hidden parameters.
pub fn bob_view_distribution(oracle: u8) -> Result<BobDistribution> {
    let instances = BlindGroverInstance::all(oracle);
    let w = 1.0 / instances.len() as f64;
    let mut dist = BobDistribution::new();
    for inst in &instances {
        for (rec, p) in bob_view_given(inst)? {
            *dist.entry(rec).or_insert(0.0) += w * p;
        }
    }
    Ok(dist)
}

pub fn total_variation(a: &BobDistribution, b: &BobDistribution) -> f64 {
    let keys: std::collections::BTreeSet<_> = a.keys().chain(b.keys()).collect();
    0.5 * keys.into_iter().map(|k| (a.get(k).unwrap_or(&0.0) - b.get(k).unwrap_or(&0.0)).abs()).sum::<f64>()
}
