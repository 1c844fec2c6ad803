//! Circuits with mid-circuit measurement and classically controlled gates.
//!
//! Three execution modes share one step list:
//! - [`Circuit::run_sampled`] draws a single trajectory,
//! - [`Circuit::branches`] enumerates every measurement record exactly,
//! - [`Circuit::run_density`] evolves a density matrix with deferred
//!   measurement, averaging over records.

use rand::Rng;

use super::gate::Gate;
use super::linalg::{self, Matrix, Vector, ONE};
use super::measure::{sample, ProjectiveMeasurement};
use super::state::{MixedState, PureState};
use crate::error::{Error, Result};
use crate::network::NodeLabel;

/// Fires when the parity of the referenced measurement labels, XOR `invert`,
/// is 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition {
    labels: Vec<usize>,
    invert: bool,
}

impl Condition {
    pub fn on(label: usize) -> Self {
        Self { labels: vec![label], invert: false }
    }

    pub fn parity(labels: Vec<usize>) -> Self {
        Self { labels, invert: false }
    }

    /// Always-true or always-false condition with no labels.
    pub fn constant(value: bool) -> Self {
        Self { labels: Vec::new(), invert: value }
    }

    pub fn inverted(mut self, invert: bool) -> Self {
        self.invert ^= invert;
        self
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn fires(&self, record: &[u8]) -> bool {
        let p = self.labels.iter().fold(0u8, |acc, &l| acc ^ record[l]);
        (p ^ self.invert as u8) == 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    Gate(Gate),
    /// Computational-basis measurement of a qubit, stored under `label`.
    Measure {
        qubit: usize,
        label: usize,
    },
    Controlled {
        gate: Gate,
        condition: Condition,
    },
}

/// One sampled run: measurement record and final normalized state.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub record: Vec<u8>,
    pub state: PureState,
}

/// One exactly enumerated record with its probability.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub probability: f64,
    pub record: Vec<u8>,
    pub state: PureState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    dims: Vec<usize>,
    steps: Vec<Step>,
    layout: Vec<Option<NodeLabel>>,
    measured: Vec<usize>,
}

impl Circuit {
    /// Empty circuit on `n` qubits.
    pub fn new(n: usize) -> Self {
        Self::with_dims(vec![2; n])
    }

    pub fn with_dims(dims: Vec<usize>) -> Self {
        let n = dims.len();
        Self { dims, steps: Vec::new(), layout: vec![None; n], measured: Vec::new() }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn num_labels(&self) -> usize {
        self.measured.len()
    }

    /// Qubit measured under each label.
    pub fn measured_qubits(&self) -> &[usize] {
        &self.measured
    }

    fn check_gate(&self, gate: &Gate) -> Result<()> {
        linalg::check_targets(&self.dims, gate.targets())?;
        let local: usize = gate.targets().iter().map(|&t| self.dims[t]).product();
        if gate.matrix().nrows() != local {
            return Err(Error::Dimension(format!(
                "gate {} has dimension {}, targets span {local}",
                gate.kind(),
                gate.matrix().nrows()
            )));
        }
        Ok(())
    }

    pub fn add(&mut self, gate: Gate) -> Result<&mut Self> {
        self.check_gate(&gate)?;
        self.steps.push(Step::Gate(gate));
        Ok(self)
    }

    /// Adds a computational-basis measurement and returns its label.
    pub fn measure(&mut self, qubit: usize) -> Result<usize> {
        linalg::check_targets(&self.dims, &[qubit])?;
        if self.dims[qubit] != 2 {
            return Err(Error::Circuit(format!("subsystem {qubit} is not a qubit")));
        }
        let label = self.measured.len();
        self.measured.push(qubit);
        self.steps.push(Step::Measure { qubit, label });
        Ok(label)
    }

    pub fn controlled(&mut self, gate: Gate, condition: Condition) -> Result<&mut Self> {
        self.check_gate(&gate)?;
        if let Some(&l) = condition.labels.iter().find(|&&l| l >= self.measured.len()) {
            return Err(Error::Circuit(format!("condition references unknown label {l}")));
        }
        self.steps.push(Step::Controlled { gate, condition });
        Ok(self)
    }

    /// Appends all steps of `other`, relabelling its measurements.
    pub fn append(&mut self, other: &Circuit) -> Result<&mut Self> {
        if other.dims != self.dims {
            return Err(Error::Dimension("appended circuit has different dims".into()));
        }
        let offset = self.measured.len();
        for step in &other.steps {
            self.steps.push(match step {
                Step::Gate(g) => Step::Gate(g.clone()),
                Step::Measure { qubit, label } => {
                    self.measured.push(*qubit);
                    Step::Measure { qubit: *qubit, label: label + offset }
                }
                Step::Controlled { gate, condition } => Step::Controlled {
                    gate: gate.clone(),
                    condition: Condition {
                        labels: condition.labels.iter().map(|l| l + offset).collect(),
                        invert: condition.invert,
                    },
                },
            });
        }
        Ok(self)
    }

    /// Copy with `extra` idle qubits appended after the existing ones.
    pub fn extended(&self, extra: usize) -> Circuit {
        let mut c = self.clone();
        c.dims.extend(std::iter::repeat_n(2, extra));
        c.layout.extend(std::iter::repeat_n(None, extra));
        c
    }

    pub fn assign(&mut self, qubit: usize, node: NodeLabel) -> Result<&mut Self> {
        linalg::check_targets(&self.dims, &[qubit])?;
        self.layout[qubit] = Some(node);
        Ok(self)
    }

    pub fn node_of(&self, qubit: usize) -> Option<&NodeLabel> {
        self.layout.get(qubit).and_then(Option::as_ref)
    }

    pub fn layout(&self) -> &[Option<NodeLabel>] {
        &self.layout
    }

    /// Every gate in program order, classically controlled ones included.
    pub fn gates(&self) -> impl Iterator<Item = (&Gate, bool)> {
        self.steps.iter().filter_map(|s| match s {
            Step::Gate(g) => Some((g, false)),
            Step::Controlled { gate, .. } => Some((gate, true)),
            Step::Measure { .. } => None,
        })
    }

    pub fn has_measurements(&self) -> bool {
        !self.measured.is_empty()
    }

    /// Full unitary of a measurement-free circuit.
    pub fn unitary(&self) -> Result<Matrix> {
        if self.has_measurements() {
            return Err(Error::Circuit("circuit contains measurements".into()));
        }
        let d = linalg::total_dim(&self.dims);
        let mut u = Matrix::identity(d, d);
        for (g, _) in self.gates() {
            u = linalg::apply_local_left(&u, &self.dims, g.targets(), g.matrix())?;
        }
        Ok(u)
    }

    fn check_input(&self, dims: &[usize]) -> Result<()> {
        if dims != self.dims.as_slice() {
            return Err(Error::Dimension(format!("state dims {dims:?}, circuit dims {:?}", self.dims)));
        }
        Ok(())
    }

    /// Applies a measurement-free circuit to a pure state.
    pub fn run_unitary(&self, init: &PureState) -> Result<PureState> {
        if self.has_measurements() {
            return Err(Error::Circuit("circuit contains measurements".into()));
        }
        self.check_input(init.dims())?;
        let mut s = init.clone();
        for (g, _) in self.gates() {
            s = s.apply(g)?;
        }
        Ok(s)
    }

    pub fn run_sampled<R: Rng + ?Sized>(&self, init: &PureState, rng: &mut R) -> Result<Trajectory> {
        self.check_input(init.dims())?;
        let mut state = init.clone();
        let mut record = vec![0u8; self.measured.len()];
        for step in &self.steps {
            match step {
                Step::Gate(g) => state = state.apply(g)?,
                Step::Controlled { gate, condition } => {
                    if condition.fires(&record) {
                        state = state.apply(gate)?;
                    }
                }
                Step::Measure { qubit, label } => {
                    let (p0, p1) = qubit_probabilities(&state, *qubit);
                    let bit = sample(&[p0, p1], rng) as u8;
                    state = collapse(&state, *qubit, bit)?;
                    record[*label] = bit;
                }
            }
        }
        Ok(Trajectory { record, state })
    }

    /// Exact enumeration of measurement records with non-zero probability.
    pub fn branches(&self, init: &PureState) -> Result<Vec<Branch>> {
        self.check_input(init.dims())?;
        let mut live = vec![Branch { probability: 1.0, record: vec![0u8; self.measured.len()], state: init.clone() }];
        for step in &self.steps {
            match step {
                Step::Gate(g) => {
                    for b in &mut live {
                        b.state = b.state.apply(g)?;
                    }
                }
                Step::Controlled { gate, condition } => {
                    for b in &mut live {
                        if condition.fires(&b.record) {
                            b.state = b.state.apply(gate)?;
                        }
                    }
                }
                Step::Measure { qubit, label } => {
                    let mut next = Vec::with_capacity(live.len() * 2);
                    for b in live {
                        let (p0, p1) = qubit_probabilities(&b.state, *qubit);
                        for (bit, p) in [(0u8, p0), (1u8, p1)] {
                            if p < 1e-15 {
                                continue;
                            }
                            let mut record = b.record.clone();
                            record[*label] = bit;
                            next.push(Branch {
                                probability: b.probability * p,
                                record,
                                state: collapse(&b.state, *qubit, bit)?,
                            });
                        }
                    }
                    live = next;
                }
            }
        }
        Ok(live)
    }

    /// Record-averaged output state via deferred measurement. Measured qubits
    /// are dephased in place and act as quantum controls for later
    /// conditioned gates, so they must not be touched by later gates.
    pub fn run_density(&self, init: &MixedState) -> Result<MixedState> {
        self.check_input(init.dims())?;
        let mut rho = init.clone();
        let mut frozen = vec![false; self.dims.len()];
        let z = ProjectiveMeasurement::computational(2);
        for step in &self.steps {
            match step {
                Step::Gate(g) => {
                    if let Some(q) = g.targets().iter().find(|&&q| frozen[q]) {
                        return Err(Error::Circuit(format!("qubit {q} reused after measurement")));
                    }
                    rho = rho.apply(g)?;
                }
                Step::Measure { qubit, .. } => {
                    if frozen[*qubit] {
                        return Err(Error::Circuit(format!("qubit {qubit} measured twice")));
                    }
                    rho = rho.dephase(&z, &[*qubit])?;
                    frozen[*qubit] = true;
                }
                Step::Controlled { gate, condition } => {
                    if let Some(q) = gate.targets().iter().find(|&&q| frozen[q]) {
                        return Err(Error::Circuit(format!("qubit {q} reused after measurement")));
                    }
                    let mut controls: Vec<usize> = condition.labels.iter().map(|&l| self.measured[l]).collect();
                    controls.sort_unstable();
                    controls.dedup();
                    let (targets, op) = deferred_operator(&controls, condition, gate, &self.measured);
                    rho = rho.conjugate(&targets, &op)?;
                }
            }
        }
        Ok(rho)
    }
}

/// Block-diagonal `Σ_m |m⟩⟨m| ⊗ G^{fires(m)}` over the control qubits.
fn deferred_operator(
    controls: &[usize],
    condition: &Condition,
    gate: &Gate,
    measured: &[usize],
) -> (Vec<usize>, Matrix) {
    let d = gate.matrix().nrows();
    let n = controls.len();
    let total = (1usize << n) * d;
    let mut op = Matrix::zeros(total, total);
    for m in 0..(1usize << n) {
        // bit of control qubit k within m (first control most significant)
        let bit_of = |q: usize| {
            let k = controls.iter().position(|&c| c == q).expect("control present");
            ((m >> (n - 1 - k)) & 1) as u8
        };
        let parity = condition.labels.iter().fold(0u8, |acc, &l| acc ^ bit_of(measured[l]));
        let fires = (parity ^ condition.invert as u8) == 1;
        let base = m * d;
        if fires {
            op.view_mut((base, base), (d, d)).copy_from(gate.matrix());
        } else {
            for k in 0..d {
                op[(base + k, base + k)] = ONE;
            }
        }
    }
    let mut targets = controls.to_vec();
    targets.extend_from_slice(gate.targets());
    (targets, op)
}

fn qubit_probabilities(state: &PureState, qubit: usize) -> (f64, f64) {
    let st = linalg::strides(state.dims())[qubit];
    let mut p1 = 0.0;
    let mut p0 = 0.0;
    for (idx, a) in state.amplitudes().iter().enumerate() {
        if (idx / st) % 2 == 1 {
            p1 += a.norm_sqr();
        } else {
            p0 += a.norm_sqr();
        }
    }
    (p0, p1)
}

fn collapse(state: &PureState, qubit: usize, bit: u8) -> Result<PureState> {
    let st = linalg::strides(state.dims())[qubit];
    let v = Vector::from_iterator(
        state.dim(),
        state
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(idx, a)| if ((idx / st) % 2) as u8 == bit { *a } else { linalg::ZERO }),
    );
    PureState::normalized(state.dims().to_vec(), v)
}
