//! Secure direct communication over shared Bell, GHZ and W states.
//!
//! Senders encode two bits each by a Pauli operation on their own qubit and
//! return it to the receiver, who measures the joint state.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::infotheory::{holevo_quantity, Ensemble};
use crate::qcore::linalg::{self, r, Vector, ZERO};
use crate::qcore::measure::sample;
use crate::qcore::{bell_vectors, Gate, MixedState, ProjectiveMeasurement, PureState};

/// Two classical bits and their Pauli operator: 00→I, 01→Z, 10→X, 11→XZ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PauliCode(u8);

impl PauliCode {
    pub const ALL: [PauliCode; 4] = [PauliCode(0), PauliCode(1), PauliCode(2), PauliCode(3)];

    pub fn new(first: u8, second: u8) -> Result<Self> {
        if first > 1 || second > 1 {
            return Err(Error::Domain(format!("bits ({first}, {second})")));
        }
        Ok(Self((first << 1) | second))
    }

    pub fn from_index(k: u8) -> Result<Self> {
        if k >= 4 {
            return Err(Error::Domain(format!("code {k}")));
        }
        Ok(Self(k))
    }

    pub fn bits(self) -> [u8; 2] {
        [self.0 >> 1, self.0 & 1]
    }

    pub fn index(self) -> u8 {
        self.0
    }

    /// Gates on `qubit` in application order (`Z` before `X` for 11).
    pub fn gates(self, qubit: usize) -> Vec<Gate> {
        let [x, z] = [self.0 >> 1 == 1, self.0 & 1 == 1];
        let mut g = Vec::new();
        if z {
            g.push(Gate::z(qubit));
        }
        if x {
            g.push(Gate::x(qubit));
        }
        g
    }

    pub fn apply(self, state: &PureState, qubit: usize) -> Result<PureState> {
        self.gates(qubit).iter().try_fold(state.clone(), |s, g| s.apply(g))
    }
}

impl std::fmt::Display for PauliCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{}", self.0 >> 1, self.0 & 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TripartiteClass {
    Ghz,
    W,
}

/// Record of one protocol round.
#[derive(Debug, Clone, PartialEq)]
pub struct QsdcTranscript {
    pub sender_bits: Vec<u8>,
    pub encoded: PureState,
    pub outcome: usize,
    pub decoded: Vec<u8>,
    pub eavesdropper_view: MixedState,
}

pub fn phi_plus() -> PureState {
    PureState::new(vec![2, 2], bell_vectors()[0].clone()).expect("normalized")
}

fn bell_bits(outcome: usize) -> Vec<u8> {
    // Bell order Φ+, Φ-, Ψ+, Ψ- matches codes 00, 01, 10, 11
    vec![(outcome >> 1) as u8, (outcome & 1) as u8]
}

pub fn bipartite_encode(code: PauliCode) -> PureState {
    code.apply(&phi_plus(), 0).expect("qubit 0 exists")
}

/// Alice encodes on her half of Φ+ and sends it; Bob measures in the Bell
/// basis. The eavesdropper view is the traveling qubit alone.
pub fn bipartite_run<R: Rng + ?Sized>(code: PauliCode, rng: &mut R) -> Result<QsdcTranscript> {
    let encoded = bipartite_encode(code);
    let eavesdropper_view = encoded.partial_trace(&[0])?;
    let m = encoded.measure(&ProjectiveMeasurement::bell(), &[0, 1], rng)?;
    Ok(QsdcTranscript {
        sender_bits: code.bits().to_vec(),
        encoded,
        outcome: m.outcome,
        decoded: bell_bits(m.outcome),
        eavesdropper_view,
    })
}

/// Probability that Bob's Bell measurement returns the encoded message,
/// optionally after Eve measures and resends the traveling qubit in Z.
pub fn bipartite_correct_probability(code: PauliCode, attack: bool) -> Result<f64> {
    let encoded = bipartite_encode(code);
    let rho = if attack {
        encoded.to_density().dephase(&ProjectiveMeasurement::computational(2), &[0])?
    } else {
        encoded.to_density()
    };
    Ok(rho.distribution(&ProjectiveMeasurement::bell(), &[0, 1])?[code.index() as usize])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterceptStats {
    pub rounds: usize,
    pub error_rounds: usize,
    /// Exact per-round probability of a correct decode under attack,
    /// averaged over the four messages.
    pub correct_probability: f64,
    /// `1 - correct_probability^rounds`.
    pub detection_probability: f64,
    pub detected: bool,
}

/// `rounds` decoy rounds with random messages; Eve measure-resends each one.
pub fn bipartite_intercept_resend<R: Rng + ?Sized>(rounds: usize, rng: &mut R) -> Result<InterceptStats> {
    let z = ProjectiveMeasurement::computational(2);
    let bell = ProjectiveMeasurement::bell();
    let mut error_rounds = 0;
    for _ in 0..rounds {
        let code = PauliCode(rng.random_range(0..4));
        let intercepted = bipartite_encode(code).measure(&z, &[0], rng)?.post_state;
        if intercepted.measure(&bell, &[0, 1], rng)?.outcome != code.index() as usize {
            error_rounds += 1;
        }
    }
    let mut p = 0.0;
    for code in PauliCode::ALL {
        p += bipartite_correct_probability(code, true)? / 4.0;
    }
    Ok(InterceptStats {
        rounds,
        error_rounds,
        correct_probability: p,
        detection_probability: 1.0 - p.powi(rounds as i32),
        detected: error_rounds > 0,
    })
}

pub fn ghz_state() -> PureState {
    let h = r(0.5f64.sqrt());
    let mut v = Vector::from_element(8, ZERO);
    v[0] = h;
    v[7] = h;
    PureState::new(vec![2, 2, 2], v).expect("normalized")
}

pub fn w_state() -> PureState {
    let t = r(1.0 / 3f64.sqrt());
    let mut v = Vector::from_element(8, ZERO);
    v[1] = t;
    v[2] = t;
    v[4] = t;
    PureState::new(vec![2, 2, 2], v).expect("normalized")
}

fn tripartite_encode(base: &PureState, a: PauliCode, b: PauliCode) -> PureState {
    b.apply(&a.apply(base, 0).expect("qubit 0"), 1).expect("qubit 1")
}

pub fn ghz_encode(a: PauliCode, b: PauliCode) -> PureState {
    tripartite_encode(&ghz_state(), a, b)
}

pub fn w_encode(a: PauliCode, b: PauliCode) -> PureState {
    tripartite_encode(&w_state(), a, b)
}

/// `|Ψ_abc⟩ = (|a,b,0⟩ + (-1)^c |1-a,1-b,1⟩)/√2`, indexed by `4a + 2b + c`.
pub fn ghz_basis() -> Vec<Vector> {
    let h = 0.5f64.sqrt();
    (0..8usize)
        .map(|k| {
            let (a, b, c) = (k >> 2, (k >> 1) & 1, k & 1);
            let mut v = Vector::from_element(8, ZERO);
            v[(a << 2) | (b << 1)] = r(h);
            v[((1 - a) << 2) | ((1 - b) << 1) | 1] = r(if c == 1 { -h } else { h });
            v
        })
        .collect()
}

pub fn ghz_measurement() -> ProjectiveMeasurement {
    ProjectiveMeasurement::from_vectors(&ghz_basis()).expect("GHZ basis is orthonormal")
}

fn abc(k: usize) -> [u8; 3] {
    [(k >> 2) as u8, ((k >> 1) & 1) as u8, (k & 1) as u8]
}

/// Charlie's Ψ_abc measurement; returns `(a, b, c)` when the outcome is
/// certain and an error otherwise.
pub fn ghz_decode(state: &PureState) -> Result<[u8; 3]> {
    let d = state.distribution(&ghz_measurement(), &[0, 1, 2])?;
    let (k, p) = d.iter().copied().enumerate().max_by(|x, y| x.1.total_cmp(&y.1)).expect("8 outcomes");
    if p < 1.0 - 1e-9 {
        return Err(Error::Degenerate(format!("state is not a Ψ_abc basis state (max probability {p})")));
    }
    Ok(abc(k))
}

/// Expected decoding `(a_1, b_1, a_2 ⊕ b_2)`.
pub fn ghz_expected_bits(a: PauliCode, b: PauliCode) -> [u8; 3] {
    let ([a1, a2], [b1, b2]) = (a.bits(), b.bits());
    [a1, b1, a2 ^ b2]
}

fn all_pairs() -> impl Iterator<Item = (PauliCode, PauliCode)> {
    PauliCode::ALL.into_iter().flat_map(|a| PauliCode::ALL.into_iter().map(move |b| (a, b)))
}

fn encoded_ensemble(encode: fn(PauliCode, PauliCode) -> PureState) -> Result<Ensemble> {
    Ensemble::uniform(all_pairs().map(|(a, b)| encode(a, b).to_density()).collect())
}

/// Two traveling qubits after tracing out the receiver's.
fn eve_ensemble(encode: fn(PauliCode, PauliCode) -> PureState) -> Result<Ensemble> {
    Ensemble::uniform(all_pairs().map(|(a, b)| encode(a, b).partial_trace(&[0, 1])).collect::<Result<_>>()?)
}

pub fn ghz_eve_state(a: PauliCode, b: PauliCode) -> Result<MixedState> {
    ghz_encode(a, b).partial_trace(&[0, 1])
}

pub fn w_eve_state(a: PauliCode, b: PauliCode) -> Result<MixedState> {
    w_encode(a, b).partial_trace(&[0, 1])
}

pub fn ghz_holevo() -> Result<f64> {
    holevo_quantity(&encoded_ensemble(ghz_encode)?)
}

pub fn ghz_eve_holevo() -> Result<f64> {
    holevo_quantity(&eve_ensemble(ghz_encode)?)
}

pub fn w_holevo() -> Result<f64> {
    holevo_quantity(&encoded_ensemble(w_encode)?)
}

pub fn w_eve_holevo() -> Result<f64> {
    holevo_quantity(&eve_ensemble(w_encode)?)
}

/// Numerical rank of the Gram matrix of the 16 encoded states.
pub fn gram_rank(class: TripartiteClass) -> usize {
    let enc = match class {
        TripartiteClass::Ghz => ghz_encode,
        TripartiteClass::W => w_encode,
    };
    let states: Vec<PureState> = all_pairs().map(|(a, b)| enc(a, b)).collect();
    let g = crate::qcore::Matrix::from_fn(16, 16, |i, j| states[i].inner(&states[j]).expect("same dims"));
    linalg::hermitian_eigenvalues(&g).iter().filter(|v| **v > 1e-9).count()
}

/// One tripartite round: Alice and Bob encode on qubits 0 and 1 and return
/// them to Charlie, who holds qubit 2 and measures. For GHZ Charlie measures
/// in the Ψ_abc basis and recovers `(a_1, b_1, a_2 ⊕ b_2)`. For W he measures
/// in the computational basis and reports the maximum-likelihood message.
pub fn tripartite_run<R: Rng + ?Sized>(
    class: TripartiteClass,
    a: PauliCode,
    b: PauliCode,
    rng: &mut R,
) -> Result<QsdcTranscript> {
    let mut sender_bits = a.bits().to_vec();
    sender_bits.extend(b.bits());
    match class {
        TripartiteClass::Ghz => {
            let encoded = ghz_encode(a, b);
            let m = encoded.measure(&ghz_measurement(), &[0, 1, 2], rng)?;
            Ok(QsdcTranscript {
                sender_bits,
                eavesdropper_view: encoded.partial_trace(&[0, 1])?,
                encoded,
                outcome: m.outcome,
                decoded: abc(m.outcome).to_vec(),
            })
        }
        TripartiteClass::W => {
            let encoded = w_encode(a, b);
            let outcome = sample(&encoded.probabilities(), rng);
            let guess = all_pairs()
                .map(|(x, y)| (x, y, w_encode(x, y).probabilities()[outcome]))
                .fold(None::<(PauliCode, PauliCode, f64)>, |best, cand| match best {
                    Some(b) if b.2 >= cand.2 => Some(b),
                    _ => Some(cand),
                })
                .expect("16 candidates");
            let mut decoded = guess.0.bits().to_vec();
            decoded.extend(guess.1.bits());
            Ok(QsdcTranscript {
                sender_bits,
                eavesdropper_view: encoded.partial_trace(&[0, 1])?,
                encoded,
                outcome,
                decoded,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{equal_up_to_phase, trace_distance, State};
    use crate::rng;

    fn code(s: &str) -> PauliCode {
        let b: Vec<u8> = s.bytes().map(|c| c - b'0').collect();
        PauliCode::new(b[0], b[1]).unwrap()
    }

    fn psi(k: usize) -> PureState {
        PureState::new(vec![2, 2, 2], ghz_basis()[k].clone()).unwrap()
    }

    #[test]
    fn bipartite_decodes_every_message() {
        let mut g = rng::seeded(1);
        let half = MixedState::maximally_mixed(vec![2]).unwrap();
        for c in PauliCode::ALL {
            let t = bipartite_run(c, &mut g).unwrap();
            assert_eq!(t.decoded, c.bits().to_vec());
            let d = trace_distance(&State::Mixed(t.eavesdropper_view), &State::Mixed(half.clone())).unwrap();
            assert!(d < 1e-12);
        }
    }

    #[test]
    fn eleven_gives_psi_minus() {
        let s = bipartite_encode(code("11"));
        let psi_minus = PureState::new(vec![2, 2], bell_vectors()[3].clone()).unwrap();
        assert!(equal_up_to_phase(&s, &psi_minus, 1e-12));
    }

    #[test]
    fn intercept_resend_halves_success() {
        for c in PauliCode::ALL {
            assert!((bipartite_correct_probability(c, true).unwrap() - 0.5).abs() < 1e-12);
            assert!((bipartite_correct_probability(c, false).unwrap() - 1.0).abs() < 1e-12);
        }
        let s = bipartite_intercept_resend(10, &mut rng::seeded(2)).unwrap();
        assert!((s.detection_probability - (1.0 - 0.5f64.powi(10))).abs() < 1e-12);
        let many = bipartite_intercept_resend(4000, &mut rng::seeded(3)).unwrap();
        assert!((many.error_rounds as f64 / 4000.0 - 0.5).abs() < 0.03);
    }

    #[test]
    fn ghz_table_entries() {
        assert!(equal_up_to_phase(&ghz_encode(code("01"), code("00")), &psi(0b001), 1e-12));
        assert!(equal_up_to_phase(&ghz_encode(code("00"), code("00")), &ghz_state(), 1e-12));
        assert_eq!(ghz_decode(&psi(0b110)).unwrap(), [1, 1, 0]);
    }

    #[test]
    fn ghz_encodings_hit_eight_rays_twice_each() {
        let mut hits = [0usize; 8];
        for (a, b) in all_pairs() {
            let bits = ghz_decode(&ghz_encode(a, b)).unwrap();
            assert_eq!(bits, ghz_expected_bits(a, b));
            hits[(bits[0] as usize) << 2 | (bits[1] as usize) << 1 | bits[2] as usize] += 1;
        }
        assert_eq!(hits, [2; 8]);
        assert_eq!(gram_rank(TripartiteClass::Ghz), 8);
    }

    #[test]
    fn ghz_eve_states_depend_on_first_bit_parity() {
        let reference: Vec<MixedState> = [(code("00"), code("00")), (code("10"), code("00"))]
            .iter()
            .map(|(a, b)| ghz_eve_state(*a, *b).unwrap())
            .collect();
        let far = trace_distance(&State::Mixed(reference[0].clone()), &State::Mixed(reference[1].clone())).unwrap();
        assert!((far - 1.0).abs() < 1e-12);
        for (a, b) in all_pairs() {
            let e = ghz_eve_state(a, b).unwrap();
            let parity = (a.bits()[0] ^ b.bits()[0]) as usize;
            let d = trace_distance(&State::Mixed(e), &State::Mixed(reference[parity].clone())).unwrap();
            assert!(d < 1e-12);
        }
    }

    #[test]
    fn holevo_values() {
        assert!((ghz_holevo().unwrap() - 3.0).abs() < 1e-9);
        assert!((ghz_eve_holevo().unwrap() - 1.0).abs() < 1e-9);
        assert!((w_holevo().unwrap() - 2.91).abs() < 0.01);
        assert!((w_eve_holevo().unwrap() - 1.09).abs() < 0.01);
        assert!(gram_rank(TripartiteClass::W) <= 8);
    }

    #[test]
    fn w_cell_derived_by_operators() {
        // A=01, B=11: Z on qubit 0, then Z and X on qubit 1
        let t = r(1.0 / 3f64.sqrt());
        let mut v = Vector::from_element(8, ZERO);
        v[0b011] = t; // |001⟩ -> |011⟩
        v[0b000] = -t; // |010⟩ -> -|000⟩
        v[0b110] = -t; // |100⟩ -> -|110⟩
        let expect = PureState::new(vec![2, 2, 2], v).unwrap();
        assert!(equal_up_to_phase(&w_encode(code("01"), code("11")), &expect, 1e-12));
    }

    #[test]
    fn ghz_round_decodes_three_bits() {
        let mut g = rng::seeded(9);
        for (a, b) in all_pairs() {
            let t = tripartite_run(TripartiteClass::Ghz, a, b, &mut g).unwrap();
            assert_eq!(t.decoded, ghz_expected_bits(a, b).to_vec());
        }
        let w = tripartite_run(TripartiteClass::W, code("10"), code("01"), &mut g).unwrap();
        assert_eq!(w.decoded.len(), 4);
    }
}
