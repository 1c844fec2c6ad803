//! Classical-to-quantum encodings and basis-measurement decoding.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::linalg::{r, Vector, ZERO};
use crate::qcore::measure::sample;
use crate::qcore::{Axis, Gate, PureState};

/// Non-empty bit sequence; bit 0 is the leftmost and becomes qubit 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BitString(Vec<u8>);

impl BitString {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::Domain("bit string is empty".into()));
        }
        if let Some(b) = bits.iter().find(|b| **b > 1) {
            return Err(Error::Domain(format!("bit value {b}")));
        }
        Ok(Self(bits))
    }

    /// `width` bits of `value`, most significant first.
    pub fn from_index(value: usize, width: usize) -> Result<Self> {
        Self::new((0..width).rev().map(|k| ((value >> k) & 1) as u8).collect())
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_index(&self) -> usize {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Domain(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(bits)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            other => Err(Error::Domain(format!("unknown rotation axis {other:?}"))),
        }
    }
}

/// One rotation axis and one finite angle per qubit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleSpec {
    axis: Axis,
    angles: Vec<f64>,
}

impl AngleSpec {
    pub fn new(axis: Axis, angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::Domain("no angles".into()));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::Domain("angles must be finite".into()));
        }
        Ok(Self { axis, angles })
    }

    /// `θ_k = π b_k`.
    pub fn from_bits(axis: Axis, bits: &BitString) -> Self {
        let angles = bits.bits().iter().map(|&b| std::f64::consts::PI * b as f64).collect();
        Self { axis, angles }
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }
}

/// `|b_1⟩ ⊗ … ⊗ |b_n⟩`.
pub fn encode_basis(bits: &BitString) -> PureState {
    PureState::qubits(bits.len(), bits.to_index()).expect("index fits its own width")
}

/// Equal-weight superposition of distinct, equal-length strings.
pub fn encode_basis_superposition(strings: &[BitString]) -> Result<PureState> {
    let first = strings.first().ok_or_else(|| Error::Domain("no strings".into()))?;
    let n = first.len();
    let mut v = Vector::from_element(1 << n, ZERO);
    for (k, s) in strings.iter().enumerate() {
        if s.len() != n {
            return Err(Error::Dimension(format!("string {s} has length {}, expected {n}", s.len())));
        }
        if strings[..k].contains(s) {
            return Err(Error::Domain(format!("duplicate string {s}")));
        }
        v[s.to_index()] = r(1.0);
    }
    PureState::normalized(vec![2; n], v)
}

/// Amplitudes `∝ √value`, zero-padded to the next power of two.
pub fn encode_amplitude(values: &[f64]) -> Result<PureState> {
    if values.is_empty() {
        return Err(Error::Domain("no feature values".into()));
    }
    if let Some(x) = values.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::Domain(format!("feature value {x} is not a non-negative real")));
    }
    if values.iter().all(|x| *x == 0.0) {
        return Err(Error::Degenerate("all feature values are zero".into()));
    }
    let d = values.len().next_power_of_two().max(2);
    let n = d.trailing_zeros() as usize;
    let v = Vector::from_iterator(d, (0..d).map(|k| r(values.get(k).map_or(0.0, |x| x.sqrt()))));
    PureState::normalized(vec![2; n], v)
}

/// Single-qubit rotation gate `exp(-iθσ_j/2)` on qubit 0.
pub fn rotation(axis: Axis, theta: f64) -> Gate {
    Gate::rotation(axis, 0, theta)
}

/// `⊗_k R^j(θ_k)|0⟩`.
pub fn encode_angle(spec: &AngleSpec) -> PureState {
    spec.angles
        .iter()
        .map(|&t| {
            let m = crate::qcore::rotation(spec.axis, t);
            PureState::new(vec![2], m.column(0).into_owned()).expect("rotation preserves norm")
        })
        .reduce(|a, b| a.tensor(&b))
        .expect("angles are non-empty")
}

/// Equal-weight superposition of angle encodings, renormalized.
pub fn encode_angle_superposition(specs: &[AngleSpec]) -> Result<PureState> {
    let first = specs.first().ok_or_else(|| Error::Domain("no angle specs".into()))?;
    let n = first.angles.len();
    let mut v = Vector::from_element(1 << n, ZERO);
    for s in specs {
        if s.angles.len() != n {
            return Err(Error::Dimension("angle specs differ in length".into()));
        }
        v += encode_angle(s).amplitudes();
    }
    PureState::normalized(vec![2; n], v)
}

/// Samples a computational-basis measurement of every qubit.
pub fn decode_basis<R: Rng + ?Sized>(state: &PureState, rng: &mut R) -> Result<BitString> {
    if state.dims().iter().any(|&d| d != 2) {
        return Err(Error::Dimension("basis decoding needs a qubit register".into()));
    }
    let k = sample(&state.probabilities(), rng);
    BitString::from_index(k, state.num_subsystems())
}

/// Outcome probabilities of [`decode_basis`], keyed by bit string.
pub fn decode_distribution(state: &PureState) -> Vec<(BitString, f64)> {
    let n = state.num_subsystems();
    state
        .probabilities()
        .into_iter()
        .enumerate()
        .filter(|(_, p)| *p > 1e-15)
        .map(|(k, p)| (BitString::from_index(k, n).expect("valid index"), p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::equal_up_to_phase;
    use crate::qcore::linalg::{c, ONE};
    use crate::rng;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn basis_encoding_places_single_amplitude() {
        assert_eq!(encode_basis(&bs("101")).amplitude(0b101), ONE);
        assert_eq!(encode_basis(&bs("110")).amplitude(0b110), ONE);
        assert_eq!(encode_basis(&bs("0")).amplitude(0), ONE);
    }

    #[test]
    fn basis_superposition_of_five_and_six() {
        let s = encode_basis_superposition(&[bs("101"), bs("110")]).unwrap();
        let h = 0.5f64.sqrt();
        assert!((s.amplitude(5).re - h).abs() < 1e-12 && (s.amplitude(6).re - h).abs() < 1e-12);
        let all = encode_basis_superposition(&[bs("00"), bs("01"), bs("10"), bs("11")]).unwrap();
        assert!(all.probabilities().iter().all(|p| (p - 0.25).abs() < 1e-12));
        assert!(encode_basis_superposition(&[bs("01"), bs("01")]).is_err());
        assert!(encode_basis_superposition(&[bs("01"), bs("011")]).is_err());
    }

    #[test]
    fn amplitude_encoding_takes_square_roots() {
        let s = encode_amplitude(&[5.0, 6.0]).unwrap();
        assert!((s.amplitude(0).re - (5.0f64 / 11.0).sqrt()).abs() < 1e-12);
        assert!((s.amplitude(1).re - (6.0f64 / 11.0).sqrt()).abs() < 1e-12);
        assert_eq!(encode_amplitude(&[1.0, 0.0]).unwrap().amplitude(0), ONE);
        assert_eq!(encode_amplitude(&[1.0, 1.0, 1.0]).unwrap().num_subsystems(), 2);
        assert!(matches!(encode_amplitude(&[0.0, 0.0]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn angle_encoding_of_pi_about_x() {
        let s = encode_angle(&AngleSpec::new(Axis::X, vec![PI]).unwrap());
        assert!((s.amplitude(1) - c(0.0, -1.0)).norm() < 1e-12);
        let z = encode_angle(&AngleSpec::new(Axis::Y, vec![0.0]).unwrap());
        assert_eq!(z.amplitude(0), ONE);
        assert!("w".parse::<Axis>().is_err());
    }

    #[test]
    fn four_qubit_angle_superposition() {
        let specs = [AngleSpec::from_bits(Axis::X, &bs("0101")), AngleSpec::from_bits(Axis::X, &bs("0110"))];
        let s = encode_angle_superposition(&specs).unwrap();
        let expect = encode_basis_superposition(&[bs("0101"), bs("0110")]).unwrap();
        assert!(equal_up_to_phase(&s, &expect, 1e-12));
    }

    #[test]
    fn decoding_follows_born_rule() {
        let s = encode_basis_superposition(&[bs("101"), bs("110")]).unwrap();
        let d = decode_distribution(&s);
        assert_eq!(d.len(), 2);
        assert!(d.iter().all(|(_, p)| (p - 0.5).abs() < 1e-12));
        let mut g = rng::seeded(3);
        let ones = (0..2000).filter(|_| decode_basis(&s, &mut g).unwrap() == bs("101")).count();
        assert!((ones as f64 / 2000.0 - 0.5).abs() < 0.05);
    }

    proptest! {
        #[test]
        fn basis_round_trip(bits in proptest::collection::vec(0u8..2, 1..8), seed in any::<u64>()) {
            let b = BitString::new(bits).unwrap();
            prop_assert_eq!(decode_basis(&encode_basis(&b), &mut rng::seeded(seed)).unwrap(), b);
        }

        #[test]
        fn amplitude_encoding_uses_ceil_log2_qubits(v in proptest::collection::vec(0.0f64..10.0, 2..20)) {
            prop_assume!(v.iter().any(|x| *x > 0.0));
            let s = encode_amplitude(&v).unwrap();
            prop_assert_eq!(1usize << s.num_subsystems(), v.len().next_power_of_two());
            prop_assert!((s.norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn angle_encodings_are_normalized(a in proptest::collection::vec(-6.0f64..6.0, 1..5), k in 0usize..3) {
            let axis = [Axis::X, Axis::Y, Axis::Z][k];
            prop_assert!((encode_angle(&AngleSpec::new(axis, a).unwrap()).norm() - 1.0).abs() < 1e-12);
        }
    }
}
