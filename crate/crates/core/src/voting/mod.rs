//! Traveling-ballot election on a pair of qudits, plus the photonic
//! encodings in [`photonics`].
//!
//! The authority holds subsystem 0, the traveling ballot is subsystem 1.
//! A YES vote applies the cyclic shift `|n⟩ → |n+1 mod d⟩` to the ballot.

pub mod photonics;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::linalg::{projector, r, Matrix, Vector};
use crate::qcore::{trace_distance, Gate, MixedState, ProjectiveMeasurement, PureState, State};

const AUTHORITY: usize = 0;
const BALLOT: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Vote {
    Yes,
    No,
}

impl Vote {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Vote::Yes
        } else {
            Vote::No
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ballot {
    d: usize,
    state: PureState,
}

impl Ballot {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn state(&self) -> &PureState {
        &self.state
    }

    /// Arbitrary operation on the ballot qudit. Used to model tampering.
    pub fn tamper(&self, op: &Matrix) -> Result<Ballot> {
        let gate = Gate::custom("tamper", op.clone(), vec![BALLOT])?;
        Ok(Ballot { d: self.d, state: self.state.apply(&gate)? })
    }
}

/// `(1/√d) Σ_n |n⟩_A |n⟩_B`.
pub fn init_ballot(d: usize) -> Result<Ballot> {
    if d < 2 {
        return Err(Error::Domain(format!("ballot needs d >= 2, got {d}")));
    }
    Ok(Ballot { d, state: PureState::new(vec![d, d], tally_ray(d, 0))? })
}

pub fn cast_vote(ballot: &Ballot, vote: Vote) -> Result<Ballot> {
    match vote {
        Vote::No => Ok(ballot.clone()),
        Vote::Yes => {
            let shift = Gate::qudit_shift(ballot.d, BALLOT)?;
            Ok(Ballot { d: ballot.d, state: ballot.state.apply(&shift)? })
        }
    }
}

pub fn cast_votes(ballot: &Ballot, votes: &[Vote]) -> Result<Ballot> {
    votes.iter().try_fold(ballot.clone(), |b, v| cast_vote(&b, *v))
}

/// A voter who applies the YES operation `times` times. The protocol cannot
/// tell this apart from `times` honest YES votes.
pub fn cast_repeated_yes(ballot: &Ballot, times: usize) -> Result<Ballot> {
    cast_votes(ballot, &vec![Vote::Yes; times])
}

/// Reduced state of the ballot qudit, which is all a voter can access.
pub fn voter_view(ballot: &Ballot) -> MixedState {
    ballot.state.partial_trace(&[BALLOT]).expect("ballot subsystem exists")
}

/// Two colluding voters compare what they saw around the voter at
/// position `index`; returns the trace distance between the views before
/// and after that voter acts.
pub fn colluding_view_distance(d: usize, votes: &[Vote], index: usize) -> Result<f64> {
    if index >= votes.len() {
        return Err(Error::Domain(format!("voter {index} out of {} voters", votes.len())));
    }
    let before = cast_votes(&init_ballot(d)?, &votes[..index])?;
    let after = cast_vote(&before, votes[index])?;
    trace_distance(&State::Mixed(voter_view(&before)), &State::Mixed(voter_view(&after)))
}

/// `(1/√d) Σ_n |n⟩_A |n+k mod d⟩_B`.
pub fn tally_ray(d: usize, k: usize) -> Vector {
    let mut v = Vector::zeros(d * d);
    let amp = r(1.0 / (d as f64).sqrt());
    for n in 0..d {
        v[n * d + (n + k) % d] = amp;
    }
    v
}

/// The d tally rays completed by their orthogonal complement, which is
/// outcome `d` ("invalid").
pub fn tally_measurement(d: usize) -> Result<ProjectiveMeasurement> {
    let mut projectors: Vec<Matrix> = (0..d).map(|k| projector(&tally_ray(d, k))).collect();
    let span = projectors.iter().fold(Matrix::zeros(d * d, d * d), |acc, p| acc + p);
    projectors.push(Matrix::identity(d * d, d * d) - span);
    ProjectiveMeasurement::from_projectors(projectors)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VoteTallyResult {
    /// YES count mod d. Meaningless when `valid` is false.
    pub k: usize,
    pub probability: f64,
    pub valid: bool,
}

/// Outcome probabilities; entry `d` is the invalid complement.
pub fn tally_distribution(ballot: &Ballot) -> Result<Vec<f64>> {
    ballot.state.distribution(&tally_measurement(ballot.d)?, &[AUTHORITY, BALLOT])
}

/// Most likely tally outcome. `valid` requires the complement to carry
/// probability below 1e-9.
pub fn tally_exact(ballot: &Ballot) -> Result<VoteTallyResult> {
    let dist = tally_distribution(ballot)?;
    let d = ballot.d;
    let (k, p) = dist[..d]
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::MIN), |best, (k, p)| if p > best.1 { (k, p) } else { best });
    Ok(VoteTallyResult { k, probability: p, valid: dist[d] < 1e-9 })
}

pub fn tally_sampled<R: Rng + ?Sized>(ballot: &Ballot, rng: &mut R) -> Result<VoteTallyResult> {
    let m = tally_measurement(ballot.d)?;
    let out = ballot.state.measure(&m, &[AUTHORITY, BALLOT], rng)?;
    let valid = out.outcome < ballot.d;
    Ok(VoteTallyResult { k: if valid { out.outcome } else { 0 }, probability: out.probability, valid })
}

/// Runs the whole protocol and returns the exact tally together with the
/// largest deviation of any intermediate voter view from `I/d`.
pub fn run_election(d: usize, votes: &[Vote]) -> Result<(VoteTallyResult, f64)> {
    let mixed = MixedState::maximally_mixed(vec![d])?;
    let mut ballot = init_ballot(d)?;
    let mut worst: f64 = 0.0;
    for step in 0..=votes.len() {
        let view = voter_view(&ballot);
        worst = worst.max(trace_distance(&State::Mixed(view), &State::Mixed(mixed.clone()))?);
        if let Some(v) = votes.get(step) {
            ballot = cast_vote(&ballot, *v)?;
        }
    }
    Ok((tally_exact(&ballot)?, worst))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::{cis, max_abs};
    use crate::rng;
    use proptest::prelude::*;
    use Vote::{No, Yes};

    fn votes_from_mask(d: usize, mask: u32) -> Vec<Vote> {
        (0..d).map(|i| Vote::from_bit(mask >> i & 1 == 1)).collect()
    }

    #[test]
    fn three_voters_two_yes() {
        let b = cast_votes(&init_ballot(3).unwrap(), &[Yes, No, Yes]).unwrap();
        let t = tally_exact(&b).unwrap();
        assert_eq!((t.k, t.valid), (2, true));
        assert!((t.probability - 1.0).abs() < 1e-9);
    }

    #[test]
    fn all_no_and_wrap_around() {
        let b = cast_votes(&init_ballot(3).unwrap(), &[No; 3]).unwrap();
        assert_eq!(tally_exact(&b).unwrap().k, 0);
        let b = cast_votes(&init_ballot(5).unwrap(), &[Yes; 5]).unwrap();
        assert_eq!(tally_exact(&b).unwrap().k, 0);
    }

    #[test]
    fn double_voting_is_indistinguishable() {
        let d = 4;
        let cheat = cast_repeated_yes(&init_ballot(d).unwrap(), 2).unwrap();
        let honest = cast_votes(&init_ballot(d).unwrap(), &[Yes, Yes]).unwrap();
        assert_eq!(cheat, honest);
        assert_eq!(tally_exact(&cheat).unwrap().k, 2);
    }

    #[test]
    fn exhaustive_honest_elections() {
        for d in 2..=5 {
            for mask in 0..(1u32 << d) {
                let votes = votes_from_mask(d, mask);
                let (t, worst) = run_election(d, &votes).unwrap();
                assert_eq!(t.k, mask.count_ones() as usize % d);
                assert!(t.valid && (t.probability - 1.0).abs() < 1e-9);
                assert!(worst < 1e-10);
            }
        }
    }

    #[test]
    fn views_are_maximally_mixed() {
        let id3 = Matrix::identity(3, 3) / r(3.0);
        assert!(max_abs(&(voter_view(&init_ballot(3).unwrap()).matrix() - id3)) < 1e-10);
        let b = cast_votes(&init_ballot(4).unwrap(), &[Yes, No]).unwrap();
        let id4 = Matrix::identity(4, 4) / r(4.0);
        assert!(max_abs(&(voter_view(&b).matrix() - id4)) < 1e-10);
        assert!(colluding_view_distance(4, &[No, Yes, No], 1).unwrap() < 1e-10);
    }

    #[test]
    fn phase_tampering_is_flagged() {
        let d = 3;
        let mut op = Matrix::zeros(d, d);
        for n in 0..d {
            op[(n, n)] = cis(2.0 * std::f64::consts::PI * n as f64 / d as f64);
        }
        let b = init_ballot(d).unwrap().tamper(&op).unwrap();
        assert!(!tally_exact(&b).unwrap().valid);
        let t = tally_sampled(&b, &mut rng::seeded(0)).unwrap();
        assert!(!t.valid);
    }

    #[test]
    fn small_ballot_rejected() {
        assert!(init_ballot(1).is_err());
    }

    proptest! {
        #[test]
        fn vote_order_does_not_matter(d in 2usize..7, mask in any::<u32>(), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            let mut votes = votes_from_mask(d, mask);
            let a = tally_distribution(&cast_votes(&init_ballot(d).unwrap(), &votes).unwrap()).unwrap();
            votes.shuffle(&mut rng::seeded(seed));
            let b = tally_distribution(&cast_votes(&init_ballot(d).unwrap(), &votes).unwrap()).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }

        #[test]
        fn sampled_tally_is_deterministic_when_honest(d in 2usize..7, mask in any::<u32>(), seed in any::<u64>()) {
            let votes = votes_from_mask(d, mask);
            let b = cast_votes(&init_ballot(d).unwrap(), &votes).unwrap();
            let t = tally_sampled(&b, &mut rng::seeded(seed)).unwrap();
            prop_assert!(t.valid);
            prop_assert_eq!(t.k, votes.iter().filter(|v| **v == Yes).count() % d);
        }
    }
}
