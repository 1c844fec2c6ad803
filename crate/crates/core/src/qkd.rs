//! BB84 key distribution and key-backed three-step authentication.

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::linalg::r;
use crate::qcore::{Gate, ProjectiveMeasurement, PureState, Vector};
use crate::rng::{self, SimRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Eavesdropper {
    None,
    /// Eve measures every qubit in a random basis and resends her result.
    MeasureResend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TestSize {
    /// `⌈|S|/4⌉` indices of the sifted set.
    QuarterOfSifted,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bb84Config {
    pub n: usize,
    pub eve: Eavesdropper,
    pub epsilon: f64,
    pub test_size: TestSize,
    /// Bob reuses Alice's bases; every index is kept.
    pub force_same_bases: bool,
}

impl Bb84Config {
    pub fn new(n: usize, eve: Eavesdropper, epsilon: f64) -> Self {
        Self { n, eve, epsilon, test_size: TestSize::QuarterOfSifted, force_same_bases: false }
    }

    pub fn with_test_size(mut self, t: TestSize) -> Self {
        self.test_size = t;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Bb84Outcome {
    Key { alice: Vec<u8>, bob: Vec<u8> },
    Abort { error_rate: f64 },
}

/// One session. `sifted = {j : θ_j = θ'_j}`, `test ⊆ sifted`, key indices
/// are `sifted \ test`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bb84Session {
    pub n: usize,
    pub x: Vec<u8>,
    pub theta: Vec<u8>,
    pub x_prime: Vec<u8>,
    pub theta_prime: Vec<u8>,
    pub sifted: Vec<usize>,
    pub test: Vec<usize>,
    pub epsilon: f64,
    pub errors: usize,
    pub outcome: Bb84Outcome,
}

impl Bb84Session {
    pub fn aborted(&self) -> bool {
        matches!(self.outcome, Bb84Outcome::Abort { .. })
    }

    pub fn error_rate(&self) -> f64 {
        self.errors as f64 / self.test.len() as f64
    }

    pub fn key(&self) -> Option<&[u8]> {
        match &self.outcome {
            Bb84Outcome::Key { alice, .. } => Some(alice),
            Bb84Outcome::Abort { .. } => None,
        }
    }
}

struct Bases {
    z: ProjectiveMeasurement,
    x: ProjectiveMeasurement,
}

impl Bases {
    fn new() -> Self {
        let h = r(0.5f64.sqrt());
        let plus = Vector::from_column_slice(&[h, h]);
        let minus = Vector::from_column_slice(&[h, -h]);
        Self {
            z: ProjectiveMeasurement::computational(2),
            x: ProjectiveMeasurement::from_vectors(&[plus, minus]).expect("X basis"),
        }
    }

    fn get(&self, theta: u8) -> &ProjectiveMeasurement {
        if theta == 0 {
            &self.z
        } else {
            &self.x
        }
    }
}

/// `H^θ |x⟩`.
pub fn prepare(x: u8, theta: u8) -> PureState {
    let s = PureState::qubits(1, x as usize).expect("bit");
    if theta == 1 {
        s.apply(&Gate::h(0)).expect("qubit 0")
    } else {
        s
    }
}

fn random_bits<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<u8> {
    (0..n).map(|_| rng.random_range(0..2u8)).collect()
}

pub fn bb84_run<R: Rng + ?Sized>(config: &Bb84Config, rng: &mut R) -> Result<Bb84Session> {
    let n = config.n;
    if n < 8 {
        return Err(Error::Domain(format!("n = {n} < 8")));
    }
    if !(0.0..1.0).contains(&config.epsilon) {
        return Err(Error::Domain(format!("threshold {} outside [0, 1)", config.epsilon)));
    }
    let bases = Bases::new();
    let x = random_bits(n, rng);
    let theta = random_bits(n, rng);
    let theta_prime = if config.force_same_bases { theta.clone() } else { random_bits(n, rng) };
    let mut x_prime = Vec::with_capacity(n);
    for j in 0..n {
        let mut qubit = prepare(x[j], theta[j]);
        if config.eve == Eavesdropper::MeasureResend {
            let basis = rng.random_range(0..2u8);
            let seen = qubit.measure(bases.get(basis), &[0], rng)?.outcome as u8;
            qubit = prepare(seen, basis);
        }
        x_prime.push(qubit.measure(bases.get(theta_prime[j]), &[0], rng)?.outcome as u8);
    }
    let sifted: Vec<usize> = (0..n).filter(|&j| theta[j] == theta_prime[j]).collect();
    let t = match config.test_size {
        TestSize::QuarterOfSifted => sifted.len().div_ceil(4),
        TestSize::Fixed(t) => t,
    };
    if t == 0 || t > sifted.len() {
        return Err(Error::EmptyTestSet);
    }
    let mut picks = index::sample(rng, sifted.len(), t).into_vec();
    picks.sort_unstable();
    let test: Vec<usize> = picks.iter().map(|&i| sifted[i]).collect();
    let errors = test.iter().filter(|&&j| x[j] != x_prime[j]).count();
    let rate = errors as f64 / t as f64;
    let outcome = if rate > config.epsilon {
        Bb84Outcome::Abort { error_rate: rate }
    } else {
        let keep = sifted.iter().filter(|j| test.binary_search(j).is_err());
        let (alice, bob) = keep.map(|&j| (x[j], x_prime[j])).unzip();
        Bb84Outcome::Key { alice, bob }
    };
    Ok(Bb84Session { n, x, theta, x_prime, theta_prime, sifted, test, epsilon: config.epsilon, errors, outcome })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bb84Stats {
    pub sessions: usize,
    pub resampled: usize,
    pub aborts: usize,
    pub abort_rate: f64,
    pub tested_bits: usize,
    pub test_errors: usize,
    pub error_rate: f64,
    pub sifted_fraction: f64,
    pub key_mismatches: usize,
}

/// Runs `sessions` independent sessions on per-session streams of `seed`.
/// Sessions whose test set cannot be drawn are counted in `resampled` and
/// excluded from the rates.
pub fn bb84_statistics(config: &Bb84Config, sessions: usize, seed: u64) -> Result<Bb84Stats> {
    let runs: Vec<Result<Bb84Session>> =
        (0..sessions as u64).into_par_iter().map(|i| bb84_run(config, &mut rng::stream(seed, i))).collect();
    let mut s = Bb84Stats {
        sessions,
        resampled: 0,
        aborts: 0,
        abort_rate: 0.0,
        tested_bits: 0,
        test_errors: 0,
        error_rate: 0.0,
        sifted_fraction: 0.0,
        key_mismatches: 0,
    };
    let mut sifted = 0usize;
    for run in runs {
        let run = match run {
            Err(Error::EmptyTestSet) => {
                s.resampled += 1;
                continue;
            }
            other => other?,
        };
        sifted += run.sifted.len();
        s.tested_bits += run.test.len();
        s.test_errors += run.errors;
        match &run.outcome {
            Bb84Outcome::Abort { .. } => s.aborts += 1,
            Bb84Outcome::Key { alice, bob } => s.key_mismatches += usize::from(alice != bob),
        }
    }
    let done = (sessions - s.resampled).max(1);
    s.abort_rate = s.aborts as f64 / done as f64;
    s.error_rate = s.test_errors as f64 / s.tested_bits.max(1) as f64;
    s.sifted_fraction = sifted as f64 / (done * config.n) as f64;
    Ok(s)
}

/// Identification strings `(s_1, s_2, s_3)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Triple(pub [Vec<u8>; 3]);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TripleStatus {
    Available,
    Used,
    Discarded,
}

/// One party's triples; an index leaves `Available` at most once.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuthStash {
    triples: Vec<Triple>,
    status: Vec<TripleStatus>,
}

impl AuthStash {
    pub fn new(triples: Vec<Triple>) -> Self {
        let status = vec![TripleStatus::Available; triples.len()];
        Self { triples, status }
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn available(&self) -> usize {
        self.status.iter().filter(|s| **s == TripleStatus::Available).count()
    }

    pub fn status(&self) -> &[TripleStatus] {
        &self.status
    }

    pub fn first_unused(&self) -> Option<usize> {
        self.status.iter().position(|s| *s == TripleStatus::Available)
    }

    pub fn extend(&mut self, triples: Vec<Triple>) {
        self.status.extend(std::iter::repeat_n(TripleStatus::Available, triples.len()));
        self.triples.extend(triples);
    }

    fn retire(&mut self, k: usize, status: TripleStatus) {
        debug_assert_eq!(self.status[k], TripleStatus::Available);
        self.status[k] = status;
    }

    fn string(&self, k: usize, i: usize) -> &[u8] {
        &self.triples[k].0[i]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Party {
    Alice,
    Bob,
    Eve,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Adversary {
    None,
    /// Eve poses as Bob to Alice, then replays what she learned to Bob.
    Replay,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChannelMessage {
    pub from: Party,
    pub to: Party,
    pub content: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AuthOutcome {
    Success { k: usize },
    Aborted { by: Party, step: u8, k: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuthReport {
    pub alice: AuthOutcome,
    pub bob: AuthOutcome,
    /// True if the adversary completed authentication with either party.
    pub adversary_succeeded: bool,
    pub transcript: Vec<ChannelMessage>,
}

fn bits_str(b: &[u8]) -> String {
    b.iter().map(|x| char::from(b'0' + x)).collect()
}

fn msg(log: &mut Vec<ChannelMessage>, from: Party, to: Party, content: String) {
    log.push(ChannelMessage { from, to, content });
}

/// Agrees on `k = max(k_A, k_B)`; a lagging party discards the triples it
/// skips.
fn agree_index(
    a: &mut AuthStash,
    b: &mut AuthStash,
    log: &mut Vec<ChannelMessage>,
    pa: Party,
    pb: Party,
) -> Result<usize> {
    let ka = a.first_unused().ok_or_else(|| Error::ReplenishRequired(format!("{pa:?}")))?;
    let kb = b.first_unused().ok_or_else(|| Error::ReplenishRequired(format!("{pb:?}")))?;
    msg(log, pa, pb, format!("index {ka}"));
    msg(log, pb, pa, format!("index {kb}"));
    let k = ka.max(kb);
    for (stash, who) in [(&mut *a, pa), (&mut *b, pb)] {
        if k >= stash.len() || stash.status[k] != TripleStatus::Available {
            return Err(Error::ReplenishRequired(format!("{who:?}")));
        }
        for j in 0..k {
            if stash.status[j] == TripleStatus::Available {
                stash.retire(j, TripleStatus::Discarded);
            }
        }
    }
    Ok(k)
}

fn honest(
    alice: &mut AuthStash,
    bob: &mut AuthStash,
    log: &mut Vec<ChannelMessage>,
) -> Result<(AuthOutcome, AuthOutcome)> {
    let k = agree_index(alice, bob, log, Party::Alice, Party::Bob)?;
    let s1 = alice.string(k, 0).to_vec();
    msg(log, Party::Alice, Party::Bob, format!("s1 {}", bits_str(&s1)));
    if s1 != bob.string(k, 0) {
        bob.retire(k, TripleStatus::Discarded);
        let o = AuthOutcome::Aborted { by: Party::Bob, step: 3, k };
        return Ok((o, o));
    }
    let s2 = bob.string(k, 1).to_vec();
    msg(log, Party::Bob, Party::Alice, format!("s2 {}", bits_str(&s2)));
    if s2 != alice.string(k, 1) {
        alice.retire(k, TripleStatus::Discarded);
        let o = AuthOutcome::Aborted { by: Party::Alice, step: 4, k };
        return Ok((o, o));
    }
    let s3 = alice.string(k, 2).to_vec();
    msg(log, Party::Alice, Party::Bob, format!("s3 {}", bits_str(&s3)));
    if s3 != bob.string(k, 2) {
        bob.retire(k, TripleStatus::Discarded);
        alice.retire(k, TripleStatus::Used);
        let o = AuthOutcome::Aborted { by: Party::Bob, step: 5, k };
        return Ok((AuthOutcome::Success { k }, o));
    }
    alice.retire(k, TripleStatus::Used);
    bob.retire(k, TripleStatus::Used);
    Ok((AuthOutcome::Success { k }, AuthOutcome::Success { k }))
}

/// Eve first plays Bob against Alice, guessing `s_2` at random, then plays
/// Alice against Bob using whatever she learned and guessing the rest.
fn replay<R: Rng + ?Sized>(
    alice: &mut AuthStash,
    bob: &mut AuthStash,
    log: &mut Vec<ChannelMessage>,
    rng: &mut R,
) -> Result<(AuthOutcome, AuthOutcome, bool)> {
    let k = alice.first_unused().ok_or_else(|| Error::ReplenishRequired("Alice".into()))?;
    let width = alice.string(k, 0).len();
    msg(log, Party::Alice, Party::Eve, format!("index {k}"));
    msg(log, Party::Eve, Party::Alice, format!("index {k}"));
    let s1 = alice.string(k, 0).to_vec();
    msg(log, Party::Alice, Party::Eve, format!("s1 {}", bits_str(&s1)));
    let guess2 = random_bits(width, rng);
    msg(log, Party::Eve, Party::Alice, format!("s2 {}", bits_str(&guess2)));
    let mut learned_s3 = None;
    let alice_out = if guess2 != alice.string(k, 1) {
        alice.retire(k, TripleStatus::Discarded);
        AuthOutcome::Aborted { by: Party::Alice, step: 4, k }
    } else {
        let s3 = alice.string(k, 2).to_vec();
        msg(log, Party::Alice, Party::Eve, format!("s3 {}", bits_str(&s3)));
        learned_s3 = Some(s3);
        alice.retire(k, TripleStatus::Used);
        AuthOutcome::Success { k }
    };

    let kb = bob.first_unused().ok_or_else(|| Error::ReplenishRequired("Bob".into()))?;
    msg(log, Party::Eve, Party::Bob, format!("index {kb}"));
    msg(log, Party::Bob, Party::Eve, format!("index {kb}"));
    let claim1 = if kb == k { s1 } else { random_bits(width, rng) };
    msg(log, Party::Eve, Party::Bob, format!("s1 {}", bits_str(&claim1)));
    if claim1 != bob.string(kb, 0) {
        bob.retire(kb, TripleStatus::Discarded);
        let eve_won = matches!(alice_out, AuthOutcome::Success { .. });
        return Ok((alice_out, AuthOutcome::Aborted { by: Party::Bob, step: 3, k: kb }, eve_won));
    }
    msg(log, Party::Bob, Party::Eve, format!("s2 {}", bits_str(bob.string(kb, 1))));
    let claim3 = match (kb == k, learned_s3) {
        (true, Some(s3)) => s3,
        _ => random_bits(width, rng),
    };
    msg(log, Party::Eve, Party::Bob, format!("s3 {}", bits_str(&claim3)));
    let bob_out = if claim3 != bob.string(kb, 2) {
        bob.retire(kb, TripleStatus::Discarded);
        AuthOutcome::Aborted { by: Party::Bob, step: 5, k: kb }
    } else {
        bob.retire(kb, TripleStatus::Used);
        AuthOutcome::Success { k: kb }
    };
    let eve_won = matches!(alice_out, AuthOutcome::Success { .. }) || matches!(bob_out, AuthOutcome::Success { .. });
    Ok((alice_out, bob_out, eve_won))
}

pub fn three_step_auth<R: Rng + ?Sized>(
    alice: &mut AuthStash,
    bob: &mut AuthStash,
    adversary: Adversary,
    rng: &mut R,
) -> Result<AuthReport> {
    let mut transcript = Vec::new();
    let (a, b, won) = match adversary {
        Adversary::None => {
            let (a, b) = honest(alice, bob, &mut transcript)?;
            (a, b, false)
        }
        Adversary::Replay => replay(alice, bob, &mut transcript, rng)?,
    };
    Ok(AuthReport { alice: a, bob: b, adversary_succeeded: won, transcript })
}

/// Splits `key` into consecutive triples of `n`-bit strings; leftover bits
/// are dropped.
pub fn triples_from_key(key: &[u8], n: usize) -> Result<Vec<Triple>> {
    if n == 0 {
        return Err(Error::Domain("identification strings need at least one bit".into()));
    }
    if key.len() < 3 * n {
        return Err(Error::InsufficientKey { needed: 3 * n, available: key.len() });
    }
    Ok(key.chunks_exact(3 * n).map(|c| Triple([c[..n].to_vec(), c[n..2 * n].to_vec(), c[2 * n..].to_vec()])).collect())
}

/// Triples derived independently from each party's copy of the key.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Replenishment {
    pub alice: Vec<Triple>,
    pub bob: Vec<Triple>,
}

pub fn replenish_stash(session: &Bb84Session, n: usize) -> Result<Replenishment> {
    match &session.outcome {
        Bb84Outcome::Key { alice, bob } => {
            Ok(Replenishment { alice: triples_from_key(alice, n)?, bob: triples_from_key(bob, n)? })
        }
        Bb84Outcome::Abort { .. } => Err(Error::InsufficientKey { needed: 3 * n, available: 0 }),
    }
}

/// Shared stash of `count` random triples of `n`-bit strings.
pub fn random_stash(count: usize, n: usize, rng: &mut SimRng) -> (AuthStash, AuthStash) {
    let triples: Vec<Triple> =
        (0..count).map(|_| Triple([random_bits(n, rng), random_bits(n, rng), random_bits(n, rng)])).collect();
    (AuthStash::new(triples.clone()), AuthStash::new(triples))
}
