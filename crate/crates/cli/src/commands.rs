//! One handler per subcommand. Each returns the experiment name, its
//! parameters, its results and whether the protocol aborted.

use qnetlab_core::blindqc::{self, BlindGroverInstance};
use qnetlab_core::encodings::{self, AngleSpec, BitString};
use qnetlab_core::qkd::{self, Adversary, AuthOutcome, AuthStash, Bb84Config, Eavesdropper, TestSize};
use qnetlab_core::qsdc::{self, PauliCode, TripartiteClass};
use qnetlab_core::transfer::{self, Protocol};
use qnetlab_core::voting::{self, photonics, Vote};
use qnetlab_core::{dqc, infotheory, rng, trace_distance, Axis, MixedState, PureState, C64};
use serde_json::{json, Value};

use crate::args::*;
use crate::error::CliError;

pub struct Outcome {
    pub experiment: &'static str,
    pub params: Value,
    pub results: Value,
    pub aborted: bool,
}

fn done(experiment: &'static str, params: Value, results: Value) -> Outcome {
    Outcome { experiment, params, results, aborted: false }
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value, CliError> {
    Ok(serde_json::to_value(v)?)
}

pub fn dispatch(command: &Command, seed: u64) -> Result<Outcome, CliError> {
    match command {
        Command::Info(c) => info(c),
        Command::Encodings(c) => encodings_cmd(c),
        Command::Qsdc(c) => qsdc_cmd(c, seed),
        Command::Transfer(c) => transfer_cmd(c, seed),
        Command::Qkd(c) => qkd_cmd(c, seed),
        Command::Vote(c) => vote_cmd(c, seed),
        Command::Dqc(c) => dqc_cmd(c),
        Command::Blind(c) => blind_cmd(c, seed),
    }
}

fn info(c: &InfoCmd) -> Result<Outcome, CliError> {
    Ok(match c {
        InfoCmd::Entropy { probs } => {
            let d = infotheory::DiscreteDistribution::new(probs.clone())?;
            done("info.entropy", json!({ "probs": probs }), json!({ "entropy_bits": infotheory::shannon_entropy(&d) }))
        }
        InfoCmd::Nayak { p } => done("info.nayak", json!({ "p": p }), json!({ "ratio": infotheory::nayak_ratio(*p)? })),
        InfoCmd::Curve { points } => done(
            "info.curve",
            json!({ "points": points }),
            json!({ "curve": to_value(&infotheory::nayak_curve(*points)?)? }),
        ),
        InfoCmd::Multibit { p, k, n } => done(
            "info.multibit",
            json!({ "p": p, "k": k, "n": n }),
            json!({ "max_m": infotheory::multibit_bound_max_m(*p, *k, *n)? }),
        ),
    })
}

fn axis(a: AxisArg) -> Axis {
    match a {
        AxisArg::X => Axis::X,
        AxisArg::Y => Axis::Y,
        AxisArg::Z => Axis::Z,
    }
}

/// Nonzero amplitudes labelled by computational basis string.
fn amplitude_rows(state: &PureState) -> Result<Value, CliError> {
    let width = state.num_subsystems();
    let mut rows = Vec::new();
    for (i, a) in state.amplitudes().iter().enumerate() {
        if a.norm() > 1e-12 {
            let basis = BitString::from_index(i, width)?.to_string();
            rows.push(json!({ "basis": basis, "re": a.re, "im": a.im, "probability": a.norm_sqr() }));
        }
    }
    Ok(Value::Array(rows))
}

fn parse_bits(s: &str) -> Result<BitString, CliError> {
    s.parse::<BitString>().map_err(|e| CliError::Invalid(e.to_string()))
}

fn encodings_cmd(c: &EncodingsCmd) -> Result<Outcome, CliError> {
    let (name, params, state) = match c {
        EncodingsCmd::Basis { bits } => {
            ("encodings.basis", json!({ "bits": bits }), encodings::encode_basis(&parse_bits(bits)?))
        }
        EncodingsCmd::Superposition { strings } => {
            let parsed = strings.iter().map(|s| parse_bits(s)).collect::<Result<Vec<_>, _>>()?;
            ("encodings.superposition", json!({ "strings": strings }), encodings::encode_basis_superposition(&parsed)?)
        }
        EncodingsCmd::Amplitude { values } => {
            ("encodings.amplitude", json!({ "values": values }), encodings::encode_amplitude(values)?)
        }
        EncodingsCmd::Angle { axis: a, angles } => {
            let spec = AngleSpec::new(axis(*a), angles.clone())?;
            ("encodings.angle", json!({ "axis": format!("{a:?}"), "angles": angles }), encodings::encode_angle(&spec))
        }
    };
    Ok(done(name, params, json!({ "qubits": state.num_subsystems(), "amplitudes": amplitude_rows(&state)? })))
}

fn pauli_code(s: &str) -> Result<PauliCode, CliError> {
    let bits = parse_bits(s)?;
    match bits.bits() {
        [a, b] => Ok(PauliCode::new(*a, *b)?),
        _ => Err(CliError::Invalid(format!("message {s:?} must be two bits"))),
    }
}

fn bit_string(bits: &[u8]) -> String {
    bits.iter().map(|b| char::from(b'0' + b)).collect()
}

fn qsdc_cmd(c: &QsdcCmd, seed: u64) -> Result<Outcome, CliError> {
    let mut g = rng::seeded(seed);
    match c {
        QsdcCmd::Bipartite { message, attack, rounds } => {
            let code = pauli_code(message)?;
            let t = qsdc::bipartite_run(code, &mut g)?;
            let half = MixedState::maximally_mixed(vec![2])?;
            let mut results = json!({
                "sent": bit_string(&t.sender_bits),
                "decoded": bit_string(&t.decoded),
                "correct": t.decoded == t.sender_bits,
                "correct_probability": qsdc::bipartite_correct_probability(code, *attack)?,
                "traveling_qubit_distance_from_mixed": trace_distance(&t.eavesdropper_view.into(), &half.into())?,
            });
            let mut aborted = false;
            if *attack {
                let stats = qsdc::bipartite_intercept_resend(*rounds, &mut g)?;
                aborted = stats.detected;
                results["intercept"] = to_value(&stats)?;
            }
            results["aborted"] = json!(aborted);
            Ok(Outcome {
                experiment: "qsdc.bipartite",
                params: json!({ "message": message, "attack": attack, "rounds": rounds }),
                results,
                aborted,
            })
        }
        QsdcCmd::Tripartite { class, a, b } => {
            let (ca, cb) = (pauli_code(a)?, pauli_code(b)?);
            let cls = match class {
                ClassArg::Ghz => TripartiteClass::Ghz,
                ClassArg::W => TripartiteClass::W,
            };
            let (holevo, eve_holevo) = match cls {
                TripartiteClass::Ghz => (qsdc::ghz_holevo()?, qsdc::ghz_eve_holevo()?),
                TripartiteClass::W => (qsdc::w_holevo()?, qsdc::w_eve_holevo()?),
            };
            let t = qsdc::tripartite_run(cls, ca, cb, &mut g)?;
            Ok(done(
                "qsdc.tripartite",
                json!({ "class": format!("{cls:?}").to_lowercase(), "a": a, "b": b }),
                json!({
                    "holevo": holevo,
                    "eve_holevo": eve_holevo,
                    "gram_rank": qsdc::gram_rank(cls),
                    "sent": bit_string(&t.sender_bits),
                    "outcome": t.outcome,
                    "decoded": bit_string(&t.decoded),
                }),
            ))
        }
    }
}

fn transfer_cmd(c: &TransferCmd, seed: u64) -> Result<Outcome, CliError> {
    match c {
        TransferCmd::Compare { n, trials } => {
            let mut rows = Vec::new();
            for p in Protocol::ALL {
                let tc = transfer::build(p, *n)?;
                let r = transfer::resource_report(&tc)?;
                let mut min_fidelity = f64::INFINITY;
                for t in 0..*trials {
                    let input = qnetlab_core::haar_random_pure(&vec![2; *n], &mut rng::stream(seed, t as u64))?;
                    min_fidelity = min_fidelity.min(transfer::run_transfer(&tc, &input, None)?.fidelity);
                }
                let mut row = json!({
                    "protocol": p.name(),
                    "ancilla_qubits": r.measured.ancilla_qubits,
                    "local_gates": r.measured.local_gates,
                    "nonlocal_gates": r.measured.nonlocal_gates,
                    "reference_ancilla_qubits": r.reference.ancilla_qubits,
                    "reference_local_gates": r.reference.local_gates,
                    "reference_nonlocal_gates": r.reference.nonlocal_gates,
                    "classical_corrections": r.classical_corrections,
                    "local_matches": r.local_matches,
                });
                if *trials > 0 {
                    row["min_fidelity"] = json!(min_fidelity);
                }
                rows.push(row);
            }
            Ok(done("transfer.compare", json!({ "n": n, "trials": trials }), json!({ "protocols": rows })))
        }
        TransferCmd::Swap { hops, p_err, sampled } => {
            let mut g = rng::seeded(seed);
            let r = transfer::entanglement_swap_chain(*hops, *p_err, sampled.then_some(&mut g))?;
            let mut results = json!({ "fidelity": r.fidelity });
            if let (Some(o), Some((x, z))) = (&r.outcomes, r.correction) {
                results["outcomes"] =
                    json!(o.iter().map(|(a, b)| json!({ "control": a, "target": b })).collect::<Vec<_>>());
                results["correction"] = json!({ "x": x, "z": z });
            }
            Ok(done("transfer.swap", json!({ "hops": hops, "p_err": p_err, "sampled": sampled }), results))
        }
    }
}

fn auth_outcome(o: &AuthOutcome) -> Value {
    match o {
        AuthOutcome::Success { k } => json!({ "status": "success", "triple": k }),
        AuthOutcome::Aborted { by, step, k } => {
            json!({ "status": "aborted", "by": format!("{by:?}"), "step": step, "triple": k })
        }
    }
}

fn qkd_cmd(c: &QkdCmd, seed: u64) -> Result<Outcome, CliError> {
    match c {
        QkdCmd::Bb84 { n, eve, epsilon, test_size, sessions } => {
            let e = match eve {
                EveArg::None => Eavesdropper::None,
                EveArg::MeasureResend => Eavesdropper::MeasureResend,
            };
            let mut config = Bb84Config::new(*n, e, *epsilon);
            if let Some(t) = test_size {
                config = config.with_test_size(TestSize::Fixed(*t));
            }
            let params = json!({
                "n": n,
                "eve": format!("{e:?}"),
                "epsilon": epsilon,
                "test_size": test_size.map_or(json!("quarter"), |t| json!(t)),
                "sessions": sessions,
            });
            if *sessions == 0 {
                return Err(CliError::Invalid("sessions must be at least 1".into()));
            }
            if *sessions > 1 {
                let stats = qkd::bb84_statistics(&config, *sessions, seed)?;
                return Ok(done("qkd.bb84", params, to_value(&stats)?));
            }
            let s = qkd::bb84_run(&config, &mut rng::seeded(seed))?;
            let mut results = json!({
                "sifted": s.sifted.len(),
                "tested": s.test.len(),
                "errors": s.errors,
                "error_rate": s.error_rate(),
                "aborted": s.aborted(),
            });
            if let qkd::Bb84Outcome::Key { alice, bob } = &s.outcome {
                results["key_length"] = json!(alice.len());
                results["keys_match"] = json!(alice == bob);
                results["key"] = json!(bit_string(alice));
            }
            Ok(Outcome { experiment: "qkd.bb84", params, results, aborted: s.aborted() })
        }
        QkdCmd::Auth { adversary, bits, n } => {
            let params = json!({ "adversary": format!("{adversary:?}").to_lowercase(), "bits": bits, "n": n });
            let mut g = rng::seeded(seed);
            let session = qkd::bb84_run(&Bb84Config::new(*n, Eavesdropper::None, 0.1), &mut g)?;
            if session.aborted() {
                return Ok(Outcome {
                    experiment: "qkd.auth",
                    params,
                    results: json!({ "aborted": true, "stage": "key distribution" }),
                    aborted: true,
                });
            }
            let r = qkd::replenish_stash(&session, *bits)?;
            let triples = r.alice.len();
            let (mut alice, mut bob) = (AuthStash::new(r.alice), AuthStash::new(r.bob));
            let adv = match adversary {
                AdversaryArg::None => Adversary::None,
                AdversaryArg::Replay => Adversary::Replay,
            };
            let report = qkd::three_step_auth(&mut alice, &mut bob, adv, &mut g)?;
            let aborted = [report.alice, report.bob].iter().any(|o| matches!(o, AuthOutcome::Aborted { .. }));
            let transcript: Vec<Value> = report
                .transcript
                .iter()
                .map(|m| json!({ "from": format!("{:?}", m.from), "to": format!("{:?}", m.to), "content": m.content }))
                .collect();
            Ok(Outcome {
                experiment: "qkd.auth",
                params,
                results: json!({
                    "aborted": aborted,
                    "key_bits": session.key().map_or(0, <[u8]>::len),
                    "triples": triples,
                    "alice": auth_outcome(&report.alice),
                    "bob": auth_outcome(&report.bob),
                    "adversary_succeeded": report.adversary_succeeded,
                    "alice_available": alice.available(),
                    "bob_available": bob.available(),
                    "transcript": transcript,
                }),
                aborted,
            })
        }
    }
}

fn parse_votes(s: &str) -> Result<Vec<Vote>, CliError> {
    s.chars()
        .map(|c| match c.to_ascii_uppercase() {
            'Y' => Ok(Vote::Yes),
            'N' => Ok(Vote::No),
            other => Err(CliError::Invalid(format!("vote {other:?} is not Y or N"))),
        })
        .collect()
}

fn vote_cmd(c: &VoteCmd, seed: u64) -> Result<Outcome, CliError> {
    match c {
        VoteCmd::Run { d, votes, double_vote_by } => {
            let ballots = parse_votes(votes)?;
            let yes = ballots.iter().filter(|v| **v == Vote::Yes).count();
            let params = json!({ "d": d, "votes": votes, "double_vote_by": double_vote_by });
            let (tally, worst_view) = voting::run_election(*d, &ballots)?;
            let mut results = json!({
                "voters": ballots.len(),
                "yes_count": yes,
                "expected_tally": yes % d,
                "tally": tally.k,
                "probability": tally.probability,
                "valid": tally.valid,
                "max_view_distance": worst_view,
            });
            if let Some(cheat) = *double_vote_by {
                if cheat >= ballots.len() {
                    return Err(CliError::Invalid(format!("voter {cheat} does not exist")));
                }
                let mut b = voting::init_ballot(*d)?;
                for (i, v) in ballots.iter().enumerate() {
                    b = match (i == cheat, v) {
                        (true, _) => voting::cast_repeated_yes(&b, 2)?,
                        (false, v) => voting::cast_vote(&b, *v)?,
                    };
                }
                let effective = yes - usize::from(ballots[cheat] == Vote::Yes) + 2;
                let t = voting::tally_exact(&b)?;
                results["double_vote"] = json!({
                    "effective_yes": effective,
                    "tally": t.k,
                    "probability": t.probability,
                    "valid": t.valid,
                });
            }
            let sampled = voting::tally_sampled(
                &voting::cast_votes(&voting::init_ballot(*d)?, &ballots)?,
                &mut rng::seeded(seed),
            )?;
            results["sampled_tally"] = json!(sampled.k);
            Ok(done("vote.run", params, results))
        }
        VoteCmd::Photonics(a) => photonics_cmd(a),
    }
}

fn photonics_cmd(a: &PhotonicsArgs) -> Result<Outcome, CliError> {
    let PhotonicsArgs { alpha, legs, truncation, tau, lambda } = *a;
    let params = json!({ "alpha": alpha, "legs": legs, "truncation": truncation, "tau": tau, "lambda": lambda });
    let amp = C64::new(alpha, 0.0);
    let even = photonics::cat(amp, legs, 0, truncation)?;
    let next = photonics::cat(amp, legs, legs - 1, truncation)?;
    even.check_truncation()?;
    let ideal = photonics::photon_subtract(&even, photonics::Subtraction::Ideal)?;
    let split = photonics::photon_subtract(&even, photonics::Subtraction::BeamSplitter { tau })?;
    let tmsv = photonics::two_mode_squeezed_vacuum(lambda, truncation)?;
    let tmsv_error = (0..=10.min(truncation - 1))
        .map(|n| (tmsv.amplitude2(n, n).norm_sqr() - (1.0 - lambda * lambda) * lambda.powi(2 * n as i32)).abs())
        .fold(0.0, f64::max);
    Ok(done(
        "vote.photonics",
        params,
        json!({
            "cat_mean_photons": even.mean_photon_number(),
            "cat_edge_amplitude": even.edge_amplitude(),
            "ideal_subtraction_fidelity": ideal.state.fidelity(&next)?,
            "beam_splitter_fidelity": split.state.fidelity(&next)?,
            "beam_splitter_herald_probability": split.probability,
            "cat_ballot_fidelity": photonics::cat_ballot_fidelity(alpha, alpha, legs, truncation)?,
            "tmsv_max_deviation": tmsv_error,
            "tmsv_mean_photons_per_mode": (0..truncation).map(|n| n as f64 * tmsv.amplitude2(n, n).norm_sqr()).sum::<f64>(),
            "rail_shift_ok": photonics::multimode_shift_check(legs)?,
        }),
    ))
}

fn dqc_cmd(c: &DqcCmd) -> Result<Outcome, CliError> {
    match c {
        DqcCmd::Qpe { theta, n } => {
            if !theta.is_finite() {
                return Err(CliError::Invalid("theta must be finite".into()));
            }
            let (u, eig) = dqc::phase_oracle(*theta);
            let dist = dqc::run_qpe(&u, &eig, *n)?;
            let best = dqc::most_likely(&dist).ok_or_else(|| CliError::Internal("empty distribution".into()))?;
            let scale = (1u64 << n) as f64;
            let nearest = ((theta.rem_euclid(1.0) * scale).round() as u64) % (1u64 << n);
            Ok(done(
                "dqc.qpe",
                json!({ "theta": theta, "n": n }),
                json!({
                    "best_j": best.j,
                    "best_theta": best.theta_hat,
                    "best_probability": best.probability,
                    "nearest_j": nearest,
                    "nearest_probability": dist[nearest as usize].probability,
                    "distribution": dist.iter().map(|e| json!({ "j": e.j, "theta_hat": e.theta_hat, "probability": e.probability })).collect::<Vec<_>>(),
                }),
            ))
        }
        DqcCmd::QftCost { n, nodes } => {
            let rows = dqc::qft_nonlocal_table(*n, *nodes)?;
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "nodes": r.k,
                        "sizes": r.sizes.iter().map(usize::to_string).collect::<Vec<_>>().join("+"),
                        "two_qubit_gates": r.two_qubit_gates,
                        "nonlocal_gates": r.nonlocal_gates,
                    })
                })
                .collect();
            Ok(done(
                "dqc.qft_cost",
                json!({ "n": n, "nodes": nodes }),
                json!({ "one_per_node_formula": n * (n - 1) / 2, "rows": rows }),
            ))
        }
    }
}

fn blind_cmd(c: &BlindCmd, seed: u64) -> Result<Outcome, CliError> {
    let mut g = rng::seeded(seed);
    match c {
        BlindCmd::Grover { oracle, params, axis: ax } => {
            let inst = match params {
                Some(p) => {
                    let arr: [u8; 4] =
                        p.as_slice().try_into().map_err(|_| CliError::Invalid("params needs four values".into()))?;
                    BlindGroverInstance::new(*oracle, arr, ax.map_or(Axis::X, axis))?
                }
                None => {
                    let r = BlindGroverInstance::random(*oracle, &mut g)?;
                    match ax {
                        Some(a) => BlindGroverInstance::new(*oracle, [r.i, r.j, r.k, r.l], axis(*a))?,
                        None => r,
                    }
                }
            };
            let t = blindqc::blind_grover_run(&inst, &mut g)?;
            Ok(done(
                "blind.grover",
                json!({
                    "oracle": oracle,
                    "params": params,
                    "axis": ax.map(|a| format!("{a:?}")),
                }),
                json!({
                    "hidden": { "i": inst.i, "j": inst.j, "k": inst.k, "l": inst.l, "axis": format!("{:?}", inst.axis) },
                    "bob_ancillas": bit_string(&t.bob.ancillas),
                    "bob_oracle_flags": bit_string(&t.bob.oracle_flags),
                    "bob_output": bit_string(&t.bob.output),
                    "decoded": t.decoded,
                    "correct": t.decoded == *oracle,
                    "success_probability": blindqc::blind_grover_success(&inst)?,
                }),
            ))
        }
        BlindCmd::Twirl { samples } => {
            let half = MixedState::maximally_mixed(vec![2])?;
            let mut worst: f64 = 0.0;
            for s in 0..*samples {
                let psi = qnetlab_core::haar_random_pure(&[2], &mut rng::stream(seed, s as u64))?;
                let tw = blindqc::pauli_twirl(&psi.to_density())?;
                worst = worst.max(trace_distance(&tw.into(), &half.clone().into())?);
            }
            let mut identity = Vec::new();
            for i in 0..2 {
                for j in 0..2 {
                    identity.push(json!({ "i": i, "j": j, "holds": blindqc::hidden_gate_identity(i, j)? }));
                }
            }
            Ok(done(
                "blind.twirl",
                json!({ "samples": samples }),
                json!({ "max_twirl_distance": worst, "hidden_h_identity": identity }),
            ))
        }
    }
}
