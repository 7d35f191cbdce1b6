//! Bidirectional direct-communication session over a three-party cell.
//!
//! One session runs seven steps: the server prepares N singlet pairs and
//! distributes the two photon sequences (S_B to the sender, S_C to the
//! receiver); the users sacrifice a random sample for a two-part check
//! (beam-splitter click test against multi-photon probes, then a Z/X
//! correlation test); the receiver masks every remaining photon with a
//! uniformly random encoding operation and returns her sequence; the sender
//! writes random operations on k decoy pairs and message operations
//! elsewhere and returns his sequence; the server Bell-measures each pair
//! and announces the combined operation label; finally the decoys audit the
//! announcements and the receiver decodes.
//!
//! The masking step is a one-time pad: announced labels on message pairs
//! are uniform no matter what the message is.

use crate::adversary::{
    apply_ancilla_attack, apply_intercept_resend, trojan_beam_splitter_check, server_lie,
    AttackModel, AttackTarget, ClickRecord, EveRecord,
};
use crate::bell::{bell_to_pauli, decode_pauli, BellIndex, PauliOp};
use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::state::{MeasurementBasis, QuantumState};
use crate::transcript::{DocWriter, EfficiencyReport, Message};

/// All knobs of one bidirectional session.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionConfig {
    /// Number of prepared pairs (N ≥ 4).
    pub n_pairs: usize,
    /// Fraction of pairs sacrificed for the step-3 check, in (0, 1).
    pub sample_fraction: f64,
    /// Number of decoy pairs the sender audits the server with (≥ 1).
    pub k_decoys: usize,
    /// Abort threshold for every check rate (0 = ideal channel).
    pub error_threshold: f64,
    /// Per-photon, per-leg heralded erasure probability.
    pub loss_prob: f64,
    pub attack: AttackModel,
    /// Which photon of each pair an in-transit attack touches.
    pub attack_target: AttackTarget,
    pub seed: u64,
}

impl SessionConfig {
    /// Config with the documented defaults: sample fraction 0.2, zero
    /// thresholds, lossless channel, no attack.
    pub fn new(n_pairs: usize, k_decoys: usize, seed: u64) -> Self {
        SessionConfig {
            n_pairs,
            sample_fraction: 0.2,
            k_decoys,
            error_threshold: 0.0,
            loss_prob: 0.0,
            attack: AttackModel::None,
            attack_target: AttackTarget::default(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_pairs < 4 {
            return Err(Error::ParamCount {
                name: "n_pairs",
                value: self.n_pairs as i64,
                requirement: "must be at least 4",
            });
        }
        if !(self.sample_fraction > 0.0 && self.sample_fraction < 1.0) {
            return Err(Error::ParamRange {
                name: "sample_fraction",
                value: self.sample_fraction,
                lo: 0.0,
                hi: 1.0,
            });
        }
        if self.k_decoys < 1 {
            return Err(Error::ParamCount {
                name: "k_decoys",
                value: self.k_decoys as i64,
                requirement: "must be at least 1",
            });
        }
        if !(0.0..=1.0).contains(&self.error_threshold) {
            return Err(Error::ParamRange {
                name: "error_threshold",
                value: self.error_threshold,
                lo: 0.0,
                hi: 1.0,
            });
        }
        if !(0.0..=1.0).contains(&self.loss_prob) {
            return Err(Error::ParamRange {
                name: "loss_prob",
                value: self.loss_prob,
                lo: 0.0,
                hi: 1.0,
            });
        }
        self.attack.validate()?;
        if self.n_pairs < self.n_samples() + self.k_decoys + 1 {
            return Err(Error::NoMessageCapacity {
                n_pairs: self.n_pairs,
                n_samples: self.n_samples(),
                k_decoys: self.k_decoys,
            });
        }
        Ok(())
    }

    /// Sample count: ⌈sample_fraction · N⌉.
    pub fn n_samples(&self) -> usize {
        (self.sample_fraction * self.n_pairs as f64).ceil() as usize
    }

    /// Message capacity in bits on a lossless channel.
    pub fn message_capacity_bits(&self) -> usize {
        2 * (self.n_pairs - self.n_samples() - self.k_decoys)
    }
}

/// One basis-check sample: both parties' bases and outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleObservation {
    pub bob_basis: MeasurementBasis,
    pub bob_outcome: u8,
    pub carol_basis: MeasurementBasis,
    pub carol_outcome: u8,
}

impl SampleObservation {
    /// Same-basis observations are compared in public.
    pub fn compared(&self) -> bool {
        self.bob_basis == self.carol_basis
    }

    /// A correlation error: the singlet anticorrelates in both bases, so
    /// equal same-basis outcomes are an error.
    pub fn error(&self) -> bool {
        self.compared() && self.bob_outcome == self.carol_outcome
    }
}

/// Aggregate of the step-3 basis check.
#[derive(Debug, Clone)]
pub struct SampleCheckRecord {
    pub observations: Vec<SampleObservation>,
    pub compared: usize,
    pub errors: usize,
    pub rate: f64,
}

/// Measure both photons of each sampled pair in independently random Z/X
/// bases and compare same-basis outcomes against the singlet
/// anticorrelation. Errs with [`Error::InsufficientSamples`] when no pair
/// ended up in a comparable basis combination.
pub fn sample_check(pairs: &[QuantumState], rand: &mut RandomStream) -> Result<SampleCheckRecord> {
    let mut observations = Vec::with_capacity(pairs.len());
    let mut compared = 0usize;
    let mut errors = 0usize;
    for pair in pairs {
        let bob_basis = if rand.bit() {
            MeasurementBasis::X
        } else {
            MeasurementBasis::Z
        };
        let carol_basis = if rand.bit() {
            MeasurementBasis::X
        } else {
            MeasurementBasis::Z
        };
        let bob = pair.measure("B", bob_basis, rand)?;
        let carol = bob.post_state.measure("C", carol_basis, rand)?;
        let obs = SampleObservation {
            bob_basis,
            bob_outcome: bob.value,
            carol_basis,
            carol_outcome: carol.value,
        };
        if obs.compared() {
            compared += 1;
            if obs.error() {
                errors += 1;
            }
        }
        observations.push(obs);
    }
    if compared == 0 {
        return Err(Error::InsufficientSamples);
    }
    Ok(SampleCheckRecord {
        observations,
        compared,
        errors,
        rate: errors as f64 / compared as f64,
    })
}

/// Aggregate of the step-7 decoy audit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyRecord {
    pub checked: usize,
    pub mismatches: usize,
    pub rate: f64,
}

/// Check each published label against the decoy and mask operations:
/// a mismatch is `bits(published) ≠ bits(decoy) XOR bits(mask)`.
pub fn verify_decoys(
    published: &[PauliOp],
    decoy_ops: &[PauliOp],
    mask_ops: &[PauliOp],
) -> VerifyRecord {
    assert_eq!(published.len(), decoy_ops.len(), "decoy index sets must align");
    assert_eq!(published.len(), mask_ops.len(), "decoy index sets must align");
    let mismatches = published
        .iter()
        .zip(decoy_ops.iter().zip(mask_ops.iter()))
        .filter(|(p, (d, m))| p.bits() != d.bits() ^ m.bits())
        .count();
    let rate = if published.is_empty() {
        0.0
    } else {
        mismatches as f64 / published.len() as f64
    };
    VerifyRecord {
        checked: published.len(),
        mismatches,
        rate,
    }
}

/// Beam-splitter observation for one sampled pair (both parties split their
/// photon).
#[derive(Debug, Clone, Copy)]
pub struct TrojanObservation {
    pub pair: usize,
    pub bob: ClickRecord,
    pub carol: ClickRecord,
}

/// Full auditable record of one session.
#[derive(Debug, Clone)]
pub struct Transcript {
    pub config: SessionConfig,
    pub message_bits_in: usize,
    /// Pairs that never arrived in step 2.
    pub lost_at_distribution: Vec<usize>,
    /// Eve's private measurement log (intercept-resend only).
    pub eve_records: Vec<(usize, EveRecord)>,
    pub splitter_observations: Vec<TrojanObservation>,
    pub trojan_both_click_rate: f64,
    /// Pair index of each basis-check sample, aligned with
    /// `sample_check.observations`.
    pub basis_sample_pairs: Vec<usize>,
    pub sample_check: SampleCheckRecord,
    /// The receiver's masking operations per remaining pair (secret).
    pub carol_masks: Vec<(usize, PauliOp)>,
    /// The sender's decoy positions and operations, revealed in step 7.
    pub decoys: Vec<(usize, PauliOp)>,
    /// Pairs dropped by return-leg loss after masking.
    pub lost_on_return: Vec<usize>,
    /// Bit-carrying pairs in order.
    pub message_pairs: Vec<usize>,
    /// Capacity pairs left without message bits (identity-encoded).
    pub padding_pairs: Vec<usize>,
    /// Server announcements: pair, Bell outcome, published operation.
    pub announcements: Vec<(usize, BellIndex, PauliOp)>,
    pub verification: VerifyRecord,
    pub decoded: Message,
    /// Message bits that no longer fit after loss heralding.
    pub truncated_bits: usize,
    pub efficiency: EfficiencyReport,
}

impl Transcript {
    /// Render the stable text document. Byte-identical for identical
    /// `(config, seed)`.
    pub fn render(&self) -> String {
        let mut w = DocWriter::new("qsdc-transcript v1");
        w.section("config");
        w.kv("protocol", "bidirectional");
        w.kv("n_pairs", self.config.n_pairs);
        w.kv_f64("sample_fraction", self.config.sample_fraction);
        w.kv("k_decoys", self.config.k_decoys);
        w.kv_f64("error_threshold", self.config.error_threshold);
        w.kv_f64("loss_prob", self.config.loss_prob);
        w.kv("attack", self.config.attack.describe());
        w.kv("attack_target", self.config.attack_target.name());
        w.kv("seed", self.config.seed);
        w.kv("message_bits_in", self.message_bits_in);

        w.section("prepare");
        w.kv("pairs", self.config.n_pairs);
        w.kv("initial_state", BellIndex::PsiMinus.name());

        w.section("distribution");
        w.list("lost_pairs", self.lost_at_distribution.iter());
        w.kv(
            "arrived",
            self.config.n_pairs - self.lost_at_distribution.len(),
        );

        w.section("eve secret");
        w.list(
            "intercepted",
            self.eve_records
                .iter()
                .map(|(i, r)| format!("{i}:{}{}", r.basis, r.outcome)),
        );

        w.section("sample_check");
        w.list(
            "splitter_samples",
            self.splitter_observations.iter().map(|o| {
                format!(
                    "{}:{}{}{}{}",
                    o.pair,
                    u8::from(o.bob.detector_a),
                    u8::from(o.bob.detector_b),
                    u8::from(o.carol.detector_a),
                    u8::from(o.carol.detector_b)
                )
            }),
        );
        w.kv_f64("trojan_both_click_rate", self.trojan_both_click_rate);
        w.list(
            "basis_samples",
            self.basis_sample_pairs
                .iter()
                .zip(self.sample_check.observations.iter())
                .map(|(i, o)| {
                    format!(
                        "{i}:{}{}/{}{}",
                        o.bob_basis, o.bob_outcome, o.carol_basis, o.carol_outcome
                    )
                }),
        );
        w.kv("compared", self.sample_check.compared);
        w.kv("errors", self.sample_check.errors);
        w.kv_f64("error_rate", self.sample_check.rate);

        w.section("carol_masks secret");
        w.list(
            "ops",
            self.carol_masks.iter().map(|(i, op)| format!("{i}:{op}")),
        );

        w.section("bob_encoding");
        w.list(
            "decoys",
            self.decoys.iter().map(|(i, op)| format!("{i}:{op}")),
        );
        w.list("lost_on_return", self.lost_on_return.iter());
        w.list("message_pairs", self.message_pairs.iter());
        w.list("padding_pairs", self.padding_pairs.iter());

        w.section("announcements");
        w.list(
            "published",
            self.announcements
                .iter()
                .map(|(i, outcome, op)| format!("{i}:{}:{op}", outcome.name())),
        );

        w.section("verification");
        w.kv("checked", self.verification.checked);
        w.kv("mismatches", self.verification.mismatches);
        w.kv_f64("mismatch_rate", self.verification.rate);

        w.section("decoding");
        w.kv("decoded_bits", self.decoded.bit_string());
        w.kv(
            "decoded_hex",
            self.decoded.to_hex().unwrap_or_else(|| "-".to_owned()),
        );
        w.kv("delivered_bits", self.decoded.len());
        w.kv("truncated_bits", self.truncated_bits);

        w.section("efficiency");
        w.kv("q_u", self.efficiency.q_u);
        w.kv("q_t", self.efficiency.q_t);
        w.kv_f64("eta_q", self.efficiency.eta_q());
        w.finish()
    }
}

/// Uniformly random encoding operation.
fn random_pauli(rand: &mut RandomStream) -> PauliOp {
    PauliOp::ALL[rand.index(4)]
}

/// Run one full session. Aborts (detections) surface as `Err` with the
/// check statistics; an `Ok` transcript always carries a decoded message.
pub fn run_session(config: &SessionConfig, message: &Message) -> Result<Transcript> {
    config.validate()?;
    let capacity = config.message_capacity_bits();
    if message.len() > capacity {
        return Err(Error::CapacityMismatch {
            capacity,
            got: message.len(),
        });
    }

    let root = RandomStream::new(config.seed);
    let mut loss_rng = root.derive("loss", 0);
    let mut eve_rng = root.derive("eve", 0);
    let mut sample_rng = root.derive("sample-select", 0);
    let mut check_rng = root.derive("sample-check", 0);
    let mut splitter_rng = root.derive("beam-splitter", 0);
    let mut carol_rng = root.derive("carol-mask", 0);
    let mut bob_rng = root.derive("bob-encode", 0);
    let mut alice_rng = root.derive("alice-bell", 0);
    let mut lie_rng = root.derive("alice-lie", 0);

    let n = config.n_pairs;
    let attack_label = match config.attack_target {
        AttackTarget::SeqB => "B",
        AttackTarget::SeqC => "C",
    };

    // Steps 1-2: prepare singlets, distribute with per-photon heralded loss
    // and the in-transit attack on arriving target photons.
    let mut states: Vec<Option<QuantumState>> = Vec::with_capacity(n);
    let mut multiphoton = vec![0u32; n];
    let mut lost_at_distribution = Vec::new();
    let mut eve_records = Vec::new();
    for i in 0..n {
        let b_ok = !loss_rng.chance(config.loss_prob);
        let c_ok = !loss_rng.chance(config.loss_prob);
        if !(b_ok && c_ok) {
            lost_at_distribution.push(i);
            states.push(None);
            continue;
        }
        let mut state = BellIndex::PsiMinus.to_state("B", "C");
        match config.attack {
            AttackModel::InterceptResend { basis_policy } => {
                let (next, record) =
                    apply_intercept_resend(&state, attack_label, basis_policy, &mut eve_rng)?;
                state = next;
                eve_records.push((i, record));
            }
            AttackModel::AncillaEntangling { d } => {
                state = apply_ancilla_attack(&state, attack_label, d)?;
            }
            AttackModel::TrojanHorse { extra_photons } => {
                multiphoton[i] = extra_photons;
            }
            AttackModel::None | AttackModel::DishonestServer { .. } => {}
        }
        states.push(Some(state));
    }

    let arrived: Vec<usize> = (0..n).filter(|i| states[*i].is_some()).collect();
    let n_samples = config.n_samples();
    if arrived.len() < n_samples + config.k_decoys + 1 {
        return Err(Error::InsufficientSamples);
    }

    // Step 3: pick the samples (already in random order), send the first
    // half through the beam splitters and the second half into the basis
    // check.
    let picked = sample_rng.sample_indices(arrived.len(), n_samples);
    let sample_pairs: Vec<usize> = picked.iter().map(|&k| arrived[k]).collect();
    let split_at = sample_pairs.len() / 2;
    let mut splitter_pairs: Vec<usize> = sample_pairs[..split_at].to_vec();
    let mut basis_pairs: Vec<usize> = sample_pairs[split_at..].to_vec();
    splitter_pairs.sort_unstable();
    basis_pairs.sort_unstable();

    let mut splitter_observations = Vec::with_capacity(splitter_pairs.len());
    let mut both_clicks = 0usize;
    for &i in &splitter_pairs {
        let bob = trojan_beam_splitter_check(multiphoton[i], &mut splitter_rng);
        let carol = trojan_beam_splitter_check(multiphoton[i], &mut splitter_rng);
        both_clicks += usize::from(bob.both()) + usize::from(carol.both());
        splitter_observations.push(TrojanObservation { pair: i, bob, carol });
    }
    let splitter_signals = 2 * splitter_pairs.len();
    let trojan_rate = if splitter_signals == 0 {
        0.0
    } else {
        both_clicks as f64 / splitter_signals as f64
    };
    if trojan_rate > config.error_threshold {
        return Err(Error::AbortAtTrojanCheck {
            checked: splitter_signals,
            both_clicks,
            rate: trojan_rate,
            threshold: config.error_threshold,
        });
    }

    let basis_states: Vec<QuantumState> = basis_pairs
        .iter()
        .map(|&i| states[i].clone().expect("sampled pairs arrived"))
        .collect();
    let check = sample_check(&basis_states, &mut check_rng)?;
    if check.rate > config.error_threshold {
        return Err(Error::AbortAtSampleCheck {
            compared: check.compared,
            errors: check.errors,
            rate: check.rate,
            threshold: config.error_threshold,
        });
    }

    // Step 4: the receiver masks every remaining photon and returns S_C.
    let mut is_sample = vec![false; n];
    for &i in &sample_pairs {
        is_sample[i] = true;
    }
    let remaining: Vec<usize> = arrived.iter().copied().filter(|i| !is_sample[*i]).collect();
    let mut carol_masks = Vec::with_capacity(remaining.len());
    let mut mask_at: Vec<Option<PauliOp>> = vec![None; n];
    for &i in &remaining {
        let op = random_pauli(&mut carol_rng);
        let state = states[i].take().expect("remaining pairs arrived");
        states[i] = Some(state.apply_unitary(&op.matrix(), &["C"])?);
        mask_at[i] = Some(op);
        carol_masks.push((i, op));
    }

    // Step 5: the sender picks decoys, then encodes. All return-leg heralds
    // are resolved before bits are assigned, so lost positions never carry
    // message content.
    let decoy_selection = bob_rng.sample_indices(remaining.len(), config.k_decoys);
    let mut decoy_pairs: Vec<usize> = decoy_selection.iter().map(|&k| remaining[k]).collect();
    decoy_pairs.sort_unstable();
    let mut is_decoy = vec![false; n];
    for &i in &decoy_pairs {
        is_decoy[i] = true;
    }

    let mut lost_on_return = Vec::new();
    let mut returned = vec![false; n];
    for &i in &remaining {
        let c_ok = !loss_rng.chance(config.loss_prob);
        let b_ok = !loss_rng.chance(config.loss_prob);
        if c_ok && b_ok {
            returned[i] = true;
        } else {
            lost_on_return.push(i);
        }
    }

    let mut decoys = Vec::with_capacity(decoy_pairs.len());
    let mut encode_ops: Vec<Option<PauliOp>> = vec![None; n];
    for &i in &decoy_pairs {
        let op = random_pauli(&mut bob_rng);
        encode_ops[i] = Some(op);
        decoys.push((i, op));
    }

    let usable_message_pairs: Vec<usize> = remaining
        .iter()
        .copied()
        .filter(|i| returned[*i] && !is_decoy[*i])
        .collect();
    let deliverable = message.len().min(2 * usable_message_pairs.len());
    let truncated_bits = message.len() - deliverable;
    let carrying = deliverable.div_ceil(2);

    let mut message_pairs = Vec::with_capacity(carrying);
    let mut padding_pairs = Vec::new();
    for (slot, &i) in usable_message_pairs.iter().enumerate() {
        if slot < carrying {
            let hi = message.bits()[2 * slot];
            let lo = message.bits().get(2 * slot + 1).copied().unwrap_or(false);
            encode_ops[i] = Some(PauliOp::from_bit_pair(hi, lo));
            message_pairs.push(i);
        } else {
            encode_ops[i] = Some(PauliOp::U0);
            padding_pairs.push(i);
        }
    }
    for &i in &remaining {
        if returned[i] {
            if let Some(op) = encode_ops[i] {
                let state = states[i].take().expect("returned pairs arrived");
                states[i] = Some(state.apply_unitary(&op.matrix(), &["B"])?);
            }
        }
    }

    // Step 6: the server Bell-measures every completed pair and announces
    // the operation label of the outcome (or a lie).
    let lie_fraction = match config.attack {
        AttackModel::DishonestServer { lie_fraction } => lie_fraction,
        _ => 0.0,
    };
    let mut announcements = Vec::new();
    let mut published_at: Vec<Option<PauliOp>> = vec![None; n];
    for &i in &remaining {
        if !returned[i] {
            continue;
        }
        let state = states[i].take().expect("completed pairs present");
        let outcome = state.bell_measure("B", "C", &mut alice_rng)?;
        let truth = bell_to_pauli(outcome.value);
        let published = server_lie(truth, lie_fraction, &mut lie_rng)?;
        published_at[i] = Some(published);
        announcements.push((i, outcome.value, published));
    }

    // Step 7: audit the announcements on the revealed decoys, then decode.
    let audited: Vec<usize> = decoy_pairs
        .iter()
        .copied()
        .filter(|i| returned[*i])
        .collect();
    let published: Vec<PauliOp> = audited.iter().map(|&i| published_at[i].unwrap()).collect();
    let decoy_ops: Vec<PauliOp> = audited.iter().map(|&i| encode_ops[i].unwrap()).collect();
    let mask_of = |i: usize| -> PauliOp { mask_at[i].expect("every remaining pair was masked") };
    let masks: Vec<PauliOp> = audited.iter().map(|&i| mask_of(i)).collect();
    let verification = verify_decoys(&published, &decoy_ops, &masks);
    if verification.rate > config.error_threshold {
        return Err(Error::AbortAtVerification {
            checked: verification.checked,
            mismatches: verification.mismatches,
            rate: verification.rate,
            threshold: config.error_threshold,
        });
    }

    let mut decoded_bits = Vec::with_capacity(deliverable);
    for &i in &message_pairs {
        let u_b = decode_pauli(published_at[i].unwrap(), mask_of(i));
        let (hi, lo) = u_b.bit_pair();
        decoded_bits.push(hi);
        decoded_bits.push(lo);
    }
    decoded_bits.truncate(deliverable);

    Ok(Transcript {
        config: config.clone(),
        message_bits_in: message.len(),
        lost_at_distribution,
        eve_records,
        splitter_observations,
        trojan_both_click_rate: trojan_rate,
        basis_sample_pairs: basis_pairs,
        sample_check: check,
        carol_masks,
        decoys,
        lost_on_return,
        message_pairs,
        padding_pairs,
        announcements,
        verification,
        decoded: Message::from_bits(decoded_bits),
        truncated_bits,
        efficiency: EfficiencyReport {
            q_u: usable_message_pairs.len(),
            q_t: n,
        },
    })
}
