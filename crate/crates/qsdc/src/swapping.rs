//! Entanglement-swapping direct-communication session.
//!
//! After the server helps the two users share singlet pairs (distribution
//! plus the same sample check as the bidirectional scheme, then an ideal
//! purification oracle), the pairs are grouped in twos. The sender encodes
//! two message bits on the first pair of each group, Bell-measures his two
//! photons and announces the outcome; the receiver Bell-measures her two
//! photons and decodes from the outcome pair. No encoded photon ever
//! returns to the server, at the cost of one bit per pair instead of two.

use crate::adversary::{
    apply_ancilla_attack, apply_intercept_resend, trojan_beam_splitter_check, AttackModel,
    AttackTarget,
};
use crate::bell::{decode_swap, BellIndex, PauliOp};
use crate::bidirectional::{sample_check, SampleCheckRecord};
use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::state::QuantumState;
use crate::transcript::{DocWriter, Message};

/// Sample fraction used while setting up the shared channel, matching the
/// bidirectional default.
const SETUP_SAMPLE_FRACTION: f64 = 0.2;

/// Knobs of one swapping session.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapSessionConfig {
    /// Number of two-pair groups before the purification cut (≥ 1).
    pub n_groups: usize,
    /// Fraction of groups surviving purification, in (0, 1].
    pub purification_yield: f64,
    /// Attack applied during channel setup only.
    pub attack: AttackModel,
    pub attack_target: AttackTarget,
    pub seed: u64,
}

impl SwapSessionConfig {
    pub fn new(n_groups: usize, seed: u64) -> Self {
        SwapSessionConfig {
            n_groups,
            purification_yield: 1.0,
            attack: AttackModel::None,
            attack_target: AttackTarget::default(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_groups < 1 {
            return Err(Error::ParamCount {
                name: "n_groups",
                value: self.n_groups as i64,
                requirement: "must be at least 1",
            });
        }
        if !(self.purification_yield > 0.0 && self.purification_yield <= 1.0) {
            return Err(Error::ParamRange {
                name: "purification_yield",
                value: self.purification_yield,
                lo: 0.0,
                hi: 1.0,
            });
        }
        self.attack.validate()?;
        if self.usable_groups() < 1 {
            return Err(Error::ParamCount {
                name: "n_groups",
                value: self.n_groups as i64,
                requirement: "yield cut must leave at least one group",
            });
        }
        Ok(())
    }

    /// Groups surviving the purification oracle: ⌊yield · n_groups⌋.
    pub fn usable_groups(&self) -> usize {
        (self.purification_yield * self.n_groups as f64).floor() as usize
    }

    /// Required message length: two bits per usable group.
    pub fn message_capacity_bits(&self) -> usize {
        2 * self.usable_groups()
    }
}

/// Result of the channel-setup phase.
#[derive(Debug, Clone)]
pub struct ChannelSetup {
    /// Pairs distributed before sampling.
    pub raw_pairs: usize,
    pub sampled: usize,
    pub splitter_signals: usize,
    pub trojan_both_click_rate: f64,
    pub sample_check: SampleCheckRecord,
    /// Ideal singlet pairs after the purification cut, two per usable
    /// group, each over labels (B, C).
    pub pairs: Vec<QuantumState>,
}

/// Distribute raw pairs under the configured attack, run the two-part
/// sample check, and pass the survivors through the purification oracle
/// (yield cut; surviving states reset to the ideal singlet).
pub fn setup_channel(config: &SwapSessionConfig) -> Result<ChannelSetup> {
    config.validate()?;
    let needed = 2 * config.n_groups;
    // smallest raw count whose sample cut still leaves `needed` pairs
    let mut raw = ((needed as f64) / (1.0 - SETUP_SAMPLE_FRACTION)).ceil() as usize;
    while raw - ((SETUP_SAMPLE_FRACTION * raw as f64).ceil() as usize) < needed {
        raw += 1;
    }

    let root = RandomStream::new(config.seed);
    let mut eve_rng = root.derive("setup-eve", 0);
    let mut sample_rng = root.derive("setup-sample-select", 0);
    let mut check_rng = root.derive("setup-sample-check", 0);
    let mut splitter_rng = root.derive("setup-beam-splitter", 0);

    let attack_label = match config.attack_target {
        AttackTarget::SeqB => "B",
        AttackTarget::SeqC => "C",
    };

    let mut states: Vec<QuantumState> = Vec::with_capacity(raw);
    let mut multiphoton = vec![0u32; raw];
    for i in 0..raw {
        let mut state = BellIndex::PsiMinus.to_state("B", "C");
        match config.attack {
            AttackModel::InterceptResend { basis_policy } => {
                let (next, _) =
                    apply_intercept_resend(&state, attack_label, basis_policy, &mut eve_rng)?;
                state = next;
            }
            AttackModel::AncillaEntangling { d } => {
                state = apply_ancilla_attack(&state, attack_label, d)?;
            }
            AttackModel::TrojanHorse { extra_photons } => {
                multiphoton[i] = extra_photons;
            }
            AttackModel::None | AttackModel::DishonestServer { .. } => {}
        }
        states.push(state);
    }

    let n_samples = (SETUP_SAMPLE_FRACTION * raw as f64).ceil() as usize;
    let picked = sample_rng.sample_indices(raw, n_samples);
    let split_at = picked.len() / 2;

    let mut both_clicks = 0usize;
    for &i in &picked[..split_at] {
        both_clicks += usize::from(trojan_beam_splitter_check(multiphoton[i], &mut splitter_rng).both());
        both_clicks += usize::from(trojan_beam_splitter_check(multiphoton[i], &mut splitter_rng).both());
    }
    let splitter_signals = 2 * split_at;
    let trojan_rate = if splitter_signals == 0 {
        0.0
    } else {
        both_clicks as f64 / splitter_signals as f64
    };
    if trojan_rate > 0.0 {
        return Err(Error::AbortAtTrojanCheck {
            checked: splitter_signals,
            both_clicks,
            rate: trojan_rate,
            threshold: 0.0,
        });
    }

    let basis_states: Vec<QuantumState> = picked[split_at..]
        .iter()
        .map(|&i| states[i].clone())
        .collect();
    let check = sample_check(&basis_states, &mut check_rng)?;
    if check.rate > 0.0 {
        return Err(Error::AbortAtSampleCheck {
            compared: check.compared,
            errors: check.errors,
            rate: check.rate,
            threshold: 0.0,
        });
    }

    // Purification oracle: the yield cut decides how many groups survive;
    // surviving pairs come out in the ideal singlet state.
    let usable = config.usable_groups();
    let pairs = (0..2 * usable)
        .map(|_| BellIndex::PsiMinus.to_state("B", "C"))
        .collect();

    Ok(ChannelSetup {
        raw_pairs: raw,
        sampled: n_samples,
        splitter_signals,
        trojan_both_click_rate: trojan_rate,
        sample_check: check,
        pairs,
    })
}

/// Outcome of one encoded group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwapGroupRecord {
    pub encoding: PauliOp,
    pub bob_outcome: BellIndex,
    pub carol_outcome: BellIndex,
    pub decoded: PauliOp,
}

/// Full auditable record of one swapping session.
#[derive(Debug, Clone)]
pub struct SwapTranscript {
    pub config: SwapSessionConfig,
    pub raw_pairs: usize,
    pub sampled: usize,
    pub trojan_both_click_rate: f64,
    pub setup_compared: usize,
    pub setup_errors: usize,
    pub usable_groups: usize,
    pub groups: Vec<SwapGroupRecord>,
    pub decoded: Message,
}

impl SwapTranscript {
    /// Message bits carried per consumed pair: two bits per group over two
    /// pairs per group, i.e. 1.0 — half the bidirectional source capacity.
    pub fn bits_per_pair(&self) -> f64 {
        if self.groups.is_empty() {
            0.0
        } else {
            self.decoded.len() as f64 / (2 * self.groups.len()) as f64
        }
    }

    /// Render the stable text document (same format family as the
    /// bidirectional transcript).
    pub fn render(&self) -> String {
        let mut w = DocWriter::new("qsdc-transcript v1");
        w.section("config");
        w.kv("protocol", "swapping");
        w.kv("n_groups", self.config.n_groups);
        w.kv_f64("purification_yield", self.config.purification_yield);
        w.kv("attack", self.config.attack.describe());
        w.kv("attack_target", self.config.attack_target.name());
        w.kv("seed", self.config.seed);

        w.section("channel_setup");
        w.kv("raw_pairs", self.raw_pairs);
        w.kv("sampled", self.sampled);
        w.kv_f64("trojan_both_click_rate", self.trojan_both_click_rate);
        w.kv("compared", self.setup_compared);
        w.kv("errors", self.setup_errors);
        w.kv("usable_groups", self.usable_groups);

        w.section("groups");
        w.list(
            "records",
            self.groups.iter().map(|g| {
                format!(
                    "{}>{}/{}>{}",
                    g.encoding,
                    g.bob_outcome.name(),
                    g.carol_outcome.name(),
                    g.decoded
                )
            }),
        );

        w.section("decoding");
        w.kv("decoded_bits", self.decoded.bit_string());
        w.kv(
            "decoded_hex",
            self.decoded.to_hex().unwrap_or_else(|| "-".to_owned()),
        );
        w.kv("delivered_bits", self.decoded.len());
        w.kv_f64("bits_per_pair", self.bits_per_pair());
        w.finish()
    }
}

/// Run one swapping session. The message must be exactly two bits per
/// usable group.
pub fn run_swap_session(config: &SwapSessionConfig, message: &Message) -> Result<SwapTranscript> {
    config.validate()?;
    let capacity = config.message_capacity_bits();
    if message.len() != capacity {
        return Err(Error::CapacityMismatch {
            capacity,
            got: message.len(),
        });
    }

    let setup = setup_channel(config)?;
    let usable = config.usable_groups();
    let root = RandomStream::new(config.seed);

    let mut groups = Vec::with_capacity(usable);
    let mut decoded_bits = Vec::with_capacity(2 * usable);
    for g in 0..usable {
        let mut group_rng = root.derive("swap-group", g as u64);
        let encoding =
            PauliOp::from_bit_pair(message.bits()[2 * g], message.bits()[2 * g + 1]);

        let first = setup.pairs[2 * g].relabel(&["B1", "C1"])?;
        let second = setup.pairs[2 * g + 1].relabel(&["B2", "C2"])?;
        let joint = QuantumState::tensor(&first, &second)?;
        let encoded = joint.apply_unitary(&encoding.matrix(), &["B1"])?;

        let bob = encoded.bell_measure("B1", "B2", &mut group_rng)?;
        let carol = bob.post_state.bell_measure("C1", "C2", &mut group_rng)?;
        let decoded = decode_swap(bob.value, carol.value);
        let (hi, lo) = decoded.bit_pair();
        decoded_bits.push(hi);
        decoded_bits.push(lo);
        groups.push(SwapGroupRecord {
            encoding,
            bob_outcome: bob.value,
            carol_outcome: carol.value,
            decoded,
        });
    }

    Ok(SwapTranscript {
        config: config.clone(),
        raw_pairs: setup.raw_pairs,
        sampled: setup.sampled,
        trojan_both_click_rate: setup.trojan_both_click_rate,
        setup_compared: setup.sample_check.compared,
        setup_errors: setup.sample_check.errors,
        usable_groups: usable,
        groups,
        decoded: Message::from_bits(decoded_bits),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::BasisPolicy;
    use crate::bell::{pauli_on_bell, swap_expand, PairSide};

    fn random_message(bits: usize, seed: u64) -> Message {
        let mut rng = RandomStream::new(seed);
        Message::from_bits((0..bits).map(|_| rng.bit()).collect())
    }

    #[test]
    fn noiseless_groups_decode_exactly() {
        let config = SwapSessionConfig::new(1000, 42);
        let message = random_message(2000, 7);
        let t = run_swap_session(&config, &message).unwrap();
        assert_eq!(t.decoded, message);
        assert_eq!(t.groups.len(), 1000);
        for g in &t.groups {
            assert_eq!(g.decoded, g.encoding);
        }
        assert!((t.bits_per_pair() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn outcome_distribution_follows_the_expansion_table() {
        let config = SwapSessionConfig::new(10_000, 3);
        let message = Message::from_bits(vec![false; 20_000]); // all U0
        let t = run_swap_session(&config, &message).unwrap();
        // encoding U0: outcomes (β, β) each with probability 1/4
        let mut counts = [0usize; 4];
        for g in &t.groups {
            assert_eq!(g.bob_outcome, g.carol_outcome);
            counts[BellIndex::ALL
                .iter()
                .position(|b| *b == g.bob_outcome)
                .unwrap()] += 1;
        }
        let n = t.groups.len() as f64;
        let sigma = (0.25 * 0.75 / n).sqrt();
        for c in counts {
            assert!((c as f64 / n - 0.25).abs() < 3.0 * sigma, "counts {counts:?}");
        }
    }

    #[test]
    fn branch_correlations_match_symbolic_expansion() {
        // encoding U3: first pair becomes φ⁺ (up to sign); every observed
        // (bob, carol) outcome must appear in swap_expand's table.
        let config = SwapSessionConfig::new(200, 11);
        let message = Message::from_bits([true, false].repeat(200)); // all U3
        let t = run_swap_session(&config, &message).unwrap();
        let first = pauli_on_bell(BellIndex::PsiMinus, PauliOp::U3, PairSide::B);
        let table = swap_expand(first, BellIndex::PsiMinus);
        for g in &t.groups {
            assert!(table
                .iter()
                .any(|o| o.bob_result == g.bob_outcome && o.carol_result == g.carol_outcome));
            assert_eq!(g.decoded, PauliOp::U3);
            // the published outcome alone pins nothing, but under utmost
            // branch correlation: bob φ⁺ ⇔ carol ψ⁻
            if g.bob_outcome == BellIndex::PhiPlus {
                assert_eq!(g.carol_outcome, BellIndex::PsiMinus);
            }
        }
    }

    #[test]
    fn wrong_message_length_is_rejected() {
        let config = SwapSessionConfig::new(10, 1);
        let message = Message::from_bits(vec![true; 19]);
        assert!(matches!(
            run_swap_session(&config, &message),
            Err(Error::CapacityMismatch { capacity: 20, got: 19 })
        ));
    }

    #[test]
    fn yield_cut_uses_floor() {
        let mut config = SwapSessionConfig::new(10, 1);
        config.purification_yield = 0.5;
        assert_eq!(config.usable_groups(), 5);
        let setup = setup_channel(&config).unwrap();
        assert_eq!(setup.pairs.len(), 10);

        config.purification_yield = 0.059;
        assert!(config.validate().is_err(), "yield cut below one group");
    }

    #[test]
    fn setup_yields_ideal_singlets() {
        let config = SwapSessionConfig::new(4, 9);
        let setup = setup_channel(&config).unwrap();
        let ideal = BellIndex::PsiMinus.to_state("B", "C");
        for pair in &setup.pairs {
            assert!(pair.same_up_to_phase(&ideal));
        }
    }

    #[test]
    fn intercept_resend_aborts_setup() {
        let mut config = SwapSessionConfig::new(200, 13);
        config.attack = AttackModel::InterceptResend {
            basis_policy: BasisPolicy::RandomZX,
        };
        let mut detections = 0;
        for seed in 0..10 {
            config.seed = seed;
            match setup_channel(&config) {
                Err(Error::AbortAtSampleCheck { .. }) => detections += 1,
                Err(e) => panic!("unexpected error {e}"),
                Ok(_) => {}
            }
        }
        assert!(detections >= 9, "{detections}/10 detected");
    }

    #[test]
    fn server_view_is_independent_of_the_message() {
        // The server sees the setup statistics and the sender's public
        // announcement. Estimated mutual information between announcement
        // and encoding over 10^4 groups stays below 0.01 bits.
        let config = SwapSessionConfig::new(10_000, 77);
        let message = random_message(20_000, 123);
        let t = run_swap_session(&config, &message).unwrap();

        let mut joint = [[0f64; 4]; 4];
        let n = t.groups.len() as f64;
        for g in &t.groups {
            let a = BellIndex::ALL.iter().position(|b| *b == g.bob_outcome).unwrap();
            let e = PauliOp::ALL.iter().position(|p| *p == g.encoding).unwrap();
            joint[a][e] += 1.0 / n;
        }
        let mut mi = 0.0;
        for a in 0..4 {
            for e in 0..4 {
                let p = joint[a][e];
                if p > 0.0 {
                    let pa: f64 = joint[a].iter().sum();
                    let pe: f64 = (0..4).map(|x| joint[x][e]).sum();
                    mi += p * (p / (pa * pe)).log2();
                }
            }
        }
        assert!(mi < 0.01, "estimated mutual information {mi}");
    }

    #[test]
    fn transcript_replay_is_byte_identical() {
        let config = SwapSessionConfig::new(50, 31);
        let message = random_message(100, 5);
        let a = run_swap_session(&config, &message).unwrap().render();
        let b = run_swap_session(&config, &message).unwrap().render();
        assert_eq!(a, b);
    }
}
