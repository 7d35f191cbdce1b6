//! Symbolic algebra of Bell states and the Pauli encoding group.
//!
//! The four Bell states over an ordered qubit pair (first, second):
//!
//! ```text
//!   ψ⁻ = (|01⟩ − |10⟩)/√2      φ⁻ = (|00⟩ − |11⟩)/√2
//!   ψ⁺ = (|01⟩ + |10⟩)/√2      φ⁺ = (|00⟩ + |11⟩)/√2
//! ```
//!
//! and the four encoding operations with their two-bit codes:
//!
//! ```text
//!   U₀ = I    → 00        U₂ = σ_x  → 01
//!   U₁ = σ_z  → 11        U₃ = iσ_y → 10
//! ```
//!
//! Composition of encodings modulo global phase is exactly XOR on the codes,
//! which is what makes the published combined operation decodable. The
//! signed single-sided action of each Pauli on each Bell state is tabulated
//! here and cross-checked against the state-vector engine in tests; the
//! entanglement-swapping expansion [`swap_expand`] is built from those signed
//! tables and agrees with brute-force 4-qubit expansion to 1e-12.

use std::fmt;

use num_complex::Complex64;

use crate::linalg::CMat;
use crate::state::{Label, QuantumState};

/// Labels of the four Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellIndex {
    PsiMinus,
    PsiPlus,
    PhiMinus,
    PhiPlus,
}

/// Letter of a Bell label: ψ (anticorrelated in Z) or φ (correlated in Z).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellFamily {
    Psi,
    Phi,
}

impl BellIndex {
    pub const ALL: [BellIndex; 4] = [
        BellIndex::PsiMinus,
        BellIndex::PsiPlus,
        BellIndex::PhiMinus,
        BellIndex::PhiPlus,
    ];

    /// Amplitudes over |00⟩,|01⟩,|10⟩,|11⟩ of the ordered pair.
    pub fn amplitudes(self) -> [Complex64; 4] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        let p = Complex64::new(h, 0.0);
        let m = Complex64::new(-h, 0.0);
        match self {
            BellIndex::PsiMinus => [z, p, m, z],
            BellIndex::PsiPlus => [z, p, p, z],
            BellIndex::PhiMinus => [p, z, z, m],
            BellIndex::PhiPlus => [p, z, z, p],
        }
    }

    /// The Bell state as a two-qubit pure state over `(first, second)`.
    pub fn to_state(self, first: &str, second: &str) -> QuantumState {
        QuantumState::pure(
            vec![Label::from(first), Label::from(second)],
            self.amplitudes().to_vec(),
        )
        .expect("Bell amplitudes are unit norm")
    }

    pub fn family(self) -> BellFamily {
        match self {
            BellIndex::PsiMinus | BellIndex::PsiPlus => BellFamily::Psi,
            BellIndex::PhiMinus | BellIndex::PhiPlus => BellFamily::Phi,
        }
    }

    /// True for the `+` superscript.
    pub fn is_plus(self) -> bool {
        matches!(self, BellIndex::PsiPlus | BellIndex::PhiPlus)
    }

    fn code(self) -> u8 {
        bell_to_pauli(self).bits()
    }

    fn from_code(code: u8) -> Self {
        PauliOp::from_bits(code).to_bell()
    }

    /// Stable lowercase name used in transcripts.
    pub fn name(self) -> &'static str {
        match self {
            BellIndex::PsiMinus => "psi_minus",
            BellIndex::PsiPlus => "psi_plus",
            BellIndex::PhiMinus => "phi_minus",
            BellIndex::PhiPlus => "phi_plus",
        }
    }
}

impl fmt::Display for BellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The four local encoding operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliOp {
    /// Identity, code 00.
    U0,
    /// σ_z, code 11.
    U1,
    /// σ_x, code 01.
    U2,
    /// iσ_y, code 10.
    U3,
}

impl PauliOp {
    pub const ALL: [PauliOp; 4] = [PauliOp::U0, PauliOp::U1, PauliOp::U2, PauliOp::U3];

    /// Two-bit information code carried by this operation.
    pub fn bits(self) -> u8 {
        match self {
            PauliOp::U0 => 0b00,
            PauliOp::U1 => 0b11,
            PauliOp::U2 => 0b01,
            PauliOp::U3 => 0b10,
        }
    }

    pub fn from_bits(bits: u8) -> Self {
        match bits & 0b11 {
            0b00 => PauliOp::U0,
            0b11 => PauliOp::U1,
            0b01 => PauliOp::U2,
            _ => PauliOp::U3,
        }
    }

    /// Bit pair `(high, low)` of the code.
    pub fn bit_pair(self) -> (bool, bool) {
        let b = self.bits();
        (b & 0b10 != 0, b & 0b01 != 0)
    }

    pub fn from_bit_pair(high: bool, low: bool) -> Self {
        Self::from_bits((u8::from(high) << 1) | u8::from(low))
    }

    /// 2×2 matrix of the operation.
    pub fn matrix(self) -> CMat {
        let o = Complex64::new(1.0, 0.0);
        let z = Complex64::new(0.0, 0.0);
        match self {
            PauliOp::U0 => CMat::from_rows(&[&[o, z], &[z, o]]),
            PauliOp::U1 => CMat::from_rows(&[&[o, z], &[z, -o]]),
            PauliOp::U2 => CMat::from_rows(&[&[z, o], &[o, z]]),
            PauliOp::U3 => CMat::from_rows(&[&[z, o], &[-o, z]]),
        }
    }

    /// The Bell state this operation maps the singlet to (second-qubit side).
    fn to_bell(self) -> BellIndex {
        match self {
            PauliOp::U0 => BellIndex::PsiMinus,
            PauliOp::U1 => BellIndex::PsiPlus,
            PauliOp::U2 => BellIndex::PhiMinus,
            PauliOp::U3 => BellIndex::PhiPlus,
        }
    }

    /// Stable name used in transcripts (`U0`..`U3`).
    pub fn name(self) -> &'static str {
        match self {
            PauliOp::U0 => "U0",
            PauliOp::U1 => "U1",
            PauliOp::U2 => "U2",
            PauliOp::U3 => "U3",
        }
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which photon of an ordered pair an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSide {
    /// First tensor factor.
    B,
    /// Second tensor factor.
    C,
}

/// Basis-change matrix between Z and X eigenvectors.
pub fn hadamard() -> CMat {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    CMat::from_rows(&[&[h, h], &[h, -h]])
}

/// Signed one-sided Pauli action: `op` on the chosen qubit of Bell state `b`
/// yields `sign · |result⟩` exactly (the vectors are real, so the phase is
/// ±1). The label part is `code(b) XOR bits(op)` on either side; only the
/// sign depends on the side.
fn pauli_on_bell_signed(b: BellIndex, op: PauliOp, side: PairSide) -> (BellIndex, i8) {
    let result = BellIndex::from_code(b.code() ^ op.bits());
    let sign: i8 = match (side, b, op) {
        (_, _, PauliOp::U0) => 1,
        // σ_z on the second qubit: ψ↔ψ swaps pick up −1
        (PairSide::C, BellIndex::PsiMinus, PauliOp::U1) => -1,
        (PairSide::C, BellIndex::PsiPlus, PauliOp::U1) => -1,
        (PairSide::C, _, PauliOp::U1) => 1,
        // σ_x on the second qubit: all signs +
        (PairSide::C, _, PauliOp::U2) => 1,
        // iσ_y on the second qubit: φ→ψ transitions pick up −1
        (PairSide::C, BellIndex::PhiMinus, PauliOp::U3) => -1,
        (PairSide::C, BellIndex::PhiPlus, PauliOp::U3) => -1,
        (PairSide::C, _, PauliOp::U3) => 1,
        // σ_z on the first qubit: all signs +
        (PairSide::B, _, PauliOp::U1) => 1,
        // σ_x on the first qubit: minus-superscript states pick up −1
        (PairSide::B, BellIndex::PsiMinus, PauliOp::U2) => -1,
        (PairSide::B, BellIndex::PhiMinus, PauliOp::U2) => -1,
        (PairSide::B, _, PauliOp::U2) => 1,
        // iσ_y on the first qubit: ψ⁻→φ⁺, φ⁻→ψ⁺, φ⁺... see tests
        (PairSide::B, BellIndex::PsiMinus, PauliOp::U3) => -1,
        (PairSide::B, BellIndex::PhiMinus, PauliOp::U3) => -1,
        (PairSide::B, BellIndex::PsiPlus, PauliOp::U3) => 1,
        (PairSide::B, BellIndex::PhiPlus, PauliOp::U3) => 1,
    };
    (result, sign)
}

/// Bell label reached by applying `op` to one side of Bell state `b`,
/// ignoring global phase.
pub fn pauli_on_bell(b: BellIndex, op: PauliOp, side: PairSide) -> BellIndex {
    pauli_on_bell_signed(b, op, side).0
}

/// Composition of two encodings modulo global phase:
/// `bits(result) = bits(a) XOR bits(b)`.
pub fn pauli_compose(a: PauliOp, b: PauliOp) -> PauliOp {
    PauliOp::from_bits(a.bits() ^ b.bits())
}

/// Recover one factor of a published composition from the other:
/// `decode_pauli(pauli_compose(b, c), c) = b`.
pub fn decode_pauli(published: PauliOp, own: PauliOp) -> PauliOp {
    pauli_compose(published, own)
}

/// The unique operation `U` with `(I ⊗ U)|ψ⁻⟩ = ±|outcome⟩`. This is how the
/// server's Bell measurement outcome is published as an operation label.
pub fn bell_to_pauli(outcome: BellIndex) -> PauliOp {
    match outcome {
        BellIndex::PsiMinus => PauliOp::U0,
        BellIndex::PsiPlus => PauliOp::U1,
        BellIndex::PhiMinus => PauliOp::U2,
        BellIndex::PhiPlus => PauliOp::U3,
    }
}

/// One branch of an entanglement-swapping expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapOutcome {
    /// Bell label on the (first₁, first₂) qubits.
    pub bob_result: BellIndex,
    /// Bell label on the (second₁, second₂) qubits.
    pub carol_result: BellIndex,
    pub probability: f64,
    /// Sign of the ±1/2 coefficient in the exact expansion.
    pub sign: i8,
}

/// Expansion of the singlet pair: ψ⁻⊗ψ⁻ = ½ Σ s_k · β_k ⊗ β_k with
/// s = (+, −, −, +) over (ψ⁻, ψ⁺, φ⁻, φ⁺).
const SINGLET_BASE: [(BellIndex, i8); 4] = [
    (BellIndex::PsiMinus, 1),
    (BellIndex::PsiPlus, -1),
    (BellIndex::PhiMinus, -1),
    (BellIndex::PhiPlus, 1),
];

/// Sign σ in the decomposition |β⟩ = σ · (I ⊗ P)|ψ⁻⟩ with P the canonical
/// operation for β: σ is −1 only for ψ⁺ (σ_z on the second qubit flips it).
fn singlet_decomposition_sign(b: BellIndex) -> i8 {
    match b {
        BellIndex::PsiPlus => -1,
        _ => 1,
    }
}

/// Exact Bell-basis expansion of `first_pair ⊗ second_pair` after swapping
/// qubit grouping from (1st₁ 2nd₁)(1st₂ 2nd₂) to (1st₁ 1st₂)(2nd₁ 2nd₂).
///
/// Each of the four branches has probability exactly 1/4 and a coefficient
/// `sign/2` in the expansion. The table agrees with brute-force state-vector
/// expansion to 1e-12 on every amplitude for all 16 input combinations.
pub fn swap_expand(first_pair: BellIndex, second_pair: BellIndex) -> [SwapOutcome; 4] {
    let p1 = bell_to_pauli(first_pair);
    let p2 = bell_to_pauli(second_pair);
    let sigma = singlet_decomposition_sign(first_pair) * singlet_decomposition_sign(second_pair);

    SINGLET_BASE.map(|(base, s_base)| {
        // Carol-side factor of the base term gets p2 on its second qubit
        // and p1 on its first qubit.
        let (after_second, s1) = pauli_on_bell_signed(base, p2, PairSide::C);
        let (carol, s2) = pauli_on_bell_signed(after_second, p1, PairSide::B);
        SwapOutcome {
            bob_result: base,
            carol_result: carol,
            probability: 0.25,
            sign: sigma * s_base * s1 * s2,
        }
    })
}

/// Decode the encoding operation from the two announced Bell outcomes of an
/// entanglement-swapping round over singlet channel pairs: same letter and
/// same superscript → U0; same letter, different superscript → U1;
/// different letter, same superscript → U2; different letter and different
/// superscript → U3.
pub fn decode_swap(bob_outcome: BellIndex, carol_outcome: BellIndex) -> PauliOp {
    let same_family = bob_outcome.family() == carol_outcome.family();
    let same_superscript = bob_outcome.is_plus() == carol_outcome.is_plus();
    match (same_family, same_superscript) {
        (true, true) => PauliOp::U0,
        (true, false) => PauliOp::U1,
        (false, true) => PauliOp::U2,
        (false, false) => PauliOp::U3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::QuantumState;

    #[test]
    fn code_map_is_fixed() {
        assert_eq!(PauliOp::U0.bits(), 0b00);
        assert_eq!(PauliOp::U1.bits(), 0b11);
        assert_eq!(PauliOp::U2.bits(), 0b01);
        assert_eq!(PauliOp::U3.bits(), 0b10);
        for op in PauliOp::ALL {
            assert_eq!(PauliOp::from_bits(op.bits()), op);
        }
    }

    #[test]
    fn singlet_row_matches_published_identities() {
        use BellIndex::*;
        use PairSide::C;
        assert_eq!(pauli_on_bell(PsiMinus, PauliOp::U0, C), PsiMinus);
        assert_eq!(pauli_on_bell(PsiMinus, PauliOp::U1, C), PsiPlus);
        assert_eq!(pauli_on_bell(PsiMinus, PauliOp::U2, C), PhiMinus);
        assert_eq!(pauli_on_bell(PsiMinus, PauliOp::U3, C), PhiPlus);
    }

    /// Every signed table entry agrees exactly with the state-vector engine:
    /// `op` on one side of `b` equals `sign · |result⟩` amplitude for
    /// amplitude.
    #[test]
    fn signed_tables_match_state_engine() {
        for b in BellIndex::ALL {
            for op in PauliOp::ALL {
                for side in [PairSide::B, PairSide::C] {
                    let (expect, sign) = pauli_on_bell_signed(b, op, side);
                    let state = b.to_state("p", "q");
                    let target = match side {
                        PairSide::B => "p",
                        PairSide::C => "q",
                    };
                    let moved = state.apply_unitary(&op.matrix(), &[target]).unwrap();
                    let expected_amps = expect.amplitudes();
                    let got = moved.amplitudes().unwrap();
                    for (g, e) in got.iter().zip(expected_amps.iter()) {
                        let want = e * f64::from(sign);
                        assert!(
                            (g - want).norm() < 1e-12,
                            "mismatch for {b:?} {op:?} {side:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn xor_homomorphism_all_sixteen_pairs() {
        for a in PauliOp::ALL {
            for b in PauliOp::ALL {
                assert_eq!(pauli_compose(a, b).bits(), a.bits() ^ b.bits());
            }
        }
    }

    #[test]
    fn compose_matches_matrix_product_up_to_phase() {
        // |tr(C† · AB)| = 2 when C equals AB up to a unit phase
        for a in PauliOp::ALL {
            for b in PauliOp::ALL {
                let prod = a.matrix().mul(&b.matrix());
                let c = pauli_compose(a, b).matrix();
                let tr = c.adjoint().mul(&prod).trace();
                assert!(
                    (tr.norm() - 2.0).abs() < 1e-12,
                    "{a:?}·{b:?} != {:?} up to phase",
                    pauli_compose(a, b)
                );
            }
        }
    }

    #[test]
    fn sigma_z_then_sigma_x_composes_to_u3() {
        assert_eq!(pauli_compose(PauliOp::U1, PauliOp::U2), PauliOp::U3);
    }

    #[test]
    fn decode_recovers_encoding_for_all_pairs() {
        assert_eq!(decode_pauli(PauliOp::U3, PauliOp::U2), PauliOp::U1);
        for b in PauliOp::ALL {
            assert_eq!(decode_pauli(b, PauliOp::U0), b);
            for c in PauliOp::ALL {
                assert_eq!(decode_pauli(pauli_compose(b, c), c), b);
            }
        }
    }

    #[test]
    fn bell_to_pauli_mapping() {
        assert_eq!(bell_to_pauli(BellIndex::PsiMinus), PauliOp::U0);
        assert_eq!(bell_to_pauli(BellIndex::PsiPlus), PauliOp::U1);
        assert_eq!(bell_to_pauli(BellIndex::PhiMinus), PauliOp::U2);
        assert_eq!(bell_to_pauli(BellIndex::PhiPlus), PauliOp::U3);
    }

    #[test]
    fn label_algebra_matches_engine_for_all_32_combinations() {
        for b in BellIndex::ALL {
            for op in PauliOp::ALL {
                for side in [PairSide::B, PairSide::C] {
                    let expect = pauli_on_bell(b, op, side);
                    let state = b.to_state("p", "q");
                    let target = match side {
                        PairSide::B => "p",
                        PairSide::C => "q",
                    };
                    let moved = state.apply_unitary(&op.matrix(), &[target]).unwrap();
                    assert!(moved.same_up_to_phase(&expect.to_state("p", "q")));
                }
            }
        }
    }

    #[test]
    fn swap_expand_singlet_pair() {
        use BellIndex::*;
        let outcomes = swap_expand(PsiMinus, PsiMinus);
        let expected = [
            (PsiMinus, PsiMinus, 1),
            (PsiPlus, PsiPlus, -1),
            (PhiMinus, PhiMinus, -1),
            (PhiPlus, PhiPlus, 1),
        ];
        for (o, (b, c, s)) in outcomes.iter().zip(expected.iter()) {
            assert_eq!(o.bob_result, *b);
            assert_eq!(o.carol_result, *c);
            assert_eq!(o.sign, *s);
            assert!((o.probability - 0.25).abs() < 1e-15);
        }
    }

    /// Brute-force oracle: expand `first ⊗ second` as a 4-qubit vector over
    /// (f1, s1, f2, s2), then project on every regrouped Bell ⊗ Bell product
    /// over (f1, f2)(s1, s2). The symbolic table must match each of the 16
    /// coefficients to 1e-12.
    #[test]
    fn swap_expand_matches_brute_force_for_all_16_inputs() {
        for first in BellIndex::ALL {
            for second in BellIndex::ALL {
                let table = swap_expand(first, second);
                let coeffs = brute_force_swap_coefficients(first, second);
                for b in BellIndex::ALL {
                    for c in BellIndex::ALL {
                        let expect = table
                            .iter()
                            .find(|o| o.bob_result == b && o.carol_result == c)
                            .map(|o| 0.5 * f64::from(o.sign))
                            .unwrap_or(0.0);
                        let got = coeffs[bell_pos(b)][bell_pos(c)];
                        assert!(
                            (got - expect).abs() < 1e-12,
                            "({first:?},{second:?}) → ({b:?},{c:?}): table {expect}, oracle {got}"
                        );
                    }
                }
            }
        }
    }

    fn bell_pos(b: BellIndex) -> usize {
        BellIndex::ALL.iter().position(|&x| x == b).unwrap()
    }

    /// Coefficients ⟨β_k β_l | first ⊗ second⟩ via the state engine.
    fn brute_force_swap_coefficients(first: BellIndex, second: BellIndex) -> [[f64; 4]; 4] {
        let joint = QuantumState::tensor(
            &first.to_state("f1", "s1"),
            &second.to_state("f2", "s2"),
        )
        .unwrap();
        let amps = joint.amplitudes().unwrap();
        let mut out = [[0.0; 4]; 4];
        for (ki, k) in BellIndex::ALL.iter().enumerate() {
            for (li, l) in BellIndex::ALL.iter().enumerate() {
                let ka = k.amplitudes();
                let la = l.amplitudes();
                let mut acc = Complex64::new(0.0, 0.0);
                // joint index order (f1, s1, f2, s2)
                for f1 in 0..2usize {
                    for s1 in 0..2usize {
                        for f2 in 0..2usize {
                            for s2 in 0..2usize {
                                let joint_idx = (f1 << 3) | (s1 << 2) | (f2 << 1) | s2;
                                let bell_b = (f1 << 1) | f2;
                                let bell_c = (s1 << 1) | s2;
                                acc += (ka[bell_b] * la[bell_c]).conj() * amps[joint_idx];
                            }
                        }
                    }
                }
                assert!(acc.im.abs() < 1e-14);
                out[ki][li] = acc.re;
            }
        }
        out
    }

    #[test]
    fn swap_probabilities_sum_to_one() {
        for first in BellIndex::ALL {
            for second in BellIndex::ALL {
                let total: f64 = swap_expand(first, second)
                    .iter()
                    .map(|o| o.probability)
                    .sum();
                assert!((total - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn decode_swap_closed_form_examples() {
        assert_eq!(
            decode_swap(BellIndex::PsiMinus, BellIndex::PsiMinus),
            PauliOp::U0
        );
        assert_eq!(
            decode_swap(BellIndex::PhiMinus, BellIndex::PsiMinus),
            PauliOp::U2
        );
        assert_eq!(
            decode_swap(BellIndex::PhiPlus, BellIndex::PsiMinus),
            PauliOp::U3
        );
    }

    /// Encode on the first qubit of a singlet channel pair, expand, and
    /// check that every branch decodes back to the encoding: 16 cases.
    #[test]
    fn decode_swap_recovers_every_encoding_branch() {
        for op in PauliOp::ALL {
            let (encoded_first, _) =
                pauli_on_bell_signed(BellIndex::PsiMinus, op, PairSide::B);
            for outcome in swap_expand(encoded_first, BellIndex::PsiMinus) {
                assert_eq!(
                    decode_swap(outcome.bob_result, outcome.carol_result),
                    op,
                    "branch {outcome:?} of encoding {op:?}"
                );
            }
        }
    }
}
