//! Adversary strategies: in-transit photon attacks, dishonest-server
//! announcement tampering, and the multi-photon (Trojan-horse) channel model
//! with its beam-splitter countermeasure.

use num_complex::Complex64;

use crate::bell::PauliOp;
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::rng::RandomStream;
use crate::state::{Label, MeasurementBasis, QuantumState};

/// Basis choice rule for an intercept-resend attacker.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisPolicy {
    /// Uniformly random Z or X per photon.
    RandomZX,
    FixedZ,
    FixedX,
}

impl BasisPolicy {
    pub fn name(self) -> &'static str {
        match self {
            BasisPolicy::RandomZX => "random-zx",
            BasisPolicy::FixedZ => "fixed-z",
            BasisPolicy::FixedX => "fixed-x",
        }
    }
}

/// Which photon of each pair the in-transit attack touches.
///
/// One photon per pair: acting on both photons with two operations is
/// equivalent to one operation on a single photon for singlet pairs, and the
/// single-photon form is what the detection statistics are calibrated to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AttackTarget {
    #[default]
    SeqB,
    SeqC,
}

impl AttackTarget {
    pub fn name(self) -> &'static str {
        match self {
            AttackTarget::SeqB => "seq-b",
            AttackTarget::SeqC => "seq-c",
        }
    }
}

/// Adversary strategy for a session.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AttackModel {
    /// Honest channel.
    None,
    /// Eve measures each targeted photon in transit and resends the
    /// eigenstate she observed.
    InterceptResend { basis_policy: BasisPolicy },
    /// Eve entangles a fresh ancilla qubit with each targeted photon using
    /// the symmetric tagging unitary with detection parameter `d`.
    AncillaEntangling { d: f64 },
    /// The server publishes a wrong operation label with probability
    /// `lie_fraction` per announcement.
    DishonestServer { lie_fraction: f64 },
    /// The server piggybacks `extra_photons` probe photons on each signal.
    TrojanHorse { extra_photons: u32 },
}

impl AttackModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            AttackModel::AncillaEntangling { d } if !(0.0..=1.0).contains(&d) => {
                Err(Error::ParamRange {
                    name: "d",
                    value: d,
                    lo: 0.0,
                    hi: 1.0,
                })
            }
            AttackModel::DishonestServer { lie_fraction } if !(0.0..=1.0).contains(&lie_fraction) => {
                Err(Error::ParamRange {
                    name: "lie_fraction",
                    value: lie_fraction,
                    lo: 0.0,
                    hi: 1.0,
                })
            }
            AttackModel::TrojanHorse { extra_photons } if extra_photons < 1 => {
                Err(Error::ParamCount {
                    name: "extra_photons",
                    value: i64::from(extra_photons),
                    requirement: "must be at least 1",
                })
            }
            _ => Ok(()),
        }
    }

    /// Stable description used in transcripts and summaries.
    pub fn describe(&self) -> String {
        match self {
            AttackModel::None => "none".to_owned(),
            AttackModel::InterceptResend { basis_policy } => {
                format!("intercept-resend({})", basis_policy.name())
            }
            AttackModel::AncillaEntangling { d } => format!("ancilla-entangling(d={d:.6})"),
            AttackModel::DishonestServer { lie_fraction } => {
                format!("dishonest-server(lie_fraction={lie_fraction:.6})")
            }
            AttackModel::TrojanHorse { extra_photons } => {
                format!("trojan-horse(extra_photons={extra_photons})")
            }
        }
    }
}

/// Ancilla states of the tagging unitary, written in the unscaled form
///
/// ```text
///   Ê|0⟩|0⟩ = √F |0⟩|e00⟩ + √D |1⟩|e01⟩
///   Ê|1⟩|0⟩ = √D |0⟩|e10⟩ + √F |1⟩|e11⟩,   F + D = 1
/// ```
///
/// Unitarity requires ⟨e00|e10⟩ + ⟨e01|e11⟩ = 0 for normalized e-states.
#[derive(Debug, Clone)]
pub struct AncillaConvention {
    pub e00: [Complex64; 2],
    pub e01: [Complex64; 2],
    pub e10: [Complex64; 2],
    pub e11: [Complex64; 2],
}

fn ket0() -> [Complex64; 2] {
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
}

fn ket1() -> [Complex64; 2] {
    [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
}

fn inner(a: &[Complex64; 2], b: &[Complex64; 2]) -> Complex64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

impl AncillaConvention {
    /// The convention used throughout this crate: e00 = e11 = |0⟩,
    /// e01 = e10 = |1⟩. The ancilla ends up recording whether the photon
    /// flipped, which makes the leakage bound exactly the binary entropy of
    /// the detection parameter.
    pub fn fixed() -> Self {
        AncillaConvention {
            e00: ket0(),
            e01: ket1(),
            e10: ket1(),
            e11: ket0(),
        }
    }

    /// Residuals of the three unitarity constraints at detection parameter
    /// `d` (scaled-state norm rows and the cross-column orthogonality).
    pub fn unitarity_residuals(&self, d: f64) -> [f64; 3] {
        let f = 1.0 - d;
        let row0 = f * inner(&self.e00, &self.e00).re + d * inner(&self.e01, &self.e01).re;
        let row1 = d * inner(&self.e10, &self.e10).re + f * inner(&self.e11, &self.e11).re;
        let cross = inner(&self.e00, &self.e10) + inner(&self.e01, &self.e11);
        [(row0 - 1.0).abs(), (row1 - 1.0).abs(), cross.norm()]
    }

    /// The 4×4 tagging unitary on (photon, ancilla) with detection
    /// parameter `d`. Columns for ancilla-|1⟩ inputs are completed by
    /// Gram-Schmidt; they are never reached physically because the ancilla
    /// starts in |0⟩.
    pub fn attack_unitary(&self, d: f64) -> Result<CMat> {
        if !(0.0..=1.0).contains(&d) {
            return Err(Error::ParamRange {
                name: "d",
                value: d,
                lo: 0.0,
                hi: 1.0,
            });
        }
        let f = 1.0 - d;
        let (sf, sd) = (f.sqrt(), d.sqrt());

        // basis index = 2·photon + ancilla
        let col0 = [
            self.e00[0] * sf,
            self.e00[1] * sf,
            self.e01[0] * sd,
            self.e01[1] * sd,
        ];
        let col2 = [
            self.e10[0] * sd,
            self.e10[1] * sd,
            self.e11[0] * sf,
            self.e11[1] * sf,
        ];

        let mut m = CMat::zeros(4);
        for r in 0..4 {
            m[(r, 0)] = col0[r];
            m[(r, 2)] = col2[r];
        }
        let mut fixed_cols = vec![col0, col2];
        for free_col in [1usize, 3] {
            let seeds = [ket_e(1), ket_e(3), ket_e(0), ket_e(2)];
            let mut found = None;
            for seed in seeds {
                let mut v = seed;
                for c in &fixed_cols {
                    let proj = inner4(c, &v);
                    for r in 0..4 {
                        v[r] -= c[r] * proj;
                    }
                }
                let norm = inner4(&v, &v).re.sqrt();
                if norm > 1e-6 {
                    for z in &mut v {
                        *z /= norm;
                    }
                    found = Some(v);
                    break;
                }
            }
            let v = found.expect("orthogonal complement of two columns in dimension four");
            for r in 0..4 {
                m[(r, free_col)] = v[r];
            }
            fixed_cols.push(v);
        }

        let resid = m.unitarity_residual();
        if resid > 1e-12 {
            return Err(Error::NotUnitary { residual: resid });
        }
        Ok(m)
    }
}

fn ket_e(i: usize) -> [Complex64; 4] {
    let mut v = [Complex64::new(0.0, 0.0); 4];
    v[i] = Complex64::new(1.0, 0.0);
    v
}

fn inner4(a: &[Complex64; 4], b: &[Complex64; 4]) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// First ancilla name not already used by the state: `e`, `e1`, `e2`, ...
fn fresh_ancilla_label(state: &QuantumState) -> Label {
    let taken: Vec<&str> = state.labels().iter().map(|l| l.as_str()).collect();
    if !taken.contains(&"e") {
        return Label::from("e");
    }
    let mut i = 1usize;
    loop {
        let name = format!("e{i}");
        if !taken.iter().any(|t| *t == name) {
            return Label::new(name);
        }
        i += 1;
    }
}

/// Entangle a fresh |0⟩ ancilla with the target photon using the fixed
/// convention's tagging unitary at detection parameter `d`. The returned
/// state gains one ancilla subsystem.
pub fn apply_ancilla_attack(state: &QuantumState, target: &str, d: f64) -> Result<QuantumState> {
    state.position(target)?;
    let ancilla = fresh_ancilla_label(state);
    let attack = AncillaConvention::fixed().attack_unitary(d)?;
    let extended = QuantumState::tensor(state, &QuantumState::basis(ancilla.as_str(), 0))?;
    extended.apply_unitary(&attack, &[target, ancilla.as_str()])
}

/// What Eve wrote down for one intercepted photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EveRecord {
    pub basis: MeasurementBasis,
    pub outcome: u8,
}

/// Measure the target photon in a basis chosen per `policy` and resend the
/// observed eigenstate (projective collapse).
pub fn apply_intercept_resend(
    state: &QuantumState,
    target: &str,
    policy: BasisPolicy,
    rand: &mut RandomStream,
) -> Result<(QuantumState, EveRecord)> {
    let basis = match policy {
        BasisPolicy::FixedZ => MeasurementBasis::Z,
        BasisPolicy::FixedX => MeasurementBasis::X,
        BasisPolicy::RandomZX => {
            if rand.bit() {
                MeasurementBasis::X
            } else {
                MeasurementBasis::Z
            }
        }
    };
    let outcome = state.measure(target, basis, rand)?;
    Ok((
        outcome.post_state,
        EveRecord {
            basis,
            outcome: outcome.value,
        },
    ))
}

/// Server announcement with probability `lie_fraction` of being replaced by
/// a uniformly random different operation.
pub fn server_lie(truth: PauliOp, lie_fraction: f64, rand: &mut RandomStream) -> Result<PauliOp> {
    if !(0.0..=1.0).contains(&lie_fraction) {
        return Err(Error::ParamRange {
            name: "lie_fraction",
            value: lie_fraction,
            lo: 0.0,
            hi: 1.0,
        });
    }
    if lie_fraction > 0.0 && rand.chance(lie_fraction) {
        let others: Vec<PauliOp> = PauliOp::ALL.into_iter().filter(|op| *op != truth).collect();
        Ok(others[rand.index(others.len())])
    } else {
        Ok(truth)
    }
}

/// Detector clicks from splitting one signal on a 50/50 beam splitter with
/// two threshold single-photon detectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClickRecord {
    pub detector_a: bool,
    pub detector_b: bool,
}

impl ClickRecord {
    /// Both detectors fired: the signal carried more than one photon.
    pub fn both(self) -> bool {
        self.detector_a && self.detector_b
    }
}

/// Route `1 + extra_photons` photons through a 50/50 splitter. Each photon
/// independently picks a detector; the both-click probability is
/// 1 − 2^{1−n} for n photons.
pub fn trojan_beam_splitter_check(extra_photons: u32, rand: &mut RandomStream) -> ClickRecord {
    let n = 1 + extra_photons;
    let mut a = false;
    let mut b = false;
    for _ in 0..n {
        if rand.bit() {
            a = true;
        } else {
            b = true;
        }
    }
    ClickRecord {
        detector_a: a,
        detector_b: b,
    }
}
