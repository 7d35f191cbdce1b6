//! Exact linear-algebra engine for labeled multi-qubit systems.
//!
//! States are exact complex vectors (pure) or density matrices (mixed) over
//! a tensor product of named qubit subsystems, capped at 4 qubits. The first
//! label is the most significant bit of the basis index, so for labels
//! `[B, C]` the amplitude at index `0b01` belongs to |0⟩_B|1⟩_C.
//!
//! Every value is immutable after construction; operations return new states
//! and take any randomness as an explicit [`RandomStream`].

use std::fmt;

use num_complex::Complex64;

use crate::bell::BellIndex;
use crate::error::{Error, Result};
use crate::linalg::{eigh, CMat};
use crate::rng::RandomStream;

/// Engine cap: 2^4 amplitudes.
pub const DIM_CAP: usize = 16;
/// Tolerance for norm, trace and Hermiticity checks on stored states.
pub const STATE_TOL: f64 = 1e-10;
/// Tolerance for unitarity of applied operators.
pub const UNITARY_TOL: f64 = 1e-10;
/// Round-off floor for density-matrix eigenvalues; anything in
/// `[EIG_FLOOR, 0)` is clamped to zero before entropies.
pub const EIG_FLOOR: f64 = -1e-9;

/// Name of one qubit subsystem (`B`, `C1`, `e`, ...). Unique within a state;
/// label order fixes the tensor-factor order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(String);

impl Label {
    pub fn new(name: impl Into<String>) -> Self {
        Label(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label(s.to_owned())
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Measuring basis for single-qubit measurements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasurementBasis {
    /// Eigenvectors |0⟩, |1⟩.
    Z,
    /// Eigenvectors (|0⟩ ± |1⟩)/√2; outcome bit 0 is the + eigenvector.
    X,
}

impl MeasurementBasis {
    /// Orthonormal eigenvectors, indexed by outcome bit.
    pub fn vectors(self) -> [[Complex64; 2]; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            MeasurementBasis::Z => [
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            ],
            MeasurementBasis::X => [
                [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
                [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
            ],
        }
    }
}

impl fmt::Display for MeasurementBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasurementBasis::Z => f.write_str("Z"),
            MeasurementBasis::X => f.write_str("X"),
        }
    }
}

#[derive(Debug, Clone)]
enum Repr {
    Pure(Vec<Complex64>),
    Mixed(CMat),
}

/// Outcome of a single-qubit measurement.
#[derive(Debug, Clone)]
pub struct MeasurementOutcome {
    pub value: u8,
    pub probability: f64,
    pub post_state: QuantumState,
}

/// Outcome of a two-qubit Bell-basis measurement.
#[derive(Debug, Clone)]
pub struct BellMeasurementOutcome {
    pub value: BellIndex,
    pub probability: f64,
    pub post_state: QuantumState,
}

/// Exact state of a labeled multi-qubit system.
#[derive(Debug, Clone)]
pub struct QuantumState {
    labels: Vec<Label>,
    repr: Repr,
}

fn check_labels(labels: &[Label]) -> Result<()> {
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(Error::DuplicateLabel(l.as_str().to_owned()));
        }
    }
    let dim = 1usize << labels.len();
    if dim > DIM_CAP {
        return Err(Error::DimensionCap { requested: dim });
    }
    Ok(())
}

impl QuantumState {
    /// Pure state from amplitudes in label order (first label = most
    /// significant index bit). The vector must be unit norm within 1e-10.
    pub fn pure(labels: Vec<Label>, amps: Vec<Complex64>) -> Result<Self> {
        check_labels(&labels)?;
        if amps.len() != 1 << labels.len() {
            return Err(Error::OperatorShape {
                dim: amps.len(),
                targets: labels.len(),
            });
        }
        if !amps.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFiniteAmplitude);
        }
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::NormNotOne {
                residual: (norm - 1.0).abs(),
            });
        }
        Ok(QuantumState {
            labels,
            repr: Repr::Pure(amps),
        })
    }

    /// Single-qubit computational basis state |0⟩ or |1⟩.
    pub fn basis(label: impl Into<Label>, bit: u8) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 2];
        amps[usize::from(bit & 1)] = Complex64::new(1.0, 0.0);
        QuantumState {
            labels: vec![label.into()],
            repr: Repr::Pure(amps),
        }
    }

    /// Mixed state from a density matrix over the given labels. Must be
    /// Hermitian and unit trace within 1e-10.
    pub fn density(labels: Vec<Label>, mat: CMat) -> Result<Self> {
        check_labels(&labels)?;
        if mat.n != 1 << labels.len() {
            return Err(Error::OperatorShape {
                dim: mat.n,
                targets: labels.len(),
            });
        }
        if !mat.is_finite() {
            return Err(Error::NonFiniteAmplitude);
        }
        let herm = mat.hermiticity_residual();
        if herm > STATE_TOL {
            return Err(Error::NotHermitian { residual: herm });
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::TraceNotOne {
                residual: (tr - Complex64::new(1.0, 0.0)).norm(),
            });
        }
        Ok(QuantumState {
            labels,
            repr: Repr::Mixed(mat),
        })
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn n_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.labels.len()
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.repr, Repr::Pure(_))
    }

    /// Amplitudes if this state is stored as a vector.
    pub fn amplitudes(&self) -> Option<&[Complex64]> {
        match &self.repr {
            Repr::Pure(v) => Some(v),
            Repr::Mixed(_) => None,
        }
    }

    /// Density matrix of this state (|ψ⟩⟨ψ| for pure states).
    pub fn density_matrix(&self) -> CMat {
        match &self.repr {
            Repr::Pure(v) => {
                let n = v.len();
                let mut m = CMat::zeros(n);
                for i in 0..n {
                    for j in 0..n {
                        m[(i, j)] = v[i] * v[j].conj();
                    }
                }
                m
            }
            Repr::Mixed(m) => m.clone(),
        }
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l.as_str() == name)
            .ok_or_else(|| Error::UnknownLabel(name.to_owned()))
    }

    /// The same state under new subsystem names (count must match).
    pub fn relabel(&self, names: &[&str]) -> Result<QuantumState> {
        let labels: Vec<Label> = names.iter().map(|s| Label::from(*s)).collect();
        if labels.len() != self.labels.len() {
            return Err(Error::OperatorShape {
                dim: labels.len(),
                targets: self.labels.len(),
            });
        }
        check_labels(&labels)?;
        Ok(QuantumState {
            labels,
            repr: self.repr.clone(),
        })
    }

    /// ⟨self|other⟩ for two pure states over identical label lists.
    pub fn overlap(&self, other: &QuantumState) -> Option<Complex64> {
        match (&self.repr, &other.repr) {
            (Repr::Pure(a), Repr::Pure(b)) if self.labels == other.labels => Some(
                a.iter()
                    .zip(b.iter())
                    .map(|(x, y)| x.conj() * y)
                    .sum::<Complex64>(),
            ),
            _ => None,
        }
    }

    /// Equality of pure states up to global phase: |⟨a|b⟩| ≥ 1 − 1e-10.
    pub fn same_up_to_phase(&self, other: &QuantumState) -> bool {
        self.overlap(other)
            .map(|z| z.norm() >= 1.0 - 1e-10)
            .unwrap_or(false)
    }

    /// Tensor product. Label sets must be disjoint; the result runs over the
    /// concatenated labels.
    pub fn tensor(a: &QuantumState, b: &QuantumState) -> Result<QuantumState> {
        for l in b.labels.iter() {
            if a.labels.contains(l) {
                return Err(Error::DuplicateLabel(l.as_str().to_owned()));
            }
        }
        let mut labels = a.labels.clone();
        labels.extend(b.labels.iter().cloned());
        let dim = 1usize << labels.len();
        if dim > DIM_CAP {
            return Err(Error::DimensionCap { requested: dim });
        }
        match (&a.repr, &b.repr) {
            (Repr::Pure(va), Repr::Pure(vb)) => {
                let mut amps = Vec::with_capacity(dim);
                for x in va {
                    for y in vb {
                        amps.push(x * y);
                    }
                }
                Ok(QuantumState {
                    labels,
                    repr: Repr::Pure(amps),
                })
            }
            _ => {
                let ma = a.density_matrix();
                let mb = b.density_matrix();
                let (na, nb) = (ma.n, mb.n);
                let mut m = CMat::zeros(na * nb);
                for i1 in 0..na {
                    for j1 in 0..na {
                        for i2 in 0..nb {
                            for j2 in 0..nb {
                                m[(i1 * nb + i2, j1 * nb + j2)] = ma[(i1, j1)] * mb[(i2, j2)];
                            }
                        }
                    }
                }
                Ok(QuantumState {
                    labels,
                    repr: Repr::Mixed(m),
                })
            }
        }
    }

    fn target_positions(&self, targets: &[&str]) -> Result<Vec<usize>> {
        let mut pos = Vec::with_capacity(targets.len());
        for t in targets {
            let p = self.position(t)?;
            if pos.contains(&p) {
                return Err(Error::IdenticalTargets((*t).to_owned()));
            }
            pos.push(p);
        }
        Ok(pos)
    }

    /// Embed a 2^k-dimensional operator acting on `positions` (first listed
    /// target = most significant bit of the small operator's index) into the
    /// full Hilbert space, identity elsewhere.
    fn expand_operator(&self, small: &CMat, positions: &[usize]) -> CMat {
        let n = self.labels.len();
        let dim = self.dim();
        let k = positions.len();
        let mut rest_mask = dim - 1;
        for &p in positions {
            rest_mask &= !(1usize << (n - 1 - p));
        }
        let sub_index = |full: usize| -> usize {
            let mut s = 0usize;
            for (bit, &p) in positions.iter().enumerate() {
                let b = (full >> (n - 1 - p)) & 1;
                s |= b << (k - 1 - bit);
            }
            s
        };
        let mut out = CMat::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                if i & rest_mask == j & rest_mask {
                    out[(i, j)] = small[(sub_index(i), sub_index(j))];
                }
            }
        }
        out
    }

    /// Apply a 2×2 or 4×4 unitary to the target subsystems (identity on the
    /// rest). The matrix must be unitary within 1e-10.
    pub fn apply_unitary(&self, u: &CMat, targets: &[&str]) -> Result<QuantumState> {
        if !(u.n == 2 && targets.len() == 1 || u.n == 4 && targets.len() == 2) {
            return Err(Error::OperatorShape {
                dim: u.n,
                targets: targets.len(),
            });
        }
        let resid = u.unitarity_residual();
        if resid > UNITARY_TOL {
            return Err(Error::NotUnitary { residual: resid });
        }
        let positions = self.target_positions(targets)?;
        let full = self.expand_operator(u, &positions);
        Ok(self.apply_full(&full))
    }

    fn apply_full(&self, full: &CMat) -> QuantumState {
        match &self.repr {
            Repr::Pure(v) => QuantumState {
                labels: self.labels.clone(),
                repr: Repr::Pure(full.matvec(v)),
            },
            Repr::Mixed(m) => QuantumState {
                labels: self.labels.clone(),
                repr: Repr::Mixed(full.mul(m).mul(&full.adjoint())),
            },
        }
    }

    /// Probability of each projector in `projs` on this state.
    fn projector_probabilities(&self, projs: &[CMat]) -> Vec<f64> {
        match &self.repr {
            Repr::Pure(v) => projs
                .iter()
                .map(|p| {
                    let pv = p.matvec(v);
                    pv.iter().map(|z| z.norm_sqr()).sum::<f64>()
                })
                .collect(),
            Repr::Mixed(m) => projs
                .iter()
                .map(|p| p.mul(m).trace().re.max(0.0))
                .collect(),
        }
    }

    /// Collapse onto `proj` and renormalize.
    fn collapse(&self, proj: &CMat) -> QuantumState {
        match &self.repr {
            Repr::Pure(v) => {
                let pv = proj.matvec(v);
                let norm = pv.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                QuantumState {
                    labels: self.labels.clone(),
                    repr: Repr::Pure(pv.into_iter().map(|z| z / norm).collect()),
                }
            }
            Repr::Mixed(m) => {
                let pm = proj.mul(m).mul(proj); // projectors are Hermitian
                let tr = pm.trace().re;
                QuantumState {
                    labels: self.labels.clone(),
                    repr: Repr::Mixed(pm.scale(1.0 / tr)),
                }
            }
        }
    }

    fn sample_outcome(probs: &[f64], rand: &mut RandomStream) -> usize {
        let total: f64 = probs.iter().sum();
        let x = rand.next_f64() * total;
        let mut acc = 0.0;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if x < acc {
                return i;
            }
        }
        probs.len() - 1
    }

    /// Born probabilities of outcomes 0 and 1 for a single-qubit measurement.
    pub fn measure_probabilities(
        &self,
        target: &str,
        basis: MeasurementBasis,
    ) -> Result<[f64; 2]> {
        let positions = self.target_positions(&[target])?;
        let projs = basis_projectors(basis);
        let full: Vec<CMat> = projs
            .iter()
            .map(|p| self.expand_operator(p, &positions))
            .collect();
        let probs = self.projector_probabilities(&full);
        Ok([probs[0], probs[1]])
    }

    /// Measure one qubit in the given basis. The outcome is sampled from the
    /// Born probabilities; the post-state is collapsed and renormalized.
    pub fn measure(
        &self,
        target: &str,
        basis: MeasurementBasis,
        rand: &mut RandomStream,
    ) -> Result<MeasurementOutcome> {
        let positions = self.target_positions(&[target])?;
        let projs = basis_projectors(basis);
        let full: Vec<CMat> = projs
            .iter()
            .map(|p| self.expand_operator(p, &positions))
            .collect();
        let probs = self.projector_probabilities(&full);
        let k = Self::sample_outcome(&probs, rand);
        Ok(MeasurementOutcome {
            value: k as u8,
            probability: probs[k],
            post_state: self.collapse(&full[k]),
        })
    }

    /// Born probability of a specific single-qubit outcome together with the
    /// collapsed branch state, without sampling. The branch is `None` when
    /// its probability is below 1e-15. Used for deterministic branch
    /// analysis.
    pub fn project(
        &self,
        target: &str,
        basis: MeasurementBasis,
        outcome: u8,
    ) -> Result<(f64, Option<QuantumState>)> {
        let positions = self.target_positions(&[target])?;
        let proj = basis_projectors(basis);
        let full = self.expand_operator(&proj[usize::from(outcome & 1)], &positions);
        let p = self.projector_probabilities(std::slice::from_ref(&full))[0];
        if p < 1e-15 {
            return Ok((p, None));
        }
        Ok((p, Some(self.collapse(&full))))
    }

    /// Born probability of a specific Bell outcome on `(a, b)` with the
    /// collapsed branch state; `None` branch below 1e-15 probability.
    pub fn project_bell(
        &self,
        a: &str,
        b: &str,
        outcome: BellIndex,
    ) -> Result<(f64, Option<QuantumState>)> {
        if a == b {
            return Err(Error::IdenticalTargets(a.to_owned()));
        }
        let positions = self.target_positions(&[a, b])?;
        let full = self.expand_operator(&vector_projector(&outcome.amplitudes()), &positions);
        let p = self.projector_probabilities(std::slice::from_ref(&full))[0];
        if p < 1e-15 {
            return Ok((p, None));
        }
        Ok((p, Some(self.collapse(&full))))
    }

    /// Born probabilities of the four Bell outcomes on targets `(a, b)`,
    /// ordered by [`BellIndex::ALL`].
    pub fn bell_probabilities(&self, a: &str, b: &str) -> Result<[f64; 4]> {
        if a == b {
            return Err(Error::IdenticalTargets(a.to_owned()));
        }
        let positions = self.target_positions(&[a, b])?;
        let mut out = [0.0; 4];
        for (i, bell) in BellIndex::ALL.iter().enumerate() {
            let proj = vector_projector(&bell.amplitudes());
            let full = self.expand_operator(&proj, &positions);
            out[i] = self.projector_probabilities(std::slice::from_ref(&full))[0];
        }
        Ok(out)
    }

    /// Bell-basis measurement of two qubits. Returns the projected,
    /// renormalized remainder as post-state.
    pub fn bell_measure(
        &self,
        a: &str,
        b: &str,
        rand: &mut RandomStream,
    ) -> Result<BellMeasurementOutcome> {
        if a == b {
            return Err(Error::IdenticalTargets(a.to_owned()));
        }
        let positions = self.target_positions(&[a, b])?;
        let full: Vec<CMat> = BellIndex::ALL
            .iter()
            .map(|bell| self.expand_operator(&vector_projector(&bell.amplitudes()), &positions))
            .collect();
        let probs = self.projector_probabilities(&full);
        let k = Self::sample_outcome(&probs, rand);
        Ok(BellMeasurementOutcome {
            value: BellIndex::ALL[k],
            probability: probs[k],
            post_state: self.collapse(&full[k]),
        })
    }

    /// Reduced density matrix over `keep` (in the order given). The rest of
    /// the system is traced out.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<QuantumState> {
        if keep.is_empty() {
            return Err(Error::EmptyKeepSet);
        }
        let keep_pos = self.target_positions(keep)?;
        let n = self.labels.len();
        let rho = self.density_matrix();
        let traced: Vec<usize> = (0..n).filter(|p| !keep_pos.contains(p)).collect();
        let kq = keep_pos.len();
        let dim_keep = 1usize << kq;
        let dim_rest = 1usize << traced.len();

        let assemble = |kept_bits: usize, rest_bits: usize| -> usize {
            let mut idx = 0usize;
            for (bit, &p) in keep_pos.iter().enumerate() {
                let b = (kept_bits >> (kq - 1 - bit)) & 1;
                idx |= b << (n - 1 - p);
            }
            for (bit, &p) in traced.iter().enumerate() {
                let b = (rest_bits >> (traced.len() - 1 - bit)) & 1;
                idx |= b << (n - 1 - p);
            }
            idx
        };

        let mut out = CMat::zeros(dim_keep);
        for i in 0..dim_keep {
            for j in 0..dim_keep {
                let mut acc = Complex64::new(0.0, 0.0);
                for r in 0..dim_rest {
                    acc += rho[(assemble(i, r), assemble(j, r))];
                }
                out[(i, j)] = acc;
            }
        }
        let labels = keep.iter().map(|s| Label::from(*s)).collect();
        Ok(QuantumState {
            labels,
            repr: Repr::Mixed(out),
        })
    }

    /// Von Neumann entropy −Tr(ρ log₂ ρ) in bits, with 0·log 0 = 0.
    /// Eigenvalues in `[−1e-9, 0)` from round-off are clamped to zero.
    pub fn entropy_bits(&self) -> Result<f64> {
        von_neumann_entropy(&self.density_matrix())
    }
}

/// Von Neumann entropy of a density matrix in bits. The matrix must be
/// Hermitian with unit trace; eigenvalues are found by cyclic Jacobi
/// diagonalization.
pub fn von_neumann_entropy(rho: &CMat) -> Result<f64> {
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
        return Err(Error::TraceNotOne {
            residual: (tr - Complex64::new(1.0, 0.0)).norm(),
        });
    }
    let decomp = eigh(rho)?;
    let mut s = 0.0;
    for &lam in &decomp.values {
        if lam < EIG_FLOOR {
            return Err(Error::NegativeEigenvalue { value: lam });
        }
        let lam = lam.max(0.0);
        if lam > 0.0 {
            s -= lam * lam.log2();
        }
    }
    Ok(s)
}

fn basis_projectors(basis: MeasurementBasis) -> [CMat; 2] {
    let vecs = basis.vectors();
    [vector_projector(&vecs[0]), vector_projector(&vecs[1])]
}

/// |v⟩⟨v| for a small vector.
fn vector_projector(v: &[Complex64]) -> CMat {
    let n = v.len();
    let mut m = CMat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = v[i] * v[j].conj();
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::{BellIndex, PauliOp};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn basis_product_tensor() {
        // |0⟩_B ⊗ |1⟩_C = |01⟩
        let b = QuantumState::basis("B", 0);
        let cq = QuantumState::basis("C", 1);
        let bc = QuantumState::tensor(&b, &cq).unwrap();
        let amps = bc.amplitudes().unwrap();
        assert_eq!(bc.labels().len(), 2);
        assert!((amps[0b01].re - 1.0).abs() < 1e-15);
        assert!(amps[0b00].norm() < 1e-15);
        assert!(amps[0b10].norm() < 1e-15);
        assert!(amps[0b11].norm() < 1e-15);
    }

    #[test]
    fn tensor_of_two_singlets_has_four_half_amplitudes() {
        let p1 = BellIndex::PsiMinus.to_state("B1", "C1");
        let p2 = BellIndex::PsiMinus.to_state("B2", "C2");
        let four = QuantumState::tensor(&p1, &p2).unwrap();
        let amps = four.amplitudes().unwrap();
        let nonzero: Vec<(usize, Complex64)> = amps
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > 1e-12)
            .map(|(i, z)| (i, *z))
            .collect();
        assert_eq!(nonzero.len(), 4);
        for (_, z) in &nonzero {
            assert!((z.norm() - 0.5).abs() < 1e-12);
            assert!(z.im.abs() < 1e-15);
        }
        // index order (B1,C1,B2,C2): ±1/2 on 0101, 0110, 1001, 1010
        assert!((amps[0b0101].re - 0.5).abs() < 1e-12);
        assert!((amps[0b0110].re + 0.5).abs() < 1e-12);
        assert!((amps[0b1001].re + 0.5).abs() < 1e-12);
        assert!((amps[0b1010].re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn tensor_rejects_duplicate_label() {
        let a = QuantumState::basis("B", 0);
        let b = QuantumState::basis("B", 1);
        match QuantumState::tensor(&a, &b) {
            Err(Error::DuplicateLabel(l)) => assert_eq!(l, "B"),
            other => panic!("expected duplicate-label error, got {other:?}"),
        }
    }

    #[test]
    fn tensor_preserves_norm() {
        let mut stream = RandomStream::new(5);
        for _ in 0..20 {
            let a = random_pure(&["B"], &mut stream);
            let b = random_pure(&["C", "D"], &mut stream);
            let t = QuantumState::tensor(&a, &b).unwrap();
            let norm: f64 = t
                .amplitudes()
                .unwrap()
                .iter()
                .map(|z| z.norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!((norm - 1.0).abs() < 1e-10);
        }
    }

    fn random_pure(names: &[&str], stream: &mut RandomStream) -> QuantumState {
        let dim = 1 << names.len();
        let mut amps: Vec<Complex64> = (0..dim)
            .map(|_| c(stream.next_f64() * 2.0 - 1.0, stream.next_f64() * 2.0 - 1.0))
            .collect();
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut amps {
            *z /= norm;
        }
        QuantumState::pure(names.iter().map(|s| Label::from(*s)).collect(), amps).unwrap()
    }

    #[test]
    fn sigma_x_on_c_maps_singlet_to_phi_minus() {
        let psi = BellIndex::PsiMinus.to_state("B", "C");
        let out = psi.apply_unitary(&PauliOp::U2.matrix(), &["C"]).unwrap();
        assert!(out.same_up_to_phase(&BellIndex::PhiMinus.to_state("B", "C")));
    }

    #[test]
    fn identity_leaves_state_unchanged() {
        let psi = BellIndex::PsiPlus.to_state("B", "C");
        let out = psi.apply_unitary(&PauliOp::U0.matrix(), &["B"]).unwrap();
        assert!(out.same_up_to_phase(&psi));
    }

    #[test]
    fn sigma_z_twice_is_identity_up_to_phase() {
        let psi = BellIndex::PhiPlus.to_state("B", "C");
        let once = psi.apply_unitary(&PauliOp::U1.matrix(), &["C"]).unwrap();
        let twice = once.apply_unitary(&PauliOp::U1.matrix(), &["C"]).unwrap();
        assert!(twice.same_up_to_phase(&psi));
    }

    #[test]
    fn apply_rejects_non_unitary() {
        let psi = QuantumState::basis("B", 0);
        let mut m = CMat::identity(2);
        m[(0, 0)] = c(0.5, 0.0);
        assert!(matches!(
            psi.apply_unitary(&m, &["B"]),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn apply_rejects_unknown_label() {
        let psi = QuantumState::basis("B", 0);
        assert!(matches!(
            psi.apply_unitary(&PauliOp::U2.matrix(), &["Q"]),
            Err(Error::UnknownLabel(_))
        ));
    }

    #[test]
    fn singlet_z_measurement_is_unbiased_and_anticorrelated() {
        let psi = BellIndex::PsiMinus.to_state("B", "C");
        let probs = psi.measure_probabilities("B", MeasurementBasis::Z).unwrap();
        assert!((probs[0] - 0.5).abs() < 1e-12);
        assert!((probs[1] - 0.5).abs() < 1e-12);

        let mut stream = RandomStream::new(17);
        for _ in 0..50 {
            let first = psi.measure("B", MeasurementBasis::Z, &mut stream).unwrap();
            let second = first
                .post_state
                .measure("C", MeasurementBasis::Z, &mut stream)
                .unwrap();
            assert_ne!(first.value, second.value);
            assert!((second.probability - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn x_measurement_of_zero_ket_is_unbiased() {
        let zero = QuantumState::basis("B", 0);
        let probs = zero.measure_probabilities("B", MeasurementBasis::X).unwrap();
        assert!((probs[0] - 0.5).abs() < 1e-12);
        assert!((probs[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn born_statistics_within_three_sigma() {
        // P(bit=1) = 0.36 for amplitudes (0.8, 0.6)
        let state = QuantumState::pure(
            vec![Label::from("B")],
            vec![c(0.8, 0.0), c(0.6, 0.0)],
        )
        .unwrap();
        let mut stream = RandomStream::new(23);
        let trials = 20_000;
        let mut ones = 0;
        for _ in 0..trials {
            if state
                .measure("B", MeasurementBasis::Z, &mut stream)
                .unwrap()
                .value
                == 1
            {
                ones += 1;
            }
        }
        let p = 0.36;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        let freq = ones as f64 / trials as f64;
        assert!(
            (freq - p).abs() < 3.0 * sigma,
            "freq {freq} not within 3 sigma of {p}"
        );
    }

    #[test]
    fn bell_measure_eigenstate_is_deterministic() {
        let phi = BellIndex::PhiPlus.to_state("B", "C");
        let probs = phi.bell_probabilities("B", "C").unwrap();
        assert!((probs[3] - 1.0).abs() < 1e-12); // ALL[3] = PhiPlus
        let mut stream = RandomStream::new(2);
        let out = phi.bell_measure("B", "C", &mut stream).unwrap();
        assert_eq!(out.value, BellIndex::PhiPlus);
        assert!((out.probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_measure_on_two_singlets_is_uniform() {
        let p1 = BellIndex::PsiMinus.to_state("B1", "C1");
        let p2 = BellIndex::PsiMinus.to_state("B2", "C2");
        let four = QuantumState::tensor(&p1, &p2).unwrap();
        let probs = four.bell_probabilities("B1", "B2").unwrap();
        for p in probs {
            assert!((p - 0.25).abs() < 1e-12);
        }
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn bell_measure_rejects_identical_labels() {
        let phi = BellIndex::PhiPlus.to_state("B", "C");
        let mut stream = RandomStream::new(2);
        assert!(matches!(
            phi.bell_measure("B", "B", &mut stream),
            Err(Error::IdenticalTargets(_))
        ));
    }

    #[test]
    fn singlet_reduced_state_is_maximally_mixed() {
        let psi = BellIndex::PsiMinus.to_state("B", "C");
        let rho_b = psi.partial_trace(&["B"]).unwrap();
        let m = rho_b.density_matrix();
        assert!((m[(0, 0)].re - 0.5).abs() < 1e-12);
        assert!((m[(1, 1)].re - 0.5).abs() < 1e-12);
        assert!(m[(0, 1)].norm() < 1e-12);
        assert!((rho_b.entropy_bits().unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn partial_trace_of_product_state() {
        let b = QuantumState::basis("B", 0);
        let cq = QuantumState::basis("C", 1);
        let bc = QuantumState::tensor(&b, &cq).unwrap();
        let rho_b = bc.partial_trace(&["B"]).unwrap();
        let m = rho_b.density_matrix();
        assert!((m[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!(m[(1, 1)].norm() < 1e-12);
    }

    #[test]
    fn partial_trace_keeping_all_is_identity() {
        let mut stream = RandomStream::new(9);
        let st = random_pure(&["B", "C"], &mut stream);
        let kept = st.partial_trace(&["B", "C"]).unwrap();
        let a = st.density_matrix();
        let b = kept.density_matrix();
        for i in 0..4 {
            for j in 0..4 {
                assert!((a[(i, j)] - b[(i, j)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn partial_trace_rejects_empty_keep() {
        let psi = BellIndex::PsiMinus.to_state("B", "C");
        assert!(matches!(
            psi.partial_trace(&[]),
            Err(Error::EmptyKeepSet)
        ));
    }

    #[test]
    fn partial_trace_has_unit_trace() {
        let mut stream = RandomStream::new(31);
        for _ in 0..10 {
            let st = random_pure(&["B", "C", "D"], &mut stream);
            let reduced = st.partial_trace(&["C"]).unwrap();
            let tr = reduced.density_matrix().trace();
            assert!((tr.re - 1.0).abs() < 1e-10 && tr.im.abs() < 1e-12);
        }
    }

    #[test]
    fn entropy_of_known_spectra() {
        // maximally mixed qubit
        let m = CMat::from_rows(&[&[c(0.5, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(0.5, 0.0)]]);
        assert!((von_neumann_entropy(&m).unwrap() - 1.0).abs() < 1e-12);

        // pure projector
        let p = CMat::from_rows(&[&[c(1.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(0.0, 0.0)]]);
        assert!(von_neumann_entropy(&p).unwrap().abs() < 1e-12);

        // diag(0.25, 0.75): binary entropy of 1/4
        let d = CMat::from_rows(&[&[c(0.25, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(0.75, 0.0)]]);
        let expected = 0.811_278_124_459_133; // −(0.25·log2 0.25 + 0.75·log2 0.75)
        assert!((von_neumann_entropy(&d).unwrap() - expected).abs() < 1e-4);
    }

    #[test]
    fn entropy_invariant_under_unitary_conjugation() {
        let mut stream = RandomStream::new(13);
        let st = random_pure(&["B", "C"], &mut stream);
        let rho = st.partial_trace(&["B"]).unwrap();
        let s0 = rho.entropy_bits().unwrap();
        let rotated = rho
            .apply_unitary(&crate::bell::hadamard(), &["B"])
            .unwrap();
        let s1 = rotated.entropy_bits().unwrap();
        assert!((s0 - s1).abs() < 1e-9);
    }

    #[test]
    fn entropy_rejects_wrong_trace() {
        let m = CMat::identity(2);
        assert!(matches!(
            von_neumann_entropy(&m),
            Err(Error::TraceNotOne { .. })
        ));
    }
}
