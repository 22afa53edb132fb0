//! Dense pure-state simulator.
//!
//! Qubit `k` is the `k`-th tensor factor and the `k`-th least-significant bit
//! of a basis-state index, so the basis state |q_{n-1} ... q_1 q_0⟩ lives at
//! index `Σ q_k 2^k`. Every bit manipulation in the crate relies on this.
//!
//! States are compared through [`fidelity`], never amplitude by amplitude.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{arg, Error, Result};

/// Default ceiling on register width.
pub const DEFAULT_MAX_QUBITS: usize = 24;

/// Default singular-value cutoff for [`schmidt_rank`].
pub const DEFAULT_SCHMIDT_TOL: f64 = 1e-9;

const ZERO_PROBABILITY: f64 = 1e-14;

/// A 2×2 complex matrix in row-major order.
pub type Mat2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    H(usize),
    X(usize),
    Y(usize),
    Z(usize),
    S(usize),
    Cz(usize, usize),
    /// `Cnot(control, target)`.
    Cnot(usize, usize),
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) | Gate::S(q) => vec![q],
            Gate::Cz(a, b) | Gate::Cnot(a, b) => vec![a, b],
        }
    }

    /// Check that every target is below `n` and that two-qubit targets differ.
    pub fn validate(&self, n: usize) -> Result<()> {
        let qs = self.qubits();
        if let Some(q) = qs.iter().find(|&&q| q >= n) {
            return arg(format!("{self:?}: qubit {q} out of range for {n} qubits"));
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return arg(format!("{self:?}: duplicate target"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// |0...0⟩ on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        check_size(n, DEFAULT_MAX_QUBITS)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits: n, amplitudes })
    }

    /// |+⟩^⊗n.
    pub fn plus(n: usize) -> Result<Self> {
        Self::plus_with_ceiling(n, DEFAULT_MAX_QUBITS)
    }

    pub fn plus_with_ceiling(n: usize, max_qubits: usize) -> Result<Self> {
        check_size(n, max_qubits)?;
        let a = (0.5f64).powf(n as f64 / 2.0);
        Ok(Self {
            n_qubits: n,
            amplitudes: vec![Complex64::new(a, 0.0); 1 << n],
        })
    }

    /// Wrap raw amplitudes. The length must be a power of two; the vector is
    /// normalized and rejected if its norm vanishes.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return arg(format!("amplitude count {len} is not a power of two"));
        }
        let n_qubits = len.trailing_zeros() as usize;
        let mut s = Self { n_qubits, amplitudes };
        let norm = s.norm_sqr();
        if norm <= ZERO_PROBABILITY {
            return arg("zero vector is not a state");
        }
        s.scale(1.0 / norm.sqrt());
        Ok(s)
    }

    pub(crate) fn from_raw(n_qubits: usize, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << n_qubits);
        Self { n_qubits, amplitudes }
    }

    /// Computational basis state |index⟩.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        let mut s = Self::zero(n)?;
        if index >= s.amplitudes.len() {
            return arg(format!("basis index {index} out of range"));
        }
        s.amplitudes[0] = Complex64::new(0.0, 0.0);
        s.amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub(crate) fn scale(&mut self, k: f64) {
        for a in &mut self.amplitudes {
            *a *= k;
        }
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return arg(format!("qubit {q} out of range for {} qubits", self.n_qubits));
        }
        Ok(())
    }

    /// Apply `gate` in place.
    pub fn apply(&mut self, gate: Gate) -> Result<&mut Self> {
        gate.validate(self.n_qubits)?;
        match gate {
            Gate::H(q) => self.apply_h(q),
            Gate::X(q) => self.apply_x(q),
            Gate::Y(q) => {
                let i = Complex64::new(0.0, 1.0);
                self.apply_matrix1(q, &[[0.0.into(), -i], [i, 0.0.into()]])?;
            }
            Gate::Z(q) => self.apply_z(q),
            Gate::S(q) => {
                let bit = 1 << q;
                let i = Complex64::new(0.0, 1.0);
                for (idx, a) in self.amplitudes.iter_mut().enumerate() {
                    if idx & bit != 0 {
                        *a *= i;
                    }
                }
            }
            Gate::Cz(a, b) => self.apply_cz(a, b),
            Gate::Cnot(c, t) => self.apply_cnot(c, t),
        }
        Ok(self)
    }

    /// Apply every gate in order.
    pub fn apply_all(&mut self, gates: &[Gate]) -> Result<&mut Self> {
        for &g in gates {
            self.apply(g)?;
        }
        Ok(self)
    }

    /// Return a new state with `gate` applied.
    pub fn with(&self, gate: Gate) -> Result<Self> {
        let mut s = self.clone();
        s.apply(gate)?;
        Ok(s)
    }

    fn apply_h(&mut self, q: usize) {
        let bit = 1 << q;
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for idx in 0..self.amplitudes.len() {
            if idx & bit == 0 {
                let a0 = self.amplitudes[idx];
                let a1 = self.amplitudes[idx | bit];
                self.amplitudes[idx] = (a0 + a1) * r;
                self.amplitudes[idx | bit] = (a0 - a1) * r;
            }
        }
    }

    fn apply_x(&mut self, q: usize) {
        let bit = 1 << q;
        for idx in 0..self.amplitudes.len() {
            if idx & bit == 0 {
                self.amplitudes.swap(idx, idx | bit);
            }
        }
    }

    fn apply_z(&mut self, q: usize) {
        let bit = 1 << q;
        for (idx, a) in self.amplitudes.iter_mut().enumerate() {
            if idx & bit != 0 {
                *a = -*a;
            }
        }
    }

    fn apply_cz(&mut self, a: usize, b: usize) {
        let mask = (1 << a) | (1 << b);
        for (idx, amp) in self.amplitudes.iter_mut().enumerate() {
            if idx & mask == mask {
                *amp = -*amp;
            }
        }
    }

    fn apply_cnot(&mut self, c: usize, t: usize) {
        let cbit = 1 << c;
        let tbit = 1 << t;
        for idx in 0..self.amplitudes.len() {
            if idx & cbit != 0 && idx & tbit == 0 {
                self.amplitudes.swap(idx, idx | tbit);
            }
        }
    }

    /// Apply an arbitrary 2×2 operator to qubit `q`. The operator need not be
    /// unitary (Kraus operators pass through here), so no renormalization.
    pub fn apply_matrix1(&mut self, q: usize, m: &Mat2) -> Result<&mut Self> {
        self.check_qubit(q)?;
        let bit = 1 << q;
        for idx in 0..self.amplitudes.len() {
            if idx & bit == 0 {
                let a0 = self.amplitudes[idx];
                let a1 = self.amplitudes[idx | bit];
                self.amplitudes[idx] = m[0][0] * a0 + m[0][1] * a1;
                self.amplitudes[idx | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        Ok(self)
    }

    /// Probability of reading `outcome` on qubit `q`.
    pub fn probability(&self, q: usize, outcome: bool) -> Result<f64> {
        self.check_qubit(q)?;
        let bit = 1 << q;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(idx, _)| (idx & bit != 0) == outcome)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Project qubit `q` onto `outcome`. Returns the outcome probability and
    /// the renormalized post-measurement state on the same register.
    pub fn measure_project(&self, q: usize, outcome: bool) -> Result<(f64, StateVector)> {
        let p = self.probability(q, outcome)?;
        if p <= ZERO_PROBABILITY {
            return Err(Error::ZeroProbability { qubit: q, outcome });
        }
        let bit = 1 << q;
        let k = 1.0 / p.sqrt();
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(idx, &a)| if (idx & bit != 0) == outcome { a * k } else { Complex64::new(0.0, 0.0) })
            .collect();
        Ok((p, Self { n_qubits: self.n_qubits, amplitudes }))
    }

    /// Amplitudes restricted to the low `keep` qubits with every higher qubit
    /// fixed to the bits of `high`. The result is unnormalized.
    pub(crate) fn slice_low(&self, keep: usize, high: usize) -> &[Complex64] {
        let start = high << keep;
        &self.amplitudes[start..start + (1 << keep)]
    }

    /// Drop the high qubits of a state whose high register is known to be in
    /// the basis state `high` (e.g. after projecting them). Renormalizes.
    pub fn discard_high(&self, keep: usize, high: usize) -> Result<StateVector> {
        if keep == 0 || keep > self.n_qubits || high >= 1 << (self.n_qubits - keep) {
            return arg(format!("cannot keep {keep} qubits with high pattern {high}"));
        }
        StateVector::from_amplitudes(self.slice_low(keep, high).to_vec())
    }

    /// Inner product ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return arg(format!(
                "dimension mismatch: {} vs {} qubits",
                self.n_qubits, other.n_qubits
            ));
        }
        Ok(inner_slices(&self.amplitudes, &other.amplitudes))
    }

    /// Tensor product `self ⊗ high`: `self` keeps the low qubit indices.
    pub fn tensor(&self, high: &StateVector) -> Result<StateVector> {
        let n = self.n_qubits + high.n_qubits;
        check_size(n, DEFAULT_MAX_QUBITS)?;
        let mut amplitudes = Vec::with_capacity(1 << n);
        for h in &high.amplitudes {
            for l in &self.amplitudes {
                amplitudes.push(h * l);
            }
        }
        Ok(Self { n_qubits: n, amplitudes })
    }
}

fn check_size(n: usize, max_qubits: usize) -> Result<()> {
    if n == 0 {
        return arg("a register needs at least one qubit");
    }
    if n > max_qubits {
        return Err(Error::Resource(format!(
            "{n} qubits exceeds the {max_qubits}-qubit ceiling"
        )));
    }
    Ok(())
}

pub(crate) fn inner_slices(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// |⟨a|b⟩|². Invariant under global phase.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

/// Split of a register into two non-empty complementary sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    side_a: Vec<usize>,
    side_b: Vec<usize>,
}

impl Bipartition {
    pub fn new(n_qubits: usize, side_a: impl IntoIterator<Item = usize>) -> Result<Self> {
        let a: BTreeSet<usize> = side_a.into_iter().collect();
        if let Some(&q) = a.iter().find(|&&q| q >= n_qubits) {
            return arg(format!("qubit {q} out of range for {n_qubits} qubits"));
        }
        if a.is_empty() || a.len() == n_qubits {
            return arg("both sides of a bipartition must be non-empty");
        }
        let side_b = (0..n_qubits).filter(|q| !a.contains(q)).collect();
        Ok(Self { side_a: a.into_iter().collect(), side_b })
    }

    pub fn side_a(&self) -> &[usize] {
        &self.side_a
    }

    pub fn side_b(&self) -> &[usize] {
        &self.side_b
    }

    pub fn n_qubits(&self) -> usize {
        self.side_a.len() + self.side_b.len()
    }
}

fn gather(index: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (k, &q)| acc | (((index >> q) & 1) << k))
}

/// Number of singular values above `tol` of the amplitude array reshaped into
/// a (side A) × (side B) matrix.
pub fn schmidt_rank(state: &StateVector, cut: &Bipartition, tol: f64) -> Result<usize> {
    if cut.n_qubits() != state.n_qubits() {
        return arg(format!(
            "bipartition covers {} qubits, state has {}",
            cut.n_qubits(),
            state.n_qubits()
        ));
    }
    let rows = 1 << cut.side_a.len();
    let cols = 1 << cut.side_b.len();
    let mut m = DMatrix::<Complex64>::zeros(rows, cols);
    for (idx, &a) in state.amplitudes.iter().enumerate() {
        m[(gather(idx, &cut.side_a), gather(idx, &cut.side_b))] = a;
    }
    let sv = m.singular_values();
    Ok(sv.iter().filter(|&&s| s > tol).count())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn plus_amplitudes() {
        let s = StateVector::plus(1).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!(s.amplitudes().iter().all(|a| close(a.re, r, 1e-15)));
        let s = StateVector::plus(2).unwrap();
        assert!(s.amplitudes().iter().all(|a| close(a.re, 0.5, 1e-15)));
        let s = StateVector::plus(10).unwrap();
        assert_eq!(s.amplitudes().len(), 1024);
        assert!(s.amplitudes().iter().all(|a| close(a.re, 1.0 / 32.0, 1e-15)));
    }

    #[test]
    fn ceiling_is_enforced() {
        assert!(matches!(StateVector::plus(25), Err(Error::Resource(_))));
        assert!(matches!(StateVector::plus_with_ceiling(5, 4), Err(Error::Resource(_))));
        assert!(StateVector::plus(0).is_err());
    }

    #[test]
    fn cz_on_plus_plus() {
        let mut s = StateVector::plus(2).unwrap();
        s.apply(Gate::Cz(0, 1)).unwrap();
        let want = [0.5, 0.5, 0.5, -0.5];
        for (a, w) in s.amplitudes().iter().zip(want) {
            assert!(close(a.re, w, 1e-15) && a.im == 0.0);
        }
    }

    #[test]
    fn cnot_plus_zero_is_bell() {
        // |+⟩ on qubit 0 (control), |0⟩ on qubit 1.
        let mut s = StateVector::zero(2).unwrap();
        s.apply(Gate::H(0)).unwrap().apply(Gate::Cnot(0, 1)).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::from_amplitudes(vec![c(r), c(0.0), c(0.0), c(r)]).unwrap();
        assert!(close(fidelity(&s, &bell).unwrap(), 1.0, 1e-12));
    }

    #[test]
    fn gate_argument_errors() {
        let mut s = StateVector::plus(2).unwrap();
        assert!(matches!(s.apply(Gate::Cz(0, 0)), Err(Error::Argument(_))));
        assert!(matches!(s.apply(Gate::H(2)), Err(Error::Argument(_))));
        assert!(matches!(s.apply(Gate::Cnot(3, 0)), Err(Error::Argument(_))));
    }

    #[test]
    fn measurement() {
        let plus = StateVector::plus(1).unwrap();
        let (p, post) = plus.measure_project(0, false).unwrap();
        assert!(close(p, 0.5, 1e-15));
        assert!(close(fidelity(&post, &StateVector::zero(1).unwrap()).unwrap(), 1.0, 1e-15));

        let zero = StateVector::zero(1).unwrap();
        assert_eq!(
            zero.measure_project(0, true).unwrap_err(),
            Error::ZeroProbability { qubit: 0, outcome: true }
        );
        assert!(zero.measure_project(1, true).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let plus = StateVector::plus(1).unwrap();
        let zero = StateVector::zero(1).unwrap();
        assert!(close(fidelity(&plus, &plus).unwrap(), 1.0, 1e-15));
        assert!(close(fidelity(&zero, &plus).unwrap(), 0.5, 1e-15));
        let phase = Complex64::from_polar(1.0, 0.7);
        let rotated =
            StateVector::from_raw(1, plus.amplitudes().iter().map(|a| a * phase).collect());
        assert!(close(fidelity(&plus, &rotated).unwrap(), 1.0, 1e-15));
        assert!(fidelity(&plus, &StateVector::plus(2).unwrap()).is_err());
    }

    #[test]
    fn bipartition_validation() {
        assert!(Bipartition::new(4, [0, 2]).is_ok());
        assert!(Bipartition::new(4, []).is_err());
        assert!(Bipartition::new(4, [0, 1, 2, 3]).is_err());
        assert!(Bipartition::new(4, [4]).is_err());
        let b = Bipartition::new(4, [2, 0]).unwrap();
        assert_eq!(b.side_a(), &[0, 2]);
        assert_eq!(b.side_b(), &[1, 3]);
    }

    #[test]
    fn product_state_has_rank_one() {
        let mut s = StateVector::plus(4).unwrap();
        s.apply(Gate::H(1)).unwrap().apply(Gate::X(3)).unwrap();
        for side in [vec![0], vec![0, 2], vec![1, 2, 3]] {
            let cut = Bipartition::new(4, side).unwrap();
            assert_eq!(schmidt_rank(&s, &cut, DEFAULT_SCHMIDT_TOL).unwrap(), 1);
        }
    }

    #[test]
    fn tensor_and_discard() {
        let low = StateVector::plus(1).unwrap();
        let high = StateVector::basis(2, 2).unwrap();
        let t = low.tensor(&high).unwrap();
        assert_eq!(t.n_qubits(), 3);
        let back = t.discard_high(1, 2).unwrap();
        assert!(close(fidelity(&back, &low).unwrap(), 1.0, 1e-15));
    }
}
