//! Bit-packed Pauli algebra and stabilizer tableaux.
//!
//! A [`PauliString`] stores one X bit and one Z bit per qubit in a `u64`, so
//! registers are limited to 64 qubits. Qubits with both bits set carry a `Y`
//! (Hermitian convention), and the overall coefficient is `i^phase`. Products
//! of commuting Hermitian Paulis only ever produce phases 0 and 2, i.e. the
//! signs ±1 the protocol cares about, but the full mod-4 phase is tracked so
//! that arbitrary products stay exact.
//!
//! The [`Tableau`] holds only stabilizer generators (no destabilizers).
//! Measurement outcomes are supplied by the caller.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{arg, Error, Result};
use crate::statevector::{Gate, StateVector};

pub const MAX_QUBITS: usize = 64;

/// Tolerance on `‖Pψ − ψ‖²` in [`check_stabilizes`].
pub const STABILIZE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PauliString {
    n_qubits: usize,
    /// Exponent of `i` in front of the Hermitian tensor product.
    phase: u8,
    x: u64,
    z: u64,
}

/// Sign with which a Pauli appears in a stabilizer group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Plus,
    Minus,
    Absent,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        assert!(n_qubits <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        Self { n_qubits, ..Default::default() }
    }

    pub fn from_bits(n_qubits: usize, x: u64, z: u64, negative: bool) -> Self {
        let mut p = Self::identity(n_qubits);
        let mask = full_mask(n_qubits);
        p.x = x & mask;
        p.z = z & mask;
        p.phase = if negative { 2 } else { 0 };
        p
    }

    pub fn single_x(n_qubits: usize, q: usize) -> Self {
        Self::from_bits(n_qubits, 1 << q, 0, false)
    }

    pub fn single_z(n_qubits: usize, q: usize) -> Self {
        Self::from_bits(n_qubits, 0, 1 << q, false)
    }

    /// Parse a dense label such as `"+XZI"` or `"-ZZ"`. The leftmost letter
    /// is qubit 0.
    pub fn parse(label: &str) -> Result<Self> {
        let (negative, body) = match label.as_bytes().first() {
            Some(b'-') => (true, &label[1..]),
            Some(b'+') => (false, &label[1..]),
            _ => (false, label),
        };
        let n = body.chars().count();
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::Parse(format!("bad Pauli label {label:?}")));
        }
        let (mut x, mut z) = (0u64, 0u64);
        for (q, ch) in body.chars().enumerate() {
            match ch {
                'I' | '.' => {}
                'X' => x |= 1 << q,
                'Z' => z |= 1 << q,
                'Y' => {
                    x |= 1 << q;
                    z |= 1 << q;
                }
                _ => return Err(Error::Parse(format!("bad Pauli letter {ch:?} in {label:?}"))),
            }
        }
        Ok(Self::from_bits(n, x, z, negative))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_bits(&self) -> u64 {
        self.x
    }

    pub fn z_bits(&self) -> u64 {
        self.z
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    /// `Some(true)` for −1, `Some(false)` for +1, `None` for ±i.
    pub fn is_negative(&self) -> Option<bool> {
        match self.phase {
            0 => Some(false),
            2 => Some(true),
            _ => None,
        }
    }

    pub fn negated(mut self) -> Self {
        self.phase = (self.phase + 2) & 3;
        self
    }

    /// Same operator bits with a +1 coefficient.
    pub fn unsigned(mut self) -> Self {
        self.phase = 0;
        self
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// Restrict to the qubits in `keep`, relabelled consecutively.
    fn compress(&self, keep: &[usize]) -> PauliString {
        let mut out = PauliString::identity(keep.len());
        for (k, &q) in keep.iter().enumerate() {
            out.x |= ((self.x >> q) & 1) << k;
            out.z |= ((self.z >> q) & 1) << k;
        }
        out.phase = self.phase;
        out
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &PauliString) -> PauliString {
        assert_eq!(self.n_qubits, other.n_qubits, "Pauli width mismatch");
        let mut phase = (self.phase + other.phase) as i32;
        // Per-qubit phase of σ_a σ_b in the Hermitian convention: +1 for the
        // cyclic pairs XY, YZ, ZX and -1 for the reverse order.
        let (x1, z1, x2, z2) = (self.x, self.z, other.x, other.z);
        let y1 = x1 & z1;
        let xo1 = x1 & !z1;
        let zo1 = z1 & !x1;
        let y2 = x2 & z2;
        let xo2 = x2 & !z2;
        let zo2 = z2 & !x2;
        let plus = (xo1 & y2) | (y1 & zo2) | (zo1 & xo2);
        let minus = (y1 & xo2) | (zo1 & y2) | (xo1 & zo2);
        phase += plus.count_ones() as i32 - minus.count_ones() as i32;
        PauliString {
            n_qubits: self.n_qubits,
            phase: phase.rem_euclid(4) as u8,
            x: x1 ^ x2,
            z: z1 ^ z2,
        }
    }

    /// Conjugate in place: `P ↦ U P U†`.
    pub fn conjugate(&mut self, gate: Gate) {
        let bit = |q: usize| 1u64 << q;
        let get = |v: u64, q: usize| (v >> q) & 1;
        match gate {
            Gate::H(q) => {
                let (xq, zq) = (get(self.x, q), get(self.z, q));
                if xq & zq == 1 {
                    self.phase = (self.phase + 2) & 3;
                }
                self.x = (self.x & !bit(q)) | (zq << q);
                self.z = (self.z & !bit(q)) | (xq << q);
            }
            Gate::S(q) => {
                let (xq, zq) = (get(self.x, q), get(self.z, q));
                if xq & zq == 1 {
                    self.phase = (self.phase + 2) & 3;
                }
                self.z ^= xq << q;
            }
            Gate::X(q) => {
                if get(self.z, q) == 1 {
                    self.phase = (self.phase + 2) & 3;
                }
            }
            Gate::Z(q) => {
                if get(self.x, q) == 1 {
                    self.phase = (self.phase + 2) & 3;
                }
            }
            Gate::Y(q) => {
                if get(self.x, q) ^ get(self.z, q) == 1 {
                    self.phase = (self.phase + 2) & 3;
                }
            }
            Gate::Cz(a, b) => {
                let (xa, za, xb, zb) = (get(self.x, a), get(self.z, a), get(self.x, b), get(self.z, b));
                if xa & xb & (za ^ zb) == 1 {
                    self.phase = (self.phase + 2) & 3;
                }
                self.z ^= (xb << a) | (xa << b);
            }
            Gate::Cnot(c, t) => {
                let (xc, zc, xt, zt) = (get(self.x, c), get(self.z, c), get(self.x, t), get(self.z, t));
                if xc & zt & (xt ^ zc ^ 1) == 1 {
                    self.phase = (self.phase + 2) & 3;
                }
                self.x ^= xc << t;
                self.z ^= zt << c;
            }
        }
    }

    /// Apply the operator to a dense state vector.
    pub fn apply_to(&self, state: &StateVector) -> Result<StateVector> {
        if state.n_qubits() != self.n_qubits {
            return arg(format!(
                "Pauli on {} qubits applied to {}-qubit state",
                self.n_qubits,
                state.n_qubits()
            ));
        }
        // P = i^phase · i^{#Y} · X^x Z^z
        let ys = (self.x & self.z).count_ones() as u8;
        let coeff = I_POWERS[((self.phase + ys) & 3) as usize];
        let x = self.x as usize;
        let z = self.z as usize;
        let src = state.amplitudes();
        let mut out = vec![Complex64::new(0.0, 0.0); src.len()];
        for (b, &a) in src.iter().enumerate() {
            let sign = if (z & b).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            out[b ^ x] = a * coeff * sign;
        }
        Ok(StateVector::from_raw(state.n_qubits(), out))
    }
}

const I_POWERS: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["+", "+i", "-", "-i"][self.phase as usize])?;
        for q in 0..self.n_qubits {
            let c = match ((self.x >> q) & 1, (self.z >> q) & 1) {
                (0, 0) => 'I',
                (1, 0) => 'X',
                (0, 1) => 'Z',
                _ => 'Y',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Stabilizer generators of a pure stabilizer state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tableau {
    n_qubits: usize,
    generators: Vec<PauliString>,
}

impl Tableau {
    /// |0...0⟩: generators +Z_q.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        check_width(n_qubits)?;
        Ok(Self {
            n_qubits,
            generators: (0..n_qubits).map(|q| PauliString::single_z(n_qubits, q)).collect(),
        })
    }

    /// |+...+⟩: generators +X_q.
    pub fn plus(n_qubits: usize) -> Result<Self> {
        check_width(n_qubits)?;
        Ok(Self {
            n_qubits,
            generators: (0..n_qubits).map(|q| PauliString::single_x(n_qubits, q)).collect(),
        })
    }

    /// Build from explicit generators, checking width, count, commutation and
    /// independence.
    pub fn from_generators(n_qubits: usize, generators: Vec<PauliString>) -> Result<Self> {
        check_width(n_qubits)?;
        if generators.len() != n_qubits {
            return arg(format!("{} generators for {n_qubits} qubits", generators.len()));
        }
        if let Some(g) = generators.iter().find(|g| g.n_qubits != n_qubits) {
            return arg(format!("generator {g} has the wrong width"));
        }
        if generators.iter().any(|g| g.is_negative().is_none()) {
            return arg("generators must be Hermitian (sign ±1)");
        }
        let t = Self { n_qubits, generators };
        if !t.generators_commute() {
            return arg("generators do not pairwise commute");
        }
        if t.rank() != n_qubits {
            return arg("generators are not independent");
        }
        Ok(t)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn generators_commute(&self) -> bool {
        self.generators
            .iter()
            .enumerate()
            .all(|(i, a)| self.generators[i + 1..].iter().all(|b| a.commutes_with(b)))
    }

    /// GF(2) rank of the stacked `x|z` rows.
    pub fn rank(&self) -> usize {
        let mut rows: Vec<u128> = self
            .generators
            .iter()
            .map(|g| (g.x as u128) | ((g.z as u128) << 64))
            .collect();
        let mut rank = 0;
        for col in 0..128 {
            let bit = 1u128 << col;
            if let Some(p) = (rank..rows.len()).find(|&r| rows[r] & bit != 0) {
                rows.swap(rank, p);
                let pivot = rows[rank];
                for (r, row) in rows.iter_mut().enumerate() {
                    if r != rank && *row & bit != 0 {
                        *row ^= pivot;
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    /// Conjugate every generator by `gate`.
    pub fn apply(&mut self, gate: Gate) -> Result<&mut Self> {
        gate.validate(self.n_qubits)?;
        for g in &mut self.generators {
            g.conjugate(gate);
        }
        Ok(self)
    }

    pub fn apply_all(&mut self, gates: &[Gate]) -> Result<&mut Self> {
        for &g in gates {
            self.apply(g)?;
        }
        Ok(self)
    }

    /// Return a conjugated copy.
    pub fn conjugate(&self, gate: Gate) -> Result<Self> {
        let mut t = self.clone();
        t.apply(gate)?;
        Ok(t)
    }

    /// Whether a Z measurement of `qubit` is random (some generator anticommutes).
    pub fn is_random(&self, qubit: usize) -> Result<bool> {
        self.check_qubit(qubit)?;
        Ok(self.generators.iter().any(|g| (g.x >> qubit) & 1 == 1))
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return arg(format!("qubit {q} out of range for {} qubits", self.n_qubits));
        }
        Ok(())
    }

    /// Project `qubit` onto the Z eigenvalue `(-1)^outcome`.
    ///
    /// Generators anticommuting with `Z_qubit` are merged into the first such
    /// generator, which is then replaced by `(-1)^outcome Z_qubit`. If the
    /// outcome is already determined and differs from `outcome`, the branch
    /// has zero probability and an error is returned.
    pub fn measure_z(&mut self, qubit: usize, outcome: bool) -> Result<&mut Self> {
        self.check_qubit(qubit)?;
        let anti: Vec<usize> = (0..self.n_qubits)
            .filter(|&i| (self.generators[i].x >> qubit) & 1 == 1)
            .collect();
        let zq = PauliString::single_z(self.n_qubits, qubit);
        match anti.split_first() {
            None => {
                let expected = self.extract_sign(&zq);
                let negative = match expected {
                    Membership::Plus => false,
                    Membership::Minus => true,
                    Membership::Absent => unreachable!("Z commutes with a full stabilizer group"),
                };
                if negative != outcome {
                    return Err(Error::ZeroProbability { qubit, outcome });
                }
            }
            Some((&pivot, rest)) => {
                let p = self.generators[pivot];
                for &i in rest {
                    self.generators[i] = self.generators[i].mul(&p);
                }
                self.generators[pivot] = if outcome { zq.negated() } else { zq };
            }
        }
        Ok(self)
    }

    /// Measure `qubit` in the Z basis, drawing a uniform bit when the result is
    /// random. Returns the outcome.
    pub fn measure_z_sampled<R: Rng + ?Sized>(&mut self, qubit: usize, rng: &mut R) -> Result<bool> {
        let outcome = if self.is_random(qubit)? {
            rng.random::<bool>()
        } else {
            self.extract_sign(&PauliString::single_z(self.n_qubits, qubit)) == Membership::Minus
        };
        self.measure_z(qubit, outcome)?;
        Ok(outcome)
    }

    /// Sign with which `target` lies in the group generated by the tableau.
    ///
    /// Returns [`Membership::Plus`] if `target` itself is a group element,
    /// [`Membership::Minus`] if `-target` is, and [`Membership::Absent`]
    /// otherwise.
    pub fn extract_sign(&self, target: &PauliString) -> Membership {
        if target.n_qubits != self.n_qubits {
            return Membership::Absent;
        }
        let mut rows = self.generators.clone();
        let mut residue = *target;
        let mut rank = 0;
        for col in 0..2 * self.n_qubits {
            let has = |p: &PauliString| {
                if col < self.n_qubits {
                    (p.x >> col) & 1 == 1
                } else {
                    (p.z >> (col - self.n_qubits)) & 1 == 1
                }
            };
            let Some(p) = (rank..rows.len()).find(|&r| has(&rows[r])) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank];
            for row in rows.iter_mut().skip(rank + 1) {
                if has(row) {
                    *row = row.mul(&pivot);
                }
            }
            if has(&residue) {
                residue = residue.mul(&pivot);
            }
            rank += 1;
        }
        if !residue.is_identity() {
            return Membership::Absent;
        }
        // target · R = residue with R a group element, so target = residue · R.
        match residue.phase {
            0 => Membership::Plus,
            2 => Membership::Minus,
            _ => Membership::Absent,
        }
    }

    /// Stabilizer group of the qubits in `keep`, assuming every other qubit
    /// has been measured in the Z basis (so ±Z_q is in the group for each).
    /// The kept qubits are relabelled in the order given.
    pub fn restrict(&self, keep: &[usize]) -> Result<Tableau> {
        for &q in keep {
            self.check_qubit(q)?;
        }
        let kept_mask: u64 = keep.iter().fold(0, |m, &q| m | (1 << q));
        let mut eliminated = Vec::new();
        for q in (0..self.n_qubits).filter(|q| kept_mask >> q & 1 == 0) {
            let zq = PauliString::single_z(self.n_qubits, q);
            match self.extract_sign(&zq) {
                Membership::Plus => eliminated.push((q, zq)),
                Membership::Minus => eliminated.push((q, zq.negated())),
                Membership::Absent => {
                    return arg(format!("qubit {q} is not in a Z eigenstate; cannot discard it"))
                }
            }
        }
        let mut rows = Vec::new();
        for g in &self.generators {
            let mut g = *g;
            for (q, zq) in &eliminated {
                if (g.z >> q) & 1 == 1 {
                    g = g.mul(zq);
                }
            }
            if g.x & !kept_mask != 0 {
                return arg("generator has X support on a discarded qubit");
            }
            if !g.is_identity() {
                rows.push(g.compress(keep));
            }
        }
        Tableau::independent_subset(keep.len(), rows)
    }

    /// Pick an independent generating set out of `rows` by elimination.
    fn independent_subset(n_qubits: usize, mut rows: Vec<PauliString>) -> Result<Tableau> {
        let mut rank = 0;
        for col in 0..2 * n_qubits {
            let has = |p: &PauliString| {
                if col < n_qubits {
                    (p.x >> col) & 1 == 1
                } else {
                    (p.z >> (col - n_qubits)) & 1 == 1
                }
            };
            let Some(p) = (rank..rows.len()).find(|&r| has(&rows[r])) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank];
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && has(row) {
                    *row = row.mul(&pivot);
                }
            }
            rank += 1;
        }
        rows.truncate(rank);
        Tableau::from_generators(n_qubits, rows)
    }
}

fn check_width(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return arg(format!("tableau width {n} outside 1..={MAX_QUBITS}"));
    }
    Ok(())
}

/// True iff every generator maps `state` to itself within [`STABILIZE_TOL`].
pub fn check_stabilizes(state: &StateVector, tableau: &Tableau) -> Result<bool> {
    if state.n_qubits() != tableau.n_qubits() {
        return arg(format!(
            "state has {} qubits, tableau {}",
            state.n_qubits(),
            tableau.n_qubits()
        ));
    }
    for g in tableau.generators() {
        let image = g.apply_to(state)?;
        let err: f64 = image
            .amplitudes()
            .iter()
            .zip(state.amplitudes())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        if err > STABILIZE_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        PauliString::parse(s).unwrap()
    }

    #[test]
    fn single_qubit_products() {
        assert_eq!(p("X").mul(&p("Y")), p("Z").with_phase(1));
        assert_eq!(p("Y").mul(&p("X")), p("Z").with_phase(3));
        assert_eq!(p("Z").mul(&p("X")), p("Y").with_phase(1));
        assert_eq!(p("X").mul(&p("X")), PauliString::identity(1));
        assert_eq!(p("Y").mul(&p("Y")), PauliString::identity(1));
    }

    impl PauliString {
        fn with_phase(mut self, phase: u8) -> Self {
            self.phase = phase;
            self
        }
    }

    #[test]
    fn commutation_parity() {
        assert!(p("XZ").commutes_with(&p("ZX")));
        assert!(!p("XI").commutes_with(&p("ZI")));
        assert!(p("XX").commutes_with(&p("ZZ")));
        assert!(!p("YI").commutes_with(&p("XI")));
    }

    #[test]
    fn cz_conjugation_rules() {
        let cz = Gate::Cz(0, 1);
        let mut x0 = p("XI");
        x0.conjugate(cz);
        assert_eq!(x0, p("XZ"));
        let mut z0 = p("ZI");
        z0.conjugate(cz);
        assert_eq!(z0, p("ZI"));
        let mut x1 = p("IX");
        x1.conjugate(cz);
        assert_eq!(x1, p("ZX"));
        let mut h = p("X");
        h.conjugate(Gate::H(0));
        assert_eq!(h, p("Z"));
        let mut y = p("Y");
        y.conjugate(Gate::H(0));
        assert_eq!(y, p("-Y"));
    }

    /// Conjugation against the dense engine on every two-qubit Pauli.
    #[test]
    fn conjugation_matches_dense() {
        let letters = ['I', 'X', 'Y', 'Z'];
        let gates = [
            Gate::H(0),
            Gate::H(1),
            Gate::S(0),
            Gate::X(1),
            Gate::Y(0),
            Gate::Z(1),
            Gate::Cz(0, 1),
            Gate::Cnot(0, 1),
            Gate::Cnot(1, 0),
        ];
        // A generic state so that operator equality is visible.
        let psi = StateVector::from_amplitudes(vec![
            Complex64::new(0.3, 0.1),
            Complex64::new(-0.2, 0.5),
            Complex64::new(0.7, -0.3),
            Complex64::new(0.1, 0.2),
        ])
        .unwrap();
        for a in letters {
            for b in letters {
                let pauli = p(&format!("{a}{b}"));
                for gate in gates {
                    // U P U† ψ  vs  P' ψ
                    let inverse = match gate {
                        Gate::S(q) => vec![Gate::S(q), Gate::S(q), Gate::S(q)],
                        g => vec![g],
                    };
                    let mut lhs = psi.clone();
                    lhs.apply_all(&inverse).unwrap();
                    let mut lhs = pauli.apply_to(&lhs).unwrap();
                    lhs.apply(gate).unwrap();
                    let mut conj = pauli;
                    conj.conjugate(gate);
                    let rhs = conj.apply_to(&psi).unwrap();
                    let err: f64 = lhs
                        .amplitudes()
                        .iter()
                        .zip(rhs.amplitudes())
                        .map(|(x, y)| (x - y).norm_sqr())
                        .sum();
                    assert!(err < 1e-24, "{pauli} under {gate:?} -> {conj}");
                }
            }
        }
    }

    #[test]
    fn measure_plus_forced_zero() {
        let mut t = Tableau::plus(1).unwrap();
        t.measure_z(0, false).unwrap();
        assert_eq!(t.generators(), &[p("Z")]);
    }

    #[test]
    fn measure_impossible_outcome() {
        let mut t = Tableau::zero(1).unwrap();
        assert_eq!(
            t.measure_z(0, true).unwrap_err(),
            Error::ZeroProbability { qubit: 0, outcome: true }
        );
        assert!(t.measure_z(0, false).is_ok());
    }

    #[test]
    fn extract_sign_examples() {
        let mut k2 = Tableau::plus(2).unwrap();
        k2.apply(Gate::Cz(0, 1)).unwrap();
        assert_eq!(k2.extract_sign(&p("XZ")), Membership::Plus);
        assert_eq!(k2.extract_sign(&p("-XZ")), Membership::Minus);
        assert_eq!(k2.extract_sign(&p("YY")), Membership::Plus);
        assert_eq!(k2.extract_sign(&p("XX")), Membership::Absent);
        let zz = Tableau::zero(2).unwrap();
        assert_eq!(zz.extract_sign(&p("XX")), Membership::Absent);
        assert_eq!(zz.extract_sign(&p("ZZ")), Membership::Plus);
    }

    #[test]
    fn from_generators_rejects_bad_sets() {
        assert!(Tableau::from_generators(2, vec![p("XI"), p("ZI")]).is_err());
        assert!(Tableau::from_generators(2, vec![p("ZZ"), p("ZZ")]).is_err());
        assert!(Tableau::from_generators(2, vec![p("ZZ")]).is_err());
        assert!(Tableau::from_generators(2, vec![p("XX"), p("-ZZ")]).is_ok());
    }

    #[test]
    fn check_stabilizes_examples() {
        let zero = StateVector::zero(1).unwrap();
        let minus_z = Tableau::from_generators(1, vec![p("-Z")]).unwrap();
        assert!(!check_stabilizes(&zero, &minus_z).unwrap());
        assert!(check_stabilizes(&zero, &Tableau::zero(1).unwrap()).unwrap());
        assert!(check_stabilizes(&zero, &Tableau::zero(2).unwrap()).is_err());
    }

    #[test]
    fn restrict_drops_measured_qubits() {
        // Bell pair on (0,1) with qubit 2 measured to |1⟩.
        let mut t = Tableau::zero(3).unwrap();
        t.apply_all(&[Gate::H(0), Gate::Cnot(0, 1), Gate::X(2)]).unwrap();
        let r = t.restrict(&[0, 1]).unwrap();
        assert_eq!(r.extract_sign(&p("XX")), Membership::Plus);
        assert_eq!(r.extract_sign(&p("ZZ")), Membership::Plus);
        assert!(t.restrict(&[1, 2]).is_err());
    }
}
