//! The phase-walk distribution protocol and its correction formulas.
//!
//! For a target graph the register holds one data qubit per vertex followed by
//! two resource qubits per edge. The circuit is
//!
//! 1. `H` on every data qubit,
//! 2. a two-qubit graph state `CZ|++⟩` on each resource pair,
//! 3. `CZ(d_v, r_{e,v})` for every incidence, then `H` on every resource qubit,
//! 4. a Z measurement of every resource qubit, followed by a local Pauli
//!    correction on the data qubits.
//!
//! # Outcome bit order
//!
//! Outcome bits follow the resource qubits: edges in graph order, and within
//! an edge the first endpoint before the second. The outcome *index* reads
//! this sequence as a big-endian integer, so bit 0 of the sequence is the most
//! significant bit of the index. For the four-vertex path `A-B-C-D` the
//! sequence is `s1..s6 = AB@A, AB@B, BC@B, BC@C, CD@C, CD@D`; for the
//! four-cycle it is `s1..s8` over `AB, BC, CD, DA` with `DA@D` before `DA@A`.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{arg, Error, Result};
use crate::graphs::{catalog_lookup, Graph};
use crate::stabilizer::{Membership, PauliString, Tableau};
use crate::statevector::{Gate, StateVector};

/// Qubit assignment: data qubits `0..|V|` in vertex order, then resource
/// pairs in edge order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    n_data: usize,
    edges: Vec<(usize, usize)>,
}

impl Layout {
    pub fn new(graph: &Graph) -> Self {
        Self { n_data: graph.n_vertices(), edges: graph.edges().to_vec() }
    }

    pub fn n_data(&self) -> usize {
        self.n_data
    }

    pub fn n_resources(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn total_qubits(&self) -> usize {
        self.n_data + self.n_resources()
    }

    pub fn data_index(&self, v: usize) -> usize {
        v
    }

    /// Position of `r_{e,v}` in the resource sequence.
    pub fn resource_slot(&self, edge: usize, endpoint: usize) -> Option<usize> {
        let &(a, b) = self.edges.get(edge)?;
        if endpoint == a {
            Some(2 * edge)
        } else if endpoint == b {
            Some(2 * edge + 1)
        } else {
            None
        }
    }

    /// Qubit index of `r_{e,v}`.
    pub fn resource_index(&self, edge: usize, endpoint: usize) -> Option<usize> {
        self.resource_slot(edge, endpoint).map(|s| self.n_data + s)
    }

    pub fn resource_qubits(&self) -> std::ops::Range<usize> {
        self.n_data..self.total_qubits()
    }

    /// Gates for steps 1-2, starting from |0...0⟩.
    pub fn preparation_gates(&self) -> Vec<Gate> {
        let mut gates: Vec<Gate> = (0..self.total_qubits()).map(Gate::H).collect();
        for e in 0..self.edges.len() {
            let r = self.n_data + 2 * e;
            gates.push(Gate::Cz(r, r + 1));
        }
        gates
    }

    /// Gates for step 3 (the walk step and the basis change before measurement).
    pub fn walk_gates(&self) -> Vec<Gate> {
        let mut gates = Vec::with_capacity(3 * self.n_resources());
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            let r = self.n_data + 2 * e;
            gates.push(Gate::Cz(a, r));
            gates.push(Gate::Cz(b, r + 1));
        }
        gates.extend(self.resource_qubits().map(Gate::H));
        gates
    }
}

/// The 2|E| resource measurement bits, in resource order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Outcome {
    bits: Vec<bool>,
}

impl Outcome {
    pub fn zeros(graph: &Graph) -> Self {
        Self { bits: vec![false; 2 * graph.n_edges()] }
    }

    pub fn from_bits(graph: &Graph, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != 2 * graph.n_edges() {
            return arg(format!(
                "outcome has {} bits, graph needs {}",
                bits.len(),
                2 * graph.n_edges()
            ));
        }
        Ok(Self { bits })
    }

    /// Decode a big-endian outcome index.
    pub fn from_index(graph: &Graph, index: u64) -> Result<Self> {
        let len = 2 * graph.n_edges();
        if len < 64 && index >> len != 0 {
            return arg(format!("outcome index {index} out of range"));
        }
        let bits = (0..len).map(|j| (index >> (len - 1 - j)) & 1 == 1).collect();
        Ok(Self { bits })
    }

    /// Parse a string of `0`/`1` characters in resource order.
    pub fn parse(graph: &Graph, text: &str) -> Result<Self> {
        let bits = text
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse(format!("bad outcome bit {c:?}"))),
            })
            .collect::<Result<Vec<bool>>>()?;
        Self::from_bits(graph, bits)
    }

    pub fn index(&self) -> u64 {
        self.bits.iter().fold(0, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Resource register pattern: bit `j` is the outcome of resource qubit `j`.
    pub fn resource_pattern(&self) -> usize {
        self.bits
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &b)| acc | ((b as usize) << j))
    }

    /// `s_{e,v}`: the outcome of `v`'s own resource qubit on edge `e`.
    pub fn near(&self, graph: &Graph, edge: usize, v: usize) -> Option<bool> {
        let &(a, b) = graph.edges().get(edge)?;
        if v == a {
            Some(self.bits[2 * edge])
        } else if v == b {
            Some(self.bits[2 * edge + 1])
        } else {
            None
        }
    }

    /// `s_{e,v̄}`: the outcome of the opposite endpoint's resource qubit.
    pub fn far(&self, graph: &Graph, edge: usize, v: usize) -> Option<bool> {
        let &(a, b) = graph.edges().get(edge)?;
        if v == a {
            Some(self.bits[2 * edge + 1])
        } else if v == b {
            Some(self.bits[2 * edge])
        } else {
            None
        }
    }

    /// Outcome at `at`'s side of the edge `{at, other}`, looked up by label.
    pub fn by_label(&self, graph: &Graph, at: &str, other: &str) -> Result<bool> {
        let (Some(u), Some(v)) = (graph.vertex_index(at), graph.vertex_index(other)) else {
            return arg(format!("no vertices {at}/{other}"));
        };
        let e = graph
            .edge_index(u, v)
            .ok_or_else(|| Error::Argument(format!("no edge {at}-{other}")))?;
        Ok(self.near(graph, e, u).expect("endpoint of its own edge"))
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// XOR of the far-side outcomes over the edges at `v`.
pub fn far_parity(graph: &Graph, outcome: &Outcome, v: usize) -> bool {
    graph
        .incident_edges(v)
        .fold(false, |acc, e| acc ^ outcome.far(graph, e, v).unwrap())
}

/// XOR of the near-side outcomes over the edges at `v`.
pub fn near_parity(graph: &Graph, outcome: &Outcome, v: usize) -> bool {
    graph
        .incident_edges(v)
        .fold(false, |acc, e| acc ^ outcome.near(graph, e, v).unwrap())
}

/// Per-vertex Pauli exponents `(x_v, z_v)`; vertex `v` receives `X^x Z^z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CorrectionPlan {
    ops: Vec<(bool, bool)>,
}

impl CorrectionPlan {
    pub fn identity(n_vertices: usize) -> Self {
        Self { ops: vec![(false, false); n_vertices] }
    }

    pub fn from_ops(ops: Vec<(bool, bool)>) -> Self {
        Self { ops }
    }

    pub fn ops(&self) -> &[(bool, bool)] {
        &self.ops
    }

    pub fn n_vertices(&self) -> usize {
        self.ops.len()
    }

    pub fn x(&self, v: usize) -> bool {
        self.ops[v].0
    }

    pub fn z(&self, v: usize) -> bool {
        self.ops[v].1
    }

    pub fn is_identity(&self) -> bool {
        self.ops.iter().all(|&(x, z)| !x && !z)
    }

    /// The plan as a Pauli string on the data register, up to phase.
    pub fn to_pauli(&self) -> PauliString {
        let (x, z) = self.ops.iter().enumerate().fold((0u64, 0u64), |(x, z), (v, &(a, b))| {
            (x | ((a as u64) << v), z | ((b as u64) << v))
        });
        PauliString::from_bits(self.ops.len(), x, z, false)
    }

    /// Human-readable form such as `B:X D:XZ`, or `I` for the identity.
    pub fn describe(&self, graph: &Graph) -> String {
        let parts: Vec<String> = self
            .ops
            .iter()
            .enumerate()
            .filter(|(_, &(x, z))| x || z)
            .map(|(v, &(x, z))| {
                format!("{}:{}{}", graph.vertices()[v], if x { "X" } else { "" }, if z { "Z" } else { "" })
            })
            .collect();
        if parts.is_empty() {
            "I".into()
        } else {
            parts.join(" ")
        }
    }
}

/// Which correction formula to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrectionKind {
    /// `C_v = Z^{g_v}` on any connected graph.
    Universal,
    /// Four-vertex path formula.
    L4,
    /// Four-cycle formula.
    C4,
    /// Tree formula with a reference leaf.
    Tree,
}

impl CorrectionKind {
    pub const ALL: [CorrectionKind; 4] =
        [CorrectionKind::Universal, CorrectionKind::L4, CorrectionKind::C4, CorrectionKind::Tree];

    pub fn as_str(&self) -> &'static str {
        match self {
            CorrectionKind::Universal => "universal",
            CorrectionKind::L4 => "l4",
            CorrectionKind::C4 => "c4",
            CorrectionKind::Tree => "tree",
        }
    }

    pub fn check_applicable(&self, graph: &Graph) -> Result<()> {
        match self {
            CorrectionKind::Universal => Ok(()),
            CorrectionKind::L4 => require_named(graph, "P4", "l4"),
            CorrectionKind::C4 => require_named(graph, "C4", "c4"),
            CorrectionKind::Tree => {
                if graph.is_tree() && graph.n_edges() > 0 {
                    Ok(())
                } else {
                    arg("tree correction needs a tree with at least one edge")
                }
            }
        }
    }

    pub fn plan(&self, graph: &Graph, outcome: &Outcome) -> Result<CorrectionPlan> {
        match self {
            CorrectionKind::Universal => universal_correction(graph, outcome),
            CorrectionKind::L4 => l4_correction(graph, outcome),
            CorrectionKind::C4 => c4_correction(graph, outcome),
            CorrectionKind::Tree => tree_correction(graph, outcome, None),
        }
    }
}

impl fmt::Display for CorrectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CorrectionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CorrectionKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Parse(format!("unknown correction {s:?} (universal, l4, c4, tree)")))
    }
}

fn require_named(graph: &Graph, name: &str, kind: &str) -> Result<()> {
    let reference = catalog_lookup(name)?;
    if graph.same_labelled_graph(&reference) {
        Ok(())
    } else {
        arg(format!(
            "{kind} correction applies only to {name} labelled {}",
            reference.to_edge_list().trim().replace('\n', ", ")
        ))
    }
}

fn check_outcome(graph: &Graph, outcome: &Outcome) -> Result<()> {
    if outcome.len() != 2 * graph.n_edges() {
        return arg(format!(
            "outcome has {} bits, graph needs {}",
            outcome.len(),
            2 * graph.n_edges()
        ));
    }
    Ok(())
}

/// `C_v = Z^{g_v}` with `g_v` the XOR of far-side outcomes at `v`.
pub fn universal_correction(graph: &Graph, outcome: &Outcome) -> Result<CorrectionPlan> {
    check_outcome(graph, outcome)?;
    Ok(CorrectionPlan {
        ops: (0..graph.n_vertices())
            .map(|v| (false, far_parity(graph, outcome, v)))
            .collect(),
    })
}

/// Path `A-B-C-D`: A: I, B: X^{s2}, C: X^{s1⊕s4}, D: X^{s2⊕s3⊕s6} Z^{s1⊕s4⊕s5}.
pub fn l4_correction(graph: &Graph, outcome: &Outcome) -> Result<CorrectionPlan> {
    require_named(graph, "P4", "l4")?;
    check_outcome(graph, outcome)?;
    let s = |at: &str, other: &str| outcome.by_label(graph, at, other);
    let (s1, s2) = (s("A", "B")?, s("B", "A")?);
    let (s3, s4) = (s("B", "C")?, s("C", "B")?);
    let (s5, s6) = (s("C", "D")?, s("D", "C")?);
    let mut plan = CorrectionPlan::identity(4);
    let at = |l: &str| graph.vertex_index(l).unwrap();
    plan.ops[at("B")] = (s2, false);
    plan.ops[at("C")] = (s1 ^ s4, false);
    plan.ops[at("D")] = (s2 ^ s3 ^ s6, s1 ^ s4 ^ s5);
    Ok(plan)
}

/// Cycle `A-B-C-D-A`: A, B: I;
/// C: X^{s1⊕s4} Z^{s2⊕s3⊕s6⊕s7}; D: X^{s2⊕s7} Z^{s1⊕s4⊕s5⊕s8}.
pub fn c4_correction(graph: &Graph, outcome: &Outcome) -> Result<CorrectionPlan> {
    require_named(graph, "C4", "c4")?;
    check_outcome(graph, outcome)?;
    let s = |at: &str, other: &str| outcome.by_label(graph, at, other);
    let (s1, s2) = (s("A", "B")?, s("B", "A")?);
    let (s3, s4) = (s("B", "C")?, s("C", "B")?);
    let (s5, s6) = (s("C", "D")?, s("D", "C")?);
    let (s7, s8) = (s("D", "A")?, s("A", "D")?);
    let mut plan = CorrectionPlan::identity(4);
    let at = |l: &str| graph.vertex_index(l).unwrap();
    plan.ops[at("C")] = (s1 ^ s4, s2 ^ s3 ^ s6 ^ s7);
    plan.ops[at("D")] = (s2 ^ s7, s1 ^ s4 ^ s5 ^ s8);
    Ok(plan)
}

/// Default reference vertex for trees: the leaf with the smallest label.
pub fn default_reference(graph: &Graph) -> Option<usize> {
    graph
        .leaves()
        .into_iter()
        .min_by(|&a, &b| graph.vertices()[a].cmp(&graph.vertices()[b]))
}

fn check_tree_reference(graph: &Graph, reference: Option<usize>) -> Result<usize> {
    if !graph.is_tree() || graph.n_edges() == 0 {
        return arg("tree correction needs a tree with at least one edge");
    }
    let r = reference.or_else(|| default_reference(graph)).unwrap();
    if r >= graph.n_vertices() || graph.degree(r) != 1 {
        return arg(format!("reference vertex {r} is not a leaf"));
    }
    Ok(r)
}

/// Tree correction with the reference leaf left untouched.
///
/// Each vertex receives `X^{x_v} Z^{z_v}` where the X exponents are pushed out
/// from the reference leaf along the tree so that the Z part vanishes on the
/// reference and on every internal vertex; a vertex with several children
/// passes its parity to the first child in edge order. The resulting plan is
/// `∏ Z_v^{g_v}` times the stabilizer element `∏ K_v^{x_v}`. On the path
/// `A-B-C-D` with reference `A` it coincides with [`l4_correction`].
pub fn tree_correction(graph: &Graph, outcome: &Outcome, reference: Option<usize>) -> Result<CorrectionPlan> {
    let root = check_tree_reference(graph, reference)?;
    check_outcome(graph, outcome)?;
    let n = graph.n_vertices();
    let g: Vec<bool> = (0..n).map(|v| far_parity(graph, outcome, v)).collect();
    let mut x = vec![false; n];
    let mut parent = vec![usize::MAX; n];
    let mut visited = vec![false; n];
    visited[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        let children: Vec<usize> = graph.neighbors(u).filter(|&w| !visited[w]).collect();
        if let Some(&first) = children.first() {
            // Clear the Z part at u: g_u ⊕ x_parent ⊕ Σ x_children = 0.
            let inherited = if u == root { false } else { x[parent[u]] };
            x[first] = g[u] ^ inherited;
        }
        for w in children {
            visited[w] = true;
            parent[w] = u;
            queue.push_back(w);
        }
    }
    let ops = (0..n)
        .map(|v| {
            let z = graph.neighbors(v).fold(g[v], |acc, w| acc ^ x[w]);
            (x[v], z)
        })
        .collect();
    Ok(CorrectionPlan { ops })
}

/// `C_v = X^{f_v} Z^{g_v}` with `f_v`, `g_v` the near- and far-side parities
/// at `v`, and identity on the reference leaf, taken term by term.
///
/// This reading does not restore the graph state on every outcome; it is kept
/// so that the discrepancy can be demonstrated. Use [`tree_correction`].
pub fn tree_correction_literal(
    graph: &Graph,
    outcome: &Outcome,
    reference: Option<usize>,
) -> Result<CorrectionPlan> {
    let root = check_tree_reference(graph, reference)?;
    check_outcome(graph, outcome)?;
    let ops = (0..graph.n_vertices())
        .map(|v| {
            if v == root {
                (false, false)
            } else {
                (near_parity(graph, outcome, v), far_parity(graph, outcome, v))
            }
        })
        .collect();
    Ok(CorrectionPlan { ops })
}

/// Apply `Z^{z_v}` then `X^{x_v}` to the data qubit of every vertex.
pub fn apply_correction(state: &StateVector, plan: &CorrectionPlan, layout: &Layout) -> Result<StateVector> {
    if plan.n_vertices() != layout.n_data() {
        return arg(format!(
            "plan covers {} vertices, layout has {}",
            plan.n_vertices(),
            layout.n_data()
        ));
    }
    let mut out = state.clone();
    for (v, &(x, z)) in plan.ops.iter().enumerate() {
        let q = layout.data_index(v);
        if z {
            out.apply(Gate::Z(q))?;
        }
        if x {
            out.apply(Gate::X(q))?;
        }
    }
    Ok(out)
}

/// True iff `plan_a · plan_b` lies in ±Stab(|G⟩), so both plans restore the
/// same state up to a global phase.
pub fn plans_equivalent(plan_a: &CorrectionPlan, plan_b: &CorrectionPlan, graph: &Graph) -> Result<bool> {
    if plan_a.n_vertices() != graph.n_vertices() || plan_b.n_vertices() != graph.n_vertices() {
        return arg("plans and graph cover different vertex sets");
    }
    let product = plan_a.to_pauli().mul(&plan_b.to_pauli()).unsigned();
    if product.is_identity() {
        return Ok(true);
    }
    let stab = crate::graphs::stabilizer_generators(graph)?;
    Ok(stab.extract_sign(&product) != Membership::Absent)
}

/// The Lemma-1 primitive on three qubits `(d, r, r')`: `d` in |+⟩, `(r, r')`
/// in `CZ|++⟩`, then `CZ(d, r)`, `H(r)` and a measurement of `r` with result
/// `s`. Returns the outcome probability and the state of `(d, r')`, with `d`
/// as qubit 0.
pub fn byproduct_step(s: bool) -> Result<(f64, StateVector)> {
    let mut state = StateVector::plus(3)?;
    state.apply_all(&[Gate::Cz(1, 2), Gate::Cz(0, 1), Gate::H(1)])?;
    let (p, post) = state.measure_project(1, s)?;
    let amps = post.amplitudes();
    let reduced: Vec<_> = (0..4)
        .map(|i| {
            let (d, rp) = (i & 1, i >> 1);
            amps[d | ((s as usize) << 1) | (rp << 2)]
        })
        .collect();
    Ok((p, StateVector::from_amplitudes(reduced)?))
}

/// The protocol state just before the resource measurements.
#[derive(Debug, Clone)]
pub struct PreparedProtocol {
    layout: Layout,
    state: StateVector,
}

impl PreparedProtocol {
    pub fn new(graph: &Graph) -> Result<Self> {
        let layout = Layout::new(graph);
        let mut state = StateVector::zero(layout.total_qubits())?;
        state.apply_all(&layout.preparation_gates())?;
        state.apply_all(&layout.walk_gates())?;
        Ok(Self { layout, state })
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    /// Joint probability of `outcome` and the normalized data-qubit state.
    pub fn project(&self, outcome: &Outcome) -> Result<(f64, StateVector)> {
        if outcome.len() != self.layout.n_resources() {
            return arg("outcome length does not match the layout");
        }
        let slice = self.state.slice_low(self.layout.n_data(), outcome.resource_pattern());
        let p: f64 = slice.iter().map(|a| a.norm_sqr()).sum();
        if p <= 1e-14 {
            return Err(Error::ZeroProbability {
                qubit: self.layout.n_data(),
                outcome: outcome.bits().first().copied().unwrap_or(false),
            });
        }
        let k = 1.0 / p.sqrt();
        let amps = slice.iter().map(|a| a * k).collect();
        Ok((p, StateVector::from_raw(self.layout.n_data(), amps)))
    }
}

/// Run steps 1-3 on the dense engine and measure every resource qubit onto
/// `outcome` in turn. Returns the joint probability and the data-qubit state.
pub fn run_protocol(graph: &Graph, outcome: &Outcome) -> Result<(f64, StateVector)> {
    check_outcome(graph, outcome)?;
    let layout = Layout::new(graph);
    let mut state = StateVector::zero(layout.total_qubits())?;
    state.apply_all(&layout.preparation_gates())?;
    state.apply_all(&layout.walk_gates())?;
    let mut probability = 1.0;
    for (j, &bit) in outcome.bits().iter().enumerate() {
        let (p, post) = state.measure_project(layout.n_data() + j, bit)?;
        probability *= p;
        state = post;
    }
    let data = state.discard_high(layout.n_data(), outcome.resource_pattern())?;
    Ok((probability, data))
}

/// Symbolic mirror of [`run_protocol`]: the data-qubit stabilizer group after
/// the resource qubits are measured onto `outcome` and discarded.
pub fn run_protocol_tableau(graph: &Graph, outcome: &Outcome) -> Result<Tableau> {
    check_outcome(graph, outcome)?;
    let layout = Layout::new(graph);
    let mut t = Tableau::zero(layout.total_qubits())?;
    t.apply_all(&layout.preparation_gates())?;
    t.apply_all(&layout.walk_gates())?;
    for (j, &bit) in outcome.bits().iter().enumerate() {
        t.measure_z(layout.n_data() + j, bit)?;
    }
    let data: Vec<usize> = (0..layout.n_data()).collect();
    t.restrict(&data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{graph_state, stabilizer_generators};
    use crate::stabilizer::check_stabilizes;
    use crate::statevector::fidelity;

    fn p4() -> Graph {
        catalog_lookup("P4").unwrap()
    }

    /// Outcome with only the listed 1-based labels set.
    fn labels(graph: &Graph, ones: &[usize]) -> Outcome {
        let mut bits = vec![false; 2 * graph.n_edges()];
        for &k in ones {
            bits[k - 1] = true;
        }
        Outcome::from_bits(graph, bits).unwrap()
    }

    #[test]
    fn layout_sizes() {
        assert_eq!(Layout::new(&p4()).total_qubits(), 10);
        assert_eq!(Layout::new(&catalog_lookup("C4").unwrap()).total_qubits(), 12);
        assert_eq!(Layout::new(&catalog_lookup("K4").unwrap()).total_qubits(), 16);
        let l = Layout::new(&p4());
        assert_eq!(l.resource_index(0, 0), Some(4));
        assert_eq!(l.resource_index(0, 1), Some(5));
        assert_eq!(l.resource_index(2, 3), Some(9));
        assert_eq!(l.resource_index(2, 0), None);
    }

    #[test]
    fn outcome_index_is_big_endian() {
        let g = p4();
        let o = Outcome::from_index(&g, 0b100000).unwrap();
        assert!(o.bits()[0]);
        assert_eq!(o.to_string(), "100000");
        assert_eq!(o.index(), 32);
        assert_eq!(o.resource_pattern(), 1);
        assert!(Outcome::from_index(&g, 64).is_err());
        assert_eq!(Outcome::parse(&g, "010000").unwrap(), labels(&g, &[2]));
        assert!(Outcome::parse(&g, "0100").is_err());
    }

    #[test]
    fn near_and_far() {
        let g = p4();
        let o = labels(&g, &[3]); // BC@B
        assert_eq!(o.near(&g, 1, 1), Some(true));
        assert_eq!(o.far(&g, 1, 2), Some(true));
        assert_eq!(o.far(&g, 1, 1), Some(false));
        assert_eq!(o.near(&g, 1, 0), None);
        assert!(o.by_label(&g, "B", "C").unwrap());
        assert!(!o.by_label(&g, "C", "B").unwrap());
    }

    #[test]
    fn byproduct_outcomes() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let phi = StateVector::from_amplitudes(vec![r.into(), 0.0.into(), 0.0.into(), r.into()]).unwrap();
        let (p0, s0) = byproduct_step(false).unwrap();
        assert!((p0 - 0.5).abs() < 1e-12);
        assert!((fidelity(&s0, &phi).unwrap() - 1.0).abs() < 1e-12);
        let (p1, s1) = byproduct_step(true).unwrap();
        assert!((p1 - 0.5).abs() < 1e-12);
        let flipped = phi.with(Gate::X(0)).unwrap();
        assert!((fidelity(&s1, &flipped).unwrap() - 1.0).abs() < 1e-12);
        // (|10⟩+|01⟩)/√2 with d as qubit 0: indices 1 and 2.
        assert!((s1.amplitudes()[1].norm() - r).abs() < 1e-12);
        assert!((s1.amplitudes()[2].norm() - r).abs() < 1e-12);
        assert!(fidelity(&s0, &s1).unwrap() < 1e-12);
    }

    #[test]
    fn all_zero_outcome_needs_no_correction() {
        let g = p4();
        let (p, s) = run_protocol(&g, &Outcome::zeros(&g)).unwrap();
        assert!((p - 1.0 / 64.0).abs() < 1e-12);
        assert!((fidelity(&s, &graph_state(&g).unwrap()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uncorrected_s2_is_wrong() {
        let g = p4();
        let (_, s) = run_protocol(&g, &labels(&g, &[2])).unwrap();
        assert!(fidelity(&s, &graph_state(&g).unwrap()).unwrap() < 1.0 - 1e-6);
    }

    #[test]
    fn sequential_and_sliced_projection_agree() {
        let g = catalog_lookup("paw").unwrap();
        let prepared = PreparedProtocol::new(&g).unwrap();
        for idx in [0u64, 5, 77, 255] {
            let o = Outcome::from_index(&g, idx).unwrap();
            let (pa, sa) = run_protocol(&g, &o).unwrap();
            let (pb, sb) = prepared.project(&o).unwrap();
            assert!((pa - pb).abs() < 1e-14);
            assert!((fidelity(&sa, &sb).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn universal_examples() {
        let g = p4();
        assert!(universal_correction(&g, &Outcome::zeros(&g)).unwrap().is_identity());
        let plan = universal_correction(&g, &labels(&g, &[4])).unwrap();
        assert_eq!(plan.describe(&g), "B:Z");
        let c4 = catalog_lookup("C4").unwrap();
        let plan = universal_correction(&c4, &labels(&c4, &[1])).unwrap();
        assert_eq!(plan.describe(&c4), "B:Z");
    }

    #[test]
    fn l4_examples() {
        let g = p4();
        assert!(l4_correction(&g, &Outcome::zeros(&g)).unwrap().is_identity());
        assert_eq!(l4_correction(&g, &labels(&g, &[2])).unwrap().describe(&g), "B:X D:X");
        assert_eq!(l4_correction(&g, &labels(&g, &[5])).unwrap().describe(&g), "D:Z");
        let c4 = catalog_lookup("C4").unwrap();
        assert!(matches!(l4_correction(&c4, &Outcome::zeros(&c4)), Err(Error::Argument(_))));
    }

    #[test]
    fn c4_examples() {
        let g = catalog_lookup("C4").unwrap();
        assert!(c4_correction(&g, &Outcome::zeros(&g)).unwrap().is_identity());
        assert_eq!(c4_correction(&g, &labels(&g, &[1])).unwrap().describe(&g), "C:X D:Z");
        assert!(c4_correction(&p4(), &Outcome::zeros(&p4())).is_err());
    }

    #[test]
    fn tree_on_path_matches_l4() {
        let g = p4();
        for idx in 0..64 {
            let o = Outcome::from_index(&g, idx).unwrap();
            assert_eq!(tree_correction(&g, &o, None).unwrap(), l4_correction(&g, &o).unwrap());
        }
    }

    #[test]
    fn tree_single_edge_inverts_byproduct() {
        let g = Graph::new(&["u", "v"], &[("u", "v")]).unwrap();
        for (s, t) in [(false, false), (false, true), (true, false), (true, true)] {
            // bits: (u-side, v-side); near(v) = v-side = s, far(v) = u-side = t.
            let o = Outcome::from_bits(&g, vec![t, s]).unwrap();
            let plan = tree_correction(&g, &o, Some(0)).unwrap();
            assert_eq!(plan.ops(), &[(false, false), (s, t)]);
            assert_eq!(tree_correction_literal(&g, &o, Some(0)).unwrap(), plan);
            let (_, state) = run_protocol(&g, &o).unwrap();
            let fixed = apply_correction(&state, &plan, &Layout::new(&g)).unwrap();
            assert!((fidelity(&fixed, &graph_state(&g).unwrap()).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tree_rejects_bad_input() {
        let c4 = catalog_lookup("C4").unwrap();
        assert!(tree_correction(&c4, &Outcome::zeros(&c4), None).is_err());
        let g = p4();
        assert!(tree_correction(&g, &Outcome::zeros(&g), Some(1)).is_err());
        assert!(tree_correction(&g, &Outcome::zeros(&g), None).unwrap().is_identity());
    }

    #[test]
    fn literal_tree_reading_fails_on_the_path() {
        let g = p4();
        let target = graph_state(&g).unwrap();
        let layout = Layout::new(&g);
        let failures = (0..64)
            .filter(|&idx| {
                let o = Outcome::from_index(&g, idx).unwrap();
                let (_, s) = run_protocol(&g, &o).unwrap();
                let plan = tree_correction_literal(&g, &o, None).unwrap();
                let f = fidelity(&apply_correction(&s, &plan, &layout).unwrap(), &target).unwrap();
                f < 1.0 - 1e-12
            })
            .count();
        assert!(failures > 0);
    }

    #[test]
    fn apply_correction_examples() {
        let g = p4();
        let layout = Layout::new(&g);
        let l4 = graph_state(&g).unwrap();
        let id = apply_correction(&l4, &CorrectionPlan::identity(4), &layout).unwrap();
        assert!((fidelity(&id, &l4).unwrap() - 1.0).abs() < 1e-15);
        let plan = CorrectionPlan::from_ops(vec![(false, false), (false, true), (false, false), (false, false)]);
        let once = apply_correction(&l4, &plan, &layout).unwrap();
        assert!(fidelity(&once, &l4).unwrap() < 1e-12);
        let twice = apply_correction(&once, &plan, &layout).unwrap();
        assert!((fidelity(&twice, &l4).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn plans_equivalent_examples() {
        let g = p4();
        let id = CorrectionPlan::identity(4);
        assert!(plans_equivalent(&id, &id, &g).unwrap());
        let xb = CorrectionPlan::from_ops(vec![(false, false), (true, false), (false, false), (false, false)]);
        assert!(!plans_equivalent(&id, &xb, &g).unwrap());
        // K_B = Z_A X_B Z_C
        let kb = CorrectionPlan::from_ops(vec![(false, true), (true, false), (false, true), (false, false)]);
        assert!(plans_equivalent(&id, &kb, &g).unwrap());
    }

    /// X_B alone against all 16 elements of Stab(|L4⟩).
    #[test]
    fn xb_not_in_stabilizer_group_by_enumeration() {
        let g = p4();
        let gens: Vec<PauliString> = (0..4).map(|v| g.stabilizer(v)).collect();
        let xb = PauliString::from_bits(4, 0b0010, 0, false);
        for mask in 0u32..16 {
            let elem = (0..4)
                .filter(|i| mask >> i & 1 == 1)
                .fold(PauliString::identity(4), |acc, i| acc.mul(&gens[i]));
            assert!(elem.x_bits() != xb.x_bits() || elem.z_bits() != xb.z_bits());
        }
    }

    #[test]
    fn tableau_all_zero_outcome_gives_plus_generators() {
        for name in ["P3", "C4", "bull"] {
            let g = catalog_lookup(name).unwrap();
            let t = run_protocol_tableau(&g, &Outcome::zeros(&g)).unwrap();
            for v in 0..g.n_vertices() {
                assert_eq!(t.extract_sign(&g.stabilizer(v)), Membership::Plus, "{name}");
            }
        }
    }

    #[test]
    fn tableau_matches_dense_state() {
        for name in ["P3", "P4", "K1_3", "C3", "paw"] {
            let g = catalog_lookup(name).unwrap();
            for idx in (0..g.outcome_count()).step_by(7) {
                let o = Outcome::from_index(&g, idx).unwrap();
                let t = run_protocol_tableau(&g, &o).unwrap();
                let (_, s) = run_protocol(&g, &o).unwrap();
                assert!(check_stabilizes(&s, &t).unwrap(), "{name} {o}");
            }
        }
    }

    #[test]
    fn shift_operator_topology() {
        // CNOT|+0⟩: XX and ZZ.
        let mut cnot = Tableau::zero(2).unwrap();
        cnot.apply_all(&[Gate::H(0), Gate::Cnot(0, 1)]).unwrap();
        // CZ|++⟩: XZ and ZX.
        let mut cz = Tableau::plus(2).unwrap();
        cz.apply(Gate::Cz(0, 1)).unwrap();
        let p = |s: &str| PauliString::parse(s).unwrap();
        assert_eq!(cnot.extract_sign(&p("XX")), Membership::Plus);
        assert_eq!(cnot.extract_sign(&p("ZZ")), Membership::Plus);
        assert_eq!(cnot.extract_sign(&p("XZ")), Membership::Absent);
        assert_eq!(cz.extract_sign(&p("XZ")), Membership::Plus);
        assert_eq!(cz.extract_sign(&p("ZX")), Membership::Plus);
        assert_eq!(cz.extract_sign(&p("ZZ")), Membership::Absent);
        let k2 = Graph::new(&["P", "C"], &[("P", "C")]).unwrap();
        assert_eq!(cz, stabilizer_generators(&k2).unwrap());
    }

    #[test]
    fn correction_kind_parsing() {
        assert_eq!("universal".parse::<CorrectionKind>().unwrap(), CorrectionKind::Universal);
        assert_eq!("L4".parse::<CorrectionKind>().unwrap(), CorrectionKind::L4);
        assert!("zx".parse::<CorrectionKind>().is_err());
        assert!(CorrectionKind::L4.check_applicable(&catalog_lookup("C4").unwrap()).is_err());
        assert!(CorrectionKind::Tree.check_applicable(&catalog_lookup("K1_4").unwrap()).is_ok());
    }
}
