//! Target graphs, the named-graph catalog and graph-state constructors.

use std::collections::{BTreeMap, VecDeque};
use std::sync::OnceLock;

use crate::error::{arg, Error, Result};
use crate::stabilizer::{PauliString, Tableau};
use crate::statevector::{Gate, StateVector};

/// A simple connected undirected graph with labelled vertices.
///
/// Vertex and edge order are significant: they fix the qubit layout and the
/// outcome bit order of the protocol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertices: Vec<String>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Build from labels and label pairs. Every edge endpoint must be listed in
    /// `vertices`.
    pub fn new<S: AsRef<str>>(vertices: &[S], edges: &[(S, S)]) -> Result<Self> {
        let vertices: Vec<String> = vertices.iter().map(|v| v.as_ref().to_string()).collect();
        let index: BTreeMap<&str, usize> =
            vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        if index.len() != vertices.len() {
            return arg("duplicate vertex label");
        }
        let mut idx_edges = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            let (u, v) = (u.as_ref(), v.as_ref());
            let (Some(&a), Some(&b)) = (index.get(u), index.get(v)) else {
                return arg(format!("edge {u}-{v} references an unknown vertex"));
            };
            idx_edges.push((a, b));
        }
        Self::from_indices(vertices, idx_edges)
    }

    /// Build from labels and index pairs.
    pub fn from_indices(vertices: Vec<String>, edges: Vec<(usize, usize)>) -> Result<Self> {
        if vertices.is_empty() {
            return arg("a graph needs at least one vertex");
        }
        if let Some(bad) = vertices.iter().find(|v| v.is_empty() || !v.chars().all(char::is_alphanumeric)) {
            return arg(format!("vertex label {bad:?} is not alphanumeric"));
        }
        let n = vertices.len();
        let mut seen = std::collections::BTreeSet::new();
        for &(a, b) in &edges {
            if a >= n || b >= n {
                return arg(format!("edge ({a},{b}) out of range"));
            }
            if a == b {
                return arg(format!("self-loop at {}", vertices[a]));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return arg(format!("duplicate edge {}-{}", vertices[a], vertices[b]));
            }
        }
        let g = Self { vertices, edges };
        if !g.is_connected() {
            return arg("graph is not connected");
        }
        Ok(g)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    /// Edges as index pairs, in their defining orientation.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_index(&self, label: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == label)
    }

    /// Index of the edge joining `u` and `v`, in either orientation.
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.edges
            .iter()
            .position(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u))
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter_map(move |&(a, b)| {
            if a == v {
                Some(b)
            } else if b == v {
                Some(a)
            } else {
                None
            }
        })
    }

    /// Indices of the edges incident to `v`.
    pub fn incident_edges(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, &(a, b))| a == v || b == v)
            .map(|(e, _)| e)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incident_edges(v).count()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for u in self.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Connected and acyclic.
    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.vertices.len()
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.n_vertices()).filter(|&v| self.degree(v) == 1).collect()
    }

    /// Number of protocol measurement outcomes, 4^|E|.
    pub fn outcome_count(&self) -> u64 {
        1u64 << (2 * self.edges.len())
    }

    /// Same vertex labels and the same undirected edge set, regardless of order
    /// and orientation.
    pub fn same_labelled_graph(&self, other: &Graph) -> bool {
        let edge_set = |g: &Graph| {
            let mut es: Vec<(String, String)> = g
                .edges
                .iter()
                .map(|&(a, b)| {
                    let (x, y) = (g.vertices[a].clone(), g.vertices[b].clone());
                    if x <= y {
                        (x, y)
                    } else {
                        (y, x)
                    }
                })
                .collect();
            es.sort();
            es
        };
        let mut va = self.vertices.clone();
        let mut vb = other.vertices.clone();
        va.sort();
        vb.sort();
        va == vb && edge_set(self) == edge_set(other)
    }

    /// Render as the edge-list text format.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for &(a, b) in &self.edges {
            out.push_str(&self.vertices[a]);
            out.push(' ');
            out.push_str(&self.vertices[b]);
            out.push('\n');
        }
        out
    }

    /// The stabilizer generator K_v = X_v ∏_{u~v} Z_u, on |V| qubits.
    pub fn stabilizer(&self, v: usize) -> PauliString {
        let z = self.neighbors(v).fold(0u64, |m, u| m | (1 << u));
        PauliString::from_bits(self.n_vertices(), 1 << v, z, false)
    }
}

/// Parse the edge-list text format: one `u v` pair per line. Blank lines and
/// lines starting with `#` are skipped. Vertices are ordered by first
/// appearance.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut vertices: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [u, v] = fields[..] else {
            return Err(Error::Parse(format!(
                "line {}: expected `u v`, got {line:?}",
                lineno + 1
            )));
        };
        let mut idx = |label: &str| {
            if let Some(i) = vertices.iter().position(|x| x == label) {
                i
            } else {
                vertices.push(label.to_string());
                vertices.len() - 1
            }
        };
        let (a, b) = (idx(u), idx(v));
        edges.push((a, b));
    }
    if edges.is_empty() {
        return Err(Error::Parse("edge list is empty".into()));
    }
    Graph::from_indices(vertices, edges)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatalogGroup {
    /// Member of the 18-graph universal-correction suite.
    Table2,
    Extra,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub group: CatalogGroup,
    pub graph: Graph,
    pub expected_outcome_count: u64,
}

const CATALOG_TEXT: &str = include_str!("../data/catalog_v1.txt");

/// Names that resolve to another catalog entry.
const ALIASES: &[(&str, &str)] = &[("GHZ4", "K1_3"), ("L4", "P4")];

/// Graphs of the topology-specific comparison suite, in report order.
pub const TABLE3_NAMES: &[&str] = &["P4", "P5", "K1_3", "K1_4", "C4", "C5", "K4", "bull"];

fn parse_catalog(text: &str) -> Result<Vec<CatalogEntry>> {
    let mut out = Vec::new();
    for line in text.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let (Some(name), Some(group)) = (fields.next(), fields.next()) else {
            return Err(Error::Parse(format!("catalog line {line:?}")));
        };
        let group = match group {
            "table2" => CatalogGroup::Table2,
            "extra" => CatalogGroup::Extra,
            g => return Err(Error::Parse(format!("catalog group {g:?}"))),
        };
        let mut list = String::new();
        for e in fields {
            let (u, v) = e
                .split_once('-')
                .ok_or_else(|| Error::Parse(format!("catalog edge {e:?}")))?;
            list.push_str(&format!("{u} {v}\n"));
        }
        let graph = parse_edge_list(&list)?;
        let expected_outcome_count = 4u64.pow(graph.n_edges() as u32);
        out.push(CatalogEntry { name: name.to_string(), group, graph, expected_outcome_count });
    }
    Ok(out)
}

/// The full catalog in file order.
pub fn catalog() -> &'static [CatalogEntry] {
    static CATALOG: OnceLock<Vec<CatalogEntry>> = OnceLock::new();
    CATALOG.get_or_init(|| parse_catalog(CATALOG_TEXT).expect("bundled catalog is well formed"))
}

/// The 18-graph universal-correction suite, in suite order.
pub fn table2_suite() -> impl Iterator<Item = &'static CatalogEntry> {
    catalog().iter().filter(|e| e.group == CatalogGroup::Table2)
}

pub fn catalog_entry(name: &str) -> Result<&'static CatalogEntry> {
    let resolved = ALIASES
        .iter()
        .find(|(alias, _)| *alias == name)
        .map_or(name, |(_, target)| target);
    catalog().iter().find(|e| e.name == resolved).ok_or_else(|| {
        let mut valid: Vec<&str> = catalog().iter().map(|e| e.name.as_str()).collect();
        valid.extend(ALIASES.iter().map(|(a, _)| *a));
        Error::UnknownGraph { name: name.to_string(), valid: valid.join(", ") }
    })
}

/// Look up a named graph (catalog names and aliases).
pub fn catalog_lookup(name: &str) -> Result<Graph> {
    catalog_entry(name).map(|e| e.graph.clone())
}

/// |G⟩ = ∏_{(u,v)∈E} CZ_uv |+⟩^⊗|V|, qubit i = vertex i.
pub fn graph_state(graph: &Graph) -> Result<StateVector> {
    let mut s = StateVector::plus(graph.n_vertices())?;
    for &(a, b) in graph.edges() {
        s.apply(Gate::Cz(a, b))?;
    }
    Ok(s)
}

/// One generator K_v per vertex.
pub fn stabilizer_generators(graph: &Graph) -> Result<Tableau> {
    let gens = (0..graph.n_vertices()).map(|v| graph.stabilizer(v)).collect();
    Tableau::from_generators(graph.n_vertices(), gens)
}

/// (|0...0⟩ + |1...1⟩)/√2.
pub fn ghz_state(n: usize) -> Result<StateVector> {
    let mut s = StateVector::zero(n)?;
    s.apply(Gate::H(0))?;
    for q in 1..n {
        s.apply(Gate::Cnot(0, q))?;
    }
    Ok(s)
}

/// GHZ on `n` qubits obtained from the star graph state with hub 0 by
/// Hadamards on every leaf.
pub fn ghz_from_star(n: usize) -> Result<StateVector> {
    if n < 2 {
        return arg("a star needs at least two vertices");
    }
    let labels: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let star = Graph::from_indices(labels, (1..n).map(|l| (0, l)).collect())?;
    let mut s = graph_state(&star)?;
    for leaf in 1..n {
        s.apply(Gate::H(leaf))?;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stabilizer::{check_stabilizes, Membership};
    use crate::statevector::fidelity;

    #[test]
    fn p4_and_c4_edge_lists() {
        let p4 = catalog_lookup("P4").unwrap();
        assert_eq!(p4.vertices(), &["A", "B", "C", "D"]);
        assert_eq!(p4.to_edge_list(), "A B\nB C\nC D\n");
        let c4 = catalog_lookup("C4").unwrap();
        assert_eq!(c4.to_edge_list(), "A B\nB C\nC D\nD A\n");
    }

    #[test]
    fn outcome_counts_are_four_to_the_edges() {
        for e in catalog() {
            assert_eq!(e.expected_outcome_count, 1u64 << (2 * e.graph.n_edges()), "{}", e.name);
        }
        let k3 = catalog_entry("K3").unwrap();
        assert_eq!(k3.graph.n_vertices(), 3);
        assert_eq!(k3.graph.n_edges(), 3);
        assert_eq!(k3.expected_outcome_count, 64);
    }

    #[test]
    fn suite_has_eighteen_graphs() {
        let names: Vec<&str> = table2_suite().map(|e| e.name.as_str()).collect();
        assert_eq!(names.len(), 18);
        assert_eq!(names[0], "P3");
        assert_eq!(names[17], "fork");
        for name in TABLE3_NAMES {
            assert!(catalog_entry(name).is_ok());
        }
    }

    #[test]
    fn catalog_shapes() {
        let trees = ["P3", "P4", "P5", "K1_2", "K1_3", "K1_4", "spider", "fork"];
        for e in catalog() {
            assert_eq!(e.graph.is_tree(), trees.contains(&e.name.as_str()), "{}", e.name);
        }
        let degrees = |n: &str| {
            let g = catalog_lookup(n).unwrap();
            let mut d: Vec<usize> = (0..g.n_vertices()).map(|v| g.degree(v)).collect();
            d.sort();
            d
        };
        assert_eq!(degrees("diamond"), [2, 2, 3, 3]);
        assert_eq!(degrees("paw"), [1, 2, 2, 3]);
        assert_eq!(degrees("bull"), [1, 1, 2, 3, 3]);
        assert_eq!(degrees("house"), [2, 2, 2, 3, 3]);
        assert_eq!(degrees("cricket"), [1, 1, 2, 2, 4]);
        assert_eq!(degrees("kite"), [1, 2, 3, 3, 3]);
        assert_eq!(degrees("fork"), [1, 1, 1, 2, 3]);
        assert_eq!(degrees("K4"), [3, 3, 3, 3]);
    }

    #[test]
    fn unknown_name_lists_valid_names() {
        match catalog_lookup("Petersen") {
            Err(Error::UnknownGraph { valid, .. }) => {
                assert!(valid.contains("P4") && valid.contains("GHZ4"));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(catalog_lookup("GHZ4").unwrap(), catalog_lookup("K1_3").unwrap());
    }

    #[test]
    fn k2_graph_state() {
        let g = Graph::new(&["P", "C"], &[("P", "C")]).unwrap();
        let s = graph_state(&g).unwrap();
        let want = [0.5, 0.5, 0.5, -0.5];
        for (a, w) in s.amplitudes().iter().zip(want) {
            assert!((a.re - w).abs() < 1e-15);
        }
    }

    #[test]
    fn single_vertex_is_plus() {
        let g = Graph::new::<&str>(&["A"], &[]).unwrap();
        let s = graph_state(&g).unwrap();
        assert!((fidelity(&s, &StateVector::plus(1).unwrap()).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn l4_stabilizers() {
        let p4 = catalog_lookup("P4").unwrap();
        let t = stabilizer_generators(&p4).unwrap();
        let labels: Vec<String> = t.generators().iter().map(|g| g.to_string()).collect();
        assert_eq!(labels, ["+XZII", "+ZXZI", "+IZXZ", "+IIZX"]);
        assert!(check_stabilizes(&graph_state(&p4).unwrap(), &t).unwrap());
    }

    #[test]
    fn star_and_cycle_generators() {
        let star = catalog_lookup("K1_3").unwrap();
        assert_eq!(star.stabilizer(0).to_string(), "+XZZZ");
        let c4 = catalog_lookup("C4").unwrap();
        for v in 0..4 {
            let k = c4.stabilizer(v);
            assert_eq!(k.z_bits().count_ones(), 2);
            assert_eq!(k.x_bits(), 1 << v);
        }
    }

    #[test]
    fn every_catalog_state_is_stabilized() {
        for e in catalog() {
            let t = stabilizer_generators(&e.graph).unwrap();
            assert!(check_stabilizes(&graph_state(&e.graph).unwrap(), &t).unwrap(), "{}", e.name);
            for v in 0..e.graph.n_vertices() {
                assert_eq!(t.extract_sign(&e.graph.stabilizer(v)), Membership::Plus);
            }
        }
    }

    #[test]
    fn edge_order_does_not_matter() {
        let g = catalog_lookup("house").unwrap();
        let mut reversed = g.edges().to_vec();
        reversed.reverse();
        let flipped: Vec<(usize, usize)> = reversed.iter().map(|&(a, b)| (b, a)).collect();
        let h = Graph::from_indices(g.vertices().to_vec(), flipped).unwrap();
        assert!(g.same_labelled_graph(&h));
        let f = fidelity(&graph_state(&g).unwrap(), &graph_state(&h).unwrap()).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
        let tg = stabilizer_generators(&g).unwrap();
        for k in stabilizer_generators(&h).unwrap().generators() {
            assert_eq!(tg.extract_sign(k), Membership::Plus);
        }
    }

    #[test]
    fn ghz_constructors_agree() {
        let a = ghz_state(4).unwrap();
        let b = ghz_from_star(4).unwrap();
        assert!((fidelity(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        let amps = a.amplitudes();
        assert!((amps[0].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((amps[15].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn invalid_graphs() {
        assert!(Graph::new(&["A", "B"], &[("A", "A")]).is_err());
        assert!(Graph::new(&["A", "B"], &[("A", "B"), ("B", "A")]).is_err());
        assert!(Graph::new(&["A", "B", "C"], &[("A", "B")]).is_err());
        assert!(Graph::new(&["A", "B"], &[("A", "Q")]).is_err());
        assert!(Graph::new(&["A", "B-"], &[("A", "B-")]).is_err());
    }

    #[test]
    fn edge_list_parsing() {
        let g = parse_edge_list("# ring\nx y\n\ny z\nz x\n").unwrap();
        assert_eq!(g.vertices(), &["x", "y", "z"]);
        assert_eq!(g.n_edges(), 3);
        assert!(matches!(parse_edge_list("a b c\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_edge_list("\n"), Err(Error::Parse(_))));
        assert!(parse_edge_list("a b\nc d\n").is_err());
    }
}
