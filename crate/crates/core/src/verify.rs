//! Exhaustive verification over all measurement outcomes.
//!
//! Work is spread over outcomes with rayon; results are collected in outcome
//! order, so reports are identical across runs and thread counts.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{arg, Result};
use crate::graphs::{graph_state, Graph};
use crate::noise::{noisy_protocol_fidelity, ChannelKind, Insertion, NoiseChannel, NoiseReport};
use crate::protocol::{
    apply_correction, far_parity, run_protocol_tableau, CorrectionKind, Outcome, PreparedProtocol,
};
use crate::stabilizer::Membership;
use crate::statevector::{fidelity, schmidt_rank, Bipartition, StateVector, DEFAULT_SCHMIDT_TOL};

/// Minimum post-correction fidelity counted as exact.
pub const FIDELITY_TOL: f64 = 1e-12;

/// Maximum deviation of an outcome probability from 4^-|E|.
pub const PROBABILITY_TOL: f64 = 1e-12;

/// Outcome spaces up to this size are always checked exhaustively.
pub const EXHAUSTIVE_LIMIT: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub fidelity: f64,
    pub probability: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { fidelity: FIDELITY_TOL, probability: PROBABILITY_TOL }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeRecord {
    pub index: u64,
    pub outcome: String,
    pub probability: f64,
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub graph: String,
    pub correction: CorrectionKind,
    pub vertices: usize,
    pub edges: usize,
    pub outcome_count: u64,
    pub min_fidelity: f64,
    pub max_fidelity: f64,
    pub max_probability_deviation: f64,
    pub pass: bool,
    pub records: Vec<OutcomeRecord>,
}

pub fn verify_all_outcomes(name: &str, graph: &Graph, kind: CorrectionKind) -> Result<VerificationReport> {
    verify_with_tolerances(name, graph, kind, Tolerances::default())
}

/// Run the protocol on every outcome, apply the `kind` correction and compare
/// with the target graph state.
pub fn verify_with_tolerances(
    name: &str,
    graph: &Graph,
    kind: CorrectionKind,
    tol: Tolerances,
) -> Result<VerificationReport> {
    kind.check_applicable(graph)?;
    let prepared = PreparedProtocol::new(graph)?;
    let target = graph_state(graph)?;
    let count = graph.outcome_count();
    let expected_p = 1.0 / count as f64;

    let records: Vec<OutcomeRecord> = (0..count)
        .into_par_iter()
        .map(|index| {
            let outcome = Outcome::from_index(graph, index)?;
            let (probability, state) = prepared.project(&outcome)?;
            let plan = kind.plan(graph, &outcome)?;
            let corrected = apply_correction(&state, &plan, prepared.layout())?;
            Ok(OutcomeRecord {
                index,
                outcome: outcome.to_string(),
                probability,
                fidelity: fidelity(&corrected, &target)?,
            })
        })
        .collect::<Result<_>>()?;

    let min_fidelity = records.iter().map(|r| r.fidelity).fold(f64::INFINITY, f64::min);
    let max_fidelity = records.iter().map(|r| r.fidelity).fold(f64::NEG_INFINITY, f64::max);
    let max_probability_deviation = records
        .iter()
        .map(|r| (r.probability - expected_p).abs())
        .fold(0.0, f64::max);
    let pass = min_fidelity >= 1.0 - tol.fidelity && max_probability_deviation <= tol.probability;
    Ok(VerificationReport {
        graph: name.to_string(),
        correction: kind,
        vertices: graph.n_vertices(),
        edges: graph.n_edges(),
        outcome_count: count,
        min_fidelity,
        max_fidelity,
        max_probability_deviation,
        pass,
        records,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseLemmaReport {
    pub outcomes_checked: u64,
    pub exhaustive: bool,
    /// Outcome indices whose tracked signs disagree with the far-side parities.
    pub mismatches: Vec<u64>,
}

impl PhaseLemmaReport {
    pub fn holds(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// True iff the tracked data stabilizers carry the sign `(-1)^{g_v}` on `K_v`
/// for every vertex and every checked outcome.
fn signs_match(graph: &Graph, outcome: &Outcome) -> Result<bool> {
    let t = run_protocol_tableau(graph, outcome)?;
    Ok((0..graph.n_vertices()).all(|v| {
        let expected = if far_parity(graph, outcome, v) { Membership::Minus } else { Membership::Plus };
        t.extract_sign(&graph.stabilizer(v)) == expected
    }))
}

/// Check the sign law on `sample_count` random outcomes, plus every outcome
/// when there are at most [`EXHAUSTIVE_LIMIT`] of them.
pub fn phase_lemma_report<R: Rng + ?Sized>(
    graph: &Graph,
    sample_count: usize,
    rng: &mut R,
) -> Result<PhaseLemmaReport> {
    let count = graph.outcome_count();
    let exhaustive = count <= EXHAUSTIVE_LIMIT;
    let mut indices: Vec<u64> = if exhaustive { (0..count).collect() } else { Vec::new() };
    indices.extend((0..sample_count).map(|_| rng.random_range(0..count)));
    let verdicts: Vec<bool> = indices
        .par_iter()
        .map(|&i| signs_match(graph, &Outcome::from_index(graph, i)?))
        .collect::<Result<_>>()?;
    let mut mismatches: Vec<u64> = indices
        .iter()
        .zip(&verdicts)
        .filter(|(_, &ok)| !ok)
        .map(|(&i, _)| i)
        .collect();
    mismatches.sort_unstable();
    mismatches.dedup();
    Ok(PhaseLemmaReport { outcomes_checked: indices.len() as u64, exhaustive, mismatches })
}

pub fn phase_lemma_check<R: Rng + ?Sized>(graph: &Graph, sample_count: usize, rng: &mut R) -> Result<bool> {
    Ok(phase_lemma_report(graph, sample_count, rng)?.holds())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutRanks {
    pub side_a: Vec<usize>,
    pub side_b: Vec<usize>,
    pub rank_a: usize,
    pub rank_b: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LcReport {
    pub cuts: Vec<CutRanks>,
    /// Some bipartition separates the two states by Schmidt rank.
    pub inequivalent: bool,
}

/// Schmidt ranks of both states across each bipartition. Differing ranks on
/// any cut rule out local-Clifford equivalence; equal ranks are inconclusive.
pub fn lc_check(a: &StateVector, b: &StateVector, cuts: &[Bipartition]) -> Result<LcReport> {
    if a.n_qubits() != b.n_qubits() {
        return arg(format!("states have {} and {} qubits", a.n_qubits(), b.n_qubits()));
    }
    let cuts = cuts
        .iter()
        .map(|cut| {
            Ok(CutRanks {
                side_a: cut.side_a().to_vec(),
                side_b: cut.side_b().to_vec(),
                rank_a: schmidt_rank(a, cut, DEFAULT_SCHMIDT_TOL)?,
                rank_b: schmidt_rank(b, cut, DEFAULT_SCHMIDT_TOL)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let inequivalent = cuts.iter().any(|c| c.rank_a != c.rank_b);
    Ok(LcReport { cuts, inequivalent })
}

/// Exact F*(p) at each grid point, with the closed form alongside where one
/// exists.
pub fn noise_sweep(
    name: &str,
    graph: &Graph,
    channel: ChannelKind,
    p_grid: &[f64],
    correction: CorrectionKind,
    insertion: Insertion,
) -> Result<NoiseReport> {
    let k = 2 * graph.n_edges();
    let fidelities = p_grid
        .iter()
        .map(|&p| noisy_protocol_fidelity(graph, &NoiseChannel::new(channel, p)?, correction, insertion))
        .collect::<Result<Vec<_>>>()?;
    let analytic = match channel {
        ChannelKind::AmplitudeDamping => None,
        kind => Some(p_grid.iter().map(|&p| kind.analytic(p, k).unwrap()).collect()),
    };
    Ok(NoiseReport {
        graph: name.to_string(),
        channel,
        correction,
        insertion,
        k,
        p_grid: p_grid.to_vec(),
        fidelities,
        analytic,
    })
}
