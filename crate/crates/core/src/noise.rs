//! Noisy-protocol fidelity by exact Kraus-branch enumeration, the closed-form
//! depolarizing and phase-damping curves, and the arithmetic used to
//! post-process hardware counts.
//!
//! The noisy fidelity is
//!
//! ```text
//! F*(p) = Σ_branches Σ_outcomes |⟨G| C_s Π_s K_branch |ψ⟩|²
//! ```
//!
//! where `K_branch` is a product of one Kraus operator per resource qubit,
//! `Π_s` projects the resource register onto outcome `s` and `C_s` is the
//! noiseless correction for `s`. The sum is over unnormalized branches, so
//! branch and outcome probabilities are included.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{arg, Error, Result};
use crate::graphs::{graph_state, Graph};
use crate::protocol::{CorrectionKind, CorrectionPlan, Layout, Outcome};
use crate::statevector::{inner_slices, Mat2, StateVector};

const KRAUS_ZERO: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Depolarizing,
    PhaseDamping,
    AmplitudeDamping,
}

impl ChannelKind {
    pub fn short_name(&self) -> &'static str {
        match self {
            ChannelKind::Depolarizing => "dep",
            ChannelKind::PhaseDamping => "pd",
            ChannelKind::AmplitudeDamping => "ad",
        }
    }

    /// Per-qubit product formula for `k` resource qubits, where one exists.
    pub fn analytic(&self, p: f64, k: usize) -> Option<f64> {
        match self {
            ChannelKind::Depolarizing => Some(f_star_dep(p, k)),
            ChannelKind::PhaseDamping => Some(f_star_pd(p, k)),
            ChannelKind::AmplitudeDamping => None,
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dep" | "depolarizing" | "depolarising" => Ok(ChannelKind::Depolarizing),
            "pd" | "phase_damping" | "phase-damping" => Ok(ChannelKind::PhaseDamping),
            "ad" | "amplitude_damping" | "amplitude-damping" => Ok(ChannelKind::AmplitudeDamping),
            _ => Err(Error::Parse(format!("unknown channel {s:?} (dep, pd, ad)"))),
        }
    }
}

/// A single-qubit channel with strength `p ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseChannel {
    pub kind: ChannelKind,
    pub p: f64,
}

impl NoiseChannel {
    pub fn new(kind: ChannelKind, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return arg(format!("channel strength {p} outside [0, 1]"));
        }
        Ok(Self { kind, p })
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Kraus operators of `channel`. Operators that vanish at this `p` are kept
/// (as zero matrices) so the list length depends only on the kind.
pub fn kraus_ops(channel: &NoiseChannel) -> Vec<Mat2> {
    let p = channel.p;
    let zero = c(0.0);
    match channel.kind {
        ChannelKind::Depolarizing => {
            let a = (1.0 - 0.75 * p).sqrt();
            let b = (p / 4.0).sqrt();
            let i = Complex64::new(0.0, b);
            vec![
                [[c(a), zero], [zero, c(a)]],
                [[zero, c(b)], [c(b), zero]],
                [[zero, -i], [i, zero]],
                [[c(b), zero], [zero, c(-b)]],
            ]
        }
        ChannelKind::PhaseDamping => vec![
            [[c(1.0), zero], [zero, c((1.0 - p).sqrt())]],
            [[zero, zero], [zero, c(p.sqrt())]],
        ],
        ChannelKind::AmplitudeDamping => vec![
            [[c(1.0), zero], [zero, c((1.0 - p).sqrt())]],
            [[zero, c(p.sqrt())], [zero, zero]],
        ],
    }
}

fn is_zero(m: &Mat2) -> bool {
    m.iter().flatten().all(|a| a.norm_sqr() < KRAUS_ZERO)
}

/// Σ K†K, which equals the identity for a trace-preserving channel.
pub fn kraus_completeness(ops: &[Mat2]) -> Mat2 {
    let mut out = [[c(0.0); 2]; 2];
    for k in ops {
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell += (0..2).map(|m| k[m][i].conj() * k[m][j]).sum::<Complex64>();
            }
        }
    }
    out
}

/// Choi matrix Σ_K vec(K) vec(K)†, with vec stacking rows.
pub fn choi_matrix(ops: &[Mat2]) -> [[Complex64; 4]; 4] {
    let mut out = [[c(0.0); 4]; 4];
    for k in ops {
        let v = [k[0][0], k[0][1], k[1][0], k[1][1]];
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] += v[i] * v[j].conj();
            }
        }
    }
    out
}

/// `(1 − 3p/4)^k`, the probability that none of `k` resource qubits is hit.
/// A lower bound on the exact F*; see [`exact_pauli_fidelity`].
pub fn f_star_dep(p: f64, k: usize) -> f64 {
    (1.0 - 0.75 * p).powi(k as i32)
}

/// `((1 + √(1−p))/2)^k`, the no-flip probability of the equivalent Z-flip
/// channel on `k` qubits. Exact only when every vertex has degree one.
pub fn f_star_pd(p: f64, k: usize) -> f64 {
    ((1.0 + (1.0 - p).sqrt()) / 2.0).powi(k as i32)
}

/// Exact F*(p) for the Pauli channels under the universal correction, from
/// error propagation rather than enumeration.
///
/// Before the walk, an X on `r_{e,a}` reaches the data register as `Z_a` and
/// a Z flips the bit that corrects the far endpoint. After the basis change
/// only X matters, and it flips the far correction. The output is `|G⟩` iff
/// every vertex collects an even number of hits, so F* is the probability of
/// that event. It exceeds the per-qubit product `(1 − 3p/4)^k` whenever two
/// hits can cancel on one vertex. Returns `None` for amplitude damping and
/// for graphs with more than 24 vertices.
pub fn exact_pauli_fidelity(graph: &Graph, kind: ChannelKind, p: f64, insertion: Insertion) -> Option<f64> {
    let degrees: Vec<usize> = (0..graph.n_vertices()).map(|v| graph.degree(v)).collect();
    let by_vertex = |lambda: f64| -> f64 {
        degrees.iter().map(|&d| (1.0 + lambda.powi(d as i32)) / 2.0).product()
    };
    match (kind, insertion) {
        (ChannelKind::AmplitudeDamping, _) => None,
        (ChannelKind::PhaseDamping, Insertion::PostPrep) => Some(by_vertex((1.0 - p).sqrt())),
        (ChannelKind::PhaseDamping, Insertion::PreMeasure) => Some(1.0),
        (ChannelKind::Depolarizing, Insertion::PreMeasure) => Some(by_vertex(1.0 - p)),
        (ChannelKind::Depolarizing, Insertion::PostPrep) => {
            // Both Paulis of a pair see the vertex subset T through the same
            // edge, so the character sum runs over subsets with a factor
            // (1 − p)² per edge touching T.
            let nv = graph.n_vertices();
            if nv > 24 {
                return None;
            }
            let terms: Vec<f64> = (0u32..1 << nv)
                .map(|t| {
                    let touched = graph.edges().iter().filter(|&&(a, b)| (t >> a | t >> b) & 1 == 1).count();
                    (1.0 - p).powi(2 * touched as i32)
                })
                .collect();
            Some(neumaier_sum(&terms) / (1u64 << nv) as f64)
        }
    }
}

/// Invert the depolarizing curve: `p = (4/3)(1 − F^{1/k})`.
pub fn extract_p_eff(fidelity: f64, k: usize) -> Result<f64> {
    if fidelity <= 0.0 || fidelity > 1.0 || fidelity.is_nan() {
        return arg(format!("fidelity {fidelity} outside (0, 1]"));
    }
    if k == 0 {
        return arg("need at least one resource qubit");
    }
    Ok(4.0 / 3.0 * (1.0 - fidelity.powf(1.0 / k as f64)))
}

/// `1 − exp(−duration/T1)`.
pub fn t1_damping_estimate(duration_us: f64, t1_us: f64) -> f64 {
    1.0 - (-duration_us / t1_us).exp()
}

/// Classical fidelity between measured counts and an ideal distribution:
/// `(Σ_x √(p̂_x q_x))²`, or the unsquared coefficient when `squared` is false.
pub fn bhattacharyya_fidelity(
    counts: &BTreeMap<String, u64>,
    ideal: &BTreeMap<String, f64>,
    squared: bool,
) -> Result<f64> {
    let total: u64 = counts.values().sum();
    if counts.is_empty() || total == 0 {
        return arg("counts are empty");
    }
    if ideal.values().any(|&q| q < 0.0 || !q.is_finite()) {
        return arg("ideal distribution has a negative or non-finite entry");
    }
    let mass: f64 = ideal.values().sum();
    if (mass - 1.0).abs() > 1e-9 {
        return arg(format!("ideal distribution sums to {mass}, not 1"));
    }
    let overlap: f64 = counts
        .iter()
        .filter_map(|(x, &n)| ideal.get(x).map(|&q| ((n as f64 / total as f64) * q).sqrt()))
        .sum();
    Ok(if squared { overlap * overlap } else { overlap })
}

/// Where the channel acts on each resource qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Insertion {
    /// After the resource pairs are prepared, before the walk step.
    #[default]
    PostPrep,
    /// After the walk step and basis change, immediately before measurement.
    PreMeasure,
}

impl FromStr for Insertion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "post_prep" => Ok(Insertion::PostPrep),
            "pre_measure" => Ok(Insertion::PreMeasure),
            _ => Err(Error::Parse(format!("unknown insertion point {s:?} (post-prep, pre-measure)"))),
        }
    }
}

/// Size limits for exact enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoiseBudget {
    pub max_qubits: usize,
    /// Upper bound on branches × amplitudes.
    pub max_work: u64,
}

impl Default for NoiseBudget {
    fn default() -> Self {
        Self { max_qubits: 12, max_work: 1 << 30 }
    }
}

/// Exact F*(p) for the protocol on `graph` with `channel` acting on every
/// resource qubit.
pub fn noisy_protocol_fidelity(
    graph: &Graph,
    channel: &NoiseChannel,
    correction: CorrectionKind,
    insertion: Insertion,
) -> Result<f64> {
    noisy_protocol_fidelity_with_budget(graph, channel, correction, insertion, NoiseBudget::default())
}

pub fn noisy_protocol_fidelity_with_budget(
    graph: &Graph,
    channel: &NoiseChannel,
    correction: CorrectionKind,
    insertion: Insertion,
    budget: NoiseBudget,
) -> Result<f64> {
    correction.check_applicable(graph)?;
    let layout = Layout::new(graph);
    let n = layout.total_qubits();
    let kraus: Vec<Mat2> = kraus_ops(channel).into_iter().filter(|m| !is_zero(m)).collect();
    let k = layout.n_resources();
    let branches = (kraus.len() as u64)
        .checked_pow(k as u32)
        .ok_or_else(|| Error::Resource("branch count overflows".into()))?;
    let work = branches.saturating_mul(1 << n);
    if n > budget.max_qubits || work > budget.max_work {
        return Err(Error::Resource(format!(
            "{n} qubits and {branches} Kraus branches exceed the noise budget \
             ({} qubits, {} work units); try a smaller graph",
            budget.max_qubits, budget.max_work
        )));
    }

    let target = graph_state(graph)?;
    let plans: Vec<CorrectionPlan> = (0..graph.outcome_count())
        .map(|i| correction.plan(graph, &Outcome::from_index(graph, i)?))
        .collect::<Result<_>>()?;

    let mut base = StateVector::zero(n)?;
    base.apply_all(&layout.preparation_gates())?;
    let walk = layout.walk_gates();
    if insertion == Insertion::PreMeasure {
        base.apply_all(&walk)?;
    }

    let resources: Vec<usize> = layout.resource_qubits().collect();
    let terms: Vec<f64> = (0..branches)
        .into_par_iter()
        .map(|branch| -> Result<f64> {
            let mut state = base.clone();
            let mut code = branch;
            for &q in &resources {
                let op = &kraus[(code % kraus.len() as u64) as usize];
                code /= kraus.len() as u64;
                state.apply_matrix1(q, op)?;
            }
            if insertion == Insertion::PostPrep {
                state.apply_all(&walk)?;
            }
            let contributions: Vec<f64> = plans
                .iter()
                .enumerate()
                .map(|(i, plan)| {
                    let outcome = Outcome::from_index(graph, i as u64).expect("index in range");
                    let slice = state.slice_low(layout.n_data(), outcome.resource_pattern());
                    let corrected = correct_slice(slice, plan);
                    inner_slices(target.amplitudes(), &corrected).norm_sqr()
                })
                .collect();
            Ok(neumaier_sum(&contributions))
        })
        .collect::<Result<_>>()?;
    Ok(neumaier_sum(&terms))
}

/// `∏_v X_v^{x_v} Z_v^{z_v}` applied to an unnormalized data-register vector.
fn correct_slice(slice: &[Complex64], plan: &CorrectionPlan) -> Vec<Complex64> {
    let (x, z) = plan.ops().iter().enumerate().fold((0usize, 0usize), |(x, z), (v, &(a, b))| {
        (x | ((a as usize) << v), z | ((b as usize) << v))
    });
    let mut out = vec![Complex64::new(0.0, 0.0); slice.len()];
    for (b, &a) in slice.iter().enumerate() {
        let sign = if (b & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        out[b ^ x] = a * sign;
    }
    out
}

/// Compensated summation in input order.
pub fn neumaier_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Exact and closed-form F*(p) over a grid of channel strengths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseReport {
    pub graph: String,
    pub channel: ChannelKind,
    pub correction: CorrectionKind,
    pub insertion: Insertion,
    /// Number of resource qubits.
    pub k: usize,
    pub p_grid: Vec<f64>,
    pub fidelities: Vec<f64>,
    pub analytic: Option<Vec<f64>>,
}
