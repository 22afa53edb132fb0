//! `pqw`: verification reports, noise curves, LC checks and hardware-count
//! arithmetic for the phase-quantum-walk distribution protocol.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pqw_core::graphs::{catalog_lookup, ghz_state, graph_state, parse_edge_list, table2_suite, Graph};
use pqw_core::noise::{bhattacharyya_fidelity, extract_p_eff, f_star_dep, ChannelKind, Insertion, NoiseReport};
use pqw_core::protocol::CorrectionKind;
use pqw_core::statevector::{Bipartition, StateVector};
use pqw_core::verify::{lc_check, noise_sweep, verify_with_tolerances, LcReport, Tolerances, VerificationReport};
use pqw_core::Error;

#[derive(Parser)]
#[command(name = "pqw", version, about = "Phase-quantum-walk graph-state distribution: exact verification suite")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Worker threads.
    #[arg(long, global = true, env = "PQW_JOBS")]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Check every measurement outcome of a graph against its target state.
    Verify {
        /// Catalog name, `all` for the 18-graph suite, or `@path` to an edge list.
        #[arg(long)]
        graph: String,
        #[arg(long, default_value = "universal")]
        correction: CorrectionKind,
        /// Fidelity tolerance: each outcome needs F ≥ 1 − tol.
        #[arg(long, default_value_t = pqw_core::verify::FIDELITY_TOL)]
        tol: f64,
        /// Allowed deviation of each outcome probability from 4^-|E|.
        #[arg(long, default_value_t = pqw_core::verify::PROBABILITY_TOL)]
        prob_tol: f64,
    },
    /// Exact noisy fidelity over a grid of channel strengths.
    Noise {
        #[arg(long, default_value = "P4")]
        graph: String,
        #[arg(long, default_value = "dep")]
        channel: ChannelKind,
        /// `start:stop:step`, a comma-separated list, or a single value.
        #[arg(long)]
        p: String,
        #[arg(long, default_value = "post-prep")]
        insertion: Insertion,
        #[arg(long, default_value = "universal")]
        correction: CorrectionKind,
        /// Emit a named comparison table instead of a single curve.
        #[arg(long, value_enum)]
        compare: Option<Comparison>,
    },
    /// Schmidt ranks of two states across bipartitions.
    Lc {
        /// Catalog graph or `GHZ<n>`.
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        /// Cut such as `AC|BD`; repeat for several cuts.
        #[arg(long, required = true)]
        cut: Vec<String>,
    },
    /// Classical fidelity of hardware counts and the implied depolarizing strength.
    #[command(alias = "counts-fidelity")]
    Counts {
        /// JSON map from bitstring to count.
        #[arg(long, requires = "ideal", conflicts_with = "fidelity")]
        counts: Option<PathBuf>,
        /// JSON map from bitstring to ideal probability.
        #[arg(long)]
        ideal: Option<PathBuf>,
        /// Use a known fidelity directly.
        #[arg(long, required_unless_present = "counts")]
        fidelity: Option<f64>,
        /// Number of resource qubits.
        #[arg(long)]
        k: usize,
        /// Report the Bhattacharyya coefficient instead of its square.
        #[arg(long)]
        unsquared: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Comparison {
    Fig4,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Resource(_) => 3,
            Error::ZeroProbability { .. } => 1,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

/// What a command produced: rendered text and whether verification passed.
struct Output {
    text: String,
    pass: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("pqw: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.common.jobs {
        if n == 0 {
            return Err(usage("--jobs must be at least 1"));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| Failure { code: 3, message: e.to_string() })?;
    let format = cli.common.format;
    let output = pool.install(|| match cli.command {
        Command::Verify { graph, correction, tol, prob_tol } => {
            if !(tol >= 0.0 && prob_tol >= 0.0) {
                return Err(usage("tolerances must be non-negative"));
            }
            cmd_verify(&graph, correction, Tolerances { fidelity: tol, probability: prob_tol }, format)
        }
        Command::Noise { graph, channel, p, insertion, correction, compare } => {
            let grid = parse_grid(&p)?;
            match compare {
                Some(Comparison::Fig4) => cmd_fig4(&grid, format),
                None => cmd_noise(&graph, channel, &grid, insertion, correction, format),
            }
        }
        Command::Lc { a, b, cut } => cmd_lc(&a, &b, &cut, format),
        Command::Counts { counts, ideal, fidelity, k, unsquared } => {
            cmd_counts(counts, ideal, fidelity, k, !unsquared, format)
        }
    })?;
    match &cli.common.out {
        Some(path) => fs::write(path, &output.text)
            .map_err(|e| Failure { code: 3, message: format!("{}: {e}", path.display()) })?,
        None => io::stdout()
            .write_all(output.text.as_bytes())
            .map_err(|e| Failure { code: 3, message: e.to_string() })?,
    }
    Ok(output.pass)
}

fn resolve_graph(selector: &str) -> Result<(String, Graph), Failure> {
    if let Some(path) = selector.strip_prefix('@') {
        let text = fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))?;
        let name = PathBuf::from(path)
            .file_stem()
            .map_or_else(|| path.to_string(), |s| s.to_string_lossy().into_owned());
        return Ok((name, parse_edge_list(&text)?));
    }
    Ok((selector.to_string(), catalog_lookup(selector)?))
}

/// Round to 12 significant digits and print the shortest exact form.
fn num(x: f64) -> String {
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    let rounded = rounded + 0.0;
    if rounded != 0.0 && !(1e-4..1e15).contains(&rounded.abs()) {
        format!("{rounded:e}")
    } else {
        format!("{rounded}")
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure { code: 3, message: e.to_string() })?;
    text.push('\n');
    Ok(text)
}

#[derive(Serialize)]
struct VerifySummary<'a> {
    graph: &'a str,
    correction: CorrectionKind,
    vertices: usize,
    edges: usize,
    outcome_count: u64,
    min_fidelity: f64,
    max_probability_deviation: f64,
    pass: bool,
}

impl<'a> From<&'a VerificationReport> for VerifySummary<'a> {
    fn from(r: &'a VerificationReport) -> Self {
        VerifySummary {
            graph: &r.graph,
            correction: r.correction,
            vertices: r.vertices,
            edges: r.edges,
            outcome_count: r.outcome_count,
            min_fidelity: r.min_fidelity,
            max_probability_deviation: r.max_probability_deviation,
            pass: r.pass,
        }
    }
}

fn cmd_verify(selector: &str, kind: CorrectionKind, tol: Tolerances, format: Option<Format>) -> Result<Output, Failure> {
    let graphs: Vec<(String, Graph)> = if selector == "all" {
        table2_suite().map(|e| (e.name.clone(), e.graph.clone())).collect()
    } else {
        vec![resolve_graph(selector)?]
    };
    for (name, g) in &graphs {
        kind.check_applicable(g).map_err(|e| usage(format!("{name}: {e}")))?;
    }
    let reports = graphs
        .iter()
        .map(|(name, g)| verify_with_tolerances(name, g, kind, tol))
        .collect::<Result<Vec<_>, _>>()?;
    let pass = reports.iter().all(|r| r.pass);

    let text = match (format.unwrap_or(Format::Json), reports.as_slice()) {
        (Format::Json, [single]) if selector != "all" => to_json(single)?,
        (Format::Json, _) => to_json(&reports.iter().map(VerifySummary::from).collect::<Vec<_>>())?,
        (Format::Csv, [single]) if selector != "all" => {
            let mut s = String::from("index,outcome,probability,fidelity\n");
            for r in &single.records {
                s += &format!("{},{},{},{}\n", r.index, r.outcome, num(r.probability), num(r.fidelity));
            }
            s
        }
        (Format::Csv, _) => {
            let mut s = String::from("graph,vertices,edges,outcomes,min_fidelity,max_probability_deviation,pass\n");
            for r in &reports {
                s += &format!(
                    "{},{},{},{},{},{},{}\n",
                    r.graph,
                    r.vertices,
                    r.edges,
                    r.outcome_count,
                    num(r.min_fidelity),
                    num(r.max_probability_deviation),
                    r.pass
                );
            }
            s
        }
    };
    Ok(Output { text, pass })
}

/// `start:stop:step`, `a,b,c` or a single value; every entry must lie in [0, 1].
fn parse_grid(text: &str) -> Result<Vec<f64>, Failure> {
    let value = |s: &str| -> Result<f64, Failure> {
        s.trim().parse::<f64>().map_err(|_| usage(format!("bad number {s:?} in --p")))
    };
    let grid = match text.split(':').collect::<Vec<_>>().as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (value(start)?, value(stop)?, value(step)?);
            if step <= 0.0 || stop < start {
                return Err(usage("--p range needs start ≤ stop and a positive step"));
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            // Round away the accumulation error of start + i·step.
            (0..=n).map(|i| num(start + i as f64 * step).parse().unwrap()).collect()
        }
        [_] => text.split(',').map(value).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(usage("--p takes start:stop:step, a list a,b,c, or one value")),
    };
    if let Some(bad) = grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(usage(format!("channel strength {bad} outside [0, 1]")));
    }
    Ok(grid)
}

fn cmd_noise(
    selector: &str,
    channel: ChannelKind,
    grid: &[f64],
    insertion: Insertion,
    correction: CorrectionKind,
    format: Option<Format>,
) -> Result<Output, Failure> {
    let (name, g) = resolve_graph(selector)?;
    correction.check_applicable(&g)?;
    let report: NoiseReport = noise_sweep(&name, &g, channel, grid, correction, insertion)?;
    let text = match format.unwrap_or(Format::Csv) {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut s = String::from("p,F_exact,F_analytic\n");
            for (i, &p) in report.p_grid.iter().enumerate() {
                let analytic = report.analytic.as_ref().map_or_else(String::new, |a| num(a[i]));
                s += &format!("{},{},{}\n", num(p), num(report.fidelities[i]), analytic);
            }
            s
        }
    };
    Ok(Output { text, pass: true })
}

#[derive(Serialize)]
struct Fig4Row {
    protocol: &'static str,
    k: usize,
    p: f64,
    f_analytic: f64,
    f_exact: Option<f64>,
}

/// Depolarizing comparison of Bell, GHZ4 and L4 at the product-formula
/// exponents used for the figure, plus exact enumeration for L4.
fn cmd_fig4(grid: &[f64], format: Option<Format>) -> Result<Output, Failure> {
    let l4 = catalog_lookup("L4")?;
    let exact = noise_sweep("L4", &l4, ChannelKind::Depolarizing, grid, CorrectionKind::Universal, Insertion::PostPrep)?;
    let mut rows = Vec::new();
    for (i, &p) in grid.iter().enumerate() {
        for (protocol, k, f_exact) in [("bell", 1, None), ("ghz4", 2, None), ("l4", 6, Some(exact.fidelities[i]))] {
            rows.push(Fig4Row { protocol, k, p, f_analytic: f_star_dep(p, k), f_exact });
        }
    }
    let text = match format.unwrap_or(Format::Csv) {
        Format::Json => to_json(&rows)?,
        Format::Csv => {
            let mut s = String::from("protocol,k,p,F_analytic,F_exact\n");
            for r in &rows {
                let exact = r.f_exact.map_or_else(String::new, num);
                s += &format!("{},{},{},{},{}\n", r.protocol, r.k, num(r.p), num(r.f_analytic), exact);
            }
            s
        }
    };
    Ok(Output { text, pass: true })
}

/// A named state plus labels for its qubits.
fn resolve_state(name: &str) -> Result<(StateVector, Vec<String>), Failure> {
    let ghz_size = name.strip_prefix("GHZ").and_then(|n| n.parse::<usize>().ok());
    match ghz_size {
        Some(n) if n >= 2 => {
            let labels = (0..n).map(|i| char::from(b'A' + (i % 26) as u8).to_string()).collect();
            Ok((ghz_state(n)?, labels))
        }
        _ => {
            let g = catalog_lookup(name)?;
            Ok((graph_state(&g)?, g.vertices().to_vec()))
        }
    }
}

/// `AC|BD` (single-character labels) or `A,C|B,D`.
fn parse_cut(text: &str, labels: &[String]) -> Result<Bipartition, Failure> {
    let (left, right) = text.split_once('|').ok_or_else(|| usage(format!("cut {text:?} needs a `|`")))?;
    let split = |side: &str| -> Vec<String> {
        if side.contains(',') {
            side.split(',').map(|s| s.trim().to_string()).collect()
        } else {
            side.chars().map(String::from).collect()
        }
    };
    let index = |label: &String| {
        labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| usage(format!("unknown label {label:?} in cut {text:?}; labels are {}", labels.join(","))))
    };
    let side_a = split(left).iter().map(index).collect::<Result<Vec<_>, _>>()?;
    let side_b = split(right).iter().map(index).collect::<Result<Vec<_>, _>>()?;
    let mut all: Vec<usize> = side_a.iter().chain(&side_b).copied().collect();
    all.sort_unstable();
    if all != (0..labels.len()).collect::<Vec<_>>() {
        return Err(usage(format!("cut {text:?} must split all of {} exactly once", labels.join(","))));
    }
    Ok(Bipartition::new(labels.len(), side_a)?)
}

#[derive(Serialize)]
struct LcOutput<'a> {
    a: &'a str,
    b: &'a str,
    cut_labels: Vec<&'a str>,
    #[serde(flatten)]
    report: LcReport,
    verdict: &'static str,
}

fn cmd_lc(a: &str, b: &str, cuts: &[String], format: Option<Format>) -> Result<Output, Failure> {
    let (sa, labels) = resolve_state(a)?;
    let (sb, _) = resolve_state(b)?;
    if sa.n_qubits() != sb.n_qubits() {
        return Err(usage(format!("{a} has {} qubits, {b} has {}", sa.n_qubits(), sb.n_qubits())));
    }
    let parts = cuts.iter().map(|c| parse_cut(c, &labels)).collect::<Result<Vec<_>, _>>()?;
    let report = lc_check(&sa, &sb, &parts)?;
    let verdict = if report.inequivalent { "inequivalent" } else { "inconclusive" };
    let text = match format.unwrap_or(Format::Json) {
        Format::Csv => {
            let mut s = String::from("cut,rank_a,rank_b\n");
            for (cut, r) in cuts.iter().zip(&report.cuts) {
                s += &format!("{cut},{},{}\n", r.rank_a, r.rank_b);
            }
            s
        }
        Format::Json => to_json(&LcOutput { a, b, cut_labels: cuts.iter().map(String::as_str).collect(), report, verdict })?,
    };
    Ok(Output { text, pass: true })
}

#[derive(Serialize)]
struct CountsOutput {
    k: usize,
    squared: bool,
    fidelity: f64,
    p_eff: f64,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn cmd_counts(
    counts: Option<PathBuf>,
    ideal: Option<PathBuf>,
    fidelity: Option<f64>,
    k: usize,
    squared: bool,
    format: Option<Format>,
) -> Result<Output, Failure> {
    let fidelity = match (counts, ideal, fidelity) {
        (_, _, Some(f)) => f,
        (Some(c), Some(i), None) => {
            let counts: BTreeMap<String, u64> = read_json(&c)?;
            let ideal: BTreeMap<String, f64> = read_json(&i)?;
            bhattacharyya_fidelity(&counts, &ideal, squared)?
        }
        _ => return Err(usage("give --counts with --ideal, or --fidelity")),
    };
    let out = CountsOutput { k, squared, fidelity, p_eff: extract_p_eff(fidelity, k)? + 0.0 };
    let text = match format.unwrap_or(Format::Json) {
        Format::Json => to_json(&out)?,
        Format::Csv => format!("k,fidelity,p_eff\n{},{},{}\n", out.k, num(out.fidelity), num(out.p_eff)),
    };
    Ok(Output { text, pass: true })
}
