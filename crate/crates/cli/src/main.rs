//! `graph-entropy`: entropy curves, family comparisons, random-graph
//! ensembles, mean-field overlays and invariant audits as CSV and SVG.

mod svg;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use graph_entropy::audit::{audit_counterexample, audit_graph, AuditReport};
use graph_entropy::experiments::{
    default_grid, run_compare, run_curve, run_ensemble, run_meanfield, GraphSpec, GridSpec, InitSpec, Table,
};
use graph_entropy::{Error, Graph, LaplacianKind, RngSeed, TimeGrid};
use thiserror::Error as ThisError;

use svg::{Plot, Series};

/// Tolerance above `ln n` for emitted entropy values.
const RANGE_SLACK: f64 = 1e-9;

#[derive(Debug, ThisError)]
enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("audit failed: {0}")]
    AuditFailed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::AuditFailed(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Numerical(_) | Error::NonFinite | Error::NoMixing => CliError::Numeric(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Config(format!("cannot write CSV: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(name = "graph-entropy", version, about = "Conditional entropy of diffusion on graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entropy curve of one graph.
    Curve(CurveArgs),
    /// Curves of several same-size graphs with complete and path references.
    Compare(CompareArgs),
    /// Mean and standard deviation over samples of a random graph model.
    Ensemble(EnsembleArgs),
    /// Erdős–Rényi ensemble against its mean-field curve.
    Meanfield(MeanfieldArgs),
    /// Invariant checks on one graph, or on the counterexample chain.
    Audit(AuditArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Dynamic {
    Heat,
    Rw,
}

impl From<Dynamic> for LaplacianKind {
    fn from(d: Dynamic) -> Self {
        match d {
            Dynamic::Heat => LaplacianKind::Combinatorial,
            Dynamic::Rw => LaplacianKind::RandomWalk,
        }
    }
}

fn parse_graph(s: &str) -> std::result::Result<GraphSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_init(s: &str) -> std::result::Result<InitSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_grid(s: &str) -> std::result::Result<GridSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Args)]
struct Process {
    /// Diffusion dynamic.
    #[arg(long, value_enum, default_value = "heat")]
    dynamic: Dynamic,
    /// Initial distribution: uniform, delta:<node> or file:<path>.
    #[arg(long, value_parser = parse_init, default_value = "uniform")]
    init: InitSpec,
}

#[derive(Args)]
struct Sampling {
    /// Time grid as log:TMIN:TMAX:POINTS or lin:TMIN:TMAX:POINTS
    /// (default: 60 log-spaced points from 1e-3 to 50/lambda_2).
    #[arg(long, value_parser = parse_grid)]
    grid: Option<GridSpec>,
    /// Master seed for random graph models.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct Output {
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    out_csv: Option<PathBuf>,
    /// SVG plot destination.
    #[arg(long)]
    out_svg: Option<PathBuf>,
    /// Plot time on a linear axis instead of a logarithmic one.
    #[arg(long)]
    svg_linear: bool,
}

#[derive(Args)]
struct CurveArgs {
    /// Graph: complete:N, path:N, star:K, circulant:N:S1,S2,.., er:N:P, ws:N:K:P or file:PATH.
    #[arg(long, value_parser = parse_graph)]
    graph: GraphSpec,
    #[command(flatten)]
    process: Process,
    #[command(flatten)]
    sampling: Sampling,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct CompareArgs {
    /// Graphs to compare (repeatable); all must have the same size.
    #[arg(long, value_parser = parse_graph, required = true)]
    graph: Vec<GraphSpec>,
    #[command(flatten)]
    process: Process,
    #[command(flatten)]
    sampling: Sampling,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct EnsembleArgs {
    /// Random graph model: er:N:P or ws:N:K:P.
    #[arg(long, value_parser = parse_graph)]
    graph: GraphSpec,
    /// Number of sampled graphs.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    #[command(flatten)]
    process: Process,
    #[command(flatten)]
    sampling: Sampling,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct MeanfieldArgs {
    /// Erdős–Rényi model er:N:P; heat diffusion from the uniform distribution.
    #[arg(long, value_parser = parse_graph)]
    graph: GraphSpec,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    #[command(flatten)]
    sampling: Sampling,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct AuditArgs {
    /// Graph to audit.
    #[arg(long, value_parser = parse_graph, required_unless_present = "counterexample", conflicts_with = "counterexample")]
    graph: Option<GraphSpec>,
    /// Audit the absorbing counterexample chain with this many states instead.
    #[arg(long)]
    counterexample: Option<usize>,
    #[command(flatten)]
    process: Process,
    #[command(flatten)]
    sampling: Sampling,
    /// CSV report destination.
    #[arg(long)]
    out_csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Curve(a) => curve(a),
        Command::Compare(a) => compare(a),
        Command::Ensemble(a) => ensemble(a),
        Command::Meanfield(a) => meanfield(a),
        Command::Audit(a) => audit(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("graph-entropy: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn resolve_grid(spec: Option<GridSpec>, graphs: &[&Graph], kind: LaplacianKind) -> CliResult<Option<TimeGrid>> {
    match spec {
        Some(s) => Ok(Some(s.build()?)),
        None if graphs.is_empty() => Ok(None),
        None => Ok(Some(default_grid(graphs, kind)?)),
    }
}

fn is_log_spaced(times: &[f64]) -> bool {
    if times.len() < 3 || times[0] <= 0.0 {
        return false;
    }
    let r0 = times[1] / times[0];
    times.windows(2).all(|w| ((w[1] / w[0]) / r0 - 1.0).abs() < 1e-9)
}

fn check_range(label: &str, n: usize, values: &[f64]) -> CliResult<()> {
    let upper = (n as f64).ln() + RANGE_SLACK;
    match values.iter().find(|&&v| !(0.0..=upper).contains(&v)) {
        Some(v) => Err(CliError::Numeric(format!(
            "{label}: entropy {v:e} outside [0, ln {n}]"
        ))),
        None => Ok(()),
    }
}

fn write_table(table: &Table, dest: Option<&Path>) -> CliResult<()> {
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(&table.header)?;
        for row in &table.rows {
            w.write_record(row.iter().map(|v| format!("{v:.16e}")))?;
        }
        w.flush().map_err(|e| CliError::Config(e.to_string()))?;
    }
    emit(&buf, dest)
}

fn emit(bytes: &[u8], dest: Option<&Path>) -> CliResult<()> {
    match dest {
        Some(path) => fs::write(path, bytes)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::Config(format!("cannot write to stdout: {e}"))),
    }
}

fn write_svg(plot: Plot<'_>, dest: Option<&Path>) -> CliResult<()> {
    match dest {
        Some(path) => emit(plot.render().as_bytes(), Some(path)),
        None => Ok(()),
    }
}

fn curve(a: CurveArgs) -> CliResult<()> {
    let kind = a.process.dynamic.into();
    let (g, redraws) = a.graph.build_admissible(RngSeed(a.sampling.seed))?;
    if redraws > 0 {
        eprintln!("note: redrew {} {redraws} time(s) to avoid isolated nodes", a.graph);
    }
    let grid = resolve_grid(a.sampling.grid, &[&g], kind)?.expect("grid for one graph");
    let p0 = a.process.init.resolve(g.node_count())?;
    let c = run_curve(&g, kind, &p0, &grid)?;
    check_range(g.label(), g.node_count(), &c.values)?;
    let table = Table::from_columns(vec!["t".into(), "entropy".into()], &c.times, &[&c.values]);
    write_table(&table, a.output.out_csv.as_deref())?;
    write_svg(
        Plot {
            title: format!("{} ({} diffusion)", g.label(), kind.name()),
            times: &c.times,
            log_time: !a.output.svg_linear && is_log_spaced(&c.times),
            series: vec![Series {
                label: g.label(),
                values: &c.values,
                band: None,
                dashed: false,
            }],
        },
        a.output.out_svg.as_deref(),
    )
}

fn compare(a: CompareArgs) -> CliResult<()> {
    let kind = a.process.dynamic.into();
    let graphs = a
        .graph
        .iter()
        .enumerate()
        .map(|(i, spec)| spec.build_admissible(RngSeed(a.sampling.seed).derive(i as u64)).map(|(g, _)| g))
        .collect::<graph_entropy::Result<Vec<_>>>()?;
    let grid = match a.sampling.grid {
        Some(s) => Some(s.build()?),
        None => None,
    };
    let cmp = run_compare(&graphs, kind, &a.process.init, grid.as_ref())?;
    for c in &cmp.curves {
        check_range(&c.graph.label, c.graph.n, &c.values)?;
    }
    write_table(&cmp.to_table(), a.output.out_csv.as_deref())?;
    let refs = cmp.curves.len() - 2;
    write_svg(
        Plot {
            title: format!("n = {} ({} diffusion)", graphs[0].node_count(), kind.name()),
            times: &cmp.times,
            log_time: !a.output.svg_linear && is_log_spaced(&cmp.times),
            series: cmp
                .curves
                .iter()
                .enumerate()
                .map(|(i, c)| Series {
                    label: &c.graph.label,
                    values: &c.values,
                    band: None,
                    dashed: i >= refs,
                })
                .collect(),
        },
        a.output.out_svg.as_deref(),
    )
}

fn ensemble(a: EnsembleArgs) -> CliResult<()> {
    let kind = a.process.dynamic.into();
    let grid = match a.sampling.grid {
        Some(s) => Some(s.build()?),
        None => None,
    };
    let e = run_ensemble(
        &a.graph,
        kind,
        &a.process.init,
        grid.as_ref(),
        a.samples as usize,
        RngSeed(a.sampling.seed),
    )?;
    let n = match a.graph {
        GraphSpec::ErdosRenyi { n, .. } | GraphSpec::WattsStrogatz { n, .. } => n,
        _ => unreachable!("run_ensemble rejects deterministic families"),
    };
    for (i, s) in e.samples.iter().enumerate() {
        check_range(&format!("sample {i}"), n, &s.values)?;
        if s.redraws > 0 {
            eprintln!("note: sample {i} redrawn {} time(s) to avoid isolated nodes", s.redraws);
        }
        if s.disconnected {
            eprintln!("note: sample {i} is disconnected; long-time limit {:.12e}", s.asymptote);
        }
    }
    write_table(&e.to_table(), a.output.out_csv.as_deref())?;
    write_svg(
        Plot {
            title: format!("{} x {} ({} diffusion)", a.graph, a.samples, kind.name()),
            times: &e.times,
            log_time: !a.output.svg_linear && is_log_spaced(&e.times),
            series: vec![Series {
                label: "mean +/- std",
                values: &e.mean,
                band: Some(&e.std),
                dashed: false,
            }],
        },
        a.output.out_svg.as_deref(),
    )
}

fn meanfield(a: MeanfieldArgs) -> CliResult<()> {
    let GraphSpec::ErdosRenyi { n, p } = a.graph else {
        return Err(CliError::Config(format!("meanfield needs an er:N:P model, got {}", a.graph)));
    };
    let grid = match a.sampling.grid {
        Some(s) => Some(s.build()?),
        None => None,
    };
    let mf = run_meanfield(n, p, grid.as_ref(), a.samples as usize, RngSeed(a.sampling.seed))?;
    check_range("empirical mean", n, &mf.empirical.mean)?;
    check_range("mean-field", n, &mf.meanfield)?;
    write_table(&mf.to_table(), a.output.out_csv.as_deref())?;
    let e = &mf.empirical;
    write_svg(
        Plot {
            title: format!("ER({n}, {p}) vs mean field"),
            times: &e.times,
            log_time: !a.output.svg_linear && is_log_spaced(&e.times),
            series: vec![
                Series {
                    label: "empirical mean",
                    values: &e.mean,
                    band: Some(&e.std),
                    dashed: false,
                },
                Series {
                    label: "mean field",
                    values: &mf.meanfield,
                    band: None,
                    dashed: true,
                },
            ],
        },
        a.output.out_svg.as_deref(),
    )
}

fn audit(a: AuditArgs) -> CliResult<()> {
    let report = match (a.counterexample, &a.graph) {
        (Some(n), _) => {
            let grid = match a.sampling.grid {
                Some(s) => s.build()?,
                None => TimeGrid::log(1e-3, 50.0, 60)?,
            };
            audit_counterexample(n, &grid)?
        }
        (None, Some(spec)) => {
            let kind = a.process.dynamic.into();
            let (g, _) = spec.build_admissible(RngSeed(a.sampling.seed))?;
            let grid = resolve_grid(a.sampling.grid, &[&g], kind)?.expect("grid for one graph");
            let p0 = a.process.init.resolve(g.node_count())?;
            audit_graph(&g, kind, &p0, &grid, RngSeed(a.sampling.seed).derive(u64::MAX))?
        }
        (None, None) => return Err(CliError::Config("audit needs --graph or --counterexample".into())),
    };
    print!("{}", report.to_text());
    if let Some(path) = &a.out_csv {
        write_report(&report, path)?;
    }
    if report.passed() {
        Ok(())
    } else {
        let names: Vec<&str> = report.failures().map(|c| c.name).collect();
        Err(CliError::AuditFailed(names.join(", ")))
    }
}

fn write_report(report: &AuditReport, path: &Path) -> CliResult<()> {
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(["check", "passed", "worst_slack", "tolerance"])?;
        for c in &report.checks {
            w.write_record([
                c.name.to_string(),
                c.passed.to_string(),
                format!("{:.16e}", c.worst_slack),
                format!("{:.16e}", c.tolerance),
            ])?;
        }
        w.flush().map_err(|e| CliError::Config(e.to_string()))?;
    }
    emit(&buf, Some(path))
}
