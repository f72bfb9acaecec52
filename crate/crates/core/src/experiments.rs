//! Experiment drivers: graph specifications, default grids, family
//! comparisons, random-graph ensembles and mean-field overlays, plus CSV
//! tables of their results.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::closed_forms::MeanFieldER;
use crate::diffusion::{Distribution, HeatKernel, TimeGrid};
use crate::entropy::{entropy_curve, EntropyCurve, GraphMeta};
use crate::error::{Error, Result};
use crate::graph::{
    make_circulant, make_complete, make_erdos_renyi, make_path, make_star, make_watts_strogatz,
    parse_edge_list, Graph, RngSeed, StepSet,
};
use crate::spectral::{random_walk_gap, spectral_gap, LaplacianKind, GAP_TOL};

/// Default grid: 60 log-spaced points from `1e-3` to `50/λ₂`, or to `1e3`
/// when no positive gap is available.
pub const DEFAULT_T_MIN: f64 = 1e-3;
pub const DEFAULT_T_MAX: f64 = 1e3;
pub const DEFAULT_POINTS: usize = 60;
pub const GAP_MULTIPLE: f64 = 50.0;

/// Upper bound on redraws for a stochastic sample that contains an isolated node.
pub const MAX_REDRAWS: u64 = 100;

/// Graph family plus parameters, written `family:params`.
///
/// Accepted forms: `complete:N`, `path:N`, `star:K`, `circulant:N:s1,s2,..`,
/// `er:N:P`, `ws:N:K:P` and `file:PATH`.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphSpec {
    Complete(usize),
    Path(usize),
    Star(usize),
    Circulant(usize, StepSet),
    ErdosRenyi { n: usize, p: f64 },
    WattsStrogatz { n: usize, k: usize, p: f64 },
    File(PathBuf),
}

fn parse_num<T: FromStr>(field: &str, what: &str) -> Result<T> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("cannot parse {what} from {field:?}")))
}

impl FromStr for GraphSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (family, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidParameter(format!("graph spec {s:?} has no parameters")))?;
        if family == "file" {
            return Ok(GraphSpec::File(PathBuf::from(rest)));
        }
        let fields: Vec<&str> = rest.split(':').collect();
        let expect = |count: usize| {
            if fields.len() == count {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{family} takes {count} parameter(s), got {s:?}"
                )))
            }
        };
        match family {
            "complete" | "path" | "star" => {
                expect(1)?;
                let v = parse_num(fields[0], "size")?;
                Ok(match family {
                    "complete" => GraphSpec::Complete(v),
                    "path" => GraphSpec::Path(v),
                    _ => GraphSpec::Star(v),
                })
            }
            "circulant" => {
                expect(2)?;
                let n = parse_num(fields[0], "size")?;
                let steps = fields[1]
                    .split(',')
                    .map(|f| parse_num(f, "step"))
                    .collect::<Result<Vec<usize>>>()?;
                Ok(GraphSpec::Circulant(n, StepSet::new(n, steps)?))
            }
            "er" => {
                expect(2)?;
                Ok(GraphSpec::ErdosRenyi {
                    n: parse_num(fields[0], "size")?,
                    p: parse_num(fields[1], "probability")?,
                })
            }
            "ws" => {
                expect(3)?;
                Ok(GraphSpec::WattsStrogatz {
                    n: parse_num(fields[0], "size")?,
                    k: parse_num(fields[1], "k")?,
                    p: parse_num(fields[2], "probability")?,
                })
            }
            other => Err(Error::InvalidParameter(format!("unknown graph family {other:?}"))),
        }
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSpec::Complete(n) => write!(f, "complete:{n}"),
            GraphSpec::Path(n) => write!(f, "path:{n}"),
            GraphSpec::Star(k) => write!(f, "star:{k}"),
            GraphSpec::Circulant(n, s) => {
                let steps: Vec<String> = s.steps().iter().map(|x| x.to_string()).collect();
                write!(f, "circulant:{n}:{}", steps.join(","))
            }
            GraphSpec::ErdosRenyi { n, p } => write!(f, "er:{n}:{p}"),
            GraphSpec::WattsStrogatz { n, k, p } => write!(f, "ws:{n}:{k}:{p}"),
            GraphSpec::File(path) => write!(f, "file:{}", path.display()),
        }
    }
}

impl GraphSpec {
    pub fn is_stochastic(&self) -> bool {
        matches!(self, GraphSpec::ErdosRenyi { .. } | GraphSpec::WattsStrogatz { .. })
    }

    /// Builds the graph. Deterministic families ignore `seed`.
    pub fn build(&self, seed: RngSeed) -> Result<Graph> {
        match self {
            GraphSpec::Complete(n) => make_complete(*n),
            GraphSpec::Path(n) => make_path(*n),
            GraphSpec::Star(k) => make_star(*k),
            GraphSpec::Circulant(n, s) => make_circulant(*n, s),
            GraphSpec::ErdosRenyi { n, p } => make_erdos_renyi(*n, *p, seed),
            GraphSpec::WattsStrogatz { n, k, p } => make_watts_strogatz(*n, *k, *p, seed),
            GraphSpec::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::InvalidParameter(format!("cannot read {}: {e}", path.display()))
                })?;
                let g = parse_edge_list(&text)?;
                if g.label().is_empty() {
                    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned());
                    Ok(g.with_label(name.unwrap_or_else(|| "file".into())))
                } else {
                    Ok(g)
                }
            }
        }
    }

    /// Builds a sample with no isolated nodes. Stochastic families redraw from
    /// `seed.derive(attempt)` until the isolated-node policy is met; the
    /// returned count is the number of redraws.
    pub fn build_admissible(&self, seed: RngSeed) -> Result<(Graph, u64)> {
        let g = self.build(seed)?;
        if g.node_count() < 2 || g.first_isolated_node().is_none() || !self.is_stochastic() {
            return Ok((g, 0));
        }
        for attempt in 1..=MAX_REDRAWS {
            let g = self.build(seed.derive(attempt))?;
            if g.first_isolated_node().is_none() {
                return Ok((g, attempt));
            }
        }
        Err(Error::InvalidParameter(format!(
            "{self} produced isolated nodes in {MAX_REDRAWS} consecutive draws"
        )))
    }
}

/// Initial distribution, resolved against the graph size.
#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    Uniform,
    Delta(usize),
    /// Whitespace- or comma-separated non-negative weights, normalized on load.
    File(PathBuf),
}

impl FromStr for InitSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "uniform" {
            return Ok(InitSpec::Uniform);
        }
        match s.split_once(':') {
            Some(("delta", i)) => Ok(InitSpec::Delta(parse_num(i, "node")?)),
            Some(("file", path)) => Ok(InitSpec::File(PathBuf::from(path))),
            _ => Err(Error::InvalidParameter(format!("unknown initial condition {s:?}"))),
        }
    }
}

impl InitSpec {
    pub fn resolve(&self, n: usize) -> Result<Distribution> {
        match self {
            InitSpec::Uniform => Distribution::uniform(n),
            InitSpec::Delta(i) => Distribution::delta(n, *i),
            InitSpec::File(path) => {
                let p = read_weights(path)?;
                if p.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: p.len(),
                    });
                }
                Ok(p)
            }
        }
    }
}

fn read_weights(path: &Path) -> Result<Distribution> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
    let weights = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split(|c: char| c == ',' || c.is_whitespace()))
        .filter(|f| !f.is_empty())
        .map(|f| parse_num(f, "weight"))
        .collect::<Result<Vec<f64>>>()?;
    Distribution::from_weights(weights)
}

/// Time grid description, written `log:TMIN:TMAX:POINTS` or `lin:TMIN:TMAX:POINTS`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    pub log: bool,
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fields: Vec<&str> = s.split(':').collect();
        let log = match fields.first() {
            Some(&"log") => true,
            Some(&"lin") => false,
            _ => return Err(Error::InvalidGrid(format!("grid {s:?} must start with log: or lin:"))),
        };
        if fields.len() != 4 {
            return Err(Error::InvalidGrid(format!("grid {s:?} needs three parameters")));
        }
        let spec = GridSpec {
            t_min: parse_num(fields[1], "t_min")?,
            t_max: parse_num(fields[2], "t_max")?,
            points: parse_num(fields[3], "points")?,
            log,
        };
        spec.build()?;
        Ok(spec)
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<TimeGrid> {
        if self.log {
            TimeGrid::log(self.t_min, self.t_max, self.points)
        } else {
            TimeGrid::linear(self.t_min, self.t_max, self.points)
        }
    }
}

/// `λ₂` of the Laplacian driving `kind` on `g`, when positive.
pub fn relaxation_gap(g: &Graph, kind: LaplacianKind) -> Result<Option<f64>> {
    if g.node_count() < 2 {
        return Ok(None);
    }
    let gap = match kind {
        LaplacianKind::Combinatorial => spectral_gap(HeatKernel::heat(g)?.decomposition().expect("spectral")),
        LaplacianKind::RandomWalk => random_walk_gap(g)?,
    };
    Ok((gap > GAP_TOL).then_some(gap))
}

/// Default grid for a set of graphs, ending at `50/λ₂` of the slowest graph.
pub fn default_grid(graphs: &[&Graph], kind: LaplacianKind) -> Result<TimeGrid> {
    let mut t_max: Option<f64> = None;
    for g in graphs {
        match relaxation_gap(g, kind)? {
            Some(gap) => t_max = Some(t_max.map_or(GAP_MULTIPLE / gap, |m| m.max(GAP_MULTIPLE / gap))),
            None => {
                t_max = Some(DEFAULT_T_MAX);
                break;
            }
        }
    }
    let t_max = t_max.unwrap_or(DEFAULT_T_MAX).max(10.0 * DEFAULT_T_MIN);
    TimeGrid::log(DEFAULT_T_MIN, t_max, DEFAULT_POINTS)
}

/// Entropy curve of one graph, labelled with its metadata.
pub fn run_curve(g: &Graph, kind: LaplacianKind, p0: &Distribution, grid: &TimeGrid) -> Result<EntropyCurve> {
    if g.node_count() == 1 {
        return Ok(EntropyCurve {
            times: grid.times().to_vec(),
            values: vec![0.0; grid.len()],
            dynamic: kind,
            initial: crate::entropy::InitialCondition::describe(p0),
            graph: GraphMeta::of(g),
        });
    }
    let kernel = HeatKernel::new(g, kind)?;
    let mut curve = entropy_curve(&kernel, p0, grid)?;
    curve.graph = GraphMeta::of(g);
    Ok(curve)
}

/// Curves of several same-size graphs plus `K_n` and `P_n` references.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub times: Vec<f64>,
    pub curves: Vec<EntropyCurve>,
}

pub fn run_compare(
    graphs: &[Graph],
    kind: LaplacianKind,
    init: &InitSpec,
    grid: Option<&TimeGrid>,
) -> Result<Comparison> {
    let n = graphs
        .first()
        .ok_or_else(|| Error::InvalidParameter("compare needs at least one graph".into()))?
        .node_count();
    if let Some(g) = graphs.iter().find(|g| g.node_count() != n) {
        return Err(Error::InvalidParameter(format!(
            "all graphs must have {n} nodes, {} has {}",
            g.label(),
            g.node_count()
        )));
    }
    let mut all: Vec<Graph> = graphs.to_vec();
    all.push(make_complete(n)?);
    all.push(make_path(n)?);
    let grid = match grid {
        Some(g) => g.clone(),
        None => default_grid(&all.iter().collect::<Vec<_>>(), kind)?,
    };
    let p0 = init.resolve(n)?;
    let curves = all
        .iter()
        .map(|g| run_curve(g, kind, &p0, &grid))
        .collect::<Result<Vec<_>>>()?;
    Ok(Comparison {
        times: grid.times().to_vec(),
        curves,
    })
}

impl Comparison {
    pub fn to_table(&self) -> Table {
        let mut header = vec!["t".to_string()];
        header.extend(self.curves.iter().map(|c| c.graph.label.clone()));
        let columns: Vec<&[f64]> = self.curves.iter().map(|c| c.values.as_slice()).collect();
        Table::from_columns(header, &self.times, &columns)
    }
}

/// One ensemble member.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleCurve {
    pub seed: RngSeed,
    /// Redraws needed to avoid isolated nodes.
    pub redraws: u64,
    pub disconnected: bool,
    /// Long-time limit of this sample's curve.
    pub asymptote: f64,
    pub values: Vec<f64>,
}

/// Mean and standard deviation over sample curves at each time.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSummary {
    pub label: String,
    pub times: Vec<f64>,
    pub mean: Vec<f64>,
    /// Sample standard deviation (divisor `samples - 1`); zero for one sample.
    pub std: Vec<f64>,
    pub samples: Vec<SampleCurve>,
}

impl EnsembleSummary {
    pub fn from_samples(label: String, times: Vec<f64>, samples: Vec<SampleCurve>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidParameter("ensemble needs at least one sample".into()));
        }
        let m = samples.len() as f64;
        let mut mean = Vec::with_capacity(times.len());
        let mut std = Vec::with_capacity(times.len());
        for k in 0..times.len() {
            // shifted by the first sample so identical samples give exactly zero spread
            let anchor = samples[0].values[k];
            let shifted = samples.iter().map(|s| s.values[k] - anchor);
            let shift_mean = shifted.clone().sum::<f64>() / m;
            let var = if samples.len() > 1 {
                shifted.map(|d| (d - shift_mean) * (d - shift_mean)).sum::<f64>() / (m - 1.0)
            } else {
                0.0
            };
            mean.push(anchor + shift_mean);
            std.push(var.sqrt());
        }
        Ok(Self {
            label,
            times,
            mean,
            std,
            samples,
        })
    }

    pub fn any_disconnected(&self) -> bool {
        self.samples.iter().any(|s| s.disconnected)
    }

    pub fn to_table(&self) -> Table {
        let mut header = vec!["t".to_string(), "mean".into(), "std".into()];
        header.extend(self.samples.iter().enumerate().map(|(i, s)| {
            if s.disconnected {
                format!("sample_{i}_disconnected")
            } else {
                format!("sample_{i}")
            }
        }));
        let mut columns: Vec<&[f64]> = vec![&self.mean, &self.std];
        columns.extend(self.samples.iter().map(|s| s.values.as_slice()));
        Table::from_columns(header, &self.times, &columns)
    }
}

/// Draws `samples` graphs from a stochastic family with seeds
/// `seed.derive(i)` and summarizes their entropy curves.
pub fn run_ensemble(
    spec: &GraphSpec,
    kind: LaplacianKind,
    init: &InitSpec,
    grid: Option<&TimeGrid>,
    samples: usize,
    seed: RngSeed,
) -> Result<EnsembleSummary> {
    if !spec.is_stochastic() {
        return Err(Error::InvalidParameter(format!("{spec} is not a random graph family")));
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be at least 1".into()));
    }
    let mut drawn = Vec::with_capacity(samples);
    for i in 0..samples {
        let sample_seed = seed.derive(i as u64);
        let (g, redraws) = spec.build_admissible(sample_seed)?;
        drawn.push((sample_seed, redraws, g));
    }
    let grid = match grid {
        Some(g) => g.clone(),
        None => default_grid(&drawn.iter().map(|(_, _, g)| g).collect::<Vec<_>>(), kind)?,
    };
    let mut curves = Vec::with_capacity(samples);
    let mut label = spec.to_string();
    for (sample_seed, redraws, g) in drawn {
        let p0 = init.resolve(g.node_count())?;
        let disconnected = !g.is_connected();
        let asymptote = match kind {
            LaplacianKind::Combinatorial => crate::entropy::asymptotic_value_heat(&g, &p0)?,
            LaplacianKind::RandomWalk if !disconnected => crate::entropy::asymptotic_value_rw(&g)?,
            LaplacianKind::RandomWalk => f64::NAN,
        };
        let curve = run_curve(&g, kind, &p0, &grid)?;
        label = curve.graph.label.clone();
        curves.push(SampleCurve {
            seed: sample_seed,
            redraws,
            disconnected,
            asymptote,
            values: curve.values,
        });
    }
    EnsembleSummary::from_samples(label, grid.times().to_vec(), curves)
}

/// Empirical Erdős–Rényi ensemble next to its mean-field curve.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanFieldComparison {
    pub n: usize,
    pub p: f64,
    pub empirical: EnsembleSummary,
    pub meanfield: Vec<f64>,
    /// `meanfield - empirical mean`.
    pub gap: Vec<f64>,
}

impl MeanFieldComparison {
    pub fn max_gap(&self) -> f64 {
        self.gap.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_gap(&self) -> f64 {
        self.gap.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn to_table(&self) -> Table {
        let header = ["t", "empirical_mean", "empirical_std", "meanfield", "gap"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let e = &self.empirical;
        Table::from_columns(header, &e.times, &[&e.mean, &e.std, &self.meanfield, &self.gap])
    }
}

/// Heat-diffusion ER ensemble with uniform initial condition and the
/// mean-field curve on the same grid.
pub fn run_meanfield(
    n: usize,
    p: f64,
    grid: Option<&TimeGrid>,
    samples: usize,
    seed: RngSeed,
) -> Result<MeanFieldComparison> {
    let model = MeanFieldER::new(n, p)?;
    let spec = GraphSpec::ErdosRenyi { n, p };
    let empirical = run_ensemble(&spec, LaplacianKind::Combinatorial, &InitSpec::Uniform, grid, samples, seed)?;
    let meanfield = empirical
        .times
        .iter()
        .map(|&t| model.entropy(t))
        .collect::<Result<Vec<_>>>()?;
    let gap = meanfield.iter().zip(&empirical.mean).map(|(m, e)| m - e).collect();
    Ok(MeanFieldComparison {
        n,
        p,
        empirical,
        meanfield,
        gap,
    })
}

/// Rows of numbers under a header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn from_columns(header: Vec<String>, first: &[f64], rest: &[&[f64]]) -> Self {
        let rows = (0..first.len())
            .map(|k| std::iter::once(first[k]).chain(rest.iter().map(|c| c[k])).collect())
            .collect();
        Self { header, rows }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}
