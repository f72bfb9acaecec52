//! Shannon entropy, KL divergence and the conditional entropy
//! `H(X(t)|X(0)) = Σ_i p_i(0) H(T_i,:(t))` of a diffusion process.
//!
//! All logarithms are natural; `0 ln 0 = 0`.

use nalgebra::DMatrix;

use crate::diffusion::{Distribution, HeatKernel, TimeGrid};
use crate::error::{Error, Result};
use crate::graph::{connected_components, Graph};
use crate::spectral::{require_no_isolated, LaplacianKind};

/// Slack allowed between consecutive points of a non-decreasing curve.
pub const MONOTONE_SLACK: f64 = 1e-9;

/// `-x ln x` with the continuous extension at zero.
#[inline]
pub fn neg_xlogx(x: f64) -> f64 {
    if x > 0.0 {
        -x * x.ln()
    } else {
        0.0
    }
}

/// Entropy of a non-negative vector treated as a distribution.
pub fn entropy_of(p: &[f64]) -> f64 {
    p.iter().copied().map(neg_xlogx).sum()
}

pub fn shannon_entropy(p: &Distribution) -> f64 {
    entropy_of(p.probs())
}

/// `Σ p_x ln(p_x / q_x)`. A positive `p_x` against a zero `q_x` is an error.
pub fn kl_divergence(p: &Distribution, q: &Distribution) -> Result<f64> {
    kl_of(p.probs(), q.probs())
}

pub(crate) fn kl_of(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            got: q.len(),
        });
    }
    let mut total = 0.0;
    for (i, (&pi, &qi)) in p.iter().zip(q).enumerate() {
        if pi > 0.0 {
            if qi <= 0.0 {
                return Err(Error::SupportViolation(i));
            }
            total += pi * (pi / qi).ln();
        }
    }
    Ok(total.max(0.0))
}

/// Entropy of every row of a transition matrix.
pub fn row_entropies(kernel: &DMatrix<f64>) -> Vec<f64> {
    kernel
        .row_iter()
        .map(|row| row.iter().copied().map(neg_xlogx).sum())
        .collect()
}

/// `Σ_i p_i(0) H(T_i,:)` for an explicit transition matrix.
pub fn conditional_entropy_of(kernel: &DMatrix<f64>, p0: &Distribution) -> Result<f64> {
    if kernel.nrows() != p0.len() {
        return Err(Error::DimensionMismatch {
            expected: kernel.nrows(),
            got: p0.len(),
        });
    }
    Ok(kernel
        .row_iter()
        .zip(p0.probs())
        .filter(|(_, &w)| w > 0.0)
        .map(|(row, &w)| w * row.iter().copied().map(neg_xlogx).sum::<f64>())
        .sum())
}

/// Conditional entropy `H(X(t)|X(0))` of the process driven by `kernel`.
pub fn conditional_entropy(kernel: &HeatKernel, p0: &Distribution, t: f64) -> Result<f64> {
    conditional_entropy_of(&kernel.kernel_at(t)?, p0)
}

/// How the initial distribution was chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    Uniform,
    Delta(usize),
    Custom,
}

impl InitialCondition {
    pub fn describe(p: &Distribution) -> Self {
        let probs = p.probs();
        let n = probs.len() as f64;
        if probs.iter().all(|&x| x == 1.0 / n) {
            return InitialCondition::Uniform;
        }
        let ones: Vec<usize> = (0..probs.len()).filter(|&i| probs[i] == 1.0).collect();
        if ones.len() == 1 {
            return InitialCondition::Delta(ones[0]);
        }
        InitialCondition::Custom
    }
}

/// Size and family of the graph a curve was computed on.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphMeta {
    pub n: usize,
    pub edges: Option<usize>,
    pub label: String,
}

impl GraphMeta {
    pub fn of(g: &Graph) -> Self {
        Self {
            n: g.node_count(),
            edges: Some(g.edge_count()),
            label: g.label().to_string(),
        }
    }
}

/// Sampled conditional entropy over time.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyCurve {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub dynamic: LaplacianKind,
    pub initial: InitialCondition,
    pub graph: GraphMeta,
}

impl EntropyCurve {
    /// Largest drop `H(t_k) - H(t_{k+1})` between consecutive points (≤ 0 for
    /// a strictly increasing curve).
    pub fn max_drop(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| w[0] - w[1])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_non_decreasing(&self, slack: f64) -> bool {
        self.values.len() < 2 || self.max_drop() <= slack
    }

    /// Largest value above `ln n`.
    pub fn max_excess_over_log_n(&self) -> f64 {
        let log_n = (self.graph.n as f64).ln();
        self.values.iter().map(|v| v - log_n).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Conditional entropy at every grid time.
pub fn entropy_curve(kernel: &HeatKernel, p0: &Distribution, grid: &TimeGrid) -> Result<EntropyCurve> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("empty grid".into()));
    }
    let values = grid
        .times()
        .iter()
        .map(|&t| conditional_entropy(kernel, p0, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(EntropyCurve {
        times: grid.times().to_vec(),
        values,
        dynamic: kernel.kind(),
        initial: InitialCondition::describe(p0),
        graph: GraphMeta {
            n: kernel.dim(),
            edges: None,
            label: String::from("custom"),
        },
    })
}

/// Builds the kernel for `g` and samples its entropy curve.
pub fn graph_entropy_curve(
    g: &Graph,
    kind: LaplacianKind,
    p0: &Distribution,
    grid: &TimeGrid,
) -> Result<EntropyCurve> {
    let kernel = HeatKernel::new(g, kind)?;
    let mut curve = entropy_curve(&kernel, p0, grid)?;
    curve.graph = GraphMeta::of(g);
    Ok(curve)
}

/// Long-time conditional entropy of heat diffusion:
/// `Σ_k ln|V_k| · Σ_{j∈V_k} p_j(0)` over connected components, which is
/// `ln n` for connected graphs.
pub fn asymptotic_value_heat(g: &Graph, p0: &Distribution) -> Result<f64> {
    require_no_isolated(g)?;
    if p0.len() != g.node_count() {
        return Err(Error::DimensionMismatch {
            expected: g.node_count(),
            got: p0.len(),
        });
    }
    Ok(connected_components(g)
        .iter()
        .map(|part| {
            let mass: f64 = part.iter().map(|&j| p0.probs()[j]).sum();
            (part.len() as f64).ln() * mass
        })
        .sum())
}

/// Long-time conditional entropy of random-walk diffusion on a connected
/// graph: the entropy of the degree distribution `d_j / 2M`,
/// i.e. `ln(2M) - Σ_j d_j ln d_j / 2M`.
pub fn asymptotic_value_rw(g: &Graph) -> Result<f64> {
    require_no_isolated(g)?;
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if g.node_count() == 1 {
        return Ok(0.0);
    }
    let two_m = 2.0 * g.edge_count() as f64;
    let weighted: f64 = g
        .degrees()
        .iter()
        .map(|&d| {
            let d = d as f64;
            d * d.ln()
        })
        .sum();
    Ok(two_m.ln() - weighted / two_m)
}

/// Entropy gap `ln n - H(t)` next to its Pinsker lower bound.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyGapReport {
    pub t: f64,
    pub gap: f64,
    /// `Σ_i p_i(0)/2 · ‖T_i,: - π‖₁²` with `π` uniform.
    pub pinsker_bound: f64,
    pub slack: f64,
}

pub fn pinsker_report(kernel: &HeatKernel, p0: &Distribution, t: f64) -> Result<EntropyGapReport> {
    if kernel.kind() != LaplacianKind::Combinatorial {
        return Err(Error::Unsupported(
            "the uniform-stationary Pinsker bound applies to heat diffusion".into(),
        ));
    }
    let m = kernel.kernel_at(t)?;
    let h = conditional_entropy_of(&m, p0)?;
    let n = m.nrows();
    let pi = 1.0 / n as f64;
    let bound: f64 = m
        .row_iter()
        .zip(p0.probs())
        .map(|(row, &w)| {
            let l1: f64 = row.iter().map(|x| (x - pi).abs()).sum();
            0.5 * w * l1 * l1
        })
        .sum();
    let gap = (n as f64).ln() - h;
    Ok(EntropyGapReport {
        t,
        gap,
        pinsker_bound: bound,
        slack: gap - bound,
    })
}

fn check_counterexample_args(t: f64, n: usize) -> Result<()> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("t must be positive, got {t}")));
    }
    if n < 2 {
        return Err(Error::InvalidSize("the chain needs at least two states".into()));
    }
    Ok(())
}

/// Conditional entropy of the absorbing chain in which every state other
/// than 0 jumps to 0 at unit rate, started uniformly on states `1..n`:
/// `(e^{-t} - 1) ln(1 - e^{-t}) + t e^{-t}`. The value does not depend on `n`.
pub fn counterexample_entropy(t: f64, n: usize) -> Result<f64> {
    check_counterexample_args(t, n)?;
    let x = (-t).exp();
    let one_minus_x = -(-t).exp_m1();
    Ok(-one_minus_x * one_minus_x.ln() + t * x)
}

/// Transition matrix and initial distribution of the absorbing chain.
pub fn counterexample_chain(t: f64, n: usize) -> Result<(DMatrix<f64>, Distribution)> {
    check_counterexample_args(t, n)?;
    let x = (-t).exp();
    let one_minus_x = -(-t).exp_m1();
    let mut m = DMatrix::zeros(n, n);
    m[(0, 0)] = 1.0;
    for i in 1..n {
        m[(i, 0)] = one_minus_x;
        m[(i, i)] = x;
    }
    let mut p = vec![1.0 / (n - 1) as f64; n];
    p[0] = 0.0;
    Ok((m, Distribution::from_weights(p)?))
}

/// The same value as [`counterexample_entropy`], computed from the matrix.
pub fn counterexample_entropy_from_matrix(t: f64, n: usize) -> Result<f64> {
    let (m, p0) = counterexample_chain(t, n)?;
    conditional_entropy_of(&m, &p0)
}
