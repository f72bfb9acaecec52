//! Transition matrices `T(t) = exp(-tL)` and probability propagation.
//!
//! The diffusion rate is fixed at 1. A process with rate `r` at time `t` is
//! the unit-rate process at time `r * t`; see [`rescale_time`].

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::expm::expm;
use crate::graph::Graph;
use crate::spectral::{
    decompose, decompose_normalized, laplacian, require_no_isolated, spectral_gap, LaplacianKind, SpectralDecomposition,
    CLUSTER_REL_TOL, GAP_TOL,
};

/// Kernel entries below `-NEGATIVE_TOL` are treated as a numerical failure;
/// smaller negatives are rounding noise and get clipped to zero.
pub const NEGATIVE_TOL: f64 = 1e-10;

const NORMALIZATION_TOL: f64 = 1e-12;

/// Probability vector over nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution(Vec<f64>);

impl Distribution {
    /// Validates non-negativity and `|Σp - 1| <= 1e-12`.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty".into()));
        }
        if let Some(i) = probs.iter().position(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "entry {i} is {} (must be finite and non-negative)",
                probs[i]
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidDistribution(format!("sums to {sum}")));
        }
        Ok(Self(probs))
    }

    /// Normalizes non-negative weights to sum to one.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDistribution("weights must be finite and non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("weights sum to zero".into()));
        }
        Self::new(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDistribution("empty".into()));
        }
        Ok(Self(vec![1.0 / n as f64; n]))
    }

    pub fn delta(n: usize, node: usize) -> Result<Self> {
        if node >= n {
            return Err(Error::NodeOutOfRange { node, n });
        }
        let mut p = vec![0.0; n];
        p[node] = 1.0;
        Ok(Self(p))
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn as_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.0)
    }
}

/// Unit-rate time equivalent to running a rate-`rate` diffusion for `t`.
pub fn rescale_time(t: f64, rate: f64) -> f64 {
    rate * t
}

#[derive(Debug, Clone)]
enum Repr {
    Spectral(SpectralDecomposition),
    /// Decomposition of `D^{-1/2} L D^{-1/2}` and `sqrt(d)`; kernels are
    /// `D^{-1/2} U e^{-tΛ} Uᵀ D^{1/2}`.
    Normalized(SpectralDecomposition, DVector<f64>),
    /// Laplacian `L`; kernels are `expm(-tL)`.
    Dense(DMatrix<f64>),
}

/// Evaluator for the transition matrices of one diffusion process.
#[derive(Debug, Clone)]
pub struct HeatKernel {
    kind: LaplacianKind,
    repr: Repr,
}

/// Leading-order approach to stationarity.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingEstimate {
    /// Spectral gap `λ₂`.
    pub gap: f64,
    /// `p(0)ᵀ P₂`, where `P₂` projects onto the `λ₂` eigenspace.
    pub leading_term: Vec<f64>,
    /// `max_j |leading_term_j|`.
    pub coefficient: f64,
    /// Time after which `coefficient · e^{-λ₂ t} <= eps`.
    pub t_eps: f64,
}

impl HeatKernel {
    /// Heat diffusion on `g` through a numerical eigendecomposition of `L`.
    pub fn heat(g: &Graph) -> Result<Self> {
        Ok(Self::from_decomposition(decompose(g)?))
    }

    /// Random-walk diffusion on `g` through the symmetric normalized Laplacian.
    pub fn random_walk(g: &Graph) -> Result<Self> {
        require_no_isolated(g)?;
        let repr = if g.node_count() < 2 {
            Repr::Dense(laplacian(g, LaplacianKind::RandomWalk)?)
        } else {
            let (dec, sqrt_d) = decompose_normalized(g)?;
            Repr::Normalized(dec, sqrt_d)
        };
        Ok(Self {
            kind: LaplacianKind::RandomWalk,
            repr,
        })
    }

    pub fn new(g: &Graph, kind: LaplacianKind) -> Result<Self> {
        match kind {
            LaplacianKind::Combinatorial => Self::heat(g),
            LaplacianKind::RandomWalk => Self::random_walk(g),
        }
    }

    /// Heat kernel from any decomposition of a combinatorial Laplacian,
    /// e.g. one of the exact bases.
    pub fn from_decomposition(dec: SpectralDecomposition) -> Self {
        Self {
            kind: dec.kind(),
            repr: Repr::Spectral(dec),
        }
    }

    /// Kernel evaluated with the dense exponential of `-t L` for any Laplacian `L`.
    pub fn from_laplacian(l: DMatrix<f64>, kind: LaplacianKind) -> Result<Self> {
        if !l.is_square() {
            return Err(Error::NotSquare(l.nrows(), l.ncols()));
        }
        Ok(Self {
            kind,
            repr: Repr::Dense(l),
        })
    }

    pub fn kind(&self) -> LaplacianKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        match &self.repr {
            Repr::Spectral(d) | Repr::Normalized(d, _) => d.dim(),
            Repr::Dense(l) => l.nrows(),
        }
    }

    pub fn decomposition(&self) -> Option<&SpectralDecomposition> {
        match &self.repr {
            Repr::Spectral(d) => Some(d),
            Repr::Normalized(..) | Repr::Dense(_) => None,
        }
    }

    /// Row-stochastic transition matrix `T(t)`.
    pub fn kernel_at(&self, t: f64) -> Result<DMatrix<f64>> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        if t == 0.0 {
            return Ok(DMatrix::identity(self.dim(), self.dim()));
        }
        let raw = match &self.repr {
            Repr::Spectral(d) => d.apply_function(|lambda| (-t * lambda).exp()),
            Repr::Normalized(d, sqrt_d) => {
                let k = d.apply_function(|lambda| (-t * lambda).exp());
                DMatrix::from_fn(k.nrows(), k.ncols(), |i, j| k[(i, j)] * sqrt_d[j] / sqrt_d[i])
            }
            Repr::Dense(l) => expm(&(l * -t))?,
        };
        sanitize_kernel(raw)
    }

    /// `p(t)ᵀ = p(0)ᵀ T(t)`.
    pub fn propagate(&self, p0: &Distribution, t: f64) -> Result<Distribution> {
        check_dim(self.dim(), p0)?;
        let kernel = self.kernel_at(t)?;
        let pt = kernel.tr_mul(&p0.as_vector());
        Distribution::new(pt.iter().copied().collect())
            .map_err(|e| Error::Numerical(format!("propagated vector is not a distribution: {e}")))
    }

    /// Leading-term mixing estimate for heat diffusion on a connected graph.
    ///
    /// With `P₂` the projector onto the `λ₂` eigenspace, the deviation from
    /// stationarity behaves like `e^{-λ₂ t} p(0)ᵀ P₂`; `t_eps` solves
    /// `c e^{-λ₂ t} = eps` with `c = ‖p(0)ᵀ P₂‖∞`.
    pub fn mixing_estimate(&self, p0: &Distribution, eps: f64) -> Result<MixingEstimate> {
        check_dim(self.dim(), p0)?;
        if !(eps > 0.0) {
            return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
        }
        let dec = match (&self.repr, self.kind) {
            (Repr::Spectral(d), LaplacianKind::Combinatorial) => d,
            _ => {
                return Err(Error::Unsupported(
                    "mixing estimates need a spectral heat kernel".into(),
                ))
            }
        };
        let gap = spectral_gap(dec);
        if gap <= GAP_TOL {
            return Err(Error::NoMixing);
        }
        let cluster = dec
            .clusters(CLUSTER_REL_TOL)
            .into_iter()
            .find(|r| r.contains(&1))
            .expect("index 1 belongs to a cluster");
        let leading = dec.projector(cluster).tr_mul(&p0.as_vector());
        let coefficient = leading.amax();
        let t_eps = if coefficient > eps {
            (coefficient / eps).ln() / gap
        } else {
            0.0
        };
        Ok(MixingEstimate {
            gap,
            leading_term: leading.iter().copied().collect(),
            coefficient,
            t_eps,
        })
    }
}

fn check_dim(n: usize, p0: &Distribution) -> Result<()> {
    if p0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: p0.len(),
        });
    }
    Ok(())
}

/// Applies the negative-entry policy to one probability row: entries below
/// `-NEGATIVE_TOL` are an error, smaller negatives are zeroed and the row is
/// renormalized; entries above one are capped at one.
pub(crate) fn clip_row<'a>(row: impl IntoIterator<Item = &'a mut f64>) -> Result<bool> {
    let mut clipped = false;
    for x in row {
        if !x.is_finite() {
            return Err(Error::Numerical("kernel has non-finite entries".into()));
        }
        if *x < -NEGATIVE_TOL {
            return Err(Error::Numerical(format!("kernel entry {x:e} is negative")));
        }
        if *x < 0.0 {
            *x = 0.0;
            clipped = true;
        } else if *x > 1.0 {
            *x = 1.0;
        }
    }
    Ok(clipped)
}

fn sanitize_kernel(mut k: DMatrix<f64>) -> Result<DMatrix<f64>> {
    for i in 0..k.nrows() {
        let mut row = k.row_mut(i);
        if clip_row(row.iter_mut())? {
            let s = row.sum();
            row /= s;
        }
    }
    Ok(k)
}

/// Ascending sample times for entropy curves.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid(Vec<f64>);

impl TimeGrid {
    /// Validates an explicit list: non-empty, finite, non-negative, strictly ascending.
    pub fn from_times(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::InvalidGrid("empty grid".into()));
        }
        if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::InvalidGrid("times must be finite and non-negative".into()));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid("times must be strictly ascending".into()));
        }
        Ok(Self(times))
    }

    /// `points` log-spaced times from `t_min` to `t_max` inclusive.
    pub fn log(t_min: f64, t_max: f64, points: usize) -> Result<Self> {
        check_bounds(t_min, t_max, points)?;
        if t_min <= 0.0 {
            return Err(Error::InvalidGrid("log grid needs t_min > 0".into()));
        }
        let (a, b) = (t_min.ln(), t_max.ln());
        let step = (b - a) / (points - 1) as f64;
        let mut times: Vec<f64> = (0..points).map(|i| (a + step * i as f64).exp()).collect();
        times[0] = t_min;
        times[points - 1] = t_max;
        Self::from_times(times)
    }

    /// `points` evenly spaced times from `t_min` to `t_max` inclusive.
    pub fn linear(t_min: f64, t_max: f64, points: usize) -> Result<Self> {
        check_bounds(t_min, t_max, points)?;
        let step = (t_max - t_min) / (points - 1) as f64;
        let mut times: Vec<f64> = (0..points).map(|i| t_min + step * i as f64).collect();
        times[points - 1] = t_max;
        Self::from_times(times)
    }

    /// Log grid covering `decades` decades from `t_min` with `per_decade` points each.
    pub fn decades(t_min: f64, decades: usize, per_decade: usize) -> Result<Self> {
        if decades == 0 || per_decade == 0 {
            return Err(Error::InvalidGrid("need at least one decade and one point".into()));
        }
        Self::log(t_min, t_min * 10f64.powi(decades as i32), decades * per_decade + 1)
    }

    pub fn times(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn check_bounds(t_min: f64, t_max: f64, points: usize) -> Result<()> {
    if points < 2 {
        return Err(Error::InvalidGrid("need at least two points".into()));
    }
    if !(t_min < t_max) || t_min < 0.0 || !t_max.is_finite() {
        return Err(Error::InvalidGrid(format!("need 0 <= t_min < t_max, got {t_min}, {t_max}")));
    }
    Ok(())
}
