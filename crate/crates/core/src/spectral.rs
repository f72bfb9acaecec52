//! Laplacians, symmetric eigendecompositions and closed-form spectra.
//!
//! Dense decompositions are delegated to `nalgebra::SymmetricEigen`
//! (Householder tridiagonalization followed by implicit QR). Complete, path
//! and circulant graphs also get exact bases built from their known
//! eigenvectors.

use std::f64::consts::PI;
use std::ops::Range;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{connected_components, Graph, StepSet};

/// Which generator drives the diffusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LaplacianKind {
    /// `L = D - A`; heat diffusion.
    Combinatorial,
    /// `L_RW = I - D^{-1} A`; node-centric random walk.
    RandomWalk,
}

impl LaplacianKind {
    pub fn name(self) -> &'static str {
        match self {
            LaplacianKind::Combinatorial => "heat",
            LaplacianKind::RandomWalk => "rw",
        }
    }
}

/// Rejects graphs with isolated nodes. A single node is allowed: its
/// Laplacian is the 1x1 zero matrix.
pub(crate) fn require_no_isolated(g: &Graph) -> Result<()> {
    if g.node_count() > 1 {
        if let Some(i) = g.first_isolated_node() {
            return Err(Error::IsolatedNode(i));
        }
    }
    Ok(())
}

/// Dense Laplacian of `g`.
pub fn laplacian(g: &Graph, kind: LaplacianKind) -> Result<DMatrix<f64>> {
    require_no_isolated(g)?;
    let mut l = g.dense_adjacency()?;
    let degrees = g.degrees();
    match kind {
        LaplacianKind::Combinatorial => {
            l.neg_mut();
            for (i, &d) in degrees.iter().enumerate() {
                l[(i, i)] = d as f64;
            }
        }
        LaplacianKind::RandomWalk => {
            for (i, &d) in degrees.iter().enumerate() {
                let mut row = l.row_mut(i);
                row /= -(d.max(1) as f64);
                if d > 0 {
                    row[i] = 1.0;
                }
            }
        }
    }
    Ok(l)
}

/// Ordered eigenpairs of a Laplacian.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
    kind: LaplacianKind,
    exact: bool,
}

impl SpectralDecomposition {
    pub fn new(
        eigenvalues: DVector<f64>,
        eigenvectors: DMatrix<f64>,
        kind: LaplacianKind,
        exact: bool,
    ) -> Result<Self> {
        let n = eigenvalues.len();
        if eigenvectors.nrows() != n || eigenvectors.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: eigenvectors.ncols(),
            });
        }
        Ok(Self {
            eigenvalues,
            eigenvectors,
            kind,
            exact,
        })
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Column `k` pairs with `eigenvalues()[k]`.
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn kind(&self) -> LaplacianKind {
        self.kind
    }

    /// True when the basis comes from a closed form rather than a solver.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U diag(f(λ)) Uᵀ`.
    pub fn apply_function(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let mut scaled = self.eigenvectors.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= f(self.eigenvalues[k]);
        }
        scaled * self.eigenvectors.transpose()
    }

    /// `U diag(λ) Uᵀ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.apply_function(|x| x)
    }

    /// Groups of (near-)equal eigenvalues. Neighbours closer than
    /// `rel_tol * max(1, |λ_max|)` share a cluster.
    pub fn clusters(&self, rel_tol: f64) -> Vec<Range<usize>> {
        let n = self.dim();
        let scale = self.eigenvalues.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let tol = rel_tol * scale;
        let mut out = Vec::new();
        let mut start = 0;
        for k in 1..=n {
            if k == n || self.eigenvalues[k] - self.eigenvalues[k - 1] > tol {
                out.push(start..k);
                start = k;
            }
        }
        out
    }

    /// Orthogonal projector onto the span of columns `range`.
    pub fn projector(&self, range: Range<usize>) -> DMatrix<f64> {
        let cols = self.eigenvectors.columns(range.start, range.len());
        cols * cols.transpose()
    }
}

/// Default relative tolerance for grouping degenerate eigenvalues.
pub const CLUSTER_REL_TOL: f64 = 1e-8;

/// Dense symmetric eigendecomposition with ascending eigenvalues.
///
/// The input is symmetrized as `(M + Mᵀ)/2` first.
pub fn eig_symmetric(m: &DMatrix<f64>) -> Result<SpectralDecomposition> {
    if !m.is_square() {
        return Err(Error::NotSquare(m.nrows(), m.ncols()));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    SpectralDecomposition::new(values, vectors, LaplacianKind::Combinatorial, false)
}

/// Numerical decomposition of the combinatorial Laplacian of `g`.
///
/// The null space is replaced by the exact normalized component indicators
/// with eigenvalue 0, and the remaining eigenvectors are projected off it, so
/// kernels built from the result conserve mass to rounding.
pub fn decompose(g: &Graph) -> Result<SpectralDecomposition> {
    let dec = eig_symmetric(&laplacian(g, LaplacianKind::Combinatorial)?)?;
    let ones = vec![1.0; g.node_count()];
    Ok(deflate(dec, g, &ones, LaplacianKind::Combinatorial))
}

/// Decomposition of `D^{-1/2} L D^{-1/2}`, which is similar to `L_RW`, together
/// with `sqrt(d)`. The null space is the exact `sqrt(d)` profile of each
/// component.
pub fn decompose_normalized(g: &Graph) -> Result<(SpectralDecomposition, DVector<f64>)> {
    let l = laplacian(g, LaplacianKind::Combinatorial)?;
    let sqrt_d: Vec<f64> = g.degrees().iter().map(|&d| (d as f64).sqrt()).collect();
    let sym = DMatrix::from_fn(l.nrows(), l.ncols(), |i, j| l[(i, j)] / (sqrt_d[i] * sqrt_d[j]));
    let dec = deflate(eig_symmetric(&sym)?, g, &sqrt_d, LaplacianKind::RandomWalk);
    Ok((dec, DVector::from_vec(sqrt_d)))
}

/// Swaps the leading eigenvectors for the known null vectors `profile`
/// restricted to each component and orthogonalizes the rest against them.
fn deflate(dec: SpectralDecomposition, g: &Graph, profile: &[f64], kind: LaplacianKind) -> SpectralDecomposition {
    let n = g.node_count();
    let components = connected_components(g);
    let mut values = dec.eigenvalues().clone();
    let mut vectors = dec.eigenvectors().clone();
    let basis: Vec<DVector<f64>> = components
        .iter()
        .map(|part| {
            let mut v = DVector::zeros(n);
            for &j in part {
                v[j] = profile[j];
            }
            let norm = v.norm();
            v / norm
        })
        .collect();
    for (k, b) in basis.iter().enumerate() {
        vectors.set_column(k, b);
        values[k] = 0.0;
    }
    for k in basis.len()..n {
        let mut col = vectors.column(k).clone_owned();
        for b in &basis {
            let overlap = b.dot(&col);
            col.axpy(-overlap, b, 1.0);
        }
        let norm = col.norm();
        vectors.set_column(k, &(col / norm));
    }
    SpectralDecomposition {
        eigenvalues: values,
        eigenvectors: vectors,
        kind,
        exact: false,
    }
}

/// Exact decomposition of `L(K_n)`: eigenvalues `(0, n, ..., n)`; the first
/// column is constant and the rest is a Helmert completion.
pub fn spectrum_complete(n: usize) -> Result<SpectralDecomposition> {
    if n == 0 {
        return Err(Error::InvalidSize("n must be at least 1".into()));
    }
    let nf = n as f64;
    let values = DVector::from_fn(n, |k, _| if k == 0 { 0.0 } else { nf });
    let vectors = DMatrix::from_fn(n, n, |j, k| {
        if k == 0 {
            return 1.0 / nf.sqrt();
        }
        let kf = k as f64;
        let norm = (kf * (kf + 1.0)).sqrt();
        match j.cmp(&k) {
            std::cmp::Ordering::Less => 1.0 / norm,
            std::cmp::Ordering::Equal => -kf / norm,
            std::cmp::Ordering::Greater => 0.0,
        }
    });
    SpectralDecomposition::new(values, vectors, LaplacianKind::Combinatorial, true)
}

/// Exact decomposition of `L(P_n)` in the DCT-II basis.
///
/// `λ_k = 2(1 - cos(πk/n)) = 4 sin²(πk/2n)` and
/// `v_j^(k) = sqrt((2 - δ_k0)/n) cos(πk(j + 1/2)/n)` for `j, k = 0..n-1`.
pub fn spectrum_path(n: usize) -> Result<SpectralDecomposition> {
    if n == 0 {
        return Err(Error::InvalidSize("n must be at least 1".into()));
    }
    let nf = n as f64;
    let values = DVector::from_fn(n, |k, _| {
        let s = (PI * k as f64 / (2.0 * nf)).sin();
        4.0 * s * s
    });
    let vectors = DMatrix::from_fn(n, n, |j, k| {
        let weight = if k == 0 { 1.0 } else { 2.0 };
        (weight / nf).sqrt() * (PI * k as f64 * (j as f64 + 0.5) / nf).cos()
    });
    SpectralDecomposition::new(values, vectors, LaplacianKind::Combinatorial, true)
}

/// Laplacian spectrum of `C_n(S)` indexed by Fourier frequency.
#[derive(Debug, Clone)]
pub struct CirculantSpectrum {
    n: usize,
    steps: StepSet,
    by_frequency: Vec<f64>,
}

impl CirculantSpectrum {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn steps(&self) -> &StepSet {
        &self.steps
    }

    pub fn degree(&self) -> usize {
        self.steps.degree(self.n)
    }

    /// `λ(k)` for frequency `k = 0..n-1`, i.e. the unordered spectrum.
    pub fn by_frequency(&self) -> &[f64] {
        &self.by_frequency
    }

    /// Adjacency eigenvalues `μ_k = d - λ(k)`.
    pub fn adjacency_eigenvalues(&self) -> Vec<f64> {
        let d = self.degree() as f64;
        self.by_frequency.iter().map(|l| d - l).collect()
    }

    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.by_frequency.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Unitary DFT matrix `F = n^{-1/2} [ω^{jk}]`, `ω = e^{-2πi/n}`, with
    /// `L = F* diag(λ) F`.
    pub fn dft_matrix(&self) -> DMatrix<Complex64> {
        let n = self.n;
        let scale = 1.0 / (n as f64).sqrt();
        DMatrix::from_fn(n, n, |j, k| {
            let angle = -2.0 * PI * ((j * k) % n) as f64 / n as f64;
            Complex64::from_polar(scale, angle)
        })
    }

    /// Real orthonormal Fourier basis (cosine/sine pairs), sorted by eigenvalue.
    pub fn to_decomposition(&self) -> SpectralDecomposition {
        let n = self.n;
        let nf = n as f64;
        let mut pairs: Vec<(f64, DVector<f64>)> = Vec::with_capacity(n);
        pairs.push((self.by_frequency[0], DVector::from_element(n, 1.0 / nf.sqrt())));
        for k in 1..n.div_ceil(2) {
            let w = 2.0 * PI * k as f64 / nf;
            let c = DVector::from_fn(n, |j, _| (2.0 / nf).sqrt() * (w * j as f64).cos());
            let s = DVector::from_fn(n, |j, _| (2.0 / nf).sqrt() * (w * j as f64).sin());
            pairs.push((self.by_frequency[k], c));
            pairs.push((self.by_frequency[k], s));
        }
        if n.is_multiple_of(2) {
            let alt = DVector::from_fn(n, |j, _| if j % 2 == 0 { 1.0 } else { -1.0 } / nf.sqrt());
            pairs.push((self.by_frequency[n / 2], alt));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let values = DVector::from_iterator(n, pairs.iter().map(|p| p.0));
        let mut vectors = DMatrix::zeros(n, n);
        for (k, (_, v)) in pairs.iter().enumerate() {
            vectors.set_column(k, v);
        }
        SpectralDecomposition::new(values, vectors, LaplacianKind::Combinatorial, true)
            .expect("square basis")
    }
}

/// Spectrum of `C_n(S)`: `λ(k) = d - Σ_s w_s cos(2πsk/n)` where `w_s = 2`,
/// except `w_{n/2} = 1` since that offset contributes a single neighbour.
pub fn spectrum_circulant(n: usize, steps: &StepSet) -> Result<CirculantSpectrum> {
    if n < 2 {
        return Err(Error::InvalidSize("circulant graph needs n >= 2".into()));
    }
    let steps = StepSet::new(n, steps.steps().iter().copied())?;
    let d = steps.degree(n) as f64;
    let by_frequency = (0..n)
        .map(|k| {
            let mu: f64 = steps
                .steps()
                .iter()
                .map(|&s| {
                    let w = if 2 * s == n { 1.0 } else { 2.0 };
                    w * (2.0 * PI * ((s * k) % n) as f64 / n as f64).cos()
                })
                .sum();
            // λ(0) = d - d exactly
            if k == 0 {
                0.0
            } else {
                d - mu
            }
        })
        .collect();
    Ok(CirculantSpectrum {
        n,
        steps,
        by_frequency,
    })
}

/// Second-smallest eigenvalue (algebraic connectivity); 0 for a single node.
pub fn spectral_gap(dec: &SpectralDecomposition) -> f64 {
    if dec.dim() < 2 {
        0.0
    } else {
        dec.eigenvalues()[1]
    }
}

/// Gap below which a graph is treated as disconnected.
pub const GAP_TOL: f64 = 1e-10;

/// Second-smallest eigenvalue of `L_RW`, computed through the similar
/// symmetric matrix `D^{-1/2} L D^{-1/2}`.
pub fn random_walk_gap(g: &Graph) -> Result<f64> {
    Ok(spectral_gap(&decompose_normalized(g)?.0))
}

/// Per-index comparison of sorted spectra before and after adding one edge.
#[derive(Debug, Clone)]
pub struct WeylReport {
    pub before: Vec<f64>,
    pub after: Vec<f64>,
    /// `λ_i(G) ≤ λ_i(G') + tol` for each `i`.
    pub monotone: Vec<bool>,
    /// `λ_i(G') ≤ n + tol` for each `i`.
    pub below_complete: Vec<bool>,
    pub holds: bool,
}

pub const WEYL_TOL: f64 = 1e-9;

/// Compares the Laplacian spectra of `g` and `g + (u, v)`.
pub fn check_weyl_monotonicity(g: &Graph, extra_edge: (usize, usize)) -> Result<WeylReport> {
    let (u, v) = extra_edge;
    if u == v {
        return Err(Error::SelfLoop(u));
    }
    let augmented = g.with_edge(u, v)?;
    let before: Vec<f64> = decompose(g)?.eigenvalues().iter().copied().collect();
    let after: Vec<f64> = decompose(&augmented)?.eigenvalues().iter().copied().collect();
    let n = g.node_count() as f64;
    let monotone: Vec<bool> = before
        .iter()
        .zip(&after)
        .map(|(a, b)| *a <= *b + WEYL_TOL)
        .collect();
    let below_complete: Vec<bool> = after.iter().map(|b| *b <= n + WEYL_TOL).collect();
    let holds = monotone.iter().chain(&below_complete).all(|&x| x);
    Ok(WeylReport {
        before,
        after,
        monotone,
        below_complete,
        holds,
    })
}
