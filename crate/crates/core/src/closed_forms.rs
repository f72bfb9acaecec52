//! Exact conditional-entropy curves for complete and circulant graphs, the
//! mean-field Erdős–Rényi approximation and the giant-component fraction.

use std::f64::consts::{E, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::diffusion::clip_row;
use crate::entropy::{entropy_of, neg_xlogx};
use crate::error::{Error, Result};
use crate::graph::StepSet;
use crate::spectral::spectrum_circulant;

/// Below this value `e^{-rate·t}` is treated as zero and the entropy as `ln n`.
const UNDERFLOW: f64 = 1e-300;

/// Circulant rows switch from the direct sum to an FFT above this size.
pub const FFT_THRESHOLD: usize = 512;

const IMAG_TOL: f64 = 1e-10;

fn check_complete_args(n: usize, t: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidSize(format!("need n >= 2, got {n}")));
    }
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    Ok(())
}

/// Diagonal and off-diagonal entries of `exp(-t L(K_n))`.
pub fn complete_heat_kernel(n: usize, t: f64) -> Result<(f64, f64)> {
    check_complete_args(n, t)?;
    let nf = n as f64;
    let x = (-nf * t).exp();
    let off = -(-nf * t).exp_m1() / nf;
    Ok((1.0 / nf + (nf - 1.0) / nf * x, off))
}

/// Conditional entropy of heat diffusion on `K_n`, for any initial distribution:
///
/// `ln n - (n-1)/n e^{-nt} ln((1 + (n-1)e^{-nt}) / (1 - e^{-nt}))
///       - (n-1)/n ln(1 - e^{-nt}) - 1/n ln(1 + (n-1)e^{-nt})`.
///
/// Evaluated with `expm1`/`ln_1p`; the `ln(1 - e^{-nt})` terms are grouped as
/// `(1 - x) ln(1 - x)` so that `t → 0` is finite.
pub fn complete_heat_entropy(n: usize, t: f64) -> Result<f64> {
    check_complete_args(n, t)?;
    let nf = n as f64;
    if t == 0.0 {
        return Ok(0.0);
    }
    let x = (-nf * t).exp();
    if x < UNDERFLOW {
        return Ok(nf.ln());
    }
    let one_minus_x = -(-nf * t).exp_m1();
    let log_diag = ((nf - 1.0) * x).ln_1p();
    let log_off = one_minus_x.ln();
    let h = nf.ln()
        - ((nf - 1.0) / nf * x + 1.0 / nf) * log_diag
        - (nf - 1.0) / nf * one_minus_x * log_off;
    Ok(h)
}

/// Random-walk conditional entropy on `K_n`. Every degree is `n - 1`, so the
/// walk is heat diffusion slowed down by `1/(n - 1)`.
pub fn complete_rw_entropy(n: usize, t: f64) -> Result<f64> {
    check_complete_args(n, t)?;
    complete_heat_entropy(n, t / (n as f64 - 1.0))
}

/// First row `h_t(r) = (1/n) Σ_k e^{-t λ(k)} ω^{kr}` of the circulant heat kernel.
pub fn circulant_kernel_row(n: usize, steps: &StepSet, t: f64) -> Result<Vec<f64>> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let spectrum = spectrum_circulant(n, steps)?;
    let weights: Vec<f64> = spectrum.by_frequency().iter().map(|l| (-t * l).exp()).collect();
    let complex = if n > FFT_THRESHOLD {
        dft_fft(&weights)
    } else {
        dft_direct(&weights)
    };
    let nf = n as f64;
    let mut row = Vec::with_capacity(n);
    for (r, z) in complex.into_iter().enumerate() {
        let z = z / nf;
        if z.im.abs() > IMAG_TOL {
            return Err(Error::Numerical(format!(
                "imaginary residual {:e} at offset {r}",
                z.im
            )));
        }
        row.push(z.re);
    }
    if clip_row(row.iter_mut())? {
        let s: f64 = row.iter().sum();
        row.iter_mut().for_each(|x| *x /= s);
    }
    Ok(row)
}

/// `Σ_k w_k ω^{kr}` with `ω = e^{-2πi/n}`, by direct summation.
pub fn dft_direct(weights: &[f64]) -> Vec<Complex64> {
    let n = weights.len();
    (0..n)
        .map(|r| {
            weights
                .iter()
                .enumerate()
                .map(|(k, &w)| Complex64::from_polar(w, -2.0 * PI * ((k * r) % n) as f64 / n as f64))
                .sum()
        })
        .collect()
}

/// Same sum as [`dft_direct`] through a forward FFT.
pub fn dft_fft(weights: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = weights.iter().map(|&w| Complex64::new(w, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

/// Full circulant kernel `T_ij = h_t((j - i) mod n)`.
pub fn circulant_kernel(n: usize, steps: &StepSet, t: f64) -> Result<DMatrix<f64>> {
    let row = circulant_kernel_row(n, steps, t)?;
    Ok(DMatrix::from_fn(n, n, |i, j| row[(j + n - i) % n]))
}

/// Conditional entropy on `C_n(S)`. Rows are shifts of each other, so the
/// value does not depend on the initial distribution.
pub fn circulant_entropy(n: usize, steps: &StepSet, t: f64) -> Result<f64> {
    Ok(entropy_of(&circulant_kernel_row(n, steps, t)?))
}

/// Expected-Laplacian approximation `⟨L⟩ = p(nI - J)` of `G(n, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldER {
    n: usize,
    p: f64,
}

impl MeanFieldER {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSize(format!("need n >= 2, got {n}")));
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidProbability(p));
        }
        Ok(Self { n, p })
    }

    fn decay(&self, t: f64) -> (f64, f64) {
        let rate = self.p * self.n as f64;
        ((-rate * t).exp(), -(-rate * t).exp_m1())
    }

    /// Diagonal entry `a = e^{-pnt} + (1 - e^{-pnt})/n`.
    pub fn a(&self, t: f64) -> f64 {
        let (x, one_minus_x) = self.decay(t);
        x + one_minus_x / self.n as f64
    }

    /// Off-diagonal entry `b = (1 - e^{-pnt})/n`.
    pub fn b(&self, t: f64) -> f64 {
        self.decay(t).1 / self.n as f64
    }

    /// `-(a ln a + (n-1) b ln b)`.
    pub fn entropy(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        if self.decay(t).0 < UNDERFLOW {
            return Ok((self.n as f64).ln());
        }
        Ok(neg_xlogx(self.a(t)) + (self.n as f64 - 1.0) * neg_xlogx(self.b(t)))
    }
}

pub fn meanfield_er_entropy(n: usize, p: f64, t: f64) -> Result<f64> {
    MeanFieldER::new(n, p)?.entropy(t)
}

/// Principal branch `W_0(x)` of the Lambert W function for `x >= -1/e`,
/// refined with Halley's iteration.
pub fn lambert_w0(x: f64) -> Result<f64> {
    let branch = -1.0 / E;
    if x.is_nan() || x < branch - 1e-15 {
        return Err(Error::InvalidParameter(format!("W_0 undefined at {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x <= branch {
        return Ok(-1.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let mut w = if x < -0.32 {
        // series around the branch point
        let p = (2.0 * (E * x + 1.0)).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x < 3.0 {
        let l = x.ln_1p();
        l * (1.0 - (1.0 + l).ln() / (2.0 + l))
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    for _ in 0..100 {
        let ew = w.exp();
        let f = w * ew - x;
        let w1 = w + 1.0;
        if w1.abs() < 1e-300 {
            break;
        }
        let step = f / (ew * w1 - (w + 2.0) * f / (2.0 * w1));
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            return Ok(w);
        }
    }
    let residual = w * w.exp() - x;
    if residual.abs() <= 1e-12 * (1.0 + x.abs()) {
        Ok(w)
    } else {
        Err(Error::Numerical(format!("Lambert W did not converge at {x}")))
    }
}

/// Fraction of nodes in the giant component of a supercritical Erdős–Rényi
/// graph with mean degree `c`: `S = 1 + W_0(-c e^{-c})/c`, the positive root of
/// `S = 1 - e^{-cS}`.
pub fn giant_component_fraction(c: f64) -> Result<f64> {
    if !(c > 1.0) || !c.is_finite() {
        return Err(Error::Subcritical(c));
    }
    let w = lambert_w0(-c * (-c).exp())?;
    Ok(1.0 + w / c)
}
