//! Conditional entropy of diffusion processes on graphs.
//!
//! Graphs are built with the generators in [`graph`], turned into heat or
//! random-walk kernels by [`diffusion`], and measured with [`entropy`].
//! Exact curves for complete and circulant graphs live in [`closed_forms`].
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audit;
pub mod closed_forms;
pub mod diffusion;
pub mod entropy;
pub mod error;
pub mod experiments;
pub mod expm;
pub mod graph;
pub mod spectral;

pub use diffusion::{Distribution, HeatKernel, TimeGrid};
pub use entropy::{conditional_entropy, EntropyCurve};
pub use error::{Error, Result};
pub use graph::{Graph, RngSeed, StepSet};
pub use spectral::{LaplacianKind, SpectralDecomposition};
