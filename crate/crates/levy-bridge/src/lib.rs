//! Schrödinger-problem stochastic interpolation driven by Lévy noise.
//!
//! Modules: [`spectral`] (grids, Fourier multipliers), [`kernels`] (closed-form
//! transition kernels), [`bridge`] (marginal-fitting solver), [`quantum`]
//! (pseudodifferential Schrödinger dynamics), [`markov_diag`] (non-Markov
//! witness search), [`jumps`] (compound-Poisson simulation and jump rates).

pub mod acceptance;
pub mod bridge;
pub mod error;
pub mod io;
pub mod jumps;
pub mod kernels;
pub mod levy_quad;
pub mod markov_diag;
pub mod quad;
pub mod quantum;
pub mod spectral;
pub mod special;

pub use error::{Error, Result};
pub use spectral::{ComplexField, Grid1D, NoiseKind, RealField};
