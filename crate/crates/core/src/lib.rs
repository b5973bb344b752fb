//! Gibbs measures and truncated Hamiltonian flows for five dispersive models.
//!
//! The crate is `no_std` (it needs `alloc`). It covers:
//!
//! - [`basis`]: spectral bases, projectors and grid transforms for the zonal
//!   sphere, the circle and the flat two-torus;
//! - [`randfield`]: sampling of the Gaussian free measures and field norms;
//! - [`functionals`]: renormalized nonlinearities and energies;
//! - [`gibbs`]: Gibbs densities, normalization, importance-weighted ensembles;
//! - [`flow`]: interaction-picture RK4 integration of the truncated flows;
//! - [`stats`]: exact Gaussian moments, Cauchy-rate estimation and weighted
//!   two-sample invariance tests;
//! - [`weyl`]: torus eigenvalue enumeration and the logarithmic growth of the
//!   renormalization constant.
//!
//! Everything is a pure function of its inputs. Work over many sample indices
//! goes through an [`Executor`], so callers with threads can parallelize
//! without changing any result bit.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod basis;
pub mod exec;
pub mod fft;
pub mod flow;
pub mod functionals;
pub mod gibbs;
pub mod model;
pub mod randfield;
pub mod stats;
pub mod weyl;

mod error;

pub use basis::{Basis, SpectralField};
pub use error::{Error, Result};
pub use exec::{Executor, Sequential};
pub use model::{ModeIndex, Model};
pub use randfield::RngStream;

/// Double-precision complex number used for all spectral coefficients.
pub type Complex = num_complex::Complex<f64>;

/// Crate version, echoed into every artifact written by the CLI.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
