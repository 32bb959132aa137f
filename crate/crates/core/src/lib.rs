//! Pseudodifferential operators with completely periodic symbols.
//!
//! A symbol `a(x, ω)` periodic with respect to a lattice `L Z^{2d}` acts
//! through its lattice Fourier coefficients as a series of time-frequency
//! shifts. The crate evaluates that series on sampled signals, bounds it,
//! inverts it by a Neumann series when the zeroth coefficient dominates,
//! and applies the machinery to Gabor frame operators.

pub mod analysis;
pub mod error;
pub mod gabor;
pub mod io;
pub mod lattice;
pub mod operator;
pub mod quadrature;
pub mod selftest;
pub mod signal;
pub mod symbol;
pub mod weights;

pub use error::{Error, Result};
pub use lattice::{MultiIndex, PeriodMatrix, PhasePoint};
pub use num_complex::Complex64;
pub use operator::{CompiledOperator, LinearOperator, OperatorSpec};
pub use signal::{GridSignal, GridSpec};
pub use symbol::PeriodicSymbol;
pub use weights::{ModerateWeight, PolynomialWeight, Weight};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/lattice.md")]
    mod lattice {}
    #[doc = include_str!("../../../book/src/weights.md")]
    mod weights {}
    #[doc = include_str!("../../../book/src/signals.md")]
    mod signals {}
    #[doc = include_str!("../../../book/src/symbols.md")]
    mod symbols {}
    #[doc = include_str!("../../../book/src/operators.md")]
    mod operators {}
    #[doc = include_str!("../../../book/src/analysis.md")]
    mod analysis {}
    #[doc = include_str!("../../../book/src/gabor.md")]
    mod gabor {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/file-formats.md")]
    mod file_formats {}
    #[doc = include_str!("../../../book/src/conventions.md")]
    mod conventions {}
}
