//! Exact-arithmetic Graf–Clifford algebra of exterior forms.
//!
//! The crate works on a single fiber with constant coefficients: forms are
//! sparse rational combinations of coframe blades, the Graf product turns
//! them into a Clifford algebra, and real matrix representations of that
//! algebra carry admissible bilinear pairings whose covariants satisfy the
//! geometric Fierz identities.

pub mod bilinear;
pub mod classify;
pub mod error;
pub mod exterior;
pub mod fierz;
pub mod graf;
pub mod linalg;
pub mod matrixrep;
pub mod rational;
pub mod sample;

pub use bilinear::{Isotropy, Pairing};
pub use error::{GrafError, Result};
pub use exterior::{Blade, Form, Metric, Signature};
pub use graf::{GrafAlgebra, PmSign, TruncationSplit, VolumeForm};
pub use linalg::{RatMatrix, Spinor};
pub use matrixrep::{AbsType, Field, MainSubalgebra, Rep};
pub use rational::Rational;

/// Version string embedded in every report.
pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));
