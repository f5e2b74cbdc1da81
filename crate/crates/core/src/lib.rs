//! Exact computer algebra for period / L-sheaf table calculus.
//!
//! Everything is computed over the field `K = Q(√q)` for a fixed prime power
//! `q`, or over the Laurent ring `K[T^±]`, with exact rational arithmetic
//! throughout — no floating point anywhere.
//!
//! The main layers, bottom up:
//!
//! * [`scalar`] — the coefficient field `K = Q(√q)`;
//! * [`laurent`], [`matrix`], [`module`] — the Laurent ring `K[T^±]`, Smith
//!   normal form and finitely generated module normal forms;
//! * [`complex`], [`sympow`] — bounded cochain complexes, cohomology,
//!   duals, tensor products and symmetric powers with Koszul signs;
//! * [`weil_deligne`] — Weil–Deligne representations, their three-term
//!   cohomology complex and local Tate duality;
//! * [`spectral`], [`automorphic`], [`matcher`] — the two sides of the
//!   comparison tables and the class-field-theory dictionary between them;
//! * [`multiplicity`] — finite-group double cosets, character tables and
//!   Mackey-style multiplicity formulas;
//! * [`ffcurve`] — degree-normalized period functions and the zeta series
//!   for curves over finite fields.

pub mod automorphic;
pub mod complex;
pub mod error;
pub mod ffcurve;
pub mod laurent;
pub mod matcher;
pub mod matrix;
pub mod module;
pub mod multiplicity;
pub mod report;
pub mod scalar;
pub mod spectral;
pub mod sympow;
pub mod weil_deligne;

pub use crate::complex::{Base, Complex, GradedCohomology};
pub use crate::error::Error;
pub use crate::laurent::LaurentPoly;
pub use crate::matrix::Matrix;
pub use crate::module::FgModule;
pub use crate::report::CheckReport;
pub use crate::scalar::{ExactScalar, FieldCtx, HalfInt};
pub use crate::weil_deligne::WdRep;

