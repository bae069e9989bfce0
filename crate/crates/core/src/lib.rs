//! Invariant-form models of compact complex manifolds.
//!
//! A model is a finite-dimensional bigraded exterior algebra with `d`, `∂`,
//! `∂̄` given by structure constants. On top of it this crate computes
//! Bott-Chern, Dolbeault and de Rham cohomology, Beltrami deformations and
//! their canonical Bott-Chern deformations, and the period map into
//! Grassmannians of the fixed de Rham cohomology.

#![no_std]

extern crate alloc;

pub mod canonical;
pub mod chart;
pub mod cohomology;
pub mod corpus;
pub mod deformation;
pub mod error;
pub mod exact;
pub mod exterior;
pub mod field;
pub mod linalg;
pub mod metric;
pub mod period;
pub mod series;

pub use error::{Error, IntegrabilityFailure};
pub use exterior::{Bidegree, ExteriorBasis, Form, LieModel, ModelSpec, StructureTerm, TermKind};
pub use field::C64;
pub use series::{Exponent, FormSeries, PowerSeries};
