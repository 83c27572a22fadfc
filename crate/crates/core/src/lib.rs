//! Norms on tensor products of concrete operator spaces.
//!
//! Every space handled here is a finite-dimensional subspace of a
//! (possibly rectangular) matrix space `M_{p×q}`, given by a linearly
//! independent basis. On top of that data model the crate computes:
//!
//! - the minimal (spatial) tensor norm, exactly, through Kronecker products;
//! - completely bounded norms of linear maps, by amplification-level
//!   maximization and by exact closed forms for row/column domains;
//! - upper bounds on two- and three-fold Haagerup norms, by descent over
//!   invertible reparametrizations of a decomposition;
//! - the maximal tensor norm `‖·‖_μ`: upper bounds as the infimal
//!   convolution of the Haagerup norm and its transpose, lower bounds from
//!   explicit pairs of complete contractions with commuting ranges;
//! - factorization norms through row and column Hilbert spaces and the
//!   Banach `γ₂` norm between sup-norm spaces.
//!
//! Nonconvex searches are seeded multi-start routines; every randomized
//! routine takes an explicit seed and is deterministic for it.
//!
//! The crate is `no_std` and only needs `alloc`.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod cb;
pub mod error;
pub mod estimate;
pub mod factor;
pub mod haagerup;
pub mod linalg;
pub mod matrix;
pub mod mu;
pub mod optim;
pub mod pairs;
pub mod rng;
pub mod smooth;
pub mod space;

pub use error::{Error, Result};
pub use estimate::{BoundKind, Certificate, NormEstimate, OptOptions, Trace};
pub use matrix::{ComplexMatrix, C64};
pub use space::{ConcreteOperatorSpace, SpaceMap, StandardKind, Tensor3, TensorElement};
