//! Norm estimates, their certificates, and optimizer budgets.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::factor::Factorization;
use crate::haagerup::{Decomposition, Decomposition3};
use crate::matrix::ComplexMatrix;
use crate::mu::SplitCertificate;
use crate::pairs::CommutingPairSample;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Upper,
    Lower,
    Exact,
}

impl BoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::Upper => "upper",
            BoundKind::Lower => "lower",
            BoundKind::Exact => "exact",
        }
    }
}

/// How a value was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
    pub converged: bool,
    /// Which computation path produced the value (closed form, optimizer, ...).
    pub method: &'static str,
}

impl Trace {
    pub fn closed_form(method: &'static str, seed: u64) -> Self {
        Trace { restarts: 0, iterations: 0, seed, converged: true, method }
    }
}

/// Witness that reproduces an estimate when re-evaluated.
#[derive(Debug, Clone)]
pub enum Certificate {
    None,
    /// Coefficients `X_i` (each `k×k`) of an element `Σ X_i ⊗ b_i` of `M_k(E)`
    /// with norm at most one.
    LevelInput { k: usize, blocks: Vec<ComplexMatrix> },
    Decomposition(Decomposition),
    Decomposition3(Decomposition3),
    Split(Box<SplitCertificate>),
    Pair(Box<CommutingPairSample>),
    Factorization(Box<Factorization>),
    SplitFactorization { row: Option<Box<Factorization>>, column: Option<Box<Factorization>> },
    /// `M = B·A` with the `∞→2` norm of `A` and the `2→∞` norm of `B`.
    HilbertFactorization { a: ComplexMatrix, b: ComplexMatrix },
}

#[derive(Debug, Clone)]
pub struct NormEstimate {
    pub value: f64,
    pub bound_kind: BoundKind,
    pub certificate: Certificate,
    pub trace: Trace,
}

impl NormEstimate {
    pub fn exact(value: f64, method: &'static str, seed: u64) -> Self {
        NormEstimate {
            value,
            bound_kind: BoundKind::Exact,
            certificate: Certificate::None,
            trace: Trace::closed_form(method, seed),
        }
    }

    /// `Err(OptimizerBudgetExceeded)` when the search stopped on its budget.
    pub fn require_converged(&self) -> Result<&Self> {
        if self.trace.converged {
            Ok(self)
        } else {
            Err(Error::OptimizerBudgetExceeded)
        }
    }
}

/// Search budget. Unset fields fall back to the per-routine defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct OptOptions {
    pub restarts: Option<usize>,
    pub iters: Option<usize>,
    pub seed: u64,
    pub tol: Option<f64>,
    /// Extra zero-padded terms in decompositions and factorizations.
    pub rank_slack: usize,
    pub commutant_samples: Option<usize>,
    pub block_samples: Option<usize>,
    /// Largest ambient size of sampled commuting pairs.
    pub max_pair_size: usize,
}

impl Default for OptOptions {
    fn default() -> Self {
        OptOptions {
            restarts: None,
            iters: None,
            seed: 0,
            tol: None,
            rank_slack: 0,
            commutant_samples: None,
            block_samples: None,
            max_pair_size: 6,
        }
    }
}

impl OptOptions {
    pub fn with_seed(seed: u64) -> Self {
        OptOptions { seed, ..Self::default() }
    }

    pub fn budget(&self, restarts: usize, iters: usize, tol: f64) -> Budget {
        Budget {
            restarts: self.restarts.unwrap_or(restarts),
            iters: self.iters.unwrap_or(iters),
            tol: self.tol.unwrap_or(tol),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    pub restarts: usize,
    pub iters: usize,
    pub tol: f64,
}

impl Budget {
    pub fn starved(&self) -> bool {
        self.restarts == 0 || self.iters == 0
    }
}
