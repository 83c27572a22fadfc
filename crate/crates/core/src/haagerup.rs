//! Upper bounds on Haagerup tensor norms.
//!
//! `‖t‖_h = inf ‖Σ a_k a_k*‖^{1/2} ‖Σ b_k* b_k‖^{1/2}` over representations
//! `t = Σ a_k ⊗ b_k`. The first factor is the norm of the row `[a_1 … a_r]`,
//! the second that of the column `[b_1; …; b_r]`. Representations of a fixed
//! length form one orbit of `GL_r` acting by `a ← aS`, `b ← S⁻¹b`, so the
//! search descends along that orbit starting from the SVD of the
//! coefficient matrix.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::estimate::{BoundKind, Budget, Certificate, NormEstimate, OptOptions, Trace};
use crate::linalg::{expm, gl_param, inverse, operator_norm, svd};
use crate::matrix::{ComplexMatrix, C64};
use crate::optim::{minimize, Evaluation, Objective};
use crate::rng::{gaussian, stream};
use crate::smooth::smooth_norm;
use crate::space::{ConcreteOperatorSpace, SpaceRef, Tensor3, TensorElement};

pub const DEFAULT_RESTARTS: usize = 24;
pub const DEFAULT_ITERS: usize = 800;
pub const DEFAULT_TOL: f64 = 1e-8;

/// Singular values below this fraction of the largest are dropped by the
/// initial decomposition.
const SVD_RTOL: f64 = 1e-13;
/// Spread of the random starting points `exp(T)`, entries of `T` ~ N(0, s²).
const START_SPREAD: f64 = 0.5;

// ---------------------------------------------------------------------------
// Shared pieces: terms from coordinates, and the smoothed norm of a row or
// column of terms with its gradient in coordinates.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Stack {
    /// `[x_1 … x_r]`: norm `‖Σ x_k x_k*‖^{1/2}`.
    Row,
    /// `[x_1; …; x_r]`: norm `‖Σ x_k* x_k‖^{1/2}`.
    Column,
}

/// Elements `Σ_i coords[i, k] e_i`, one per column of `coords`.
pub(crate) fn terms(space: &ConcreteOperatorSpace, coords: &ComplexMatrix) -> Vec<ComplexMatrix> {
    (0..coords.cols()).map(|k| space.element(coords.column(k).data())).collect()
}

pub(crate) fn stacked(terms: &[ComplexMatrix], stack: Stack) -> ComplexMatrix {
    match stack {
        Stack::Row => ComplexMatrix::hstack(terms),
        Stack::Column => ComplexMatrix::vstack(terms),
    }
}

pub(crate) fn stack_norm(space: &ConcreteOperatorSpace, coords: &ComplexMatrix, stack: Stack) -> f64 {
    operator_norm(&stacked(&terms(space, coords), stack))
}

pub(crate) struct Leg {
    pub value: f64,
    pub exact: f64,
    /// Gradient of `value` with respect to `coords`.
    pub grad: ComplexMatrix,
}

pub(crate) fn leg(space: &ConcreteOperatorSpace, coords: &ComplexMatrix, stack: Stack, sharp: f64) -> Leg {
    let r = coords.cols();
    let s = smooth_norm(&stacked(&terms(space, coords), stack), sharp);
    let blocks = match stack {
        Stack::Row => s.grad.to_blocks(1, r),
        Stack::Column => s.grad.to_blocks(r, 1),
    };
    let grad = ComplexMatrix::from_fn(space.dim(), r, |i, k| space.basis()[i].inner(&blocks[k]));
    Leg { value: s.value, exact: s.exact, grad }
}

fn scaled_expm(d: &ComplexMatrix, step: f64) -> ComplexMatrix {
    expm(&d.scale_real(step))
}

fn random_gl(seed: u64, name: &str, index: u64, r: usize) -> ComplexMatrix {
    let mut rng = stream(seed, name, index);
    let theta: Vec<f64> = (0..2 * r * r).map(|_| START_SPREAD * gaussian(&mut rng)).collect();
    gl_param(r, &theta)
}

// ---------------------------------------------------------------------------
// Two-fold decompositions.

/// `t = Σ_k a_k ⊗ b_k` with `a_k = Σ_i a[i,k] e_i` and `b_k = Σ_j b[k,j] f_j`,
/// i.e. the coefficient matrix of `t` is `a·b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub left: SpaceRef,
    pub right: SpaceRef,
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
}

impl Decomposition {
    pub fn new(left: SpaceRef, right: SpaceRef, a: ComplexMatrix, b: ComplexMatrix) -> Result<Self> {
        if a.rows() != left.dim() || b.cols() != right.dim() || a.cols() != b.rows() {
            return Err(Error::ShapeMismatch("decomposition factors do not chain".into()));
        }
        Ok(Self { left, right, a, b })
    }

    /// Number of terms.
    pub fn len(&self) -> usize {
        self.a.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn left_terms(&self) -> Vec<ComplexMatrix> {
        terms(&self.left, &self.a)
    }

    pub fn right_terms(&self) -> Vec<ComplexMatrix> {
        terms(&self.right, &self.b.transpose())
    }

    /// `‖Σ a_k a_k*‖^{1/2} · ‖Σ b_k* b_k‖^{1/2}`.
    pub fn value(&self) -> f64 {
        stack_norm(&self.left, &self.a, Stack::Row) * stack_norm(&self.right, &self.b.transpose(), Stack::Column)
    }

    /// The value of the same terms read as a representation of `ᵗt`.
    pub fn transposed_value(&self) -> f64 {
        stack_norm(&self.right, &self.b.transpose(), Stack::Row) * stack_norm(&self.left, &self.a, Stack::Column)
    }

    pub fn tensor(&self) -> TensorElement {
        TensorElement::new(self.left.clone(), self.right.clone(), &self.a * &self.b)
            .expect("factor shapes were validated")
    }

    /// Largest coefficient error against `t`.
    pub fn reconstruction_error(&self, t: &TensorElement) -> f64 {
        (&self.a * &self.b).max_diff(t.coeffs())
    }

    /// `a ← aS`, `b ← S⁻¹b`: the same tensor, another representation.
    pub fn reparametrized(&self, s: &ComplexMatrix) -> Result<Self> {
        let inv = inverse(s)?;
        Ok(Self { left: self.left.clone(), right: self.right.clone(), a: &self.a * s, b: &inv * &self.b })
    }

    /// Append zero terms.
    pub fn padded(&self, extra: usize) -> Self {
        let r = self.len() + extra;
        Self {
            left: self.left.clone(),
            right: self.right.clone(),
            a: self.a.padded(self.a.rows(), r),
            b: self.b.padded(r, self.b.cols()),
        }
    }

    /// Rescale `a ← λa`, `b ← b/λ` so both factors have equal norm.
    pub fn balanced(&self) -> Self {
        let na = stack_norm(&self.left, &self.a, Stack::Row);
        let nb = stack_norm(&self.right, &self.b.transpose(), Stack::Column);
        if na == 0.0 || nb == 0.0 {
            return self.clone();
        }
        let lambda = libm::sqrt(nb / na);
        Self {
            left: self.left.clone(),
            right: self.right.clone(),
            a: self.a.scale_real(lambda),
            b: self.b.scale_real(1.0 / lambda),
        }
    }
}

/// SVD-based representation with `rank(coeffs)` terms and exact
/// reconstruction.
pub fn initial_decomposition(t: &TensorElement) -> Result<Decomposition> {
    if t.is_zero() {
        return Err(Error::ZeroTensor);
    }
    let c = t.coeffs();
    let dec = svd(c);
    let r = dec.rank(SVD_RTOL);
    let a = ComplexMatrix::from_fn(c.rows(), r, |i, k| dec.u[(i, k)] * libm::sqrt(dec.s[k]));
    let b = ComplexMatrix::from_fn(r, c.cols(), |k, j| dec.v[(j, k)].conj() * libm::sqrt(dec.s[k]));
    Decomposition::new(t.left().clone(), t.right().clone(), a, b)
}

/// Equalize the Frobenius norms of two factors (a cheap proxy for their
/// operator norms; the objective itself is invariant).
fn balance_pair(a: ComplexMatrix, b: ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let (na, nb) = (a.frobenius_norm(), b.frobenius_norm());
    if na == 0.0 || nb == 0.0 {
        return (a, b);
    }
    let lambda = libm::sqrt(nb / na);
    (a.scale_real(lambda), b.scale_real(1.0 / lambda))
}

/// One factor of a product objective: the terms are the columns of a
/// coordinate matrix over `space`, stacked as `stack`.
#[derive(Clone, Copy)]
pub(crate) struct LegSpec<'a> {
    pub space: &'a ConcreteOperatorSpace,
    pub stack: Stack,
}

/// `‖legs(A)‖ · ‖legs(Bᵀ)‖` over the `GL_r` orbit `A ← AS`, `B ← S⁻¹B` of a
/// factorization `C = A·B`; minimized through its logarithm.
pub(crate) struct TwoFold<'a> {
    pub a: LegSpec<'a>,
    pub b: LegSpec<'a>,
}

impl Objective for TwoFold<'_> {
    type State = (ComplexMatrix, ComplexMatrix);

    fn eval(&self, (a, b): &Self::State, sharp: f64) -> Evaluation {
        let la = leg(self.a.space, a, self.a.stack, sharp);
        let lb = leg(self.b.space, &b.transpose(), self.b.stack, sharp);
        let ga = la.grad.scale_real(1.0 / la.value);
        let gb = lb.grad.transpose().scale_real(1.0 / lb.value);
        Evaluation {
            smooth: libm::log(la.value) + libm::log(lb.value),
            exact: la.exact * lb.exact,
            grad: vec![orbit_gradient(a, b, &ga, &gb)],
        }
    }

    fn retract(&self, state: &Self::State, dir: &[ComplexMatrix], step: f64) -> Self::State {
        let (a, b) = orbit_step(state, &dir[0], step);
        balance_pair(a, b)
    }
}

/// Gradient in `T` of `f(A(I+T), (I−T)B)` from the gradients `ga`, `gb` of
/// `f` in `A` and `B`.
pub(crate) fn orbit_gradient(a: &ComplexMatrix, b: &ComplexMatrix, ga: &ComplexMatrix, gb: &ComplexMatrix) -> ComplexMatrix {
    &a.adjoint_mul(ga) - &gb.mul_adjoint(b)
}

pub(crate) fn orbit_step((a, b): &(ComplexMatrix, ComplexMatrix), d: &ComplexMatrix, step: f64) -> (ComplexMatrix, ComplexMatrix) {
    (a * &scaled_expm(d, step), &scaled_expm(d, -step) * b)
}

/// `C = A·B` with `r` terms from the SVD (zero-padded past the rank).
pub(crate) fn svd_factors(c: &ComplexMatrix, r: usize) -> (ComplexMatrix, ComplexMatrix) {
    let dec = svd(c);
    let rank = dec.rank(SVD_RTOL).min(r);
    let a = ComplexMatrix::from_fn(c.rows(), r, |i, k| if k < rank { dec.u[(i, k)] * libm::sqrt(dec.s[k]) } else { C64::new(0.0, 0.0) });
    let b = ComplexMatrix::from_fn(r, c.cols(), |k, j| if k < rank { dec.v[(j, k)].conj() * libm::sqrt(dec.s[k]) } else { C64::new(0.0, 0.0) });
    (a, b)
}

pub(crate) fn rank(c: &ComplexMatrix) -> usize {
    svd(c).rank(SVD_RTOL)
}

pub(crate) struct SearchOutcome {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Multi-start descent along the orbit of `start`: restart 0 from `start`
/// itself, restart `j` from `start` reparametrized by a random `exp(T_j)`.
/// Lowest exact value wins, ties to the lowest restart index.
pub(crate) fn orbit_search<P>(problem: &P, start: &(ComplexMatrix, ComplexMatrix), budget: Budget, seed: u64, name: &str) -> Option<SearchOutcome>
where
    P: Objective<State = (ComplexMatrix, ComplexMatrix)>,
{
    let r = start.0.cols();
    let mut best: Option<SearchOutcome> = None;
    let mut iterations = 0;
    for k in 0..budget.restarts {
        let init = if k == 0 {
            start.clone()
        } else {
            let s = random_gl(seed, name, k as u64, r);
            let inv = inverse(&s).ok()?;
            (&start.0 * &s, &inv * &start.1)
        };
        let init = problem.retract(&init, &[ComplexMatrix::zeros(r, r)], 0.0);
        let out = minimize(problem, init, budget.iters, budget.tol);
        iterations += out.iterations;
        let value = problem.eval(&out.best, f64::INFINITY).exact;
        if best.as_ref().is_none_or(|b| value < b.value) {
            best = Some(SearchOutcome { a: out.best.0, b: out.best.1, value, iterations: 0, converged: out.converged });
        }
    }
    best.map(|mut b| {
        b.iterations = iterations;
        b
    })
}

/// Best found Haagerup representation of `t`; an upper bound on `‖t‖_h`.
pub fn haagerup_upper(t: &TensorElement, opts: &OptOptions) -> Result<NormEstimate> {
    if t.is_zero() {
        return Ok(NormEstimate::exact(0.0, "zero-tensor", opts.seed));
    }
    let budget = opts.budget(DEFAULT_RESTARTS, DEFAULT_ITERS, DEFAULT_TOL);
    let init = initial_decomposition(t)?.padded(opts.rank_slack);
    let problem = TwoFold {
        a: LegSpec { space: &init.left, stack: Stack::Row },
        b: LegSpec { space: &init.right, stack: Stack::Column },
    };
    let found = orbit_search(&problem, &(init.a.clone(), init.b.clone()), budget, opts.seed, "haagerup");
    let (cert, iterations, converged) = match found {
        Some(o) => (Decomposition { a: o.a, b: o.b, ..init.clone() }.balanced(), o.iterations, o.converged),
        None => (init.balanced(), 0, false),
    };
    Ok(NormEstimate {
        value: cert.value(),
        bound_kind: BoundKind::Upper,
        certificate: Certificate::Decomposition(cert),
        trace: Trace { restarts: budget.restarts, iterations, seed: opts.seed, converged, method: "gl-descent" },
    })
}

// ---------------------------------------------------------------------------
// Three-fold decompositions.

/// `t = Σ_{k,l} a_k ⊗ m_{kl} ⊗ c_l` with `a_k` the columns of `a`, `c_l` the
/// rows of `c` and `m_{kl} = Σ_j core[k, j, l] y_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition3 {
    pub spaces: [SpaceRef; 3],
    pub a: ComplexMatrix,
    /// `r1 × (m2·r3)`, column index `j·r3 + l`.
    pub core: ComplexMatrix,
    pub c: ComplexMatrix,
}

impl Decomposition3 {
    pub fn ranks(&self) -> (usize, usize) {
        (self.a.cols(), self.c.rows())
    }

    fn middle(&self) -> ComplexMatrix {
        middle_matrix(&self.spaces[1], &self.core, self.c.rows())
    }

    /// `‖Σ a_k a_k*‖^{1/2} · ‖[m_{kl}]‖ · ‖Σ c_l* c_l‖^{1/2}`.
    pub fn value(&self) -> f64 {
        stack_norm(&self.spaces[0], &self.a, Stack::Row)
            * operator_norm(&self.middle())
            * stack_norm(&self.spaces[2], &self.c.transpose(), Stack::Column)
    }

    pub fn coeffs(&self) -> Vec<C64> {
        let (r1, r3) = self.ranks();
        let m2 = self.spaces[1].dim();
        // (a · core) as (m1·m2) × r3, then · c
        let ac = &self.a * &self.core;
        let ac3 = ac.reshaped(self.a.rows() * m2, r3);
        debug_assert_eq!(self.core.rows(), r1);
        (&ac3 * &self.c).into_data()
    }

    pub fn tensor(&self) -> Tensor3 {
        Tensor3::new(self.spaces.clone(), self.coeffs()).expect("factor shapes chain")
    }

    pub fn reconstruction_error(&self, t: &Tensor3) -> f64 {
        self.coeffs().iter().zip(t.coeffs()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }
}

/// Block matrix `[m_{kl}]` of size `(r1·p2) × (r3·q2)`.
fn middle_matrix(space: &ConcreteOperatorSpace, core: &ComplexMatrix, r3: usize) -> ComplexMatrix {
    let r1 = core.rows();
    let m2 = space.dim();
    let blocks: Vec<ComplexMatrix> = (0..r1 * r3)
        .map(|kl| {
            let (k, l) = (kl / r3, kl % r3);
            let g: Vec<C64> = (0..m2).map(|j| core[(k, j * r3 + l)]).collect();
            space.element(&g)
        })
        .collect();
    ComplexMatrix::from_blocks(&blocks, r3)
}

pub fn initial_decomposition3(t: &Tensor3) -> Result<Decomposition3> {
    if t.is_zero() {
        return Err(Error::ZeroTensor);
    }
    let [m1, m2, m3] = t.dims();
    let c1 = ComplexMatrix::new(m1, m2 * m3, t.coeffs().to_vec())?;
    let c3 = ComplexMatrix::new(m1 * m2, m3, t.coeffs().to_vec())?;
    let s1 = svd(&c1);
    let r1 = s1.rank(SVD_RTOL);
    let a = s1.u.block(0, 0, m1, r1);
    // Column-orthonormal u from the SVD of the adjoint keeps things thin.
    let s3 = svd(&c3.adjoint());
    let r3 = s3.rank(SVD_RTOL);
    let c = s3.u.block(0, 0, m3, r3).adjoint();
    let t1 = a.adjoint_mul(&c1); // r1 × (m2·m3)
    let t3 = ComplexMatrix::new(r1 * m2, m3, t1.into_data())?;
    let g3 = t3.mul_adjoint(&c); // (r1·m2) × r3
    let core = ComplexMatrix::new(r1, m2 * r3, g3.into_data())?;
    Ok(Decomposition3 { spaces: t.spaces().clone(), a, core, c })
}

struct ThreeFold<'a> {
    spaces: &'a [SpaceRef; 3],
}

type State3 = (ComplexMatrix, ComplexMatrix, ComplexMatrix);

impl ThreeFold<'_> {
    fn balance(&self, (a, g, c): State3) -> State3 {
        let (na, ng, nc) = (a.frobenius_norm(), g.frobenius_norm(), c.frobenius_norm());
        if na == 0.0 || ng == 0.0 || nc == 0.0 {
            return (a, g, c);
        }
        let f = libm::cbrt(na * ng * nc);
        (a.scale_real(f / na), g.scale_real(f / ng), c.scale_real(f / nc))
    }
}

impl Objective for ThreeFold<'_> {
    type State = State3;

    fn eval(&self, (a, g, c): &State3, sharp: f64) -> Evaluation {
        let (r1, r3) = (a.cols(), c.rows());
        let mid = &self.spaces[1];
        let m2 = mid.dim();
        let la = leg(&self.spaces[0], a, Stack::Row, sharp);
        let lc = leg(&self.spaces[2], &c.transpose(), Stack::Column, sharp);
        let sm = smooth_norm(&middle_matrix(mid, g, r3), sharp);
        let ga = la.grad.scale_real(1.0 / la.value);
        let gc = lc.grad.transpose().scale_real(1.0 / lc.value);
        let blocks = sm.grad.scale_real(1.0 / sm.value).to_blocks(r1, r3);
        let gg = ComplexMatrix::from_fn(r1, m2 * r3, |k, jl| {
            let (j, l) = (jl / r3, jl % r3);
            mid.basis()[j].inner(&blocks[k * r3 + l])
        });
        let g3 = g.clone().reshaped(r1 * m2, r3);
        let gg3 = gg.clone().reshaped(r1 * m2, r3);
        let d1 = &a.adjoint_mul(&ga) - &gg.mul_adjoint(g);
        let d3 = &gc.mul_adjoint(c) - &g3.adjoint_mul(&gg3);
        Evaluation {
            smooth: libm::log(la.value) + libm::log(sm.value) + libm::log(lc.value),
            exact: la.exact * sm.exact * lc.exact,
            grad: vec![d1, d3],
        }
    }

    fn retract(&self, (a, g, c): &State3, dir: &[ComplexMatrix], step: f64) -> State3 {
        let r3 = c.rows();
        let m2 = self.spaces[1].dim();
        let a = a * &scaled_expm(&dir[0], step);
        let g = &scaled_expm(&dir[0], -step) * g;
        let g3 = { let rows = g.rows() * m2; g.reshaped(rows, r3) };
        let g3 = &g3 * &scaled_expm(&dir[1], -step);
        let g = g3.reshaped(a.cols(), m2 * r3);
        let c = &scaled_expm(&dir[1], step) * c;
        self.balance((a, g, c))
    }
}

/// Best found three-fold Haagerup representation; an upper bound on
/// `‖t‖_{h}` for `E₁ ⊗ E₂ ⊗ E₃`.
pub fn haagerup3_upper(t: &Tensor3, opts: &OptOptions) -> Result<NormEstimate> {
    if t.is_zero() {
        return Ok(NormEstimate::exact(0.0, "zero-tensor", opts.seed));
    }
    let budget = opts.budget(DEFAULT_RESTARTS, DEFAULT_ITERS, DEFAULT_TOL);
    let init = initial_decomposition3(t)?;
    let (r1, r3) = init.ranks();
    let m2 = t.dims()[1];
    let problem = ThreeFold { spaces: &init.spaces };
    let mut best: Option<(f64, Decomposition3, bool)> = None;
    let mut iterations = 0;
    for k in 0..budget.restarts {
        let start = if k == 0 {
            (init.a.clone(), init.core.clone(), init.c.clone())
        } else {
            let s1 = random_gl(opts.seed, "haagerup3-left", k as u64, r1);
            let s3 = random_gl(opts.seed, "haagerup3-right", k as u64, r3);
            let g = &inverse(&s1)? * &init.core;
            let g3 = ComplexMatrix::new(r1 * m2, r3, g.into_data())?;
            let g3 = &g3 * &inverse(&s3)?;
            (&init.a * &s1, ComplexMatrix::new(r1, m2 * r3, g3.into_data())?, &s3 * &init.c)
        };
        let out = minimize(&problem, problem.balance(start), budget.iters, budget.tol);
        iterations += out.iterations;
        let (a, core, c) = out.best;
        let cand = Decomposition3 { spaces: init.spaces.clone(), a, core, c };
        let value = cand.value();
        if best.as_ref().is_none_or(|b| value < b.0) {
            best = Some((value, cand, out.converged));
        }
    }
    let (value, cert, converged) = best.unwrap_or_else(|| (init.value(), init.clone(), false));
    Ok(NormEstimate {
        value,
        bound_kind: BoundKind::Upper,
        certificate: Certificate::Decomposition3(cert),
        trace: Trace { restarts: budget.restarts, iterations, seed: opts.seed, converged, method: "gl-descent" },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::gaussian_matrix;
    use crate::space::StandardKind;
    use alloc::format;
    use alloc::sync::Arc;

    fn sp(s: &str) -> SpaceRef {
        Arc::new(ConcreteOperatorSpace::standard(s.parse::<StandardKind>().unwrap()))
    }

    #[test]
    fn svd_start_reconstructs() {
        let mut rng = stream(1, "t", 0);
        let t = TensorElement::new(sp("rowcap:2"), sp("full:2x2"), gaussian_matrix(&mut rng, 2, 4)).unwrap();
        let d = initial_decomposition(&t).unwrap();
        assert_eq!(d.len(), 2);
        assert!(d.reconstruction_error(&t) < 1e-12);
        let z = t.with_coeffs(ComplexMatrix::zeros(2, 4)).unwrap();
        assert_eq!(initial_decomposition(&z), Err(Error::ZeroTensor));
    }

    #[test]
    fn identity_tensors() {
        for n in [2usize, 3] {
            let (r, c) = (sp(&format!("row:{n}")), sp(&format!("column:{n}")));
            let cr = haagerup_upper(&TensorElement::diagonal(c.clone(), r.clone()).unwrap(), &OptOptions::default()).unwrap();
            assert!((cr.value - 1.0).abs() < 1e-4, "{}", cr.value);
            let rc = haagerup_upper(&TensorElement::diagonal(r, c).unwrap(), &OptOptions::default()).unwrap();
            assert!((rc.value - n as f64).abs() < 1e-2, "{}", rc.value);
            assert!(rc.value >= n as f64 - 1e-9);
        }
    }

    #[test]
    fn rank_one_is_product_of_norms() {
        let mut rng = stream(2, "t", 0);
        let (e, f) = (sp("rowcap:2"), sp("full:2x2"));
        let x = gaussian_matrix(&mut rng, 2, 1);
        let y = gaussian_matrix(&mut rng, 1, 4);
        let t = TensorElement::new(e.clone(), f.clone(), &x * &y).unwrap();
        let expect = operator_norm(&e.element(x.data())) * operator_norm(&f.element(y.data()));
        let h = haagerup_upper(&t, &OptOptions::default()).unwrap();
        assert!((h.value - expect).abs() < 1e-8 * expect);
    }

    #[test]
    fn certificate_matches_value_and_bounds_min() {
        let mut rng = stream(3, "t", 0);
        let t = TensorElement::new(sp("full:2x2"), sp("rowcap:2"), gaussian_matrix(&mut rng, 4, 2)).unwrap();
        let h = haagerup_upper(&t, &OptOptions::default()).unwrap();
        let Certificate::Decomposition(d) = &h.certificate else { panic!() };
        assert!(d.reconstruction_error(&t) < 1e-10);
        assert!((d.value() - h.value).abs() < 1e-12);
        assert!(t.min_norm() <= h.value + 1e-10);
        let s = random_gl(9, "x", 0, d.len());
        assert!(d.reparametrized(&s).unwrap().reconstruction_error(&t) < 1e-10);
    }

    #[test]
    fn slack_terms_are_zero_padded() {
        let t = TensorElement::diagonal(sp("column:2"), sp("row:2")).unwrap();
        let opts = OptOptions { rank_slack: 2, restarts: Some(2), ..OptOptions::default() };
        let h = haagerup_upper(&t, &opts).unwrap();
        let Certificate::Decomposition(d) = &h.certificate else { panic!() };
        assert_eq!(d.len(), 4);
        assert!((h.value - 1.0).abs() < 1e-4);
    }

    #[test]
    fn three_fold_examples() {
        let (c, s, r) = (sp("column:2"), sp("scalar"), sp("row:2"));
        let mut coeffs = vec![C64::new(0.0, 0.0); 4];
        coeffs[0] = C64::new(1.0, 0.0); // (0,0,0)
        coeffs[3] = C64::new(1.0, 0.0); // (1,0,1)
        let t = Tensor3::new([c, s, r], coeffs).unwrap();
        let h = haagerup3_upper(&t, &OptOptions::default()).unwrap();
        assert!(h.value >= 1.0 - 1e-9 && h.value <= 1.0 + 1e-3, "{}", h.value);
        let h3 = haagerup3_upper(&t.scaled(C64::new(3.0, 0.0)), &OptOptions::default()).unwrap();
        assert!((h3.value - 3.0).abs() < 1e-2);
        let Certificate::Decomposition3(d) = &h.certificate else { panic!() };
        assert!(d.reconstruction_error(&t) < 1e-10);
    }

    #[test]
    fn three_fold_rank_one() {
        let mut rng = stream(5, "t", 0);
        let sps = [sp("rowcap:2"), sp("full:2x2"), sp("column:2")];
        let xs: Vec<ComplexMatrix> = sps.iter().map(|s| gaussian_matrix(&mut rng, 1, s.dim())).collect();
        let mut coeffs = Vec::new();
        for i in 0..2 {
            for j in 0..4 {
                for l in 0..2 {
                    coeffs.push(xs[0].data()[i] * xs[1].data()[j] * xs[2].data()[l]);
                }
            }
        }
        let expect: f64 = sps.iter().zip(&xs).map(|(s, x)| operator_norm(&s.element(x.data()))).product();
        let t = Tensor3::new(sps, coeffs).unwrap();
        let h = haagerup3_upper(&t, &OptOptions::default()).unwrap();
        assert!((h.value - expect).abs() < 1e-6 * expect, "{} vs {expect}", h.value);
        assert!(t.min_norm() <= h.value + 1e-10);
    }
}
