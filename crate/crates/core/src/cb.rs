//! Completely bounded norms of maps between concrete spaces.
//!
//! An element of `M_k(E)` is written `X = Σ X_i ⊗ b_i` with `X_i ∈ M_k`, so
//! its norm is the operator norm of a `kp × kq` Kronecker sum and
//! `(id ⊗ u)(X) = Σ X_i ⊗ u(b_i)`. The level-`k` norm of `u` is the supremum of
//! the ratio of the two.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::estimate::{BoundKind, Certificate, NormEstimate, OptOptions, Trace};
use crate::linalg::operator_norm;
use crate::matrix::{ComplexMatrix, C64};
use crate::optim::{minimize, Evaluation, Objective};
use crate::rng::{gaussian_matrix, stream};
use crate::smooth::smooth_norm;
use crate::space::{ConcreteOperatorSpace, Hilbertian, SpaceMap};

pub const DEFAULT_RESTARTS: usize = 16;
pub const DEFAULT_ITERS: usize = 500;
pub const DEFAULT_TOL: f64 = 1e-10;
/// Relative inflation applied to optimizer cb estimates (lower bounds) when
/// they are used where an upper bound is needed.
pub const SAFETY_INFLATION: f64 = 1e-3;

/// Level at which the cb norm of a map into `M_{p×q}` is attained: `max(p, q)`
/// (the codomain sits in `M_{max(p,q)}`).
pub fn smith_level(u: &SpaceMap) -> usize {
    let (p, q) = u.codomain().ambient();
    p.max(q)
}

/// `Σ X_i ⊗ m_i`.
pub fn amplify(blocks: &[ComplexMatrix], mats: &[ComplexMatrix]) -> ComplexMatrix {
    let mut out = blocks[0].kron(&mats[0]);
    for (x, m) in blocks.iter().zip(mats).skip(1) {
        out = &out + &x.kron(m);
    }
    out
}

/// Gradient with respect to each `X_i` of `Re⟨g, Σ X_i ⊗ m_i⟩`.
fn amplify_pullback(g: &ComplexMatrix, k: usize, mats: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    let blocks = g.to_blocks(k, k);
    mats.iter()
        .map(|m| ComplexMatrix::from_fn(k, k, |a, b| m.inner(&blocks[a * k + b])))
        .collect()
}

struct LevelProblem {
    k: usize,
    domain: Vec<ComplexMatrix>,
    images: Vec<ComplexMatrix>,
}

impl Objective for LevelProblem {
    type State = Vec<ComplexMatrix>;

    fn eval(&self, x: &Self::State, sharp: f64) -> Evaluation {
        let num = smooth_norm(&amplify(x, &self.images), sharp);
        let den = smooth_norm(&amplify(x, &self.domain), sharp);
        // minimize log‖B(X)‖ − log‖A(X)‖
        let ga = amplify_pullback(&num.grad, self.k, &self.images);
        let gb = amplify_pullback(&den.grad, self.k, &self.domain);
        let grad = ga
            .iter()
            .zip(&gb)
            .map(|(a, b)| &b.scale_real(1.0 / den.value) - &a.scale_real(1.0 / num.value.max(1e-300)))
            .collect();
        let smooth = libm::log(den.value) - libm::log(num.value.max(1e-300));
        Evaluation { smooth, exact: -num.exact / den.exact, grad }
    }

    fn retract(&self, x: &Self::State, dir: &[ComplexMatrix], step: f64) -> Self::State {
        let mut y: Vec<ComplexMatrix> = x
            .iter()
            .zip(dir)
            .map(|(a, d)| {
                let mut z = a.clone();
                z.axpy(C64::new(step, 0.0), d);
                z
            })
            .collect();
        let n = libm::sqrt(y.iter().map(|m| m.frobenius_norm_sqr()).sum::<f64>());
        for m in &mut y {
            *m = m.scale_real(1.0 / n);
        }
        y
    }
}

/// Best found `sup{‖(id_{M_k} ⊗ u)(X)‖ : ‖X‖_{M_k(E)} ≤ 1}`; a lower bound on
/// the level-`k` norm. The certificate has norm one in `M_k(E)`.
pub fn level_norm(u: &SpaceMap, k: usize, opts: &OptOptions) -> Result<NormEstimate> {
    if k == 0 {
        return Err(Error::ShapeMismatch("amplification level must be positive".into()));
    }
    if u.is_zero() {
        return Ok(NormEstimate::exact(0.0, "zero-map", opts.seed));
    }
    let budget = opts.budget(DEFAULT_RESTARTS, DEFAULT_ITERS, DEFAULT_TOL);
    let problem = LevelProblem { k, domain: u.domain().basis().to_vec(), images: u.images() };
    let m = u.domain().dim();
    let mut best: Option<(f64, Vec<ComplexMatrix>, bool)> = None;
    let mut iterations = 0;
    for r in 0..budget.restarts {
        let mut rng = stream(opts.seed, "level-norm", r as u64);
        let start: Vec<ComplexMatrix> = (0..m).map(|_| gaussian_matrix(&mut rng, k, k)).collect();
        let start = problem.retract(&start, &start, 0.0);
        let out = minimize(&problem, start, budget.iters, budget.tol);
        iterations += out.iterations;
        let (value, blocks) = certify_level(&problem, out.best);
        if best.as_ref().is_none_or(|b| value > b.0) {
            best = Some((value, blocks, out.converged));
        }
    }
    let (value, blocks, converged) = match best {
        Some(b) => b,
        None => {
            // No search budget: evaluate the normalized all-ones input only.
            let x: Vec<ComplexMatrix> = (0..m).map(|_| ComplexMatrix::identity(k)).collect();
            let (v, x) = certify_level(&problem, x);
            (v, x, false)
        }
    };
    Ok(NormEstimate {
        value,
        bound_kind: BoundKind::Lower,
        certificate: Certificate::LevelInput { k, blocks },
        trace: Trace { restarts: budget.restarts, iterations, seed: opts.seed, converged, method: "level-ascent" },
    })
}

fn certify_level(problem: &LevelProblem, x: Vec<ComplexMatrix>) -> (f64, Vec<ComplexMatrix>) {
    let den = operator_norm(&amplify(&x, &problem.domain));
    let x: Vec<ComplexMatrix> = x.iter().map(|m| m.scale_real(1.0 / den)).collect();
    (operator_norm(&amplify(&x, &problem.images)), x)
}

/// Norm of `Σ X_i ⊗ u(b_i)` and of `Σ X_i ⊗ b_i` for a level certificate.
pub fn evaluate_level_input(u: &SpaceMap, blocks: &[ComplexMatrix]) -> (f64, f64) {
    (operator_norm(&amplify(blocks, &u.images())), operator_norm(&amplify(blocks, u.domain().basis())))
}

/// Exact cb norm for a domain that is a row or column Hilbert space, from the
/// images of its orthonormal basis: `‖Σ y_i* y_i‖^{1/2}` (row) or
/// `‖Σ y_i y_i*‖^{1/2}` (column).
pub fn cb_norm_hilbertian_domain(images: &[ComplexMatrix], kind: Hilbertian) -> Result<NormEstimate> {
    let first = images.first().ok_or(Error::EmptyBasis)?;
    if images.iter().any(|y| y.shape() != first.shape()) {
        return Err(Error::ShapeMismatch("images must share one shape".into()));
    }
    Ok(NormEstimate::exact(hilbertian_cb(images, kind), "closed-form", 0))
}

pub(crate) fn hilbertian_cb(images: &[ComplexMatrix], kind: Hilbertian) -> f64 {
    match kind {
        Hilbertian::Row => operator_norm(&ComplexMatrix::vstack(images)),
        Hilbertian::Column => operator_norm(&ComplexMatrix::hstack(images)),
    }
}

/// Images of an orthonormal basis of a Hilbertian domain.
pub(crate) fn orthonormal_images(domain: &ConcreteOperatorSpace, images: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    let q = domain.orthonormalizer();
    let m = domain.dim();
    (0..m)
        .map(|j| {
            let c: Vec<C64> = (0..m).map(|i| q[(i, j)]).collect();
            crate::matrix::combine(&c, images)
        })
        .collect()
}

/// cb norm: exact for zero maps and row/column domains, otherwise the level
/// norm at the Smith level (a lower bound).
pub fn cb_norm(u: &SpaceMap, opts: &OptOptions) -> Result<NormEstimate> {
    if u.is_zero() {
        return Ok(NormEstimate::exact(0.0, "zero-map", opts.seed));
    }
    if let Some(kind) = u.domain().hilbertian() {
        let imgs = orthonormal_images(u.domain(), &u.images());
        let mut est = cb_norm_hilbertian_domain(&imgs, kind)?;
        est.trace.seed = opts.seed;
        return Ok(est);
    }
    level_norm(u, smith_level(u), opts)
}

/// Exact cb norm of the map `E* → M_k` sending the coordinate functional of
/// `b_i` to `Y_i`: the norm of `Σ b_i ⊗ Y_i` in `E ⊗_min M_k`.
pub fn cb_norm_on_dual(space: &ConcreteOperatorSpace, images: &[ComplexMatrix]) -> f64 {
    let mut out = space.basis()[0].kron(&images[0]);
    for (b, y) in space.basis().iter().zip(images).skip(1) {
        out = &out + &b.kron(y);
    }
    operator_norm(&out)
}
