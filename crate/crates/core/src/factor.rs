//! Factorization norms.
//!
//! `γ_R(u)` (`γ_C(u)`) is the infimum of `‖b‖_cb ‖a‖_cb` over factorizations
//! `u = b∘a` through a row (column) Hilbert space `R_k` (`C_k`); the
//! coefficient matrix of `u` is `W·V` with `V` the matrix of `a` and `W` that
//! of `b`. Maps out of `R_k`/`C_k` have closed-form cb norms; maps into them
//! do too when the domain is itself a row or column space, and otherwise are
//! bounded through the amplification engine.
//!
//! The split norm is `inf{γ_R(v) + γ_C(w) : u = v + w}`, and `γ₂` is the
//! Banach factorization norm through `ℓ₂` between `ℓ_∞` spaces.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::cb::{cb_norm, SAFETY_INFLATION};
use crate::error::{Error, Result};
use crate::estimate::{BoundKind, Certificate, NormEstimate, OptOptions, Trace};
use crate::haagerup::{leg, orbit_gradient, orbit_search, orbit_step, rank, stack_norm, svd_factors, LegSpec, Stack, TwoFold};
use crate::linalg::{expm, inverse, trace_norm};
use crate::matrix::{ComplexMatrix, C64};
use crate::mu::{joint_search, JointSplit};
use crate::optim::{minimize, Evaluation, Objective};
use crate::rng::{gaussian, gaussian_matrix, stream};
use crate::smooth::smooth_max;
use crate::space::{ConcreteOperatorSpace, Hilbertian, SpaceMap, SpaceRef, StandardKind};

pub const DEFAULT_RESTARTS: usize = 8;
pub const DEFAULT_ITERS: usize = 400;
pub const DEFAULT_TOL: f64 = 1e-8;
/// Largest `n` for the sign enumeration of `γ₂`.
pub const GAMMA2_MAX_DIM: usize = 12;

/// Rounds of cutting-plane refinement for non-Hilbertian domains.
const ENVELOPE_ROUNDS: usize = 3;
const PROBE_RESTARTS: usize = 4;
const PROBE_ITERS: usize = 200;
/// Random splits tried by the split norm when the domain is not Hilbertian.
const SPLIT_SAMPLES: usize = 2;

/// The intermediate space of a factorization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Through {
    Row(usize),
    Column(usize),
    Hilbert(usize),
}

impl Through {
    pub fn dim(self) -> usize {
        match self {
            Through::Row(k) | Through::Column(k) | Through::Hilbert(k) => k,
        }
    }
}

impl fmt::Display for Through {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Through::Row(k) => write!(f, "row {k}"),
            Through::Column(k) => write!(f, "column {k}"),
            Through::Hilbert(k) => write!(f, "hilbert {k}"),
        }
    }
}

/// `u = second_leg ∘ first_leg`, with the cb norms (upper bounds) of the legs.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub through: Through,
    pub first_leg: SpaceMap,
    pub second_leg: SpaceMap,
    /// Largest coefficient error of the composition.
    pub residual: f64,
    pub first_cb: f64,
    pub second_cb: f64,
}

impl Factorization {
    pub fn value(&self) -> f64 {
        self.first_cb * self.second_cb
    }
}

fn through_space(kind: Hilbertian, k: usize) -> SpaceRef {
    Arc::new(ConcreteOperatorSpace::standard(match kind {
        Hilbertian::Row => StandardKind::Row(k),
        Hilbertian::Column => StandardKind::Column(k),
    }))
}

fn through(kind: Hilbertian, k: usize) -> Through {
    match kind {
        Hilbertian::Row => Through::Row(k),
        Hilbertian::Column => Through::Column(k),
    }
}

/// Stack of the second-leg images `W e_j` whose norm is `‖b‖_cb`.
fn second_stack(kind: Hilbertian) -> Stack {
    match kind {
        Hilbertian::Row => Stack::Column,
        Hilbertian::Column => Stack::Row,
    }
}

/// For a Hilbertian domain with orthonormalized first-leg matrix `V·Q`: the
/// stack of the rows of `V·Q` whose norm is `‖a‖_cb` (operator norm when the
/// two kinds agree, Frobenius norm otherwise).
fn first_stack(domain: Hilbertian, kind: Hilbertian) -> Stack {
    if domain == kind {
        Stack::Column
    } else {
        Stack::Row
    }
}

/// `Σ_j ‖f_j‖` for the coordinate functionals `f_j = ⟨e_j, a(·)⟩` of the
/// first leg, each bounded by the trace norm of a representing matrix.
fn functional_bound(domain: &ConcreteOperatorSpace, v: &ComplexMatrix) -> f64 {
    let reps = domain.dual_representers();
    (0..v.rows())
        .map(|j| {
            let c: Vec<C64> = (0..v.cols()).map(|i| v[(j, i)].conj()).collect();
            trace_norm(&crate::matrix::combine(&c, &reps))
        })
        .sum()
}

/// Upper bound on the cb norm of the first leg out of a non-Hilbertian
/// domain: the inflated amplification estimate, or the functional bound if
/// smaller.
fn first_leg_upper(a: &SpaceMap, opts: &OptOptions) -> Result<f64> {
    let est = cb_norm(a, opts)?;
    let inflated = match est.bound_kind {
        BoundKind::Lower => est.value * (1.0 + SAFETY_INFLATION),
        _ => est.value,
    };
    Ok(inflated.min(functional_bound(a.domain(), a.coeffs())))
}

fn factorization(u: &SpaceMap, kind: Hilbertian, w: ComplexMatrix, v: ComplexMatrix, first_cb: f64, second_cb: f64) -> Factorization {
    let k = v.rows();
    let mid = through_space(kind, k);
    let residual = (&w * &v).max_diff(u.coeffs());
    Factorization {
        through: through(kind, k),
        first_leg: SpaceMap::new(u.domain().clone(), mid.clone(), v).expect("first leg shape"),
        second_leg: SpaceMap::new(mid, u.codomain().clone(), w).expect("second leg shape"),
        residual,
        first_cb,
        second_cb,
    }
}

/// Cut-plane surrogate of `‖a‖_cb · ‖b‖_cb` for a non-Hilbertian domain:
/// the first leg is scored by the largest `‖Σ X_i ⊗ a(e_i)‖` over a pool of
/// unit inputs `X` found by the amplification engine.
struct Envelope<'a> {
    second: LegSpec<'a>,
    pool: Vec<ConcreteOperatorSpace>,
    stack: Stack,
}

impl Objective for Envelope<'_> {
    type State = (ComplexMatrix, ComplexMatrix);

    fn eval(&self, (w, v): &Self::State, sharp: f64) -> Evaluation {
        let lb = leg(self.second.space, w, self.second.stack, sharp);
        let vt = v.transpose();
        let legs: Vec<_> = self.pool.iter().map(|p| leg(p, &vt, self.stack, sharp)).collect();
        let values: Vec<f64> = legs.iter().map(|l| l.value).collect();
        let (la, weights) = smooth_max(&values, sharp);
        let exact = legs.iter().map(|l| l.exact).fold(0.0, f64::max);
        let mut gv = ComplexMatrix::zeros(vt.rows(), vt.cols());
        for (l, wt) in legs.iter().zip(&weights) {
            if *wt != 0.0 {
                gv.axpy(C64::new(*wt, 0.0), &l.grad);
            }
        }
        let gw = lb.grad.scale_real(1.0 / lb.value);
        let gv = gv.transpose().scale_real(1.0 / la);
        Evaluation {
            smooth: libm::log(la) + libm::log(lb.value),
            exact: exact * lb.exact,
            grad: vec![orbit_gradient(w, v, &gw, &gv)],
        }
    }

    fn retract(&self, state: &Self::State, dir: &[ComplexMatrix], step: f64) -> Self::State {
        let (w, v) = orbit_step(state, &dir[0], step);
        let (nw, nv) = (w.frobenius_norm(), v.frobenius_norm());
        if nw > 0.0 && nv > 0.0 && nw.is_finite() && nv.is_finite() {
            let lambda = libm::sqrt(nv / nw);
            (w.scale_real(lambda), v.scale_real(1.0 / lambda))
        } else {
            (w, v)
        }
    }
}

/// Best found factorization norm through `R_k` or `C_k` with `k = rank(u)`
/// (plus the rank slack); an upper bound.
pub fn gamma_rc(u: &SpaceMap, kind: Hilbertian, opts: &OptOptions) -> Result<NormEstimate> {
    if u.is_zero() {
        return Ok(NormEstimate::exact(0.0, "zero-map", opts.seed));
    }
    let budget = opts.budget(DEFAULT_RESTARTS, DEFAULT_ITERS, DEFAULT_TOL);
    let k = rank(u.coeffs()) + opts.rank_slack;
    let domain = u.domain();
    let second = LegSpec { space: u.codomain(), stack: second_stack(kind) };

    let (fact, iterations, converged, method) = if let Some(dkind) = domain.hilbertian() {
        let q = domain.orthonormalizer();
        let qinv = inverse(&q)?;
        let coords = Arc::new(ConcreteOperatorSpace::standard(StandardKind::Row(domain.dim())));
        let problem = TwoFold { a: second, b: LegSpec { space: &coords, stack: first_stack(dkind, kind) } };
        let start = svd_factors(&(u.coeffs() * &q), k);
        let found = orbit_search(&problem, &start, budget, opts.seed, "gamma-rc");
        let (w, vq, iterations, converged) = match found {
            Some(o) => (o.a, o.b, o.iterations, o.converged),
            None => (start.0, start.1, 0, false),
        };
        let first_cb = stack_norm(&coords, &vq.transpose(), problem.b.stack);
        let second_cb = stack_norm(u.codomain(), &w, second.stack);
        (factorization(u, kind, w, &vq * &qinv, first_cb, second_cb), iterations, converged, "gl-descent")
    } else {
        let probe = OptOptions { restarts: Some(PROBE_RESTARTS), iters: Some(PROBE_ITERS), ..opts.clone() };
        let mid = through_space(kind, k);
        let first_map = |v: &ComplexMatrix| SpaceMap::new(domain.clone(), mid.clone(), v.clone());
        let mut problem = Envelope { second, pool: Vec::new(), stack: second_stack(kind) };
        // the pool leg stacks the images the way the through space does
        problem.stack = match kind {
            Hilbertian::Row => Stack::Row,
            Hilbertian::Column => Stack::Column,
        };
        let mut state = svd_factors(u.coeffs(), k);
        let mut best: Option<(f64, (ComplexMatrix, ComplexMatrix))> = None;
        let (mut iterations, mut converged) = (0, !budget.starved());
        for round in 0..ENVELOPE_ROUNDS {
            let est = cb_norm(&first_map(&state.1)?, &probe)?;
            let value = est.value * stack_norm(u.codomain(), &state.0, second.stack);
            if best.as_ref().is_none_or(|b| value < b.0) {
                best = Some((value, state.clone()));
            }
            if let Certificate::LevelInput { blocks, .. } = est.certificate {
                problem.pool.push(ConcreteOperatorSpace::unchecked(blocks, format!("probe {round}")));
            }
            if round + 1 == ENVELOPE_ROUNDS || problem.pool.is_empty() {
                break;
            }
            match orbit_search(&problem, &state, budget, opts.seed, "gamma-envelope") {
                Some(o) => {
                    iterations += o.iterations;
                    converged &= o.converged;
                    state = (o.a, o.b);
                }
                None => break,
            }
        }
        let (w, v) = best.map(|b| b.1).unwrap_or(state);
        let first_cb = first_leg_upper(&first_map(&v)?, opts)?;
        let second_cb = stack_norm(u.codomain(), &w, second.stack);
        (factorization(u, kind, w, v, first_cb, second_cb), iterations, converged, "envelope-descent")
    };
    Ok(NormEstimate {
        value: fact.value(),
        bound_kind: BoundKind::Upper,
        certificate: Certificate::Factorization(Box::new(fact)),
        trace: Trace { restarts: budget.restarts, iterations, seed: opts.seed, converged, method },
    })
}

fn split_parts(cert: &Certificate) -> (Option<Box<Factorization>>, Option<Box<Factorization>>) {
    match cert {
        Certificate::SplitFactorization { row, column } => (row.clone(), column.clone()),
        _ => (None, None),
    }
}

/// Best found `inf{γ_R(v) + γ_C(w) : u = v + w}`; an upper bound.
pub fn split_norm(u: &SpaceMap, opts: &OptOptions) -> Result<NormEstimate> {
    if u.is_zero() {
        return Ok(NormEstimate::exact(0.0, "zero-map", opts.seed));
    }
    let budget = opts.budget(DEFAULT_RESTARTS, DEFAULT_ITERS, DEFAULT_TOL);
    let from = |est: NormEstimate, kind: Hilbertian| -> (f64, Certificate, usize, bool) {
        let fact = match est.certificate {
            Certificate::Factorization(f) => Some(f),
            _ => None,
        };
        let cert = match kind {
            Hilbertian::Row => Certificate::SplitFactorization { row: fact, column: None },
            Hilbertian::Column => Certificate::SplitFactorization { row: None, column: fact },
        };
        (est.value, cert, est.trace.iterations, est.trace.converged)
    };
    let mut candidates = vec![
        from(gamma_rc(u, Hilbertian::Row, opts)?, Hilbertian::Row),
        from(gamma_rc(u, Hilbertian::Column, opts)?, Hilbertian::Column),
    ];

    let domain = u.domain();
    if let Some(dkind) = domain.hilbertian() {
        let q = domain.orthonormalizer();
        let qinv = inverse(&q)?;
        let coords = Arc::new(ConcreteOperatorSpace::standard(StandardKind::Row(domain.dim())));
        let r = domain.dim().min(u.codomain().dim()) + opts.rank_slack;
        let part = |kind| {
            (
                LegSpec { space: u.codomain().as_ref(), stack: second_stack(kind) },
                LegSpec { space: coords.as_ref(), stack: first_stack(dkind, kind) },
            )
        };
        let problem = JointSplit { parts: [part(Hilbertian::Row), part(Hilbertian::Column)], r };
        let c = u.coeffs() * &q;
        if let Some(out) = joint_search(&problem, &c, budget, opts.seed, "split-norm") {
            let mut facts = Vec::new();
            for (p, kind) in [Hilbertian::Row, Hilbertian::Column].into_iter().enumerate() {
                let w = out.a.block(0, p * r, out.a.rows(), r);
                let vq = out.b.block(p * r, 0, r, out.b.cols());
                let first_cb = stack_norm(&coords, &vq.transpose(), problem.parts[p].1.stack);
                let second_cb = stack_norm(u.codomain(), &w, problem.parts[p].0.stack);
                let v = &vq * &qinv;
                let part_map = u.with_coeffs(&w * &v)?;
                facts.push(Box::new(factorization(&part_map, kind, w, v, first_cb, second_cb)));
            }
            let value = facts[0].value() + facts[1].value();
            let column = facts.pop();
            let row = facts.pop();
            candidates.push((value, Certificate::SplitFactorization { row, column }, out.iterations, out.converged));
        }
    } else {
        let scale = u.coeffs().frobenius_norm() / libm::sqrt(u.coeffs().data().len() as f64);
        for j in 0..SPLIT_SAMPLES {
            let mut rng = stream(opts.seed, "split-sample", j as u64);
            let mut v = u.coeffs().scale_real(0.5);
            let (rows, cols) = v.shape();
            v.axpy(C64::new(0.5 * scale, 0.0), &gaussian_matrix(&mut rng, rows, cols));
            let vr = gamma_rc(&u.with_coeffs(v.clone())?, Hilbertian::Row, opts)?;
            let wc = gamma_rc(&u.with_coeffs(u.coeffs() - &v)?, Hilbertian::Column, opts)?;
            let (row, _) = split_parts(&from(vr.clone(), Hilbertian::Row).1);
            let (_, column) = split_parts(&from(wc.clone(), Hilbertian::Column).1);
            let converged = vr.trace.converged && wc.trace.converged;
            candidates.push((vr.value + wc.value, Certificate::SplitFactorization { row, column }, vr.trace.iterations + wc.trace.iterations, converged));
        }
    }

    let iterations = candidates.iter().map(|c| c.2).sum();
    let mut best = 0;
    for (i, c) in candidates.iter().enumerate() {
        if c.0 < candidates[best].0 {
            best = i;
        }
    }
    let (value, certificate, _, converged) = candidates.swap_remove(best);
    Ok(NormEstimate {
        value,
        bound_kind: BoundKind::Upper,
        certificate,
        trace: Trace { restarts: budget.restarts, iterations, seed: opts.seed, converged, method: "joint-split" },
    })
}

// ---------------------------------------------------------------------------
// γ₂ between sup-norm spaces.

/// `M = B·A` scored by `‖A‖_{∞→2} · ‖B‖_{2→∞}`: the largest `‖As‖` over sign
/// vectors `s` (first entry fixed to `+1`) times the largest row norm of `B`.
struct Gamma2 {
    signs: Vec<ComplexMatrix>,
}

impl Gamma2 {
    fn new(n: usize) -> Self {
        let signs = (0..1usize << (n - 1))
            .map(|mask| ComplexMatrix::from_fn(n, 1, |i, _| C64::new(if i > 0 && mask >> (i - 1) & 1 == 1 { -1.0 } else { 1.0 }, 0.0)))
            .collect();
        Gamma2 { signs }
    }

    fn legs(&self, b: &ComplexMatrix, a: &ComplexMatrix) -> (Vec<f64>, Vec<f64>) {
        let cols: Vec<f64> = self.signs.iter().map(|s| (a * s).frobenius_norm_sqr()).collect();
        let rows: Vec<f64> = (0..b.rows()).map(|i| b.row(i).frobenius_norm_sqr()).collect();
        (cols, rows)
    }

    fn exact(&self, b: &ComplexMatrix, a: &ComplexMatrix) -> f64 {
        let (cols, rows) = self.legs(b, a);
        libm::sqrt(cols.iter().fold(0.0, |m: f64, x| m.max(*x))) * libm::sqrt(rows.iter().fold(0.0, |m: f64, x| m.max(*x)))
    }
}

impl Objective for Gamma2 {
    type State = (ComplexMatrix, ComplexMatrix);

    fn eval(&self, (b, a): &Self::State, sharp: f64) -> Evaluation {
        let (cols, rows) = self.legs(b, a);
        let (fa, wa) = smooth_max(&cols, sharp);
        let (fb, wb) = smooth_max(&rows, sharp);
        let mut ga = ComplexMatrix::zeros(a.rows(), a.cols());
        for (s, w) in self.signs.iter().zip(&wa) {
            if *w != 0.0 {
                ga.axpy(C64::new(*w / fa, 0.0), &(&(a * s) * &s.transpose()));
            }
        }
        let gb = ComplexMatrix::from_fn(b.rows(), b.cols(), |i, j| b[(i, j)] * (wb[i] / fb));
        Evaluation {
            smooth: 0.5 * (libm::log(fa) + libm::log(fb)),
            exact: self.exact(b, a),
            grad: vec![orbit_gradient(b, a, &gb, &ga)],
        }
    }

    fn retract(&self, state: &Self::State, dir: &[ComplexMatrix], step: f64) -> Self::State {
        let (b, a) = orbit_step(state, &dir[0], step);
        let (cols, rows) = self.legs(&b, &a);
        let (fa, fb) = (cols.iter().fold(0.0, |m: f64, x| m.max(*x)), rows.iter().fold(0.0, |m: f64, x| m.max(*x)));
        if fa > 0.0 && fb > 0.0 && fa.is_finite() && fb.is_finite() {
            let lambda = libm::sqrt(libm::sqrt(fa / fb));
            (b.scale_real(lambda), a.scale_real(1.0 / lambda))
        } else {
            (b, a)
        }
    }
}

/// `M = B·A` through `rank(M)` dimensions from the SVD when its factors come
/// out real, else the trivial `M = M·I`.
fn real_factors(m: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let (b, a) = svd_factors(m, rank(m));
    let scale = m.max_abs();
    let real = |x: &ComplexMatrix| ComplexMatrix::from_fn(x.rows(), x.cols(), |i, j| C64::new(x[(i, j)].re, 0.0));
    let (rb, ra) = (real(&b), real(&a));
    if (&rb * &ra).max_diff(m) <= 1e-12 * scale {
        (rb, ra)
    } else {
        (m.clone(), ComplexMatrix::identity(m.cols()))
    }
}

/// Best found `γ₂(M: ℓ_∞^n → ℓ_∞^m)` for a real matrix; an upper bound.
///
/// A factorization `M = B·A` is refined by descent over real invertible
/// reparametrizations `B·S`, `S⁻¹·A`.
pub fn gamma2_linf(m: &ComplexMatrix, opts: &OptOptions) -> Result<NormEstimate> {
    let n = m.cols();
    if n > GAMMA2_MAX_DIM {
        return Err(Error::DimensionTooLarge { n, max: GAMMA2_MAX_DIM });
    }
    if m.data().iter().any(|z| z.im != 0.0) {
        return Err(Error::ComplexInput(String::from("sign enumeration needs a real matrix")));
    }
    if m.is_zero() {
        return Ok(NormEstimate::exact(0.0, "zero-map", opts.seed));
    }
    let budget = opts.budget(DEFAULT_RESTARTS, DEFAULT_ITERS, DEFAULT_TOL);
    let problem = Gamma2::new(n);
    let start = real_factors(m);
    let r = start.1.rows();
    let mut best = (problem.exact(&start.0, &start.1), start.clone(), false);
    let mut iterations = 0;
    for j in 0..budget.restarts {
        let init = if j == 0 {
            start.clone()
        } else {
            let mut rng = stream(opts.seed, "gamma2", j as u64);
            let t = ComplexMatrix::from_fn(r, r, |_, _| C64::new(0.5 * gaussian(&mut rng), 0.0));
            (&start.0 * &expm(&t), &expm(&t.scale_real(-1.0)) * &start.1)
        };
        let init = problem.retract(&init, &[ComplexMatrix::zeros(r, r)], 0.0);
        let out = minimize(&problem, init, budget.iters, budget.tol);
        iterations += out.iterations;
        let value = problem.exact(&out.best.0, &out.best.1);
        if value < best.0 || (j == 0 && value <= best.0) {
            best = (value, out.best, out.converged);
        }
    }
    let (value, (b, a), converged) = best;
    Ok(NormEstimate {
        value,
        bound_kind: BoundKind::Upper,
        certificate: Certificate::HilbertFactorization { a, b },
        trace: Trace { restarts: budget.restarts, iterations, seed: opts.seed, converged: converged && !budget.starved(), method: "gl-descent" },
    })
}
