//! The maximal tensor norm `‖·‖_μ`.
//!
//! Upper bounds use `‖t‖_μ = inf{‖v‖_h + ‖ᵗw‖_h : t = v + w}`. The split is
//! searched jointly with both representations: a factorization `C = A·B` with
//! `2r` terms is cut into a first block of `r` terms (read as `v`, scored by
//! the Haagerup value) and a second block (read as `w`, scored by the value of
//! its transpose). `GL_{2r}` moves mass between the blocks, so descent along
//! its orbit optimizes the split and both representations at once.
//!
//! Lower bounds evaluate certified pairs of complete contractions with
//! commuting ranges (see [`crate::pairs`]).

use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::cb::{cb_norm, cb_norm_on_dual, SAFETY_INFLATION};
use crate::error::Result;
use crate::estimate::{BoundKind, Budget, Certificate, NormEstimate, OptOptions, Trace};
use crate::factor::split_norm;
use crate::haagerup::{haagerup_upper, leg, orbit_gradient, orbit_step, svd_factors, Decomposition, LegSpec, SearchOutcome, Stack};
use crate::matrix::{ComplexMatrix, C64};
use crate::optim::{minimize, Evaluation, Objective};
use crate::pairs::{commutant_sample, pair_eval, tensor_split_sample, theorem2_sample, CommutingPairSample};
use crate::rng::{gaussian_matrix, stream};
use crate::space::{ConcreteOperatorSpace, SpaceMap, SpaceRef, StandardKind, TensorElement};

pub const DEFAULT_RESTARTS: usize = 8;
pub const DEFAULT_ITERS: usize = 800;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_COMMUTANT_SAMPLES: usize = 200;
pub const DEFAULT_BLOCK_SAMPLES: usize = 100;

/// `t = v + w` with representations of `v` and of `ᵗw`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitCertificate {
    pub v: TensorElement,
    pub w: TensorElement,
    pub v_decomposition: Decomposition,
    pub wt_decomposition: Decomposition,
}

impl SplitCertificate {
    /// `‖v‖ + ‖ᵗw‖` as certified by the two representations.
    pub fn value(&self) -> f64 {
        self.v_decomposition.value() + self.wt_decomposition.value()
    }

    /// Largest coefficient error of `v + w` and of each representation.
    pub fn residual(&self, t: &TensorElement) -> f64 {
        let sum = (self.v.coeffs() + self.w.coeffs()).max_diff(t.coeffs());
        sum.max(self.v_decomposition.reconstruction_error(&self.v))
            .max(self.wt_decomposition.reconstruction_error(&self.w.transpose()))
    }
}

#[derive(Debug, Clone)]
pub struct MuWindow {
    pub lower: NormEstimate,
    pub upper: NormEstimate,
}

impl MuWindow {
    pub fn width(&self) -> f64 {
        self.upper.value - self.lower.value
    }
}

// ---------------------------------------------------------------------------
// Joint split search, shared with the split factorization norm.

/// Two blocks of `r` terms in `C = A·B`, each scored by the product of its
/// two legs; the objective is the sum of the two products.
pub(crate) struct JointSplit<'a> {
    pub parts: [(LegSpec<'a>, LegSpec<'a>); 2],
    pub r: usize,
}

impl JointSplit<'_> {
    fn blocks(&self, a: &ComplexMatrix, b: &ComplexMatrix, p: usize) -> (ComplexMatrix, ComplexMatrix) {
        (a.block(0, p * self.r, a.rows(), self.r), b.block(p * self.r, 0, self.r, b.cols()))
    }
}

impl Objective for JointSplit<'_> {
    type State = (ComplexMatrix, ComplexMatrix);

    fn eval(&self, (a, b): &Self::State, sharp: f64) -> Evaluation {
        let (mut smooth, mut exact) = (0.0, 0.0);
        let mut ga = Vec::with_capacity(2);
        let mut gb = Vec::with_capacity(2);
        for (p, (sa, sb)) in self.parts.iter().enumerate() {
            let (ap, bp) = self.blocks(a, b, p);
            let la = leg(sa.space, &ap, sa.stack, sharp);
            let lb = leg(sb.space, &bp.transpose(), sb.stack, sharp);
            smooth += la.value * lb.value;
            exact += la.exact * lb.exact;
            ga.push(la.grad.scale_real(lb.value));
            gb.push(lb.grad.transpose().scale_real(la.value));
        }
        let ga = ComplexMatrix::hstack(&ga);
        let gb = ComplexMatrix::vstack(&gb);
        Evaluation { smooth, exact, grad: vec![orbit_gradient(a, b, &ga, &gb)] }
    }

    fn retract(&self, state: &Self::State, dir: &[ComplexMatrix], step: f64) -> Self::State {
        let (mut a, mut b) = orbit_step(state, &dir[0], step);
        for p in 0..2 {
            let (ap, bp) = self.blocks(&a, &b, p);
            let (na, nb) = (ap.frobenius_norm(), bp.frobenius_norm());
            if na > 0.0 && nb > 0.0 && na.is_finite() && nb.is_finite() {
                let lambda = libm::sqrt(nb / na);
                a.set_block(0, p * self.r, &ap.scale_real(lambda));
                b.set_block(p * self.r, 0, &bp.scale_real(1.0 / lambda));
            }
        }
        (a, b)
    }
}

/// Descent from the splits `v = c`, `v = 0`, `v = c/2` and `budget.restarts`
/// random ones. Lowest value wins, ties to the earliest start.
pub(crate) fn joint_search(problem: &JointSplit<'_>, c: &ComplexMatrix, budget: Budget, seed: u64, name: &str) -> Option<SearchOutcome> {
    if budget.starved() {
        return None;
    }
    let (m1, m2) = c.shape();
    let scale = c.frobenius_norm() / libm::sqrt((m1 * m2) as f64);
    let mut splits = vec![c.clone(), ComplexMatrix::zeros(m1, m2), c.scale_real(0.5)];
    for j in 0..budget.restarts {
        let mut rng = stream(seed, name, j as u64);
        let mut v = c.scale_real(0.5);
        v.axpy(C64::new(0.5 * scale, 0.0), &gaussian_matrix(&mut rng, m1, m2));
        splits.push(v);
    }
    let mut best: Option<SearchOutcome> = None;
    let mut iterations = 0;
    for v in &splits {
        let (av, bv) = svd_factors(v, problem.r);
        let (aw, bw) = svd_factors(&(c - v), problem.r);
        let start = (ComplexMatrix::hstack(&[av, aw]), ComplexMatrix::vstack(&[bv, bw]));
        let start = problem.retract(&start, &[ComplexMatrix::zeros(2 * problem.r, 2 * problem.r)], 0.0);
        let out = minimize(problem, start, budget.iters, budget.tol);
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

fn zero_decomposition(left: &SpaceRef, right: &SpaceRef) -> Decomposition {
    Decomposition {
        left: left.clone(),
        right: right.clone(),
        a: ComplexMatrix::zeros(left.dim(), 1),
        b: ComplexMatrix::zeros(1, right.dim()),
    }
}

fn tensor_of(left: &SpaceRef, right: &SpaceRef, c: ComplexMatrix) -> TensorElement {
    TensorElement::new(left.clone(), right.clone(), c).expect("shapes follow the spaces")
}

/// Joint search for `t`; the split is returned in `t`'s orientation.
fn joint_split(t: &TensorElement, budget: Budget, opts: &OptOptions) -> Option<(SplitCertificate, SearchOutcome)> {
    let (e, f) = (t.left(), t.right());
    let r = e.dim().min(f.dim()) + opts.rank_slack;
    let problem = JointSplit {
        parts: [
            (LegSpec { space: e, stack: Stack::Row }, LegSpec { space: f, stack: Stack::Column }),
            (LegSpec { space: e, stack: Stack::Column }, LegSpec { space: f, stack: Stack::Row }),
        ],
        r,
    };
    let out = joint_search(&problem, t.coeffs(), budget, opts.seed, "mu-split")?;
    let (a1, a2) = (out.a.block(0, 0, e.dim(), r), out.a.block(0, r, e.dim(), r));
    let (b1, b2) = (out.b.block(0, 0, r, f.dim()), out.b.block(r, 0, r, f.dim()));
    let cert = SplitCertificate {
        v: tensor_of(e, f, &a1 * &b1),
        w: tensor_of(e, f, &a2 * &b2),
        v_decomposition: Decomposition { left: e.clone(), right: f.clone(), a: a1, b: b1 },
        wt_decomposition: Decomposition { left: f.clone(), right: e.clone(), a: b2.transpose(), b: a2.transpose() },
    };
    Some((cert, out))
}

fn mirrored(cert: SplitCertificate) -> SplitCertificate {
    SplitCertificate {
        v: cert.w.transpose(),
        w: cert.v.transpose(),
        v_decomposition: cert.wt_decomposition,
        wt_decomposition: cert.v_decomposition,
    }
}

/// Best found `inf{‖v‖_h + ‖ᵗw‖_h : t = v + w}`; an upper bound on `‖t‖_μ`.
///
/// Candidates: the two extreme splits (`haagerup_upper` of `t` and of `ᵗt`)
/// and joint searches run on `t` and on `ᵗt`. The candidate set is the same
/// for `t` and `ᵗt`, so the bound is exactly transposition-symmetric.
pub fn mu_upper(t: &TensorElement, opts: &OptOptions) -> Result<NormEstimate> {
    if t.is_zero() {
        return Ok(NormEstimate::exact(0.0, "zero-tensor", opts.seed));
    }
    let budget = opts.budget(DEFAULT_RESTARTS, DEFAULT_ITERS, DEFAULT_TOL);
    let (e, f) = (t.left(), t.right());
    let mut candidates: Vec<(SplitCertificate, usize, bool)> = Vec::new();

    let ht = haagerup_upper(t, opts)?;
    if let Certificate::Decomposition(d) = ht.certificate {
        let cert = SplitCertificate {
            v: t.clone(),
            w: tensor_of(e, f, ComplexMatrix::zeros(e.dim(), f.dim())),
            v_decomposition: d,
            wt_decomposition: zero_decomposition(f, e),
        };
        candidates.push((cert, ht.trace.iterations, ht.trace.converged));
    }
    let tt = t.transpose();
    let htt = haagerup_upper(&tt, opts)?;
    if let Certificate::Decomposition(d) = htt.certificate {
        let cert = SplitCertificate {
            v: tensor_of(e, f, ComplexMatrix::zeros(e.dim(), f.dim())),
            w: t.clone(),
            v_decomposition: zero_decomposition(e, f),
            wt_decomposition: d,
        };
        candidates.push((cert, htt.trace.iterations, htt.trace.converged));
    }
    if let Some((cert, out)) = joint_split(t, budget, opts) {
        candidates.push((cert, out.iterations, out.converged));
    }
    if let Some((cert, out)) = joint_split(&tt, budget, opts) {
        candidates.push((mirrored(cert), out.iterations, out.converged));
    }

    let iterations = candidates.iter().map(|c| c.1).sum();
    let mut best = 0;
    let values: Vec<f64> = candidates.iter().map(|c| c.0.value()).collect();
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    let (cert, _, converged) = candidates.swap_remove(best);
    Ok(NormEstimate {
        value: values[best],
        bound_kind: BoundKind::Upper,
        certificate: Certificate::Split(Box::new(cert)),
        trace: Trace {
            restarts: budget.restarts,
            iterations,
            seed: opts.seed,
            converged: converged && !budget.starved(),
            method: "joint-split",
        },
    })
}

/// Largest normalized evaluation over the spatial split, commutant samples
/// and block samples; a certified lower bound on `‖t‖_μ`, never below the
/// minimal norm.
pub fn mu_lower(t: &TensorElement, opts: &OptOptions) -> Result<NormEstimate> {
    if t.is_zero() {
        return Ok(NormEstimate::exact(0.0, "zero-tensor", opts.seed));
    }
    let (e, f) = (t.left(), t.right());
    let split = tensor_split_sample(e, f);
    let mut best_value = pair_eval(&split, t, true)?.1;
    let mut best = split;
    let mut samples = 1;
    let mut consider = |s: Option<CommutingPairSample>| -> Result<()> {
        if let Some(s) = s {
            samples += 1;
            let v = pair_eval(&s, t, true)?.1;
            if v > best_value {
                best_value = v;
                best = s;
            }
        }
        Ok(())
    };
    for i in 0..opts.commutant_samples.unwrap_or(DEFAULT_COMMUTANT_SAMPLES) {
        consider(commutant_sample(e, f, opts.seed, i as u64, opts.max_pair_size))?;
    }
    for i in 0..opts.block_samples.unwrap_or(DEFAULT_BLOCK_SAMPLES) {
        consider(theorem2_sample(e, f, opts.seed, i as u64, opts.max_pair_size))?;
    }
    Ok(NormEstimate {
        value: best_value,
        bound_kind: BoundKind::Lower,
        certificate: Certificate::Pair(Box::new(best)),
        trace: Trace { restarts: samples, iterations: 0, seed: opts.seed, converged: true, method: "pair-oracle" },
    })
}

pub fn mu_window(t: &TensorElement, opts: &OptOptions) -> Result<MuWindow> {
    Ok(MuWindow { lower: mu_lower(t, opts)?, upper: mu_upper(t, opts)? })
}

/// cb norm for use in a denominator: exact values as they are, optimizer
/// estimates inflated by the safety factor.
fn inflated_cb(u: &SpaceMap, opts: &OptOptions) -> Result<f64> {
    let est = cb_norm(u, opts)?;
    Ok(match est.bound_kind {
        BoundKind::Lower => est.value * (1.0 + SAFETY_INFLATION),
        _ => est.value,
    })
}

/// Lower bound on `‖i_E‖_μ` from the block pair of the quadruple
/// `α₁(e_i*) = s·e_{1i}`, `α₂(e_j) = e_{j1}/s`, `β₂(e_j) = e_{1j}`,
/// `β₁(e_i*) = e_{i1}`, whose compression of `Σ σ₁(e_i*)σ₂(e_i)` is `n`.
/// Maps on `E*` have exact cb norms, `‖Σ_i b_i ⊗ Y_i‖`.
fn coordinate_pair_bound(space: &SpaceRef, opts: &OptOptions) -> Result<f64> {
    let n = space.dim();
    let rows: Vec<ComplexMatrix> = (0..n).map(|i| ComplexMatrix::unit(1, n, 0, i)).collect();
    let cols: Vec<ComplexMatrix> = (0..n).map(|i| ComplexMatrix::unit(n, 1, i, 0)).collect();
    let a1 = cb_norm_on_dual(space, &rows);
    let b1 = cb_norm_on_dual(space, &cols);
    let std = |k| Arc::new(ConcreteOperatorSpace::standard(k));
    let a2 = inflated_cb(&SpaceMap::new(space.clone(), std(StandardKind::Column(n)), ComplexMatrix::identity(n))?, opts)?;
    let b2 = inflated_cb(&SpaceMap::new(space.clone(), std(StandardKind::Row(n)), ComplexMatrix::identity(n))?, opts)?;
    let denominator = [1.0, b1 / a1, a2 / b2]
        .iter()
        .map(|&s| (s * a1).max(b1) * (a2 / s).max(b2))
        .fold(f64::INFINITY, f64::min);
    Ok(n as f64 / denominator)
}

/// Window for `μ(E) = ‖i_E‖_μ`: the upper end is the split factorization
/// norm of the identity, the lower end the better of 1 and the coordinate
/// block pair.
pub fn mu_of_space(space: &SpaceRef, opts: &OptOptions) -> Result<MuWindow> {
    let upper = split_norm(&SpaceMap::identity(space.clone()), opts)?;
    let pair = coordinate_pair_bound(space, opts)?;
    let lower = NormEstimate {
        value: pair.max(1.0),
        bound_kind: BoundKind::Lower,
        certificate: Certificate::None,
        trace: Trace::closed_form(if pair > 1.0 { "coordinate-pair" } else { "identity-evaluation" }, opts.seed),
    };
    Ok(MuWindow { lower, upper })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haagerup::haagerup_upper;
    use alloc::format;

    fn sp(s: &str) -> SpaceRef {
        Arc::new(ConcreteOperatorSpace::standard(s.parse::<StandardKind>().unwrap()))
    }

    fn light() -> OptOptions {
        OptOptions { commutant_samples: Some(20), block_samples: Some(20), ..OptOptions::default() }
    }

    #[test]
    fn column_row_identity_is_one() {
        for n in [2usize, 3] {
            let t = TensorElement::diagonal(sp(&format!("column:{n}")), sp(&format!("row:{n}"))).unwrap();
            let w = mu_window(&t, &light()).unwrap();
            assert!(w.upper.value <= 1.0 + 1e-3, "{}", w.upper.value);
            assert!(w.lower.value >= 1.0 - 1e-9, "{}", w.lower.value);
            let Certificate::Split(c) = &w.upper.certificate else { panic!() };
            assert!(c.residual(&t) < 1e-10);
        }
    }

    #[test]
    fn row_column_identity_is_one_through_transpose() {
        let t = TensorElement::diagonal(sp("row:2"), sp("column:2")).unwrap();
        let up = mu_upper(&t, &OptOptions::default()).unwrap();
        assert!((up.value - 1.0).abs() < 1e-3, "{}", up.value);
        let Certificate::Split(c) = &up.certificate else { panic!() };
        assert!(c.v.is_zero());
    }

    #[test]
    fn rank_one_and_zero() {
        let mut rng = stream(1, "t", 0);
        let (e, f) = (sp("rowcap:2"), sp("full:2x2"));
        let x = gaussian_matrix(&mut rng, 2, 1);
        let y = gaussian_matrix(&mut rng, 1, 4);
        let t = TensorElement::new(e.clone(), f.clone(), &x * &y).unwrap();
        let expect = crate::linalg::operator_norm(&e.element(x.data())) * crate::linalg::operator_norm(&f.element(y.data()));
        assert!((mu_upper(&t, &OptOptions::default()).unwrap().value - expect).abs() < 1e-6);
        let z = t.with_coeffs(ComplexMatrix::zeros(2, 4)).unwrap();
        assert_eq!(mu_upper(&z, &OptOptions::default()).unwrap().value, 0.0);
        assert_eq!(mu_lower(&z, &OptOptions::default()).unwrap().value, 0.0);
    }

    #[test]
    fn sandwich_symmetry_dominance() {
        let mut rng = stream(2, "t", 0);
        for (l, r) in [("rowcap:2", "full:2x2"), ("row:2", "column:2"), ("column:2", "rowcap:2")] {
            let (e, f) = (sp(l), sp(r));
            let t = TensorElement::new(e.clone(), f.clone(), gaussian_matrix(&mut rng, e.dim(), f.dim())).unwrap();
            let opts = light();
            let up = mu_upper(&t, &opts).unwrap().value;
            let lo = mu_lower(&t, &opts).unwrap().value;
            assert!(t.min_norm() <= lo + 1e-10);
            assert!(lo <= up + 1e-6, "{lo} > {up}");
            let h = haagerup_upper(&t, &opts).unwrap().value.min(haagerup_upper(&t.transpose(), &opts).unwrap().value);
            assert!(up <= h + 1e-8);
            let upt = mu_upper(&t.transpose(), &opts).unwrap().value;
            assert!((up - upt).abs() <= 1e-4);
        }
    }

    #[test]
    fn space_windows() {
        for s in ["row:2", "column:3"] {
            let w = mu_of_space(&sp(s), &OptOptions::default()).unwrap();
            assert!(w.lower.value >= 1.0 - 1e-9 && w.upper.value <= 1.0 + 1e-2, "{s}: {} {}", w.lower.value, w.upper.value);
        }
        let w = mu_of_space(&sp("rowcap:2"), &OptOptions::default()).unwrap();
        assert!(w.upper.value <= libm::sqrt(2.0) + 1e-2, "{}", w.upper.value);
        assert!(w.lower.value <= w.upper.value + 1e-6);
        assert!(w.lower.value >= (1.0 + libm::sqrt(2.0)) / 2.0);
    }
}
