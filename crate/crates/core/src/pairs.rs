//! Pairs of complete contractions with commuting ranges.
//!
//! For `σ₁: E → M_k` and `σ₂: F → M_k` with `σ₁(x)σ₂(y) = σ₂(y)σ₁(x)`,
//! `‖Σ c_{ij} σ₁(e_i)σ₂(f_j)‖ / (‖σ₁‖_cb ‖σ₂‖_cb)` is a lower bound for the
//! μ-norm of `Σ c_{ij} e_i ⊗ f_j`. Three families are produced here:
//!
//! - the spatial split `σ₁ = x ⊗ I`, `σ₂ = I ⊗ y`, which recovers the minimal
//!   norm;
//! - random `σ₁` with `σ₂` drawn inside the numerically computed commutant of
//!   its range;
//! - the strictly upper-triangular 3×3 block pairs built from a quadruple
//!   `α₁(x)α₂(y) = β₂(y)β₁(x)`.
//!
//! Every cb norm attached to a sample is exact or a certified upper bound, so
//! normalized evaluations are rigorous lower bounds.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::Rng;

use crate::cb::{hilbertian_cb, orthonormal_images};
use crate::error::{Error, Result};
use crate::estimate::{BoundKind, Certificate, NormEstimate, Trace};
use crate::linalg::{commutant_basis, operator_norm, pinv, trace_norm};
use crate::matrix::{combine, ComplexMatrix, C64};
use crate::rng::{complex_gaussian, gaussian_matrix, random_unitary, stream};
use crate::space::{ConcreteOperatorSpace, SpaceMap, SpaceRef, StandardKind, TensorElement};

/// Largest admissible `‖[σ₁(e_i), σ₂(f_j)]‖` and product-identity residual.
pub const COMMUTATOR_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    TensorSplit,
    CommutantSampled,
    Theorem2Block,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::TensorSplit => "tensor_split",
            Provenance::CommutantSampled => "commutant_sampled",
            Provenance::Theorem2Block => "theorem2_block",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CommutingPairSample {
    pub k: usize,
    pub sigma1: SpaceMap,
    pub sigma2: SpaceMap,
    /// Inclusion of the block whose compression is read off (block pairs).
    pub v_contraction: Option<ComplexMatrix>,
    /// Projection onto the block whose compression is read off.
    pub w_contraction: Option<ComplexMatrix>,
    pub cb1: NormEstimate,
    pub cb2: NormEstimate,
    pub provenance: Provenance,
}

impl CommutingPairSample {
    /// `max ‖σ₁(e_i)σ₂(f_j) − σ₂(f_j)σ₁(e_i)‖` over basis pairs.
    pub fn commutator_residual(&self) -> f64 {
        let (s1, s2) = (self.sigma1.images(), self.sigma2.images());
        let mut worst: f64 = 0.0;
        for a in &s1 {
            for b in &s2 {
                worst = worst.max(operator_norm(&(&(a * b) - &(b * a))));
            }
        }
        worst
    }
}

/// `(Σ c_{ij} σ₁(e_i)σ₂(f_j), its norm)`, the norm divided by
/// `cb1·cb2` when `normalize` is set.
pub fn pair_eval(sample: &CommutingPairSample, t: &TensorElement, normalize: bool) -> Result<(ComplexMatrix, f64)> {
    if sample.sigma1.domain().as_ref() != t.left().as_ref() || sample.sigma2.domain().as_ref() != t.right().as_ref() {
        return Err(Error::ShapeMismatch("sample spaces differ from the tensor's".into()));
    }
    let (s1, s2) = (sample.sigma1.images(), sample.sigma2.images());
    let mut sum = ComplexMatrix::zeros(sample.k, sample.k);
    for (i, a) in s1.iter().enumerate() {
        let right = combine(&(0..s2.len()).map(|j| t.coeffs()[(i, j)]).collect::<Vec<_>>(), &s2);
        sum = &sum + &(a * &right);
    }
    let mut norm = operator_norm(&sum);
    if normalize {
        let d = sample.cb1.value * sample.cb2.value;
        norm = if d > 0.0 { norm / d } else { 0.0 };
    }
    Ok((sum, norm))
}

/// Map sending `e_i` to `images[i] ∈ M_k`, as a map into `full(k,k)`.
pub fn map_into_full(domain: SpaceRef, images: &[ComplexMatrix]) -> Result<SpaceMap> {
    let (p, q) = images.first().ok_or(Error::EmptyBasis)?.shape();
    if images.len() != domain.dim() || images.iter().any(|m| m.shape() != (p, q)) {
        return Err(Error::ShapeMismatch(format!("{} images for a {}-dimensional domain", images.len(), domain.dim())));
    }
    let full = Arc::new(ConcreteOperatorSpace::standard(StandardKind::Full(p, q)));
    let coeffs = ComplexMatrix::from_fn(p * q, images.len(), |r, i| images[i].data()[r]);
    SpaceMap::new(domain, full, coeffs)
}

fn bound(value: f64, kind: BoundKind, method: &'static str) -> NormEstimate {
    NormEstimate {
        value,
        bound_kind: kind,
        certificate: Certificate::None,
        trace: Trace::closed_form(method, 0),
    }
}

/// An upper bound on the cb norm of `e_i ↦ images[i]` that is never below
/// the true value: exact for row/column domains, otherwise the smaller of
/// `structural` (when known) and `Σ_j ‖K_j‖₁ ‖u(e_j)‖`, where `x ↦ ⟨K_j, x⟩`
/// are the coordinate functionals.
pub(crate) fn certified_cb(domain: &ConcreteOperatorSpace, images: &[ComplexMatrix], structural: Option<f64>) -> NormEstimate {
    if images.iter().all(|m| m.is_zero()) {
        return bound(0.0, BoundKind::Exact, "zero-map");
    }
    if let Some(kind) = domain.hilbertian() {
        return bound(hilbertian_cb(&orthonormal_images(domain, images), kind), BoundKind::Exact, "closed-form");
    }
    let reps = domain.dual_representers();
    let functional: f64 = reps.iter().zip(images).map(|(k, y)| trace_norm(k) * operator_norm(y)).sum();
    match structural {
        Some(s) if s <= functional => bound(s, BoundKind::Upper, "compression-bound"),
        _ => bound(functional, BoundKind::Upper, "functional-bound"),
    }
}

/// `σ₁ = x ⊗ I`, `σ₂ = I ⊗ y` on square-padded ambients. Both are complete
/// isometries and `pair_eval` returns the minimal norm.
pub fn tensor_split_sample(left: &SpaceRef, right: &SpaceRef) -> CommutingPairSample {
    let (n1, n2) = (left.square_size(), right.square_size());
    let s1: Vec<ComplexMatrix> = left.square_basis().iter().map(|x| x.kron(&ComplexMatrix::identity(n2))).collect();
    let s2: Vec<ComplexMatrix> = right.square_basis().iter().map(|y| ComplexMatrix::identity(n1).kron(y)).collect();
    CommutingPairSample {
        k: n1 * n2,
        sigma1: map_into_full(left.clone(), &s1).expect("images match the basis"),
        sigma2: map_into_full(right.clone(), &s2).expect("images match the basis"),
        v_contraction: None,
        w_contraction: None,
        cb1: bound(1.0, BoundKind::Exact, "spatial-inclusion"),
        cb2: bound(1.0, BoundKind::Exact, "spatial-inclusion"),
        provenance: Provenance::TensorSplit,
    }
}

/// Gaussian matrix scaled to operator norm one.
fn contraction<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, rows, cols);
    g.scale_real(1.0 / operator_norm(&g))
}

/// Images of `x ↦ P (x̃ ⊗ I_n) Q` with `P`, `Q` contractions: cb norm at most
/// one. The ampliation keeps the map injective for generic `P`, `Q`.
fn compression_images<R: Rng>(rng: &mut R, space: &ConcreteOperatorSpace, rows: usize, cols: usize) -> Vec<ComplexMatrix> {
    let n = space.square_size();
    let p = contraction(rng, rows, n * n);
    let q = contraction(rng, n * n, cols);
    let id = ComplexMatrix::identity(n);
    space.square_basis().iter().map(|x| &(&p * &x.kron(&id)) * &q).collect()
}

/// `σ₁(x) = U(c(x) ⊗ I_b)U*` with `c` a random compression and `U` unitary,
/// and `σ₂` a random map into the commutant of `σ₁`'s range. `None` when no admissible size fits.
pub fn commutant_sample(
    left: &SpaceRef,
    right: &SpaceRef,
    seed: u64,
    index: u64,
    max_size: usize,
) -> Option<CommutingPairSample> {
    let mut rng = stream(seed, "commutant-sample", index);
    let shapes: Vec<(usize, usize)> =
        (1..=max_size).flat_map(|a| (1..=max_size).map(move |b| (a, b))).filter(|(a, b)| a * b <= max_size && a * b >= 2).collect();
    let &(a, b) = shapes.get(rng.gen_range(0..shapes.len().max(1)))?;
    let k = a * b;
    let u = random_unitary(&mut rng, k);
    let inner = compression_images(&mut rng, left, a, a);
    let s1: Vec<ComplexMatrix> =
        inner.iter().map(|x| &(&u * &x.kron(&ComplexMatrix::identity(b))) * &u.adjoint()).collect();
    let commutant = commutant_basis(&s1);
    let s2: Vec<ComplexMatrix> = (0..right.dim())
        .map(|_| {
            let c: Vec<C64> = (0..commutant.len()).map(|_| complex_gaussian(&mut rng)).collect();
            combine(&c, &commutant)
        })
        .collect();
    let cb2 = certified_cb(right, &s2, None);
    let sample = CommutingPairSample {
        k,
        sigma1: map_into_full(left.clone(), &s1).ok()?,
        sigma2: map_into_full(right.clone(), &s2).ok()?,
        v_contraction: None,
        w_contraction: None,
        cb1: bound(1.0, BoundKind::Upper, "compression-bound"),
        cb2,
        provenance: Provenance::CommutantSampled,
    };
    (sample.commutator_residual() <= COMMUTATOR_TOL * (1.0 + sample.cb2.value)).then_some(sample)
}

/// Output of the block construction: `σ₁(x) = [[0, α₁(x), 0], [0, 0, β₁(x)],
/// [0, 0, 0]]`, `σ₂(y) = [[0, β₂(y), 0], [0, 0, α₂(y)], [0, 0, 0]]`, `w` the
/// projection onto the first block and `v` the inclusion of the third, so
/// that `w σ₁(x)σ₂(y) v = α₁(x)α₂(y)`.
#[derive(Debug, Clone)]
pub struct Theorem2Blocks {
    pub sigma1: SpaceMap,
    pub sigma2: SpaceMap,
    pub v: ComplexMatrix,
    pub w: ComplexMatrix,
}

impl Theorem2Blocks {
    /// `max_{i,j} ‖σ₁(e_i)σ₂(f_j) − σ₂(f_j)σ₁(e_i)‖`.
    pub fn commutator_residual(&self) -> f64 {
        let (s1, s2) = (self.sigma1.images(), self.sigma2.images());
        let mut worst: f64 = 0.0;
        for x in &s1 {
            for y in &s2 {
                worst = worst.max((&(x * y) - &(y * x)).max_abs());
            }
        }
        worst
    }

    /// `max_{i,j} ‖W σ₁(e_i)σ₂(f_j) V − α₁(e_i)α₂(f_j)‖`.
    pub fn reconstruction_error(&self, alpha1: &SpaceMap, alpha2: &SpaceMap) -> f64 {
        let (s1, s2) = (self.sigma1.images(), self.sigma2.images());
        let (a1, a2) = (alpha1.images(), alpha2.images());
        let mut worst: f64 = 0.0;
        for (x, ax) in s1.iter().zip(&a1) {
            for (y, ay) in s2.iter().zip(&a2) {
                let rec = &(&self.w * &(x * y)) * &self.v;
                worst = worst.max(rec.max_diff(&(ax * ay)));
            }
        }
        worst
    }
}

/// `max_{i,j} ‖α₁(e_i)α₂(f_j) − β₂(f_j)β₁(e_i)‖`.
pub fn identity_residual(alpha1: &SpaceMap, alpha2: &SpaceMap, beta1: &SpaceMap, beta2: &SpaceMap) -> Result<f64> {
    let (a1, a2, b1, b2) = (alpha1.images(), alpha2.images(), beta1.images(), beta2.images());
    let (h1, h2) = a1[0].shape();
    let h3 = a2[0].cols();
    if a2[0].rows() != h2 || b2[0].shape() != (h1, h2) || b1[0].shape() != (h2, h3) {
        return Err(Error::ShapeMismatch("quadruple blocks do not chain through one middle space".into()));
    }
    if alpha1.domain() != beta1.domain() || alpha2.domain() != beta2.domain() {
        return Err(Error::ShapeMismatch("α₁, β₁ and α₂, β₂ must share domains".into()));
    }
    let mut worst: f64 = 0.0;
    for (x, bx) in a1.iter().zip(&b1) {
        for (y, by) in a2.iter().zip(&b2) {
            worst = worst.max((&(x * y) - &(by * bx)).max_abs());
        }
    }
    Ok(worst)
}

pub fn theorem2_blocks(alpha1: &SpaceMap, alpha2: &SpaceMap, beta1: &SpaceMap, beta2: &SpaceMap) -> Result<Theorem2Blocks> {
    let residual = identity_residual(alpha1, alpha2, beta1, beta2)?;
    if residual > COMMUTATOR_TOL {
        return Err(Error::IdentityViolated { residual });
    }
    let (a1, a2, b1, b2) = (alpha1.images(), alpha2.images(), beta1.images(), beta2.images());
    let (h1, h2) = a1[0].shape();
    let h3 = a2[0].cols();
    let k = h1 + h2 + h3;
    let place = |upper: &ComplexMatrix, lower: &ComplexMatrix| {
        let mut m = ComplexMatrix::zeros(k, k);
        m.set_block(0, h1, upper);
        m.set_block(h1, h1 + h2, lower);
        m
    };
    let s1: Vec<ComplexMatrix> = a1.iter().zip(&b1).map(|(a, b)| place(a, b)).collect();
    let s2: Vec<ComplexMatrix> = b2.iter().zip(&a2).map(|(b, a)| place(b, a)).collect();
    let w = ComplexMatrix::identity(h1).padded(h1, k);
    let mut v = ComplexMatrix::zeros(k, h3);
    v.set_block(h1 + h2, 0, &ComplexMatrix::identity(h3));
    Ok(Theorem2Blocks {
        sigma1: map_into_full(alpha1.domain().clone(), &s1)?,
        sigma2: map_into_full(alpha2.domain().clone(), &s2)?,
        v,
        w,
    })
}

/// A quadruple satisfying the product identity, with cb bounds for each map.
#[derive(Debug, Clone)]
pub struct Quadruple {
    pub alpha1: SpaceMap,
    pub alpha2: SpaceMap,
    pub beta1: SpaceMap,
    pub beta2: SpaceMap,
    /// Certified cb bounds of `α₁, α₂, β₁, β₂`, each at most one.
    pub bounds: [f64; 4],
}

/// Random contractive quadruple through `M_{h×d}`, `M_{d×1}`: `α₁, α₂, β₁`
/// are compressions, `β₂` is the least-squares solution of the product
/// identity, and the `E₂` side is rescaled to be contractive. `None` when
/// the solve leaves a residual above tolerance or the size does not fit.
pub fn random_quadruple(left: &SpaceRef, right: &SpaceRef, seed: u64, index: u64, max_size: usize) -> Option<Quadruple> {
    let mut rng = stream(seed, "quadruple", index);
    let m1 = left.dim();
    let h1 = 1 + usize::from(rng.gen::<bool>() && m1 + 3 <= max_size);
    let d_max = max_size.checked_sub(h1 + 1)?;
    if m1 > d_max {
        return None;
    }
    let d = rng.gen_range(m1..=d_max);
    let a1 = compression_images(&mut rng, left, h1, d);
    let b1 = compression_images(&mut rng, left, d, 1);
    let a2 = compression_images(&mut rng, right, d, 1);
    // β₂(f_j)·[β₁(e_1) … β₁(e_m)] = [α₁(e_i)α₂(f_j)]_i
    let basis1 = ComplexMatrix::hstack(&b1);
    let solve = pinv(&basis1, 1e-12);
    let b2: Vec<ComplexMatrix> = a2
        .iter()
        .map(|y| {
            let rhs = ComplexMatrix::hstack(&a1.iter().map(|x| x * y).collect::<Vec<_>>());
            &rhs * &solve
        })
        .collect();
    let cb_a1 = certified_cb(left, &a1, Some(1.0)).value;
    let cb_b1 = certified_cb(left, &b1, Some(1.0)).value;
    let cb_a2 = certified_cb(right, &a2, Some(1.0)).value;
    let cb_b2 = certified_cb(right, &b2, None).value;
    let scale = cb_a2.max(cb_b2);
    if scale == 0.0 {
        return None;
    }
    let a2: Vec<ComplexMatrix> = a2.iter().map(|m| m.scale_real(1.0 / scale)).collect();
    let b2: Vec<ComplexMatrix> = b2.iter().map(|m| m.scale_real(1.0 / scale)).collect();
    let q = Quadruple {
        alpha1: map_into_full(left.clone(), &a1).ok()?,
        alpha2: map_into_full(right.clone(), &a2).ok()?,
        beta1: map_into_full(left.clone(), &b1).ok()?,
        beta2: map_into_full(right.clone(), &b2).ok()?,
        bounds: [cb_a1, cb_a2 / scale, cb_b1, cb_b2 / scale],
    };
    let residual = identity_residual(&q.alpha1, &q.alpha2, &q.beta1, &q.beta2).ok()?;
    (residual <= COMMUTATOR_TOL).then_some(q)
}

/// Block pair built from a random quadruple; `cb(σ₁) ≤ max(cb α₁, cb β₁)`
/// and likewise for `σ₂`.
pub fn theorem2_sample(left: &SpaceRef, right: &SpaceRef, seed: u64, index: u64, max_size: usize) -> Option<CommutingPairSample> {
    let q = random_quadruple(left, right, seed, index, max_size)?;
    let blocks = theorem2_blocks(&q.alpha1, &q.alpha2, &q.beta1, &q.beta2).ok()?;
    let k = blocks.sigma1.codomain().ambient().0;
    Some(CommutingPairSample {
        k,
        sigma1: blocks.sigma1,
        sigma2: blocks.sigma2,
        v_contraction: Some(blocks.v),
        w_contraction: Some(blocks.w),
        cb1: bound(q.bounds[0].max(q.bounds[2]), BoundKind::Upper, "block-bound"),
        cb2: bound(q.bounds[1].max(q.bounds[3]), BoundKind::Upper, "block-bound"),
        provenance: Provenance::Theorem2Block,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cb::level_norm;
    use crate::estimate::OptOptions;
    use crate::matrix::ONE;

    fn sp(s: &str) -> SpaceRef {
        Arc::new(ConcreteOperatorSpace::standard(s.parse::<StandardKind>().unwrap()))
    }

    fn scalar_map(m: ComplexMatrix) -> SpaceMap {
        map_into_full(sp("scalar"), &[m]).unwrap()
    }

    #[test]
    fn matrix_unit_example() {
        let e12 = ComplexMatrix::unit(2, 2, 0, 1);
        let e21 = ComplexMatrix::unit(2, 2, 1, 0);
        let (a1, a2, b2, b1) = (scalar_map(e12.clone()), scalar_map(e21.clone()), scalar_map(e12), scalar_map(e21));
        let blocks = theorem2_blocks(&a1, &a2, &b1, &b2).unwrap();
        let (s1, s2) = (&blocks.sigma1.images()[0], &blocks.sigma2.images()[0]);
        assert!((&(s1 * s2) - &(s2 * s1)).max_abs() < 1e-12);
        let rec = &(&blocks.w * &(s1 * s2)) * &blocks.v;
        assert!(rec.max_diff(&ComplexMatrix::unit(2, 2, 0, 0)) < 1e-12);

        let sample = CommutingPairSample {
            k: 6,
            sigma1: blocks.sigma1.clone(),
            sigma2: blocks.sigma2.clone(),
            v_contraction: Some(blocks.v.clone()),
            w_contraction: Some(blocks.w.clone()),
            cb1: bound(1.0, BoundKind::Exact, "t"),
            cb2: bound(1.0, BoundKind::Exact, "t"),
            provenance: Provenance::Theorem2Block,
        };
        let t = TensorElement::new(sp("scalar"), sp("scalar"), ComplexMatrix::identity(1)).unwrap();
        assert!((pair_eval(&sample, &t, true).unwrap().1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn violations_and_zero_maps() {
        let z = scalar_map(ComplexMatrix::zeros(2, 2));
        let b = theorem2_blocks(&z, &z, &z, &z).unwrap();
        assert!(b.sigma1.is_zero() && b.sigma2.is_zero());
        let mut off = ComplexMatrix::zeros(2, 2);
        off[(0, 0)] = C64::new(1e-3, 0.0);
        let e = scalar_map(ComplexMatrix::identity(2));
        match theorem2_blocks(&e, &scalar_map(off), &z, &z) {
            Err(Error::IdentityViolated { residual }) => assert!((residual - 1e-3).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn spatial_split_gives_min_norm() {
        let mut rng = stream(1, "t", 0);
        for (l, r) in [("rowcap:2", "full:2x2"), ("row:2", "column:3"), ("scalar", "rowcap:2")] {
            let (e, f) = (sp(l), sp(r));
            let t = TensorElement::new(e.clone(), f.clone(), gaussian_matrix(&mut rng, e.dim(), f.dim())).unwrap();
            let s = tensor_split_sample(&e, &f);
            assert!(s.commutator_residual() < 1e-14);
            assert!((pair_eval(&s, &t, true).unwrap().1 - t.min_norm()).abs() < 1e-10);
        }
    }

    #[test]
    fn sampled_pairs_commute_and_stay_below_haagerup() {
        let (e, f) = (sp("rowcap:2"), sp("full:2x2"));
        let mut rng = stream(2, "t", 0);
        let t = TensorElement::new(e.clone(), f.clone(), gaussian_matrix(&mut rng, 2, 4)).unwrap();
        let h = crate::haagerup::haagerup_upper(&t, &OptOptions::default()).unwrap().value;
        let mut seen = [0usize; 2];
        for i in 0..20 {
            if let Some(s) = commutant_sample(&e, &f, 3, i, 6) {
                seen[0] += 1;
                assert!(s.commutator_residual() <= 1e-10 * (1.0 + s.cb2.value));
                assert!(pair_eval(&s, &t, true).unwrap().1 <= h + 1e-6);
            }
            if let Some(s) = theorem2_sample(&e, &f, 3, i, 6) {
                seen[1] += 1;
                assert!(s.commutator_residual() <= 1e-10);
                assert!(s.cb1.value <= 1.0 + 1e-12 && s.cb2.value <= 1.0 + 1e-12);
                assert!(pair_eval(&s, &t, true).unwrap().1 <= h + 1e-6);
            }
        }
        assert!(seen[0] > 10 && seen[1] > 10, "{seen:?}");
    }

    #[test]
    fn block_sigmas_are_contractive() {
        let (e, f) = (sp("row:2"), sp("rowcap:2"));
        let q = random_quadruple(&e, &f, 5, 0, 6).unwrap();
        let b = theorem2_blocks(&q.alpha1, &q.alpha2, &q.beta1, &q.beta2).unwrap();
        let opts = OptOptions { restarts: Some(4), iters: Some(200), ..OptOptions::default() };
        for s in [&b.sigma1, &b.sigma2] {
            let k = crate::cb::smith_level(s);
            assert!(level_norm(s, k, &opts).unwrap().value <= 1.0 + 1e-8);
        }
    }

    #[test]
    fn certified_bounds_dominate_level_norms() {
        let rc = sp("rowcap:2");
        let imgs = [ComplexMatrix::unit(1, 2, 0, 0), ComplexMatrix::unit(1, 2, 0, 1)];
        let c = certified_cb(&rc, &imgs, None);
        let u = map_into_full(rc, &imgs).unwrap();
        let l = level_norm(&u, 2, &OptOptions::default()).unwrap();
        assert!(l.value <= c.value + 1e-9, "{} vs {}", l.value, c.value);
        assert_eq!(certified_cb(&sp("row:2"), &imgs, None).bound_kind, BoundKind::Exact);
        let _ = ONE;
    }
}
