//! Relations between the different norm engines.

use std::sync::Arc;

use opnorm_core::cb::{cb_norm, cb_norm_hilbertian_domain, level_norm, smith_level};
use opnorm_core::factor::{gamma_rc, split_norm};
use opnorm_core::haagerup::haagerup_upper;
use opnorm_core::linalg::operator_norm;
use opnorm_core::mu::mu_upper;
use opnorm_core::pairs::{commutant_sample, pair_eval, random_quadruple, theorem2_blocks, theorem2_sample};
use opnorm_core::rng::{gaussian_matrix, stream};
use opnorm_core::space::{Hilbertian, SpaceRef};
use opnorm_core::{ComplexMatrix, ConcreteOperatorSpace, OptOptions, SpaceMap, StandardKind, TensorElement};

fn sp(s: &str) -> SpaceRef {
    Arc::new(ConcreteOperatorSpace::standard(s.parse::<StandardKind>().unwrap()))
}

fn quick() -> OptOptions {
    OptOptions { restarts: Some(4), iters: Some(200), ..OptOptions::default() }
}

#[test]
fn pair_evaluations_never_beat_split_representations() {
    let pairs = [("rowcap:2", "full:2x2"), ("row:2", "column:2"), ("column:2", "rowcap:2"), ("full:2x2", "row:2"), ("column:2", "row:2")];
    for split in 0..50u64 {
        let (l, r) = pairs[split as usize % pairs.len()];
        let (e, f) = (sp(l), sp(r));
        let mut rng = stream(11, "feasibility", split);
        let v = TensorElement::new(e.clone(), f.clone(), gaussian_matrix(&mut rng, e.dim(), f.dim())).unwrap();
        let w = v.with_coeffs(gaussian_matrix(&mut rng, e.dim(), f.dim())).unwrap();
        let t = v.with_coeffs(v.coeffs() + w.coeffs()).unwrap();
        let bound = haagerup_upper(&v, &quick()).unwrap().value + haagerup_upper(&w.transpose(), &quick()).unwrap().value;
        for i in 0..20u64 {
            let sample = if i % 2 == 0 {
                commutant_sample(&e, &f, split, i, 6)
            } else {
                theorem2_sample(&e, &f, split, i, 6)
            };
            if let Some(s) = sample {
                let value = pair_eval(&s, &t, true).unwrap().1;
                assert!(value <= bound + 1e-6, "split {split}, sample {i}: {value} > {bound}");
            }
        }
    }
}

#[test]
fn mu_dominates_the_coefficient_norm_on_column_tensors() {
    for (n, m) in [(2, 2), (2, 3), (3, 2)] {
        let (e, f) = (sp(&format!("column:{n}")), sp(&format!("column:{m}")));
        let mut rng = stream(12, "ineq3", n as u64 * 10 + m as u64);
        let c = gaussian_matrix(&mut rng, n, m);
        let t = TensorElement::new(e, f, c.clone()).unwrap();
        let up = mu_upper(&t, &OptOptions::default()).unwrap().value;
        assert!(operator_norm(&c) <= up + 1e-6, "{} > {up}", operator_norm(&c));
    }
}

#[test]
fn split_norm_matches_mu_upper_on_column_row_tensors() {
    // t ∈ C_n ⊗ R_n is the map R_n = C_n* → R_n with matrix ᵗc
    for n in [2usize, 3] {
        let (c_n, r_n) = (sp(&format!("column:{n}")), sp(&format!("row:{n}")));
        for k in 0..3u64 {
            let mut rng = stream(13, "split-vs-mu", n as u64 * 10 + k);
            let c = gaussian_matrix(&mut rng, n, n);
            let t = TensorElement::new(c_n.clone(), r_n.clone(), c.clone()).unwrap();
            let u = SpaceMap::new(r_n.clone(), r_n.clone(), c.transpose()).unwrap();
            let mu = mu_upper(&t, &OptOptions::default()).unwrap().value;
            let split = split_norm(&u, &OptOptions::default()).unwrap().value;
            assert!((mu - split).abs() <= 2e-2 * mu.max(1.0), "n={n}, k={k}: mu {mu} vs split {split}");
        }
    }
}

#[test]
fn haagerup_is_not_symmetric() {
    let t = TensorElement::diagonal(sp("column:2"), sp("row:2")).unwrap();
    let h = haagerup_upper(&t, &OptOptions::default()).unwrap().value;
    let ht = haagerup_upper(&t.transpose(), &OptOptions::default()).unwrap().value;
    assert!(ht - h > 0.5, "{h} vs {ht}");
}

fn corpus() -> Vec<SpaceMap> {
    let mut rng = stream(14, "cb-corpus", 0);
    let mut out = Vec::new();
    for (d, c) in [("row:2", "full:2x2"), ("rowcap:2", "column:2"), ("full:2x2", "full:2x2"), ("column:2", "rowcap:2")] {
        let (e, f) = (sp(d), sp(c));
        out.push(SpaceMap::new(e.clone(), f.clone(), gaussian_matrix(&mut rng, f.dim(), e.dim())).unwrap());
    }
    out
}

#[test]
fn level_norm_stabilizes_at_the_smith_level() {
    for u in corpus() {
        let q = smith_level(&u);
        let at = level_norm(&u, q, &OptOptions::default()).unwrap().value;
        let above = level_norm(&u, q + 1, &OptOptions::default()).unwrap().value;
        assert!((at - above).abs() <= 1e-3 * at.max(1.0), "{}: {at} vs {above}", u.domain().label());
    }
}

#[test]
fn closed_form_agrees_with_the_optimizer() {
    for (kind, shape) in [(Hilbertian::Row, (1, 3)), (Hilbertian::Column, (3, 1))] {
        for seed in 0..4u64 {
            let mut rng = stream(15, "closed-vs-level", seed);
            let domain = sp(&format!("{}:3", kind.as_str()));
            let images: Vec<ComplexMatrix> = (0..3).map(|_| gaussian_matrix(&mut rng, 2 + seed as usize % 3, 2)).collect();
            let codomain = Arc::new(ConcreteOperatorSpace::new(images.clone(), "images").unwrap());
            let u = SpaceMap::new(domain.clone(), codomain, ComplexMatrix::identity(3)).unwrap();
            assert_eq!(domain.ambient(), shape);
            let closed = cb_norm_hilbertian_domain(&images, kind).unwrap().value;
            let level = level_norm(&u, smith_level(&u), &OptOptions::default()).unwrap().value;
            assert!((closed - level).abs() <= 1e-2 * closed, "{kind:?}: {closed} vs {level}");
            assert!(level <= closed + 1e-8);
        }
    }
}

#[test]
fn block_sigmas_do_not_exceed_their_inputs() {
    let (e, f) = (sp("rowcap:2"), sp("row:2"));
    let opts = OptOptions { restarts: Some(6), iters: Some(300), ..OptOptions::default() };
    for index in 0..4u64 {
        let Some(q) = random_quadruple(&e, &f, 16, index, 6) else { continue };
        let b = theorem2_blocks(&q.alpha1, &q.alpha2, &q.beta1, &q.beta2).unwrap();
        let inputs = q.bounds.iter().cloned().fold(0.0, f64::max);
        for sigma in [&b.sigma1, &b.sigma2] {
            let cb = level_norm(sigma, smith_level(sigma), &opts).unwrap().value;
            assert!(cb <= inputs + 1e-2, "{cb} > {inputs}");
        }
    }
}

#[test]
fn factorization_bounds_of_identities_are_at_least_one() {
    let opts = OptOptions::default();
    for s in ["row:2", "column:3", "rowcap:2"] {
        let id = SpaceMap::identity(sp(s));
        assert!((cb_norm(&id, &opts).unwrap().value - 1.0).abs() < 1e-6);
        for kind in [Hilbertian::Row, Hilbertian::Column] {
            assert!(gamma_rc(&id, kind, &opts).unwrap().value >= 1.0 - 1e-9);
        }
    }
}
