use std::sync::Arc;

use opnorm_core::cb::{evaluate_level_input, level_norm};
use opnorm_core::factor::gamma2_linf;
use opnorm_core::haagerup::{haagerup_upper, initial_decomposition};
use opnorm_core::linalg::gl_param;
use opnorm_core::mu::{mu_lower, mu_upper};
use opnorm_core::pairs::{random_quadruple, theorem2_blocks};
use opnorm_core::rng::{gaussian, gaussian_matrix, real_gaussian_matrix, stream};
use opnorm_core::space::SpaceRef;
use opnorm_core::{Certificate, ComplexMatrix, ConcreteOperatorSpace, OptOptions, SpaceMap, StandardKind, TensorElement, C64};
use proptest::prelude::*;

const KINDS: [&str; 5] = ["row:2", "column:2", "rowcap:2", "full:2x2", "column:3"];

fn sp(s: &str) -> SpaceRef {
    Arc::new(ConcreteOperatorSpace::standard(s.parse::<StandardKind>().unwrap()))
}

fn random_tensor(seed: u64, l: usize, r: usize) -> TensorElement {
    let (e, f) = (sp(KINDS[l]), sp(KINDS[r]));
    let mut rng = stream(seed, "prop-tensor", 0);
    let c = gaussian_matrix(&mut rng, e.dim(), f.dim());
    TensorElement::new(e, f, c).unwrap()
}

fn quick() -> OptOptions {
    OptOptions { restarts: Some(4), iters: Some(200), commutant_samples: Some(10), block_samples: Some(10), ..OptOptions::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn reparametrization_keeps_the_tensor(seed in any::<u64>(), l in 0usize..5, r in 0usize..5) {
        let t = random_tensor(seed, l, r);
        let d = initial_decomposition(&t).unwrap();
        let mut rng = stream(seed, "prop-gl", 0);
        let theta: Vec<f64> = (0..2 * d.len() * d.len()).map(|_| 0.5 * gaussian(&mut rng)).collect();
        let moved = d.reparametrized(&gl_param(d.len(), &theta)).unwrap();
        prop_assert!(moved.reconstruction_error(&t) <= 1e-10);
    }

    #[test]
    fn haagerup_is_homogeneous_and_dominates_min(seed in any::<u64>(), l in 0usize..5, r in 0usize..5, s in 0.1f64..10.0) {
        let t = random_tensor(seed, l, r);
        let h = haagerup_upper(&t, &quick()).unwrap().value;
        let hs = haagerup_upper(&t.scaled(C64::new(0.0, s)), &quick()).unwrap().value;
        prop_assert!((hs - s * h).abs() <= 1e-6 * s * h.max(1.0), "{} vs {}", hs, s * h);
        prop_assert!(t.min_norm() <= h + 1e-9);
    }

    #[test]
    fn haagerup_certificate_reproduces_value(seed in any::<u64>(), l in 0usize..5, r in 0usize..5) {
        let t = random_tensor(seed, l, r);
        let est = haagerup_upper(&t, &quick()).unwrap();
        let Certificate::Decomposition(d) = &est.certificate else { panic!("decomposition expected") };
        prop_assert!((d.value() - est.value).abs() <= 1e-8 * est.value.max(1.0));
        prop_assert!(d.reconstruction_error(&t) <= 1e-10);
    }

    #[test]
    fn mu_window_is_ordered(seed in any::<u64>(), l in 0usize..4, r in 0usize..4) {
        let t = random_tensor(seed, l, r);
        let opts = quick();
        let up = mu_upper(&t, &opts).unwrap().value;
        let lo = mu_lower(&t, &opts).unwrap().value;
        prop_assert!(t.min_norm() <= lo + 1e-10);
        prop_assert!(lo <= up + 1e-6, "{} > {}", lo, up);
        let h = haagerup_upper(&t, &opts).unwrap().value.min(haagerup_upper(&t.transpose(), &opts).unwrap().value);
        prop_assert!(up <= h + 1e-8);
    }

    #[test]
    fn level_certificates_are_unit_and_embed_upwards(seed in any::<u64>(), l in 0usize..5, r in 0usize..5) {
        let (e, f) = (sp(KINDS[l]), sp(KINDS[r]));
        let mut rng = stream(seed, "prop-map", 0);
        let u = SpaceMap::new(e.clone(), f.clone(), gaussian_matrix(&mut rng, f.dim(), e.dim())).unwrap();
        let opts = OptOptions { restarts: Some(4), iters: Some(200), ..OptOptions::default() };
        let lower = level_norm(&u, 1, &opts).unwrap();
        let Certificate::LevelInput { blocks, .. } = &lower.certificate else { panic!("level input expected") };
        let (num, den) = evaluate_level_input(&u, blocks);
        prop_assert!(den <= 1.0 + 1e-8);
        prop_assert!((num - lower.value).abs() <= 1e-8 * num.max(1.0));
        // the level-1 witness padded by a zero block is a level-2 input of the same value
        let padded: Vec<ComplexMatrix> = blocks.iter().map(|x| x.padded(2, 2)).collect();
        let (num2, den2) = evaluate_level_input(&u, &padded);
        prop_assert!((num2 - num).abs() < 1e-12 && (den2 - den).abs() < 1e-12);
        let upper = level_norm(&u, 2, &opts).unwrap();
        prop_assert!(lower.value <= upper.value + 1e-6, "{} > {}", lower.value, upper.value);
    }

    #[test]
    fn block_construction_commutes(seed in 0u64..1000, l in 0usize..4, r in 0usize..4) {
        let (e, f) = (sp(KINDS[l]), sp(KINDS[r]));
        if let Some(q) = random_quadruple(&e, &f, seed, 0, 6) {
            let b = theorem2_blocks(&q.alpha1, &q.alpha2, &q.beta1, &q.beta2).unwrap();
            for x in b.sigma1.images() {
                for y in b.sigma2.images() {
                    prop_assert!((&(&x * &y) - &(&y * &x)).max_abs() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn gamma2_is_homogeneous(seed in any::<u64>(), n in 1usize..4, s in 0.1f64..10.0) {
        let mut rng = stream(seed, "prop-gamma2", 0);
        let m = real_gaussian_matrix(&mut rng, n, n);
        let opts = OptOptions { restarts: Some(4), iters: Some(300), ..OptOptions::default() };
        let g = gamma2_linf(&m, &opts).unwrap().value;
        let gs = gamma2_linf(&m.scale_real(-s), &opts).unwrap().value;
        prop_assert!((gs - s * g).abs() <= 1e-6 * s * g);
        // γ₂ dominates the ∞→∞ norm, the largest row ℓ₁ sum
        let rows = (0..n).map(|i| m.row(i).data().iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
        prop_assert!(g >= rows - 1e-9);
    }
}
