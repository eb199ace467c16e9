use num_complex::Complex64;
use pllsym::acceptance::term_scale;
use pllsym::charfun::{build_blocks, full_determinant, LinearizationPoint};
use pllsym::model::{rhs, Equilibrium, EquilibriumBranch, ModelKind, NetworkParams};
use pllsym::spectrum::lambert_w;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn random_z(rng: &mut ChaCha8Rng) -> Complex64 {
    let r = 10f64.powf(rng.gen_range(-3.0..3.0));
    Complex64::from_polar(r, rng.gen_range(-PI..PI))
}

#[test]
fn lambert_identity_all_branches() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in -3..=3 {
        for _ in 0..1000 {
            let z = random_z(&mut rng);
            let w = lambert_w(k, z).unwrap();
            let err = (w * w.exp() - z).norm();
            assert!(err <= 1e-12 * z.norm().max(1.0), "k={k} z={z} w={w} err={err:e}");
            // Branch check away from the cuts on the negative real axis.
            if z.im.abs() > 1e-3 * z.norm() {
                let unwound = w + w.ln() - z.ln() - Complex64::new(0.0, 2.0 * PI * k as f64);
                assert!(unwound.norm() < 1e-8, "k={k} z={z} w={w}");
            }
        }
    }
}

fn transpose_nodes(x: &[f64], a: usize, b: usize) -> Vec<f64> {
    let mut y = x.to_vec();
    y.swap(2 * a, 2 * b);
    y.swap(2 * a + 1, 2 * b + 1);
    y
}

proptest! {
    #[test]
    fn rhs_transposition_equivariance(
        n in 2usize..6,
        a in 0usize..6,
        b in 0usize..6,
        k in 0.2f64..3.0,
        mu in 0.05f64..2.0,
        tau in 0.0f64..20.0,
        seed in any::<u64>(),
    ) {
        let (a, b) = (a % n, b % n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let d: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let params = NetworkParams::new(n, k, mu, tau);
        for kind in [ModelKind::FullPhase, ModelKind::Phase] {
            let f = rhs(kind, &params, &x, &d, None).unwrap();
            let g = rhs(kind, &params, &transpose_nodes(&x, a, b), &transpose_nodes(&d, a, b), None).unwrap();
            let pf = transpose_nodes(&f, a, b);
            for (u, v) in g.iter().zip(&pf) {
                prop_assert!((u - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn phase_translation_invariance(
        n in 2usize..6,
        shift in -50.0f64..50.0,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let d: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let add = |v: &[f64]| -> Vec<f64> {
            v.iter().enumerate().map(|(i, &t)| if i % 2 == 0 { t + shift } else { t }).collect()
        };
        let params = NetworkParams::new(n, 1.3, 0.4, 2.5);
        let f = rhs(ModelKind::Phase, &params, &x, &d, None).unwrap();
        let g = rhs(ModelKind::Phase, &params, &add(&x), &add(&d), None).unwrap();
        for (u, v) in f.iter().zip(&g) {
            prop_assert!((u - v).abs() < 1e-11);
        }
    }

    #[test]
    fn block_product_matches_determinant(
        n in 2usize..6,
        k in 1.0f64..3.0,
        mu in 0.05f64..2.0,
        tau in 0.0f64..15.0,
        r in 0.0f64..10.0,
        arg in -PI..PI,
        minus in any::<bool>(),
        omega_hat in 0.0f64..2.0,
    ) {
        let lambda = Complex64::from_polar(r, arg);
        let params = NetworkParams::new(n, k, mu, tau);
        let branch = if minus { EquilibriumBranch::Minus } else { EquilibriumBranch::Plus };
        let eq = Equilibrium::new(k, branch).unwrap();
        for (kind, point) in [
            (ModelKind::FullPhase, LinearizationPoint::Equilibrium(eq)),
            (ModelKind::Phase, LinearizationPoint::Rotation(omega_hat)),
        ] {
            let det = full_determinant(kind, &params, point, lambda).unwrap();
            let prod = build_blocks(kind, &params, point).unwrap().product(lambda);
            let scale = det.norm().max(term_scale(&params, lambda).powi(n as i32));
            prop_assume!(scale.is_finite());
            prop_assert!((det - prod).norm() / scale < 1e-10, "{det} {prod}");
        }
    }

    #[test]
    fn blocks_conjugate_symmetric(
        k in 1.0f64..3.0,
        mu in 0.05f64..2.0,
        tau in 0.0f64..15.0,
        re in -3.0f64..3.0,
        im in -10.0f64..10.0,
    ) {
        let params = NetworkParams::new(3, k, mu, tau);
        let eq = Equilibrium::new(k, EquilibriumBranch::Minus).unwrap();
        let bs = build_blocks(ModelKind::FullPhase, &params, LinearizationPoint::Equilibrium(eq)).unwrap();
        let z = Complex64::new(re, im);
        for p in [&bs.fix_block, &bs.standard_block] {
            let a = p.eval(z.conj());
            let b = p.eval(z).conj();
            prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
        }
    }
}
