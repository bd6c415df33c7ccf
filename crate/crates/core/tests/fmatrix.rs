use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qmonoidal::fmatrix::*;
use qmonoidal::linalg::{c, frob, real, unitarity_residual, CMat};
use qmonoidal::random::{random_ao, random_unitary};
use qmonoidal::{FMatrix, Sign, Tolerances};

fn tol() -> Tolerances {
    Tolerances::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn canonical_form_recovers_invariants(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = random_ao(n, &mut rng).unwrap();
        let cf = canonical_form_ao(&r.matrix, &tol()).unwrap();
        prop_assert_eq!(cf.sign, r.sign);
        prop_assert_eq!(cf.fixed_block, r.fixed_block);
        prop_assert_eq!(cf.lambdas.len(), r.lambdas.len());
        for (a, b) in cf.lambdas.iter().zip(&r.lambdas) {
            prop_assert!((a - b).abs() < 1e-7, "{a} vs {b}");
        }
        let w = &cf.transition;
        prop_assert!(frob(&(w.transpose() * r.matrix.matrix() * w - cf.matrix())) < 1e-8);
        prop_assert!(unitarity_residual(w) < 1e-8);
    }

    #[test]
    fn canonical_form_is_idempotent(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = random_ao(n, &mut rng).unwrap();
        let canonical = FMatrix::new(canonical_matrix_ao(r.sign, &r.lambdas, r.fixed_block)).unwrap();
        let cf = canonical_form_ao(&canonical, &tol()).unwrap();
        prop_assert!(frob(&(cf.matrix() - canonical.matrix())) < 1e-8);
        prop_assert!(frob(&(&cf.transition - CMat::identity(n, n))) < 1e-8, "{}", cf.transition);
    }

    #[test]
    fn scaled_congruence_is_equivalent(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_ao(n, &mut rng).unwrap().matrix;
        let u = random_unitary(n, &mut rng);
        let lambda = c(rng.random_range(0.2..3.0), rng.random_range(-1.0..1.0));
        let g = f.congruence(&u).scaled(lambda);
        let e = equivalent_ao(&f, &g, &tol()).unwrap();
        prop_assert!(e.equivalent);
        prop_assert!((e.scale_modulus.unwrap() - lambda.norm()).abs() < 1e-8);
        prop_assert!(equivalent_ao(&g, &f, &tol()).unwrap().equivalent);
        prop_assert!(equivalent_ao(&f, &f, &tol()).unwrap().equivalent);
        prop_assert!(monoidally_equivalent_ao(&f, &g, &tol()).unwrap());
    }

    #[test]
    fn normalized_matrices_are_balanced(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_ao(n, &mut rng).unwrap().matrix.scaled(c(rng.random_range(0.1..5.0), 0.3));
        let g = normalize_ao(&f, &tol()).unwrap();
        prop_assert!((g.trace() - g.inv_trace()).abs() < 1e-8 * g.trace());
        let p = validate_ao(&g, &tol()).unwrap();
        prop_assert!((p.c.abs() - 1.0).abs() < 1e-10);
        prop_assert!(p.qdim >= n as f64 - 1e-10);
    }

    #[test]
    fn au_equivalence_under_two_sided_unitaries(seed in any::<u64>(), n in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..4.0)).collect();
        let f = FMatrix::diagonal(&d).unwrap();
        let g = FMatrix::new(random_unitary(n, &mut rng) * f.matrix() * random_unitary(n, &mut rng)).unwrap();
        prop_assert!(equivalent_au(&f, &g, &tol()).unwrap());
        prop_assert!(monoidally_equivalent_au(&f, &g, &tol()).unwrap());
        let p = validate_au(&f, &tol()).unwrap();
        prop_assert!(p.qdim >= n as f64 - 1e-10);
    }
}

#[test]
fn qdim_equals_size_only_for_unitary_singular_values() {
    let p = validate_ao(&FMatrix::identity(3), &tol()).unwrap();
    assert!((p.qdim - 3.0).abs() < 1e-12);
    let p = validate_ao(&suq2(0.5), &tol()).unwrap();
    assert!(p.qdim > 2.0 + 1e-3);
    let p = validate_au(&FMatrix::diagonal(&[1.0, 1.0]).unwrap(), &tol()).unwrap();
    assert!((p.qdim - 2.0).abs() < 1e-12);
}

#[test]
fn monoidal_equivalence_is_transitive() {
    let t = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let set: Vec<FMatrix> = vec![
        suq2(0.2),
        construct_ao_companion(Sign::Minus, 5.2, 4, &t).unwrap(),
        construct_ao_companion(Sign::Minus, 5.2, 4, &t).unwrap().congruence(&random_unitary(4, &mut rng)),
        FMatrix::identity(2),
        FMatrix::identity(3),
        construct_ao_companion(Sign::Plus, 3.0, 2, &t).unwrap(),
        FMatrix::from_real_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap(),
    ];
    let rel: Vec<Vec<bool>> = set
        .iter()
        .map(|a| set.iter().map(|b| monoidally_equivalent_ao(a, b, &t).unwrap()).collect())
        .collect();
    for i in 0..set.len() {
        assert!(rel[i][i]);
        for j in 0..set.len() {
            assert_eq!(rel[i][j], rel[j][i]);
            for k in 0..set.len() {
                if rel[i][j] && rel[j][k] {
                    assert!(rel[i][k], "{i} ~ {j} ~ {k}");
                }
            }
        }
    }
    assert!(rel[0][1] && rel[0][2]);
    assert!(!rel[0][3]);
}

#[test]
fn companion_sweep() {
    let t = tol();
    for n in 1..=6usize {
        for trace in [n as f64, n as f64 + 0.5, n as f64 + 3.7, 2.0 * n as f64 + 10.0] {
            for sign in [Sign::Plus, Sign::Minus] {
                match construct_ao_companion(sign, trace, n, &t) {
                    Ok(f) => {
                        let p = validate_ao(&f, &t).unwrap();
                        assert_eq!(p.sign, sign);
                        assert!((p.trace - trace).abs() < 1e-10, "n={n} trace={trace}");
                        let ff = f.matrix() * f.conj();
                        assert!(frob(&(ff - CMat::identity(n, n) * real(sign.value()))) < 1e-10);
                    }
                    Err(_) => {
                        let feasible = match sign {
                            Sign::Minus => n % 2 == 0,
                            Sign::Plus => n >= 2 || trace == 1.0,
                        };
                        assert!(!feasible, "n={n} trace={trace} sign={sign:?} should be feasible");
                    }
                }
            }
        }
    }
}

#[test]
fn companion_matches_su_invariants() {
    let f = construct_ao_companion(Sign::Minus, 5.2, 4, &tol()).unwrap();
    assert!(monoidally_equivalent_ao(&suq2(0.2), &f, &tol()).unwrap());
    assert!(!equivalent_ao(&suq2(0.2), &f, &tol()).unwrap().equivalent);
}
