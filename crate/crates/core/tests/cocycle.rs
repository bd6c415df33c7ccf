use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qmonoidal::cocycle::{build_cocycle, coboundary_equivalent};
use qmonoidal::fmatrix::{canonical_matrix_ao, equivalent_ao, suq2};
use qmonoidal::linalg::{frob, real, CMat};
use qmonoidal::random::{random_ao, random_unitary};
use qmonoidal::{Error, FMatrix, Realization, Sign, Tolerances, Word};

fn tol() -> Tolerances {
    Tolerances::default()
}

fn ao(f: &FMatrix) -> Arc<Realization> {
    Arc::new(Realization::ao(f, &tol()).unwrap())
}

#[test]
fn trivial_cocycle_is_identity() {
    let r = ao(&suq2(0.2));
    let (c, norm) = build_cocycle(&r, &r, 3, &BTreeMap::new()).unwrap();
    assert!(norm < 1e-12);
    for ((y, z), b) in &c.blocks {
        let d = b.nrows();
        assert!(frob(&(b - CMat::identity(d, d))) < 1e-10, "{y} {z}");
    }
    assert!(c.check_identity().unwrap() < 1e-12);
    assert!(c.normalized);
}

#[test]
fn coboundary_family_satisfies_identity() {
    let r = ao(&FMatrix::identity(2));
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let u = BTreeMap::from([(Word::level(1), random_unitary(2, &mut rng))]);
    let (c, _) = build_cocycle(&r, &r, 3, &u).unwrap();
    let rep = c.report(0.0).unwrap();
    assert!(rep.unitarity <= 1e-9 && rep.identity <= 1e-9, "{rep:?}");
    let b = c.block(&Word::level(1), &Word::level(1)).unwrap();
    assert!(frob(&(b - CMat::identity(4, 4))) > 1e-3);
}

#[test]
fn missing_block_and_bad_input() {
    let r = ao(&FMatrix::identity(2));
    let (c, _) = build_cocycle(&r, &r, 2, &BTreeMap::new()).unwrap();
    assert!(matches!(c.block(&Word::level(2), &Word::level(1)), Err(Error::MissingBlock(..))));
    let bad = BTreeMap::from([(Word::level(1), CMat::identity(2, 2) * real(2.0))]);
    assert!(build_cocycle(&r, &r, 2, &bad).is_err());
    let wrong = BTreeMap::from([(Word::level(1), CMat::identity(3, 3))]);
    assert!(matches!(build_cocycle(&r, &r, 2, &wrong), Err(Error::DimensionMismatch(_))));
    let other = ao(&construct4());
    assert!(matches!(build_cocycle(&ao(&suq2(0.2)), &other, 2, &BTreeMap::new()), Err(Error::DimensionMismatch(_))));
    assert!(matches!(build_cocycle(&r, &other, 2, &BTreeMap::new()), Err(Error::NotMonoidallyEquivalent(_))));
}

fn construct4() -> FMatrix {
    qmonoidal::fmatrix::construct_ao_companion(Sign::Minus, 5.2, 4, &tol()).unwrap()
}

#[test]
fn perturbed_block_breaks_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let f = random_ao(2, &mut rng).unwrap().matrix;
    let g = f.congruence(&random_unitary(2, &mut rng));
    let (mut c, _) = build_cocycle(&ao(&f), &ao(&g), 3, &BTreeMap::new()).unwrap();
    let key = (Word::level(1), Word::level(1));
    c.blocks.get_mut(&key).unwrap()[(0, 0)] += real(1e-2);
    assert!(c.check_identity().unwrap() > 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn congruent_pairs_give_cocycles(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_ao(2, &mut rng).unwrap().matrix;
        let g = f.congruence(&random_unitary(2, &mut rng));
        let (c, _) = build_cocycle(&ao(&f), &ao(&g), 3, &BTreeMap::new()).unwrap();
        let rep = c.report(0.0).unwrap();
        prop_assert!(rep.unitarity <= 1e-9, "{:?}", rep);
        prop_assert!(rep.identity <= 1e-9, "{:?}", rep);
        prop_assert!(coboundary_equivalent(&f, &g, &tol()).unwrap());
    }

    #[test]
    fn coboundary_criterion_agrees_with_equivalence(seed in any::<u64>(), n in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (random_ao(n, &mut rng).unwrap(), random_ao(n, &mut rng).unwrap());
        let (fa, fb) = (qmonoidal::fmatrix::normalize_ao(&a.matrix, &tol()).unwrap(), qmonoidal::fmatrix::normalize_ao(&b.matrix, &tol()).unwrap());
        match coboundary_equivalent(&fa, &fb, &tol()) {
            Ok(v) => prop_assert_eq!(v, equivalent_ao(&fa, &fb, &tol()).unwrap().equivalent),
            Err(e) => prop_assert!(matches!(e, Error::InvalidInput(_))),
        }
        prop_assert!(coboundary_equivalent(&fa, &fa.congruence(&random_unitary(n, &mut rng)), &tol()).unwrap());
    }
}

#[test]
fn sign_mismatch_is_not_a_coboundary() {
    let plus = FMatrix::identity(2);
    let minus = FMatrix::from_real_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
    assert!(!coboundary_equivalent(&plus, &minus, &tol()).unwrap());
}

#[test]
fn unequal_traces_are_rejected() {
    let a = FMatrix::identity(4);
    let b = FMatrix::new(canonical_matrix_ao(Sign::Plus, &[0.3437], 2)).unwrap();
    assert!(matches!(coboundary_equivalent(&a, &b, &tol()), Err(Error::InvalidInput(_))));
    let c = FMatrix::identity(2).scaled(real(2.0));
    assert!(matches!(coboundary_equivalent(&c, &c, &tol()), Err(Error::NotNormalized(_))));
    assert!(matches!(
        coboundary_equivalent(&FMatrix::identity(2), &FMatrix::identity(3), &tol()),
        Err(Error::DimensionMismatch(_)) | Err(Error::InvalidInput(_))
    ));
}
