use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qmonoidal::fmatrix::{construct_ao_companion, suq2};
use qmonoidal::linalg::{frob, real, CMat, ONE, ZERO};
use qmonoidal::random::random_unitary;
use qmonoidal::{BasisIndex, Element, Error, FMatrix, LinkingAlgebra, Realization, Side, Sign, Tolerances, Word};

fn tol() -> Tolerances {
    Tolerances::default()
}

fn ao(f: &FMatrix) -> Arc<Realization> {
    Arc::new(Realization::ao(f, &tol()).unwrap())
}

fn su02() -> Arc<Realization> {
    ao(&suq2(0.2))
}

fn companion4() -> Arc<Realization> {
    ao(&construct_ao_companion(Sign::Minus, 5.2, 4, &tol()).unwrap())
}

fn su_companion() -> LinkingAlgebra {
    LinkingAlgebra::build(su02(), companion4(), 2).unwrap()
}

fn kac() -> LinkingAlgebra {
    let r = ao(&FMatrix::identity(2));
    LinkingAlgebra::build(r.clone(), r, 2).unwrap()
}

fn idx(label: &str, row: usize, col: usize) -> BasisIndex {
    BasisIndex { label: Word::parse(label).unwrap(), row, col }
}

#[test]
fn basis_sizes_follow_carrier_ranks() {
    let l = su_companion();
    let sizes: Vec<usize> = l.basis_sizes().into_iter().map(|(_, s)| s).collect();
    assert_eq!(sizes, vec![1, 8, 45]);
    assert_eq!(l.dim(), 54);
    assert_eq!(l.dims(&Word::level(2)).unwrap(), (15, 3));
}

#[test]
fn relations_hold_for_su_companion_pair() {
    let rep = su_companion().check_relations().unwrap();
    assert!(rep.max() <= 1e-8, "{rep:?}");
}

#[test]
fn corrupted_structure_constants_are_detected() {
    let mut l = su_companion();
    l.corrupt_channel(&Word::level(1), &Word::level(1), 1e-2).unwrap();
    let rep = l.check_relations().unwrap();
    assert!(rep.unitarity > 1e-3, "{rep:?}");
}

#[test]
fn unit_and_state() {
    let l = su_companion();
    assert_eq!(l.omega(&l.unit()), ONE);
    for i in l.basis().into_iter().filter(|i| !i.label.is_empty()) {
        assert_eq!(l.omega(&l.basis_element(&i)), ZERO);
    }
    for i in l.basis_up_to(1) {
        let e = l.basis_element(&i);
        assert!(l.product(&l.unit(), &e).unwrap().sub(&e).norm() < 1e-12);
        assert!(l.product(&e, &l.unit()).unwrap().sub(&e).norm() < 1e-12);
    }
}

#[test]
fn products_beyond_the_level_are_rejected() {
    let l = su_companion();
    let a = l.basis_element(&idx("aa", 0, 0));
    let b = l.basis_element(&idx("a", 0, 0));
    assert!(matches!(l.product(&a, &b), Err(Error::LevelCapExceeded { .. })));
    assert!(matches!(
        LinkingAlgebra::build(su02(), companion4(), 9),
        Err(Error::LevelCapExceeded { .. })
    ));
}

#[test]
fn mismatched_beta_is_rejected() {
    let r = LinkingAlgebra::build(su02(), ao(&FMatrix::identity(2)), 2);
    assert!(matches!(r, Err(Error::NotMonoidallyEquivalent(_))));
    let au = Arc::new(Realization::au(&FMatrix::identity(2), &tol()).unwrap());
    let r = LinkingAlgebra::build(ao(&FMatrix::identity(2)), au, 2);
    assert!(matches!(r, Err(Error::NotMonoidallyEquivalent(_))));
}

#[test]
fn gram_matrix_two_ways() {
    let l = su_companion();
    let g = l.gram_report().unwrap();
    assert_eq!(g.size, 54);
    assert!(g.agreement <= 1e-8, "{g:?}");
    assert!(g.hermitian_residual <= 1e-8);
    assert!(g.min_eigenvalue > 0.0);
    // F*F = diag(5, 0.2) for the unrotated SU_0.2(2) matrix
    let closed = l.gram_closed().unwrap();
    let i = l.flat_index(&idx("a", 0, 0));
    assert!((closed[(i, i)] - real(5.0 / 5.2)).norm() < 1e-10);
    let j = l.flat_index(&idx("a", 0, 1));
    assert!((closed[(j, j)] - real(0.2 / 5.2)).norm() < 1e-10);
}

#[test]
fn fundamental_q_matches_categorical() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = suq2(0.2).congruence(&random_unitary(2, &mut rng));
    let r = ao(&f);
    let l = LinkingAlgebra::build(r.clone(), r, 2).unwrap();
    let a = Word::level(1);
    let q = l.fundamental_q(&a).unwrap();
    assert!(frob(&(&q - l.q_matrix(&a).unwrap())) < 1e-8);
    assert!((q.trace().re - 5.2).abs() < 1e-8);
}

#[test]
fn multiplicities() {
    let l = su_companion();
    let triv = l.spectral_quantities(&Word::empty()).unwrap();
    assert_eq!(triv.mult, 1);
    assert!((triv.mult_q - 1.0).abs() < 1e-10 && (triv.dim_q - 1.0).abs() < 1e-10);
    let s = l.spectral_quantities(&Word::level(1)).unwrap();
    assert_eq!(s.mult, 4);
    assert!((s.mult_q - 5.2).abs() < 1e-6, "{}", s.mult_q);
    assert!((s.dim_q - 5.2).abs() < 1e-6);
    assert!(frob(&(&s.l - s.l.adjoint())) < 1e-8);
}

#[test]
fn multiplicities_of_haar_coaction() {
    let r = su02();
    let l = LinkingAlgebra::build(r.clone(), r.clone(), 3).unwrap();
    for x in [Word::empty(), Word::level(1)] {
        let s = l.spectral_quantities(&x).unwrap();
        assert_eq!(s.mult, r.carrier_dim(&x).unwrap());
        assert!((s.mult_q - s.dim_q).abs() < 1e-8);
        assert!(s.mult as f64 <= s.mult_q + 1e-8);
    }
}

#[test]
fn kms_condition() {
    let l = su_companion();
    assert!(l.kms_check().unwrap() <= 1e-7);
    let id = l.modular_map(0.0).unwrap();
    assert!(frob(&(id - CMat::identity(l.dim(), l.dim()))) < 1e-12);
    // σ_s σ_t = σ_{s+t}
    let (a, b) = (l.modular_map(0.3).unwrap(), l.modular_map(-0.7).unwrap());
    assert!(frob(&(&a * &b - l.modular_map(-0.4).unwrap())) < 1e-8);
}

#[test]
fn kac_case_is_tracial() {
    let l = kac();
    let m = l.modular_map(1.3).unwrap();
    assert!(frob(&(m - CMat::identity(l.dim(), l.dim()))) < 1e-10);
    assert!(l.trace_residual(1) <= 1e-10);
    assert!(l.kms_check().unwrap() <= 1e-10);
    for x in [Word::empty(), Word::level(1)] {
        let s = l.spectral_quantities(&x).unwrap();
        assert!(frob(&(&s.l - CMat::identity(s.mult, s.mult))) < 1e-10);
    }
}

#[test]
fn kac_fundamental_block_is_self_adjoint_entrywise() {
    // A_o(I_2) is generated by an orthogonal matrix: u_ij* = u_ij
    let l = kac();
    assert!(l.check_relations().unwrap().max() <= 1e-9);
    for i in 0..2 {
        for j in 0..2 {
            let e = l.basis_element(&idx("a", i, j));
            assert!(l.star(&e).unwrap().sub(&e).norm() < 1e-10);
        }
    }
}

#[test]
fn involution_is_an_involution() {
    let l = su_companion();
    for i in l.basis() {
        let e = l.basis_element(&i);
        let ss = l.star(&l.star(&e).unwrap()).unwrap();
        assert!(ss.sub(&e).norm() <= 1e-8, "{i:?}");
    }
}

#[test]
fn coactions() {
    let mut l = su_companion();
    let unit = l.unit();
    assert!(matches!(l.coaction(Side::Source, &unit), Err(Error::SideNotBuilt(_))));
    l.attach_coefficients(Side::Source).unwrap();
    l.attach_coefficients(Side::Target).unwrap();
    let d = l.coaction(Side::Source, &unit).unwrap();
    assert_eq!(d.terms.len(), 1);
    assert_eq!(d.terms.get(&vec![0, 0]), Some(&ONE));
    // δ(e_ab) = Σ_k e_ak ⊗ u_kb has one term per source carrier index
    let d = l.coaction(Side::Source, &l.basis_element(&idx("a", 1, 0))).unwrap();
    assert_eq!(d.terms.len(), 2);
    let d = l.coaction(Side::Target, &l.basis_element(&idx("a", 1, 0))).unwrap();
    assert_eq!(d.terms.len(), 4);
    for side in [Side::Source, Side::Target] {
        let rep = l.check_coaction(side).unwrap();
        assert!(rep.coassociativity <= 1e-8, "{rep:?}");
        assert!(rep.invariance <= 1e-8, "{rep:?}");
        assert!(rep.multiplicativity <= 1e-8, "{rep:?}");
    }
    assert!(l.commutation_residual(1).unwrap() <= 1e-8);
}

#[test]
fn rotated_pairs_satisfy_all_relations() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..2 {
        let src = ao(&suq2(0.2).congruence(&random_unitary(2, &mut rng)));
        let f4 = construct_ao_companion(Sign::Minus, 5.2, 4, &tol()).unwrap();
        let tgt = ao(&f4.congruence(&random_unitary(4, &mut rng)));
        let l = LinkingAlgebra::build(src, tgt, 2).unwrap();
        assert!(l.check_relations().unwrap().max() <= 1e-8);
        assert!(l.gram_report().unwrap().agreement <= 1e-8);
        assert!(l.kms_check().unwrap() <= 1e-7);
    }
}

#[test]
fn au_pair_of_different_sizes() {
    let t = ((3.25 - 6.5625f64.sqrt()) / 2.0).sqrt();
    let r2 = Arc::new(Realization::au(&FMatrix::diagonal(&[2.0, 0.5]).unwrap(), &tol()).unwrap());
    let r3 = Arc::new(Realization::au(&FMatrix::diagonal(&[t, 1.0, 1.0 / t]).unwrap(), &tol()).unwrap());
    let l = LinkingAlgebra::build(r2, r3, 2).unwrap();
    assert!(l.check_relations().unwrap().max() <= 1e-8);
    let g = l.gram_report().unwrap();
    assert!(g.agreement <= 1e-8 && g.min_eigenvalue > 0.0);
    for (w, mult) in [("a", 3), ("b", 3)] {
        let s = l.spectral_quantities(&Word::parse(w).unwrap()).unwrap();
        assert_eq!(s.mult, mult);
        assert!((s.mult_q - 4.25).abs() < 1e-6, "{w}: {}", s.mult_q);
        assert!((s.dim_q - 4.25).abs() < 1e-8);
    }
    assert!(l.kms_check().unwrap() <= 1e-7);
}

#[test]
fn elements_are_linear() {
    let l = su_companion();
    let a = l.element(&Word::level(1), CMat::from_fn(4, 2, |i, j| real((i + 2 * j) as f64))).unwrap();
    let b = l.basis_element(&idx("a", 2, 1));
    let sum = a.add(&b);
    assert_eq!(sum.coefficient(&idx("a", 2, 1)), real(5.0));
    assert!(sum.sub(&a).sub(&b).norm() < 1e-15);
    assert_eq!(Element::zero().norm(), 0.0);
    assert!(l.element(&Word::level(1), CMat::zeros(2, 2)).is_err());
}
