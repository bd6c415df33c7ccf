use qmonoidal::category::{chebyshev_dims, quantum_integers};
use qmonoidal::diagram::catalan;
use qmonoidal::fmatrix::{construct_ao_companion, suq2};
use qmonoidal::linalg::{frob, real, unitarity_residual, CMat};
use qmonoidal::{Diagram, Error, FMatrix, Morphism, Realization, Sign, Tolerances, Variant, Word};

fn tol() -> Tolerances {
    Tolerances::default()
}

fn su02() -> Realization {
    Realization::ao(&suq2(0.2), &tol()).unwrap()
}

fn companion4() -> Realization {
    Realization::ao(&construct_ao_companion(Sign::Minus, 5.2, 4, &tol()).unwrap(), &tol()).unwrap()
}

#[test]
fn jw_ranks_follow_chebyshev() {
    for (n, max) in [(2usize, 5usize), (3, 4), (4, 4)] {
        let r = Realization::ao(&FMatrix::identity(n), &tol()).unwrap();
        let ranks: Vec<i64> = r.level_ranks(max).unwrap().into_iter().map(|x| x as i64).collect();
        assert_eq!(ranks, chebyshev_dims(n, max), "n = {n}");
    }
    let ranks = companion4().level_ranks(3).unwrap();
    assert_eq!(ranks, vec![1, 4, 15, 56]);
}

#[test]
fn jw_projection_invariants() {
    let r = su02();
    for l in 0..=5usize {
        let p = r.jw(&Word::level(l)).unwrap();
        assert!(frob(&(&p.matrix * &p.matrix - &p.matrix)) < 1e-8);
        assert!(frob(&(&p.matrix - p.matrix.adjoint())) < 1e-8);
        // kills every cup insertion
        for i in 0..l.saturating_sub(1) {
            let ins = Diagram::identity(&Word::level(i))
                .tensor(&Diagram::enumerate(&Word::empty(), &Word::level(2), Variant::Ao)[0])
                .tensor(&Diagram::identity(&Word::level(l - 2 - i)));
            assert!(frob(&(&p.matrix * ins.matrix(&r))) < 1e-8);
        }
    }
}

#[test]
fn invariant_morphism_spaces_have_catalan_dimension() {
    for n in [2usize, 3, 4] {
        let r = Realization::ao(&FMatrix::identity(n), &tol()).unwrap();
        for k in 0..=3 {
            let sp = r.mor_basis(&Word::empty(), &Word::level(2 * k)).unwrap();
            assert_eq!(sp.dim(), catalan(k), "n = {n}, k = {k}");
        }
    }
    let r = su02();
    assert_eq!(r.mor_basis(&Word::empty(), &Word::level(4)).unwrap().dim(), 2);
    assert_eq!(r.mor_basis(&Word::empty(), &Word::level(3)).unwrap().dim(), 0);
    let triv = r.mor_basis(&Word::empty(), &Word::empty()).unwrap();
    assert_eq!(triv.dim(), 1);
    assert!((triv.basis[0][(0, 0)].norm() - 1.0).abs() < 1e-15);
}

#[test]
fn morphism_basis_is_orthonormal_and_adjoint_closed() {
    let r = su02();
    let sp = r.mor_basis(&Word::level(2), &Word::level(2)).unwrap();
    assert_eq!(sp.dim(), 2);
    for (i, a) in sp.basis.iter().enumerate() {
        for (j, b) in sp.basis.iter().enumerate() {
            let ip = qmonoidal::linalg::hs(a, b);
            let expect = if i == j { 1.0 } else { 0.0 };
            assert!((ip - real(expect)).norm() < 1e-10);
        }
        // adjoint stays in the span
        let adj = a.adjoint();
        let mut res = adj.clone();
        for b in &sp.basis {
            res -= b * qmonoidal::linalg::hs(b, &adj);
        }
        assert!(frob(&res) < 1e-10);
    }
    // coefficients reproduce the basis matrices
    for k in 0..sp.dim() {
        assert!(frob(&(r.matrix(&sp.basis_morphism(k)) - &sp.basis[k])) < 1e-10);
    }
}

#[test]
fn saturation_agrees_with_diagrams() {
    let r = su02();
    for (s, t) in [(0usize, 2usize), (0, 4), (1, 3), (2, 2), (1, 1)] {
        let a = r.mor_basis(&Word::level(s), &Word::level(t)).unwrap().dim();
        let b = r.saturated_mor_basis(&Word::level(s), &Word::level(t)).unwrap().len();
        assert_eq!(a, b, "{s} -> {t}");
    }
}

#[test]
fn quantum_dimensions_match_recursion() {
    let r = su02();
    let q = quantum_integers(5.2, 5);
    for x in 0..=5 {
        let d = r.irrep_qdim(&Word::level(x)).unwrap();
        assert!((d - q[x]).abs() < 1e-6 * q[x], "x = {x}: {d} vs {}", q[x]);
    }
}

#[test]
fn fusion_follows_su2_rules() {
    let r = Realization::ao(&FMatrix::identity(2), &tol()).unwrap();
    for a in 0..=3usize {
        for b in 0..=3 {
            let f = r.fusion(&Word::level(a), &Word::level(b)).unwrap();
            let levels: Vec<usize> = f.channels.iter().map(|c| c.label.len()).collect();
            let expect: Vec<usize> = (a.abs_diff(b)..=a + b).step_by(2).collect();
            assert_eq!(levels, expect);
            assert!(f.completeness_residual < 1e-8);
            assert!(f.orthogonality_residual < 1e-8);
        }
    }
    let f = r.fusion(&Word::empty(), &Word::level(2)).unwrap();
    let s = &f.channels[0].maps[0].coords;
    assert!(frob(&(s - CMat::identity(3, 3))) < 1e-12);
}

#[test]
fn sixj_unitary_and_realization_independent() {
    let (r2, r4) = (su02(), companion4());
    let one = Word::level(1);
    let cases = [
        (Word::level(1), one.clone(), one.clone(), one.clone()),
        (Word::level(3), one.clone(), one.clone(), one.clone()),
        (Word::level(2), one.clone(), Word::level(2), one.clone()),
        (Word::level(1), Word::level(1), Word::empty(), Word::empty()),
        (Word::level(0), one.clone(), Word::level(2), one.clone()),
    ];
    for (a, x, y, z) in cases {
        let m2 = r2.sixj(&a, &x, &y, &z).unwrap();
        let m4 = r4.sixj(&a, &x, &y, &z).unwrap();
        assert!(unitarity_residual(&m2) < 1e-8);
        assert!(frob(&(&m2 - &m4)) < 1e-8, "{a} {x} {y} {z}: {m2} vs {m4}");
    }
    let m = r2.sixj(&Word::level(1), &Word::level(1), &Word::level(1), &Word::level(1)).unwrap();
    assert_eq!(m.shape(), (2, 2));
    let top = r2.sixj(&Word::level(3), &Word::level(1), &Word::level(1), &Word::level(1)).unwrap();
    assert!((top[(0, 0)].norm() - 1.0).abs() < 1e-10);
    let triv = r2.sixj(&Word::level(1), &Word::level(1), &Word::empty(), &Word::empty()).unwrap();
    assert!((triv[(0, 0)] - real(1.0)).norm() < 1e-12);
}

#[test]
fn transport_preserves_structure() {
    let (r2, r4) = (su02(), companion4());
    let cup = Morphism::from_diagram(r2.cup_diagram(qmonoidal::Letter::A, qmonoidal::Letter::A).unwrap());
    let t4 = r2.transport(&cup, &r4).unwrap();
    assert_eq!(t4, r4.cup_vector(qmonoidal::Letter::A, qmonoidal::Letter::A).unwrap());
    let id = Morphism::identity(&Word::level(2));
    assert_eq!(r2.transport(&id, &r4).unwrap(), CMat::identity(16, 16));
    // scalar products of invariant vectors agree
    let sp = r2.mor_basis(&Word::empty(), &Word::level(4)).unwrap();
    for i in 0..sp.dim() {
        for j in 0..sp.dim() {
            let (a, b) = (sp.basis_morphism(i), sp.basis_morphism(j));
            let in2 = (r2.matrix(&a).adjoint() * r2.matrix(&b))[(0, 0)];
            let in4 = (r2.transport(&a, &r4).unwrap().adjoint() * r2.transport(&b, &r4).unwrap())[(0, 0)];
            let formal = a.adjoint().compose(&b, r2.beta()).unwrap().scalar().unwrap();
            assert!((in2 - in4).norm() < 1e-8);
            assert!((in2 - formal).norm() < 1e-8);
        }
    }
}

#[test]
fn transport_rejects_different_beta() {
    let r = su02();
    let other = Realization::ao(&FMatrix::identity(2), &tol()).unwrap();
    let id = Morphism::identity(&Word::level(1));
    assert!(matches!(r.transport(&id, &other), Err(Error::BetaMismatch(..))));
}
