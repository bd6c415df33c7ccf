//! Dense complex linear algebra helpers. Matrices are `nalgebra` containers;
//! decompositions go through `faer`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn frob(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Residual normalized by the size of the operands; quantities of norm below
/// one are compared in absolute terms.
pub fn relative(diff: f64, scale: f64) -> f64 {
    diff / scale.max(1.0)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn conj(m: &CMat) -> CMat {
    m.map(|z| z.conj())
}

fn to_faer(m: &CMat) -> faer::Mat<C64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, C64>) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

// The divide-and-conquer paths of the faer solvers lose accuracy on the
// highly degenerate spectra of projections, so recursion is switched off.
fn svd_params() -> faer::Spec<faer::linalg::svd::SvdParams, C64> {
    let mut p: faer::Spec<faer::linalg::svd::SvdParams, C64> = Default::default();
    p.recursion_threshold = usize::MAX;
    p
}

fn evd_params() -> faer::Spec<faer::linalg::evd::SelfAdjointEvdParams, C64> {
    let mut p: faer::Spec<faer::linalg::evd::SelfAdjointEvdParams, C64> = Default::default();
    p.recursion_threshold = usize::MAX;
    p
}

fn faer_svd(m: &CMat, vectors: bool) -> (Vec<f64>, Option<(CMat, CMat)>) {
    use faer::dyn_stack::{MemBuffer, MemStack};
    use faer::linalg::svd::{svd, svd_scratch, ComputeSvdVectors};
    let (r, c) = m.shape();
    let k = r.min(c);
    let a = to_faer(m);
    let mut s = faer::diag::Diag::<C64>::zeros(k);
    let mut u = faer::Mat::<C64>::zeros(r, k);
    let mut v = faer::Mat::<C64>::zeros(c, k);
    let compute = if vectors { ComputeSvdVectors::Thin } else { ComputeSvdVectors::No };
    let par = faer::Par::Seq;
    let mut buf = MemBuffer::new(svd_scratch::<C64>(r, c, compute, compute, par, svd_params()));
    let (uo, vo) = if vectors { (Some(u.as_mut()), Some(v.as_mut())) } else { (None, None) };
    svd(a.as_ref(), s.as_mut(), uo, vo, par, MemStack::new(&mut buf), svd_params())
        .expect("svd converges");
    let sv = s.column_vector();
    let vals = (0..k).map(|i| sv[i].re).collect();
    let vecs = vectors.then(|| (from_faer(u.as_ref()), from_faer(v.as_ref()).adjoint()));
    (vals, vecs)
}

/// Thin singular value decomposition `m = U diag(s) Vt`, singular values in
/// decreasing order.
pub fn svd_sorted(m: &CMat) -> (CMat, Vec<f64>, CMat) {
    let (r, c) = m.shape();
    if r.min(c) == 0 {
        return (CMat::zeros(r, 0), Vec::new(), CMat::zeros(0, c));
    }
    let (s, vecs) = faer_svd(m, true);
    let (u, vt) = vecs.expect("vectors requested");
    (u, s, vt)
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s = faer_svd(m, false).0;
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of singular values above `tol` relative to `max(1, largest)`.
pub fn rank(m: &CMat, tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let s = singular_values(m);
    let cutoff = tol * s[0].max(1.0);
    s.iter().filter(|&&x| x > cutoff).count()
}

/// Orthonormal basis (as columns) of the column space of `m`.
pub fn orthonormal_range(m: &CMat, tol: f64) -> CMat {
    if m.ncols() == 0 || m.nrows() == 0 {
        return CMat::zeros(m.nrows(), 0);
    }
    let (u, s, _) = svd_sorted(m);
    let cutoff = tol * s[0].max(1.0);
    let r = s.iter().filter(|&&x| x > cutoff).count();
    u.columns(0, r).into_owned()
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    use faer::dyn_stack::{MemBuffer, MemStack};
    use faer::linalg::evd::{self_adjoint_evd, self_adjoint_evd_scratch, ComputeEigenvectors};
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let h = to_faer(&((m + m.adjoint()) * real(0.5)));
    let mut s = faer::diag::Diag::<C64>::zeros(n);
    let mut u = faer::Mat::<C64>::zeros(n, n);
    let par = faer::Par::Seq;
    let scratch = self_adjoint_evd_scratch::<C64>(n, ComputeEigenvectors::Yes, par, evd_params());
    let mut buf = MemBuffer::new(scratch);
    self_adjoint_evd(h.as_ref(), s.as_mut(), Some(u.as_mut()), par, MemStack::new(&mut buf), evd_params())
        .expect("eigensolver converges");
    let sv = s.column_vector();
    ((0..n).map(|i| sv[i].re).collect(), from_faer(u.as_ref()))
}

/// `m^p` for a positive definite Hermitian `m` and complex exponent `p`.
pub fn positive_power(m: &CMat, p: C64, tol: f64) -> Result<CMat> {
    let (vals, vecs) = hermitian_eigen(m);
    let scale = vals.iter().fold(1.0f64, |a, &b| a.max(b.abs()));
    if let Some(&min) = vals.first() {
        if min <= tol * scale {
            return Err(Error::NotPositive(min));
        }
    }
    let d = CMat::from_diagonal(&CVec::from_iterator(
        vals.len(),
        vals.iter().map(|&l| (real(l.ln()) * p).exp()),
    ));
    Ok(&vecs * d * vecs.adjoint())
}

pub fn inverse(m: &CMat, tol: f64) -> Result<CMat> {
    let smin = singular_values(m).last().copied().unwrap_or(0.0);
    if smin < tol {
        return Err(Error::SingularMatrix(smin));
    }
    m.clone().try_inverse().ok_or(Error::SingularMatrix(smin))
}

/// Deterministic orthonormal basis of the span of the columns of `m`.
///
/// Columns are picked greedily by largest remaining norm, ties resolved
/// towards the lower index, so that the columns of an identity matrix come
/// back unchanged. Stops after `max` vectors or when no column keeps a norm
/// above `tol`.
pub fn pivoted_gram_schmidt(m: &CMat, max: usize, tol: f64) -> CMat {
    let mut work = m.clone();
    let mut basis: Vec<CVec> = Vec::new();
    while basis.len() < max {
        let norms: Vec<f64> = work.column_iter().map(|col| col.norm()).collect();
        let mut best = None;
        for (j, &nrm) in norms.iter().enumerate() {
            match best {
                None => best = Some(j),
                Some(b) if nrm > norms[b] * (1.0 + 1e-9) => best = Some(j),
                _ => {}
            }
        }
        let Some(b) = best else { break };
        if norms[b] <= tol {
            break;
        }
        let mut v: CVec = work.column(b).into_owned();
        // second pass keeps the basis orthonormal to working precision
        for q in &basis {
            let proj = q.dotc(&v);
            v -= q * proj;
        }
        let nrm = v.norm();
        if nrm <= tol {
            work.column_mut(b).fill(ZERO);
            continue;
        }
        v /= real(nrm);
        for mut col in work.column_iter_mut() {
            let proj = v.dotc(&col);
            col -= &v * proj;
        }
        basis.push(v);
    }
    let mut out = CMat::zeros(m.nrows(), basis.len());
    for (k, v) in basis.iter().enumerate() {
        out.set_column(k, v);
    }
    out
}

/// `‖UᴴU − 1‖` normalized by the dimension scale.
pub fn isometry_residual(u: &CMat) -> f64 {
    let g = u.adjoint() * u;
    let id = CMat::identity(g.nrows(), g.ncols());
    frob(&(g - id))
}

pub fn unitarity_residual(u: &CMat) -> f64 {
    isometry_residual(u).max(isometry_residual(&u.adjoint()))
}

/// Reshape a vector in `ℂ^a ⊗ ℂ^b` (first factor most significant) into an
/// `a × b` matrix.
pub fn unvec(v: &CMat, a: usize, b: usize) -> CMat {
    assert_eq!(v.len(), a * b);
    CMat::from_fn(a, b, |i, j| v[(i * b + j, 0)])
}

/// Inverse of [`unvec`].
pub fn vec_of(m: &CMat) -> CMat {
    let (a, b) = m.shape();
    CMat::from_fn(a * b, 1, |k, _| m[(k / b, k % b)])
}

/// Hilbert-Schmidt inner product `Tr(AᴴB)`.
pub fn hs(a: &CMat, b: &CMat) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}
