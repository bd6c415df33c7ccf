//! Defining matrices of `A_o(F)` and `A_u(F)`: admissibility, normalization,
//! canonical forms, equivalence and monoidal equivalence.

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{self, c, frob, real, relative, CMat, CVec, C64, ZERO};

/// Relative gap below which two eigenvalues of `F*F` are treated as one cluster.
const CLUSTER_GAP: f64 = 1e-7;
/// Allowed deviation of `λ · (1/λ)` from one when pairing eigenvalues of `|F|`.
const PAIRING_SLACK: f64 = 1e-6;

/// An invertible square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FMatrix {
    m: CMat,
}

impl FMatrix {
    pub fn new(m: CMat) -> Result<Self> {
        Self::with_tolerance(m, Tolerances::default().rank)
    }

    pub fn with_tolerance(m: CMat, tol_rank: f64) -> Result<Self> {
        if m.nrows() == 0 || m.nrows() != m.ncols() {
            return Err(Error::InvalidInput(format!(
                "F must be a nonempty square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("F has non-finite entries".into()));
        }
        let smin = linalg::singular_values(&m).last().copied().unwrap_or(0.0);
        if smin <= tol_rank {
            return Err(Error::SingularMatrix(smin));
        }
        Ok(FMatrix { m })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let m = CMat::from_fn(n, n, |i, j| real(rows[i][j]));
        Self::new(m)
    }

    pub fn identity(n: usize) -> Self {
        FMatrix { m: CMat::identity(n, n) }
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        Self::new(CMat::from_diagonal(&CVec::from_iterator(d.len(), d.iter().map(|&x| real(x)))))
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    pub fn into_matrix(self) -> CMat {
        self.m
    }

    pub fn scaled(&self, lambda: C64) -> FMatrix {
        FMatrix { m: &self.m * lambda }
    }

    /// `v F vᵗ`, the action of the unitary group relevant to `A_o`.
    pub fn congruence(&self, v: &CMat) -> FMatrix {
        FMatrix { m: v * &self.m * v.transpose() }
    }

    /// `F̄`, entrywise conjugate.
    pub fn conj(&self) -> CMat {
        linalg::conj(&self.m)
    }

    /// `Tr(F*F)`.
    pub fn trace(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `Tr((F*F)^{-1})`.
    pub fn inv_trace(&self) -> f64 {
        linalg::singular_values(&self.m).iter().map(|s| 1.0 / (s * s)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_value(v: f64) -> Result<Self> {
        if v == 1.0 {
            Ok(Sign::Plus)
        } else if v == -1.0 {
            Ok(Sign::Minus)
        } else {
            Err(Error::InvalidInput(format!("sign must be +1 or -1, got {v}")))
        }
    }
}

/// Admissibility data of an `A_o` matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AoParams {
    pub c: f64,
    pub sign: Sign,
    pub trace: f64,
    pub beta: f64,
    pub qdim: f64,
    /// relative residual of `F F̄ = c·1`
    pub residual: f64,
    /// relative residual of `Tr(F*F) = Tr((F*F)^{-1})` after normalization
    pub balance_residual: f64,
}

pub fn validate_ao(f: &FMatrix, tol: &Tolerances) -> Result<AoParams> {
    let n = f.n();
    let ff = f.matrix() * f.conj();
    let cz: C64 = ff.trace() / real(n as f64);
    let scale = frob(&ff);
    let residual = relative(frob(&(&ff - CMat::identity(n, n) * cz)), scale);
    if residual > tol.check || cz.im.abs() > tol.check * cz.norm().max(1.0) {
        return Err(Error::NotAoAdmissible { residual: residual.max(cz.im.abs()) });
    }
    let cval = cz.re;
    let sign = if cval > 0.0 { Sign::Plus } else { Sign::Minus };
    let trace = f.trace();
    let qdim = trace / cval.abs();
    let inv_qdim = f.inv_trace() * cval.abs();
    let balance_residual = (qdim - inv_qdim).abs() / qdim.max(1.0);
    if balance_residual > tol.check {
        return Err(Error::NotAoAdmissible { residual: balance_residual });
    }
    Ok(AoParams { c: cval, sign, trace, beta: cval / trace, qdim, residual, balance_residual })
}

/// `|c|^{-1/2} F`, so that `F F̄ = ±1`.
pub fn normalize_ao(f: &FMatrix, tol: &Tolerances) -> Result<FMatrix> {
    let p = validate_ao(f, tol)?;
    let s = p.c.abs();
    if (s - 1.0).abs() <= f64::EPSILON * 4.0 {
        return Ok(f.clone());
    }
    Ok(f.scaled(real(1.0 / s.sqrt())))
}

fn require_normalized_ao(f: &FMatrix, tol: &Tolerances) -> Result<AoParams> {
    let p = validate_ao(f, tol)?;
    if (p.c.abs() - 1.0).abs() > tol.check {
        return Err(Error::NotNormalized(p.c.abs()));
    }
    Ok(p)
}

/// Representative of the unitary congruence class of a normalized `A_o` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalFormAo {
    pub sign: Sign,
    pub lambdas: Vec<f64>,
    pub fixed_block: usize,
    /// unitary `w` with `wᵗ F w` equal to the canonical matrix
    pub transition: CMat,
    pub residual: f64,
}

impl CanonicalFormAo {
    pub fn matrix(&self) -> CMat {
        canonical_matrix_ao(self.sign, &self.lambdas, self.fixed_block)
    }
}

/// Block matrix `[[0, D], [±D^{-1}, 0]]` (plus an identity block of size
/// `fixed_block` for sign +1) with `D = diag(lambdas)`.
pub fn canonical_matrix_ao(sign: Sign, lambdas: &[f64], fixed_block: usize) -> CMat {
    let k = lambdas.len();
    let n = 2 * k + fixed_block;
    let mut m = CMat::zeros(n, n);
    for (i, &l) in lambdas.iter().enumerate() {
        m[(i, k + i)] = real(l);
        m[(k + i, i)] = real(sign.value() / l);
    }
    for j in 2 * k..n {
        m[(j, j)] = real(1.0);
    }
    m
}

/// Orthonormal eigenbasis of `F*F` grouped into clusters of (numerically)
/// equal eigenvalues; each cluster basis is extracted deterministically from
/// its spectral projection.
fn clustered_eigenbasis(h: &CMat) -> Vec<(f64, CMat)> {
    let (vals, vecs) = linalg::hermitian_eigen(h);
    let mut clusters: Vec<(Vec<f64>, Vec<usize>)> = Vec::new();
    for (i, &v) in vals.iter().enumerate() {
        match clusters.last_mut() {
            Some((vs, idx)) if (v - vs[vs.len() - 1]).abs() <= CLUSTER_GAP * v.abs().max(1.0) => {
                vs.push(v);
                idx.push(i);
            }
            _ => clusters.push((vec![v], vec![i])),
        }
    }
    clusters
        .into_iter()
        .map(|(vs, idx)| {
            let mean = vs.iter().sum::<f64>() / vs.len() as f64;
            let sub = CMat::from_fn(h.nrows(), idx.len(), |r, k| vecs[(r, idx[k])]);
            let proj = &sub * sub.adjoint();
            (mean, linalg::pivoted_gram_schmidt(&proj, idx.len(), 1e-8))
        })
        .collect()
}

/// Canonical form of a normalized `A_o` matrix under `F ↦ v F vᵗ`.
pub fn canonical_form_ao(f: &FMatrix, tol: &Tolerances) -> Result<CanonicalFormAo> {
    let params = require_normalized_ao(f, tol)?;
    let n = f.n();
    let fm = f.matrix();
    let h = fm.adjoint() * fm;
    let clusters = clustered_eigenbasis(&h);

    // eigenvalues of |F| with their eigenvectors, split around 1
    let mut big: Vec<(f64, CVec)> = Vec::new();
    let mut small: Vec<f64> = Vec::new();
    let mut ones: Vec<CVec> = Vec::new();
    for (ev, basis) in &clusters {
        let sigma = ev.max(0.0).sqrt();
        for col in basis.column_iter() {
            if (sigma - 1.0).abs() < tol.check {
                ones.push(col.into_owned());
            } else if sigma > 1.0 {
                big.push((sigma, col.into_owned()));
            } else {
                small.push(sigma);
            }
        }
    }
    big.sort_by(|a, b| b.0.total_cmp(&a.0));
    small.sort_by(|a, b| a.total_cmp(b));
    if big.len() != small.len() {
        return Err(Error::DegenerateEigenpairing(format!(
            "{} eigenvalues above 1 but {} below",
            big.len(),
            small.len()
        )));
    }
    for ((s_big, _), s_small) in big.iter().zip(&small) {
        if (s_big * s_small - 1.0).abs() > PAIRING_SLACK {
            return Err(Error::DegenerateEigenpairing(format!(
                "eigenvalues {s_small} and {s_big} are not reciprocal"
            )));
        }
    }
    // antiunitary part of the polar decomposition of ξ ↦ conj(Fξ)
    let jmap = |v: &CVec, sigma: f64| -> CVec { (fm * v).map(|z| z.conj()) / real(sigma) };
    let k = big.len();
    let lambdas_big: Vec<f64> = big.iter().map(|(s, _)| 1.0 / s).collect();

    let (lambdas, fixed_block, cols) = match params.sign {
        Sign::Plus => {
            let mut cols: Vec<CVec> = big.iter().map(|(_, a)| a.clone()).collect();
            cols.extend(big.iter().map(|(s, a)| jmap(a, *s)));
            cols.extend(real_fixed_basis(&ones, &jmap));
            (lambdas_big, n - 2 * k, cols)
        }
        Sign::Minus => {
            if !ones.len().is_multiple_of(2) {
                return Err(Error::DegenerateEigenpairing(format!(
                    "eigenvalue 1 of |F| has odd multiplicity {} for sign -1",
                    ones.len()
                )));
            }
            let mus = quaternionic_basis(&ones, &jmap);
            let mut lambdas = lambdas_big;
            lambdas.extend(std::iter::repeat_n(1.0, mus.len()));
            let mut cols: Vec<CVec> = big.iter().map(|(_, a)| a.clone()).collect();
            cols.extend(mus.iter().cloned());
            cols.extend(big.iter().map(|(s, a)| -jmap(a, *s)));
            cols.extend(mus.iter().map(|m| -jmap(m, 1.0)));
            (lambdas, 0, cols)
        }
    };
    let mut w = CMat::zeros(n, n);
    for (j, col) in cols.iter().enumerate() {
        w.set_column(j, col);
    }
    let canonical = canonical_matrix_ao(params.sign, &lambdas, fixed_block);
    let transformed = w.transpose() * fm * &w;
    let residual = relative(frob(&(&transformed - &canonical)), frob(&canonical))
        .max(linalg::unitarity_residual(&w));
    if residual > tol.check {
        return Err(Error::DegenerateEigenpairing(format!(
            "canonical form residual {residual:.3e} exceeds tolerance"
        )));
    }
    Ok(CanonicalFormAo { sign: params.sign, lambdas, fixed_block, transition: w, residual })
}

/// Orthonormal basis of vectors fixed by the antiunitary `jmap` (which squares
/// to one on the span of `ones`).
fn real_fixed_basis(ones: &[CVec], jmap: &dyn Fn(&CVec, f64) -> CVec) -> Vec<CVec> {
    if ones.is_empty() {
        return Vec::new();
    }
    let dim = ones[0].len();
    let mut cand = CMat::zeros(dim, 2 * ones.len());
    for (i, v) in ones.iter().enumerate() {
        let jv = jmap(v, 1.0);
        cand.set_column(2 * i, &(v + &jv));
        let iv = v * c(0.0, 1.0);
        let jiv = jmap(&iv, 1.0);
        cand.set_column(2 * i + 1, &(iv + jiv));
    }
    let basis = linalg::pivoted_gram_schmidt(&cand, ones.len(), 1e-8);
    basis.column_iter().map(|c| c.into_owned()).collect()
}

/// Vectors `μ_1..μ_r` such that `μ_i, J μ_i` together form an orthonormal
/// basis of the span of `ones` (for an antiunitary `J` with `J² = -1`).
fn quaternionic_basis(ones: &[CVec], jmap: &dyn Fn(&CVec, f64) -> CVec) -> Vec<CVec> {
    let mut taken: Vec<CVec> = Vec::new();
    let mut mus = Vec::new();
    for v in ones {
        let mut u = v.clone();
        for q in &taken {
            let p = q.dotc(&u);
            u -= q * p;
        }
        let nrm = u.norm();
        if nrm < 1e-6 {
            continue;
        }
        u /= real(nrm);
        let ju = jmap(&u, 1.0);
        taken.push(u.clone());
        taken.push(ju);
        mus.push(u);
        if 2 * mus.len() == ones.len() {
            break;
        }
    }
    mus
}

/// Result of an equivalence test; `scale_modulus` is `|λ|` in `F₂ = λ v F₁ vᵗ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equivalence {
    pub equivalent: bool,
    pub scale_modulus: Option<f64>,
}

fn spectra_agree(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * x.abs().max(1.0))
}

/// Sorted eigenvalues of `F*F`.
pub fn gram_spectrum(f: &FMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = linalg::singular_values(f.matrix()).iter().map(|x| x * x).collect();
    s.sort_by(|a, b| a.total_cmp(b));
    s
}

pub fn equivalent_ao(f1: &FMatrix, f2: &FMatrix, tol: &Tolerances) -> Result<Equivalence> {
    let p1 = validate_ao(f1, tol)?;
    let p2 = validate_ao(f2, tol)?;
    let no = Equivalence { equivalent: false, scale_modulus: None };
    if f1.n() != f2.n() || p1.sign != p2.sign {
        return Ok(no);
    }
    let g1 = gram_spectrum(&normalize_ao(f1, tol)?);
    let g2 = gram_spectrum(&normalize_ao(f2, tol)?);
    if !spectra_agree(&g1, &g2, tol.check) {
        return Ok(no);
    }
    Ok(Equivalence { equivalent: true, scale_modulus: Some((p2.c / p1.c).sqrt()) })
}

pub fn monoidally_equivalent_ao(f1: &FMatrix, f2: &FMatrix, tol: &Tolerances) -> Result<bool> {
    let b1 = validate_ao(f1, tol)?.beta;
    let b2 = validate_ao(f2, tol)?.beta;
    Ok((b1 - b2).abs() <= tol.check)
}

/// Canonical `A_o` matrix of size `n` with sign `sign` and `Tr(F*F) = trace`.
///
/// All pairs but one carry `λ = 1`; the remaining pair absorbs the excess
/// trace by solving `λ² + λ^{-2} = residual`.
pub fn construct_ao_companion(sign: Sign, trace: f64, n: usize, tol: &Tolerances) -> Result<FMatrix> {
    if n == 0 {
        return Err(Error::Infeasible("size must be positive".into()));
    }
    if !(trace.is_finite()) || trace < n as f64 - tol.check {
        return Err(Error::Infeasible(format!("trace {trace} is below the size {n}")));
    }
    let excess_free = (trace - n as f64).abs() <= tol.check;
    let lambda_for = |residual: f64| -> f64 {
        let x = (residual - (residual * residual - 4.0).max(0.0).sqrt()) / 2.0;
        x.sqrt()
    };
    let m = match sign {
        Sign::Minus => {
            if !n.is_multiple_of(2) {
                return Err(Error::Infeasible(format!("sign -1 requires even size, got {n}")));
            }
            let pairs = n / 2;
            let mut lambdas = vec![1.0; pairs];
            if !excess_free {
                lambdas[0] = lambda_for(trace - 2.0 * (pairs - 1) as f64);
            }
            canonical_matrix_ao(Sign::Minus, &lambdas, 0)
        }
        Sign::Plus => {
            if excess_free {
                CMat::identity(n, n)
            } else if n < 2 {
                return Err(Error::Infeasible(format!("size 1 forces trace 1, got {trace}")));
            } else {
                let l = lambda_for(trace - (n - 2) as f64);
                canonical_matrix_ao(Sign::Plus, &[l], n - 2)
            }
        }
    };
    FMatrix::with_tolerance(m, tol.rank)
}

/// Data of an `A_u` matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuParams {
    pub trace: f64,
    pub inv_trace: f64,
    pub qdim: f64,
    /// `Tr(F*F)` after balancing, equal to `qdim`
    pub c: f64,
}

pub fn validate_au(f: &FMatrix, tol: &Tolerances) -> Result<AuParams> {
    let s = linalg::singular_values(f.matrix());
    let smin = *s.last().unwrap();
    if smin < tol.rank {
        return Err(Error::SingularMatrix(smin));
    }
    let trace: f64 = s.iter().map(|x| x * x).sum();
    let inv_trace: f64 = s.iter().map(|x| 1.0 / (x * x)).sum();
    let qdim = (trace * inv_trace).sqrt();
    Ok(AuParams { trace, inv_trace, qdim, c: qdim })
}

/// `λF` with `λ = (Tr((F*F)^{-1}) / Tr(F*F))^{1/4}`, so both traces agree.
pub fn normalize_au(f: &FMatrix, tol: &Tolerances) -> Result<FMatrix> {
    let p = validate_au(f, tol)?;
    let lambda = (p.inv_trace / p.trace).powf(0.25);
    Ok(f.scaled(real(lambda)))
}

/// Sorted (ascending) singular values of the balanced matrix.
pub fn canonical_form_au(f: &FMatrix, tol: &Tolerances) -> Result<Vec<f64>> {
    let g = normalize_au(f, tol)?;
    let mut s = linalg::singular_values(g.matrix());
    s.sort_by(|a, b| a.total_cmp(b));
    Ok(s)
}

pub fn equivalent_au(f1: &FMatrix, f2: &FMatrix, tol: &Tolerances) -> Result<bool> {
    if f1.n() != f2.n() {
        return Ok(false);
    }
    Ok(spectra_agree(&canonical_form_au(f1, tol)?, &canonical_form_au(f2, tol)?, tol.check))
}

pub fn monoidally_equivalent_au(f1: &FMatrix, f2: &FMatrix, tol: &Tolerances) -> Result<bool> {
    let q1 = validate_au(f1, tol)?.qdim;
    let q2 = validate_au(f2, tol)?.qdim;
    Ok((q1 - q2).abs() <= tol.check * q1.max(1.0))
}

/// The `A_o` matrix `[[0, √q], [-1/√q, 0]]` with `F F̄ = -1` describing `SU_q(2)`.
pub fn suq2(q: f64) -> FMatrix {
    let s = q.sqrt();
    FMatrix { m: CMat::from_row_slice(2, 2, &[ZERO, real(s), real(-1.0 / s), ZERO]) }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn suq2_parameters() {
        let p = validate_ao(&suq2(0.2), &tol()).unwrap();
        assert_eq!(p.sign, Sign::Minus);
        assert!((p.c + 1.0).abs() < 1e-12);
        assert!((p.trace - 5.2).abs() < 1e-12);
        assert!((p.beta + 1.0 / 5.2).abs() < 1e-12);
        assert!((p.qdim - 5.2).abs() < 1e-12);
    }

    #[test]
    fn off_diagonal_plus_matrix() {
        let f = FMatrix::from_real_rows(&[vec![0.0, 0.5], vec![2.0, 0.0]]).unwrap();
        let p = validate_ao(&f, &tol()).unwrap();
        assert_eq!(p.sign, Sign::Plus);
        assert!((p.trace - 4.25).abs() < 1e-12);
        let cf = canonical_form_ao(&f, &tol()).unwrap();
        assert_eq!(cf.lambdas.len(), 1);
        assert!((cf.lambdas[0] - 0.5).abs() < 1e-12);
        assert!(frob(&(cf.transition - CMat::identity(2, 2))) < 1e-12);
    }

    #[test]
    fn raw_suq2_normalizes() {
        let q: f64 = 0.2;
        let raw = FMatrix::from_real_rows(&[vec![0.0, 1.0], vec![-1.0 / q, 0.0]]).unwrap();
        let p = validate_ao(&raw, &tol()).unwrap();
        assert!((p.c + 1.0 / q).abs() < 1e-12);
        let g = normalize_ao(&raw, &tol()).unwrap();
        assert!(frob(&(g.matrix() - suq2(q).matrix())) < 1e-12);
    }

    #[test]
    fn scaled_identity_normalizes() {
        let f = FMatrix::identity(3).scaled(real(2.0));
        let g = normalize_ao(&f, &tol()).unwrap();
        assert!(frob(&(g.matrix() - CMat::identity(3, 3))) < 1e-14);
    }

    #[test]
    fn non_admissible_rejected() {
        let f = FMatrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(validate_ao(&f, &tol()), Err(Error::NotAoAdmissible { .. })));
    }

    #[test]
    fn singular_rejected() {
        let m = CMat::from_row_slice(2, 2, &[real(1.0), real(2.0), real(2.0), real(4.0)]);
        assert!(matches!(FMatrix::new(m), Err(Error::SingularMatrix(_))));
    }

    #[test]
    fn unnormalized_canonical_form_rejected() {
        let f = FMatrix::identity(2).scaled(real(3.0));
        assert!(matches!(canonical_form_ao(&f, &tol()), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn companion_minus() {
        let f = construct_ao_companion(Sign::Minus, 5.2, 4, &tol()).unwrap();
        let p = validate_ao(&f, &tol()).unwrap();
        assert!((p.trace - 5.2).abs() < 1e-12);
        let cf = canonical_form_ao(&f, &tol()).unwrap();
        assert!((cf.lambdas[0] - 0.592452_9).abs() < 1e-6);
        assert!((cf.lambdas[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn companion_infeasible() {
        assert!(matches!(construct_ao_companion(Sign::Minus, 3.9, 4, &tol()), Err(Error::Infeasible(_))));
        assert!(matches!(construct_ao_companion(Sign::Minus, 6.0, 3, &tol()), Err(Error::Infeasible(_))));
        assert!(matches!(construct_ao_companion(Sign::Plus, 2.0, 1, &tol()), Err(Error::Infeasible(_))));
        let id = construct_ao_companion(Sign::Plus, 3.0, 3, &tol()).unwrap();
        assert_eq!(id.matrix(), &CMat::identity(3, 3));
    }

    #[test]
    fn au_examples() {
        let p = validate_au(&FMatrix::diagonal(&[2.0, 0.5]).unwrap(), &tol()).unwrap();
        assert!((p.trace - 4.25).abs() < 1e-12 && (p.inv_trace - 4.25).abs() < 1e-12);
        let f = FMatrix::diagonal(&[2.0, 1.0]).unwrap();
        let g = normalize_au(&f, &tol()).unwrap();
        let lambda = (1.25f64 / 5.0).powf(0.25);
        assert!((g.matrix()[(0, 0)].re - 2.0 * lambda).abs() < 1e-12);
        let pg = validate_au(&g, &tol()).unwrap();
        assert!((pg.trace - pg.inv_trace).abs() < 1e-12);
        assert!((pg.qdim - 2.5).abs() < 1e-12);
    }

    #[test]
    fn au_monoidal_truth_table() {
        let t2 = (3.25 - 6.5625f64.sqrt()) / 2.0;
        let t = t2.sqrt();
        let f2 = FMatrix::diagonal(&[2.0, 0.5]).unwrap();
        let f3 = FMatrix::diagonal(&[t, 1.0, 1.0 / t]).unwrap();
        assert!(monoidally_equivalent_au(&f2, &f3, &tol()).unwrap());
        assert!(!equivalent_au(&f2, &f3, &tol()).unwrap());
        assert!(!monoidally_equivalent_au(&FMatrix::identity(2), &FMatrix::identity(3), &tol()).unwrap());
    }
}
