//! Random unitaries and random admissible defining matrices, for property
//! tests and randomized checks.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::fmatrix::{canonical_matrix_ao, FMatrix, Sign};
use crate::linalg::{self, CMat, C64};

fn ginibre<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    CMat::from_fn(n, n, |_, _| {
        C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

/// Haar-distributed unitary: Gram-Schmidt of a complex Ginibre matrix in
/// column order, i.e. the QR factor with positive diagonal in `R`.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    loop {
        let g = ginibre(n, rng);
        let mut q = CMat::zeros(n, n);
        let mut ok = true;
        for j in 0..n {
            let mut v = g.column(j).into_owned();
            for _ in 0..2 {
                for k in 0..j {
                    let p = q.column(k).dotc(&v);
                    v -= q.column(k) * p;
                }
            }
            let nrm = v.norm();
            if nrm < 1e-8 {
                ok = false;
                break;
            }
            q.set_column(j, &(v / linalg::real(nrm)));
        }
        if ok {
            return q;
        }
    }
}

/// A random `A_o` matrix `v C vᵗ` together with the canonical data of `C`.
#[derive(Debug, Clone)]
pub struct RandomAo {
    pub sign: Sign,
    /// ascending, in `(0, 1]`
    pub lambdas: Vec<f64>,
    pub fixed_block: usize,
    pub unitary: CMat,
    pub matrix: FMatrix,
}

/// Random canonical form of size `n` conjugated by a random unitary.
///
/// Lambdas are drawn from `[0.15, 0.95]` and kept at least `0.05` apart, so
/// that their clusters stay well separated. Odd sizes always get sign +1.
pub fn random_ao<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<RandomAo> {
    let sign = if n % 2 == 1 || rng.random_bool(0.5) { Sign::Plus } else { Sign::Minus };
    let (k, fixed_block, ones) = match sign {
        Sign::Plus => {
            let k = rng.random_range(0..=n / 2);
            (k, n - 2 * k, 0)
        }
        Sign::Minus => {
            let pairs = n / 2;
            let k = rng.random_range(1..=pairs);
            (k, 0, pairs - k)
        }
    };
    let mut lambdas: Vec<f64> = Vec::with_capacity(k);
    while lambdas.len() < k {
        let l = rng.random_range(0.15..0.95);
        if lambdas.iter().all(|&m: &f64| (m - l).abs() >= 0.05) {
            lambdas.push(l);
        }
    }
    lambdas.sort_by(|a, b| a.total_cmp(b));
    lambdas.extend(std::iter::repeat_n(1.0, ones));
    let canonical = canonical_matrix_ao(sign, &lambdas, fixed_block);
    let unitary = random_unitary(n, rng);
    let matrix = FMatrix::new(&unitary * canonical * unitary.transpose())?;
    Ok(RandomAo { sign, lambdas, fixed_block, unitary, matrix })
}
