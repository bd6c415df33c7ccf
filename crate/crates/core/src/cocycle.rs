//! Truncated dual 2-cocycles from pairs of realizations with equal carrier
//! dimensions.
//!
//! Given unitaries `u_x : H'_x → H_x`, the fiber functor
//! `S ↦ (u_y ⊗ u_z) φ(S) u_x*` agrees with `S ↦ Ω* S` for the unitary
//!
//! ```text
//! Ω_{y,z} = Σ_{x, S} S u_x φ(S)* (u_y ⊗ u_z)*
//! ```
//!
//! on `H_y ⊗ H_z`. The product of two cocycles is in general not a cocycle,
//! so no product is offered on [`CocycleBlocks`].

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::category::Realization;
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::fmatrix::{self, FMatrix};
use crate::linalg::{self, frob, CMat};
use crate::word::Word;

#[derive(Debug, Clone)]
pub struct CocycleBlocks {
    source: Arc<Realization>,
    pub level: usize,
    /// `Ω_{y,z}` for `|y| + |z| ≤ level`, on the source carriers
    pub blocks: BTreeMap<(Word, Word), CMat>,
    /// whether blocks with a trivial leg were set to the identity
    pub normalized: bool,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CocycleReport {
    pub blocks: usize,
    pub unitarity: f64,
    /// deviation of blocks with a trivial leg from the identity, before they
    /// were reset
    pub normalization: f64,
    pub identity: f64,
}

/// Build `Ω` from two realizations and unitaries `u_x`; labels absent from
/// `u` use the identity (carriers aligned by their deterministic bases).
pub fn build_cocycle(
    source: &Arc<Realization>,
    target: &Arc<Realization>,
    level: usize,
    u: &BTreeMap<Word, CMat>,
) -> Result<(CocycleBlocks, f64)> {
    source.check_compatible(target).map_err(|e| Error::NotMonoidallyEquivalent(e.to_string()))?;
    let variant = source.variant();
    let labels = variant.labels_up_to(level);
    let mut units = BTreeMap::new();
    for x in &labels {
        let (d, d2) = (source.carrier_dim(x)?, target.carrier_dim(x)?);
        if d != d2 {
            return Err(Error::DimensionMismatch(format!("label {x}: carrier dimensions {d} and {d2}")));
        }
        let ux = match u.get(x) {
            Some(m) => {
                if m.shape() != (d, d) {
                    return Err(Error::DimensionMismatch(format!("unitary for {x} must be {d}x{d}")));
                }
                let r = linalg::unitarity_residual(m);
                if r > source.tolerances().check {
                    return Err(Error::InvalidInput(format!("u_{x} is not unitary: {r:.3e}")));
                }
                m.clone()
            }
            None => CMat::identity(d, d),
        };
        units.insert(x.clone(), ux);
    }
    if let Some(u0) = units.get(&Word::empty()) {
        if frob(&(u0 - CMat::identity(1, 1))) > source.tolerances().check {
            return Err(Error::InvalidInput("u for the trivial label must be 1".into()));
        }
    }
    let mut blocks = BTreeMap::new();
    let mut normalization: f64 = 0.0;
    for y in &labels {
        for z in &labels {
            if y.len() + z.len() > level {
                continue;
            }
            let uyz = linalg::kron(&units[y], &units[z]);
            let dim = uyz.nrows();
            let mut omega = CMat::zeros(dim, dim);
            for s in source.fusion(y, z)?.maps() {
                let phi = target.coords2(&s.morphism, y, z, &s.label)?;
                omega += &s.coords * &units[&s.label] * phi.adjoint() * uyz.adjoint();
            }
            if y.is_empty() || z.is_empty() {
                normalization = normalization.max(frob(&(&omega - CMat::identity(dim, dim))));
                omega = CMat::identity(dim, dim);
            }
            blocks.insert((y.clone(), z.clone()), omega);
        }
    }
    Ok((CocycleBlocks { source: source.clone(), level, blocks, normalized: true }, normalization))
}

impl CocycleBlocks {
    pub fn block(&self, y: &Word, z: &Word) -> Result<&CMat> {
        self.blocks
            .get(&(y.clone(), z.clone()))
            .ok_or_else(|| Error::MissingBlock(y.to_string(), z.to_string()))
    }

    /// `max ‖Ω_{y,z}* Ω_{y,z} − 1‖`.
    pub fn unitarity_residual(&self) -> f64 {
        self.blocks.values().map(linalg::unitarity_residual).fold(0.0, f64::max)
    }

    /// `(Δ̂⊗ι)(Ω)(Ω⊗1) = (ι⊗Δ̂)(Ω)(1⊗Ω)` on every `H_x ⊗ H_y ⊗ H_z` with
    /// `|x| + |y| + |z| ≤ level`, where `(Δ̂⊗ι)(Ω)` acts on the channel
    /// `S ∈ Mor(w, x ⊗ y)` as `(S⊗1) Ω_{w,z} (S*⊗1)`.
    pub fn check_identity(&self) -> Result<f64> {
        let r = &self.source;
        let labels = r.variant().labels_up_to(self.level);
        let mut res: f64 = 0.0;
        for x in &labels {
            for y in &labels {
                for z in &labels {
                    if x.len() + y.len() + z.len() > self.level {
                        continue;
                    }
                    let (dx, dz) = (r.carrier_dim(x)?, r.carrier_dim(z)?);
                    let (ix, iz) = (CMat::identity(dx, dx), CMat::identity(dz, dz));
                    let mut left = CMat::zeros(0, 0);
                    for s in r.fusion(x, y)?.maps() {
                        let sk = linalg::kron(&s.coords, &iz);
                        let term = &sk * self.block(&s.label, z)? * sk.adjoint();
                        left = if left.is_empty() { term } else { left + term };
                    }
                    let left = left * linalg::kron(self.block(x, y)?, &iz);
                    let mut right = CMat::zeros(0, 0);
                    for s in r.fusion(y, z)?.maps() {
                        let sk = linalg::kron(&ix, &s.coords);
                        let term = &sk * self.block(x, &s.label)? * sk.adjoint();
                        right = if right.is_empty() { term } else { right + term };
                    }
                    let right = right * linalg::kron(&ix, self.block(y, z)?);
                    res = res.max(frob(&(left - right)));
                }
            }
        }
        Ok(res)
    }

    pub fn report(&self, normalization: f64) -> Result<CocycleReport> {
        Ok(CocycleReport {
            blocks: self.blocks.len(),
            unitarity: self.unitarity_residual(),
            normalization,
            identity: self.check_identity()?,
        })
    }
}

/// Whether the cocycles of two normalized `A_o` matrices of equal size and
/// trace differ by a coboundary: true iff `F₂ = v F₁ vᵗ` for a unitary `v`,
/// decided by comparing signs and spectra of `F*F`.
pub fn coboundary_equivalent(f1: &FMatrix, f2: &FMatrix, tol: &Tolerances) -> Result<bool> {
    let p1 = fmatrix::validate_ao(f1, tol)?;
    let p2 = fmatrix::validate_ao(f2, tol)?;
    for p in [&p1, &p2] {
        if (p.c.abs() - 1.0).abs() > tol.check {
            return Err(Error::NotNormalized(p.c.abs()));
        }
    }
    if f1.n() != f2.n() {
        return Err(Error::DimensionMismatch(format!("sizes {} and {}", f1.n(), f2.n())));
    }
    if (p1.trace - p2.trace).abs() > tol.check * p1.trace.max(1.0) {
        return Err(Error::InvalidInput(format!("traces {} and {} differ", p1.trace, p2.trace)));
    }
    if p1.sign != p2.sign {
        return Ok(false);
    }
    let (g1, g2) = (fmatrix::gram_spectrum(f1), fmatrix::gram_spectrum(f2));
    Ok(g1.iter().zip(&g2).all(|(a, b)| (a - b).abs() <= tol.check * a.max(1.0)))
}
