//! Truncated linking *-algebras of a pair of monoidally equivalent
//! realizations.
//!
//! The algebra has a basis `e^x_{ab}`, one block per label `x`, with `a`
//! running over the carrier of `x` in the target realization and `b` over the
//! carrier in the source realization. Products are read off from
//!
//! ```text
//! e^y_{ab} e^z_{cd} = Σ_{x, S} φ(S)_{(ac),p} conj(S_{(bd),q}) e^x_{pq}
//! ```
//!
//! where `S` runs over the fusion isometries `x → y ⊗ z` of the source and
//! `φ(S)` is the same diagram combination evaluated in the target.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::category::Realization;
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{self, frob, real, CMat, C64, ONE, ZERO};
use crate::word::{Variant, Word};

/// Coordinates of one fusion isometry `x → y ⊗ z` in both realizations.
#[derive(Debug, Clone)]
pub struct ProductChannel {
    pub label: Word,
    /// `d_y d_z × d_x` coordinates in the source
    pub source: CMat,
    /// `d'_y d'_z × d'_x` coordinates of the transported map in the target
    pub target: CMat,
}

/// Data of the unit-norm vector `t ∈ Mor(ε, x ⊗ x̄)`.
#[derive(Debug, Clone)]
struct Conjugation {
    /// `d_x × d_x̄` source coordinates
    t: CMat,
    /// `d'_x × d'_x̄` target coordinates of `φ(t)`
    phi_t: CMat,
    phi_t_inv: CMat,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct BasisIndex {
    pub label: Word,
    /// index in the target carrier of the label
    pub row: usize,
    /// index in the source carrier of the label
    pub col: usize,
}

/// An element of the linking algebra: one coefficient matrix per label.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Element {
    pub blocks: BTreeMap<Word, CMat>,
}

impl Element {
    pub fn zero() -> Element {
        Element::default()
    }

    pub fn block(label: Word, coefficients: CMat) -> Element {
        let mut blocks = BTreeMap::new();
        blocks.insert(label, coefficients);
        Element { blocks }
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut out = self.clone();
        for (x, m) in &other.blocks {
            match out.blocks.get_mut(x) {
                Some(b) => *b += m,
                None => {
                    out.blocks.insert(x.clone(), m.clone());
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &Element) -> Element {
        self.add(&other.scale(real(-1.0)))
    }

    pub fn scale(&self, s: C64) -> Element {
        Element { blocks: self.blocks.iter().map(|(x, m)| (x.clone(), m * s)).collect() }
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.blocks.values().map(|m| frob(m).powi(2)).sum::<f64>().sqrt()
    }

    pub fn coefficient(&self, i: &BasisIndex) -> C64 {
        self.blocks.get(&i.label).map_or(ZERO, |m| m[(i.row, i.col)])
    }
}

/// Which of the two coactions on the linking algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    /// right coaction of the source quantum group
    Source,
    /// left coaction of the target quantum group
    Target,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Source => "source",
            Side::Target => "target",
        }
    }
}

/// Residuals of the defining relations of the algebra.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RelationReport {
    /// `max(‖X X* − 1‖, ‖X* X − 1‖)` over the blocks `X^x` with `2|x| ≤ N`
    pub unitarity: f64,
    /// conjugation relation of the fundamental block
    pub conjugation: f64,
    pub associativity: f64,
    /// `‖(ef)* − f* e*‖`
    pub anti_multiplicativity: f64,
    /// `‖(e*)* − e‖`
    pub involution: f64,
    /// `‖1·e − e‖`, `‖e·1 − e‖`
    pub unit: f64,
}

impl RelationReport {
    pub fn max(&self) -> f64 {
        [self.unitarity, self.conjugation, self.associativity, self.anti_multiplicativity, self.involution, self.unit]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GramReport {
    pub size: usize,
    /// `max |G_closed − G_products|`
    pub agreement: f64,
    pub min_eigenvalue: f64,
    pub hermitian_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralQuantities {
    pub label: Word,
    pub mult: usize,
    pub mult_q: f64,
    pub dim_q: f64,
    #[serde(skip)]
    pub l: CMat,
}

/// Sparse element of a tensor product of algebras, indexed by flat basis
/// positions in each leg.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TensorElement {
    pub terms: BTreeMap<Vec<usize>, C64>,
}

impl TensorElement {
    fn push(&mut self, key: Vec<usize>, v: C64) {
        if v != ZERO {
            *self.terms.entry(key).or_insert(ZERO) += v;
        }
    }

    /// Largest coefficient of `self − other`.
    pub fn distance(&self, other: &TensorElement) -> f64 {
        let mut d: f64 = 0.0;
        for (k, v) in &self.terms {
            d = d.max((v - other.terms.get(k).copied().unwrap_or(ZERO)).norm());
        }
        for (k, v) in &other.terms {
            if !self.terms.contains_key(k) {
                d = d.max(v.norm());
            }
        }
        d
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CoactionReport {
    pub side: Side,
    /// `(δ⊗ι)δ − (ι⊗Δ)δ`
    pub coassociativity: f64,
    /// `(ι⊗h)δ − ω(·)1`
    pub invariance: f64,
    /// `δ(ef) − δ(e)δ(f)`
    pub multiplicativity: f64,
}

#[derive(Debug)]
pub struct LinkingAlgebra {
    source: Arc<Realization>,
    target: Arc<Realization>,
    level: usize,
    labels: Vec<Word>,
    /// `(d'_x, d_x)`
    dims: BTreeMap<Word, (usize, usize)>,
    offsets: BTreeMap<Word, usize>,
    channels: BTreeMap<(Word, Word), Vec<ProductChannel>>,
    conjugations: BTreeMap<Word, Conjugation>,
    source_coefficients: Option<Arc<LinkingAlgebra>>,
    target_coefficients: Option<Arc<LinkingAlgebra>>,
    tol: Tolerances,
}

/// Default truncation level for a source realization of size `n`.
pub fn default_level(n: usize) -> usize {
    if n <= 3 {
        3
    } else {
        2
    }
}

impl LinkingAlgebra {
    /// Build the algebra for all labels of level (word length) at most `level`.
    pub fn build(source: Arc<Realization>, target: Arc<Realization>, level: usize) -> Result<LinkingAlgebra> {
        source.check_compatible(&target).map_err(|e| match e {
            Error::BetaMismatch(a, b) => {
                Error::NotMonoidallyEquivalent(format!("zigzag scalars {a} and {b} differ"))
            }
            Error::VariantMismatch => Error::NotMonoidallyEquivalent("variants differ".into()),
            e => e,
        })?;
        let cap = source.level_cap().min(target.level_cap());
        if level > cap {
            return Err(Error::LevelCapExceeded { level, cap });
        }
        let variant = source.variant();
        let labels = variant.labels_up_to(level);
        let mut dims = BTreeMap::new();
        let mut offsets = BTreeMap::new();
        let mut total = 0;
        for x in &labels {
            let d = (target.carrier_dim(x)?, source.carrier_dim(x)?);
            offsets.insert(x.clone(), total);
            total += d.0 * d.1;
            dims.insert(x.clone(), d);
        }
        let mut channels = BTreeMap::new();
        for y in &labels {
            for z in &labels {
                if y.len() + z.len() > level {
                    continue;
                }
                let mut list = Vec::new();
                for s in source.fusion(y, z)?.maps() {
                    list.push(ProductChannel {
                        label: s.label.clone(),
                        source: s.coords.clone(),
                        target: target.coords2(&s.morphism, y, z, &s.label)?,
                    });
                }
                channels.insert((y.clone(), z.clone()), list);
            }
        }
        let mut conjugations = BTreeMap::new();
        let eps = Word::empty();
        for x in &labels {
            let xb = variant.conj(x);
            let maps = source.fusion_channel(&eps, x, &xb)?;
            let s = maps.first().ok_or_else(|| Error::ZeroSpace(format!("Mor(e, {x} {xb})")))?;
            let (dt, ds) = dims[x];
            let (dtb, dsb) = dims[&xb];
            let t = linalg::unvec(&s.coords, ds, dsb);
            let phi = target.coords2(&s.morphism, x, &xb, &eps)?;
            let phi_t = linalg::unvec(&phi, dt, dtb);
            let phi_t_inv = linalg::inverse(&phi_t, source.tolerances().rank)?;
            conjugations.insert(x.clone(), Conjugation { t, phi_t, phi_t_inv });
        }
        let tol = *source.tolerances();
        Ok(LinkingAlgebra {
            source,
            target,
            level,
            labels,
            dims,
            offsets,
            channels,
            conjugations,
            source_coefficients: None,
            target_coefficients: None,
            tol,
        })
    }

    pub fn source(&self) -> &Arc<Realization> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Realization> {
        &self.target
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn variant(&self) -> Variant {
        self.source.variant()
    }

    pub fn labels(&self) -> &[Word] {
        &self.labels
    }

    /// `(d'_x, d_x)`: target and source carrier dimensions of a label.
    pub fn dims(&self, x: &Word) -> Result<(usize, usize)> {
        self.dims.get(x).copied().ok_or_else(|| Error::LevelCapExceeded { level: x.len(), cap: self.level })
    }

    /// Number of basis elements per label.
    pub fn basis_sizes(&self) -> Vec<(Word, usize)> {
        self.labels.iter().map(|x| (x.clone(), self.dims[x].0 * self.dims[x].1)).collect()
    }

    pub fn dim(&self) -> usize {
        self.basis_sizes().iter().map(|(_, s)| s).sum()
    }

    /// Basis indices ordered by label, then row-major.
    pub fn basis(&self) -> Vec<BasisIndex> {
        self.basis_up_to(self.level)
    }

    pub fn basis_up_to(&self, max: usize) -> Vec<BasisIndex> {
        let mut out = Vec::new();
        for x in self.labels.iter().filter(|x| x.len() <= max) {
            let (r, c) = self.dims[x];
            for row in 0..r {
                for col in 0..c {
                    out.push(BasisIndex { label: x.clone(), row, col });
                }
            }
        }
        out
    }

    /// Position of a basis element in [`LinkingAlgebra::basis`].
    pub fn flat_index(&self, i: &BasisIndex) -> usize {
        self.offsets[&i.label] + i.row * self.dims[&i.label].1 + i.col
    }

    pub fn unit(&self) -> Element {
        Element::block(Word::empty(), CMat::from_element(1, 1, ONE))
    }

    pub fn basis_element(&self, i: &BasisIndex) -> Element {
        let (r, c) = self.dims[&i.label];
        let mut m = CMat::zeros(r, c);
        m[(i.row, i.col)] = ONE;
        Element::block(i.label.clone(), m)
    }

    /// `Σ_{ab} A_{ab} e^x_{ab}`.
    pub fn element(&self, x: &Word, coefficients: CMat) -> Result<Element> {
        let d = self.dims(x)?;
        if coefficients.shape() != d {
            return Err(Error::DimensionMismatch(format!(
                "block {x} needs a {}x{} coefficient matrix",
                d.0, d.1
            )));
        }
        Ok(Element::block(x.clone(), coefficients))
    }

    /// The fusion channels used for products of blocks `y` and `z`.
    pub fn channels(&self, y: &Word, z: &Word) -> Result<&[ProductChannel]> {
        self.channels
            .get(&(y.clone(), z.clone()))
            .map(|v| v.as_slice())
            .ok_or(Error::LevelCapExceeded { level: y.len() + z.len(), cap: self.level })
    }

    /// Product of two elements; fails when a pair of blocks fuses beyond the
    /// truncation level.
    pub fn product(&self, a: &Element, b: &Element) -> Result<Element> {
        let mut out = Element::zero();
        for (y, ma) in &a.blocks {
            for (z, mb) in &b.blocks {
                let k = linalg::kron(ma, mb);
                for ch in self.channels(y, z)? {
                    let r = ch.target.transpose() * &k * linalg::conj(&ch.source);
                    out = out.add(&Element::block(ch.label.clone(), r));
                }
            }
        }
        Ok(out)
    }

    /// Structure constants: the product of two basis elements.
    pub fn structure_constant(&self, i: &BasisIndex, j: &BasisIndex) -> Result<Element> {
        self.product(&self.basis_element(i), &self.basis_element(j))
    }

    pub fn star(&self, a: &Element) -> Result<Element> {
        let variant = self.variant();
        let mut out = Element::zero();
        for (x, m) in &a.blocks {
            let c = self
                .conjugations
                .get(x)
                .ok_or(Error::LevelCapExceeded { level: x.len(), cap: self.level })?;
            let r = &c.phi_t_inv * linalg::conj(m) * &c.t;
            out = out.add(&Element::block(variant.conj(x), r));
        }
        Ok(out)
    }

    /// The invariant state: coefficient of the unit.
    pub fn omega(&self, a: &Element) -> C64 {
        a.blocks.get(&Word::empty()).map_or(ZERO, |m| m[(0, 0)])
    }

    /// `ω(ab)`, using only the trivial fusion channel. Valid for all blocks
    /// up to the truncation level, including pairs whose full product would
    /// leave it.
    pub fn omega_product(&self, a: &Element, b: &Element) -> C64 {
        let variant = self.variant();
        let mut acc = ZERO;
        for (y, ma) in &a.blocks {
            let yb = variant.conj(y);
            let Some(mb) = b.blocks.get(&yb) else { continue };
            let c = &self.conjugations[y];
            // Σ φ(t)_{(a,c)} conj(t_{(b,d)}) A_{ab} B_{cd}
            let m = c.phi_t.transpose() * ma * linalg::conj(&c.t);
            acc += (0..mb.nrows())
                .flat_map(|i| (0..mb.ncols()).map(move |j| (i, j)))
                .map(|(i, j)| m[(i, j)] * mb[(i, j)])
                .sum::<C64>();
        }
        acc
    }

    /// Dense coefficient vector over [`LinkingAlgebra::basis`].
    pub fn flatten(&self, a: &Element) -> Vec<C64> {
        let mut v = vec![ZERO; self.dim()];
        for (x, m) in &a.blocks {
            let off = self.offsets[x];
            let c = m.ncols();
            for i in 0..m.nrows() {
                for j in 0..c {
                    v[off + i * c + j] = m[(i, j)];
                }
            }
        }
        v
    }

    fn unit_residual(&self, e: &Element) -> f64 {
        let mut u = e.clone();
        u.blocks.entry(Word::empty()).or_insert_with(|| CMat::zeros(1, 1))[(0, 0)] -= ONE;
        u.norm()
    }

    /// `X^x (X^x)*` and `(X^x)* X^x`, entries as algebra elements, compared
    /// with the identity matrix over the algebra.
    pub fn block_unitarity(&self, x: &Word) -> Result<f64> {
        let xb = self.variant().conj(x);
        self.channels(x, &xb)?;
        let (r, c) = self.dims(x)?;
        let e = |p, q| self.basis_element(&BasisIndex { label: x.clone(), row: p, col: q });
        let stars: Vec<Vec<Element>> =
            (0..r).map(|p| (0..c).map(|q| self.star(&e(p, q))).collect::<Result<_>>()).collect::<Result<_>>()?;
        let mut res: f64 = 0.0;
        for p in 0..r {
            for p2 in 0..r {
                let mut s = Element::zero();
                for q in 0..c {
                    s = s.add(&self.product(&e(p, q), &stars[p2][q])?);
                }
                res = res.max(if p == p2 { self.unit_residual(&s) } else { s.norm() });
            }
        }
        for q in 0..c {
            for q2 in 0..c {
                let mut s = Element::zero();
                for p in 0..r {
                    s = s.add(&self.product(&stars[p][q], &e(p, q2))?);
                }
                res = res.max(if q == q2 { self.unit_residual(&s) } else { s.norm() });
            }
        }
        Ok(res)
    }

    /// Conjugation relation of the fundamental block.
    ///
    /// For `A_o`: `X = (F₂ ⊗ 1) X̄ (F₁^{-1} ⊗ 1)`. For `A_u`: the matrix
    /// `(F₂ ⊗ 1) X̄ (F₁^{-1} ⊗ 1)` is unitary.
    pub fn conjugation_residual(&self) -> Result<f64> {
        let x = Word::level(1);
        let (r, c) = self.dims(&x)?;
        let f2 = self.target.f().matrix().clone();
        let f1_inv = linalg::inverse(self.source.f().matrix(), self.tol.rank)?;
        let e = |p, q| self.basis_element(&BasisIndex { label: x.clone(), row: p, col: q });
        let mut xbar = Vec::new();
        for p in 0..r {
            for q in 0..c {
                xbar.push(self.star(&e(p, q))?);
            }
        }
        // Z_{pq} = Σ_{rs} F₂[p,r] X_{rs}* F₁^{-1}[s,q]
        let mut z = Vec::new();
        for p in 0..r {
            for q in 0..c {
                let mut acc = Element::zero();
                for rr in 0..r {
                    for s in 0..c {
                        let coef = f2[(p, rr)] * f1_inv[(s, q)];
                        if coef != ZERO {
                            acc = acc.add(&xbar[rr * c + s].scale(coef));
                        }
                    }
                }
                z.push(acc);
            }
        }
        match self.variant() {
            Variant::Ao => {
                let mut res: f64 = 0.0;
                for p in 0..r {
                    for q in 0..c {
                        res = res.max(z[p * c + q].sub(&e(p, q)).norm());
                    }
                }
                Ok(res)
            }
            Variant::Au => {
                if 2 > self.level {
                    return Err(Error::LevelCapExceeded { level: 2, cap: self.level });
                }
                let zs: Vec<Element> = z.iter().map(|m| self.star(m)).collect::<Result<_>>()?;
                let mut res: f64 = 0.0;
                for p in 0..r {
                    for p2 in 0..r {
                        let mut s = Element::zero();
                        for q in 0..c {
                            s = s.add(&self.product(&z[p * c + q], &zs[p2 * c + q])?);
                        }
                        res = res.max(if p == p2 { self.unit_residual(&s) } else { s.norm() });
                    }
                }
                for q in 0..c {
                    for q2 in 0..c {
                        let mut s = Element::zero();
                        for p in 0..r {
                            s = s.add(&self.product(&zs[p * c + q], &z[p * c + q2])?);
                        }
                        res = res.max(if q == q2 { self.unit_residual(&s) } else { s.norm() });
                    }
                }
                Ok(res)
            }
        }
    }

    /// Residuals of all algebraic identities on in-cap basis elements.
    pub fn check_relations(&self) -> Result<RelationReport> {
        if self.level < 2 {
            return Err(Error::LevelCapExceeded { level: 2, cap: self.level });
        }
        let basis = self.basis();
        let elems: Vec<Element> = basis.iter().map(|i| self.basis_element(i)).collect();
        let stars: Vec<Element> = elems.iter().map(|e| self.star(e)).collect::<Result<_>>()?;
        let unit = self.unit();
        let mut rep = RelationReport::default();
        for (e, s) in elems.iter().zip(&stars) {
            rep.involution = rep.involution.max(self.star(s)?.sub(e).norm());
            rep.unit = rep
                .unit
                .max(self.product(&unit, e)?.sub(e).norm())
                .max(self.product(e, &unit)?.sub(e).norm());
        }
        let lvl = |i: usize| basis[i].label.len();
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                if lvl(i) + lvl(j) > self.level {
                    continue;
                }
                let ef = self.product(&elems[i], &elems[j])?;
                let lhs = self.star(&ef)?;
                let rhs = self.product(&stars[j], &stars[i])?;
                rep.anti_multiplicativity = rep.anti_multiplicativity.max(lhs.sub(&rhs).norm());
                for k in 0..basis.len() {
                    if lvl(i) + lvl(j) + lvl(k) > self.level {
                        continue;
                    }
                    let left = self.product(&ef, &elems[k])?;
                    let right = self.product(&elems[i], &self.product(&elems[j], &elems[k])?)?;
                    rep.associativity = rep.associativity.max(left.sub(&right).norm());
                }
            }
        }
        for x in self.labels.iter().filter(|x| 2 * x.len() <= self.level) {
            rep.unitarity = rep.unitarity.max(self.block_unitarity(x)?);
        }
        rep.conjugation = self.conjugation_residual()?;
        Ok(rep)
    }

    /// Positive matrix `Q_x` of the source carrier, from the categorical
    /// contragredient.
    pub fn q_matrix(&self, x: &Word) -> Result<CMat> {
        self.source.q_matrix(x)
    }

    /// `Q` of the fundamental label computed from the defining matrix:
    /// `FᵗF̄` for `a` and `(F F*)^{-1}` for `b`, scaled to `Tr Q = Tr Q^{-1}`.
    pub fn fundamental_q(&self, x: &Word) -> Result<CMat> {
        let f = self.source.f().matrix();
        let g = match x.letters() {
            [crate::word::Letter::A] => f.transpose() * linalg::conj(f),
            [crate::word::Letter::B] => linalg::positive_power(&(f * f.adjoint()), real(-1.0), self.tol.rank)?,
            _ => return Err(Error::InvalidInput(format!("{x} is not a fundamental label"))),
        };
        let inv = linalg::positive_power(&g, real(-1.0), self.tol.rank)?;
        Ok(&g * real((inv.trace().re / g.trace().re).sqrt()))
    }

    /// Gram matrix `G_{ij} = ω(e_i e_j*)` from the closed formula
    /// `δ_{xx'} δ_{aa'} Q_x[b', b] / dim_q(x)`, with `Q` of the fundamental
    /// taken from the defining matrix.
    pub fn gram_closed(&self) -> Result<CMat> {
        let basis = self.basis();
        let mut qs = BTreeMap::new();
        for x in &self.labels {
            let q = if x.len() == 1 { self.fundamental_q(x)? } else { self.q_matrix(x)? };
            let dq = q.trace().re;
            qs.insert(x.clone(), (q, dq));
        }
        Ok(CMat::from_fn(basis.len(), basis.len(), |i, j| {
            let (a, b) = (&basis[i], &basis[j]);
            if a.label != b.label || a.row != b.row {
                return ZERO;
            }
            let (q, dq) = &qs[&a.label];
            q[(b.col, a.col)] / real(*dq)
        }))
    }

    /// Gram matrix `G_{ij} = ω(e_i e_j*)` from structure constants and the
    /// involution.
    pub fn gram_structural(&self) -> Result<CMat> {
        let basis = self.basis();
        let elems: Vec<Element> = basis.iter().map(|i| self.basis_element(i)).collect();
        let stars: Vec<Element> = elems.iter().map(|e| self.star(e)).collect::<Result<_>>()?;
        Ok(CMat::from_fn(basis.len(), basis.len(), |i, j| self.omega_product(&elems[i], &stars[j])))
    }

    pub fn gram_report(&self) -> Result<GramReport> {
        let closed = self.gram_closed()?;
        let structural = self.gram_structural()?;
        let agreement = (&closed - &structural).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        let hermitian_residual = (&structural - structural.adjoint()).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        let (vals, _) = linalg::hermitian_eigen(&structural);
        Ok(GramReport {
            size: structural.nrows(),
            agreement,
            min_eigenvalue: vals.first().copied().unwrap_or(f64::NAN),
            hermitian_residual,
        })
    }

    /// The positive operator `L_x` on the row slot of block `x`, from
    /// `⟨L_x Y, Z⟩ = ω((t*⊗1)(1⊗Z*Y)(t⊗1))` with `t ∈ Mor(ε, x̄ ⊗ x)`,
    /// `t*t = dim_q(x)`. Entry `[p', p]` is `⟨L_x e_p, e_{p'}⟩` for the rows
    /// `e_p` of `X^x`.
    pub fn l_matrix(&self, x: &Word) -> Result<CMat> {
        let (r, c) = self.dims(x)?;
        let xb = self.variant().conj(x);
        // t ∈ Mor(ε, x̄ ⊗ x), a d_x̄ × d_x matrix
        let t = &self.conjugations[&xb].t;
        let dq = self.source.irrep_qdim(x)?;
        let tt = t.adjoint() * t * real(dq / frob(t).powi(2));
        let e = |p, q| self.basis_element(&BasisIndex { label: x.clone(), row: p, col: q });
        let mut l = CMat::zeros(r, r);
        for p2 in 0..r {
            for q in 0..c {
                let z_star = self.star(&e(p2, q))?;
                for q2 in 0..c {
                    let w = tt[(q, q2)];
                    if w == ZERO {
                        continue;
                    }
                    for p in 0..r {
                        l[(p2, p)] += w * self.omega_product(&z_star, &e(p, q2));
                    }
                }
            }
        }
        Ok(l)
    }

    pub fn spectral_quantities(&self, x: &Word) -> Result<SpectralQuantities> {
        let l = self.l_matrix(x)?;
        let lb = self.l_matrix(&self.variant().conj(x))?;
        let mult = self.dims(x)?.0;
        let mult_q = (l.trace().re * lb.trace().re).sqrt();
        let dim_q = self.source.irrep_qdim(x)?;
        Ok(SpectralQuantities { label: x.clone(), mult, mult_q, dim_q, l })
    }

    /// `σ_z` for complex `z`: on block `x`, `A ↦ L_x^{-iz} A (Q_x^{iz})ᵗ`.
    /// Real `z` gives the modular group; `z = i` is the map in the KMS
    /// condition.
    pub fn modular(&self, a: &Element, z: C64) -> Result<Element> {
        let i = C64::new(0.0, 1.0);
        let mut out = Element::zero();
        for (x, m) in &a.blocks {
            let l = self.l_matrix(x)?;
            let q = self.q_matrix(x)?;
            let lp = linalg::positive_power(&l, -i * z, self.tol.rank)?;
            let qp = linalg::positive_power(&q, i * z, self.tol.rank)?;
            out = out.add(&Element::block(x.clone(), lp * m * qp.transpose()));
        }
        Ok(out)
    }

    /// `σ_t` for real `t` as a matrix on the flat basis.
    pub fn modular_map(&self, t: f64) -> Result<CMat> {
        let basis = self.basis();
        let mut m = CMat::zeros(basis.len(), basis.len());
        for (j, b) in basis.iter().enumerate() {
            let v = self.flatten(&self.modular(&self.basis_element(b), real(t))?);
            for (i, z) in v.into_iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        Ok(m)
    }

    /// `max |ω(σ_i(a) b*) − ω(b* a)|` over basis pairs of equal label with
    /// level at most `min(N, 2)`; pairs of different labels vanish on both
    /// sides.
    pub fn kms_check(&self) -> Result<f64> {
        let max = self.level.min(2);
        let mut res: f64 = 0.0;
        for x in self.labels.iter().filter(|x| x.len() <= max) {
            let elems: Vec<Element> = self
                .basis()
                .into_iter()
                .filter(|i| &i.label == x)
                .map(|i| self.basis_element(&i))
                .collect();
            let sig: Vec<Element> =
                elems.iter().map(|e| self.modular(e, C64::new(0.0, 1.0))).collect::<Result<_>>()?;
            let stars: Vec<Element> = elems.iter().map(|e| self.star(e)).collect::<Result<_>>()?;
            for (a, sa) in elems.iter().zip(&sig) {
                for bs in &stars {
                    let lhs = self.omega_product(sa, bs);
                    let rhs = self.omega_product(bs, a);
                    res = res.max((lhs - rhs).norm());
                }
            }
        }
        Ok(res)
    }

    /// `max |ω(ab) − ω(ba)|` over basis pairs of level at most `max`.
    pub fn trace_residual(&self, max: usize) -> f64 {
        let elems: Vec<Element> = self.basis_up_to(max).iter().map(|i| self.basis_element(i)).collect();
        let mut res: f64 = 0.0;
        for a in &elems {
            for b in &elems {
                res = res.max((self.omega_product(a, b) - self.omega_product(b, a)).norm());
            }
        }
        res
    }

    /// Build the coefficient algebra of one side (the linking algebra of that
    /// realization with itself), needed by the coactions.
    pub fn attach_coefficients(&mut self, side: Side) -> Result<()> {
        let r = match side {
            Side::Source => self.source.clone(),
            Side::Target => self.target.clone(),
        };
        let alg = Arc::new(LinkingAlgebra::build(r.clone(), r, self.level)?);
        match side {
            Side::Source => self.source_coefficients = Some(alg),
            Side::Target => self.target_coefficients = Some(alg),
        }
        Ok(())
    }

    pub fn coefficients(&self, side: Side) -> Result<&Arc<LinkingAlgebra>> {
        let c = match side {
            Side::Source => &self.source_coefficients,
            Side::Target => &self.target_coefficients,
        };
        c.as_ref().ok_or(Error::SideNotBuilt(side.name()))
    }

    /// `δ(e_{ab}) = Σ_k e_{ak} ⊗ u_{kb}` (source) or
    /// `δ₂(e_{ab}) = Σ_k u'_{ak} ⊗ e_{kb}` (target), as a two-leg tensor.
    pub fn coaction(&self, side: Side, a: &Element) -> Result<TensorElement> {
        let coef = self.coefficients(side)?;
        let mut out = TensorElement::default();
        for (x, m) in &a.blocks {
            let (r, c) = self.dims(x)?;
            for p in 0..r {
                for q in 0..c {
                    let v = m[(p, q)];
                    if v == ZERO {
                        continue;
                    }
                    match side {
                        Side::Source => {
                            for k in 0..c {
                                let i = self.flat_index(&BasisIndex { label: x.clone(), row: p, col: k });
                                let j = coef.flat_index(&BasisIndex { label: x.clone(), row: k, col: q });
                                out.push(vec![i, j], v);
                            }
                        }
                        Side::Target => {
                            for k in 0..r {
                                let i = coef.flat_index(&BasisIndex { label: x.clone(), row: p, col: k });
                                let j = self.flat_index(&BasisIndex { label: x.clone(), row: k, col: q });
                                out.push(vec![i, j], v);
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    fn unflatten(&self, i: usize) -> BasisIndex {
        let (x, off) = self
            .offsets
            .iter()
            .filter(|(_, &o)| o <= i)
            .max_by_key(|(_, &o)| o)
            .expect("index in range");
        let c = self.dims[x].1;
        BasisIndex { label: x.clone(), row: (i - off) / c, col: (i - off) % c }
    }

    /// Apply a coaction to one leg of a tensor, inserting the new leg after
    /// it (source side) or before it (target side).
    fn coact_leg(&self, side: Side, t: &TensorElement, leg: usize) -> Result<TensorElement> {
        let mut out = TensorElement::default();
        for (key, &v) in &t.terms {
            let e = self.basis_element(&self.unflatten(key[leg]));
            for (k2, w) in &self.coaction(side, &e)?.terms {
                let mut nk = key[..leg].to_vec();
                nk.extend_from_slice(k2);
                nk.extend_from_slice(&key[leg + 1..]);
                out.push(nk, v * w);
            }
        }
        Ok(out)
    }

    /// Product of two-leg tensors, leg by leg.
    fn tensor_product(
        left: &LinkingAlgebra,
        right: &LinkingAlgebra,
        s: &TensorElement,
        t: &TensorElement,
    ) -> Result<TensorElement> {
        let mut out = TensorElement::default();
        for (k1, v1) in &s.terms {
            for (k2, v2) in &t.terms {
                let a = left.flatten(&left.product(
                    &left.basis_element(&left.unflatten(k1[0])),
                    &left.basis_element(&left.unflatten(k2[0])),
                )?);
                let b = right.flatten(&right.product(
                    &right.basis_element(&right.unflatten(k1[1])),
                    &right.basis_element(&right.unflatten(k2[1])),
                )?);
                for (i, x) in a.iter().enumerate().filter(|(_, x)| **x != ZERO) {
                    for (j, y) in b.iter().enumerate().filter(|(_, y)| **y != ZERO) {
                        out.push(vec![i, j], v1 * v2 * x * y);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Coassociativity, invariance and multiplicativity of one coaction.
    /// Coassociativity and invariance run over all basis elements; products
    /// over pairs of level at most 1.
    pub fn check_coaction(&self, side: Side) -> Result<CoactionReport> {
        let coef = self.coefficients(side)?;
        let coef_self = LinkingAlgebra {
            source_coefficients: Some(coef.clone()),
            target_coefficients: Some(coef.clone()),
            ..coef.shallow()
        };
        let (alg_leg, coef_leg) = match side {
            Side::Source => (0, 1),
            Side::Target => (1, 0),
        };
        let mut coassociativity: f64 = 0.0;
        let mut invariance: f64 = 0.0;
        for i in self.basis() {
            let e = self.basis_element(&i);
            let d = self.coaction(side, &e)?;
            let lhs = self.coact_leg(side, &d, alg_leg)?;
            // Δ applied to the coefficient leg, same ordering of legs
            let rhs = match side {
                Side::Source => coef_self.coact_leg(Side::Source, &d, coef_leg)?,
                Side::Target => coef_self.coact_leg(Side::Target, &d, coef_leg)?,
            };
            coassociativity = coassociativity.max(lhs.distance(&rhs));
            // (ι⊗h)δ(e) = ω(e) 1
            let mut inv = vec![ZERO; self.dim()];
            for (k, v) in &d.terms {
                let h = coef.omega(&coef.basis_element(&coef.unflatten(k[coef_leg])));
                inv[k[alg_leg]] += v * h;
            }
            inv[0] -= self.omega(&e);
            invariance = invariance.max(inv.iter().fold(0.0, |m, z| m.max(z.norm())));
        }
        let mut multiplicativity: f64 = 0.0;
        let low = self.basis_up_to(1);
        for i in &low {
            for j in &low {
                let (e, f) = (self.basis_element(i), self.basis_element(j));
                let lhs = self.coaction(side, &self.product(&e, &f)?)?;
                let (de, df) = (self.coaction(side, &e)?, self.coaction(side, &f)?);
                let rhs = match side {
                    Side::Source => Self::tensor_product(self, coef, &de, &df)?,
                    Side::Target => Self::tensor_product(coef, self, &de, &df)?,
                };
                multiplicativity = multiplicativity.max(lhs.distance(&rhs));
            }
        }
        Ok(CoactionReport { side, coassociativity, invariance, multiplicativity })
    }

    /// `(δ₂⊗ι)δ(e) − (ι⊗δ)δ₂(e)` on basis elements of level at most `max`.
    pub fn commutation_residual(&self, max: usize) -> Result<f64> {
        let mut res: f64 = 0.0;
        for i in self.basis_up_to(max) {
            let e = self.basis_element(&i);
            let a = self.coact_leg(Side::Target, &self.coaction(Side::Source, &e)?, 0)?;
            let b = self.coact_leg(Side::Source, &self.coaction(Side::Target, &e)?, 1)?;
            res = res.max(a.distance(&b));
        }
        Ok(res)
    }

    fn shallow(&self) -> LinkingAlgebra {
        LinkingAlgebra {
            source: self.source.clone(),
            target: self.target.clone(),
            level: self.level,
            labels: self.labels.clone(),
            dims: self.dims.clone(),
            offsets: self.offsets.clone(),
            channels: self.channels.clone(),
            conjugations: self.conjugations.clone(),
            source_coefficients: None,
            target_coefficients: None,
            tol: self.tol,
        }
    }

    /// Add `delta` to one transported channel coefficient, for negative
    /// controls of the relation checks.
    pub fn corrupt_channel(&mut self, y: &Word, z: &Word, delta: f64) -> Result<()> {
        let list = self
            .channels
            .get_mut(&(y.clone(), z.clone()))
            .ok_or(Error::LevelCapExceeded { level: y.len() + z.len(), cap: self.level })?;
        let ch = list.first_mut().ok_or_else(|| Error::ZeroSpace(format!("{y} x {z}")))?;
        ch.target[(0, 0)] += real(delta);
        Ok(())
    }
}
