//! Concrete realizations of the representation categories of `A_o(F)` and
//! `A_u(F)`: cups, Jones-Wenzl projections, carrier spaces of irreducibles,
//! fusion isometries, 6j-symbols and transport of diagrams between
//! monoidally equivalent realizations.
//!
//! Morphisms are formal combinations of planar diagrams, so the fiber
//! functor between two realizations with the same zigzag scalar is simply
//! re-evaluation of the same combination.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::config::Tolerances;
use crate::diagram::{CupTable, Diagram, Morphism};
use crate::error::{Error, Result};
use crate::fmatrix::{self, FMatrix, Sign};
use crate::linalg::{self, frob, real, relative, CMat, C64, ZERO};
pub use crate::word::Variant;
use crate::word::{Letter, Word};

/// Relative norm below which a candidate fusion map is considered linearly
/// dependent on the ones already accepted.
const DEPENDENCE_CUTOFF: f64 = 1e-7;

#[derive(Debug)]
pub struct JwProjection {
    pub word: Word,
    /// projection onto the carrier of the irreducible labelled by `word`
    pub matrix: CMat,
    /// orthonormal basis of the carrier, as columns
    pub basis: CMat,
    pub rank: usize,
    /// `‖P² − P‖`
    pub residual: f64,
}

/// An orthonormal basis of a morphism space, expressed over diagrams.
#[derive(Debug, Clone)]
pub struct MorphismSpace {
    pub source: Word,
    pub target: Word,
    pub diagrams: Vec<Diagram>,
    /// column `k` holds the diagram coefficients of basis element `k`
    pub coefficients: CMat,
    /// basis matrices, orthonormal for `Tr(AᴴB)`
    pub basis: Vec<CMat>,
    pub singular_values: Vec<f64>,
}

impl MorphismSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_morphism(&self, k: usize) -> Morphism {
        let terms = self
            .diagrams
            .iter()
            .enumerate()
            .map(|(i, d)| (self.coefficients[(i, k)], d.clone()))
            .collect();
        Morphism { source: self.source.clone(), target: self.target.clone(), terms }.simplified()
    }
}

/// An isometry `U_x → U_y ⊗ U_z` between irreducible carriers, given both as a
/// diagram combination and in carrier coordinates.
#[derive(Debug, Clone)]
pub struct FusionMap {
    pub label: Word,
    pub left: Word,
    pub right: Word,
    pub morphism: Morphism,
    /// `d_y d_z × d_x` matrix in the carrier bases (left factor most significant)
    pub coords: CMat,
}

#[derive(Debug, Clone)]
pub struct Channel {
    pub label: Word,
    pub maps: Vec<FusionMap>,
}

#[derive(Debug, Clone)]
pub struct Fusion {
    pub left: Word,
    pub right: Word,
    pub channels: Vec<Channel>,
    /// `max ‖S*S' − δ‖` over all pairs of maps
    pub orthogonality_residual: f64,
    /// `‖Σ S S* − 1‖`
    pub completeness_residual: f64,
}

impl Fusion {
    pub fn multiplicity(&self, label: &Word) -> usize {
        self.channels.iter().find(|c| &c.label == label).map_or(0, |c| c.maps.len())
    }

    pub fn maps(&self) -> impl Iterator<Item = &FusionMap> {
        self.channels.iter().flat_map(|c| c.maps.iter())
    }
}

type Triple = (Word, Word, Word);

#[derive(Debug)]
pub struct Realization {
    variant: Variant,
    f: FMatrix,
    tol: Tolerances,
    beta: f64,
    qdim: f64,
    cap: usize,
    cup_ab: Vec<(usize, usize, C64)>,
    cup_ba: Vec<(usize, usize, C64)>,
    jw: RwLock<HashMap<Word, Arc<JwProjection>>>,
    channels: RwLock<HashMap<Triple, Arc<Vec<FusionMap>>>>,
    fusions: RwLock<HashMap<(Word, Word), Arc<Fusion>>>,
}

fn sparse(v: &CMat, n: usize) -> Vec<(usize, usize, C64)> {
    (0..n * n)
        .filter(|&k| v[(k, 0)] != ZERO)
        .map(|k| (k / n, k % n, v[(k, 0)]))
        .collect()
}

fn cached<K, V, F>(lock: &RwLock<HashMap<K, Arc<V>>>, key: &K, make: F) -> Result<Arc<V>>
where
    K: std::hash::Hash + Eq + Clone,
    F: FnOnce() -> Result<V>,
{
    if let Some(v) = lock.read().expect("cache lock poisoned").get(key) {
        return Ok(v.clone());
    }
    // computed outside the lock; a concurrent duplicate computation yields the same data
    let v = Arc::new(make()?);
    let mut w = lock.write().expect("cache lock poisoned");
    Ok(w.entry(key.clone()).or_insert(v).clone())
}

impl CupTable for Realization {
    fn dim(&self) -> usize {
        self.f.n()
    }

    fn cup_entries(&self, left: Letter, right: Letter) -> &[(usize, usize, C64)] {
        match (self.variant, left, right) {
            (Variant::Ao, Letter::A, Letter::A) => &self.cup_ab,
            (Variant::Au, Letter::A, Letter::B) => &self.cup_ab,
            (Variant::Au, Letter::B, Letter::A) => &self.cup_ba,
            _ => &[],
        }
    }
}

/// Default maximal level (or word length) for a realization.
pub fn default_cap(variant: Variant, n: usize) -> usize {
    match variant {
        Variant::Ao if n <= 2 => 6,
        _ => 4,
    }
}

impl Realization {
    /// Realization of `A_o(F)`; `F` is normalized to `F F̄ = ±1` first.
    pub fn ao(f: &FMatrix, tol: &Tolerances) -> Result<Realization> {
        tol.validate()?;
        let g = fmatrix::normalize_ao(f, tol)?;
        let p = fmatrix::validate_ao(&g, tol)?;
        let n = g.n();
        let delta = p.trace;
        // t̂ = Σ e_i ⊗ F e_i / √δ
        let t = CMat::from_fn(n * n, 1, |k, _| g.matrix()[(k % n, k / n)] / delta.sqrt());
        Ok(Self::assemble(Variant::Ao, g, *tol, p.beta, delta, sparse(&t, n), Vec::new()))
    }

    /// Realization of `A_u(F)`; `F` is balanced to `Tr(F*F) = Tr((F*F)^{-1})` first.
    pub fn au(f: &FMatrix, tol: &Tolerances) -> Result<Realization> {
        tol.validate()?;
        let g = fmatrix::normalize_au(f, tol)?;
        let p = fmatrix::validate_au(&g, tol)?;
        let n = g.n();
        let cval = g.trace();
        let ginv = linalg::inverse(&g.conj(), tol.rank)?;
        let t = CMat::from_fn(n * n, 1, |k, _| g.matrix()[(k % n, k / n)] / cval.sqrt());
        let s = CMat::from_fn(n * n, 1, |k, _| ginv[(k % n, k / n)] / cval.sqrt());
        Ok(Self::assemble(Variant::Au, g, *tol, 1.0 / cval, p.qdim, sparse(&t, n), sparse(&s, n)))
    }

    pub fn new(variant: Variant, f: &FMatrix, tol: &Tolerances) -> Result<Realization> {
        match variant {
            Variant::Ao => Self::ao(f, tol),
            Variant::Au => Self::au(f, tol),
        }
    }

    fn assemble(
        variant: Variant,
        f: FMatrix,
        tol: Tolerances,
        beta: f64,
        qdim: f64,
        cup_ab: Vec<(usize, usize, C64)>,
        cup_ba: Vec<(usize, usize, C64)>,
    ) -> Realization {
        let cap = default_cap(variant, f.n());
        Realization {
            variant,
            f,
            tol,
            beta,
            qdim,
            cap,
            cup_ab,
            cup_ba,
            jw: RwLock::new(HashMap::new()),
            channels: RwLock::new(HashMap::new()),
            fusions: RwLock::new(HashMap::new()),
        }
    }

    pub fn with_level_cap(mut self, cap: usize) -> Realization {
        self.cap = cap;
        self
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// The normalized defining matrix.
    pub fn f(&self) -> &FMatrix {
        &self.f
    }

    pub fn n(&self) -> usize {
        self.f.n()
    }

    /// Scalar of a zigzag built from two normalized cups.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Quantum dimension of the fundamental object.
    pub fn qdim(&self) -> f64 {
        self.qdim
    }

    pub fn sign(&self) -> Option<Sign> {
        match self.variant {
            Variant::Ao => Some(if self.beta > 0.0 { Sign::Plus } else { Sign::Minus }),
            Variant::Au => None,
        }
    }

    pub fn level_cap(&self) -> usize {
        self.cap
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    fn check_cap(&self, len: usize) -> Result<()> {
        if len > self.cap {
            Err(Error::LevelCapExceeded { level: len, cap: self.cap })
        } else {
            Ok(())
        }
    }

    /// The normalized cup joining `left` and `right`, as a vector in `ℂⁿ ⊗ ℂⁿ`.
    pub fn cup_vector(&self, left: Letter, right: Letter) -> Option<CMat> {
        let n = self.n();
        let e = self.cup_entries(left, right);
        if e.is_empty() {
            return None;
        }
        let mut v = CMat::zeros(n * n, 1);
        for &(i, j, z) in e {
            v[(i * n + j, 0)] = z;
        }
        Some(v)
    }

    pub fn cup_diagram(&self, left: Letter, right: Letter) -> Result<Diagram> {
        Diagram::new(Word::empty(), Word(vec![left, right]), vec![1, 0], self.variant)
    }

    /// Fail with `BetaMismatch` unless both realizations share variant and zigzag scalar.
    pub fn check_compatible(&self, other: &Realization) -> Result<()> {
        if self.variant != other.variant {
            return Err(Error::VariantMismatch);
        }
        if (self.beta - other.beta).abs() > self.tol.check * self.beta.abs().max(1.0) {
            return Err(Error::BetaMismatch(self.beta, other.beta));
        }
        Ok(())
    }

    /// Evaluate a diagram combination in another realization with the same
    /// zigzag scalar (the fiber functor between the two categories).
    pub fn transport(&self, morphism: &Morphism, target: &Realization) -> Result<CMat> {
        self.check_compatible(target)?;
        Ok(morphism.matrix(target))
    }

    pub fn matrix(&self, morphism: &Morphism) -> CMat {
        morphism.matrix(self)
    }

    /// Jones-Wenzl projection of the word `w`: identity minus the projection
    /// onto the sum of the ranges of all cup insertions.
    pub fn jw(&self, w: &Word) -> Result<Arc<JwProjection>> {
        self.check_cap(w.len())?;
        cached(&self.jw, w, || self.compute_jw(w))
    }

    fn compute_jw(&self, w: &Word) -> Result<JwProjection> {
        let n = self.n();
        let len = w.len();
        let dim = n.pow(len as u32);
        let letters = w.letters();
        let mut blocks: Vec<CMat> = Vec::new();
        for i in 0..len.saturating_sub(1) {
            if !self.variant.pairable(letters[i], letters[i + 1]) {
                continue;
            }
            let pre = Word(letters[..i].to_vec());
            let post = Word(letters[i + 2..].to_vec());
            let d = Diagram::identity(&pre)
                .tensor(&self.cup_diagram(letters[i], letters[i + 1])?)
                .tensor(&Diagram::identity(&post));
            blocks.push(d.matrix(self));
        }
        let mut matrix = CMat::identity(dim, dim);
        if !blocks.is_empty() {
            let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
            let mut stack = CMat::zeros(dim, cols);
            let mut off = 0;
            for b in &blocks {
                stack.columns_mut(off, b.ncols()).copy_from(b);
                off += b.ncols();
            }
            let u = linalg::orthonormal_range(&stack, self.tol.rank);
            matrix -= &u * u.adjoint();
        }
        let residual = frob(&(&matrix * &matrix - &matrix)).max(frob(&(&matrix - matrix.adjoint())));
        if residual > self.tol.check {
            return Err(Error::NumericalDegeneracy(format!(
                "projection for {w} has residual {residual:.3e}"
            )));
        }
        let rank = linalg::rank(&matrix, self.tol.rank);
        let basis = linalg::pivoted_gram_schmidt(&matrix, rank, 1e-8);
        if basis.ncols() != rank {
            return Err(Error::NumericalDegeneracy(format!(
                "carrier basis for {w} has {} vectors, expected {rank}",
                basis.ncols()
            )));
        }
        Ok(JwProjection { word: w.clone(), matrix, basis, rank, residual })
    }

    /// Dimension of the carrier of the irreducible labelled by `w`.
    pub fn carrier_dim(&self, w: &Word) -> Result<usize> {
        Ok(self.jw(w)?.rank)
    }

    /// Orthonormal basis of `Mor(U^source, U^target)` spanned by diagrams.
    ///
    /// The space lives in matrices of size `n^{|target|} × n^{|source|}`; the
    /// total number of boundary points is limited to twice the level cap.
    pub fn mor_basis(&self, source: &Word, target: &Word) -> Result<MorphismSpace> {
        let points = source.len() + target.len();
        if points > 2 * self.cap {
            return Err(Error::LevelCapExceeded { level: points, cap: 2 * self.cap });
        }
        let diagrams = Diagram::enumerate(source, target, self.variant);
        let n = self.n();
        let rows = n.pow(target.len() as u32);
        let cols = n.pow(source.len() as u32);
        let empty = MorphismSpace {
            source: source.clone(),
            target: target.clone(),
            diagrams: diagrams.clone(),
            coefficients: CMat::zeros(diagrams.len(), 0),
            basis: Vec::new(),
            singular_values: Vec::new(),
        };
        if diagrams.is_empty() {
            return Ok(empty);
        }
        let mut stack = CMat::zeros(rows * cols, diagrams.len());
        for (k, d) in diagrams.iter().enumerate() {
            for (i, j, v) in d.entries(self) {
                stack[(i * cols + j, k)] += v;
            }
        }
        let (u, s, vt) = linalg::svd_sorted(&stack);
        let cutoff = self.tol.rank * s[0].max(1.0);
        let r = s.iter().filter(|&&x| x > cutoff).count();
        let coefficients = CMat::from_fn(diagrams.len(), r, |i, k| vt[(k, i)].conj() / s[k]);
        let basis = (0..r)
            .map(|k| CMat::from_fn(rows, cols, |i, j| u[(i * cols + j, k)]))
            .collect();
        Ok(MorphismSpace { coefficients, basis, singular_values: s, ..empty })
    }

    /// Orthonormal basis of `Mor(U^source, U^target)` obtained by saturating
    /// the identity under cup insertions and their adjoints, without any
    /// diagram bookkeeping. Used as an independent cross-check of
    /// [`Realization::mor_basis`].
    pub fn saturated_mor_basis(&self, source: &Word, target: &Word) -> Result<Vec<CMat>> {
        let max_len = source.len().max(target.len());
        self.check_cap(max_len)?;
        let n = self.n();
        let cols = n.pow(source.len() as u32);
        let mut spaces: HashMap<Word, CMat> = HashMap::new();
        spaces.insert(source.clone(), linalg::vec_of(&CMat::identity(cols, cols)));
        let letters = [Letter::A, Letter::B];
        let pairs: Vec<(Letter, Letter)> = letters
            .iter()
            .flat_map(|&a| letters.iter().map(move |&b| (a, b)))
            .filter(|&(a, b)| self.variant.pairable(a, b))
            .collect();
        let total = |sp: &HashMap<Word, CMat>| sp.values().map(|m| m.ncols()).sum::<usize>();
        let mut quiet_passes = 0;
        while quiet_passes < 2 {
            let before = total(&spaces);
            let mut words: Vec<Word> = spaces.keys().cloned().collect();
            words.sort();
            for w in words {
                let span = spaces[&w].clone();
                let mut moves: Vec<(Word, CMat)> = Vec::new();
                let wl = w.letters();
                for i in 0..=w.len() {
                    for &(a, b) in &pairs {
                        let mut nl = wl[..i].to_vec();
                        nl.push(a);
                        nl.push(b);
                        nl.extend_from_slice(&wl[i..]);
                        if nl.len() > max_len {
                            continue;
                        }
                        let d = Diagram::identity(&Word(wl[..i].to_vec()))
                            .tensor(&self.cup_diagram(a, b)?)
                            .tensor(&Diagram::identity(&Word(wl[i..].to_vec())));
                        moves.push((Word(nl), d.matrix(self)));
                    }
                }
                for i in 0..w.len().saturating_sub(1) {
                    if !self.variant.pairable(wl[i], wl[i + 1]) {
                        continue;
                    }
                    let mut nl = wl[..i].to_vec();
                    nl.extend_from_slice(&wl[i + 2..]);
                    let d = Diagram::identity(&Word(wl[..i].to_vec()))
                        .tensor(&self.cup_diagram(wl[i], wl[i + 1])?)
                        .tensor(&Diagram::identity(&Word(wl[i + 2..].to_vec())));
                    moves.push((Word(nl), d.matrix(self).adjoint()));
                }
                for (nw, op) in moves {
                    let rows_in = n.pow(w.len() as u32);
                    let mut images = CMat::zeros(op.nrows() * cols, span.ncols());
                    for k in 0..span.ncols() {
                        let m = CMat::from_fn(rows_in, cols, |i, j| span[(i * cols + j, k)]);
                        let img = &op * m;
                        images.set_column(k, &linalg::vec_of(&img).column(0));
                    }
                    let merged = match spaces.get(&nw) {
                        Some(old) => {
                            let mut both = CMat::zeros(old.nrows(), old.ncols() + images.ncols());
                            both.columns_mut(0, old.ncols()).copy_from(old);
                            both.columns_mut(old.ncols(), images.ncols()).copy_from(&images);
                            both
                        }
                        None => images,
                    };
                    spaces.insert(nw, linalg::orthonormal_range(&merged, self.tol.rank));
                }
            }
            if total(&spaces) == before {
                quiet_passes += 1;
            } else {
                quiet_passes = 0;
            }
        }
        let rows = n.pow(target.len() as u32);
        Ok(match spaces.get(target) {
            Some(sp) => (0..sp.ncols())
                .map(|k| CMat::from_fn(rows, cols, |i, j| sp[(i * cols + j, k)]))
                .collect(),
            None => Vec::new(),
        })
    }

    /// Carrier coordinates `(V_y ⊗ V_z)ᴴ M V_x` of a morphism `x → y·z`.
    pub fn coords2(&self, m: &Morphism, y: &Word, z: &Word, x: &Word) -> Result<CMat> {
        if m.target != y.concat(z) || &m.source != x {
            return Err(Error::InvalidInput("morphism type does not match labels".into()));
        }
        let mv = self.apply_to_carrier(m, x)?;
        self.project_target(&mv, y, z)
    }

    /// `M V_x`: a morphism applied to the carrier basis of its source label.
    fn apply_to_carrier(&self, m: &Morphism, x: &Word) -> Result<CMat> {
        let vx = &self.jw(x)?.basis;
        let dx = vx.ncols();
        let mut mv = CMat::zeros(self.n().pow(m.target.len() as u32), dx);
        for (coef, d) in &m.terms {
            for (i, j, v) in d.entries(self) {
                let w = coef * v;
                for q in 0..dx {
                    mv[(i, q)] += w * vx[(j, q)];
                }
            }
        }
        Ok(mv)
    }

    /// `(V_y ⊗ V_z)ᴴ A` for `A` with rows in `(ℂⁿ)^{⊗|y|+|z|}`.
    fn project_target(&self, mv: &CMat, y: &Word, z: &Word) -> Result<CMat> {
        let vy = &self.jw(y)?.basis;
        let vz = &self.jw(z)?.basis;
        let n = self.n();
        let ny = n.pow(y.len() as u32);
        let nz = n.pow(z.len() as u32);
        let dx = mv.ncols();
        let (dy, dz) = (vy.ncols(), vz.ncols());
        let vz_conj = linalg::conj(vz);
        let vy_adj = vy.adjoint();
        let mut out = CMat::zeros(dy * dz, dx);
        for q in 0..dx {
            let block = CMat::from_fn(ny, nz, |a, b| mv[(a * nz + b, q)]);
            let c = &vy_adj * block * &vz_conj;
            for a in 0..dy {
                for b in 0..dz {
                    out[(a * dz + b, q)] = c[(a, b)];
                }
            }
        }
        Ok(out)
    }

    /// Orthonormal fusion isometries `U_x → U_y ⊗ U_z`.
    ///
    /// Candidates are the cap-free diagrams `x → y·z`, processed in
    /// enumeration order by Gram-Schmidt for the inner product
    /// `Tr(AᴴB)/d_x`. The inner products are categorical scalars, so the
    /// resulting diagram coefficients, and with them the gauge, agree across
    /// realizations with equal zigzag scalar.
    pub fn fusion_channel(&self, x: &Word, y: &Word, z: &Word) -> Result<Arc<Vec<FusionMap>>> {
        self.check_cap(x.len())?;
        self.check_cap(y.len())?;
        self.check_cap(z.len())?;
        if !x.is_empty() {
            self.check_cap(y.len() + z.len())?;
        }
        let key = (x.clone(), y.clone(), z.clone());
        cached(&self.channels, &key, || self.compute_channel(x, y, z))
    }

    fn compute_channel(&self, x: &Word, y: &Word, z: &Word) -> Result<Vec<FusionMap>> {
        let target = y.concat(z);
        let dx = self.carrier_dim(x)? as f64;
        let diagrams = Diagram::enumerate_cap_free(x, &target, self.variant);
        let mut accepted: Vec<(Morphism, CMat)> = Vec::new();
        for d in diagrams {
            let m = Morphism::from_diagram(d);
            let raw = self.apply_to_carrier(&m, x)?;
            // size of the candidate before projecting onto the target carriers
            let scale = frob(&raw) / dx.sqrt();
            let c = self.project_target(&raw, y, z)?;
            let mut res_m = m.clone();
            let mut res_c = c.clone();
            for (am, ac) in &accepted {
                let p = linalg::hs(ac, &res_c) / real(dx);
                res_c -= ac * p;
                res_m = res_m.add(&am.scale(-p))?;
            }
            // reorthogonalize once against accumulated rounding
            for (am, ac) in &accepted {
                let p = linalg::hs(ac, &res_c) / real(dx);
                res_c -= ac * p;
                res_m = res_m.add(&am.scale(-p))?;
            }
            let nrm = frob(&res_c) / dx.sqrt();
            if nrm <= DEPENDENCE_CUTOFF * scale {
                continue;
            }
            let s = real(1.0 / nrm);
            accepted.push((res_m.scale(s), res_c * s));
        }
        let maps: Vec<FusionMap> = accepted
            .into_iter()
            .map(|(morphism, coords)| FusionMap {
                label: x.clone(),
                left: y.clone(),
                right: z.clone(),
                morphism,
                coords,
            })
            .collect();
        for s in &maps {
            let r = linalg::isometry_residual(&s.coords);
            if r > self.tol.check {
                return Err(Error::NumericalDegeneracy(format!(
                    "fusion map {x} -> {y}{z} is not isometric: {r:.3e}"
                )));
            }
        }
        Ok(maps)
    }

    /// Complete decomposition of `U_y ⊗ U_z` into irreducibles.
    pub fn fusion(&self, y: &Word, z: &Word) -> Result<Arc<Fusion>> {
        self.check_cap(y.len() + z.len())?;
        cached(&self.fusions, &(y.clone(), z.clone()), || self.compute_fusion(y, z))
    }

    fn compute_fusion(&self, y: &Word, z: &Word) -> Result<Fusion> {
        let total = y.len() + z.len();
        let mut channels = Vec::new();
        for len in (total % 2..=total).step_by(2) {
            for x in self.variant.labels_of_length(len) {
                let maps = self.fusion_channel(&x, y, z)?;
                if !maps.is_empty() {
                    channels.push(Channel { label: x, maps: (*maps).clone() });
                }
            }
        }
        let dyz = self.carrier_dim(y)? * self.carrier_dim(z)?;
        let mut sum = CMat::zeros(dyz, dyz);
        let all: Vec<&FusionMap> = channels.iter().flat_map(|c| c.maps.iter()).collect();
        let mut orthogonality_residual: f64 = 0.0;
        for (i, a) in all.iter().enumerate() {
            sum += &a.coords * a.coords.adjoint();
            for b in &all[i..] {
                let g = a.coords.adjoint() * &b.coords;
                let target = if std::ptr::eq(*a, *b) {
                    CMat::identity(g.nrows(), g.ncols())
                } else {
                    CMat::zeros(g.nrows(), g.ncols())
                };
                orthogonality_residual = orthogonality_residual.max(frob(&(g - target)));
            }
        }
        let completeness_residual = frob(&(sum - CMat::identity(dyz, dyz)));
        if self.variant == Variant::Ao {
            let (a, b) = (y.len(), z.len());
            for ch in &channels {
                let l = ch.label.len();
                let allowed = l >= a.abs_diff(b) && l <= a + b && (a + b - l) % 2 == 0;
                if ch.maps.len() != usize::from(allowed) {
                    return Err(Error::MultiplicityMismatch(format!(
                        "level {l} occurs {} times in {a} x {b}",
                        ch.maps.len()
                    )));
                }
            }
            let expected = a.min(b) + 1;
            if channels.len() != expected {
                return Err(Error::MultiplicityMismatch(format!(
                    "{} channels in {a} x {b}, expected {expected}",
                    channels.len()
                )));
            }
        }
        if completeness_residual > self.tol.check || orthogonality_residual > self.tol.check {
            return Err(Error::MultiplicityMismatch(format!(
                "fusion {y} x {z} incomplete: completeness {completeness_residual:.3e}, orthogonality {orthogonality_residual:.3e}"
            )));
        }
        Ok(Fusion { left: y.clone(), right: z.clone(), channels, orthogonality_residual, completeness_residual })
    }

    /// Coordinates `T` (a `d_x × d_x̄` matrix) of the unit vector spanning
    /// `Mor(ε, x ⊗ x̄)`.
    pub fn contragredient(&self, x: &Word) -> Result<CMat> {
        let xb = self.variant.conj(x);
        let maps = self.fusion_channel(&Word::empty(), x, &xb)?;
        let m = maps.first().ok_or_else(|| Error::ZeroSpace(format!("Mor(e, {x} {xb})")))?;
        Ok(linalg::unvec(&m.coords, self.carrier_dim(x)?, self.carrier_dim(&xb)?))
    }

    /// Positive matrix `Q_x` on the carrier of `x`, normalized so that
    /// `Tr(Q_x) = Tr(Q_x^{-1})`.
    pub fn q_matrix(&self, x: &Word) -> Result<CMat> {
        let t = self.contragredient(x)?;
        let g = &t * t.adjoint();
        let inv = linalg::positive_power(&g, real(-1.0), self.tol.rank)?;
        let scale = (inv.trace().re / g.trace().re).sqrt();
        Ok(g * real(scale))
    }

    /// Quantum dimension `Tr(Q_x)` of the irreducible `x`.
    pub fn irrep_qdim(&self, x: &Word) -> Result<f64> {
        Ok(self.q_matrix(x)?.trace().re)
    }

    /// Unitary change of basis between `(S ⊗ 1)T` and `(1 ⊗ S)T` bases of
    /// `Mor(a, x ⊗ y ⊗ z)`; rows are indexed by the intermediate channels of
    /// `x ⊗ y`, columns by those of `y ⊗ z`.
    pub fn sixj(&self, a: &Word, x: &Word, y: &Word, z: &Word) -> Result<CMat> {
        self.check_cap(x.len() + y.len() + z.len())?;
        let (dx, dz) = (self.carrier_dim(x)?, self.carrier_dim(z)?);
        let da = self.carrier_dim(a)? as f64;
        let mut left_basis = Vec::new();
        for s1 in self.fusion(x, y)?.maps() {
            for s2 in self.fusion_channel(a, &s1.label, z)?.iter() {
                left_basis.push(linalg::kron(&s1.coords, &CMat::identity(dz, dz)) * &s2.coords);
            }
        }
        let mut right_basis = Vec::new();
        for s1 in self.fusion(y, z)?.maps() {
            for s2 in self.fusion_channel(a, x, &s1.label)?.iter() {
                right_basis.push(linalg::kron(&CMat::identity(dx, dx), &s1.coords) * &s2.coords);
            }
        }
        if left_basis.is_empty() {
            return Err(Error::ZeroSpace(format!("Mor({a}, {x} {y} {z})")));
        }
        if left_basis.len() != right_basis.len() {
            return Err(Error::NumericalDegeneracy("6j bases have different sizes".into()));
        }
        Ok(CMat::from_fn(left_basis.len(), right_basis.len(), |i, j| {
            linalg::hs(&left_basis[i], &right_basis[j]) / real(da)
        }))
    }

    /// Rank sequence of the Jones-Wenzl projections `P_0 … P_max` (levels of `A_o`).
    pub fn level_ranks(&self, max: usize) -> Result<Vec<usize>> {
        (0..=max).map(|l| self.carrier_dim(&Word::level(l))).collect()
    }

    /// `‖M − M'‖` relative check helper shared by tests and reports.
    pub fn residual(&self, a: &CMat, b: &CMat) -> f64 {
        relative(frob(&(a - b)), frob(a).max(frob(b)))
    }
}

/// `d_{k+1} = n d_k − d_{k−1}` with `d_0 = 1`, `d_1 = n`.
pub fn chebyshev_dims(n: usize, max: usize) -> Vec<i64> {
    let mut d = vec![1i64, n as i64];
    while d.len() <= max {
        let k = d.len();
        d.push(n as i64 * d[k - 1] - d[k - 2]);
    }
    d.truncate(max + 1);
    d
}

/// Quantum integers `[k+1]` for loop value `delta`, `k = 0..=max`.
pub fn quantum_integers(delta: f64, max: usize) -> Vec<f64> {
    let mut q = vec![1.0, delta];
    while q.len() <= max {
        let k = q.len();
        q.push(delta * q[k - 1] - q[k - 2]);
    }
    q.truncate(max + 1);
    q
}
