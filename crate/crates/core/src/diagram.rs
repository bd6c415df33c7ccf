//! Planar pairing diagrams and their formal linear combinations.
//!
//! A diagram from a source word (bottom, read left to right) to a target word
//! (top, read left to right) pairs its boundary points without crossings.
//! Points `0..r` are the source, `r..r+s` the target. A pair inside the target
//! is a cup, a pair inside the source a cap, and a mixed pair a through string.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64, ONE, ZERO};
use crate::word::{Letter, Variant, Word};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Diagram {
    source: Word,
    target: Word,
    partner: Vec<usize>,
}

/// Nonzero entries `(i, j, value)` of a normalized cup vector in `ℂⁿ ⊗ ℂⁿ`
/// for each ordered pair of letters that can be joined.
pub trait CupTable {
    fn dim(&self) -> usize;
    fn cup_entries(&self, left: Letter, right: Letter) -> &[(usize, usize, C64)];
}

impl Diagram {
    pub fn new(source: Word, target: Word, partner: Vec<usize>, variant: Variant) -> Result<Diagram> {
        let d = Diagram { source, target, partner };
        d.validate(variant)?;
        Ok(d)
    }

    fn validate(&self, variant: Variant) -> Result<()> {
        let m = self.points();
        if self.partner.len() != m {
            return Err(Error::InvalidInput("partner table has the wrong length".into()));
        }
        for p in 0..m {
            let q = self.partner[p];
            if q >= m || q == p || self.partner[q] != p {
                return Err(Error::InvalidInput(format!("point {p} is not properly paired")));
            }
        }
        for p in 0..m {
            let q = self.partner[p];
            if p > q {
                continue;
            }
            let (a, b) = (self.circle(p).min(self.circle(q)), self.circle(p).max(self.circle(q)));
            for u in 0..m {
                let v = self.partner[u];
                if u > v {
                    continue;
                }
                let (x, y) = (self.circle(u).min(self.circle(v)), self.circle(u).max(self.circle(v)));
                if (a < x && x < b && b < y) || (x < a && a < y && y < b) {
                    return Err(Error::InvalidInput("pairing has crossings".into()));
                }
            }
            if !self.compatible(p, q, variant) {
                return Err(Error::InvalidInput(format!("points {p} and {q} cannot be joined")));
            }
        }
        Ok(())
    }

    fn compatible(&self, p: usize, q: usize, variant: Variant) -> bool {
        let (p, q) = (p.min(q), p.max(q));
        let (lp, lq) = (self.letter(p), self.letter(q));
        let r = self.source.len();
        if p < r && q >= r {
            lp == lq
        } else {
            variant.pairable(lp, lq)
        }
    }

    fn letter(&self, p: usize) -> Letter {
        let r = self.source.len();
        if p < r {
            self.source.letters()[p]
        } else {
            self.target.letters()[p - r]
        }
    }

    /// Position on the boundary circle: source left to right, then target
    /// right to left.
    fn circle(&self, p: usize) -> usize {
        let r = self.source.len();
        if p < r {
            p
        } else {
            r + self.target.len() - 1 - (p - r)
        }
    }

    pub fn source(&self) -> &Word {
        &self.source
    }

    pub fn target(&self) -> &Word {
        &self.target
    }

    pub fn partner(&self) -> &[usize] {
        &self.partner
    }

    pub fn points(&self) -> usize {
        self.source.len() + self.target.len()
    }

    pub fn identity(w: &Word) -> Diagram {
        let r = w.len();
        let mut partner = vec![0; 2 * r];
        for i in 0..r {
            partner[i] = r + i;
            partner[r + i] = i;
        }
        Diagram { source: w.clone(), target: w.clone(), partner }
    }

    /// Number of caps (pairs inside the source).
    pub fn caps(&self) -> usize {
        let r = self.source.len();
        (0..r).filter(|&p| self.partner[p] < r).count() / 2
    }

    /// Number of cups (pairs inside the target).
    pub fn cups(&self) -> usize {
        let r = self.source.len();
        (r..self.points()).filter(|&p| self.partner[p] >= r).count() / 2
    }

    pub fn through_strings(&self) -> usize {
        self.source.len() - 2 * self.caps()
    }

    /// All non-crossing diagrams between two words, in a fixed order.
    pub fn enumerate(source: &Word, target: &Word, variant: Variant) -> Vec<Diagram> {
        let r = source.len();
        let s = target.len();
        let m = r + s;
        if !m.is_multiple_of(2) {
            return Vec::new();
        }
        // map circle positions back to point indices
        let point_at = |c: usize| if c < r { c } else { r + (r + s - 1 - c) };
        let letter_at = |c: usize| {
            let p = point_at(c);
            if p < r {
                source.letters()[p]
            } else {
                target.letters()[p - r]
            }
        };
        let joinable = |c1: usize, c2: usize| {
            let (p, q) = (point_at(c1), point_at(c2));
            let (lp, lq) = (letter_at(c1), letter_at(c2));
            if (p < r) != (q < r) {
                lp == lq
            } else {
                let (a, b) = if p < q { (lp, lq) } else { (lq, lp) };
                variant.pairable(a, b)
            }
        };
        let mut out = Vec::new();
        let mut partner = vec![usize::MAX; m];
        fn rec(
            lo: usize,
            hi: usize,
            partner: &mut Vec<usize>,
            joinable: &dyn Fn(usize, usize) -> bool,
            point_at: &dyn Fn(usize) -> usize,
            emit: &mut dyn FnMut(&Vec<usize>),
        ) {
            // pair circle positions in [lo, hi), then continue with the rest
            // of the open intervals recorded on the stack
            if lo >= hi {
                emit(partner);
                return;
            }
            let mut k = lo + 1;
            while k < hi {
                if joinable(lo, k) {
                    let (p, q) = (point_at(lo), point_at(k));
                    partner[p] = q;
                    partner[q] = p;
                    let mut inner = |pt: &Vec<usize>| {
                        let mut pt2 = pt.clone();
                        rec(k + 1, hi, &mut pt2, joinable, point_at, emit);
                    };
                    rec(lo + 1, k, partner, joinable, point_at, &mut inner);
                    partner[p] = usize::MAX;
                    partner[q] = usize::MAX;
                }
                k += 2;
            }
        }
        let mut emit = |pt: &Vec<usize>| {
            out.push(Diagram { source: source.clone(), target: target.clone(), partner: pt.clone() });
        };
        rec(0, m, &mut partner, &joinable, &point_at, &mut emit);
        out
    }

    /// Non-crossing diagrams without caps.
    pub fn enumerate_cap_free(source: &Word, target: &Word, variant: Variant) -> Vec<Diagram> {
        Self::enumerate(source, target, variant).into_iter().filter(|d| d.caps() == 0).collect()
    }

    pub fn adjoint(&self) -> Diagram {
        let r = self.source.len();
        let s = self.target.len();
        // new source = old target, new target = old source
        let to_new = |p: usize| if p < r { s + p } else { p - r };
        let mut partner = vec![0; r + s];
        for p in 0..r + s {
            partner[to_new(p)] = to_new(self.partner[p]);
        }
        Diagram { source: self.target.clone(), target: self.source.clone(), partner }
    }

    pub fn tensor(&self, other: &Diagram) -> Diagram {
        let (r1, s1) = (self.source.len(), self.target.len());
        let (r2, s2) = (other.source.len(), other.target.len());
        let map1 = |p: usize| if p < r1 { p } else { r1 + r2 + (p - r1) };
        let map2 = |p: usize| if p < r2 { r1 + p } else { r1 + r2 + s1 + (p - r2) };
        let mut partner = vec![0; r1 + r2 + s1 + s2];
        for p in 0..r1 + s1 {
            partner[map1(p)] = map1(self.partner[p]);
        }
        for p in 0..r2 + s2 {
            partner[map2(p)] = map2(other.partner[p]);
        }
        Diagram {
            source: self.source.concat(&other.source),
            target: self.target.concat(&other.target),
            partner,
        }
    }

    /// `upper ∘ lower`, together with the number of zigzags removed.
    ///
    /// With normalized cups every zigzag contributes the realization's
    /// zigzag scalar and every closed loop with `m` caps contributes `m - 1`
    /// zigzags; the returned exponent collects both.
    pub fn compose(upper: &Diagram, lower: &Diagram) -> Result<(usize, Diagram)> {
        if upper.source != lower.target {
            return Err(Error::InvalidInput(format!(
                "cannot compose: {} vs {}",
                upper.source, lower.target
            )));
        }
        let r = lower.source.len();
        let mid = lower.target.len();
        let s = upper.target.len();
        #[derive(Clone, Copy)]
        enum End {
            Bottom(usize),
            Top(usize),
        }
        let mut visited_mid = vec![false; mid];
        let mut partner = vec![usize::MAX; r + s];
        let mut zigzags = 0usize;
        // follow a strand starting from an outer endpoint
        let walk = |start: End, visited_mid: &mut Vec<bool>| -> (End, usize) {
            let mut arcs = 0usize;
            // current location: (in_lower, point index within that diagram)
            let (mut in_lower, mut p) = match start {
                End::Bottom(i) => (true, i),
                End::Top(j) => (false, upper.source.len() + j),
            };
            loop {
                if in_lower {
                    let q = lower.partner[p];
                    if q < r {
                        return (End::Bottom(q), arcs);
                    }
                    let k = q - r;
                    if p >= r {
                        arcs += 1;
                    }
                    visited_mid[k] = true;
                    in_lower = false;
                    p = k;
                } else {
                    let q = upper.partner[p];
                    if q >= mid {
                        return (End::Top(q - mid), arcs);
                    }
                    if p < mid {
                        arcs += 1;
                    }
                    visited_mid[q] = true;
                    in_lower = true;
                    p = r + q;
                }
            }
        };
        for i in 0..r + s {
            if partner[i] != usize::MAX {
                continue;
            }
            let start = if i < r { End::Bottom(i) } else { End::Top(i - r) };
            let (end, arcs) = walk(start, &mut visited_mid);
            let j = match end {
                End::Bottom(b) => b,
                End::Top(t) => r + t,
            };
            partner[i] = j;
            partner[j] = i;
            zigzags += arcs / 2;
        }
        for k in 0..mid {
            if visited_mid[k] {
                continue;
            }
            // closed loop through middle point k
            let mut caps = 0usize;
            let mut p = k;
            loop {
                visited_mid[p] = true;
                let q = upper.partner[p];
                caps += 1;
                visited_mid[q] = true;
                let l = lower.partner[r + q] - r;
                if l == k {
                    break;
                }
                p = l;
            }
            zigzags += caps - 1;
        }
        Ok((zigzags, Diagram { source: lower.source.clone(), target: upper.target.clone(), partner }))
    }

    /// Nonzero matrix entries `(row, col, value)` of the linear map the
    /// diagram defines on `(ℂⁿ)^{⊗r} → (ℂⁿ)^{⊗s}`, first tensor factor most
    /// significant.
    pub fn entries(&self, cups: &dyn CupTable) -> Vec<(usize, usize, C64)> {
        let n = cups.dim();
        let r = self.source.len();
        let m = self.points();
        // per-pair option lists over (index at lower point, index at higher point)
        let mut arcs: Vec<(usize, usize, Vec<(usize, usize, C64)>)> = Vec::new();
        let through: Vec<(usize, usize, C64)> = (0..n).map(|k| (k, k, ONE)).collect();
        for p in 0..m {
            let q = self.partner[p];
            if q < p {
                continue;
            }
            let opts = if p < r && q >= r {
                through.clone()
            } else if q < r {
                cups.cup_entries(self.letter(p), self.letter(q))
                    .iter()
                    .map(|&(i, j, v)| (i, j, v.conj()))
                    .collect()
            } else {
                cups.cup_entries(self.letter(p), self.letter(q)).to_vec()
            };
            arcs.push((p, q, opts));
        }
        let mut weight = vec![0usize; m];
        let s = m - r;
        for p in 0..r {
            weight[p] = n.pow((r - 1 - p) as u32);
        }
        for j in 0..s {
            weight[r + j] = n.pow((s - 1 - j) as u32);
        }
        let mut out = Vec::new();
        if arcs.iter().any(|a| a.2.is_empty()) {
            return out;
        }
        let mut idx = vec![0usize; arcs.len()];
        loop {
            let mut row = 0;
            let mut col = 0;
            let mut val = ONE;
            for (a, &(p, q, ref opts)) in arcs.iter().enumerate() {
                let (i, j, v) = opts[idx[a]];
                val *= v;
                for (pt, k) in [(p, i), (q, j)] {
                    if pt < r {
                        col += weight[pt] * k;
                    } else {
                        row += weight[pt] * k;
                    }
                }
            }
            out.push((row, col, val));
            // advance the mixed-radix counter
            let mut a = 0;
            loop {
                if a == arcs.len() {
                    return out;
                }
                idx[a] += 1;
                if idx[a] < arcs[a].2.len() {
                    break;
                }
                idx[a] = 0;
                a += 1;
            }
        }
    }

    pub fn matrix(&self, cups: &dyn CupTable) -> CMat {
        let n = cups.dim();
        let rows = n.pow(self.target.len() as u32);
        let cols = n.pow(self.source.len() as u32);
        let mut m = CMat::zeros(rows, cols);
        for (i, j, v) in self.entries(cups) {
            m[(i, j)] += v;
        }
        m
    }
}

/// A formal linear combination of diagrams with common source and target.
#[derive(Debug, Clone, PartialEq)]
pub struct Morphism {
    pub source: Word,
    pub target: Word,
    pub terms: Vec<(C64, Diagram)>,
}

impl Morphism {
    pub fn zero(source: &Word, target: &Word) -> Morphism {
        Morphism { source: source.clone(), target: target.clone(), terms: Vec::new() }
    }

    pub fn identity(w: &Word) -> Morphism {
        Morphism::from_diagram(Diagram::identity(w))
    }

    pub fn from_diagram(d: Diagram) -> Morphism {
        Morphism { source: d.source.clone(), target: d.target.clone(), terms: vec![(ONE, d)] }
    }

    pub fn from_terms(source: &Word, target: &Word, terms: Vec<(C64, Diagram)>) -> Result<Morphism> {
        for (_, d) in &terms {
            if &d.source != source || &d.target != target {
                return Err(Error::InvalidInput("diagram does not match morphism type".into()));
            }
        }
        Ok(Morphism { source: source.clone(), target: target.clone(), terms }.simplified())
    }

    /// Merge repeated diagrams and drop exact zeros; terms stay in first-seen order.
    pub fn simplified(self) -> Morphism {
        let mut pos: HashMap<Diagram, usize> = HashMap::new();
        let mut terms: Vec<(C64, Diagram)> = Vec::new();
        for (c, d) in self.terms {
            match pos.get(&d) {
                Some(&i) => terms[i].0 += c,
                None => {
                    pos.insert(d.clone(), terms.len());
                    terms.push((c, d));
                }
            }
        }
        terms.retain(|(c, _)| *c != ZERO);
        Morphism { source: self.source, target: self.target, terms }
    }

    pub fn scale(&self, s: C64) -> Morphism {
        Morphism {
            source: self.source.clone(),
            target: self.target.clone(),
            terms: self.terms.iter().map(|(c, d)| (c * s, d.clone())).collect(),
        }
    }

    pub fn add(&self, other: &Morphism) -> Result<Morphism> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::InvalidInput("cannot add morphisms of different types".into()));
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(Morphism { source: self.source.clone(), target: self.target.clone(), terms }.simplified())
    }

    pub fn adjoint(&self) -> Morphism {
        Morphism {
            source: self.target.clone(),
            target: self.source.clone(),
            terms: self.terms.iter().map(|(c, d)| (c.conj(), d.adjoint())).collect(),
        }
    }

    pub fn tensor(&self, other: &Morphism) -> Morphism {
        let mut terms = Vec::new();
        for (a, d) in &self.terms {
            for (b, e) in &other.terms {
                terms.push((a * b, d.tensor(e)));
            }
        }
        Morphism {
            source: self.source.concat(&other.source),
            target: self.target.concat(&other.target),
            terms,
        }
        .simplified()
    }

    /// `self ∘ lower`, with `beta` the zigzag scalar of the category.
    pub fn compose(&self, lower: &Morphism, beta: f64) -> Result<Morphism> {
        if self.source != lower.target {
            return Err(Error::InvalidInput(format!(
                "cannot compose: {} vs {}",
                self.source, lower.target
            )));
        }
        let mut terms = Vec::new();
        for (a, d) in &self.terms {
            for (b, e) in &lower.terms {
                let (z, de) = Diagram::compose(d, e)?;
                terms.push((a * b * beta.powi(z as i32), de));
            }
        }
        Ok(Morphism { source: lower.source.clone(), target: self.target.clone(), terms }.simplified())
    }

    /// Value of a morphism `ε → ε`.
    pub fn scalar(&self) -> Option<C64> {
        if self.source.is_empty() && self.target.is_empty() {
            Some(self.terms.iter().map(|(c, _)| *c).sum())
        } else {
            None
        }
    }

    pub fn matrix(&self, cups: &dyn CupTable) -> CMat {
        let n = cups.dim();
        let mut m = CMat::zeros(n.pow(self.target.len() as u32), n.pow(self.source.len() as u32));
        for (c, d) in &self.terms {
            for (i, j, v) in d.entries(cups) {
                m[(i, j)] += c * v;
            }
        }
        m
    }
}

/// Number of non-crossing perfect matchings of `2k` points.
pub fn catalan(k: usize) -> usize {
    let mut c = 1usize;
    for i in 0..k {
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalan_counts() {
        for k in 0..6 {
            let d = Diagram::enumerate(&Word::empty(), &Word::level(2 * k), Variant::Ao);
            assert_eq!(d.len(), catalan(k));
        }
        assert_eq!(Diagram::enumerate(&Word::level(3), &Word::level(3), Variant::Ao).len(), 5);
    }

    #[test]
    fn oriented_counts() {
        let e = Word::empty();
        let count = |s: &str| Diagram::enumerate(&e, &Word::parse(s).unwrap(), Variant::Au).len();
        assert_eq!(count("ab"), 1);
        assert_eq!(count("ba"), 1);
        assert_eq!(count("aa"), 0);
        assert_eq!(count("abab"), 2);
        assert_eq!(count("aabb"), 1);
    }

    #[test]
    fn enumerated_diagrams_validate() {
        let w = Word::parse("abba").unwrap();
        for d in Diagram::enumerate(&Word::parse("ab").unwrap(), &w, Variant::Au) {
            Diagram::new(d.source.clone(), d.target.clone(), d.partner.clone(), Variant::Au).unwrap();
        }
    }

    #[test]
    fn adjoint_is_involutive() {
        for d in Diagram::enumerate(&Word::level(2), &Word::level(4), Variant::Ao) {
            assert_eq!(d.adjoint().adjoint(), d);
        }
    }

    #[test]
    fn snake_counts_one_zigzag() {
        let e = Word::empty();
        let cup = Diagram::enumerate(&e, &Word::level(2), Variant::Ao).remove(0);
        let id = Diagram::identity(&Word::level(1));
        let lower = id.tensor(&cup);
        let upper = cup.adjoint().tensor(&id);
        let (z, d) = Diagram::compose(&upper, &lower).unwrap();
        assert_eq!(z, 1);
        assert_eq!(d, id);
        let (z, d) = Diagram::compose(&cup.adjoint(), &cup).unwrap();
        assert_eq!(z, 0);
        assert_eq!(d.points(), 0);
    }
}
