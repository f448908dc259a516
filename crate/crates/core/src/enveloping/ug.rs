//! U(𝔤) in PBW normal form, the quotient 𝒰_{L/A} = U(𝔤)/U(𝔤)𝔥 and the
//! pbw isomorphism S(B) → 𝒰_{L/A}.
//!
//! Normal words list complement letters before 𝔥-letters, so a class in
//! 𝒰_{L/A} is read off by dropping every word that contains an 𝔥-letter.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graded::{LinearOperator, Vector};
use crate::lie_pair::{ConnectionSet, LiePair};
use crate::scalar::Scalar;

/// Sparse combination of words (letter sequences).
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct WordVec(BTreeMap<Vec<usize>, Scalar>);

impl fmt::Debug for WordVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.0.iter()).finish()
    }
}

impl WordVec {
    pub fn zero() -> Self {
        WordVec(BTreeMap::new())
    }

    pub fn word(w: Vec<usize>) -> Self {
        WordVec::term(w, Scalar::one())
    }

    pub fn term(w: Vec<usize>, c: Scalar) -> Self {
        let mut v = WordVec::zero();
        v.add_term(w, &c);
        v
    }

    pub fn add_term(&mut self, w: Vec<usize>, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.0.get_mut(&w) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    self.0.remove(&w);
                }
            }
            None => {
                self.0.insert(w, c.clone());
            }
        }
    }

    pub fn add_scaled(&mut self, other: &WordVec, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (w, x) in &other.0 {
            self.add_term(w.clone(), &(x * c));
        }
    }

    pub fn scale(&self, c: &Scalar) -> WordVec {
        let mut r = WordVec::zero();
        r.add_scaled(self, c);
        r
    }

    pub fn sub(&self, other: &WordVec) -> WordVec {
        let mut r = self.clone();
        r.add_scaled(other, &-Scalar::one());
        r
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Scalar)> + '_ {
        self.0.iter()
    }

    pub fn coeff(&self, w: &[usize]) -> Scalar {
        self.0.get(w).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_weight(&self) -> usize {
        self.0.keys().map(Vec::len).max().unwrap_or(0)
    }
}

/// Sorted multisets of `{0, …, k−1}` of size at most `cap`, by size then lex.
pub fn monomials(k: usize, cap: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut layer: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..cap {
        let mut next = Vec::new();
        for w in &layer {
            let start = w.last().copied().unwrap_or(0);
            for l in start..k {
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// U(𝔤) with normal ordering: complement letters first, then 𝔥-letters,
/// each block in index order.
#[derive(Clone, Debug)]
pub struct Ug {
    pair: Arc<LiePair>,
}

impl Ug {
    pub fn new(pair: Arc<LiePair>) -> Self {
        Ug { pair }
    }

    pub fn pair(&self) -> &LiePair {
        &self.pair
    }

    fn rank(&self, i: usize) -> usize {
        let m = self.pair.dim_h();
        if i >= m {
            i - m
        } else {
            self.pair.dim_b() + i
        }
    }

    pub fn is_normal(&self, w: &[usize]) -> bool {
        w.windows(2).all(|p| self.rank(p[0]) <= self.rank(p[1]))
    }

    /// `x_g · w` for a normal word `w`.
    pub fn left_mul_gen(&self, g: usize, w: &[usize]) -> WordVec {
        if w.is_empty() || self.rank(g) <= self.rank(w[0]) {
            let mut v = vec![g];
            v.extend_from_slice(w);
            return WordVec::word(v);
        }
        let (w0, rest) = (w[0], &w[1..]);
        let inner = self.left_mul_gen(g, rest);
        let mut out = self.left_mul(w0, &inner);
        for (k, c) in self.pair.bracket_basis(g, w0).iter().enumerate() {
            if !c.is_zero() {
                out.add_scaled(&self.left_mul_gen(k, rest), c);
            }
        }
        out
    }

    /// `x_g · x`.
    pub fn left_mul(&self, g: usize, x: &WordVec) -> WordVec {
        let mut out = WordVec::zero();
        for (w, c) in x.terms() {
            out.add_scaled(&self.left_mul_gen(g, w), c);
        }
        out
    }

    /// Normal-form product; `cap` bounds the combined input weight.
    pub fn multiply(&self, x: &WordVec, y: &WordVec, cap: Option<usize>) -> Result<WordVec> {
        if let Some(cap) = cap {
            let w = x.max_weight() + y.max_weight();
            if w > cap {
                return Err(Error::TruncationOverflow { weight: w, cap });
            }
        }
        let mut out = WordVec::zero();
        for (u, c) in x.terms() {
            let mut acc = y.clone();
            for &g in u.iter().rev() {
                acc = self.left_mul(g, &acc);
            }
            out.add_scaled(&acc, c);
        }
        Ok(out)
    }

    /// Normal form of an arbitrary word.
    pub fn normal_form(&self, w: &[usize]) -> WordVec {
        let mut acc = WordVec::word(vec![]);
        for &g in w.iter().rev() {
            acc = self.left_mul(g, &acc);
        }
        acc
    }

    /// Class in 𝒰_{L/A}, keyed by complement monomials (indices shifted to `0..dim_b`).
    pub fn project_ula(&self, x: &WordVec) -> WordVec {
        let m = self.pair.dim_h();
        let mut out = WordVec::zero();
        for (w, c) in x.terms() {
            if w.iter().all(|&i| i >= m) {
                out.add_term(w.iter().map(|i| i - m).collect(), c);
            }
        }
        out
    }

    /// The word `j(b_{l_1}) ⋯ j(b_{l_k})` representing a 𝒰_{L/A} monomial.
    pub fn lift_ula(&self, u: &WordVec) -> WordVec {
        let m = self.pair.dim_h();
        let mut out = WordVec::zero();
        for (w, c) in u.terms() {
            out.add_term(w.iter().map(|i| i + m).collect(), c);
        }
        out
    }

    /// Left action of `x_g` on 𝒰_{L/A}.
    pub fn ula_act(&self, g: usize, u: &WordVec) -> WordVec {
        self.project_ula(&self.left_mul(g, &self.lift_ula(u)))
    }
}

/// The pbw map for a fixed ∇^B, memoized on monomials.
#[derive(Clone, Debug)]
pub struct Pbw {
    ug: Ug,
    conn: Arc<ConnectionSet>,
    table: HashMap<Vec<usize>, WordVec>,
    cap: usize,
}

impl Pbw {
    pub fn new(ug: Ug, conn: Arc<ConnectionSet>, cap: usize) -> Self {
        let mut p = Pbw { ug, conn, table: HashMap::new(), cap };
        for w in monomials(p.ug.pair().dim_b(), cap) {
            let v = p.compute(&w);
            p.table.insert(w, v);
        }
        p
    }

    /// `∇^B_{x_g}` extended to S(B) as an even derivation.
    pub fn nabla_b_sym(&self, g: usize, w: &[usize]) -> WordVec {
        let k = self.ug.pair().dim_b();
        let mut out = WordVec::zero();
        for t in 0..w.len() {
            for d in 0..k {
                let c = self.conn.b_coeff(g, w[t], d);
                if c.is_zero() {
                    continue;
                }
                let mut v: Vec<usize> = w.to_vec();
                v[t] = d;
                v.sort_unstable();
                out.add_term(v, c);
            }
        }
        out
    }

    fn compute(&self, w: &[usize]) -> WordVec {
        let n = w.len();
        if n == 0 {
            return WordVec::word(vec![]);
        }
        let m = self.ug.pair().dim_h();
        let inv = Scalar::ratio(1, n as i64);
        let mut out = WordVec::zero();
        for i in 0..n {
            let mut rest = w.to_vec();
            let b = rest.remove(i);
            let g = b + m;
            let act = self.ug.ula_act(g, &self.table[&rest]);
            out.add_scaled(&act, &inv);
            let nab = self.nabla_b_sym(g, &rest);
            for (v, c) in nab.terms() {
                out.add_scaled(&self.table[v], &-(c * &inv));
            }
        }
        out
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn apply_monomial(&self, w: &[usize]) -> Result<&WordVec> {
        self.table
            .get(w)
            .ok_or(Error::TruncationOverflow { weight: w.len(), cap: self.cap })
    }

    pub fn apply(&self, x: &WordVec) -> Result<WordVec> {
        let mut out = WordVec::zero();
        for (w, c) in x.terms() {
            out.add_scaled(self.apply_monomial(w)?, c);
        }
        Ok(out)
    }

    /// Matrix on the monomial basis of weight ≤ cap (both sides indexed by
    /// [`monomials`]).
    pub fn matrix(&self) -> LinearOperator {
        let basis = monomials(self.ug.pair().dim_b(), self.cap);
        let index: HashMap<&Vec<usize>, usize> = basis.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let degs = Arc::new(vec![0; basis.len()]);
        let cols = basis
            .iter()
            .map(|w| self.table[w].terms().map(|(v, c)| (index[v], c.clone())).collect::<Vector>())
            .collect();
        LinearOperator::new(degs.clone(), degs, 0, cols).expect("pbw matrix shape")
    }
}
