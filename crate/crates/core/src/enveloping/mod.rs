//! Enveloping algebras: U(𝔤), 𝒰_{L/A}, and the enveloping algebra of the
//! pullback algebroid, with the PBW maps and the symmetric-algebra contraction.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::exterior::{mask_degree, wedge_masks, Ext, Mask};
use crate::graded::{GradedSpace, LinearOperator, Vector};
use crate::scalar::Scalar;

pub mod pbw;
pub mod sym;
pub mod uenv;
pub mod ug;

pub type Label = (Mask, Vec<usize>);

/// Sparse combination of `ξ^mask · w` with `w` a word in the frame
/// generators. Used both for 𝒰(π^!L) (normal words) and for the symmetric
/// algebra (sorted words).
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct MonoVec(BTreeMap<Label, Scalar>);

impl fmt::Debug for MonoVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.0.iter().map(|((m, w), c)| (format!("{m:b}·{w:?}"), c.to_string()))).finish()
    }
}

impl MonoVec {
    pub fn zero() -> Self {
        MonoVec(BTreeMap::new())
    }

    pub fn term(mask: Mask, w: Vec<usize>, c: Scalar) -> Self {
        let mut v = MonoVec::zero();
        v.add_term(mask, w, &c);
        v
    }

    pub fn word(w: Vec<usize>) -> Self {
        MonoVec::term(0, w, Scalar::one())
    }

    pub fn one() -> Self {
        MonoVec::word(vec![])
    }

    /// `f · w`.
    pub fn from_ext(f: &Ext, w: Vec<usize>) -> Self {
        let mut v = MonoVec::zero();
        for (m, c) in f.terms() {
            v.add_term(m, w.clone(), c);
        }
        v
    }

    pub fn add_term(&mut self, mask: Mask, w: Vec<usize>, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let key = (mask, w);
        match self.0.get_mut(&key) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    self.0.remove(&key);
                }
            }
            None => {
                self.0.insert(key, c.clone());
            }
        }
    }

    pub fn add_scaled(&mut self, other: &MonoVec, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for ((m, w), x) in &other.0 {
            self.add_term(*m, w.clone(), &(x * c));
        }
    }

    pub fn add(&self, other: &MonoVec) -> MonoVec {
        let mut r = self.clone();
        r.add_scaled(other, &Scalar::one());
        r
    }

    pub fn sub(&self, other: &MonoVec) -> MonoVec {
        let mut r = self.clone();
        r.add_scaled(other, &-Scalar::one());
        r
    }

    pub fn scale(&self, c: &Scalar) -> MonoVec {
        let mut r = MonoVec::zero();
        r.add_scaled(self, c);
        r
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Label, &Scalar)> + '_ {
        self.0.iter()
    }

    pub fn coeff(&self, mask: Mask, w: &[usize]) -> Scalar {
        self.0.get(&(mask, w.to_vec())).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_weight(&self) -> usize {
        self.0.keys().map(|(_, w)| w.len()).max().unwrap_or(0)
    }

    /// `f ∧ self`, acting on the coefficients only.
    pub fn left_mul_ext(&self, f: &Ext) -> MonoVec {
        let mut r = MonoVec::zero();
        for (fm, fc) in f.terms() {
            for ((m, w), c) in &self.0 {
                if let Some((neg, mm)) = wedge_masks(fm, *m) {
                    let t = fc * c;
                    r.add_term(mm, w.clone(), &if neg { -t } else { t });
                }
            }
        }
        r
    }

    /// Coordinates on a word space; fails on labels outside it.
    pub fn to_vector(&self, space: &GradedSpace<Label>) -> Result<Vector> {
        let mut v = Vector::new();
        for (l, c) in &self.0 {
            let i = space.index_of(l).ok_or(Error::TruncationOverflow { weight: l.1.len(), cap: space_cap(space) })?;
            v.add_term(i, c);
        }
        Ok(v)
    }

    pub fn from_vector(space: &GradedSpace<Label>, v: &Vector) -> MonoVec {
        let mut out = MonoVec::zero();
        for (i, c) in v.iter() {
            let (m, w) = space.label(i);
            out.add_term(*m, w.clone(), c);
        }
        out
    }

    /// Components by total degree, given generator degrees.
    pub fn components(&self, gen_deg: &[i32]) -> BTreeMap<i32, MonoVec> {
        let mut out: BTreeMap<i32, MonoVec> = BTreeMap::new();
        for ((m, w), c) in &self.0 {
            out.entry(label_degree(*m, w, gen_deg)).or_default().add_term(*m, w.clone(), c);
        }
        out
    }
}

/// Total degree of `ξ^mask · w`.
pub fn label_degree(mask: Mask, w: &[usize], gen_deg: &[i32]) -> i32 {
    mask_degree(mask) + w.iter().map(|&g| gen_deg[g]).sum::<i32>()
}

fn space_cap(space: &GradedSpace<Label>) -> usize {
    space.labels().iter().map(|(_, w)| w.len()).max().unwrap_or(0)
}

/// Basis `ξ^mask · w` over ℚ for normal words of weight ≤ `cap`, word-major.
pub fn word_space(gen_deg: &[i32], masks: &[Mask], cap: usize) -> GradedSpace<Label> {
    let mut basis = Vec::new();
    for w in normal_words(gen_deg, cap) {
        for &m in masks {
            basis.push(((m, w.clone()), label_degree(m, &w, gen_deg)));
        }
    }
    GradedSpace::new(basis).expect("distinct labels")
}

/// Filtration weight of each basis vector of a word space.
pub fn word_weights(space: &GradedSpace<Label>) -> Vec<usize> {
    space.labels().iter().map(|(_, w)| w.len()).collect()
}

/// Matrix of a map between word spaces, evaluated on basis vectors.
pub fn word_operator<F>(dom: &GradedSpace<Label>, cod: &GradedSpace<Label>, shift: i32, f: F) -> Result<LinearOperator>
where
    F: Fn(&MonoVec) -> Result<MonoVec> + Sync,
{
    use rayon::prelude::*;
    let cols = dom
        .labels()
        .par_iter()
        .map(|(m, w)| f(&MonoVec::term(*m, w.clone(), Scalar::one()))?.to_vector(cod))
        .collect::<Result<Vec<_>>>()?;
    LinearOperator::new(dom.degrees().clone(), cod.degrees().clone(), shift, cols)
}

/// Sign and result of sorting a word of graded letters into nondecreasing
/// order; `None` when an odd letter repeats.
pub fn sort_word(w: &[usize], gen_deg: &[i32]) -> Option<(bool, Vec<usize>)> {
    let mut v = w.to_vec();
    let mut neg = false;
    // insertion sort keeps track of the transpositions
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            if gen_deg[v[j - 1]] % 2 != 0 && gen_deg[v[j]] % 2 != 0 {
                neg = !neg;
            }
            v.swap(j - 1, j);
            j -= 1;
        }
    }
    for i in 1..v.len() {
        if v[i] == v[i - 1] && gen_deg[v[i]] % 2 != 0 {
            return None;
        }
    }
    Some((neg, v))
}

/// Words of weight ≤ `cap` that are nondecreasing with no repeated odd
/// letter, by weight then lexicographically.
pub fn normal_words(gen_deg: &[i32], cap: usize) -> Vec<Vec<usize>> {
    let g = gen_deg.len();
    let mut out = vec![vec![]];
    let mut layer: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..cap {
        let mut next = Vec::new();
        for w in &layer {
            let start = match w.last() {
                None => 0,
                Some(&l) if gen_deg[l] % 2 != 0 => l + 1,
                Some(&l) => l,
            };
            for x in start..g {
                let mut v = w.clone();
                v.push(x);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}
