//! Chevalley–Eilenberg complexes Λ𝔥^∨ ⊗ V for V = B, S^{≤N}B and 𝒰_{L/A}^{≤N}.
//!
//! Module labels are sorted monomials in the complement basis; `B` uses the
//! monomials of length one.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::enveloping::ug::{monomials, Ug, WordVec};
use crate::error::{Error, Result};
use crate::exterior::{mask_degree, Ext, ExtAlgebra, Mask};
use crate::graded::{GradedSpace, LinearOperator, Vector};
use crate::lie_pair::{unit, LiePair};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Coeffs {
    B,
    Sym(usize),
    Ula(usize),
}

impl Coeffs {
    pub fn cap(&self) -> usize {
        match self {
            Coeffs::B => 1,
            Coeffs::Sym(n) | Coeffs::Ula(n) => *n,
        }
    }
}

pub type CeLabel = (Mask, Vec<usize>);

/// Element of Λ𝔥^∨ ⊗ V.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CeElement {
    pub coeffs: Coeffs,
    terms: BTreeMap<CeLabel, Scalar>,
}

impl CeElement {
    pub fn zero(coeffs: Coeffs) -> Self {
        CeElement { coeffs, terms: BTreeMap::new() }
    }

    pub fn term(coeffs: Coeffs, mask: Mask, mono: Vec<usize>, c: Scalar) -> Self {
        let mut e = CeElement::zero(coeffs);
        e.add_term(mask, mono, &c);
        e
    }

    /// `ω ⊗ v`.
    pub fn tensor(coeffs: Coeffs, omega: &Ext, v: &WordVec) -> Self {
        let mut e = CeElement::zero(coeffs);
        for (m, a) in omega.terms() {
            for (w, b) in v.terms() {
                e.add_term(m, w.clone(), &(a * b));
            }
        }
        e
    }

    pub fn add_term(&mut self, mask: Mask, mono: Vec<usize>, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let key = (mask, mono);
        match self.terms.get_mut(&key) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c.clone());
            }
        }
    }

    pub fn add_scaled(&mut self, other: &CeElement, c: &Scalar) {
        for ((m, w), x) in &other.terms {
            self.add_term(*m, w.clone(), &(x * c));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CeLabel, &Scalar)> + '_ {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `f ∧ self`.
    pub fn left_mul(&self, f: &Ext) -> CeElement {
        let mut out = CeElement::zero(self.coeffs);
        for ((m, w), x) in &self.terms {
            let prod = f.wedge(&Ext::monomial(*m, x.clone()));
            for (mm, c) in prod.terms() {
                out.add_term(mm, w.clone(), c);
            }
        }
        out
    }
}

/// The complex Λ𝔥^∨ ⊗ V with its differential.
#[derive(Clone, Debug)]
pub struct CeComplex {
    pair: Arc<LiePair>,
    ext: ExtAlgebra,
    ug: Ug,
    coeffs: Coeffs,
}

impl CeComplex {
    pub fn new(pair: Arc<LiePair>, coeffs: Coeffs) -> Self {
        CeComplex {
            ext: ExtAlgebra::new(&pair),
            ug: Ug::new(pair.clone()),
            pair,
            coeffs,
        }
    }

    pub fn coeffs(&self) -> Coeffs {
        self.coeffs
    }

    pub fn ext(&self) -> &ExtAlgebra {
        &self.ext
    }

    /// `e_k ▷ v` on a module monomial.
    pub fn action(&self, k: usize, v: &[usize]) -> WordVec {
        let kb = self.pair.dim_b();
        match self.coeffs {
            Coeffs::B | Coeffs::Sym(_) => {
                let mut out = WordVec::zero();
                let ek = unit(self.pair.dim_h(), k);
                for t in 0..v.len() {
                    let img = self.pair.bott(&ek, &unit(kb, v[t]));
                    for (d, c) in img.iter().enumerate() {
                        if c.is_zero() {
                            continue;
                        }
                        let mut w = v.to_vec();
                        w[t] = d;
                        w.sort_unstable();
                        out.add_term(w, c);
                    }
                }
                out
            }
            Coeffs::Ula(_) => self.ug.ula_act(k, &WordVec::word(v.to_vec())),
        }
    }

    fn check_label(&self, w: &[usize]) -> Result<()> {
        let cap = self.coeffs.cap();
        if w.len() > cap || (self.coeffs == Coeffs::B && w.len() != 1) {
            return Err(Error::TruncationOverflow { weight: w.len(), cap });
        }
        Ok(())
    }

    /// `d(ω ⊗ v) = dω ⊗ v + Σ_k ξ^k ∧ ω ⊗ (e_k ▷ v)`.
    pub fn d(&self, x: &CeElement) -> Result<CeElement> {
        let mut out = CeElement::zero(self.coeffs);
        for ((mask, w), c) in x.terms() {
            self.check_label(w)?;
            let omega = Ext::monomial(*mask, c.clone());
            let d_omega = self.ext.d(&omega);
            for (mm, cc) in d_omega.terms() {
                out.add_term(mm, w.clone(), cc);
            }
            for k in 0..self.pair.dim_h() {
                let act = self.action(k, w);
                if act.is_zero() {
                    continue;
                }
                let xo = Ext::gen(k).wedge(&omega);
                out.add_scaled(&CeElement::tensor(self.coeffs, &xo, &act), &Scalar::one());
            }
        }
        Ok(out)
    }

    pub fn module_basis(&self) -> Vec<Vec<usize>> {
        match self.coeffs {
            Coeffs::B => (0..self.pair.dim_b()).map(|l| vec![l]).collect(),
            Coeffs::Sym(n) | Coeffs::Ula(n) => monomials(self.pair.dim_b(), n),
        }
    }

    /// Basis ordered by module monomial, then exterior mask.
    pub fn space(&self) -> GradedSpace<CeLabel> {
        let mut basis = Vec::new();
        for w in self.module_basis() {
            for &m in self.ext.masks() {
                basis.push(((m, w.clone()), mask_degree(m)));
            }
        }
        GradedSpace::new(basis).expect("distinct labels")
    }

    pub fn to_vector(&self, space: &GradedSpace<CeLabel>, x: &CeElement) -> Result<Vector> {
        let mut v = Vector::new();
        for (l, c) in x.terms() {
            let i = space
                .index_of(l)
                .ok_or(Error::TruncationOverflow { weight: l.1.len(), cap: self.coeffs.cap() })?;
            v.add_term(i, c);
        }
        Ok(v)
    }

    pub fn from_vector(&self, space: &GradedSpace<CeLabel>, v: &Vector) -> CeElement {
        let mut e = CeElement::zero(self.coeffs);
        for (i, c) in v.iter() {
            let (m, w) = space.label(i);
            e.add_term(*m, w.clone(), c);
        }
        e
    }

    /// The differential as a matrix on [`CeComplex::space`].
    pub fn matrix(&self, space: &GradedSpace<CeLabel>) -> Result<LinearOperator> {
        let mut cols = Vec::with_capacity(space.dim());
        for (m, w) in space.labels() {
            let x = CeElement::term(self.coeffs, *m, w.clone(), Scalar::one());
            cols.push(self.to_vector(space, &self.d(&x)?)?);
        }
        LinearOperator::new(space.degrees().clone(), space.degrees().clone(), 1, cols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::complex_cohomology;

    fn q(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn pairs() -> Vec<Arc<LiePair>> {
        vec![
            Arc::new(LiePair::from_antisymmetric(2, 1, &[(0, 1, 1, q(1))]).unwrap()),
            Arc::new(LiePair::from_antisymmetric(3, 1, &[(0, 1, 2, q(1))]).unwrap()),
            Arc::new(LiePair::from_antisymmetric(3, 1, &[(1, 2, 0, q(1))]).unwrap()),
            Arc::new(
                LiePair::from_antisymmetric(3, 2, &[(0, 1, 1, q(2)), (0, 2, 2, q(-2)), (1, 2, 0, q(1))])
                    .unwrap(),
            ),
            Arc::new(LiePair::new(3, 2, &[]).unwrap()),
        ]
    }

    #[test]
    fn solvable_examples() {
        let p = pairs()[0].clone();
        let b = CeComplex::new(p.clone(), Coeffs::B);
        let x = CeElement::term(Coeffs::B, 0, vec![0], q(1));
        assert_eq!(b.d(&x).unwrap(), CeElement::term(Coeffs::B, 1, vec![0], q(1)));
        let u = CeComplex::new(p.clone(), Coeffs::Ula(3));
        for n in 1..=3 {
            let x = CeElement::term(Coeffs::Ula(3), 0, vec![0; n], q(1));
            assert_eq!(u.d(&x).unwrap(), CeElement::term(Coeffs::Ula(3), 1, vec![0; n], q(n as i64)));
        }
        let s = b.space();
        let h = complex_cohomology(&b.matrix(&s).unwrap(), None).unwrap();
        assert_eq!(h.degrees[&0].rank() + h.degrees[&1].rank(), 0);
        let triv = CeComplex::new(p, Coeffs::Ula(0));
        let st = triv.space();
        let ht = complex_cohomology(&triv.matrix(&st).unwrap(), None).unwrap();
        assert_eq!((ht.degrees[&0].rank(), ht.degrees[&1].rank()), (1, 1));
    }

    #[test]
    fn abelian_is_zero() {
        let p = pairs()[4].clone();
        for c in [Coeffs::B, Coeffs::Sym(3), Coeffs::Ula(3)] {
            let cx = CeComplex::new(p.clone(), c);
            let s = cx.space();
            assert!(cx.matrix(&s).unwrap().is_zero());
        }
    }

    #[test]
    fn squares_to_zero() {
        for p in pairs() {
            for c in [Coeffs::B, Coeffs::Sym(3), Coeffs::Ula(3)] {
                let cx = CeComplex::new(p.clone(), c);
                let s = cx.space();
                let d = cx.matrix(&s).unwrap();
                assert!(d.compose(&d).unwrap().is_zero(), "{c:?}");
            }
        }
    }

    #[test]
    fn derivation_over_scalars() {
        for p in pairs() {
            for c in [Coeffs::B, Coeffs::Sym(2), Coeffs::Ula(2)] {
                let cx = CeComplex::new(p.clone(), c);
                let s = cx.space();
                for &om in cx.ext().masks() {
                    let omega = Ext::monomial(om, q(1));
                    for (m, w) in s.labels() {
                        let y = CeElement::term(c, *m, w.clone(), q(1));
                        let lhs = cx.d(&y.left_mul(&omega)).unwrap();
                        let mut rhs = y.left_mul(&cx.ext().d(&omega));
                        rhs.add_scaled(
                            &cx.d(&y).unwrap().left_mul(&omega),
                            &Scalar::sign(mask_degree(om) as i64),
                        );
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn overflow_is_reported() {
        let p = pairs()[0].clone();
        let cx = CeComplex::new(p, Coeffs::Sym(2));
        let x = CeElement::term(Coeffs::Sym(2), 0, vec![0, 0, 0], q(1));
        assert!(matches!(cx.d(&x), Err(Error::TruncationOverflow { .. })));
    }
}
