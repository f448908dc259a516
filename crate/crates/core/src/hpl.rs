//! Contractions, conjugation by filtered isomorphisms, the homological
//! perturbation lemma, and the main contraction of 𝒰(π^!L) onto
//! Λ𝔥^∨ ⊗ 𝒰_{L/A}.
//!
//! Convention: `id − IP = HD + DH`.

use std::sync::Arc;

use rayon::prelude::*;

use crate::ce::{CeComplex, CeElement, Coeffs};
use crate::enveloping::pbw::PbwMap;
use crate::enveloping::sym::SymAlg;
use crate::enveloping::uenv::Uenv;
use crate::enveloping::ug::{Pbw, Ug};
use crate::enveloping::{word_operator, word_space, word_weights, Label, MonoVec};
use crate::error::{Error, Result};
use crate::graded::{GradedSpace, LinearOperator, Vector};
use crate::lie_pair::{unit, Bilinear, ConnectionSet, Coords, LiePair};
use crate::scalar::Scalar;
use crate::sections::{Check, Frame};

pub type Space = GradedSpace<Label>;

/// `(P, I, H)` between `(big, D)` and `(small, d)`, with a filtration weight
/// on the big basis.
#[derive(Clone, Debug)]
pub struct Contraction {
    pub big: Space,
    pub small: Space,
    pub weights: Vec<usize>,
    pub d_big: LinearOperator,
    pub d_small: LinearOperator,
    pub p: LinearOperator,
    pub i: LinearOperator,
    pub h: LinearOperator,
}

/// Output of [`Contraction::perturb`].
#[derive(Clone, Debug)]
pub struct Perturbation {
    pub contraction: Contraction,
    /// Largest `k` with `(Hδ)^k I`, `P(δH)^k` or `H(δH)^k` nonzero.
    pub terms: usize,
}

/// First `(column, row)` where `op` does not strictly lower the weight.
pub fn lowering_violation(op: &LinearOperator, weights: &[usize]) -> Option<(usize, usize)> {
    op.cols()
        .iter()
        .enumerate()
        .find_map(|(j, col)| col.iter().find(|(i, _)| weights[*i] >= weights[j]).map(|(i, _)| (j, i)))
}

fn zero(dom: &Space, cod: &Space, shift: i32) -> LinearOperator {
    LinearOperator::zero(dom.degrees(), cod.degrees(), shift)
}

/// Whether `op` preserves the filtration given by `weights` and is bijective
/// on every level.
pub fn filtered_bijective(op: &LinearOperator, weights: &[usize]) -> bool {
    let top = weights.iter().copied().max().unwrap_or(0);
    for (j, col) in op.cols().iter().enumerate() {
        if col.iter().any(|(i, _)| weights[i] > weights[j]) {
            return false;
        }
    }
    (0..=top).all(|w| {
        let idx: Vec<usize> = (0..weights.len()).filter(|&j| weights[j] <= w).collect();
        let degs = Arc::new(vec![0; idx.len()]);
        let pos: std::collections::HashMap<usize, usize> = idx.iter().enumerate().map(|(a, &b)| (b, a)).collect();
        let cols = idx.iter().map(|&j| op.col(j).iter().map(|(i, c)| (pos[&i], c.clone())).collect()).collect();
        let sub = LinearOperator::new(degs.clone(), degs, 0, cols).expect("square block");
        sub.rank() == idx.len()
    })
}

impl Contraction {
    /// Chain-map, deformation-retract and side-condition identities.
    pub fn checks(&self, tag: &str) -> Result<Vec<Check>> {
        let (b, s) = (&self.big, &self.small);
        let id_b = LinearOperator::identity(b.degrees());
        let id_s = LinearOperator::identity(s.degrees());
        let hd = self.h.compose(&self.d_big)?;
        let dh = self.d_big.compose(&self.h)?;
        let name = |x: &str| format!("{tag}: {x}");
        let h_filtered = self
            .h
            .cols()
            .iter()
            .enumerate()
            .find(|(j, c)| c.iter().any(|(i, _)| self.weights[i] > self.weights[*j]));
        Ok(vec![
            Check::equal(&name("D D = 0"), &self.d_big.compose(&self.d_big)?, &zero(b, b, 2), b),
            Check::equal(&name("d d = 0"), &self.d_small.compose(&self.d_small)?, &zero(s, s, 2), s),
            Check::equal(&name("P D = d P"), &self.p.compose(&self.d_big)?, &self.d_small.compose(&self.p)?, b),
            Check::equal(&name("D I = I d"), &self.d_big.compose(&self.i)?, &self.i.compose(&self.d_small)?, s),
            Check::equal(&name("P I = id"), &self.p.compose(&self.i)?, &id_s, s),
            Check::equal(&name("id - I P = H D + D H"), &id_b.sub(&self.i.compose(&self.p)?)?, &hd.add(&dh)?, b),
            Check::equal(&name("H I = 0"), &self.h.compose(&self.i)?, &zero(s, b, -1), s),
            Check::equal(&name("P H = 0"), &self.p.compose(&self.h)?, &zero(b, s, -1), b),
            Check::equal(&name("H H = 0"), &self.h.compose(&self.h)?, &zero(b, b, -2), b),
            Check::new(
                name("H preserves the filtration"),
                h_filtered.is_none(),
                h_filtered.map(|(j, _)| format!("basis element {:?}", b.label(j))),
            ),
        ])
    }

    /// Push forward along `big_iso` and `small_iso`, given with their
    /// inverses.
    pub fn conjugate(
        &self,
        big_iso: (&LinearOperator, &LinearOperator),
        small_iso: (&LinearOperator, &LinearOperator),
    ) -> Result<Contraction> {
        let (f, fi) = big_iso;
        let (g, gi) = small_iso;
        let id_b = LinearOperator::identity(self.big.degrees());
        let id_s = LinearOperator::identity(self.small.degrees());
        if f.compose(fi)?.first_difference(&id_b).is_some() || fi.compose(f)?.first_difference(&id_b).is_some() {
            return Err(Error::NotInvertible);
        }
        if g.compose(gi)?.first_difference(&id_s).is_some() || gi.compose(g)?.first_difference(&id_s).is_some() {
            return Err(Error::NotInvertible);
        }
        Ok(Contraction {
            big: self.big.clone(),
            small: self.small.clone(),
            weights: self.weights.clone(),
            d_big: f.compose(&self.d_big)?.compose(fi)?,
            d_small: g.compose(&self.d_small)?.compose(gi)?,
            p: g.compose(&self.p)?.compose(fi)?,
            i: f.compose(&self.i)?.compose(gi)?,
            h: f.compose(&self.h)?.compose(fi)?,
        })
    }

    /// Perturb `D` to `D + δ`:
    /// `I′ = Σ(−Hδ)^k I`, `P′ = PΣ(−δH)^k`, `H′ = HΣ(−δH)^k`, `d′ = d + P′δI`.
    pub fn perturb(&self, delta: &LinearOperator) -> Result<Perturbation> {
        let w = &self.weights;
        if let Some((j, i)) = lowering_violation(delta, w) {
            return Err(Error::NotNilpotent(format!(
                "{:?} has a component on {:?}",
                self.big.label(j),
                self.big.label(i)
            )));
        }
        let d_new = self.d_big.add(delta)?;
        if let Some((j, _)) = d_new.compose(&d_new)?.first_difference(&zero(&self.big, &self.big, 2)) {
            return Err(Error::Construction(format!(
                "perturbed differential is not square-zero on {:?}",
                self.big.label(j)
            )));
        }
        let minus = -Scalar::one();
        let hd = self.h.compose(delta)?.scale(&minus);
        let dh = delta.compose(&self.h)?.scale(&minus);
        let limit = w.iter().copied().max().unwrap_or(0) + 1;
        let mut terms = 0;
        let series = |start: &LinearOperator, left: bool| -> Result<(LinearOperator, usize)> {
            let mut acc = start.clone();
            let mut t = start.clone();
            let mut k = 0;
            loop {
                t = if left { hd.compose(&t)? } else { t.compose(&dh)? };
                if t.is_zero() {
                    return Ok((acc, k));
                }
                k += 1;
                if k > limit {
                    return Err(Error::NotNilpotent("perturbation series does not terminate".into()));
                }
                acc = acc.add(&t)?;
            }
        };
        let (i_new, k1) = series(&self.i, true)?;
        let (p_new, k2) = series(&self.p, false)?;
        let (h_new, k3) = series(&self.h, false)?;
        terms = terms.max(k1).max(k2).max(k3);
        let d_small = self.d_small.add(&p_new.compose(delta)?.compose(&self.i)?)?;
        Ok(Perturbation {
            contraction: Contraction {
                big: self.big.clone(),
                small: self.small.clone(),
                weights: self.weights.clone(),
                d_big: d_new,
                d_small,
                p: p_new,
                i: i_new,
                h: h_new,
            },
            terms,
        })
    }

    /// Enforce `HI = 0`, `PH = 0` and `H² = 0`:
    /// `H₁ = (id − IP) H (id − IP)`, then `H₂ = H₁ D H₁`.
    pub fn normalize_side_conditions(&self) -> Result<Contraction> {
        let id_b = LinearOperator::identity(self.big.degrees());
        let pi = id_b.sub(&self.i.compose(&self.p)?)?;
        let h1 = pi.compose(&self.h)?.compose(&pi)?;
        let h2 = h1.compose(&self.d_big)?.compose(&h1)?;
        Ok(Contraction { h: h2, ..self.clone() })
    }
}

/// The choices entering the construction.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Choices {
    /// `k × m` matrix: the new complement vector `b_l` is
    /// `x_{m+l} + Σ_a S[l][a] e_a`.
    pub splitting: Option<Vec<Coords>>,
    /// Auxiliary connection `∇′`, in the basis after the splitting.
    pub aux: Option<Bilinear>,
}

impl Choices {
    /// Change-of-basis rows for the splitting.
    pub fn basis_rows(&self, pair: &LiePair) -> Result<Vec<Coords>> {
        let (n, m, k) = (pair.dim_g(), pair.dim_h(), pair.dim_b());
        let mut t: Vec<Coords> = (0..n).map(|a| unit(n, a)).collect();
        if let Some(s) = &self.splitting {
            if s.len() != k || s.iter().any(|r| r.len() != m) {
                return Err(Error::InvalidInput(format!("splitting must be a {k}×{m} matrix")));
            }
            for (l, row) in s.iter().enumerate() {
                t[m + l][..m].clone_from_slice(row);
            }
        }
        Ok(t)
    }

    /// The pair in the split basis and its connections.
    pub fn apply(&self, pair: &LiePair) -> Result<(Arc<LiePair>, Arc<ConnectionSet>)> {
        let (p, _) = pair.change_basis(&self.basis_rows(pair)?)?;
        let aux = self.aux.clone().unwrap_or_else(|| Bilinear::zero(p.dim_g()));
        let conn = ConnectionSet::build(&p, &aux)?;
        Ok((Arc::new(p), Arc::new(conn)))
    }
}

fn ce_vector(space: &Space, x: &CeElement) -> Result<Vector> {
    let mut v = Vector::new();
    for (l, c) in x.terms() {
        let i = space.index_of(l).ok_or(Error::TruncationOverflow { weight: l.1.len(), cap: x.coeffs.cap() })?;
        v.add_term(i, c);
    }
    Ok(v)
}

fn to_small<F>(dom: &Space, cod: &Space, shift: i32, f: F) -> Result<LinearOperator>
where
    F: Fn(&MonoVec) -> Result<CeElement> + Sync,
{
    let cols = dom
        .labels()
        .par_iter()
        .map(|(m, w)| ce_vector(cod, &f(&MonoVec::term(*m, w.clone(), Scalar::one()))?))
        .collect::<Result<Vec<_>>>()?;
    LinearOperator::new(dom.degrees().clone(), cod.degrees().clone(), shift, cols)
}

fn from_small<F>(dom: &Space, cod: &Space, shift: i32, coeffs: Coeffs, f: F) -> Result<LinearOperator>
where
    F: Fn(&CeElement) -> Result<MonoVec> + Sync,
{
    let cols = dom
        .labels()
        .par_iter()
        .map(|(m, w)| f(&CeElement::term(coeffs, *m, w.clone(), Scalar::one()))?.to_vector(cod))
        .collect::<Result<Vec<_>>>()?;
    LinearOperator::new(dom.degrees().clone(), cod.degrees().clone(), shift, cols)
}

/// Every stage of the main construction at truncation `cap`.
#[derive(Debug)]
pub struct MainContraction {
    pub pair: Arc<LiePair>,
    pub frame: Arc<Frame>,
    pub uenv: Arc<Uenv>,
    pub sym: Arc<SymAlg>,
    pub pbw: Arc<PbwMap>,
    pub ug: Ug,
    pub cap: usize,
    pub big: Space,
    pub small: Space,
    /// `(S(π^!L), D_S) ⇄ (Λ𝔥^∨ ⊗ S(B), d_A)`.
    pub symmetric: Contraction,
    /// Conjugated by `PBW` and `id ⊗ pbw`.
    pub conjugated: Contraction,
    /// Perturbed by `δ = D_U − D_S^pbw`.
    pub perturbed: Perturbation,
    pub delta: LinearOperator,
    pub d_u: LinearOperator,
    pub p_u: LinearOperator,
    pub d_a: LinearOperator,
    pub pbw_big: LinearOperator,
    pub pbw_big_inv: LinearOperator,
    pub pbw_small: LinearOperator,
    pub pbw_small_inv: LinearOperator,
}

/// Contraction → tensor trick → PBW conjugation → perturbation. Fails when
/// the perturbed projection or differential differ from `P_U` or `d_A`.
pub fn build_main_contraction(pair: &LiePair, choices: &Choices, cap: usize) -> Result<MainContraction> {
    let (pair, conn) = choices.apply(pair)?;
    let frame = Arc::new(Frame::new(pair.clone(), conn.clone()));
    let uenv = Arc::new(Uenv::new(frame.clone()));
    let sym = Arc::new(SymAlg::new(frame.clone()));
    let pbw = Arc::new(PbwMap::new(uenv.clone(), sym.clone(), cap));
    let ug = Ug::new(pair.clone());
    let deg = uenv.gen_degrees().to_vec();
    let big = word_space(&deg, frame.ext().masks(), cap);
    let weights = word_weights(&big);
    let ce_sym = CeComplex::new(pair.clone(), Coeffs::Sym(cap));
    let ce_ula = CeComplex::new(pair.clone(), Coeffs::Ula(cap));
    let small = ce_sym.space();

    let symmetric = Contraction {
        d_big: word_operator(&big, &big, 1, |x| Ok(sym.d_s(x)))?,
        d_small: ce_sym.matrix(&small)?,
        p: to_small(&big, &small, 0, |x| Ok(sym.p_s(x, cap)))?,
        i: from_small(&small, &big, 0, Coeffs::Sym(cap), |x| Ok(sym.i_s(x)))?,
        h: word_operator(&big, &big, -1, |x| Ok(sym.h_s(x)))?,
        big: big.clone(),
        small: small.clone(),
        weights,
    };

    let pbw_big = word_operator(&big, &big, 0, |x| pbw.apply(x))?;
    let pbw_big_inv = word_operator(&big, &big, 0, |x| pbw.apply_inverse(x))?;
    let small_map = Pbw::new(ug.clone(), conn, cap);
    let pbw_small = LinearOperator::from_fn(small.degrees(), small.degrees(), 0, |j| {
        let (m, w) = small.label(j);
        let img = small_map.apply_monomial(w).expect("monomial within cap");
        img.terms().map(|(v, c)| (small.index_of(&(*m, v.clone())).expect("label"), c.clone())).collect()
    })?;
    let pbw_small_inv = pbw_small.inverse()?;
    let conjugated = symmetric.conjugate((&pbw_big, &pbw_big_inv), (&pbw_small, &pbw_small_inv))?;

    let d_u = word_operator(&big, &big, 1, |x| uenv.d_u(x, Some(cap)))?;
    let delta = d_u.sub(&conjugated.d_big)?;
    let perturbed = conjugated.perturb(&delta)?;
    let p_u = to_small(&big, &small, 0, |x| Ok(uenv.p_u(x, cap)))?;
    let d_a = ce_ula.matrix(&small)?;

    if let Some((j, diff)) = perturbed.contraction.p.first_difference(&p_u) {
        return Err(Error::Construction(format!(
            "perturbed projection differs from P_U on {:?}: {diff:?}",
            big.label(j)
        )));
    }
    if let Some((j, diff)) = perturbed.contraction.d_small.first_difference(&d_a) {
        return Err(Error::Construction(format!(
            "perturbed differential differs from d_A on {:?}: {diff:?}",
            small.label(j)
        )));
    }
    Ok(MainContraction {
        pair,
        frame,
        uenv,
        sym,
        pbw,
        ug,
        cap,
        big,
        small,
        symmetric,
        conjugated,
        perturbed,
        delta,
        d_u,
        p_u,
        d_a,
        pbw_big,
        pbw_big_inv,
        pbw_small,
        pbw_small_inv,
    })
}

impl MainContraction {
    /// The contraction of 𝒰(π^!L) onto Λ𝔥^∨ ⊗ 𝒰_{L/A}.
    pub fn contraction(&self) -> &Contraction {
        &self.perturbed.contraction
    }

    /// The PBW checks: bijectivity per filtration level and the values on
    /// generators.
    pub fn pbw_checks(&self) -> Vec<Check> {
        let weights = &self.symmetric.weights;
        let small_w: Vec<usize> = self.small.labels().iter().map(|(_, w)| w.len()).collect();
        let gens_fixed = self.big.labels().iter().enumerate().filter(|(_, (_, w))| w.len() <= 1).all(|(j, _)| {
            let col = self.pbw_big.col(j);
            col.len() == 1 && col.get(j) == Scalar::one()
        });
        let small_fixed = self.small.labels().iter().enumerate().filter(|(_, (_, w))| w.len() <= 1).all(|(j, _)| {
            let col = self.pbw_small.col(j);
            col.len() == 1 && col.get(j) == Scalar::one()
        });
        vec![
            Check::new("PBW bijective on every level", filtered_bijective(&self.pbw_big, weights), None),
            Check::new("pbw bijective on every level", filtered_bijective(&self.pbw_small, &small_w), None),
            Check::equal(
                "PBW^-1 PBW = id",
                &self.pbw_big_inv.compose(&self.pbw_big).expect("square"),
                &LinearOperator::identity(self.big.degrees()),
                &self.big,
            ),
            Check::new("PBW(f) = f, PBW(s) = s", gens_fixed, None),
            Check::new("pbw(f) = f, pbw(b) = b", small_fixed, None),
        ]
    }

    /// `P_U ∘ I^pbw = id`, `P_U ∘ H^pbw = 0`, `P^hp = P_U`, `d^hp = d_A`.
    pub fn projection_checks(&self) -> Result<Vec<Check>> {
        let c = &self.conjugated;
        let hp = self.contraction();
        let (b, s) = (&self.big, &self.small);
        Ok(vec![
            Check::equal("P_U I^pbw = id", &self.p_u.compose(&c.i)?, &LinearOperator::identity(s.degrees()), s),
            Check::equal("P_U H^pbw = 0", &self.p_u.compose(&c.h)?, &zero(b, s, -1), b),
            Check::equal("P^hp = P_U", &hp.p, &self.p_u, b),
            Check::equal("d^hp = d_A", &hp.d_small, &self.d_a, s),
            Check::equal("P_U D_U = d_A P_U", &self.p_u.compose(&self.d_u)?, &self.d_a.compose(&self.p_u)?, b),
        ])
    }

    /// Perturbation data: δ lowers the filtration by one, the series stops
    /// within `cap` terms, and the perturbed data form a contraction.
    pub fn perturbation_checks(&self) -> Result<Vec<Check>> {
        let mut out = vec![
            match lowering_violation(&self.delta, &self.symmetric.weights) {
                None => Check::new("delta lowers the filtration by one", true, None),
                Some((j, i)) => Check::new(
                    "delta lowers the filtration by one",
                    false,
                    Some(format!("{:?} has a component on {:?}", self.big.label(j), self.big.label(i))),
                ),
            },
            Check::new(
                "perturbation series terminates within N terms",
                self.perturbed.terms <= self.cap,
                Some(format!("{} terms", self.perturbed.terms)),
            ),
        ];
        out.extend(self.contraction().checks("perturbed")?);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn solvable() -> LiePair {
        LiePair::from_antisymmetric(2, 1, &[(0, 1, 1, q(1))]).unwrap()
    }

    fn all_pass(checks: &[Check]) {
        for c in checks {
            assert!(c.pass, "{} {:?}", c.name, c.witness);
        }
    }

    #[test]
    fn main_contraction_small_pairs() {
        let pairs = vec![
            solvable(),
            LiePair::from_antisymmetric(3, 1, &[(0, 1, 2, q(1))]).unwrap(),
            LiePair::from_antisymmetric(3, 1, &[(1, 2, 0, q(1))]).unwrap(),
            LiePair::new(2, 1, &[]).unwrap(),
            LiePair::from_antisymmetric(2, 0, &[(0, 1, 1, q(1))]).unwrap(),
        ];
        for p in pairs {
            let mc = build_main_contraction(&p, &Choices::default(), 3).unwrap();
            all_pass(&mc.symmetric.checks("symmetric").unwrap());
            all_pass(&mc.conjugated.checks("conjugated").unwrap());
            all_pass(&mc.pbw_checks());
            all_pass(&mc.projection_checks().unwrap());
            all_pass(&mc.perturbation_checks().unwrap());
        }
    }

    #[test]
    fn zero_perturbation_and_identity_conjugation() {
        let mc = build_main_contraction(&solvable(), &Choices::default(), 2).unwrap();
        let c = &mc.symmetric;
        let z = zero(&c.big, &c.big, 1);
        let p = c.perturb(&z).unwrap();
        assert_eq!(p.terms, 0);
        assert!(p.contraction.p.first_difference(&c.p).is_none());
        assert!(p.contraction.h.first_difference(&c.h).is_none());
        assert!(p.contraction.d_small.first_difference(&c.d_small).is_none());
        let ib = LinearOperator::identity(c.big.degrees());
        let is = LinearOperator::identity(c.small.degrees());
        let same = c.conjugate((&ib, &ib), (&is, &is)).unwrap();
        assert!(same.h.first_difference(&c.h).is_none());
        assert!(same.i.first_difference(&c.i).is_none());
    }

    #[test]
    fn rejects_bad_perturbations() {
        let mc = build_main_contraction(&solvable(), &Choices::default(), 2).unwrap();
        let c = &mc.symmetric;
        let bad = c.d_big.scale(&q(1));
        assert!(matches!(c.perturb(&bad), Err(Error::NotNilpotent(_))));
    }

    #[test]
    fn normalization_restores_side_conditions() {
        let mc = build_main_contraction(&solvable(), &Choices::default(), 2).unwrap();
        let c = &mc.symmetric;
        // H′ = H + DK − KD keeps id − IP = H′D + DH′ for K of degree −2
        let degs = c.big.degrees().clone();
        let k = LinearOperator::from_fn(&degs, &degs, -2, |j| match degs.iter().position(|&d| d == degs[j] - 2) {
            Some(i) => Vector::unit(i),
            None => Vector::new(),
        })
        .unwrap();
        assert!(!k.is_zero());
        let commutator = c.d_big.compose(&k).unwrap().sub(&k.compose(&c.d_big).unwrap()).unwrap();
        let spoiled = Contraction { h: c.h.add(&commutator).unwrap(), ..c.clone() };
        assert!(spoiled.checks("spoiled").unwrap().iter().any(|x| !x.pass));
        let fixed = spoiled.normalize_side_conditions().unwrap();
        all_pass(&fixed.checks("normalized").unwrap());
    }
}
