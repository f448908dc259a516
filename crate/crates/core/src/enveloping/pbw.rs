//! The connection ∇ on π^!L and the PBW isomorphism S(π^!L) → 𝒰(π^!L).

use std::collections::HashMap;
use std::sync::Arc;

use super::sym::SymAlg;
use super::uenv::Uenv;
use super::{normal_words, MonoVec};
use crate::error::{Error, Result};
use crate::exterior::{mask_degree, Ext};
use crate::scalar::Scalar;
use crate::sections::{Frame, Gen};

/// `∇_{g} h` on frame generators: `∇_{φ_v} φ_{v′} = φ_{∇^L_v v′}`,
/// `∇_{φ_v} τ_a = τ_{∇^A_v e_a}`, and `∇_τ = 0`.
pub fn nabla_gen(frame: &Frame, g: usize, h: usize) -> MonoVec {
    let mut out = MonoVec::zero();
    let Some(v) = frame.related_vector(g) else { return out };
    let conn = frame.conn();
    match frame.gen(h) {
        Gen::Tau(a) => {
            for b in 0..frame.dim_h() {
                let c = conn.a_coeff(v, a, b);
                out.add_term(0, vec![frame.index(Gen::Tau(b))], c);
            }
        }
        _ => {
            let w = frame.related_vector(h).expect("related");
            for z in 0..frame.pair().dim_g() {
                out.add_term(0, vec![frame.phi_index(z)], conn.l_coeff(v, w, z));
            }
        }
    }
    out
}

/// `∇_s t` for sections `s, t` of weight one: Λ𝔥^∨-linear in `s`, and
/// `∇_g(f·h) = X_g(f)·h + (−1)^{|g||f|} f·∇_g h`.
pub fn nabla(frame: &Frame, s: &MonoVec, t: &MonoVec) -> MonoVec {
    let mut out = MonoVec::zero();
    for ((ms, ws), cs) in s.terms() {
        let f = Ext::monomial(*ms, cs.clone());
        let g = ws[0];
        let dg = frame.gen_degree(g);
        let x = &frame.generator(g).x;
        let mut inner = MonoVec::zero();
        for ((mt, wt), ct) in t.terms() {
            let ft = Ext::monomial(*mt, ct.clone());
            inner.add_scaled(&MonoVec::from_ext(&x.apply(&ft), wt.clone()), &Scalar::one());
            let sign = Scalar::sign((dg * mask_degree(*mt)) as i64);
            inner.add_scaled(&nabla_gen(frame, g, wt[0]).left_mul_ext(&ft), &sign);
        }
        out.add_scaled(&inner.left_mul_ext(&f), &Scalar::one());
    }
    out
}

/// The PBW map for the frame connection, tabulated on normal words of weight
/// ≤ `cap` together with its inverse.
#[derive(Debug)]
pub struct PbwMap {
    uenv: Arc<Uenv>,
    sym: Arc<SymAlg>,
    cap: usize,
    table: HashMap<Vec<usize>, MonoVec>,
    inverse: HashMap<Vec<usize>, MonoVec>,
}

impl PbwMap {
    pub fn new(uenv: Arc<Uenv>, sym: Arc<SymAlg>, cap: usize) -> Self {
        let mut p = PbwMap { uenv, sym, cap, table: HashMap::new(), inverse: HashMap::new() };
        let words = normal_words(p.uenv.gen_degrees(), cap);
        for w in &words {
            let v = p.compute(w);
            p.table.insert(w.clone(), v);
        }
        for w in &words {
            let v = p.compute_inverse(w);
            p.inverse.insert(w.clone(), v);
        }
        p
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn uenv(&self) -> &Arc<Uenv> {
        &self.uenv
    }

    pub fn sym(&self) -> &Arc<SymAlg> {
        &self.sym
    }

    /// `∇_g x` for a generator `g` and a symmetric element `x`, extended as a
    /// derivation of degree `|g|`.
    pub fn nabla_sym(&self, g: usize, x: &MonoVec) -> MonoVec {
        let frame = self.uenv.frame();
        let deg = self.uenv.gen_degrees();
        let dg = deg[g];
        let anchor = &frame.generator(g).x;
        let mut out = MonoVec::zero();
        for ((mask, w), c) in x.terms() {
            let f = Ext::monomial(*mask, c.clone());
            out.add_scaled(&MonoVec::from_ext(&anchor.apply(&f), w.clone()), &Scalar::one());
            let mut acc = mask_degree(*mask);
            for j in 0..w.len() {
                let prefix = MonoVec::word(w[..j].to_vec());
                let suffix = MonoVec::word(w[j + 1..].to_vec());
                let mid = nabla_gen(frame, g, w[j]);
                let t = self.sym.mul(&self.sym.mul(&prefix, &mid), &suffix);
                out.add_scaled(&t.left_mul_ext(&Ext::monomial(*mask, c.clone())), &Scalar::sign((dg * acc) as i64));
                acc += deg[w[j]];
            }
        }
        out
    }

    fn lookup(table: &HashMap<Vec<usize>, MonoVec>, x: &MonoVec, cap: usize) -> Result<MonoVec> {
        let mut out = MonoVec::zero();
        for ((mask, w), c) in x.terms() {
            let img = table.get(w).ok_or(Error::TruncationOverflow { weight: w.len(), cap })?;
            out.add_scaled(&img.left_mul_ext(&Ext::monomial(*mask, c.clone())), &Scalar::one());
        }
        Ok(out)
    }

    fn compute(&self, w: &[usize]) -> MonoVec {
        let n = w.len();
        if n <= 1 {
            return MonoVec::word(w.to_vec());
        }
        let deg = self.uenv.gen_degrees();
        let inv = Scalar::ratio(1, n as i64);
        let mut out = MonoVec::zero();
        let mut before = 0;
        for i in 0..n {
            let mut rest = w.to_vec();
            let g = rest.remove(i);
            let sign = &Scalar::sign((deg[g] * before) as i64) * &inv;
            before += deg[g];
            let head = self.uenv.gen_times(g, &self.table[&rest]);
            out.add_scaled(&head, &sign);
            let nab = self.nabla_sym(g, &MonoVec::word(rest));
            let low = Self::lookup(&self.table, &nab, self.cap).expect("lower weight");
            out.add_scaled(&low, &-sign);
        }
        out
    }

    fn compute_inverse(&self, w: &[usize]) -> MonoVec {
        let mut lower = self.table[w].clone();
        lower.add_term(0, w.to_vec(), &-Scalar::one());
        let mut out = MonoVec::word(w.to_vec());
        out.add_scaled(&Self::lookup(&self.inverse, &lower, self.cap).expect("lower weight"), &-Scalar::one());
        out
    }

    /// `PBW`, Λ𝔥^∨-linear.
    pub fn apply(&self, x: &MonoVec) -> Result<MonoVec> {
        Self::lookup(&self.table, x, self.cap)
    }

    /// `PBW⁻¹`, Λ𝔥^∨-linear.
    pub fn apply_inverse(&self, x: &MonoVec) -> Result<MonoVec> {
        Self::lookup(&self.inverse, x, self.cap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ce::{CeElement, Coeffs};
    use crate::enveloping::ug::{Pbw, Ug};
    use crate::enveloping::{word_operator, word_space};
    use crate::graded::LinearOperator;
    use crate::lie_pair::{Bilinear, ConnectionSet, LiePair};

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
            Arc::new(LiePair::from_antisymmetric(2, 0, &[(0, 1, 1, q(1))]).unwrap()),
        ]
    }

    fn build(p: &Arc<LiePair>, aux: &Bilinear, cap: usize) -> PbwMap {
        let conn = Arc::new(ConnectionSet::build(p, aux).unwrap());
        let frame = Arc::new(Frame::new(p.clone(), conn));
        PbwMap::new(Arc::new(Uenv::new(frame.clone())), Arc::new(SymAlg::new(frame)), cap)
    }

    fn auxes(p: &LiePair) -> Vec<Bilinear> {
        let n = p.dim_g();
        vec![Bilinear::zero(n), Bilinear::from_entries(n, &[(0, 0, n - 1, q(1)), (n - 1, 0, 0, q(2))]).unwrap()]
    }

    #[test]
    fn generators_are_fixed() {
        for p in pairs() {
            let b = build(&p, &Bilinear::zero(p.dim_g()), 2);
            let f = b.uenv().frame().clone();
            for g in 0..f.num_gens() {
                let mask = if f.dim_h() > 0 { 1 } else { 0 };
                let x = MonoVec::term(mask, vec![g], q(3));
                assert_eq!(b.apply(&x).unwrap(), x);
            }
            assert_eq!(b.apply(&MonoVec::one()).unwrap(), MonoVec::one());
        }
    }

    #[test]
    fn two_letter_formula() {
        for p in pairs() {
            for aux in auxes(&p) {
                let b = build(&p, &aux, 2);
                let u = b.uenv().clone();
                let f = u.frame().clone();
                let deg = u.gen_degrees().to_vec();
                for w in normal_words(&deg, 2).into_iter().filter(|w| w.len() == 2) {
                    let (s, t) = (MonoVec::word(vec![w[0]]), MonoVec::word(vec![w[1]]));
                    let e = Scalar::sign((deg[w[0]] * deg[w[1]]) as i64);
                    let mut expected = u.mul(&s, &t);
                    expected.add_scaled(&u.mul(&t, &s), &e);
                    expected.add_scaled(&nabla(&f, &s, &t), &-Scalar::one());
                    expected.add_scaled(&nabla(&f, &t, &s), &-e);
                    assert_eq!(b.apply(&MonoVec::word(w.clone())).unwrap(), expected.scale(&Scalar::ratio(1, 2)));
                }
            }
        }
    }

    #[test]
    fn bijective_per_level() {
        for p in pairs() {
            let b = build(&p, &auxes(&p)[1], 3);
            let f = b.uenv().frame().clone();
            let space = word_space(b.uenv().gen_degrees(), f.ext().masks(), 3);
            let m = word_operator(&space, &space, 0, |x| b.apply(x)).unwrap();
            let mi = word_operator(&space, &space, 0, |x| b.apply_inverse(x)).unwrap();
            assert_eq!(m.rank(), space.dim());
            let id = LinearOperator::identity(space.degrees());
            assert!(m.compose(&mi).unwrap().first_difference(&id).is_none());
            assert!(mi.compose(&m).unwrap().first_difference(&id).is_none());
        }
    }

    #[test]
    fn connection_identities() {
        for p in pairs() {
            let b = build(&p, &auxes(&p)[1], 1);
            let f = b.uenv().frame().clone();
            let conn = f.conn().clone();
            let (k, m) = (f.dim_b(), f.dim_h());
            for g in 0..f.num_gens() {
                for h in 0..f.num_gens() {
                    let r = nabla_gen(&f, g, h);
                    let null_arg = matches!(f.gen(g), Gen::Tau(_)) || matches!(f.gen(h), Gen::Tau(_));
                    for ((mask, w), _) in r.terms() {
                        let is_tau = matches!(f.gen(w[0]), Gen::Tau(_));
                        assert!(*mask == 0 || is_tau);
                        assert!(!null_arg || is_tau);
                    }
                    if matches!(f.gen(g), Gen::Tau(_)) && matches!(f.gen(h), Gen::Tau(_)) {
                        assert!(r.is_zero());
                    }
                }
            }
            // ∇_{I₀ b} I₀ b′ = I₀ ∇^B_{j b} b′, with ∇^B from its own table
            for l in 0..k {
                for l2 in 0..k {
                    let r = nabla_gen(&f, l, l2);
                    let mut expected = MonoVec::zero();
                    for d in 0..k {
                        expected.add_term(0, vec![d], conn.b_coeff(m + l, l2, d));
                    }
                    assert_eq!(r, expected);
                }
            }
        }
    }

    #[test]
    fn projection_of_pbw() {
        for p in pairs() {
            for aux in auxes(&p) {
                let cap = 3;
                let b = build(&p, &aux, cap);
                let u = b.uenv().clone();
                let f = u.frame().clone();
                let conn = f.conn().clone();
                let small = Pbw::new(Ug::new(p.clone()), conn, cap);
                for w in normal_words(u.gen_degrees(), cap) {
                    let img = u.p_u(&b.apply(&MonoVec::word(w.clone())).unwrap(), cap);
                    if w.iter().all(|&g| matches!(f.gen(g), Gen::Sigma(_))) {
                        let expected = CeElement::tensor(Coeffs::Ula(cap), &Ext::one(), small.apply_monomial(&w).unwrap());
                        assert_eq!(img, expected, "{w:?}");
                    } else if w.iter().any(|&g| matches!(f.gen(g), Gen::Tau(_))) {
                        assert!(img.is_zero(), "{w:?}");
                    }
                    let h = b.sym().h_s(&MonoVec::word(w.clone()));
                    assert!(u.p_u(&b.apply(&h).unwrap(), cap).is_zero());
                }
            }
        }
    }
}
