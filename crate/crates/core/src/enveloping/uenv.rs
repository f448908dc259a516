//! The enveloping algebra 𝒰(π^!L) over Λ𝔥^∨ as a rewriting system on the
//! frame generators, with `D_U` and `P_U`.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use super::{label_degree, MonoVec};
use crate::ce::{CeElement, Coeffs};
use crate::error::{Error, Result};
use crate::exterior::{mask_degree, Derivation, Ext};
use crate::scalar::Scalar;
use crate::sections::{Frame, FrameElement, Gen};

/// Normal-form arithmetic in 𝒰(π^!L). Words are nondecreasing in generator
/// order with no repeated odd letter; coefficients sit on the left.
#[derive(Debug)]
pub struct Uenv {
    frame: Arc<Frame>,
    deg: Vec<i32>,
    anchors: Vec<Derivation>,
    brackets: Vec<Vec<MonoVec>>,
    s_i: MonoVec,
    cache: RwLock<HashMap<(usize, Vec<usize>), MonoVec>>,
}

/// Frame element as a weight-one combination of generators.
pub fn frame_to_mono(f: &FrameElement) -> MonoVec {
    let mut out = MonoVec::zero();
    for (g, c) in f.terms() {
        out.add_scaled(&MonoVec::from_ext(c, vec![g]), &Scalar::one());
    }
    out
}

impl Uenv {
    pub fn new(frame: Arc<Frame>) -> Self {
        let g = frame.num_gens();
        let deg: Vec<i32> = (0..g).map(|i| frame.gen_degree(i)).collect();
        let anchors = (0..g).map(|i| frame.generator(i).x.clone()).collect();
        let brackets = (0..g)
            .map(|a| {
                (0..g)
                    .map(|b| {
                        let br = frame.bracket(frame.generator(a), frame.generator(b));
                        frame_to_mono(&frame.from_raw(&br))
                    })
                    .collect()
            })
            .collect();
        let s_i = frame_to_mono(&frame.from_raw(frame.s_i()));
        Uenv { frame, deg, anchors, brackets, s_i, cache: RwLock::new(HashMap::new()) }
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn gen_degrees(&self) -> &[i32] {
        &self.deg
    }

    /// `s_i` as an element of weight one.
    pub fn s_i(&self) -> &MonoVec {
        &self.s_i
    }

    /// `[g_a, g_b]` in the frame.
    pub fn gen_bracket(&self, a: usize, b: usize) -> &MonoVec {
        &self.brackets[a][b]
    }

    pub fn anchor(&self, g: usize) -> &Derivation {
        &self.anchors[g]
    }

    pub fn degree_of(&self, mask: u32, w: &[usize]) -> i32 {
        label_degree(mask, w, &self.deg)
    }

    /// `g ∘ w` for a normal word `w`.
    pub fn gen_times_word(&self, g: usize, w: &[usize]) -> MonoVec {
        let key = (g, w.to_vec());
        if let Some(v) = self.cache.read().expect("cache").get(&key) {
            return v.clone();
        }
        let v = self.compute_gen_times_word(g, w);
        self.cache.write().expect("cache").insert(key, v.clone());
        v
    }

    fn compute_gen_times_word(&self, g: usize, w: &[usize]) -> MonoVec {
        let Some(&w0) = w.first() else {
            return MonoVec::word(vec![g]);
        };
        let odd = self.deg[g] % 2 != 0;
        if g < w0 || (g == w0 && !odd) {
            let mut v = Vec::with_capacity(w.len() + 1);
            v.push(g);
            v.extend_from_slice(w);
            return MonoVec::word(v);
        }
        let rest = &w[1..];
        if g == w0 {
            // g ∘ g = ½ [g, g] for odd g
            return self.bracket_times_word(g, g, rest).scale(&Scalar::ratio(1, 2));
        }
        let sign = Scalar::sign((self.deg[g] * self.deg[w0]) as i64);
        let inner = self.gen_times_word(g, rest);
        let mut out = self.gen_times(w0, &inner).scale(&sign);
        out.add_scaled(&self.bracket_times_word(g, w0, rest), &Scalar::one());
        out
    }

    fn bracket_times_word(&self, a: usize, b: usize, rest: &[usize]) -> MonoVec {
        let mut out = MonoVec::zero();
        for ((mask, word), c) in self.brackets[a][b].terms() {
            let t = word[0];
            let f = Ext::monomial(*mask, c.clone());
            out.add_scaled(&self.gen_times_word(t, rest).left_mul_ext(&f), &Scalar::one());
        }
        out
    }

    /// `g ∘ x`, moving coefficients left with `g ∘ f = X_g(f) + (−1)^{|g||f|} f ∘ g`.
    pub fn gen_times(&self, g: usize, x: &MonoVec) -> MonoVec {
        let mut out = MonoVec::zero();
        for ((mask, w), c) in x.terms() {
            let f = Ext::monomial(*mask, c.clone());
            let xf = self.anchors[g].apply(&f);
            out.add_scaled(&MonoVec::from_ext(&xf, w.clone()), &Scalar::one());
            let gw = self.gen_times_word(g, w);
            let sign = Scalar::sign((self.deg[g] * mask_degree(*mask)) as i64);
            out.add_scaled(&gw.left_mul_ext(&f), &sign);
        }
        out
    }

    fn word_times(&self, w: &[usize], y: &MonoVec) -> MonoVec {
        let mut acc = y.clone();
        for &g in w.iter().rev() {
            acc = self.gen_times(g, &acc);
        }
        acc
    }

    /// `x ∘ y` without a weight check.
    pub fn mul(&self, x: &MonoVec, y: &MonoVec) -> MonoVec {
        let mut out = MonoVec::zero();
        for ((mask, w), c) in x.terms() {
            let f = Ext::monomial(*mask, c.clone());
            out.add_scaled(&self.word_times(w, y).left_mul_ext(&f), &Scalar::one());
        }
        out
    }

    /// `x ∘ y`, failing when the result leaves weight `cap`.
    pub fn multiply(&self, x: &MonoVec, y: &MonoVec, cap: Option<usize>) -> Result<MonoVec> {
        let r = self.mul(x, y);
        if let Some(cap) = cap {
            let w = r.max_weight();
            if w > cap {
                return Err(Error::TruncationOverflow { weight: w, cap });
            }
        }
        Ok(r)
    }

    /// `D_U x = s_i ∘ x − (−1)^{|x|} x ∘ s_i`, homogeneous component-wise.
    pub fn d_u(&self, x: &MonoVec, cap: Option<usize>) -> Result<MonoVec> {
        let mut out = MonoVec::zero();
        for (d, xd) in x.components(&self.deg) {
            out.add_scaled(&self.mul(&self.s_i, &xd), &Scalar::one());
            out.add_scaled(&self.mul(&xd, &self.s_i), &-Scalar::sign(d as i64));
        }
        if let Some(cap) = cap {
            let w = out.max_weight();
            if w > cap {
                return Err(Error::TruncationOverflow { weight: w, cap });
            }
        }
        Ok(out)
    }

    /// `P_U`: a normal word maps to the class of its π-related vectors; words
    /// with an `α` or `τ` letter map to zero.
    pub fn p_u(&self, x: &MonoVec, cap: usize) -> CeElement {
        let mut out = CeElement::zero(Coeffs::Ula(cap));
        for ((mask, w), c) in x.terms() {
            if w.iter().all(|&g| matches!(self.frame.gen(g), Gen::Sigma(_))) {
                out.add_term(*mask, w.clone(), c);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enveloping::normal_words;
    use crate::exterior::Ext;
    use crate::lie_pair::{Bilinear, ConnectionSet, LiePair};
    use crate::sections::Gen;

    fn q(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    pub(crate) fn pairs() -> Vec<Arc<LiePair>> {
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

    pub(crate) fn engine(p: &Arc<LiePair>, aux: Option<Bilinear>) -> Uenv {
        let aux = aux.unwrap_or_else(|| Bilinear::zero(p.dim_g()));
        let conn = Arc::new(ConnectionSet::build(p, &aux).unwrap());
        Uenv::new(Arc::new(Frame::new(p.clone(), conn)))
    }

    #[test]
    fn rinehart_examples() {
        let p = pairs()[3].clone();
        let u = engine(&p, None);
        let f = u.frame().clone();
        for k in 0..2 {
            let t = f.index(Gen::Tau(k));
            let tt = u.mul(&MonoVec::word(vec![t]), &MonoVec::word(vec![t]));
            assert!(tt.is_zero());
            let x = u.mul(&MonoVec::word(vec![t]), &MonoVec::from_ext(&Ext::gen(k), vec![]));
            let mut expected = MonoVec::one();
            expected.add_term(1 << k, vec![t], &q(-1));
            assert_eq!(x, expected);
        }
    }

    fn atoms(u: &Uenv) -> Vec<MonoVec> {
        let m = u.frame().dim_h();
        let mut v: Vec<MonoVec> = (0..u.frame().num_gens()).map(|g| MonoVec::word(vec![g])).collect();
        for k in 0..m {
            v.push(MonoVec::from_ext(&Ext::gen(k), vec![]));
        }
        v
    }

    #[test]
    fn associativity_on_generators() {
        for p in pairs() {
            let u = engine(&p, Some(Bilinear::from_entries(p.dim_g(), &[(0, 0, 0, q(1))]).unwrap()));
            let a = atoms(&u);
            for x in &a {
                for y in &a {
                    let xy = u.mul(x, y);
                    for z in &a {
                        assert_eq!(u.mul(&xy, z), u.mul(x, &u.mul(y, z)));
                    }
                }
            }
        }
    }

    #[test]
    fn d_u_properties() {
        for p in pairs() {
            let u = engine(&p, None);
            let f = u.frame().clone();
            assert!(u.d_u(&MonoVec::one(), None).unwrap().is_zero());
            for g in 0..f.num_gens() {
                let x = MonoVec::word(vec![g]);
                let dq = frame_to_mono(&f.from_raw(&f.q(f.generator(g))));
                assert_eq!(u.d_u(&x, Some(1)).unwrap(), dq);
            }
            let cap = 3;
            for w in normal_words(u.gen_degrees(), 2) {
                for &mask in f.ext().masks() {
                    let x = MonoVec::term(mask, w.clone(), q(1));
                    let dx = u.d_u(&x, Some(cap)).unwrap();
                    assert!(u.d_u(&dx, Some(cap)).unwrap().is_zero());
                    let ce = crate::ce::CeComplex::new(p.clone(), Coeffs::Ula(cap));
                    assert_eq!(u.p_u(&dx, cap), ce.d(&u.p_u(&x, cap)).unwrap());
                }
            }
        }
    }
}
