//! The symmetric algebra S_{Λ𝔥^∨}Γ(π^!L) on the frame generators: product,
//! `D_S`, the Poisson bracket and the symmetric tensor-trick contraction.

use std::sync::Arc;

use super::uenv::frame_to_mono;
use super::{label_degree, sort_word, MonoVec};
use crate::ce::{CeElement, Coeffs};
use crate::exterior::{mask_degree, Derivation, Ext, Mask};
use crate::scalar::Scalar;
use crate::sections::{Frame, Gen};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Atom {
    F(Mask),
    G(usize),
}

/// Graded-commutative algebra on the frame generators over Λ𝔥^∨.
#[derive(Clone, Debug)]
pub struct SymAlg {
    frame: Arc<Frame>,
    deg: Vec<i32>,
    anchors: Vec<Derivation>,
    q_gen: Vec<MonoVec>,
    brackets: Vec<Vec<MonoVec>>,
    s_i: MonoVec,
}

impl SymAlg {
    pub fn new(frame: Arc<Frame>) -> Self {
        let g = frame.num_gens();
        let deg: Vec<i32> = (0..g).map(|i| frame.gen_degree(i)).collect();
        let anchors = (0..g).map(|i| frame.generator(i).x.clone()).collect();
        let q_gen = (0..g).map(|i| frame_to_mono(&frame.from_raw(&frame.q(frame.generator(i))))).collect();
        let brackets = (0..g)
            .map(|a| {
                (0..g)
                    .map(|b| frame_to_mono(&frame.from_raw(&frame.bracket(frame.generator(a), frame.generator(b)))))
                    .collect()
            })
            .collect();
        let s_i = frame_to_mono(&frame.from_raw(frame.s_i()));
        SymAlg { frame, deg, anchors, q_gen, brackets, s_i }
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn gen_degrees(&self) -> &[i32] {
        &self.deg
    }

    pub fn s_i(&self) -> &MonoVec {
        &self.s_i
    }

    fn word_degree(&self, w: &[usize]) -> i32 {
        label_degree(0, w, &self.deg)
    }

    /// `x ⊙ y`.
    pub fn mul(&self, x: &MonoVec, y: &MonoVec) -> MonoVec {
        let mut out = MonoVec::zero();
        for ((m1, w1), c1) in x.terms() {
            let dw1 = self.word_degree(w1);
            for ((m2, w2), c2) in y.terms() {
                let Some((neg_f, mask)) = crate::exterior::wedge_masks(*m1, *m2) else { continue };
                let mut joined = w1.clone();
                joined.extend_from_slice(w2);
                let Some((neg_w, sorted)) = sort_word(&joined, &self.deg) else { continue };
                let neg_cross = (dw1 * mask_degree(*m2)) % 2 != 0;
                let c = c1 * c2;
                out.add_term(mask, sorted, &if neg_f ^ neg_w ^ neg_cross { -c } else { c });
            }
        }
        out
    }

    /// `D_S`: `d_A` on coefficients and `Q` on generators, extended as a
    /// derivation of degree one.
    pub fn d_s(&self, x: &MonoVec) -> MonoVec {
        let mut out = MonoVec::zero();
        let d = self.frame.ext();
        for ((mask, w), c) in x.terms() {
            let f = Ext::monomial(*mask, c.clone());
            out.add_scaled(&MonoVec::from_ext(&d.d(&f), w.clone()), &Scalar::one());
            let mut acc = 0;
            for i in 0..w.len() {
                let prefix = MonoVec::word(w[..i].to_vec());
                let suffix = MonoVec::word(w[i + 1..].to_vec());
                let t = self.mul(&self.mul(&prefix, &self.q_gen[w[i]]), &suffix);
                let sign = Scalar::sign((mask_degree(*mask) + acc) as i64);
                out.add_scaled(&t.left_mul_ext(&f), &sign);
                acc += self.deg[w[i]];
            }
        }
        out
    }

    fn atom_elem(&self, a: Atom) -> MonoVec {
        match a {
            Atom::F(m) => MonoVec::term(m, vec![], Scalar::one()),
            Atom::G(g) => MonoVec::word(vec![g]),
        }
    }

    fn atom_deg(&self, a: Atom) -> i32 {
        match a {
            Atom::F(m) => mask_degree(m),
            Atom::G(g) => self.deg[g],
        }
    }

    fn product(&self, atoms: &[Atom]) -> MonoVec {
        let mut acc = MonoVec::one();
        for &a in atoms {
            acc = self.mul(&acc, &self.atom_elem(a));
        }
        acc
    }

    fn atom_bracket(&self, a: Atom, b: Atom) -> MonoVec {
        match (a, b) {
            (Atom::G(g), Atom::G(h)) => self.brackets[g][h].clone(),
            (Atom::G(g), Atom::F(m)) => {
                MonoVec::from_ext(&self.anchors[g].apply(&Ext::monomial(m, Scalar::one())), vec![])
            }
            (Atom::F(m), Atom::G(h)) => {
                let v = self.anchors[h].apply(&Ext::monomial(m, Scalar::one()));
                let sign = -Scalar::sign((mask_degree(m) * self.deg[h]) as i64);
                MonoVec::from_ext(&v, vec![]).scale(&sign)
            }
            (Atom::F(_), Atom::F(_)) => MonoVec::zero(),
        }
    }

    fn bracket_atoms(&self, xs: &[Atom], ys: &[Atom]) -> MonoVec {
        if xs.is_empty() || ys.is_empty() {
            return MonoVec::zero();
        }
        if xs.len() > 1 {
            let (a, b) = xs.split_at(xs.len() - 1);
            let db = self.atom_deg(b[0]);
            let dy: i32 = ys.iter().map(|&t| self.atom_deg(t)).sum();
            let first = self.mul(&self.product(a), &self.bracket_atoms(b, ys));
            let second = self.mul(&self.bracket_atoms(a, ys), &self.product(b));
            return first.add(&second.scale(&Scalar::sign((db * dy) as i64)));
        }
        if ys.len() > 1 {
            let (a, b) = ys.split_at(ys.len() - 1);
            let dx = self.atom_deg(xs[0]);
            let da: i32 = a.iter().map(|&t| self.atom_deg(t)).sum();
            let first = self.mul(&self.bracket_atoms(xs, a), &self.product(b));
            let second = self.mul(&self.product(a), &self.bracket_atoms(xs, b));
            return first.add(&second.scale(&Scalar::sign((dx * da) as i64)));
        }
        self.atom_bracket(xs[0], ys[0])
    }

    fn atoms_of(mask: Mask, w: &[usize]) -> Vec<Atom> {
        let mut v = Vec::with_capacity(w.len() + 1);
        if mask != 0 {
            v.push(Atom::F(mask));
        }
        v.extend(w.iter().map(|&g| Atom::G(g)));
        v
    }

    /// The Poisson bracket of degree zero extending the bracket of sections
    /// and the anchor.
    pub fn poisson(&self, x: &MonoVec, y: &MonoVec) -> MonoVec {
        let mut out = MonoVec::zero();
        for ((m1, w1), c1) in x.terms() {
            let xs = Self::atoms_of(*m1, w1);
            for ((m2, w2), c2) in y.terms() {
                let ys = Self::atoms_of(*m2, w2);
                out.add_scaled(&self.bracket_atoms(&xs, &ys), &(c1 * c2));
            }
        }
        out
    }

    fn is_sigma(&self, g: usize) -> bool {
        matches!(self.frame.gen(g), Gen::Sigma(_))
    }

    /// `P_S = ⊕ P₀^{⊙n}`, landing in Λ𝔥^∨ ⊗ S(B).
    pub fn p_s(&self, x: &MonoVec, cap: usize) -> CeElement {
        let mut out = CeElement::zero(Coeffs::Sym(cap));
        for ((mask, w), c) in x.terms() {
            if w.iter().all(|&g| self.is_sigma(g)) {
                out.add_term(*mask, w.clone(), c);
            }
        }
        out
    }

    /// `I_S = ⊕ I₀^{⊙n}`.
    pub fn i_s(&self, beta: &CeElement) -> MonoVec {
        let mut out = MonoVec::zero();
        for ((mask, w), c) in beta.terms() {
            out.add_term(*mask, w.clone(), c);
        }
        out
    }

    /// Symmetrized tensor-trick homotopy: the average over orderings of
    /// `Σ_i (I₀P₀)^{⊗(i−1)} ⊗ H₀ ⊗ id^{⊗(n−i)}`.
    pub fn h_s(&self, x: &MonoVec) -> MonoVec {
        let mut out = MonoVec::zero();
        let k = self.frame.dim_b();
        let m = self.frame.dim_h();
        for ((mask, w), c) in x.terms() {
            let n = w.len();
            let s = w.iter().filter(|&&g| self.is_sigma(g)).count();
            if n == 0 {
                continue;
            }
            let weight = avg_weight(n, s);
            let sign = Scalar::sign(mask_degree(*mask) as i64);
            for (j, &g) in w.iter().enumerate() {
                let Gen::Alpha(a) = self.frame.gen(g) else { continue };
                let mut v = w.clone();
                v[j] = k + m + a;
                let Some((neg, sorted)) = sort_word(&v, &self.deg) else { continue };
                let coef = &(c * &weight) * &sign;
                out.add_term(*mask, sorted, &if neg { -coef } else { coef });
            }
        }
        out
    }
}

/// `Σ_{t=0}^{s} s!/(s−t)! · (n−1−t)! / n!`: the share of orderings of `n`
/// letters in which a fixed letter is preceded only by letters from a set of
/// size `s`.
pub fn avg_weight(n: usize, s: usize) -> Scalar {
    let fact = |x: usize| -> Scalar { (1..=x).fold(Scalar::one(), |a, i| &a * &Scalar::from_int(i as i64)) };
    let mut total = Scalar::zero();
    for t in 0..=s.min(n.saturating_sub(1)) {
        let falling = &fact(s) / &fact(s - t);
        total += &falling * &fact(n - 1 - t);
    }
    &total / &fact(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enveloping::normal_words;
    use crate::lie_pair::{Bilinear, ConnectionSet, LiePair};
    use proptest::prelude::*;

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
        ]
    }

    fn alg(p: &Arc<LiePair>) -> SymAlg {
        let conn = Arc::new(ConnectionSet::build(p, &Bilinear::zero(p.dim_g())).unwrap());
        SymAlg::new(Arc::new(Frame::new(p.clone(), conn)))
    }

    fn basis(s: &SymAlg, cap: usize) -> Vec<MonoVec> {
        let mut v = Vec::new();
        for w in normal_words(s.gen_degrees(), cap) {
            for &mask in s.frame().ext().masks() {
                v.push(MonoVec::term(mask, w.clone(), q(1)));
            }
        }
        v
    }

    #[test]
    fn weights() {
        assert_eq!(avg_weight(1, 0), q(1));
        assert_eq!(avg_weight(2, 0), Scalar::ratio(1, 2));
        assert_eq!(avg_weight(2, 1), q(1));
        assert_eq!(avg_weight(3, 1), Scalar::ratio(1, 2));
    }

    #[test]
    fn d_s_two_routes_and_square() {
        for p in pairs() {
            let s = alg(&p);
            for x in basis(&s, 2) {
                let d = s.d_s(&x);
                assert_eq!(d, s.poisson(s.s_i(), &x), "{x:?}");
                assert!(s.d_s(&d).is_zero());
            }
        }
    }

    #[test]
    fn tensor_trick_identities() {
        for p in pairs() {
            let s = alg(&p);
            let cap = 3;
            for x in basis(&s, cap) {
                let h = s.h_s(&x);
                let lhs = x.sub(&s.i_s(&s.p_s(&x, cap)));
                let rhs = s.d_s(&h).add(&s.h_s(&s.d_s(&x)));
                assert_eq!(lhs, rhs, "{x:?}");
                assert!(s.p_s(&h, cap).is_zero());
            }
        }
    }

    #[test]
    fn h_s_on_two_letters() {
        let p = pairs()[0].clone();
        let s = alg(&p);
        // generators: σ0 = 0, α0 = 1, τ0 = 2
        let x = MonoVec::word(vec![0, 1]);
        assert_eq!(s.h_s(&x), MonoVec::word(vec![0, 2]));
        let y = MonoVec::word(vec![1, 1]);
        assert_eq!(s.h_s(&y), MonoVec::word(vec![1, 2]));
        let z = MonoVec::term(1, vec![1], q(1));
        assert_eq!(s.h_s(&z), MonoVec::term(1, vec![2], q(-1)));
    }

    proptest! {
        #[test]
        fn leibniz(pi in 0usize..4, a in 0usize..40, b in 0usize..40, c in 0usize..40) {
            let p = pairs()[pi].clone();
            let s = alg(&p);
            let bs = basis(&s, 1);
            let (x, y, z) = (&bs[a % bs.len()], &bs[b % bs.len()], &bs[c % bs.len()]);
            let deg = |v: &MonoVec| v.components(s.gen_degrees()).keys().next().copied().unwrap_or(0);
            let lhs = s.poisson(x, &s.mul(y, z));
            let rhs = s.mul(&s.poisson(x, y), z)
                .add(&s.mul(y, &s.poisson(x, z)).scale(&Scalar::sign((deg(x) * deg(y)) as i64)));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
