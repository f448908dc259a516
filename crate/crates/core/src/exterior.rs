//! The exterior algebra Λ𝔥^∨, its derivations and Cartan calculus.
//!
//! Monomials `ξ^{i_1} ∧ … ∧ ξ^{i_p}` with `i_1 < … < i_p` are stored as bit
//! masks.

use std::collections::BTreeMap;
use std::fmt;

use crate::lie_pair::LiePair;
use crate::scalar::Scalar;

pub type Mask = u32;

pub fn mask_degree(m: Mask) -> i32 {
    m.count_ones() as i32
}

/// Indices of a mask in increasing order.
pub fn mask_indices(m: Mask) -> Vec<usize> {
    (0..32).filter(|i| m & (1 << i) != 0).collect()
}

pub fn mask_from_indices(idx: &[usize]) -> Option<Mask> {
    let mut m = 0;
    for &i in idx {
        if m & (1 << i) != 0 {
            return None;
        }
        m |= 1 << i;
    }
    Some(m)
}

/// `ξ^a ∧ ξ^b = sign · ξ^{a ∪ b}`, or `None` if they share a factor.
pub fn wedge_masks(a: Mask, b: Mask) -> Option<(bool, Mask)> {
    if a & b != 0 {
        return None;
    }
    // Count pairs (i in a, j in b) with i > j.
    let mut swaps = 0u32;
    let mut bb = b;
    while bb != 0 {
        let j = bb.trailing_zeros();
        swaps += (a >> (j + 1)).count_ones();
        bb &= bb - 1;
    }
    Some((swaps % 2 == 1, a | b))
}

/// All masks on `m` generators, ordered by degree then value.
pub fn all_masks(m: usize) -> Vec<Mask> {
    let mut v: Vec<Mask> = (0..(1u32 << m)).collect();
    v.sort_by_key(|x| (x.count_ones(), *x));
    v
}

/// Element of Λ𝔥^∨.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Ext(BTreeMap<Mask, Scalar>);

impl fmt::Debug for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(m, c)| {
                let idx = mask_indices(*m);
                if idx.is_empty() {
                    format!("{c}")
                } else {
                    let w: Vec<String> = idx.iter().map(|i| format!("ξ{}", i + 1)).collect();
                    format!("{c}·{}", w.join("∧"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Ext {
    pub fn zero() -> Self {
        Ext(BTreeMap::new())
    }

    pub fn scalar(c: Scalar) -> Self {
        Ext::monomial(0, c)
    }

    pub fn one() -> Self {
        Ext::scalar(Scalar::one())
    }

    pub fn monomial(m: Mask, c: Scalar) -> Self {
        let mut e = Ext::zero();
        e.add_term(m, &c);
        e
    }

    /// The generator `ξ^k`.
    pub fn gen(k: usize) -> Self {
        Ext::monomial(1 << k, Scalar::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Mask, &Scalar)> + '_ {
        self.0.iter().map(|(m, c)| (*m, c))
    }

    pub fn coeff(&self, m: Mask) -> Scalar {
        self.0.get(&m).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add_term(&mut self, m: Mask, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.0.get_mut(&m) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    self.0.remove(&m);
                }
            }
            None => {
                self.0.insert(m, c.clone());
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Ext, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (m, x) in other.terms() {
            self.add_term(m, &(x * c));
        }
    }

    pub fn add(&self, other: &Ext) -> Ext {
        let mut r = self.clone();
        r.add_scaled(other, &Scalar::one());
        r
    }

    pub fn sub(&self, other: &Ext) -> Ext {
        let mut r = self.clone();
        r.add_scaled(other, &-Scalar::one());
        r
    }

    pub fn scale(&self, c: &Scalar) -> Ext {
        let mut r = Ext::zero();
        r.add_scaled(self, c);
        r
    }

    pub fn neg(&self) -> Ext {
        self.scale(&-Scalar::one())
    }

    pub fn wedge(&self, other: &Ext) -> Ext {
        let mut r = Ext::zero();
        for (a, x) in self.terms() {
            for (b, y) in other.terms() {
                if let Some((neg, m)) = wedge_masks(a, b) {
                    let c = x * y;
                    r.add_term(m, &if neg { -c } else { c });
                }
            }
        }
        r
    }

    /// `ξ^mask ∧ self`, scaled.
    pub fn left_mul_monomial(&self, mask: Mask, c: &Scalar) -> Ext {
        let mut r = Ext::zero();
        for (b, y) in self.terms() {
            if let Some((neg, m)) = wedge_masks(mask, b) {
                let v = c * y;
                r.add_term(m, &if neg { -v } else { v });
            }
        }
        r
    }

    /// Homogeneous components by degree.
    pub fn components(&self) -> BTreeMap<i32, Ext> {
        let mut out: BTreeMap<i32, Ext> = BTreeMap::new();
        for (m, c) in self.terms() {
            out.entry(mask_degree(m)).or_default().add_term(m, c);
        }
        out
    }

    /// The degree if homogeneous (zero counts as homogeneous of any degree).
    pub fn homogeneous_degree(&self) -> Option<i32> {
        let mut it = self.0.keys().map(|m| mask_degree(*m));
        let first = it.next()?;
        if it.all(|d| d == first) {
            Some(first)
        } else {
            None
        }
    }

    /// Apply the sign automorphism `ω ↦ (−1)^{|ω| k} ω`.
    pub fn twist(&self, k: i32) -> Ext {
        let mut r = Ext::zero();
        for (m, c) in self.terms() {
            if (mask_degree(m) * k) % 2 != 0 {
                r.add_term(m, &-c);
            } else {
                r.add_term(m, c);
            }
        }
        r
    }
}

/// A derivation of Λ𝔥^∨ given by its values on the generators. Components of
/// a value of degree `p + 1` contribute a derivation of degree `p`.
#[derive(Clone, Default, PartialEq, Eq, Hash, Debug)]
pub struct Derivation {
    pub values: Vec<Ext>,
}

impl Derivation {
    pub fn zero(m: usize) -> Self {
        Derivation { values: vec![Ext::zero(); m] }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Ext::is_zero)
    }

    /// Interior product with `a ∈ 𝔥`: the odd derivation `ξ^k ↦ a^k`.
    pub fn interior(a: &[Scalar]) -> Self {
        Derivation { values: a.iter().map(|x| Ext::scalar(x.clone())).collect() }
    }

    pub fn apply(&self, x: &Ext) -> Ext {
        let mut out = Ext::zero();
        for (mask, c) in x.terms() {
            let idx = mask_indices(mask);
            for (pos, &k) in idx.iter().enumerate() {
                if self.values[k].is_zero() {
                    continue;
                }
                let prefix = mask & ((1 << k) - 1);
                let suffix = mask & !((1 << (k + 1)) - 1);
                for (j, v) in self.values[k].terms() {
                    let parity = mask_degree(j) - 1;
                    let mut neg = (parity * pos as i32) % 2 != 0;
                    let Some((n1, pj)) = wedge_masks(prefix, j) else { continue };
                    let Some((n2, all)) = wedge_masks(pj, suffix) else { continue };
                    neg ^= n1 ^ n2;
                    let t = c * v;
                    out.add_term(all, &if neg { -t } else { t });
                }
            }
        }
        out
    }

    /// Components by derivation degree.
    pub fn components(&self) -> BTreeMap<i32, Derivation> {
        let m = self.values.len();
        let mut out: BTreeMap<i32, Derivation> = BTreeMap::new();
        for (k, v) in self.values.iter().enumerate() {
            for (d, e) in v.components() {
                out.entry(d - 1).or_insert_with(|| Derivation::zero(m)).values[k] = e;
            }
        }
        out
    }

    pub fn add(&self, other: &Derivation) -> Derivation {
        Derivation { values: self.values.iter().zip(&other.values).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn scale(&self, c: &Scalar) -> Derivation {
        Derivation { values: self.values.iter().map(|a| a.scale(c)).collect() }
    }

    /// `f · D`, i.e. `ω ↦ f ∧ D(ω)`.
    pub fn left_mul(&self, f: &Ext) -> Derivation {
        Derivation { values: self.values.iter().map(|a| f.wedge(a)).collect() }
    }

    /// Graded commutator, expanded over homogeneous components.
    pub fn commutator(&self, other: &Derivation) -> Derivation {
        let m = self.values.len();
        let mut out = Derivation::zero(m);
        for (p, x) in self.components() {
            for (q, y) in other.components() {
                let sign = Scalar::sign((p * q) as i64);
                for k in 0..m {
                    let a = x.apply(&y.values[k]);
                    let b = y.apply(&x.values[k]);
                    let mut v = a;
                    v.add_scaled(&b, &-sign.clone());
                    out.values[k] = out.values[k].add(&v);
                }
            }
        }
        out
    }
}

/// Λ𝔥^∨ together with its Chevalley–Eilenberg differential.
#[derive(Clone, Debug)]
pub struct ExtAlgebra {
    m: usize,
    d: Derivation,
    masks: Vec<Mask>,
}

impl ExtAlgebra {
    /// Uses the 𝔥-block of the structure constants: `dξ^k = −½ Σ c^k_{ij} ξ^i ξ^j`.
    pub fn new(pair: &LiePair) -> Self {
        let m = pair.dim_h();
        let half = Scalar::ratio(-1, 2);
        let mut d = Derivation::zero(m);
        for k in 0..m {
            let mut v = Ext::zero();
            for i in 0..m {
                for j in 0..m {
                    let c = pair.c(i, j, k);
                    if c.is_zero() {
                        continue;
                    }
                    let t = Ext::gen(i).wedge(&Ext::gen(j));
                    v.add_scaled(&t, &(&half * c));
                }
            }
            d.values[k] = v;
        }
        ExtAlgebra { m, d, masks: all_masks(m) }
    }

    pub fn dim_h(&self) -> usize {
        self.m
    }

    pub fn masks(&self) -> &[Mask] {
        &self.masks
    }

    /// The differential as a derivation.
    pub fn d_derivation(&self) -> &Derivation {
        &self.d
    }

    pub fn d(&self, x: &Ext) -> Ext {
        self.d.apply(x)
    }

    pub fn interior(&self, a: &[Scalar], x: &Ext) -> Ext {
        Derivation::interior(a).apply(x)
    }

    /// `L_a = [d, ι_a]` as a derivation of degree 0.
    pub fn lie_derivative_derivation(&self, a: &[Scalar]) -> Derivation {
        self.d.commutator(&Derivation::interior(a))
    }

    pub fn lie_derivative(&self, a: &[Scalar], x: &Ext) -> Ext {
        self.lie_derivative_derivation(a).apply(x)
    }

    fn e(&self, k: usize) -> Vec<Scalar> {
        crate::lie_pair::unit(self.m, k)
    }

    /// Largest coefficient of `d − Σ_k (ξ^k L_{e_k} − (dξ^k) ι_{e_k})` over all
    /// basis elements, with the first offending basis mask.
    pub fn italo_defect(&self) -> (Scalar, Option<Mask>) {
        let mut worst = (Scalar::zero(), None);
        for &w in &self.masks {
            let x = Ext::monomial(w, Scalar::one());
            let mut rhs = Ext::zero();
            for k in 0..self.m {
                let ek = self.e(k);
                rhs = rhs.add(&Ext::gen(k).wedge(&self.lie_derivative(&ek, &x)));
                rhs = rhs.sub(&self.d(&Ext::gen(k)).wedge(&self.interior(&ek, &x)));
            }
            let diff = self.d(&x).sub(&rhs);
            let size = diff.terms().map(|(_, c)| c.abs()).max().unwrap_or_default();
            if size > worst.0 {
                worst = (size, Some(w));
            }
        }
        worst
    }

    /// Largest coefficient of `Σ_k ξ^k ι_{e_k} ω − p ω` over basis `ω`.
    pub fn rats_defect(&self) -> (Scalar, Option<Mask>) {
        let mut worst = (Scalar::zero(), None);
        for &w in &self.masks {
            let x = Ext::monomial(w, Scalar::one());
            let mut lhs = Ext::zero();
            for k in 0..self.m {
                lhs = lhs.add(&Ext::gen(k).wedge(&self.interior(&self.e(k), &x)));
            }
            let diff = lhs.sub(&x.scale(&Scalar::from_int(mask_degree(w) as i64)));
            let size = diff.terms().map(|(_, c)| c.abs()).max().unwrap_or_default();
            if size > worst.0 {
                worst = (size, Some(w));
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_pair::LiePair;
    use proptest::prelude::*;

    fn q(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn nonabelian2() -> LiePair {
        LiePair::from_antisymmetric(2, 2, &[(0, 1, 1, q(1))]).unwrap()
    }

    fn sl2_borel() -> LiePair {
        LiePair::from_antisymmetric(3, 2, &[(0, 1, 1, q(2)), (0, 2, 2, q(-2)), (1, 2, 0, q(1))])
            .unwrap()
    }

    fn gl2_borel() -> LiePair {
        // basis (E11, E22, E12, E21)
        LiePair::from_antisymmetric(
            4,
            3,
            &[
                (0, 2, 2, q(1)),
                (1, 2, 2, q(-1)),
                (0, 3, 3, q(-1)),
                (1, 3, 3, q(1)),
                (2, 3, 0, q(1)),
                (2, 3, 1, q(-1)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn wedge_examples() {
        let x1 = Ext::gen(0);
        let x2 = Ext::gen(1);
        assert!(x1.wedge(&x1).is_zero());
        assert_eq!(x1.wedge(&x2), x2.wedge(&x1).neg());
        assert_eq!(x1.add(&x2).wedge(&x2), x1.wedge(&x2));
    }

    #[test]
    fn d_examples() {
        let p = LiePair::from_antisymmetric(2, 1, &[(0, 1, 1, q(1))]).unwrap();
        assert!(ExtAlgebra::new(&p).d(&Ext::gen(0)).is_zero());
        let a = ExtAlgebra::new(&nonabelian2());
        assert_eq!(a.d(&Ext::gen(1)), Ext::gen(0).wedge(&Ext::gen(1)).neg());
    }

    #[test]
    fn interior_and_lie_derivative() {
        let a = ExtAlgebra::new(&nonabelian2());
        assert_eq!(a.interior(&[q(1), q(0)], &Ext::gen(0)), Ext::one());
        let x = Ext::gen(0).wedge(&Ext::gen(1));
        let v = [q(2), q(-3)];
        assert!(a.interior(&v, &a.interior(&v, &x)).is_zero());
        assert_eq!(a.lie_derivative(&[q(1), q(0)], &Ext::gen(1)), Ext::gen(1).neg());
    }

    #[test]
    fn d_squares_to_zero_and_identities() {
        for p in [nonabelian2(), sl2_borel(), gl2_borel()] {
            let a = ExtAlgebra::new(&p);
            for &w in a.masks() {
                let x = Ext::monomial(w, q(1));
                assert!(a.d(&a.d(&x)).is_zero());
            }
            assert!(a.italo_defect().0.is_zero());
            assert!(a.rats_defect().0.is_zero());
        }
    }

    #[test]
    fn cartan_relations() {
        for p in [nonabelian2(), sl2_borel(), gl2_borel()] {
            let a = ExtAlgebra::new(&p);
            let m = p.dim_h();
            for i in 0..m {
                for j in 0..m {
                    let (ei, ej) = (crate::lie_pair::unit(m, i), crate::lie_pair::unit(m, j));
                    let li = a.lie_derivative_derivation(&ei);
                    let lhs = li.commutator(&Derivation::interior(&ej));
                    let br = p.p(&p.bracket(&p.i(&ei), &p.i(&ej)));
                    let rhs = Derivation::interior(&br);
                    for &w in a.masks() {
                        let x = Ext::monomial(w, q(1));
                        assert_eq!(lhs.apply(&x), rhs.apply(&x));
                    }
                }
            }
        }
    }

    fn ext3() -> impl Strategy<Value = Ext> {
        proptest::collection::vec((0u32..8, -3i64..4), 0..5).prop_map(|ts| {
            let mut e = Ext::zero();
            for (m, c) in ts {
                e.add_term(m, &q(c));
            }
            e
        })
    }

    proptest! {
        #[test]
        fn wedge_associative_graded_commutative(x in ext3(), y in ext3(), z in ext3()) {
            prop_assert_eq!(x.wedge(&y).wedge(&z), x.wedge(&y.wedge(&z)));
            for (p, xp) in x.components() {
                for (r, yr) in y.components() {
                    let s = Scalar::sign((p * r) as i64);
                    prop_assert_eq!(xp.wedge(&yr), yr.wedge(&xp).scale(&s));
                }
            }
        }

        #[test]
        fn d_is_odd_derivation(x in ext3(), y in ext3()) {
            let a = ExtAlgebra::new(&gl2_borel());
            for (p, xp) in x.components() {
                let lhs = a.d(&xp.wedge(&y));
                let rhs = a.d(&xp).wedge(&y).add(&xp.wedge(&a.d(&y)).scale(&Scalar::sign(p as i64)));
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}
