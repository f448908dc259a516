//! Homotopy transfer of the product of 𝒰(π^!L) along the main contraction:
//! the A∞ structure on Λ𝔥^∨ ⊗ 𝒰_{L/A}, the A∞ morphisms 𝕀 and ℙ, and the
//! Stasheff checks.
//!
//! Internally everything is in bar form on the suspension: `b₁ = d`,
//! `b₂(x, y) = (−1)^{|x|} xy`, homotopy `h = −H`, and morphism components of
//! degree zero. Koszul signs use the suspended degree `|x| − 1`. The
//! operations are reported in the form `m_n` of degree `2 − n` with Stasheff
//! sign `(−1)^{r+st}`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use rayon::prelude::*;

use crate::enveloping::uenv::Uenv;
use crate::enveloping::MonoVec;
use crate::error::Result;
use crate::graded::{LinearOperator, Vector};
use crate::hpl::{Contraction, MainContraction, Space};
use crate::scalar::Scalar;
use crate::sections::Check;

fn sign(k: i32) -> Scalar {
    Scalar::sign(k as i64)
}

/// The product of 𝒰(π^!L) on the truncated word space, cached on basis
/// pairs.
#[derive(Debug)]
pub struct BigProduct {
    space: Space,
    uenv: Arc<Uenv>,
    cache: RwLock<HashMap<(usize, usize), Vector>>,
}

impl BigProduct {
    pub fn new(space: Space, uenv: Arc<Uenv>) -> Self {
        BigProduct { space, uenv, cache: RwLock::new(HashMap::new()) }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    fn basis(&self, i: usize, j: usize) -> Result<Vector> {
        if let Some(v) = self.cache.read().expect("cache").get(&(i, j)) {
            return Ok(v.clone());
        }
        let (m1, w1) = self.space.label(i);
        let (m2, w2) = self.space.label(j);
        let x = MonoVec::term(*m1, w1.clone(), Scalar::one());
        let y = MonoVec::term(*m2, w2.clone(), Scalar::one());
        let v = self.uenv.mul(&x, &y).to_vector(&self.space)?;
        self.cache.write().expect("cache").insert((i, j), v.clone());
        Ok(v)
    }

    pub fn mul(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        let mut out = Vector::new();
        for (i, a) in x.iter() {
            for (j, b) in y.iter() {
                out.add_scaled(&self.basis(i, j)?, &(a * b));
            }
        }
        Ok(out)
    }

    /// `b₂(x, y) = (−1)^{|x|} xy`.
    pub fn b2(&self, x: &Vector, dx: i32, y: &Vector) -> Result<Vector> {
        Ok(self.mul(x, y)?.scale(&sign(dx)))
    }
}

/// Tuples of basis indices of length `n` with total weight ≤ `cap`.
pub fn weighted_tuples(weights: &[usize], n: usize, cap: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(weights: &[usize], n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for (i, &w) in weights.iter().enumerate() {
            if w <= left {
                cur.push(i);
                rec(weights, n, left - w, cur, out);
                cur.pop();
            }
        }
    }
    rec(weights, n, cap, &mut cur, &mut out);
    out
}

/// Sign turning the bar-form operation `b_n` into `m_n` on inputs of the given
/// degrees.
pub fn m_sign(degrees: &[i32]) -> Scalar {
    let n = degrees.len() as i32;
    let mut k = 0;
    for (j, d) in degrees.iter().enumerate() {
        k += (n - 1 - j as i32) * d;
    }
    sign(k)
}

/// Transferred A∞ structure together with the components of 𝕀.
#[derive(Debug)]
pub struct Transfer {
    pub small: Space,
    pub big: Space,
    pub small_weights: Vec<usize>,
    pub big_weights: Vec<usize>,
    pub weight_cap: usize,
    pub arity_cap: usize,
    pub d_small: LinearOperator,
    pub d_big: LinearOperator,
    pub p: LinearOperator,
    pub i: LinearOperator,
    /// `h = −H`.
    pub h: LinearOperator,
    pub ip: LinearOperator,
    pub product: BigProduct,
    /// `f[n][tuple]`: bar-form components of 𝕀, nonzero entries only.
    f: Vec<BTreeMap<Vec<usize>, Vector>>,
    /// `b[n][tuple]`: bar-form transferred operations, `n ≥ 2`.
    b: Vec<BTreeMap<Vec<usize>, Vector>>,
}

fn weight_of(labels: &Space, t: &[usize]) -> usize {
    t.iter().map(|&i| labels.label(i).1.len()).sum()
}

/// The contraction itself when `HI = 0`, `PH = 0` and `HH = 0` hold, its
/// side-conditioned replacement otherwise.
pub fn side_conditioned(c: &Contraction) -> Result<Contraction> {
    let ok = c.h.compose(&c.i)?.is_zero() && c.p.compose(&c.h)?.is_zero() && c.h.compose(&c.h)?.is_zero();
    if ok {
        Ok(c.clone())
    } else {
        c.normalize_side_conditions()
    }
}

/// Build the transferred structure up to `arity_cap` on all tuples of total
/// weight ≤ the truncation.
pub fn transfer(mc: &MainContraction, arity_cap: usize) -> Result<Transfer> {
    let c = &side_conditioned(mc.contraction())?;
    let small = mc.small.clone();
    let big = mc.big.clone();
    let small_weights: Vec<usize> = small.labels().iter().map(|(_, w)| w.len()).collect();
    let big_weights: Vec<usize> = big.labels().iter().map(|(_, w)| w.len()).collect();
    let h = c.h.scale(&-Scalar::one());
    let ip = c.i.compose(&c.p)?;
    let mut t = Transfer {
        product: BigProduct::new(big.clone(), mc.uenv.clone()),
        small,
        big,
        small_weights,
        big_weights,
        weight_cap: mc.cap,
        arity_cap,
        d_small: c.d_small.clone(),
        d_big: c.d_big.clone(),
        p: c.p.clone(),
        i: c.i.clone(),
        h,
        ip,
        f: vec![BTreeMap::new(); arity_cap + 1],
        b: vec![BTreeMap::new(); arity_cap + 1],
    };
    for j in 0..t.small.dim() {
        let v = t.i.col(j).clone();
        if !v.is_zero() {
            t.f[1].insert(vec![j], v);
        }
    }
    for n in 2..=arity_cap {
        let tuples = weighted_tuples(&t.small_weights, n, t.weight_cap);
        let rows = tuples
            .par_iter()
            .map(|tu| {
                let s = t.tree_sum(tu)?;
                Ok((tu.clone(), t.h.apply(&s), t.p.apply(&s)))
            })
            .collect::<Result<Vec<_>>>()?;
        for (tu, fv, bv) in rows {
            if !fv.is_zero() {
                t.f[n].insert(tu.clone(), fv);
            }
            if !bv.is_zero() {
                t.b[n].insert(tu, bv);
            }
        }
    }
    Ok(t)
}

impl Transfer {
    fn small_deg(&self, i: usize) -> i32 {
        self.small.degree(i)
    }

    fn degs(&self, t: &[usize]) -> Vec<i32> {
        t.iter().map(|&i| self.small_deg(i)).collect()
    }

    /// `Σ_k b₂(F_k(t₁…t_k), F_{n−k}(t_{k+1}…t_n))`.
    fn tree_sum(&self, t: &[usize]) -> Result<Vector> {
        let n = t.len();
        let mut s = Vector::new();
        for k in 1..n {
            let (l, r) = t.split_at(k);
            let (Some(fl), Some(fr)) = (self.f[k].get(l), self.f[n - k].get(r)) else { continue };
            let dl: i32 = self.degs(l).iter().sum::<i32>() - k as i32 + 1;
            s.add_scaled(&self.product.b2(fl, dl, fr)?, &Scalar::one());
        }
        Ok(s)
    }

    /// Bar-form component of 𝕀 on a basis tuple.
    pub fn f(&self, t: &[usize]) -> Vector {
        self.f.get(t.len()).and_then(|m| m.get(t)).cloned().unwrap_or_default()
    }

    /// Bar-form operation on a basis tuple; `b₁ = d`.
    pub fn b(&self, t: &[usize]) -> Vector {
        match t.len() {
            1 => self.d_small.col(t[0]).clone(),
            n => self.b.get(n).and_then(|m| m.get(t)).cloned().unwrap_or_default(),
        }
    }

    /// `m_n` on a basis tuple.
    pub fn m(&self, t: &[usize]) -> Vector {
        self.b(t).scale(&m_sign(&self.degs(t)))
    }

    /// Nonzero entries of `m_n`.
    pub fn m_table(&self, n: usize) -> BTreeMap<Vec<usize>, Vector> {
        if n == 1 {
            return (0..self.small.dim())
                .filter(|&j| !self.d_small.col(j).is_zero())
                .map(|j| (vec![j], self.d_small.col(j).clone()))
                .collect();
        }
        self.b
            .get(n)
            .map(|tab| tab.iter().map(|(t, v)| (t.clone(), v.scale(&m_sign(&self.degs(t))))).collect())
            .unwrap_or_default()
    }

    /// Apply a basis-tuple operation with one slot replaced by a vector.
    pub(crate) fn with_slot<F>(&self, prefix: &[usize], v: &Vector, suffix: &[usize], op: F) -> Vector
    where
        F: Fn(&[usize]) -> Vector,
    {
        let mut out = Vector::new();
        let mut t: Vec<usize> = prefix.to_vec();
        t.push(0);
        t.extend_from_slice(suffix);
        let r = prefix.len();
        for (i, c) in v.iter() {
            t[r] = i;
            out.add_scaled(&op(&t), c);
        }
        out
    }

    /// Largest absolute coefficient of the arity-`n` Stasheff expression over
    /// all basis tuples within the weight cap, with a witness.
    pub fn stasheff_defect(&self, n: usize) -> StasheffReport {
        let tuples = weighted_tuples(&self.small_weights, n, self.weight_cap);
        let rows: Vec<(Vec<usize>, Vector)> = tuples
            .par_iter()
            .map(|t| {
                let d = self.degs(t);
                let mut total = Vector::new();
                for s in 1..=n {
                    for r in 0..=(n - s) {
                        let tt = n - r - s;
                        let inner = self.m(&t[r..r + s]);
                        if inner.is_zero() {
                            continue;
                        }
                        let passed: i32 = d[..r].iter().sum();
                        let e = (r + s * tt) as i32 + (2 - s as i32) * passed;
                        let outer = self.with_slot(&t[..r], &inner, &t[r + s..], |u| self.m(u));
                        total.add_scaled(&outer, &sign(e));
                    }
                }
                (t.clone(), total)
            })
            .collect();
        let mut report = StasheffReport { arity: n, tuples: rows.len(), max_defect: Scalar::zero(), witness: None };
        for (t, v) in rows {
            let a = v.max_abs();
            if a > report.max_defect {
                report.max_defect = a;
                report.witness = Some(format!("inputs {:?}", t.iter().map(|&i| self.small.label(i)).collect::<Vec<_>>()));
            }
        }
        report
    }

    /// Largest coefficient of `Σ ± b(1^r ⊗ b_s ⊗ 1^t)` in arity `n`, with the
    /// Koszul sign of the suspended inputs.
    pub fn bar_stasheff_defect(&self, n: usize) -> Scalar {
        weighted_tuples(&self.small_weights, n, self.weight_cap)
            .par_iter()
            .map(|t| {
                let d = self.degs(t);
                let mut total = Vector::new();
                for s in 1..=n {
                    for r in 0..=(n - s) {
                        let inner = self.b(&t[r..r + s]);
                        let e: i32 = d[..r].iter().map(|x| x - 1).sum();
                        total.add_scaled(&self.with_slot(&t[..r], &inner, &t[r + s..], |u| self.b(u)), &sign(e));
                    }
                }
                total.max_abs()
            })
            .max()
            .unwrap_or_else(Scalar::zero)
    }

    /// 𝕀 is an A∞ morphism: on every basis tuple,
    /// `Σ ± F(1^r ⊗ b′_s ⊗ 1^t) = D F_n + Σ b₂(F_k, F_{n−k})`.
    pub fn inclusion_morphism_check(&self) -> Result<Check> {
        let mut worst: Option<String> = None;
        for n in 1..=self.arity_cap {
            let tuples = weighted_tuples(&self.small_weights, n, self.weight_cap);
            let bad = tuples
                .par_iter()
                .map(|t| -> Result<Option<String>> {
                    let d = self.degs(t);
                    let mut lhs = Vector::new();
                    for s in 1..=n {
                        for r in 0..=(n - s) {
                            let inner = self.b(&t[r..r + s]);
                            if inner.is_zero() {
                                continue;
                            }
                            let e: i32 = d[..r].iter().map(|x| x - 1).sum();
                            let outer = self.with_slot(&t[..r], &inner, &t[r + s..], |u| self.f(u));
                            lhs.add_scaled(&outer, &sign(e));
                        }
                    }
                    let mut rhs = self.d_big.apply(&self.f(t));
                    rhs.add_scaled(&self.tree_sum_checked(t)?, &Scalar::one());
                    Ok((lhs != rhs).then(|| format!("inputs {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if let Some(w) = bad.into_iter().flatten().next() {
                worst = Some(w);
                break;
            }
        }
        Ok(Check::new("I is an A-infinity morphism", worst.is_none(), worst))
    }

    fn tree_sum_checked(&self, t: &[usize]) -> Result<Vector> {
        if t.len() < 2 {
            return Ok(Vector::new());
        }
        self.tree_sum(t)
    }

    fn big_deg(&self, v: &Vector) -> i32 {
        v.first().map(|(i, _)| self.big.degree(i)).unwrap_or(0)
    }

    /// `ℙ_n` on a tensor of homogeneous big vectors:
    /// `P ∘ (δ h_T)^{n−1}` with `h_T = Σ (IP)^{⊗(i−1)} ⊗ h ⊗ id` and `δ` the
    /// coderivation of `b₂`.
    pub fn projection_component(&self, xs: &[Vector]) -> Result<Vector> {
        let mut terms: Vec<(Scalar, Vec<(Vector, i32)>)> =
            vec![(Scalar::one(), xs.iter().map(|v| (v.clone(), self.big_deg(v))).collect())];
        while terms.first().map(|t| t.1.len()).unwrap_or(1) > 1 {
            let mut after_h = Vec::new();
            for (c, fs) in &terms {
                let mut passed = 0;
                for i in 0..fs.len() {
                    let hv = self.h.apply(&fs[i].0);
                    if !hv.is_zero() {
                        let mut nf = Vec::with_capacity(fs.len());
                        let mut ok = true;
                        for (j, (v, d)) in fs.iter().enumerate() {
                            if j < i {
                                let w = self.ip.apply(v);
                                ok &= !w.is_zero();
                                nf.push((w, *d));
                            } else if j == i {
                                nf.push((hv.clone(), d - 1));
                            } else {
                                nf.push((v.clone(), *d));
                            }
                        }
                        if ok {
                            after_h.push((c * &sign(passed), nf));
                        }
                    }
                    passed += fs[i].1 - 1;
                }
            }
            let mut after_d = Vec::new();
            for (c, fs) in &after_h {
                let mut passed = 0;
                for j in 0..fs.len() - 1 {
                    let prod = self.product.b2(&fs[j].0, fs[j].1, &fs[j + 1].0)?;
                    if !prod.is_zero() {
                        let mut nf: Vec<(Vector, i32)> = fs[..j].to_vec();
                        nf.push((prod, fs[j].1 + fs[j + 1].1));
                        nf.extend_from_slice(&fs[j + 2..]);
                        after_d.push((c * &sign(passed), nf));
                    }
                    passed += fs[j].1 - 1;
                }
            }
            if after_d.is_empty() {
                return Ok(Vector::new());
            }
            terms = after_d;
        }
        let mut out = Vector::new();
        for (c, fs) in terms {
            out.add_scaled(&self.p.apply(&fs[0].0), &c);
        }
        Ok(out)
    }

    /// ℙ is an A∞ morphism, checked on basis tuples of the big space up to
    /// `arity` with total weight within the cap:
    /// `Σ ± ℙ(1^r ⊗ b_s ⊗ 1^t) = Σ b′_k(ℙ_{i₁} ⊗ … ⊗ ℙ_{i_k})`.
    pub fn projection_morphism_check(&self, arity: usize) -> Result<Check> {
        let unit = |i: usize| Vector::unit(i);
        for n in 1..=arity.min(self.arity_cap) {
            let tuples = weighted_tuples(&self.big_weights, n, self.weight_cap);
            let bad = tuples
                .par_iter()
                .map(|t| -> Result<Option<String>> {
                    let d: Vec<i32> = t.iter().map(|&i| self.big.degree(i)).collect();
                    let xs: Vec<Vector> = t.iter().map(|&i| unit(i)).collect();
                    let mut lhs = Vector::new();
                    for r in 0..n {
                        let e: i32 = d[..r].iter().map(|x| x - 1).sum();
                        let mut args: Vec<Vector> = xs[..r].to_vec();
                        args.push(self.d_big.apply(&xs[r]));
                        args.extend_from_slice(&xs[r + 1..]);
                        if !args[r].is_zero() {
                            lhs.add_scaled(&self.projection_component(&args)?, &sign(e));
                        }
                        if r + 1 < n {
                            let mut args: Vec<Vector> = xs[..r].to_vec();
                            args.push(self.product.b2(&xs[r], d[r], &xs[r + 1])?);
                            args.extend_from_slice(&xs[r + 2..]);
                            if !args[r].is_zero() {
                                lhs.add_scaled(&self.projection_component(&args)?, &sign(e));
                            }
                        }
                    }
                    let mut rhs = Vector::new();
                    for comp in compositions(n) {
                        let mut outs = Vec::with_capacity(comp.len());
                        let mut at = 0;
                        for &len in &comp {
                            outs.push(self.projection_component(&xs[at..at + len])?);
                            at += len;
                        }
                        rhs.add_scaled(&self.b_on_vectors(&outs), &Scalar::one());
                    }
                    Ok((lhs != rhs).then(|| format!("inputs {:?}", t.iter().map(|&i| self.big.label(i)).collect::<Vec<_>>())))
                })
                .collect::<Result<Vec<_>>>()?;
            if let Some(w) = bad.into_iter().flatten().next() {
                return Ok(Check::new(format!("P is an A-infinity morphism (arity ≤ {arity})"), false, Some(w)));
            }
        }
        Ok(Check::new(format!("P is an A-infinity morphism (arity ≤ {arity})"), true, None))
    }

    /// `b′_k(v₁, …, v_k)` on small vectors, expanded multilinearly.
    pub fn b_on_vectors(&self, vs: &[Vector]) -> Vector {
        let mut out = Vector::new();
        if vs.iter().any(|v| v.is_zero()) {
            return out;
        }
        let mut stack: Vec<(Vec<usize>, Scalar)> = vec![(vec![], Scalar::one())];
        for v in vs {
            let mut next = Vec::new();
            for (t, c) in &stack {
                for (i, x) in v.iter() {
                    let mut u = t.clone();
                    u.push(i);
                    next.push((u, c * x));
                }
            }
            stack = next;
        }
        for (t, c) in stack {
            if t.len() > 1 && weight_of(&self.small, &t) > self.weight_cap {
                continue;
            }
            out.add_scaled(&self.b(&t), &c);
        }
        out
    }

    /// `m₂(1, x) = x = m₂(x, 1)` for the unit `1 ⊗ 1`.
    pub fn unit_check(&self) -> Check {
        let Some(one) = self.small.index_of(&(0, vec![])) else {
            return Check::new("m2(1, x) = x = m2(x, 1)", false, Some("no unit".into()));
        };
        for j in 0..self.small.dim() {
            let x = Vector::unit(j);
            if self.m(&[one, j]) != x || self.m(&[j, one]) != x {
                return Check::new(
                    "m2(1, x) = x = m2(x, 1)",
                    false,
                    Some(format!("x = {:?}", self.small.label(j))),
                );
            }
        }
        Check::new("m2(1, x) = x = m2(x, 1)", true, None)
    }

    /// Whether `m₂(f ⊗ 1, x) = f·x` and `m₂(x, f ⊗ 1) = (−1)^{|f||x|} f·x`
    /// for exterior monomials `f`, reported rather than asserted.
    pub fn exterior_linearity(&self) -> (bool, bool) {
        let mut left = true;
        let mut right = true;
        for (a, (fm, fw)) in self.small.labels().iter().enumerate() {
            if !fw.is_empty() {
                continue;
            }
            for (j, (m, w)) in self.small.labels().iter().enumerate() {
                let f = crate::exterior::Ext::monomial(*fm, Scalar::one());
                let prod = f.wedge(&crate::exterior::Ext::monomial(*m, Scalar::one()));
                let mut expected = Vector::new();
                for (mm, c) in prod.terms() {
                    expected.add_term(self.small.index_of(&(mm, w.clone())).expect("label"), c);
                }
                let e = crate::exterior::mask_degree(*fm) * self.small.degree(j);
                left &= self.m(&[a, j]) == expected;
                right &= self.m(&[j, a]) == expected.scale(&sign(e));
            }
        }
        (left, right)
    }
}

/// Ordered compositions of `n` into positive parts.
pub fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Result of [`Transfer::stasheff_defect`].
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct StasheffReport {
    pub arity: usize,
    pub tuples: usize,
    pub max_defect: Scalar,
    pub witness: Option<String>,
}

impl StasheffReport {
    pub fn check(&self) -> Check {
        Check::new(format!("Stasheff identity, arity {}", self.arity), self.max_defect.is_zero(), self.witness.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hpl::{build_main_contraction, Choices};
    use crate::lie_pair::LiePair;

    fn q(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn pairs() -> Vec<LiePair> {
        vec![
            LiePair::from_antisymmetric(2, 1, &[(0, 1, 1, q(1))]).unwrap(),
            LiePair::from_antisymmetric(3, 1, &[(0, 1, 2, q(1))]).unwrap(),
            LiePair::from_antisymmetric(3, 1, &[(1, 2, 0, q(1))]).unwrap(),
            LiePair::from_antisymmetric(2, 1, &[]).unwrap(),
            LiePair::from_antisymmetric(2, 0, &[(0, 1, 1, q(1))]).unwrap(),
        ]
    }

    #[test]
    fn stasheff_and_unit() {
        for p in pairs() {
            let mc = build_main_contraction(&p, &Choices::default(), 3).unwrap();
            let t = transfer(&mc, 4).unwrap();
            for n in 1..=4 {
                let r = t.stasheff_defect(n);
                assert!(r.max_defect.is_zero(), "{p:?} arity {n}: {r:?}");
                assert!(t.bar_stasheff_defect(n).is_zero());
            }
            assert!(t.unit_check().pass);
        }
    }

    #[test]
    fn stasheff_with_differential_feeding_m3() {
        let p = LiePair::from_antisymmetric(3, 1, &[(0, 1, 2, Scalar::one())]).unwrap();
        for c in [Scalar::ratio(1, 2), Scalar::one(), Scalar::from_int(-3)] {
            let ch = Choices { splitting: Some(vec![vec![Scalar::zero()], vec![c]]), aux: None };
            let t = transfer(&build_main_contraction(&p, &ch, 3).unwrap(), 4).unwrap();
            assert!(!t.m_table(3).is_empty());
            for n in 1..=4 {
                assert!(t.stasheff_defect(n).max_defect.is_zero(), "arity {n}");
                assert!(t.bar_stasheff_defect(n).is_zero(), "arity {n}");
            }
        }
    }

    #[test]
    fn morphisms() {
        for p in pairs() {
            let mc = build_main_contraction(&p, &Choices::default(), 3).unwrap();
            let t = transfer(&mc, 3).unwrap();
            let c = t.inclusion_morphism_check().unwrap();
            assert!(c.pass, "{c:?}");
            let c = t.projection_morphism_check(3).unwrap();
            assert!(c.pass, "{c:?}");
        }
    }

    #[test]
    fn compositions_count() {
        for n in 0..6 {
            assert_eq!(compositions(n).len(), 1 << n.saturating_sub(1));
        }
    }

    #[test]
    fn degenerate_pair_matches_ug() {
        use crate::enveloping::ug::{Ug, WordVec};
        use std::sync::Arc;
        let p = LiePair::from_antisymmetric(3, 0, &[(0, 1, 2, q(1)), (0, 2, 1, q(-1)), (1, 2, 0, q(2))]).unwrap();
        let mc = build_main_contraction(&p, &Choices::default(), 3).unwrap();
        let t = transfer(&mc, 4).unwrap();
        let ug = Ug::new(Arc::new(p));
        for (i, (_, a)) in t.small.labels().iter().enumerate() {
            for (j, (_, b)) in t.small.labels().iter().enumerate() {
                if a.len() + b.len() > 3 {
                    continue;
                }
                let prod = ug.multiply(&WordVec::word(a.clone()), &WordVec::word(b.clone()), Some(3)).unwrap();
                let expected: Vector = ug
                    .project_ula(&prod)
                    .terms()
                    .map(|(w, c)| (t.small.index_of(&(0, w.clone())).unwrap(), c.clone()))
                    .collect();
                assert_eq!(t.m(&[i, j]), expected);
            }
        }
        assert!(t.m_table(3).is_empty() && t.m_table(4).is_empty());
    }

    #[test]
    fn side_conditions_enforced() {
        let mc = build_main_contraction(&pairs()[0], &Choices::default(), 2).unwrap();
        let c = mc.contraction();
        let same = side_conditioned(c).unwrap();
        assert!(same.h.first_difference(&c.h).is_none());
        let degs = c.big.degrees().clone();
        let k = LinearOperator::from_fn(&degs, &degs, -2, |j| match degs.iter().position(|&d| d == degs[j] - 2) {
            Some(i) => Vector::unit(i),
            None => Vector::new(),
        })
        .unwrap();
        let comm = c.d_big.compose(&k).unwrap().sub(&k.compose(&c.d_big).unwrap()).unwrap();
        let spoiled = Contraction { h: c.h.add(&comm).unwrap(), ..c.clone() };
        assert!(spoiled.checks("spoiled").unwrap().iter().any(|x| !x.pass));
        let fixed = side_conditioned(&spoiled).unwrap();
        assert!(fixed.checks("fixed").unwrap().iter().all(|x| x.pass));
    }
}
