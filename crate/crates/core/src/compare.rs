//! Cohomology algebras of transferred structures and the comparison of the
//! structures obtained from two sets of choices.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::enveloping::ug::WordVec;
use crate::enveloping::uenv::frame_to_mono;
use crate::enveloping::MonoVec;
use crate::error::{Error, Result};
use crate::exterior::Ext;
use crate::graded::{Echelon, LinearOperator, Vector};
use crate::hpl::{build_main_contraction, Choices, MainContraction};
use crate::lie_pair::{invert_dense, Coords, LiePair};
use crate::scalar::Scalar;
use crate::sections::{Check, Section};
use crate::transfer::{compositions, transfer, weighted_tuples, Transfer};

/// A cohomology class of `(small, m₁)` with a representative of minimal
/// filtration weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassInfo {
    pub degree: i32,
    pub weight: usize,
    pub representative: Vector,
}

/// `H(m₁)` with the product induced by `m₂` on representatives.
#[derive(Clone, Debug)]
pub struct CohomologyAlgebra {
    pub classes: Vec<ClassInfo>,
    /// `(a, b) ↦` coordinates of `[m₂(r_a, r_b)]`, for `w_a + w_b ≤ N`.
    pub table: BTreeMap<(usize, usize), Vec<Scalar>>,
    pub weight_cap: usize,
    echelons: BTreeMap<i32, (Echelon, Vec<usize>)>,
}

impl CohomologyAlgebra {
    /// Coordinates of the class of a cocycle; `None` if it is not a cocycle
    /// in the span of the representatives and coboundaries.
    pub fn classify(&self, z: &Vector, degree: i32) -> Option<Vec<Scalar>> {
        let mut out = vec![Scalar::zero(); self.classes.len()];
        if z.is_zero() {
            return Some(out);
        }
        let (ech, ids) = self.echelons.get(&degree)?;
        let (res, tag) = ech.reduce(z.clone(), Vector::new());
        if !res.is_zero() {
            return None;
        }
        for (r, &id) in ids.iter().enumerate() {
            out[id] = -tag.get(r);
        }
        Some(out)
    }

    fn product(&self, a: &[Scalar], b: &[Scalar]) -> Option<Vec<Scalar>> {
        let mut out = vec![Scalar::zero(); self.classes.len()];
        for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, y) in b.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                let e = self.table.get(&(i, j))?;
                for (k, z) in e.iter().enumerate() {
                    out[k] += &(&(x * y) * z);
                }
            }
        }
        Some(out)
    }

    /// `([a][b])[c] = [a]([b][c])` wherever `w_a + w_b + w_c ≤ N`.
    pub fn associativity_check(&self) -> Check {
        let n = self.classes.len();
        let unit = |i: usize| (0..n).map(|k| if k == i { Scalar::one() } else { Scalar::zero() }).collect::<Vec<_>>();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let w = self.classes[a].weight + self.classes[b].weight + self.classes[c].weight;
                    if w > self.weight_cap {
                        continue;
                    }
                    let left = self.product(&self.table[&(a, b)], &unit(c));
                    let right = self.product(&unit(a), &self.table[&(b, c)]);
                    if left != right {
                        return Check::new(
                            "cohomology product is associative",
                            false,
                            Some(format!("classes ({a}, {b}, {c})")),
                        );
                    }
                }
            }
        }
        Check::new("cohomology product is associative", true, None)
    }
}

/// `m₂(x, y)` on homogeneous small vectors.
pub fn m2(t: &Transfer, x: &Vector, y: &Vector) -> Vector {
    let mut out = Vector::new();
    for (i, a) in x.iter() {
        for (j, b) in y.iter() {
            out.add_scaled(&t.m(&[i, j]), &(a * b));
        }
    }
    out
}

/// Cohomology algebra of a transferred structure. Representatives are chosen
/// filtration by filtration, so each class carries the least weight at which
/// it is represented.
pub fn cohomology_algebra(t: &Transfer) -> Result<CohomologyAlgebra> {
    let d = &t.d_small;
    let dim = t.small.dim();
    let mut by_degree: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for j in 0..dim {
        by_degree.entry(t.small.degree(j)).or_default().push(j);
    }
    let mut classes = Vec::new();
    let mut echelons = BTreeMap::new();
    for (&deg, idx) in &by_degree {
        let mut ech = Echelon::new();
        if let Some(prev) = by_degree.get(&(deg - 1)) {
            for &j in prev {
                ech.insert(d.col(j).clone(), Vector::new());
            }
        }
        let mut ids = Vec::new();
        for w in 0..=t.weight_cap {
            let sub: Vec<usize> = idx.iter().copied().filter(|&j| t.small_weights[j] <= w).collect();
            if sub.is_empty() {
                continue;
            }
            let cols = sub.iter().map(|&j| d.col(j).clone()).collect();
            let op = LinearOperator::new(Arc::new(vec![deg; sub.len()]), d.cod().clone(), 1, cols)?;
            for k in op.kernel() {
                let z: Vector = k.iter().map(|(i, c)| (sub[i], c.clone())).collect();
                let r = ids.len();
                if ech.insert(z.clone(), Vector::unit(r)).is_none() {
                    ids.push(classes.len());
                    classes.push(ClassInfo { degree: deg, weight: w, representative: z });
                }
            }
        }
        echelons.insert(deg, (ech, ids));
    }
    let mut alg = CohomologyAlgebra { classes, table: BTreeMap::new(), weight_cap: t.weight_cap, echelons };
    let n = alg.classes.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| alg.classes[a].weight + alg.classes[b].weight <= t.weight_cap)
        .collect();
    let entries = pairs
        .par_iter()
        .map(|&(a, b)| {
            let (ca, cb) = (&alg.classes[a], &alg.classes[b]);
            let z = m2(t, &ca.representative, &cb.representative);
            let coords = alg.classify(&z, ca.degree + cb.degree).ok_or_else(|| {
                Error::Construction(format!("product of classes {a} and {b} is not a cocycle"))
            })?;
            Ok(((a, b), coords))
        })
        .collect::<Result<Vec<_>>>()?;
    alg.table = entries.into_iter().collect();
    Ok(alg)
}

/// Outcome of [`compare_structures`].
#[derive(Debug)]
pub struct Comparison {
    pub first: MainContraction,
    pub second: MainContraction,
    pub transfer1: Transfer,
    pub transfer2: Transfer,
    /// Strict isomorphism between the two presentations of 𝒰(π^!L).
    pub g: LinearOperator,
    /// Identification of the two presentations of Λ𝔥^∨ ⊗ 𝒰_{L/A}.
    pub c: LinearOperator,
    /// Taylor coefficients of `ℙ′ ∘ G ∘ 𝕀` in bar form, nonzero entries only.
    pub taylor: Vec<BTreeMap<Vec<usize>, Vector>>,
    pub checks: Vec<Check>,
    pub algebra1: CohomologyAlgebra,
    pub algebra2: CohomologyAlgebra,
    /// `[C]` on class coordinates, by rows of the first algebra.
    pub class_map: Vec<Vec<Scalar>>,
}

fn mat_mul(a: &[Coords], b: &[Coords]) -> Vec<Coords> {
    let n = b.first().map(|r| r.len()).unwrap_or(0);
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| row.iter().zip(b).map(|(x, br)| x * &br[j]).sum())
                .collect()
        })
        .collect()
}

fn transport_section(s: &Section, m: &[Coords]) -> Section {
    let n = m.len();
    let mut nu = vec![Ext::zero(); n];
    for (v, nv) in s.nu.iter().enumerate() {
        for (a, c) in m[v].iter().enumerate() {
            if !c.is_zero() {
                nu[a].add_scaled(nv, c);
            }
        }
    }
    Section { x: s.x.clone(), nu }
}

/// Build both structures and the comparison morphism `ℙ′ ∘ G ∘ 𝕀` up to the
/// arity cap. Its first Taylor coefficient must equal `C`; the higher ones
/// are reported.
pub fn compare_structures(
    pair: &LiePair,
    choices1: &Choices,
    choices2: &Choices,
    cap: usize,
    arity_cap: usize,
) -> Result<Comparison> {
    let first = build_main_contraction(pair, choices1, cap)?;
    let second = build_main_contraction(pair, choices2, cap)?;
    let rows1 = choices1.basis_rows(pair)?;
    let rows2 = choices2.basis_rows(pair)?;
    // coordinates in the first basis → coordinates in the second
    let m = mat_mul(&rows1, &invert_dense(&rows2)?);
    let transfer1 = transfer(&first, arity_cap)?;
    let transfer2 = transfer(&second, arity_cap)?;

    let (f1, f2) = (&first.frame, &second.frame);
    let u2 = &second.uenv;
    let gen_images: Vec<MonoVec> = (0..f1.num_gens())
        .map(|g| frame_to_mono(&f2.from_raw(&transport_section(f1.generator(g), &m))))
        .collect();
    let g = LinearOperator::from_fn(first.big.degrees(), second.big.degrees(), 0, |j| {
        let (mask, w) = first.big.label(j);
        let mut acc = MonoVec::one();
        for &x in w.iter().rev() {
            acc = u2.mul(&gen_images[x], &acc);
        }
        acc.left_mul_ext(&Ext::monomial(*mask, Scalar::one()))
            .to_vector(&second.big)
            .expect("weight preserved")
    })?;

    let dm = pair.dim_h();
    let ug2 = &second.ug;
    let lifts: Vec<WordVec> = (0..pair.dim_b())
        .map(|l| {
            let mut x = WordVec::zero();
            for (j, c) in m[dm + l].iter().enumerate() {
                x.add_term(vec![j], c);
            }
            x
        })
        .collect();
    let c = LinearOperator::from_fn(first.small.degrees(), second.small.degrees(), 0, |j| {
        let (mask, mono) = first.small.label(j);
        let mut acc = WordVec::word(vec![]);
        for &l in mono.iter().rev() {
            acc = ug2.multiply(&lifts[l], &acc, None).expect("no cap");
        }
        ug2.project_ula(&acc)
            .terms()
            .map(|(w, c)| (second.small.index_of(&(*mask, w.clone())).expect("label"), c.clone()))
            .collect()
    })?;

    let mut cmp = Comparison {
        taylor: vec![BTreeMap::new(); arity_cap + 1],
        algebra1: cohomology_algebra(&transfer1)?,
        algebra2: cohomology_algebra(&transfer2)?,
        first,
        second,
        transfer1,
        transfer2,
        g,
        c,
        checks: Vec::new(),
        class_map: Vec::new(),
    };
    for n in 1..=arity_cap {
        let tuples = weighted_tuples(&cmp.transfer1.small_weights, n, cap);
        let rows = tuples
            .par_iter()
            .map(|t| Ok((t.clone(), cmp.taylor_entry(t)?)))
            .collect::<Result<Vec<_>>>()?;
        cmp.taylor[n] = rows.into_iter().filter(|(_, v)| !v.is_zero()).collect();
    }

    let k1 = LinearOperator::from_fn(cmp.first.small.degrees(), cmp.second.small.degrees(), 0, |j| cmp.k(&[j]))?;
    let witness = k1.first_difference(&cmp.c).map(|(j, d)| format!("{:?}: {d:?}", cmp.first.small.label(j)));
    cmp.checks.push(Check::new("first Taylor coefficient is the identity", witness.is_none(), witness));
    let ident = cmp.c.first_difference(&cmp.second.p_u.compose(&cmp.g)?.compose(&cmp.first.contraction().i)?);
    cmp.checks.push(Check::new("P_U G I = C", ident.is_none(), ident.map(|(j, _)| format!("column {j}"))));
    let morph = cmp.morphism_check()?;
    cmp.checks.push(morph);
    cmp.checks.push(cmp.algebra1.associativity_check());
    cmp.checks.push(cmp.algebra2.associativity_check());
    let tables = cmp.table_check()?;
    cmp.checks.push(tables);
    Ok(cmp)
}

impl Comparison {
    fn taylor_entry(&self, t: &[usize]) -> Result<Vector> {
        let (t1, t2) = (&self.transfer1, &self.transfer2);
        let mut out = Vector::new();
        'comp: for comp in compositions(t.len()) {
            let mut args = Vec::with_capacity(comp.len());
            let mut at = 0;
            for &len in &comp {
                let v = self.g.apply(&t1.f(&t[at..at + len]));
                if v.is_zero() {
                    continue 'comp;
                }
                args.push(v);
                at += len;
            }
            out.add_scaled(&t2.projection_component(&args)?, &Scalar::one());
        }
        Ok(out)
    }

    /// Bar-form Taylor coefficient on a basis tuple.
    pub fn k(&self, t: &[usize]) -> Vector {
        self.taylor.get(t.len()).and_then(|m| m.get(t)).cloned().unwrap_or_default()
    }

    /// Number of nonzero entries of each higher Taylor coefficient.
    pub fn higher_coefficients(&self) -> Vec<(usize, usize)> {
        (2..self.taylor.len()).map(|n| (n, self.taylor[n].len())).collect()
    }

    /// `Σ ± K(1^r ⊗ b_s ⊗ 1^t) = Σ b′_k(K ⊗ … ⊗ K)` on basis tuples.
    pub fn morphism_check(&self) -> Result<Check> {
        let t1 = &self.transfer1;
        let name = "comparison is an A-infinity morphism";
        for n in 1..self.taylor.len() {
            let tuples = weighted_tuples(&t1.small_weights, n, t1.weight_cap);
            let bad = tuples
                .par_iter()
                .map(|t| {
                    let d: Vec<i32> = t.iter().map(|&i| t1.small.degree(i)).collect();
                    let mut lhs = Vector::new();
                    for s in 1..=n {
                        for r in 0..=(n - s) {
                            let inner = t1.b(&t[r..r + s]);
                            if inner.is_zero() {
                                continue;
                            }
                            let e: i32 = d[..r].iter().map(|x| x - 1).sum();
                            let outer = t1.with_slot(&t[..r], &inner, &t[r + s..], |u| self.k(u));
                            lhs.add_scaled(&outer, &Scalar::sign(e as i64));
                        }
                    }
                    let mut rhs = Vector::new();
                    for comp in compositions(n) {
                        let mut outs = Vec::with_capacity(comp.len());
                        let mut at = 0;
                        for &len in &comp {
                            outs.push(self.k(&t[at..at + len]));
                            at += len;
                        }
                        rhs.add_scaled(&self.transfer2.b_on_vectors(&outs), &Scalar::one());
                    }
                    (lhs != rhs).then(|| format!("inputs {t:?}"))
                })
                .collect::<Vec<_>>();
            if let Some(w) = bad.into_iter().flatten().next() {
                return Ok(Check::new(name, false, Some(w)));
            }
        }
        Ok(Check::new(name, true, None))
    }

    /// Compute `[C]` and compare the product tables through it entry by
    /// entry.
    fn table_check(&mut self) -> Result<Check> {
        let name = "cohomology product tables agree";
        let (a1, a2) = (&self.algebra1, &self.algebra2);
        if a1.classes.len() != a2.classes.len() {
            return Ok(Check::new(
                name,
                false,
                Some(format!("{} classes against {}", a1.classes.len(), a2.classes.len())),
            ));
        }
        let mut map = Vec::with_capacity(a1.classes.len());
        for (i, cl) in a1.classes.iter().enumerate() {
            let img = self.c.apply(&cl.representative);
            match a2.classify(&img, cl.degree) {
                Some(v) => map.push(v),
                None => return Ok(Check::new(name, false, Some(format!("class {i} does not map to a class")))),
            }
        }
        self.class_map = map;
        let (a1, a2, map) = (&self.algebra1, &self.algebra2, &self.class_map);
        for (&(a, b), prod) in &a1.table {
            let mut lhs = vec![Scalar::zero(); a2.classes.len()];
            for (k, c) in prod.iter().enumerate() {
                for (l, x) in map[k].iter().enumerate() {
                    lhs[l] += &(c * x);
                }
            }
            match a2.product(&map[a], &map[b]) {
                Some(rhs) if rhs == lhs => {}
                _ => return Ok(Check::new(name, false, Some(format!("classes ({a}, {b})")))),
            }
        }
        Ok(Check::new(name, true, None))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_pair::Bilinear;

    fn q(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn solvable() -> LiePair {
        LiePair::from_antisymmetric(2, 1, &[(0, 1, 1, q(1))]).unwrap()
    }

    #[test]
    fn solvable_cohomology() {
        let mc = build_main_contraction(&solvable(), &Choices::default(), 3).unwrap();
        let t = transfer(&mc, 2).unwrap();
        let alg = cohomology_algebra(&t).unwrap();
        let degs: Vec<i32> = alg.classes.iter().map(|c| c.degree).collect();
        assert_eq!(degs, vec![0, 1]);
        let one = t.small.index_of(&(0, vec![])).unwrap();
        assert_eq!(alg.classes[0].representative, Vector::unit(one));
        assert_eq!(alg.table[&(0, 0)], vec![q(1), q(0)]);
        assert_eq!(alg.table[&(0, 1)], vec![q(0), q(1)]);
        assert_eq!(alg.table[&(1, 0)], vec![q(0), q(1)]);
        assert_eq!(alg.table[&(1, 1)], vec![q(0), q(0)]);
        assert!(alg.associativity_check().pass);
    }

    #[test]
    fn polynomial_cohomology() {
        let p = LiePair::from_antisymmetric(1, 0, &[]).unwrap();
        let mc = build_main_contraction(&p, &Choices::default(), 3).unwrap();
        let t = transfer(&mc, 2).unwrap();
        let alg = cohomology_algebra(&t).unwrap();
        let weights: Vec<usize> = alg.classes.iter().map(|c| c.weight).collect();
        assert_eq!(weights, vec![0, 1, 2, 3]);
        for a in 0..4 {
            for b in 0..4 {
                if a + b <= 3 {
                    let mut e = vec![q(0); 4];
                    e[a + b] = q(1);
                    assert_eq!(alg.table[&(a, b)], e);
                }
            }
        }
    }

    #[test]
    fn identical_and_distinct_choices() {
        let p = solvable();
        let same = compare_structures(&p, &Choices::default(), &Choices::default(), 3, 3).unwrap();
        for c in &same.checks {
            assert!(c.pass, "{c:?}");
        }
        let id = LinearOperator::identity(same.first.small.degrees());
        assert!(same.c.first_difference(&id).is_none());
        let other = Choices { splitting: Some(vec![vec![q(1)]]), aux: Some(Bilinear::from_entries(2, &[(1, 1, 0, q(1))]).unwrap()) };
        let cmp = compare_structures(&p, &Choices::default(), &other, 3, 3).unwrap();
        for c in &cmp.checks {
            assert!(c.pass, "{c:?}");
        }
    }
}
