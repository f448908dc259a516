//! Graded vector spaces with structured bases, sparse vectors and operators,
//! incremental row reduction and cohomology of finite complexes.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;
use std::hash::Hash;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sign of permuting a list of homogeneous elements.
///
/// `permutation[i]` is the original position of the element that ends up in
/// slot `i`. The sign is `(-1)^k` with `k` the number of inverted pairs of
/// odd elements.
pub fn koszul_sign(degrees: &[i32], permutation: &[usize]) -> Result<Scalar> {
    let n = degrees.len();
    if permutation.len() != n {
        return Err(Error::InvalidInput("permutation length mismatch".into()));
    }
    let mut seen = vec![false; n];
    for &p in permutation {
        if p >= n || seen[p] {
            return Err(Error::InvalidInput("permutation is not a bijection".into()));
        }
        seen[p] = true;
    }
    let mut k = 0i64;
    for a in 0..n {
        for b in a + 1..n {
            let (x, y) = (permutation[a], permutation[b]);
            if x > y && degrees[x] % 2 != 0 && degrees[y] % 2 != 0 {
                k += 1;
            }
        }
    }
    Ok(Scalar::sign(k))
}

/// Sparse vector over basis indices; zero coefficients are never stored.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Vector(BTreeMap<usize, Scalar>);

impl Debug for Vector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_map().entries(self.0.iter()).finish()
    }
}

impl Vector {
    pub fn new() -> Self {
        Vector(BTreeMap::new())
    }

    pub fn unit(i: usize) -> Self {
        let mut v = Vector::new();
        v.0.insert(i, Scalar::one());
        v
    }

    pub fn from_terms<I: IntoIterator<Item = (usize, Scalar)>>(terms: I) -> Self {
        let mut v = Vector::new();
        for (i, c) in terms {
            v.add_term(i, &c);
        }
        v
    }

    pub fn add_term(&mut self, i: usize, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.0.get_mut(&i) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    self.0.remove(&i);
                }
            }
            None => {
                self.0.insert(i, c.clone());
            }
        }
    }

    pub fn get(&self, i: usize) -> Scalar {
        self.0.get(&i).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Scalar)> + '_ {
        self.0.iter().map(|(i, c)| (*i, c))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<(usize, &Scalar)> {
        self.0.iter().next().map(|(i, c)| (*i, c))
    }

    pub fn scale(&self, c: &Scalar) -> Vector {
        if c.is_zero() {
            return Vector::new();
        }
        Vector(self.0.iter().map(|(i, x)| (*i, x * c)).collect())
    }

    pub fn add_scaled(&mut self, other: &Vector, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (i, x) in other.iter() {
            self.add_term(i, &(x * c));
        }
    }

    pub fn add(&self, other: &Vector) -> Vector {
        let mut v = self.clone();
        v.add_scaled(other, &Scalar::one());
        v
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        let mut v = self.clone();
        v.add_scaled(other, &-Scalar::one());
        v
    }

    pub fn max_abs(&self) -> Scalar {
        self.0.values().map(|c| c.abs()).max().unwrap_or_default()
    }
}

impl FromIterator<(usize, Scalar)> for Vector {
    fn from_iter<I: IntoIterator<Item = (usize, Scalar)>>(iter: I) -> Self {
        Vector::from_terms(iter)
    }
}

/// A finite graded space whose basis vectors carry structured labels.
#[derive(Clone, Debug)]
pub struct GradedSpace<L> {
    labels: Vec<L>,
    degrees: Arc<Vec<i32>>,
    index: HashMap<L, usize>,
}

impl<L: Clone + Eq + Hash + Debug> GradedSpace<L> {
    pub fn new(basis: Vec<(L, i32)>) -> Result<Self> {
        let mut index = HashMap::with_capacity(basis.len());
        let mut labels = Vec::with_capacity(basis.len());
        let mut degrees = Vec::with_capacity(basis.len());
        for (i, (l, d)) in basis.into_iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::InvalidInput(format!("duplicate basis label {l:?}")));
            }
            labels.push(l);
            degrees.push(d);
        }
        Ok(GradedSpace {
            labels,
            degrees: Arc::new(degrees),
            index,
        })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, i: usize) -> &L {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[L] {
        &self.labels
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.degrees[i]
    }

    pub fn degrees(&self) -> &Arc<Vec<i32>> {
        &self.degrees
    }

    pub fn index_of(&self, l: &L) -> Option<usize> {
        self.index.get(l).copied()
    }

    /// Labelled terms of a vector, in basis order.
    pub fn element(&self, v: &Vector) -> Vec<(L, Scalar)> {
        v.iter().map(|(i, c)| (self.labels[i].clone(), c.clone())).collect()
    }
}

fn same_degrees(a: &Arc<Vec<i32>>, b: &Arc<Vec<i32>>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Homogeneous linear map between graded spaces, stored by sparse columns.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearOperator {
    dom: Arc<Vec<i32>>,
    cod: Arc<Vec<i32>>,
    shift: i32,
    cols: Vec<Vector>,
}

impl LinearOperator {
    pub fn new(
        dom: Arc<Vec<i32>>,
        cod: Arc<Vec<i32>>,
        shift: i32,
        cols: Vec<Vector>,
    ) -> Result<Self> {
        if cols.len() != dom.len() {
            return Err(Error::InvalidInput("column count differs from domain".into()));
        }
        for (j, c) in cols.iter().enumerate() {
            for (i, _) in c.iter() {
                if i >= cod.len() {
                    return Err(Error::InvalidInput(format!("row {i} out of range")));
                }
                if cod[i] != dom[j] + shift {
                    return Err(Error::InvalidInput(format!(
                        "column {j} (degree {}) has an entry in degree {} with shift {shift}",
                        dom[j], cod[i]
                    )));
                }
            }
        }
        Ok(LinearOperator { dom, cod, shift, cols })
    }

    pub fn from_fn<F>(dom: &Arc<Vec<i32>>, cod: &Arc<Vec<i32>>, shift: i32, f: F) -> Result<Self>
    where
        F: FnMut(usize) -> Vector,
    {
        let cols = (0..dom.len()).map(f).collect();
        LinearOperator::new(dom.clone(), cod.clone(), shift, cols)
    }

    pub fn identity(space: &Arc<Vec<i32>>) -> Self {
        LinearOperator {
            dom: space.clone(),
            cod: space.clone(),
            shift: 0,
            cols: (0..space.len()).map(Vector::unit).collect(),
        }
    }

    pub fn zero(dom: &Arc<Vec<i32>>, cod: &Arc<Vec<i32>>, shift: i32) -> Self {
        LinearOperator {
            dom: dom.clone(),
            cod: cod.clone(),
            shift,
            cols: vec![Vector::new(); dom.len()],
        }
    }

    pub fn dom(&self) -> &Arc<Vec<i32>> {
        &self.dom
    }

    pub fn cod(&self) -> &Arc<Vec<i32>> {
        &self.cod
    }

    pub fn shift(&self) -> i32 {
        self.shift
    }

    pub fn col(&self, j: usize) -> &Vector {
        &self.cols[j]
    }

    pub fn cols(&self) -> &[Vector] {
        &self.cols
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        let mut out = Vector::new();
        for (j, c) in v.iter() {
            out.add_scaled(&self.cols[j], c);
        }
        out
    }

    /// `self ∘ g`.
    pub fn compose(&self, g: &LinearOperator) -> Result<LinearOperator> {
        if !same_degrees(&g.cod, &self.dom) {
            return Err(Error::InvalidInput("composition domain mismatch".into()));
        }
        Ok(LinearOperator {
            dom: g.dom.clone(),
            cod: self.cod.clone(),
            shift: self.shift + g.shift,
            cols: g.cols.iter().map(|c| self.apply(c)).collect(),
        })
    }

    fn check_shape(&self, other: &LinearOperator) -> Result<()> {
        if !same_degrees(&self.dom, &other.dom)
            || !same_degrees(&self.cod, &other.cod)
            || self.shift != other.shift
        {
            return Err(Error::InvalidInput("operator shapes differ".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &LinearOperator) -> Result<LinearOperator> {
        self.check_shape(other)?;
        Ok(LinearOperator {
            cols: self.cols.iter().zip(&other.cols).map(|(a, b)| a.add(b)).collect(),
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &LinearOperator) -> Result<LinearOperator> {
        self.check_shape(other)?;
        Ok(LinearOperator {
            cols: self.cols.iter().zip(&other.cols).map(|(a, b)| a.sub(b)).collect(),
            ..self.clone()
        })
    }

    pub fn scale(&self, c: &Scalar) -> LinearOperator {
        LinearOperator {
            cols: self.cols.iter().map(|v| v.scale(c)).collect(),
            ..self.clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vector::is_zero)
    }

    /// First column where the two operators differ, with the difference.
    pub fn first_difference(&self, other: &LinearOperator) -> Option<(usize, Vector)> {
        self.cols
            .iter()
            .zip(&other.cols)
            .enumerate()
            .find(|(_, (a, b))| a != b)
            .map(|(j, (a, b))| (j, a.sub(b)))
    }

    /// Largest absolute coefficient of `self − other`.
    pub fn max_difference(&self, other: &LinearOperator) -> Scalar {
        self.cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| a.sub(b).max_abs())
            .max()
            .unwrap_or_default()
    }

    pub fn transpose(&self) -> LinearOperator {
        let mut cols = vec![Vector::new(); self.cod.len()];
        for (j, c) in self.cols.iter().enumerate() {
            for (i, x) in c.iter() {
                cols[i].add_term(j, x);
            }
        }
        LinearOperator {
            dom: self.cod.clone(),
            cod: self.dom.clone(),
            shift: -self.shift,
            cols,
        }
    }

    pub fn kernel(&self) -> Vec<Vector> {
        let mut e = Echelon::new();
        let mut ker = Vec::new();
        for (j, c) in self.cols.iter().enumerate() {
            if let Some(tag) = e.insert(c.clone(), Vector::unit(j)) {
                ker.push(tag);
            }
        }
        ker
    }

    pub fn rank(&self) -> usize {
        let mut e = Echelon::new();
        for c in &self.cols {
            e.insert(c.clone(), Vector::new());
        }
        e.rank()
    }

    /// Inverse of a square invertible operator.
    pub fn inverse(&self) -> Result<LinearOperator> {
        if self.dom.len() != self.cod.len() {
            return Err(Error::NotInvertible);
        }
        let mut e = Echelon::new();
        for (j, c) in self.cols.iter().enumerate() {
            if e.insert(c.clone(), Vector::unit(j)).is_some() {
                return Err(Error::NotInvertible);
            }
        }
        let mut cols = Vec::with_capacity(self.cod.len());
        for i in 0..self.cod.len() {
            let (res, tag) = e.reduce(Vector::unit(i), Vector::new());
            debug_assert!(res.is_zero());
            cols.push(tag.scale(&-Scalar::one()));
        }
        LinearOperator::new(self.cod.clone(), self.dom.clone(), -self.shift, cols)
    }
}

/// Incrementally built row-echelon basis. Each stored vector carries a tag
/// that is transformed alongside it, so combinations can be tracked.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, (Vector, Vector)>,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce against the stored rows; returns the residual and updated tag.
    pub fn reduce(&self, mut v: Vector, mut tag: Vector) -> (Vector, Vector) {
        let mut from = 0usize;
        loop {
            let hit = v
                .0
                .range(from..)
                .find(|(k, _)| self.rows.contains_key(k))
                .map(|(k, c)| (*k, c.clone()));
            let Some((k, c)) = hit else { break };
            let (row, rtag) = &self.rows[&k];
            let m = -c;
            v.add_scaled(row, &m);
            tag.add_scaled(rtag, &m);
            from = k + 1;
        }
        (v, tag)
    }

    /// Insert `v`; returns `None` if it was independent, otherwise the tag of
    /// the vanishing combination.
    pub fn insert(&mut self, v: Vector, tag: Vector) -> Option<Vector> {
        let (v, tag) = self.reduce(v, tag);
        match v.first() {
            None => Some(tag),
            Some((p, c)) => {
                let inv = c.recip();
                let (v, tag) = (v.scale(&inv), tag.scale(&inv));
                self.rows.insert(p, (v, tag));
                None
            }
        }
    }

    pub fn contains(&self, v: &Vector) -> bool {
        self.reduce(v.clone(), Vector::new()).0.is_zero()
    }
}

/// Cohomology of one degree: representatives and a classifier for cocycles.
#[derive(Clone, Debug)]
pub struct CohomologyDegree {
    pub representatives: Vec<Vector>,
    echelon: Echelon,
}

impl CohomologyDegree {
    /// Coordinates of the class of a cocycle in the representative basis.
    /// Returns `None` if `z` is not a cocycle of this degree.
    pub fn classify(&self, z: &Vector) -> Option<Vec<Scalar>> {
        let (res, tag) = self.echelon.reduce(z.clone(), Vector::new());
        if !res.is_zero() {
            return None;
        }
        Some((0..self.representatives.len()).map(|r| -tag.get(r)).collect())
    }

    pub fn rank(&self) -> usize {
        self.representatives.len()
    }
}

#[derive(Clone, Debug)]
pub struct Cohomology {
    pub degrees: BTreeMap<i32, CohomologyDegree>,
}

/// Cohomology of `d` (degree +1 endomorphism) on the given degree window,
/// or on every occurring degree when `window` is `None`.
pub fn complex_cohomology(d: &LinearOperator, window: Option<(i32, i32)>) -> Result<Cohomology> {
    if d.shift() != 1 || !same_degrees(d.dom(), d.cod()) {
        return Err(Error::InvalidInput("differential must be a degree +1 endomorphism".into()));
    }
    let dd = d.compose(d)?;
    if let Some((j, _)) = dd.cols().iter().enumerate().find(|(_, c)| !c.is_zero()) {
        return Err(Error::NotAComplex { witness: format!("basis vector {j}") });
    }
    let degs = d.dom().clone();
    let (lo, hi) = match window {
        Some(w) => w,
        None => (
            degs.iter().copied().min().unwrap_or(0),
            degs.iter().copied().max().unwrap_or(0),
        ),
    };
    let mut out = BTreeMap::new();
    for deg in lo..=hi {
        let mut echelon = Echelon::new();
        for (j, c) in d.cols().iter().enumerate() {
            if degs[j] == deg - 1 {
                echelon.insert(c.clone(), Vector::new());
            }
        }
        let mut kernel = Echelon::new();
        let mut cocycles = Vec::new();
        for (j, c) in d.cols().iter().enumerate() {
            if degs[j] == deg {
                if let Some(z) = kernel.insert(c.clone(), Vector::unit(j)) {
                    cocycles.push(z);
                }
            }
        }
        let mut reps = Vec::new();
        for z in cocycles {
            let r = reps.len();
            if echelon.insert(z.clone(), Vector::unit(r)).is_none() {
                reps.push(z);
            }
        }
        out.insert(deg, CohomologyDegree { representatives: reps, echelon });
    }
    Ok(Cohomology { degrees: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn degs(v: &[i32]) -> Arc<Vec<i32>> {
        Arc::new(v.to_vec())
    }

    fn q(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn koszul_examples() {
        assert_eq!(koszul_sign(&[1, 1], &[1, 0]).unwrap(), q(-1));
        assert_eq!(koszul_sign(&[0, 1], &[1, 0]).unwrap(), q(1));
        assert_eq!(koszul_sign(&[1, 1, 1], &[2, 0, 1]).unwrap(), q(1));
        assert!(koszul_sign(&[1, 1], &[0, 0]).is_err());
    }

    #[test]
    fn compose_identity_and_zero() {
        let s = degs(&[0, 0, 1]);
        let f = LinearOperator::new(
            s.clone(),
            s.clone(),
            0,
            vec![Vector::from_terms([(1, q(2))]), Vector::unit(0), Vector::unit(2)],
        )
        .unwrap();
        assert_eq!(LinearOperator::identity(&s).compose(&f).unwrap(), f);
        assert!(f.compose(&LinearOperator::zero(&s, &s, 0)).unwrap().is_zero());
    }

    #[test]
    fn degree_shift_is_enforced() {
        let s = degs(&[0, 1]);
        assert!(LinearOperator::new(s.clone(), s.clone(), 0, vec![Vector::unit(1), Vector::new()]).is_err());
        assert!(LinearOperator::new(s.clone(), s, 1, vec![Vector::unit(1), Vector::new()]).is_ok());
    }

    #[test]
    fn cohomology_small_cases() {
        let s = degs(&[0, 0]);
        let zero = LinearOperator::zero(&degs(&[0, 1]), &degs(&[0, 1]), 1);
        let h = complex_cohomology(&zero, None).unwrap();
        assert_eq!(h.degrees[&0].rank() + h.degrees[&1].rank(), 2);
        let _ = s;
        let t = degs(&[0, 1]);
        let d = LinearOperator::new(t.clone(), t, 1, vec![Vector::unit(1), Vector::new()]).unwrap();
        let h = complex_cohomology(&d, None).unwrap();
        assert_eq!(h.degrees[&0].rank(), 0);
        assert_eq!(h.degrees[&1].rank(), 0);
    }

    #[test]
    fn not_a_complex_is_reported() {
        let t = degs(&[0, 0]);
        let d = LinearOperator {
            dom: t.clone(),
            cod: t,
            shift: 1,
            cols: vec![Vector::unit(1), Vector::unit(0)],
        };
        assert!(complex_cohomology(&d, None).is_err());
    }

    #[test]
    fn classify_adds_boundaries() {
        // d x = y on span{x, y, z}, y and z in degree 1.
        let t = degs(&[0, 1, 1]);
        let d = LinearOperator::new(t.clone(), t, 1, vec![Vector::unit(1), Vector::new(), Vector::new()])
            .unwrap();
        let h = complex_cohomology(&d, None).unwrap();
        let h1 = &h.degrees[&1];
        assert_eq!(h1.rank(), 1);
        let z = Vector::from_terms([(1, q(5)), (2, q(3))]);
        assert_eq!(h1.classify(&z).unwrap(), vec![q(3)]);
    }

    fn small_op() -> impl Strategy<Value = LinearOperator> {
        proptest::collection::vec(proptest::collection::vec(-3i64..4, 3), 3).prop_map(|m| {
            let s = Arc::new(vec![0, 0, 0]);
            let cols = m
                .into_iter()
                .map(|c| c.into_iter().enumerate().map(|(i, x)| (i, q(x))).collect())
                .collect();
            LinearOperator::new(s.clone(), s, 0, cols).unwrap()
        })
    }

    proptest! {
        #[test]
        fn operator_algebra(a in small_op(), b in small_op(), c in small_op()) {
            let ab_c = a.compose(&b).unwrap().compose(&c).unwrap();
            let a_bc = a.compose(&b.compose(&c).unwrap()).unwrap();
            prop_assert_eq!(ab_c, a_bc);
            let lhs = a.compose(&b.add(&c).unwrap()).unwrap();
            let rhs = a.compose(&b).unwrap().add(&a.compose(&c).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn rank_nullity(a in small_op()) {
            prop_assert_eq!(a.rank() + a.kernel().len(), 3);
            for k in a.kernel() {
                prop_assert!(a.apply(&k).is_zero());
            }
        }

        #[test]
        fn inverse_when_invertible(a in small_op()) {
            if a.rank() == 3 {
                let inv = a.inverse().unwrap();
                prop_assert_eq!(a.compose(&inv).unwrap(), LinearOperator::identity(a.dom()));
            } else {
                prop_assert!(a.inverse().is_err());
            }
        }

        #[test]
        fn koszul_multiplicative(d in proptest::collection::vec(0i32..2, 4),
                                 p in Just(vec![0usize,1,2,3]).prop_shuffle(),
                                 r in Just(vec![0usize,1,2,3]).prop_shuffle()) {
            // Apply p, then r to the permuted list.
            let dp: Vec<i32> = p.iter().map(|&i| d[i]).collect();
            let composed: Vec<usize> = r.iter().map(|&i| p[i]).collect();
            let lhs = koszul_sign(&d, &composed).unwrap();
            let rhs = koszul_sign(&d, &p).unwrap() * koszul_sign(&dp, &r).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
