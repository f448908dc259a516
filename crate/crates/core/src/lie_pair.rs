//! Lie pairs over a point: structure constants, validation, Bott action,
//! the Δ operator and the connections built from an auxiliary connection.
//!
//! Basis convention: `x_0 … x_{m-1}` span 𝔥 (written `e_k`), the remaining
//! vectors `x_m … x_{n-1}` span the complement `j(B)` (written `b_l`).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graded::{LinearOperator, Vector};
use crate::scalar::Scalar;

/// Dense coordinate vector.
pub type Coords = Vec<Scalar>;

pub fn zeros(n: usize) -> Coords {
    vec![Scalar::zero(); n]
}

pub fn unit(n: usize, i: usize) -> Coords {
    let mut v = zeros(n);
    v[i] = Scalar::one();
    v
}

fn axpy(y: &mut [Scalar], a: &Scalar, x: &[Scalar]) {
    if a.is_zero() {
        return;
    }
    for (yi, xi) in y.iter_mut().zip(x) {
        if !xi.is_zero() {
            *yi += a * xi;
        }
    }
}

/// A Lie algebra 𝔤 with distinguished subalgebra 𝔥 and complement.
#[derive(Clone, Debug, PartialEq)]
pub struct LiePair {
    dim_g: usize,
    dim_h: usize,
    c: Bilinear,
}

/// Bilinear map `𝔤 ⊗ 𝔤 → 𝔤`, stored like structure constants.
#[derive(Clone, Debug, PartialEq)]
pub struct Bilinear {
    n: usize,
    t: Vec<Scalar>,
}

impl Bilinear {
    pub fn zero(n: usize) -> Self {
        Bilinear { n, t: vec![Scalar::zero(); n * n * n] }
    }

    /// From entries `(x, y, z, coeff)`: the `z` coefficient of `∇_{x} y`.
    pub fn from_entries(n: usize, entries: &[(usize, usize, usize, Scalar)]) -> Result<Self> {
        let mut b = Bilinear::zero(n);
        for (x, y, z, c) in entries {
            if *x >= n || *y >= n || *z >= n {
                return Err(Error::InvalidInput(format!("index out of range in ({x}, {y}, {z})")));
            }
            b.t[(x * n + y) * n + z] += c;
        }
        Ok(b)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, x: usize, y: usize, z: usize) -> &Scalar {
        &self.t[(x * self.n + y) * self.n + z]
    }

    pub fn apply(&self, x: &[Scalar], y: &[Scalar]) -> Coords {
        let n = self.n;
        let mut out = zeros(n);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let c = xi * yj;
                axpy(&mut out, &c, &self.t[(i * n + j) * n..(i * n + j + 1) * n]);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.t.iter().all(Scalar::is_zero)
    }

    /// Express in the basis `x'_a = Σ_i t[a][i] x_i`.
    fn transform(&self, t: &[Coords], t_inv: &[Coords]) -> Bilinear {
        let n = self.n;
        let mut out = Bilinear::zero(n);
        for a in 0..n {
            for b in 0..n {
                let v = self.apply(&t[a], &t[b]);
                let mut w = zeros(n);
                for (k, vk) in v.iter().enumerate() {
                    axpy(&mut w, vk, &t_inv[k]);
                }
                for (z, wz) in w.into_iter().enumerate() {
                    out.t[(a * n + b) * n + z] = wz;
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    /// `(i, j, k)` with `c^k_{ij} ≠ −c^k_{ji}`.
    pub antisymmetry: Vec<(usize, usize, usize)>,
    /// `(i, j, l, k)`: the `x_k` coefficient of the Jacobiator of `x_i, x_j, x_l` is nonzero.
    pub jacobi: Vec<(usize, usize, usize, usize)>,
    /// `(i, j, k)` with `i, j < dim_h ≤ k` and `c^k_{ij} ≠ 0`.
    pub closure: Vec<(usize, usize, usize)>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.antisymmetry.is_empty() && self.jacobi.is_empty() && self.closure.is_empty()
    }
}

impl LiePair {
    /// From bracket entries `(i, j, k, coeff)` meaning `[x_i, x_j] ∋ coeff·x_k`.
    /// Entries are taken literally; antisymmetric partners are not implied.
    pub fn new(dim_g: usize, dim_h: usize, brackets: &[(usize, usize, usize, Scalar)]) -> Result<Self> {
        if dim_h > dim_g {
            return Err(Error::InvalidInput(format!("dim_h = {dim_h} exceeds dim_g = {dim_g}")));
        }
        let b = Bilinear::from_entries(dim_g, brackets)?;
        Ok(LiePair { dim_g, dim_h, c: b })
    }

    /// Like [`LiePair::new`] but each entry also sets the antisymmetric partner.
    pub fn from_antisymmetric(
        dim_g: usize,
        dim_h: usize,
        brackets: &[(usize, usize, usize, Scalar)],
    ) -> Result<Self> {
        let mut all = Vec::with_capacity(2 * brackets.len());
        for (i, j, k, c) in brackets {
            all.push((*i, *j, *k, c.clone()));
            all.push((*j, *i, *k, -c));
        }
        LiePair::new(dim_g, dim_h, &all)
    }

    pub fn dim_g(&self) -> usize {
        self.dim_g
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn dim_b(&self) -> usize {
        self.dim_g - self.dim_h
    }

    /// Coefficient `c^k_{ij}`.
    pub fn c(&self, i: usize, j: usize, k: usize) -> &Scalar {
        self.c.get(i, j, k)
    }

    /// Coefficients of `[x_i, x_j]`.
    pub fn bracket_basis(&self, i: usize, j: usize) -> &[Scalar] {
        let n = self.dim_g;
        &self.c.t[(i * n + j) * n..(i * n + j + 1) * n]
    }

    pub fn bracket(&self, x: &[Scalar], y: &[Scalar]) -> Coords {
        self.c.apply(x, y)
    }

    pub fn is_abelian(&self) -> bool {
        self.c.is_zero()
    }

    /// Nonzero entries `(i, j, k, c)` in index order.
    pub fn entries(&self) -> Vec<(usize, usize, usize, Scalar)> {
        let n = self.dim_g;
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let c = self.c(i, j, k);
                    if !c.is_zero() {
                        out.push((i, j, k, c.clone()));
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self) -> ValidationReport {
        let n = self.dim_g;
        let m = self.dim_h;
        let mut rep = ValidationReport::default();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.c(i, j, k) != &-self.c(j, i, k) {
                        rep.antisymmetry.push((i, j, k));
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let (xi, xj, xl) = (unit(n, i), unit(n, j), unit(n, l));
                    let mut jac = self.bracket(&xi, &self.bracket(&xj, &xl));
                    let t2 = self.bracket(&xj, &self.bracket(&xl, &xi));
                    let t3 = self.bracket(&xl, &self.bracket(&xi, &xj));
                    axpy(&mut jac, &Scalar::one(), &t2);
                    axpy(&mut jac, &Scalar::one(), &t3);
                    for (k, v) in jac.iter().enumerate() {
                        if !v.is_zero() {
                            rep.jacobi.push((i, j, l, k));
                        }
                    }
                }
            }
        }
        for i in 0..m {
            for j in 0..m {
                for k in m..n {
                    if !self.c(i, j, k).is_zero() {
                        rep.closure.push((i, j, k));
                    }
                }
            }
        }
        rep
    }

    pub fn p(&self, v: &[Scalar]) -> Coords {
        v[..self.dim_h].to_vec()
    }

    pub fn q(&self, v: &[Scalar]) -> Coords {
        v[self.dim_h..].to_vec()
    }

    pub fn i(&self, a: &[Scalar]) -> Coords {
        let mut v = a.to_vec();
        v.resize(self.dim_g, Scalar::zero());
        v
    }

    pub fn j(&self, b: &[Scalar]) -> Coords {
        let mut v = zeros(self.dim_h);
        v.extend_from_slice(b);
        v
    }

    /// `q([i a, j b])`.
    pub fn bott(&self, a: &[Scalar], b: &[Scalar]) -> Coords {
        self.q(&self.bracket(&self.i(a), &self.j(b)))
    }

    /// `Δ_b a = p([j b, i a])`.
    pub fn delta(&self, b: &[Scalar], a: &[Scalar]) -> Coords {
        self.p(&self.bracket(&self.j(b), &self.i(a)))
    }

    /// Re-express the pair in the basis `x'_a = Σ_i t[a][i] x_i`. The first
    /// `dim_h` new vectors must span 𝔥, so only the complement changes.
    pub fn change_basis(&self, t: &[Coords]) -> Result<(LiePair, Vec<Coords>)> {
        let n = self.dim_g;
        let m = self.dim_h;
        if t.len() != n || t.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput(format!("splitting matrix must be {n}×{n}")));
        }
        for (a, row) in t.iter().enumerate().take(m) {
            if row[m..].iter().any(|x| !x.is_zero()) {
                return Err(Error::InvalidInput(format!(
                    "splitting matrix row {a} leaves the subalgebra"
                )));
            }
        }
        let t_inv = invert_dense(t)?;
        let c = self.c.transform(t, &t_inv);
        Ok((LiePair { dim_g: n, dim_h: m, c }, t_inv))
    }
}

/// Inverse of a square matrix given by rows; `M^{-1}` also by rows.
pub fn invert_dense(rows: &[Coords]) -> Result<Vec<Coords>> {
    let n = rows.len();
    let degs = std::sync::Arc::new(vec![0; n]);
    // Column j of the operator is row j of the input, so the operator is M^T.
    let cols = rows
        .iter()
        .map(|r| r.iter().enumerate().map(|(i, x)| (i, x.clone())).collect::<Vector>())
        .collect();
    let op = LinearOperator::new(degs.clone(), degs, 0, cols)?;
    let inv = op.inverse()?;
    Ok((0..n).map(|j| (0..n).map(|i| inv.col(j).get(i)).collect()).collect())
}

/// The four connections of the construction, all over a point.
///
/// Indices: `l[(x * n + y) * n + z]` is the `x_z` coefficient of `∇^L_{x_x} x_y`;
/// `a[(x * m + a) * m + b]` the `e_b` coefficient of `∇^A_{x_x} e_a`;
/// `b` likewise on `B`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionSet {
    pub aux: Bilinear,
    n: usize,
    m: usize,
    l: Bilinear,
    a: Vec<Scalar>,
    b: Vec<Scalar>,
}

impl ConnectionSet {
    pub fn build(pair: &LiePair, aux: &Bilinear) -> Result<Self> {
        let n = pair.dim_g();
        let m = pair.dim_h();
        let k = n - m;
        if aux.dim() != n {
            return Err(Error::InvalidInput("aux connection dimension mismatch".into()));
        }
        let mut l = Vec::with_capacity(n * n * n);
        let mut a = Vec::with_capacity(n * m * m);
        let mut b = Vec::with_capacity(n * k * k);
        for x in 0..n {
            let xv = unit(n, x);
            let ipx = pair.i(&pair.p(&xv));
            let jqx = pair.j(&pair.q(&xv));
            for y in 0..n {
                let yv = unit(n, y);
                let ipy = pair.i(&pair.p(&yv));
                let jqy = pair.j(&pair.q(&yv));
                let mut t1 = aux.apply(&ipx, &ipy);
                axpy(&mut t1, &Scalar::one(), &pair.bracket(&jqx, &ipy));
                let mut t2 = aux.apply(&jqx, &jqy);
                axpy(&mut t2, &Scalar::one(), &pair.bracket(&ipx, &jqy));
                let mut v = pair.i(&pair.p(&t1));
                axpy(&mut v, &Scalar::one(), &pair.j(&pair.q(&t2)));
                l.extend(v);
            }
            for e in 0..m {
                let ia = pair.i(&unit(m, e));
                let mut t = aux.apply(&ipx, &ia);
                axpy(&mut t, &Scalar::one(), &pair.bracket(&jqx, &ia));
                a.extend(pair.p(&t));
            }
            for c in 0..k {
                let jb = pair.j(&unit(k, c));
                let mut t = aux.apply(&jqx, &jb);
                axpy(&mut t, &Scalar::one(), &pair.bracket(&ipx, &jb));
                b.extend(pair.q(&t));
            }
        }
        Ok(ConnectionSet { aux: aux.clone(), n, m, l: Bilinear { n, t: l }, a, b })
    }

    /// `∇^L_X Y`.
    pub fn nabla_l(&self, x: &[Scalar], y: &[Scalar]) -> Coords {
        self.l.apply(x, y)
    }

    /// `x_z` coefficient of `∇^L_{x_x} x_y`.
    pub fn l_coeff(&self, x: usize, y: usize, z: usize) -> &Scalar {
        self.l.get(x, y, z)
    }

    /// `e_b` coefficient of `∇^A_{x_x} e_a`.
    pub fn a_coeff(&self, x: usize, a: usize, b: usize) -> &Scalar {
        &self.a[(x * self.m + a) * self.m + b]
    }

    /// `b_d` coefficient of `∇^B_{x_x} b_c`.
    pub fn b_coeff(&self, x: usize, c: usize, d: usize) -> &Scalar {
        let k = self.n - self.m;
        &self.b[(x * k + c) * k + d]
    }

    pub fn nabla_a(&self, x: &[Scalar], a: &[Scalar]) -> Coords {
        let m = self.m;
        let mut out = zeros(m);
        for (xi, xc) in x.iter().enumerate() {
            for (ai, ac) in a.iter().enumerate() {
                if xc.is_zero() || ac.is_zero() {
                    continue;
                }
                let c = xc * ac;
                for (bi, o) in out.iter_mut().enumerate() {
                    let t = self.a_coeff(xi, ai, bi);
                    if !t.is_zero() {
                        *o += &c * t;
                    }
                }
            }
        }
        out
    }

    pub fn nabla_b(&self, x: &[Scalar], b: &[Scalar]) -> Coords {
        let k = self.n - self.m;
        let mut out = zeros(k);
        for (xi, xc) in x.iter().enumerate() {
            for (ci, cc) in b.iter().enumerate() {
                if xc.is_zero() || cc.is_zero() {
                    continue;
                }
                let c = xc * cc;
                for (di, o) in out.iter_mut().enumerate() {
                    let t = self.b_coeff(xi, ci, di);
                    if !t.is_zero() {
                        *o += &c * t;
                    }
                }
            }
        }
        out
    }
}

/// The four defining identities of the connection family, checked on basis
/// vectors. Returns the names of the identities that fail.
pub fn check_connection_identities(pair: &LiePair, conn: &ConnectionSet) -> Vec<String> {
    let n = pair.dim_g();
    let m = pair.dim_h();
    let k = pair.dim_b();
    let mut bad = Vec::new();
    for x in 0..n {
        let xv = unit(n, x);
        for a in 0..m {
            let av = unit(m, a);
            if conn.nabla_l(&xv, &pair.i(&av)) != pair.i(&conn.nabla_a(&xv, &av)) {
                bad.push(format!("nabla_L i = i nabla_A at ({x}, {a})"));
            }
        }
        for b in 0..k {
            let bv = unit(k, b);
            if conn.nabla_l(&xv, &pair.j(&bv)) != pair.j(&conn.nabla_b(&xv, &bv)) {
                bad.push(format!("nabla_L j = j nabla_B at ({x}, {b})"));
            }
        }
    }
    for b in 0..k {
        let bv = unit(k, b);
        for a in 0..m {
            let av = unit(m, a);
            if conn.nabla_a(&pair.j(&bv), &av) != pair.delta(&bv, &av) {
                bad.push(format!("nabla_A on j(b) = Delta at ({b}, {a})"));
            }
            if conn.nabla_b(&pair.i(&av), &bv) != pair.bott(&av, &bv) {
                bad.push(format!("nabla_B on i(a) = Bott at ({a}, {b})"));
            }
        }
    }
    bad
}
