//! Sections of the pullback algebroid over Λ𝔥^∨, the homological section,
//! the differential `Q` and the contraction `(P₀, I₀, H₀)`.
//!
//! A section is stored in raw form `(X, ν)`: a derivation of Λ𝔥^∨ and an
//! element of Λ𝔥^∨ ⊗ 𝔤. The frame form expands it over the generators
//! `σ_l < α_k < τ_k`, where `σ_l = (∇^A_{b_l}, b_l)`, `α_k = (∇^A_{e_k}, e_k)`
//! and `τ_k = (ι_{e_k}, 0)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::ce::{CeComplex, CeElement, CeLabel, Coeffs};
use crate::error::{Error, Result};
use crate::exterior::{mask_degree, Derivation, Ext, ExtAlgebra, Mask};
use crate::graded::{GradedSpace, LinearOperator, Vector};
use crate::lie_pair::{unit, ConnectionSet, LiePair};
use crate::scalar::Scalar;

/// Generator kinds of the frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gen {
    Sigma(usize),
    Alpha(usize),
    Tau(usize),
}

impl Gen {
    pub fn degree(&self) -> i32 {
        match self {
            Gen::Tau(_) => -1,
            _ => 0,
        }
    }

    pub fn is_odd(&self) -> bool {
        matches!(self, Gen::Tau(_))
    }
}

/// Raw characterizing pair `(X, ν)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Section {
    pub x: Derivation,
    pub nu: Vec<Ext>,
}

impl Section {
    pub fn zero(m: usize, n: usize) -> Self {
        Section { x: Derivation::zero(m), nu: vec![Ext::zero(); n] }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.nu.iter().all(Ext::is_zero)
    }

    pub fn add(&self, o: &Section) -> Section {
        Section { x: self.x.add(&o.x), nu: self.nu.iter().zip(&o.nu).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, o: &Section) -> Section {
        self.add(&o.scale(&-Scalar::one()))
    }

    pub fn scale(&self, c: &Scalar) -> Section {
        Section { x: self.x.scale(c), nu: self.nu.iter().map(|a| a.scale(c)).collect() }
    }

    /// `f · (X, ν) = (f X, f ν)`.
    pub fn left_mul(&self, f: &Ext) -> Section {
        Section { x: self.x.left_mul(f), nu: self.nu.iter().map(|a| f.wedge(a)).collect() }
    }

    /// Homogeneous components; in degree `d` the values `X(ξ^k)` have degree
    /// `d + 1` and the entries of `ν` degree `d`.
    pub fn components(&self) -> BTreeMap<i32, Section> {
        let m = self.x.values.len();
        let n = self.nu.len();
        let mut out: BTreeMap<i32, Section> = BTreeMap::new();
        for (d, xd) in self.x.components() {
            out.entry(d).or_insert_with(|| Section::zero(m, n)).x = xd;
        }
        for (i, e) in self.nu.iter().enumerate() {
            for (d, c) in e.components() {
                out.entry(d).or_insert_with(|| Section::zero(m, n)).nu[i] = c;
            }
        }
        out
    }

    /// The degree when homogeneous and nonzero.
    pub fn degree(&self) -> Option<i32> {
        let c = self.components();
        if c.len() == 1 {
            c.keys().next().copied()
        } else {
            None
        }
    }

    /// Entry-wise description `(X(ξ^k))_k, (ν_i)_i` used for witnesses.
    pub fn describe(&self) -> String {
        format!("X = {:?}, nu = {:?}", self.x.values, self.nu)
    }
}

/// Bracket of characterizing pairs over the given pair, expanded over
/// homogeneous components.
pub fn bracket(pair: &LiePair, s: &Section, t: &Section) -> Section {
    let m = s.x.values.len();
    let n = s.nu.len();
    let mut out = Section::zero(m, n);
    let sc = s.components();
    let tc = t.components();
    for (&p, a) in &sc {
        for (&q, b) in &tc {
            let mut nu = vec![Ext::zero(); n];
            let sign = Scalar::sign((p * q) as i64);
            for i in 0..n {
                nu[i] = a.x.apply(&b.nu[i]);
                nu[i].add_scaled(&b.x.apply(&a.nu[i]), &-sign.clone());
            }
            for i in 0..n {
                if a.nu[i].is_zero() {
                    continue;
                }
                for j in 0..n {
                    if b.nu[j].is_zero() {
                        continue;
                    }
                    let br = pair.bracket_basis(i, j);
                    if br.iter().all(Scalar::is_zero) {
                        continue;
                    }
                    let w = a.nu[i].wedge(&b.nu[j]);
                    for (z, c) in br.iter().enumerate() {
                        if !c.is_zero() {
                            nu[z].add_scaled(&w, c);
                        }
                    }
                }
            }
            let piece = Section { x: a.x.commutator(&b.x), nu };
            out = out.add(&piece);
        }
    }
    out
}

/// `s_φ = (d_A, Σ_k ξ^k ⊗ φ(e_k))`; `phi[k]` holds the coordinates of `φ(e_k)`.
pub fn build_s_phi(pair: &LiePair, phi: &[Vec<Scalar>]) -> Result<Section> {
    let m = pair.dim_h();
    let n = pair.dim_g();
    if phi.len() != m || phi.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput(format!("phi must be {m}×{n}")));
    }
    let ext = ExtAlgebra::new(pair);
    let mut s = Section { x: ext.d_derivation().clone(), nu: vec![Ext::zero(); n] };
    for (k, row) in phi.iter().enumerate() {
        for (i, c) in row.iter().enumerate() {
            s.nu[i].add_scaled(&Ext::gen(k), c);
        }
    }
    Ok(s)
}

/// `[s, s]` and whether it vanishes.
pub fn is_square_zero(pair: &LiePair, s: &Section) -> (bool, Section) {
    let sq = bracket(pair, s, s);
    (sq.is_zero(), sq)
}

/// Coefficients of a section over the frame generators, indexed in generator
/// order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FrameElement {
    pub coeffs: Vec<Ext>,
}

impl FrameElement {
    pub fn zero(g: usize) -> Self {
        FrameElement { coeffs: vec![Ext::zero(); g] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Ext::is_zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Ext)> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, e)| !e.is_zero())
    }
}

/// The pair together with its connections and the generator frame.
#[derive(Clone, Debug)]
pub struct Frame {
    pair: Arc<LiePair>,
    conn: Arc<ConnectionSet>,
    ext: ExtAlgebra,
    nabla: Vec<Derivation>,
    gens: Vec<Section>,
    s_i: Section,
}

impl Frame {
    pub fn new(pair: Arc<LiePair>, conn: Arc<ConnectionSet>) -> Self {
        let n = pair.dim_g();
        let m = pair.dim_h();
        let ext = ExtAlgebra::new(&pair);
        let nabla: Vec<Derivation> = (0..n)
            .map(|v| {
                let mut d = Derivation::zero(m);
                for k in 0..m {
                    let mut val = Ext::zero();
                    for j in 0..m {
                        let c = conn.a_coeff(v, j, k);
                        if !c.is_zero() {
                            val.add_scaled(&Ext::gen(j), &-c.clone());
                        }
                    }
                    d.values[k] = val;
                }
                d
            })
            .collect();
        let mut s_i = Section { x: ext.d_derivation().clone(), nu: vec![Ext::zero(); n] };
        for k in 0..m {
            s_i.nu[k] = Ext::gen(k);
        }
        let mut frame = Frame { pair, conn, ext, nabla, gens: Vec::new(), s_i };
        frame.gens = (0..n + m).map(|g| frame.raw_gen(frame.gen(g))).collect();
        frame
    }

    pub fn pair(&self) -> &Arc<LiePair> {
        &self.pair
    }

    pub fn conn(&self) -> &Arc<ConnectionSet> {
        &self.conn
    }

    pub fn ext(&self) -> &ExtAlgebra {
        &self.ext
    }

    pub fn dim_h(&self) -> usize {
        self.pair.dim_h()
    }

    pub fn dim_b(&self) -> usize {
        self.pair.dim_b()
    }

    pub fn num_gens(&self) -> usize {
        self.pair.dim_g() + self.pair.dim_h()
    }

    pub fn gen(&self, g: usize) -> Gen {
        let k = self.dim_b();
        let m = self.dim_h();
        if g < k {
            Gen::Sigma(g)
        } else if g < k + m {
            Gen::Alpha(g - k)
        } else {
            Gen::Tau(g - k - m)
        }
    }

    pub fn index(&self, g: Gen) -> usize {
        let k = self.dim_b();
        let m = self.dim_h();
        match g {
            Gen::Sigma(l) => l,
            Gen::Alpha(a) => k + a,
            Gen::Tau(a) => k + m + a,
        }
    }

    pub fn gen_degree(&self, g: usize) -> i32 {
        self.gen(g).degree()
    }

    /// Generator index of `φ_v` for a basis vector `x_v` of 𝔤.
    pub fn phi_index(&self, v: usize) -> usize {
        let m = self.dim_h();
        if v >= m {
            v - m
        } else {
            self.dim_b() + v
        }
    }

    /// The 𝔤-basis vector a `σ`/`α` generator is π-related to.
    pub fn related_vector(&self, g: usize) -> Option<usize> {
        match self.gen(g) {
            Gen::Sigma(l) => Some(self.dim_h() + l),
            Gen::Alpha(a) => Some(a),
            Gen::Tau(_) => None,
        }
    }

    /// `∇^A_{x_v}` acting on Λ𝔥^∨.
    pub fn nabla_a(&self, v: usize) -> &Derivation {
        &self.nabla[v]
    }

    fn raw_gen(&self, g: Gen) -> Section {
        let n = self.pair.dim_g();
        let m = self.dim_h();
        match g {
            Gen::Sigma(_) | Gen::Alpha(_) => {
                let v = match g {
                    Gen::Sigma(l) => m + l,
                    Gen::Alpha(a) => a,
                    _ => unreachable!(),
                };
                let mut nu = vec![Ext::zero(); n];
                nu[v] = Ext::one();
                Section { x: self.nabla[v].clone(), nu }
            }
            Gen::Tau(a) => Section { x: Derivation::interior(&unit(m, a)), nu: vec![Ext::zero(); n] },
        }
    }

    /// Raw form of a generator.
    pub fn generator(&self, g: usize) -> &Section {
        &self.gens[g]
    }

    /// The homological section `s_i = (d_A, Σ ξ^k ⊗ e_k)`.
    pub fn s_i(&self) -> &Section {
        &self.s_i
    }

    /// `(L_a, 1 ⊗ i(a))`.
    pub fn lie_section(&self, a: &[Scalar]) -> Section {
        let n = self.pair.dim_g();
        let mut nu = vec![Ext::zero(); n];
        for (k, c) in a.iter().enumerate() {
            nu[k] = Ext::scalar(c.clone());
        }
        Section { x: self.ext.lie_derivative_derivation(a), nu }
    }

    /// `(ι_a, 0)`.
    pub fn interior_section(&self, a: &[Scalar]) -> Section {
        Section { x: Derivation::interior(a), nu: vec![Ext::zero(); self.pair.dim_g()] }
    }

    /// `(Δ_b, 1 ⊗ j(b))` with `Δ_b` the restriction of the coadjoint action
    /// of `j(b)` to Λ𝔥^∨.
    pub fn delta_section(&self, b: &[Scalar]) -> Section {
        let n = self.pair.dim_g();
        let m = self.dim_h();
        let jb = self.pair.j(b);
        let mut x = Derivation::zero(m);
        for k in 0..m {
            let mut val = Ext::zero();
            for j in 0..m {
                let br = self.pair.bracket(&jb, &unit(n, j));
                let c = &self.pair.p(&br)[k];
                if !c.is_zero() {
                    val.add_scaled(&Ext::gen(j), &-c.clone());
                }
            }
            x.values[k] = val;
        }
        let nu = jb.iter().map(|c| Ext::scalar(c.clone())).collect();
        Section { x, nu }
    }

    pub fn to_raw(&self, f: &FrameElement) -> Section {
        let mut out = Section::zero(self.dim_h(), self.pair.dim_g());
        for (g, c) in f.terms() {
            out = out.add(&self.gens[g].left_mul(c));
        }
        out
    }

    /// Frame coordinates: `φ_v` carries `ν_v` and `τ_k` carries
    /// `X(ξ^k) − Σ_v ν_v ∧ ∇^A_{x_v}(ξ^k)`.
    pub fn from_raw(&self, s: &Section) -> FrameElement {
        let m = self.dim_h();
        let mut out = FrameElement::zero(self.num_gens());
        for k in 0..m {
            out.coeffs[self.index(Gen::Tau(k))] = s.x.values[k].clone();
        }
        for (v, nv) in s.nu.iter().enumerate() {
            if nv.is_zero() {
                continue;
            }
            out.coeffs[self.phi_index(v)] = nv.clone();
            for k in 0..m {
                let t = &self.nabla[v].values[k];
                if !t.is_zero() {
                    let idx = self.index(Gen::Tau(k));
                    out.coeffs[idx] = out.coeffs[idx].sub(&nv.wedge(t));
                }
            }
        }
        out
    }

    pub fn bracket(&self, s: &Section, t: &Section) -> Section {
        bracket(&self.pair, s, t)
    }

    /// `Q = [s_i, −]`.
    pub fn q(&self, s: &Section) -> Section {
        bracket(&self.pair, &self.s_i, s)
    }

    /// `P₀(X, ν) = (id ⊗ q) ν`.
    pub fn p0(&self, s: &Section) -> CeElement {
        let m = self.dim_h();
        let mut out = CeElement::zero(Coeffs::B);
        for l in 0..self.dim_b() {
            for (mask, c) in s.nu[m + l].terms() {
                out.add_term(mask, vec![l], c);
            }
        }
        out
    }

    /// `I₀(Σ β_l ⊗ b_l) = Σ β_l · σ_l`.
    pub fn i0(&self, beta: &CeElement) -> Section {
        let mut out = Section::zero(self.dim_h(), self.pair.dim_g());
        for ((mask, w), c) in beta.terms() {
            let f = Ext::monomial(*mask, c.clone());
            out = out.add(&self.gens[self.index(Gen::Sigma(w[0]))].left_mul(&f));
        }
        out
    }

    /// `H₀(X, ν) = (Σ_k (−1)^{|ν_k|} ν_k ι_{e_k}, 0)`.
    pub fn h0(&self, s: &Section) -> Section {
        let m = self.dim_h();
        let mut out = Section::zero(m, self.pair.dim_g());
        for k in 0..m {
            out.x.values[k] = s.nu[k].twist(1);
        }
        out
    }

    /// `(I₀P₀ s, H₀Q s, QH₀ s)`.
    pub fn split_section(&self, s: &Section) -> (Section, Section, Section) {
        (self.i0(&self.p0(s)), self.h0(&self.q(s)), self.q(&self.h0(s)))
    }

    /// `Σ_k ξ^k (L_{e_k}, i(e_k)) − (d_A ξ^k)(ι_{e_k}, 0)`.
    pub fn darwin(&self) -> Section {
        let m = self.dim_h();
        let mut out = Section::zero(m, self.pair.dim_g());
        for k in 0..m {
            let ek = unit(m, k);
            out = out.add(&self.lie_section(&ek).left_mul(&Ext::gen(k)));
            out = out.sub(&self.interior_section(&ek).left_mul(&self.ext.d(&Ext::gen(k))));
        }
        out
    }

    /// Basis `ξ^mask · g` of Γ over ℚ, generator-major.
    pub fn gamma_space(&self) -> GradedSpace<(Mask, usize)> {
        let mut basis = Vec::new();
        for g in 0..self.num_gens() {
            for &mask in self.ext.masks() {
                basis.push(((mask, g), mask_degree(mask) + self.gen_degree(g)));
            }
        }
        GradedSpace::new(basis).expect("distinct labels")
    }

    pub fn basis_section(&self, label: &(Mask, usize)) -> Section {
        self.gens[label.1].left_mul(&Ext::monomial(label.0, Scalar::one()))
    }

    pub fn to_vector(&self, space: &GradedSpace<(Mask, usize)>, s: &Section) -> Vector {
        let f = self.from_raw(s);
        let mut v = Vector::new();
        for (g, c) in f.terms() {
            for (mask, x) in c.terms() {
                v.add_term(space.index_of(&(mask, g)).expect("frame label"), x);
            }
        }
        v
    }
}

/// Matrices of `Q, P₀, I₀, H₀, d_A` on the finite bases.
#[derive(Clone, Debug)]
pub struct Contraction0 {
    pub gamma: GradedSpace<(Mask, usize)>,
    pub small: GradedSpace<CeLabel>,
    pub q: LinearOperator,
    pub d: LinearOperator,
    pub p: LinearOperator,
    pub i: LinearOperator,
    pub h: LinearOperator,
}

impl Contraction0 {
    pub fn build(frame: &Frame) -> Result<Self> {
        let gamma = frame.gamma_space();
        let ce = CeComplex::new(frame.pair().clone(), Coeffs::B);
        let small = ce.space();
        let labels = gamma.labels().to_vec();
        let cols: Vec<(Vector, Vector, Vector)> = labels
            .par_iter()
            .map(|l| {
                let s = frame.basis_section(l);
                let q = frame.to_vector(&gamma, &frame.q(&s));
                let h = frame.to_vector(&gamma, &frame.h0(&s));
                let p = ce.to_vector(&small, &frame.p0(&s)).expect("B label");
                (q, h, p)
            })
            .collect();
        let mut qc = Vec::new();
        let mut hc = Vec::new();
        let mut pc = Vec::new();
        for (q, h, p) in cols {
            qc.push(q);
            hc.push(h);
            pc.push(p);
        }
        let gd = gamma.degrees().clone();
        let sd = small.degrees().clone();
        let ic = small
            .labels()
            .iter()
            .map(|(mask, w)| {
                let beta = CeElement::term(Coeffs::B, *mask, w.clone(), Scalar::one());
                frame.to_vector(&gamma, &frame.i0(&beta))
            })
            .collect();
        Ok(Contraction0 {
            q: LinearOperator::new(gd.clone(), gd.clone(), 1, qc)?,
            h: LinearOperator::new(gd.clone(), gd.clone(), -1, hc)?,
            p: LinearOperator::new(gd.clone(), sd.clone(), 0, pc)?,
            i: LinearOperator::new(sd.clone(), gd, 0, ic)?,
            d: ce.matrix(&small)?,
            gamma,
            small,
        })
    }
}

/// Outcome of one identity check.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub witness: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, witness: Option<String>) -> Self {
        Check { name: name.into(), pass, witness }
    }

    pub fn equal<L: std::fmt::Debug + Clone + Eq + std::hash::Hash>(
        name: &str,
        lhs: &LinearOperator,
        rhs: &LinearOperator,
        dom: &GradedSpace<L>,
    ) -> Self {
        match lhs.first_difference(rhs) {
            None => Check::new(name, true, None),
            Some((j, diff)) => Check::new(
                name,
                false,
                Some(format!("basis element {:?}: difference {:?}", dom.label(j), diff)),
            ),
        }
    }
}

/// All identities of the contraction `(P₀, I₀, H₀)`.
pub fn verify_contraction0(frame: &Frame) -> Result<Vec<Check>> {
    let c = Contraction0::build(frame)?;
    let g = &c.gamma;
    let s = &c.small;
    let id_g = LinearOperator::identity(g.degrees());
    let id_s = LinearOperator::identity(s.degrees());
    let hq = c.h.compose(&c.q)?;
    let qh = c.q.compose(&c.h)?;
    Ok(vec![
        Check::equal("P0 I0 = id", &c.p.compose(&c.i)?, &id_s, s),
        Check::equal("H0 H0 = 0", &c.h.compose(&c.h)?, &LinearOperator::zero(g.degrees(), g.degrees(), -2), g),
        Check::equal("H0 Q H0 = H0", &c.h.compose(&qh)?, &c.h, g),
        Check::equal("H0 I0 = 0", &c.h.compose(&c.i)?, &LinearOperator::zero(s.degrees(), g.degrees(), -1), s),
        Check::equal("P0 H0 = 0", &c.p.compose(&c.h)?, &LinearOperator::zero(g.degrees(), s.degrees(), -1), g),
        Check::equal("id - I0 P0 = H0 Q + Q H0", &id_g.sub(&c.i.compose(&c.p)?)?, &hq.add(&qh)?, g),
        Check::equal("Q I0 = I0 d", &c.q.compose(&c.i)?, &c.i.compose(&c.d)?, s),
        Check::equal("P0 Q = d P0", &c.p.compose(&c.q)?, &c.d.compose(&c.p)?, g),
        Check::equal("Q Q = 0", &c.q.compose(&c.q)?, &LinearOperator::zero(g.degrees(), g.degrees(), 2), g),
    ])
}

fn eq_check(name: String, lhs: &Section, rhs: &Section) -> Check {
    if lhs == rhs {
        Check::new(name, true, None)
    } else {
        Check::new(name, false, Some(format!("lhs {} / rhs {}", lhs.describe(), rhs.describe())))
    }
}

fn ce_check(name: String, lhs: &CeElement, rhs: &CeElement) -> Check {
    if lhs == rhs {
        Check::new(name, true, None)
    } else {
        Check::new(name, false, Some(format!("lhs {lhs:?} / rhs {rhs:?}")))
    }
}

/// The relations between `P₀, I₀, H₀, Q` and the three section families,
/// checked for every basis `a ∈ 𝔥` and `b ∈ B`. `H₀(s_i)` is compared with
/// `Σ_k (ι_{e_k}, 0) · ξ^k`, the right action of `ξ^k`.
pub fn frame_relations(frame: &Frame) -> Result<Vec<Check>> {
    let m = frame.dim_h();
    let kb = frame.dim_b();
    let n = frame.pair().dim_g();
    let zero_s = Section::zero(m, n);
    let zero_b = CeElement::zero(Coeffs::B);
    let mut out = Vec::new();
    let si = frame.s_i().clone();
    for l in 0..kb {
        let b = unit(kb, l);
        let ds = frame.delta_section(&b);
        let one_b = CeElement::term(Coeffs::B, 0, vec![l], Scalar::one());
        out.push(ce_check(format!("P0(Delta_b{l}, j b{l}) = 1 ⊗ b{l}"), &frame.p0(&ds), &one_b));
        out.push(eq_check(format!("I0(1 ⊗ b{l}) = (Delta_b{l}, j b{l})"), &frame.i0(&one_b), &ds));
        out.push(eq_check(format!("H0(Delta_b{l}, j b{l}) = 0"), &frame.h0(&ds), &zero_s));
        let mut rhs = Section::zero(m, n);
        for k in 0..m {
            let bott = frame.pair().bott(&unit(m, k), &b);
            rhs = rhs.add(&frame.delta_section(&bott).left_mul(&Ext::gen(k)));
        }
        out.push(eq_check(format!("Q(Delta_b{l}, j b{l}) = Σ ξ^k (Delta_(e_k ▷ b{l}), ..)"), &frame.q(&ds), &rhs));
    }
    for a in 0..m {
        let av = unit(m, a);
        let ls = frame.lie_section(&av);
        let is = frame.interior_section(&av);
        out.push(ce_check(format!("P0(L_e{a}, i e{a}) = 0"), &frame.p0(&ls), &zero_b));
        out.push(ce_check(format!("P0(iota_e{a}, 0) = 0"), &frame.p0(&is), &zero_b));
        out.push(eq_check(format!("H0(L_e{a}, i e{a}) = (iota_e{a}, 0)"), &frame.h0(&ls), &is));
        out.push(eq_check(format!("H0(iota_e{a}, 0) = 0"), &frame.h0(&is), &zero_s));
        out.push(eq_check(format!("Q(L_e{a}, i e{a}) = 0"), &frame.q(&ls), &zero_s));
        out.push(eq_check(format!("Q(iota_e{a}, 0) = (L_e{a}, i e{a})"), &frame.q(&is), &ls));
    }
    out.push(ce_check("P0(s_i) = 0".into(), &frame.p0(&si), &zero_b));
    let mut right = Section::zero(m, n);
    for k in 0..m {
        // (ι_{e_k}, 0) · ξ^k = (−1)^{|ι||ξ|} ξ^k · (ι_{e_k}, 0)
        right = right.sub(&frame.interior_section(&unit(m, k)).left_mul(&Ext::gen(k)));
    }
    out.push(eq_check("H0(s_i) = Σ (iota_e_k, 0) · ξ^k".into(), &frame.h0(&si), &right));
    out.push(eq_check("Q(s_i) = 0".into(), &frame.q(&si), &zero_s));
    Ok(out)
}

/// Reconstruction of `s_i` from the frame sections.
pub fn darwin_check(frame: &Frame) -> Check {
    eq_check("s_i = Σ ξ^k (L_e_k, i e_k) − (d ξ^k)(iota_e_k, 0)".into(), frame.s_i(), &frame.darwin())
}

/// For fixed `β` the vertical part of `X` is determined by `H₀Q(X, ν_β) = 0`:
/// `H₀Q` restricted to `{f · τ_k}` is injective and kills `I₀β`.
pub fn nap_uniqueness(frame: &Frame) -> Result<Check> {
    let c = Contraction0::build(frame)?;
    let hq = c.h.compose(&c.q)?;
    let taus: Vec<usize> = (0..c.gamma.dim())
        .filter(|&j| matches!(frame.gen(c.gamma.label(j).1), Gen::Tau(_)))
        .collect();
    let sub = LinearOperator::new(
        Arc::new(taus.iter().map(|&j| c.gamma.degree(j)).collect()),
        c.gamma.degrees().clone(),
        0,
        taus.iter().map(|&j| hq.col(j).clone()).collect(),
    )?;
    let injective = sub.rank() == taus.len();
    let kills = hq.compose(&c.i)?.is_zero();
    Ok(Check::new(
        "H0 Q (X, nu_beta) = 0 determines X",
        injective && kills,
        (!(injective && kills)).then(|| format!("injective {injective}, H0 Q I0 = 0 {kills}")),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_pair::Bilinear;
    use proptest::prelude::*;

    fn q(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    pub(crate) fn test_pairs() -> Vec<Arc<LiePair>> {
        vec![
            Arc::new(LiePair::new(3, 1, &[]).unwrap()),
            Arc::new(LiePair::from_antisymmetric(2, 1, &[(0, 1, 1, q(1))]).unwrap()),
            Arc::new(LiePair::from_antisymmetric(3, 1, &[(0, 1, 2, q(1))]).unwrap()),
            Arc::new(LiePair::from_antisymmetric(3, 1, &[(1, 2, 0, q(1))]).unwrap()),
            Arc::new(
                LiePair::from_antisymmetric(3, 2, &[(0, 1, 1, q(2)), (0, 2, 2, q(-2)), (1, 2, 0, q(1))])
                    .unwrap(),
            ),
            Arc::new(
                LiePair::from_antisymmetric(
                    4,
                    3,
                    &[(0, 2, 2, q(1)), (1, 2, 2, q(-1)), (0, 3, 3, q(-1)), (1, 3, 3, q(1)), (2, 3, 0, q(1)), (2, 3, 1, q(-1))],
                )
                .unwrap(),
            ),
            Arc::new(LiePair::from_antisymmetric(3, 0, &[(0, 1, 2, q(1))]).unwrap()),
        ]
    }

    fn frame(p: &Arc<LiePair>, aux: Option<Bilinear>) -> Frame {
        let aux = aux.unwrap_or_else(|| Bilinear::zero(p.dim_g()));
        let conn = Arc::new(ConnectionSet::build(p, &aux).unwrap());
        Frame::new(p.clone(), conn)
    }

    #[test]
    fn bracket_examples() {
        let p = test_pairs()[4].clone();
        let f = frame(&p, None);
        let t0 = f.interior_section(&unit(2, 0));
        let t1 = f.interior_section(&unit(2, 1));
        assert!(f.bracket(&t0, &t1).is_zero());
        assert!(f.bracket(&t0, &t0).is_zero());
        let a = vec![q(2), q(-3)];
        assert_eq!(f.q(&f.interior_section(&a)), f.lie_section(&a));
        let ab = Arc::new(LiePair::new(3, 1, &[]).unwrap());
        let mut x = Section::zero(1, 3);
        x.nu[1] = Ext::one();
        let mut y = Section::zero(1, 3);
        y.nu[2] = Ext::one();
        assert!(bracket(&ab, &x, &y).is_zero());
    }

    #[test]
    fn s_phi_examples() {
        for p in test_pairs() {
            let m = p.dim_h();
            let incl: Vec<Vec<Scalar>> = (0..m).map(|k| unit(p.dim_g(), k)).collect();
            let s = build_s_phi(&p, &incl).unwrap();
            assert!(is_square_zero(&p, &s).0);
            let zero: Vec<Vec<Scalar>> = (0..m).map(|_| vec![q(0); p.dim_g()]).collect();
            assert!(is_square_zero(&p, &build_s_phi(&p, &zero).unwrap()).0);
        }
        // span{x, y} inside the Heisenberg algebra is not a subalgebra.
        let h = LiePair::from_antisymmetric(3, 2, &[(0, 1, 2, q(1))]).unwrap();
        let incl = vec![unit(3, 0), unit(3, 1)];
        let (ok, sq) = is_square_zero(&h, &build_s_phi(&h, &incl).unwrap());
        assert!(!ok);
        let mut expected = Section::zero(2, 3);
        expected.nu[2] = Ext::monomial(0b11, q(2));
        assert_eq!(sq, expected);
    }

    #[test]
    fn contraction_identities() {
        for p in test_pairs() {
            for aux in [None, Some(Bilinear::from_entries(p.dim_g(), &[(0, 0, 0, q(1))]).unwrap())] {
                let f = frame(&p, aux);
                for c in verify_contraction0(&f).unwrap() {
                    assert!(c.pass, "{}: {:?}", c.name, c.witness);
                }
            }
        }
    }

    #[test]
    fn relations_darwin_nap() {
        for p in test_pairs() {
            let f = frame(&p, None);
            for c in frame_relations(&f).unwrap() {
                assert!(c.pass, "{}: {:?}", c.name, c.witness);
            }
            assert!(darwin_check(&f).pass);
            assert!(nap_uniqueness(&f).unwrap().pass);
        }
    }

    #[test]
    fn frame_roundtrip() {
        for p in test_pairs() {
            let f = frame(&p, Some(Bilinear::from_entries(p.dim_g(), &[(0, 1, 0, q(3))]).unwrap()));
            let space = f.gamma_space();
            for l in space.labels() {
                let s = f.basis_section(l);
                let fe = f.from_raw(&s);
                assert_eq!(f.to_raw(&fe), s);
            }
        }
    }

    #[test]
    fn split_examples() {
        let p = test_pairs()[3].clone();
        let f = frame(&p, None);
        let zero = Section::zero(1, 3);
        let beta = CeElement::term(Coeffs::B, 1, vec![0], q(1));
        let s = f.i0(&beta);
        assert_eq!(f.split_section(&s), (s.clone(), zero.clone(), zero.clone()));
        let is = f.interior_section(&[q(1)]);
        assert_eq!(f.split_section(&is), (zero.clone(), is.clone(), zero.clone()));
        let (k, _, _) = f.split_section(f.s_i());
        assert!(k.is_zero());
        let solv = test_pairs()[1].clone();
        let fs = frame(&solv, None);
        let one_b = CeElement::term(Coeffs::B, 0, vec![0], q(1));
        let mut expected = Section::zero(1, 2);
        expected.nu[1] = Ext::one();
        assert_eq!(fs.i0(&one_b), expected);
    }

    fn small_section() -> impl Strategy<Value = (usize, Vec<(u32, usize, i64)>, u32, i64)> {
        (0usize..6, prop::collection::vec((0u32..8, 0usize..7, -3i64..4), 0..5), 0u32..8, -3i64..4)
    }

    proptest! {
        #[test]
        fn q_is_derivation((pi, terms, fm, fc) in small_section()) {
            let p = test_pairs()[pi].clone();
            let fr = frame(&p, None);
            let masks = fr.ext().masks().len() as u32;
            let g = fr.num_gens();
            let mut s = Section::zero(p.dim_h(), p.dim_g());
            for (mk, gi, c) in terms {
                let mask = fr.ext().masks()[(mk % masks) as usize];
                s = s.add(&fr.basis_section(&(mask, gi % g)).scale(&q(c)));
            }
            let fmask = fr.ext().masks()[(fm % masks) as usize];
            let f = Ext::monomial(fmask, q(fc));
            let lhs = fr.q(&s.left_mul(&f));
            let rhs = s.left_mul(&fr.ext().d(&f)).add(&fr.q(&s).left_mul(&f.twist(1)));
            prop_assert_eq!(lhs, rhs);
            prop_assert!(fr.q(&fr.q(&s)).is_zero());
        }
    }
}
