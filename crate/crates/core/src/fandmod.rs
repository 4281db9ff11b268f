//! The fan D-module: actions of zϑ_i, z∂_l and χ on the symbols 𝟙_k,
//! operator words, GKZ-style relations and the grading.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::curves::{CurveError, MoriData, RefinedFanData};
use crate::exactalg::series::multi_indices;
use crate::exactalg::{fmt_rat, parse_rat, rint, MPoly, Rat};
use crate::stackyfan::NVec;

/// Laurent polynomial in Q (exponents in the Λ basis) with polynomial
/// coefficients in z, χ and y.
pub type Coef = BTreeMap<Vec<i64>, MPoly>;

#[derive(Clone, Debug, PartialEq, Default)]
pub struct DModElement {
    pub terms: BTreeMap<NVec, Coef>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DModError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("parse error at column {col}: {msg}")]
    Parse { col: usize, msg: String },
    #[error("index {0} out of range")]
    Index(usize),
    #[error("z∂ along a ray is not available in the reduced module")]
    ReducedRay,
}

#[derive(Clone, Debug)]
pub struct FanDModule {
    pub rd: RefinedFanData,
    /// S = rays followed by the extension G.
    pub s: Vec<NVec>,
    pub reduced: bool,
    s_psi: Vec<Vec<Rat>>,
    basis_q: Vec<Vec<Rat>>,
    psi_cache: RefCell<HashMap<NVec, Vec<Rat>>>,
}

impl FanDModule {
    pub fn new(rd: &RefinedFanData, ext: &[NVec], reduced: bool) -> Result<Self, DModError> {
        let fan = &rd.fan;
        let mut s: Vec<NVec> = fan.rays.clone();
        s.extend(ext.iter().map(|g| fan.reduce(g)));
        let mut s_psi = Vec::new();
        for l in &s {
            s_psi.push(fan.psi(l).map_err(CurveError::from)?.0);
        }
        Ok(FanDModule { rd: rd.clone(), s, reduced, s_psi, basis_q: rd.basis.clone(), psi_cache: RefCell::new(HashMap::new()) })
    }

    pub fn m(&self) -> usize {
        self.rd.m()
    }

    pub fn n(&self) -> usize {
        self.rd.fan.rank
    }

    pub fn g(&self) -> usize {
        self.s.len() - self.m()
    }

    /// z, χ_1..χ_n, y_1..y_|S|.
    pub fn nvars(&self) -> usize {
        1 + self.n() + self.s.len()
    }

    pub fn y_var(&self, j: usize) -> usize {
        1 + self.n() + j
    }

    pub fn var_names(&self) -> Vec<String> {
        let mut v = vec!["z".to_string()];
        v.extend((1..=self.n()).map(|a| format!("chi{a}")));
        v.extend((1..=self.s.len()).map(|j| format!("y{j}")));
        v
    }

    pub fn psi(&self, k: &[i64]) -> Vec<Rat> {
        if let Some(p) = self.psi_cache.borrow().get(k) {
            return p.clone();
        }
        let p = self.rd.fan.psi(k).expect("point in the support").0;
        self.psi_cache.borrow_mut().insert(k.to_vec(), p.clone());
        p
    }

    fn dclass(&self, k: &[i64], l: usize) -> (NVec, Vec<i64>) {
        let fan = &self.rd.fan;
        let kl = fan.add(k, &self.s[l]);
        let (a, b, c) = (self.psi(k), &self.s_psi[l], self.psi(&kl));
        let d: Vec<Rat> = (0..self.m()).map(|i| &a[i] + &b[i] - &c[i]).collect();
        (kl, self.rd.to_lambda(&d).expect("d(k,l) lies in the curve lattice"))
    }

    /// D_i·d for d in Λ coordinates.
    fn divisor_pairing(&self, i: usize, q: &[i64]) -> Rat {
        q.iter().zip(&self.basis_q).map(|(&c, b)| rint(c) * &b[i]).sum()
    }

    /// y_l as a polynomial; 1 for rays in the reduced module.
    fn y_poly(&self, l: usize) -> MPoly {
        if self.reduced && l < self.m() {
            MPoly::one(self.nvars())
        } else {
            MPoly::var(self.nvars(), self.y_var(l))
        }
    }

    pub fn unit(&self, k: &[i64]) -> DModElement {
        let mut e = DModElement::default();
        let mut c = Coef::new();
        c.insert(vec![0; self.rd.rank()], MPoly::one(self.nvars()));
        e.terms.insert(self.rd.fan.reduce(k), c);
        e
    }

    pub fn theta_action(&self, i: usize, e: &DModElement) -> DModElement {
        let nv = self.nvars();
        let z = MPoly::var(nv, 0);
        let mut out = DModElement::default();
        for (k, coef) in &e.terms {
            let pk = self.psi(k);
            for (q, c) in coef {
                let w = &self.divisor_pairing(i, q) + &pk[i];
                if !w.is_zero() {
                    out.add_term(k, q, &(&z * c).scale(&w));
                }
                for l in 0..self.s.len() {
                    let p = &self.s_psi[l][i];
                    if p.is_zero() {
                        continue;
                    }
                    let (kl, d) = self.dclass(k, l);
                    let q2: Vec<i64> = q.iter().zip(&d).map(|(a, b)| a + b).collect();
                    out.add_term(&kl, &q2, &(&self.y_poly(l) * c).scale(p));
                }
            }
        }
        out
    }

    pub fn partial_action(&self, l: usize, e: &DModElement) -> Result<DModElement, DModError> {
        if l >= self.s.len() {
            return Err(DModError::Index(l + 1));
        }
        if self.reduced && l < self.m() {
            return Err(DModError::ReducedRay);
        }
        let nv = self.nvars();
        let z = MPoly::var(nv, 0);
        let yv = self.y_var(l);
        let mut out = DModElement::default();
        for (k, coef) in &e.terms {
            for (q, c) in coef {
                let dc = c.derivative(yv);
                if !dc.is_zero() {
                    out.add_term(k, q, &(&z * &dc));
                }
                let (kl, d) = self.dclass(k, l);
                let q2: Vec<i64> = q.iter().zip(&d).map(|(a, b)| a + b).collect();
                out.add_term(&kl, &q2, c);
            }
        }
        Ok(out)
    }

    /// χ_a acting as zϑ_χ = Σ_i (χ_a·b_i) zϑ_i.
    pub fn chi_action(&self, a: usize, e: &DModElement) -> DModElement {
        let mut out = DModElement::default();
        for (i, b) in self.rd.fan.rays.iter().enumerate() {
            if b[a] != 0 {
                out = out.add(&self.theta_action(i, e).scale(&rint(b[a])));
            }
        }
        out
    }

    fn apply_atom(&self, atom: &Atom, e: &DModElement) -> Result<DModElement, DModError> {
        let nv = self.nvars();
        Ok(match atom {
            Atom::Theta(i) => {
                if *i >= self.m() {
                    return Err(DModError::Index(i + 1));
                }
                self.theta_action(*i, e)
            }
            Atom::Partial(l) => self.partial_action(*l, e)?,
            Atom::Y(l) => {
                if *l >= self.s.len() {
                    return Err(DModError::Index(l + 1));
                }
                if self.reduced && *l < self.m() {
                    e.clone()
                } else {
                    e.mul_poly(&MPoly::var(nv, self.y_var(*l)))
                }
            }
            Atom::Q(q) => {
                if q.len() != self.rd.rank() {
                    return Err(DModError::Index(q.len()));
                }
                e.mul_q(q)
            }
            Atom::Z => e.mul_poly(&MPoly::var(nv, 0)),
            Atom::Chi(a) => {
                if *a >= self.n() {
                    return Err(DModError::Index(a + 1));
                }
                self.chi_action(*a, e)
            }
        })
    }

    /// Applies an operator polynomial; a monomial A₁A₂…A_r acts as A₁(A₂(…A_r(e))).
    pub fn apply(&self, op: &OpPoly, e: &DModElement) -> Result<DModElement, DModError> {
        let mut out = DModElement::default();
        for (c, word) in &op.terms {
            let mut cur = e.clone();
            for atom in word.iter().rev() {
                cur = self.apply_atom(atom, &cur)?;
            }
            out = out.add(&cur.scale(c));
        }
        Ok(out)
    }

    pub fn evaluate(&self, rel: &Relation) -> Result<DModElement, DModError> {
        let mut out = DModElement::default();
        for (op, k) in &rel.terms {
            out = out.add(&self.apply(op, &self.unit(k))?);
        }
        Ok(out)
    }

    pub fn verify(&self, rel: &Relation) -> Result<bool, DModError> {
        Ok(self.evaluate(rel)?.is_zero())
    }

    /// deg 𝟙_k = |k|, deg z = deg χ = 1, deg y_l = 1 − |l|, deg Q^d = c₁·d.
    /// None when e is zero or inhomogeneous.
    pub fn grading_degree(&self, e: &DModElement) -> Option<Rat> {
        let n = self.n();
        let mut deg: Option<Rat> = None;
        for (k, coef) in &e.terms {
            let base: Rat = self.psi(k).iter().sum();
            for (q, c) in coef {
                let qd: Rat = (0..self.m()).map(|i| self.divisor_pairing(i, q)).sum();
                for (exps, _) in c.terms() {
                    let mut d = &base + &qd + rint(exps[0] as i64);
                    for a in 0..n {
                        d += rint(exps[1 + a] as i64);
                    }
                    for l in 0..self.s.len() {
                        let a = exps[1 + n + l] as i64;
                        if a > 0 {
                            let age: Rat = self.s_psi[l].iter().sum();
                            d += (Rat::one() - age) * rint(a);
                        }
                    }
                    match &deg {
                        None => deg = Some(d),
                        Some(d0) if *d0 != d => return None,
                        _ => {}
                    }
                }
            }
        }
        deg
    }

    /// Default k-window: 0, Box elements and S.
    pub fn default_window(&self) -> Vec<NVec> {
        let fan = &self.rd.fan;
        let mut w: Vec<NVec> = fan.box_elements().into_iter().map(|b| b.v).collect();
        for l in &self.s {
            if !w.contains(l) {
                w.push(l.clone());
            }
        }
        w
    }

    /// ℛ_{i,k} (unreduced module) or the reduced 𝒫′ together with 𝒫 (unreduced).
    pub fn gkz_relations(&self, mori: &MoriData, bounds: &RelationBounds) -> Vec<Relation> {
        let fan = &self.rd.fan;
        let m = self.m();
        let window = bounds.window.clone().unwrap_or_else(|| self.default_window());
        let mut out = Vec::new();
        if !self.reduced {
            for i in 0..m {
                for k in &window {
                    let mut op = OpPoly::atom(Atom::Theta(i));
                    op = op.sub(&OpPoly::atom(Atom::Z).scale(&self.psi(k)[i]));
                    for l in 0..self.s.len() {
                        let p = &self.s_psi[l][i];
                        if !p.is_zero() {
                            op = op.sub(&OpPoly::word(vec![Atom::Y(l), Atom::Partial(l)]).scale(p));
                        }
                    }
                    out.push(Relation { label: format!("R[{},{}]", i + 1, fmt_k(k)), terms: vec![(op, k.clone())] });
                }
            }
        }
        let ns = self.s.len();
        let avecs = multi_indices(ns, bounds.max_a);
        let qs = mori.enumerate_effective(&bounds.qdeg);
        let mut seen: Vec<(NVec, Vec<u32>, NVec, Vec<u32>)> = Vec::new();
        for (ia, a) in avecs.iter().enumerate() {
            for a2 in avecs.iter().skip(ia) {
                if a.iter().zip(a2).any(|(x, y)| *x > 0 && *y > 0) {
                    continue;
                }
                for k1 in &window {
                    for k2 in &window {
                        if a == a2 && k1 >= k2 {
                            continue;
                        }
                        let mut t1 = k1.clone();
                        let mut t2 = k2.clone();
                        let mut w = self.psi(k1);
                        for l in 0..ns {
                            for _ in 0..a[l] {
                                t1 = fan.add(&t1, &self.s[l]);
                            }
                            for _ in 0..a2[l] {
                                t2 = fan.add(&t2, &self.s[l]);
                            }
                            for i in 0..m {
                                w[i] += rint(a[l] as i64) * &self.s_psi[l][i] - rint(a2[l] as i64) * &self.s_psi[l][i];
                            }
                        }
                        let pk2 = self.psi(k2);
                        for i in 0..m {
                            w[i] -= &pk2[i];
                        }
                        if t1 != t2 {
                            continue;
                        }
                        // d2 − d1 = w
                        let Some(delta) = self.rd.to_lambda(&w) else { continue };
                        let key = (k1.clone(), a.clone(), k2.clone(), a2.clone());
                        if seen.contains(&key) {
                            continue;
                        }
                        for d1 in &qs {
                            let d2: Vec<i64> = d1.iter().zip(&delta).map(|(x, y)| x + y).collect();
                            if !mori.is_effective(&d2) || mori.degree(&d2) > bounds.qdeg {
                                continue;
                            }
                            // drop relations that are Q-multiples of smaller ones
                            if mori.walls.iter().any(|wl| {
                                let r1: Vec<i64> = d1.iter().zip(wl).map(|(x, y)| x - y).collect();
                                let r2: Vec<i64> = d2.iter().zip(wl).map(|(x, y)| x - y).collect();
                                mori.is_effective(&r1) && mori.is_effective(&r2)
                            }) {
                                continue;
                            }
                            seen.push(key.clone());
                            let lhs = self.p_side(d1, a, k1);
                            let rhs = self.p_side(&d2, a2, k2).scale(&-Rat::one());
                            let tag = if self.reduced { "P'" } else { "P" };
                            out.push(Relation {
                                label: format!(
                                    "{tag}[{};{};{};{};{};{}]",
                                    fmt_v(d1),
                                    fmt_v(&d2),
                                    fmt_u(a),
                                    fmt_u(a2),
                                    fmt_k(k1),
                                    fmt_k(k2)
                                ),
                                terms: vec![(lhs, k1.clone()), (rhs, k2.clone())],
                            });
                        }
                    }
                }
            }
        }
        out
    }

    /// Q^d ∏_G (z∂_l)^{a_l} · (ray part), the ray part being (z∂_i)^{a_i} in the
    /// unreduced module and the shifted falling products in the reduced one.
    fn p_side(&self, d: &[i64], a: &[u32], k: &[i64]) -> OpPoly {
        let m = self.m();
        let mut op = OpPoly::atom(Atom::Q(d.to_vec()));
        for (l, &al) in a.iter().enumerate().skip(if self.reduced { m } else { 0 }) {
            for _ in 0..al {
                op = op.mul(&OpPoly::atom(Atom::Partial(l)));
            }
        }
        if self.reduced {
            let pk = self.psi(k);
            for i in 0..m {
                for nu in 0..a[i] {
                    let mut f = OpPoly::atom(Atom::Theta(i)).sub(&OpPoly::atom(Atom::Z).scale(&(rint(nu as i64) + &pk[i])));
                    for l in m..self.s.len() {
                        let p = &self.s_psi[l][i];
                        if !p.is_zero() {
                            f = f.sub(&OpPoly::word(vec![Atom::Y(l), Atom::Partial(l)]).scale(p));
                        }
                    }
                    op = op.mul(&f);
                }
            }
        }
        op
    }

    /// Checks that every lattice point of each maximal cone up to the given
    /// age height is reachable from a candidate by adding elements of S in that cone.
    pub fn generators_check(&self, candidates: &[NVec], height: Option<Rat>) -> GeneratorsReport {
        let fan = &self.rd.fan;
        let cand: Vec<NVec> = candidates.iter().map(|k| fan.reduce(k)).collect();
        let hmax = height.unwrap_or_else(|| {
            let c: Rat = cand.iter().map(|k| self.psi(k).iter().sum::<Rat>()).max().unwrap_or_else(Rat::zero);
            let s: Rat = self.s_psi.iter().map(|p| p.iter().sum::<Rat>()).max().unwrap_or_else(Rat::zero);
            c + s * rint(2) + rint(1)
        });
        for (ci, cone) in fan.max_cones.iter().enumerate() {
            let inside = |k: &[i64]| self.psi(k).iter().enumerate().all(|(i, x)| x.is_zero() || cone.contains(&i));
            let steps: Vec<usize> = (0..self.s.len()).filter(|&l| inside(&self.s[l])).collect();
            let height = |k: &[i64]| self.psi(k).iter().sum::<Rat>();
            let mut reach: std::collections::BTreeSet<NVec> = cand.iter().filter(|k| inside(k)).cloned().collect();
            let mut frontier: Vec<NVec> = reach.iter().cloned().collect();
            while let Some(k) = frontier.pop() {
                for &l in &steps {
                    let kl = fan.add(&k, &self.s[l]);
                    if height(&kl) <= hmax && reach.insert(kl.clone()) {
                        frontier.push(kl);
                    }
                }
            }
            // every lattice point v + Σ n_i b_i with v ∈ Box(σ)
            for v in fan.box_of_cone(cone) {
                let hv = height(&v);
                let left = hmax.clone() - &hv;
                if left.is_negative() {
                    continue;
                }
                let maxn = left.floor().to_integer();
                let maxn = u32::try_from(maxn).unwrap_or(0);
                for ns in multi_indices(cone.len(), maxn) {
                    let mut k = v.clone();
                    for (&j, &c) in cone.iter().zip(&ns) {
                        k = fan.add(&k, &fan.scale(&fan.rays[j], c as i64));
                    }
                    if !reach.contains(&k) {
                        return GeneratorsReport { covered: false, cone: Some(ci), witness: Some(k), height: hmax };
                    }
                }
            }
        }
        GeneratorsReport { covered: true, cone: None, witness: None, height: hmax }
    }
}

#[derive(Clone, Debug)]
pub struct GeneratorsReport {
    pub covered: bool,
    pub cone: Option<usize>,
    pub witness: Option<NVec>,
    pub height: Rat,
}

#[derive(Clone, Debug)]
pub struct RelationBounds {
    pub qdeg: Rat,
    pub max_a: u32,
    pub window: Option<Vec<NVec>>,
}

impl Default for RelationBounds {
    fn default() -> Self {
        RelationBounds { qdeg: rint(3), max_a: 3, window: None }
    }
}

impl DModElement {
    fn add_term(&mut self, k: &[i64], q: &[i64], c: &MPoly) {
        if c.is_zero() {
            return;
        }
        let coef = self.terms.entry(k.to_vec()).or_default();
        let v = match coef.remove(q) {
            Some(old) => &old + c,
            None => c.clone(),
        };
        if !v.is_zero() {
            coef.insert(q.to_vec(), v);
        }
        if coef.is_empty() {
            self.terms.remove(k);
        }
    }

    pub fn add(&self, o: &DModElement) -> DModElement {
        let mut r = self.clone();
        for (k, coef) in &o.terms {
            for (q, c) in coef {
                r.add_term(k, q, c);
            }
        }
        r
    }

    pub fn scale(&self, s: &Rat) -> DModElement {
        let mut r = DModElement::default();
        for (k, coef) in &self.terms {
            for (q, c) in coef {
                r.add_term(k, q, &c.scale(s));
            }
        }
        r
    }

    pub fn mul_poly(&self, p: &MPoly) -> DModElement {
        let mut r = DModElement::default();
        for (k, coef) in &self.terms {
            for (q, c) in coef {
                r.add_term(k, q, &(c * p));
            }
        }
        r
    }

    pub fn mul_q(&self, d: &[i64]) -> DModElement {
        let mut r = DModElement::default();
        for (k, coef) in &self.terms {
            for (q, c) in coef {
                let q2: Vec<i64> = q.iter().zip(d).map(|(a, b)| a + b).collect();
                r.add_term(k, &q2, c);
            }
        }
        r
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Substitutes values for the y variables (indices into the coefficient ring).
    pub fn subst(&self, var: usize, value: &MPoly) -> DModElement {
        let mut r = DModElement::default();
        for (k, coef) in &self.terms {
            for (q, c) in coef {
                r.add_term(k, q, &c.subst(var, value));
            }
        }
        r
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (k, coef) in &self.terms {
            for (q, c) in coef {
                let qs = if q.iter().all(|&x| x == 0) { String::new() } else { format!("Q[{}]*", fmt_v(q)) };
                parts.push(format!("({})*{}unit({})", c.fmt_with(names), qs, fmt_k(k)));
            }
        }
        parts.join(" + ")
    }
}

fn fmt_k(k: &[i64]) -> String {
    k.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn fmt_v(k: &[i64]) -> String {
    fmt_k(k)
}

fn fmt_u(k: &[u32]) -> String {
    k.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Generator of the operator ring. Indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Theta(usize),
    Partial(usize),
    Y(usize),
    Q(Vec<i64>),
    Z,
    Chi(usize),
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Theta(i) => write!(f, "zT{}", i + 1),
            Atom::Partial(l) => write!(f, "zD{}", l + 1),
            Atom::Y(l) => write!(f, "y{}", l + 1),
            Atom::Q(q) => write!(f, "Q[{}]", fmt_v(q)),
            Atom::Z => write!(f, "z"),
            Atom::Chi(a) => write!(f, "chi{}", a + 1),
        }
    }
}

/// Noncommutative polynomial in the atoms with rational coefficients.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct OpPoly {
    pub terms: Vec<(Rat, Vec<Atom>)>,
}

impl OpPoly {
    pub fn constant(c: Rat) -> Self {
        OpPoly { terms: vec![(c, vec![])] }.normalized()
    }

    pub fn atom(a: Atom) -> Self {
        OpPoly { terms: vec![(Rat::one(), vec![a])] }
    }

    pub fn word(w: Vec<Atom>) -> Self {
        OpPoly { terms: vec![(Rat::one(), w)] }
    }

    fn normalized(self) -> Self {
        let mut map: BTreeMap<Vec<Atom>, Rat> = BTreeMap::new();
        let mut order: Vec<Vec<Atom>> = Vec::new();
        for (c, w) in self.terms {
            if !map.contains_key(&w) {
                order.push(w.clone());
            }
            *map.entry(w).or_insert_with(Rat::zero) += c;
        }
        OpPoly { terms: order.into_iter().filter_map(|w| { let c = map[&w].clone(); if c.is_zero() { None } else { Some((c, w)) } }).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        OpPoly { terms: self.terms.iter().chain(&o.terms).cloned().collect() }.normalized()
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-Rat::one()))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        OpPoly { terms: self.terms.iter().map(|(a, w)| (a * c, w.clone())).collect() }.normalized()
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut terms = Vec::new();
        for (a, w) in &self.terms {
            for (b, v) in &o.terms {
                let mut u = w.clone();
                u.extend(v.iter().cloned());
                terms.push((a * b, u));
            }
        }
        OpPoly { terms }.normalized()
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = OpPoly::constant(Rat::one());
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }
}

impl fmt::Display for OpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (c, w)) in self.terms.iter().enumerate() {
            let neg = c < &Rat::zero();
            let a = if neg { -c } else { c.clone() };
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let mut parts: Vec<String> = Vec::new();
            if !a.is_one() || w.is_empty() {
                parts.push(fmt_rat(&a));
            }
            parts.extend(w.iter().map(|x| x.to_string()));
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

/// Σ_j op_j · 𝟙_{k_j}.
#[derive(Clone, Debug, PartialEq)]
pub struct Relation {
    pub label: String,
    pub terms: Vec<(OpPoly, NVec)>,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|(op, k)| format!("{} :: unit({})", op, fmt_k(k))).collect();
        write!(f, "{}", parts.join(" ; "))
    }
}

/// Parses `expr :: unit(k) [; expr :: unit(k)]...`.
pub fn parse_relation(text: &str, rank: usize) -> Result<Relation, DModError> {
    let mut terms = Vec::new();
    let mut offset = 0;
    for seg in text.split(';') {
        let Some(pos) = seg.find("::") else {
            return Err(DModError::Parse { col: offset + seg.len() + 1, msg: "missing ':: unit(k)'".into() });
        };
        let op = parse_word(&seg[..pos], rank).map_err(|e| shift(e, offset))?;
        let rest = seg[pos + 2..].trim();
        let inner = rest
            .strip_prefix("unit(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or(DModError::Parse { col: offset + pos + 3, msg: "expected unit(k)".into() })?;
        let k: Result<Vec<i64>, _> = inner.split(',').map(|x| x.trim().parse::<i64>()).collect();
        let k = k.map_err(|_| DModError::Parse { col: offset + pos + 3, msg: format!("bad lattice point '{inner}'") })?;
        terms.push((op, k));
        offset += seg.len() + 1;
    }
    Ok(Relation { label: String::new(), terms })
}

fn shift(e: DModError, by: usize) -> DModError {
    match e {
        DModError::Parse { col, msg } => DModError::Parse { col: col + by, msg },
        o => o,
    }
}

/// Parses an operator expression. `rank` is the rank of Λ, used for bare `Q`.
pub fn parse_word(text: &str, rank: usize) -> Result<OpPoly, DModError> {
    let mut p = Parser { s: text.as_bytes(), pos: 0, rank };
    let r = p.expr()?;
    p.ws();
    if p.pos != p.s.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(r)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    rank: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> DModError {
        DModError::Parse { col: self.pos + 1, msg: msg.into() }
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, t: &str) -> bool {
        self.ws();
        if self.s[self.pos..].starts_with(t.as_bytes()) {
            self.pos += t.len();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<OpPoly, DModError> {
        let mut acc = if self.eat("-") { self.term()?.scale(&-Rat::one()) } else { self.term()? };
        loop {
            if self.eat("+") {
                acc = acc.add(&self.term()?);
            } else if self.eat("-") {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<OpPoly, DModError> {
        let mut acc = self.factor()?;
        while self.eat("*") {
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<OpPoly, DModError> {
        let base = self.atom()?;
        if self.eat("^") {
            let n = self.uint()?;
            return Ok(base.pow(n as u32));
        }
        Ok(base)
    }

    fn uint(&mut self) -> Result<u64, DModError> {
        self.ws();
        let st = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if st == self.pos {
            return Err(self.err("expected an integer"));
        }
        std::str::from_utf8(&self.s[st..self.pos]).unwrap().parse().map_err(|_| self.err("integer too large"))
    }

    fn index(&mut self) -> Result<usize, DModError> {
        let st = self.pos;
        let n = self.uint()? as usize;
        if n == 0 {
            self.pos = st;
            return Err(self.err("indices are 1-based"));
        }
        Ok(n - 1)
    }

    fn atom(&mut self) -> Result<OpPoly, DModError> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(")") {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let st = self.pos;
                while self.pos < self.s.len() && (self.s[self.pos].is_ascii_digit() || self.s[self.pos] == b'/') {
                    self.pos += 1;
                }
                let txt = std::str::from_utf8(&self.s[st..self.pos]).unwrap();
                let r = parse_rat(txt).ok_or_else(|| DModError::Parse { col: st + 1, msg: format!("bad number '{txt}'") })?;
                Ok(OpPoly::constant(r))
            }
            _ => {
                if self.eat("zT") {
                    Ok(OpPoly::atom(Atom::Theta(self.index()?)))
                } else if self.eat("zD") {
                    Ok(OpPoly::atom(Atom::Partial(self.index()?)))
                } else if self.eat("chi") {
                    Ok(OpPoly::atom(Atom::Chi(self.index()?)))
                } else if self.eat("y") {
                    Ok(OpPoly::atom(Atom::Y(self.index()?)))
                } else if self.eat("Q") {
                    if self.s.get(self.pos) == Some(&b'[') {
                        self.pos += 1;
                        let st = self.pos;
                        while self.pos < self.s.len() && self.s[self.pos] != b']' {
                            self.pos += 1;
                        }
                        if self.pos == self.s.len() {
                            return Err(self.err("expected ']'"));
                        }
                        let inner = std::str::from_utf8(&self.s[st..self.pos]).unwrap();
                        self.pos += 1;
                        let q: Result<Vec<i64>, _> = inner.split(',').map(|x| x.trim().parse::<i64>()).collect();
                        let q = q.map_err(|_| DModError::Parse { col: st + 1, msg: format!("bad exponent '{inner}'") })?;
                        if q.len() != self.rank {
                            return Err(DModError::Parse { col: st + 1, msg: format!("exponent needs {} entries", self.rank) });
                        }
                        Ok(OpPoly::atom(Atom::Q(q)))
                    } else if self.rank == 1 {
                        Ok(OpPoly::atom(Atom::Q(vec![1])))
                    } else {
                        Err(self.err("bare Q needs a rank-one curve lattice; use Q[a,b,...]"))
                    }
                } else if self.eat("z") {
                    Ok(OpPoly::atom(Atom::Z))
                } else {
                    Err(self.err("unknown symbol"))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;
    use crate::stackyfan::tests::{c2mu2, p1, p12, p2};

    fn module(f: crate::stackyfan::StackyFan, g: &[NVec], reduced: bool) -> FanDModule {
        let rd = RefinedFanData::new(&f, 0).unwrap();
        FanDModule::new(&rd, g, reduced).unwrap()
    }

    fn check(m: &FanDModule, text: &str) -> bool {
        m.verify(&parse_relation(text, m.rd.rank()).unwrap()).unwrap()
    }

    #[test]
    fn projective_line_actions() {
        let m = module(p1(), &[], false);
        let e = m.theta_action(0, &m.unit(&[0]));
        let mut expect = DModElement::default();
        let mut c = Coef::new();
        c.insert(vec![0], MPoly::var(m.nvars(), m.y_var(0)));
        expect.terms.insert(vec![1], c);
        assert_eq!(e, expect);
        // χ·𝟙₀ = y₁𝟙_{b₁} − y₂𝟙_{b₂}
        let x = m.chi_action(0, &m.unit(&[0]));
        assert_eq!(x.terms.len(), 2);
        assert_eq!(x.terms[&vec![-1]][&vec![0]], MPoly::var(m.nvars(), m.y_var(1)).scale(&rint(-1)));
        let r = module(p1(), &[], true);
        assert!(check(&r, "zT1*zT2 - Q :: unit(0)"));
        assert!(!check(&r, "zT1*zT2 :: unit(0)"));
    }

    #[test]
    fn weighted_line_relations() {
        let m = module(p12(), &[vec![1]], true);
        // zϑ₁𝟙₁ = (z/2)𝟙₁ + 𝟙₃ + (y/2)𝟙₂
        let e = m.theta_action(0, &m.unit(&[1]));
        assert_eq!(e.terms.len(), 3);
        assert_eq!(e.terms[&vec![1]][&vec![0]], MPoly::var(m.nvars(), 0).scale(&rat(1, 2)));
        assert_eq!(e.terms[&vec![2]][&vec![0]], MPoly::var(m.nvars(), m.y_var(2)).scale(&rat(1, 2)));
        // z∂_y𝟙₋₁ = Q^{1/2}𝟙₀, i.e. the Λ generator
        let d = m.partial_action(2, &m.unit(&[-1])).unwrap();
        assert_eq!(d.terms[&vec![0]].keys().cloned().collect::<Vec<_>>(), vec![vec![1]]);
        for r in [
            "(zT1 - 1/2*y3*zD3)*zT2*(zT2 - z) - Q^2 :: unit(0)",
            "zD3*zT2 - Q :: unit(0)",
            "zT1 - 1/2*y3*zD3 - zD3^2 :: unit(0)",
            "Q*zD3 - (zT1 - 1/2*y3*zD3)*zT2 :: unit(0)",
            "2*zT1 - zT2 - chi1 :: unit(0)",
        ] {
            assert!(check(&m, r), "{r}");
        }
    }

    #[test]
    fn plane_relations() {
        let m = module(p2(), &[vec![1, 1]], true);
        assert!(check(&m, "(zT2 - y4*zD4)*(zT1 - y4*zD4) - zD4 :: unit(0,0)"));
        assert!(check(&m, "zT3*(zT2 - y4*zD4)*(zT1 - y4*zD4) - Q :: unit(0,0)"));
    }

    #[test]
    fn quotient_relation() {
        let m = module(c2mu2(), &[vec![1, 1]], true);
        assert!(check(&m, "zD3^2 - (zT1 - 1/2*y3*zD3)*(zT2 - 1/2*y3*zD3) :: unit(0,0)"));
    }

    #[test]
    fn emitted_relations_verify() {
        for (f, g) in [(p1(), vec![]), (p12(), vec![vec![1]]), (c2mu2(), vec![vec![1, 1]])] {
            for reduced in [false, true] {
                let m = module(f.clone(), &g, reduced);
                let mori = MoriData::new(&m.rd, None).unwrap();
                let bounds = RelationBounds { qdeg: rint(2), max_a: 2, window: None };
                let rels = m.gkz_relations(&mori, &bounds);
                assert!(!rels.is_empty());
                for r in &rels {
                    assert!(m.verify(r).unwrap(), "{} {}", r.label, r);
                }
            }
        }
    }

    #[test]
    fn generators_and_grading() {
        let m = module(p1(), &[], false);
        assert!(m.generators_check(&[vec![0]], None).covered);
        let m = module(p12(), &[vec![1]], false);
        assert!(m.generators_check(&[vec![0]], None).covered);
        let m0 = module(p12(), &[], false);
        let rep = m0.generators_check(&[vec![0]], None);
        assert!(!rep.covered);
        assert_eq!(rep.witness, Some(vec![1]));
        // deg(Q^{1/2}𝟙₀) = c₁·(½,1) = 3/2
        assert_eq!(m.grading_degree(&m.unit(&[0]).mul_q(&[1])), Some(rat(3, 2)));
        let e = m.unit(&[-1]).add(&m.unit(&[1]));
        assert_eq!(m.grading_degree(&e), None);
        for k in [0i64, 1, -1, 2] {
            let u = m.unit(&[k]);
            let d0 = m.grading_degree(&u).unwrap();
            for i in 0..2 {
                assert_eq!(m.grading_degree(&m.theta_action(i, &u)), Some(&d0 + rint(1)));
            }
            // z∂_l raises the degree by |l|
            assert_eq!(m.grading_degree(&m.partial_action(2, &u).unwrap()), Some(&d0 + rat(1, 2)));
        }
    }

    #[test]
    fn word_round_trip() {
        let w = parse_word("-(zT1 - 1/2*y3*zD3)*zT2 + Q[2]*chi1", 1).unwrap();
        let again = parse_word(&w.to_string(), 1).unwrap();
        assert_eq!(w, again);
        assert!(matches!(parse_word("zT0", 1), Err(DModError::Parse { .. })));
        assert!(matches!(parse_word("Q", 2), Err(DModError::Parse { .. })));
        assert!(matches!(parse_word("zT1 +", 1), Err(DModError::Parse { col: 6, .. })));
    }
}
