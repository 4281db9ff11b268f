//! Hypergeometric index sets, the localization map Loc and the extended I-function,
//! computed as truncated series of fixed-point classes.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::chenruan::{FixedPointModel, LocalizedClass};
use crate::curves::{AgePairing, CurveError, MoriData, RefinedFanData};
use crate::exactalg::series::multi_indices;
use crate::exactalg::{ceil_rat, factorial, frac, is_integral, rint, to_i64, MPoly, Profile, Rat, RatFn, SeriesKey};
use crate::stackyfan::{FanError, NVec, StackyFan};

#[derive(Debug, Error)]
pub enum SetupError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error("extension point {0:?}: {1}")]
    BadExt(NVec, String),
    #[error("chi specialization: {0}")]
    Chi(String),
}

/// Everything the localization computations share: fan data, the extension set G,
/// the fixed-point model and the truncation profile.
#[derive(Clone, Debug)]
pub struct MirrorSetup {
    pub rd: RefinedFanData,
    pub mori: MoriData,
    pub ext: Vec<NVec>,
    /// Rays, then `ext`.
    pub s: Vec<NVec>,
    pub model: FixedPointModel,
    pub profile: Profile,
    psi_cache: RefCell<HashMap<NVec, Vec<Rat>>>,
}

/// A member λ of K^G_k inside the profile, with its curve class and sector.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct HypIndex {
    pub lambda: Vec<Rat>,
    pub a: Vec<u32>,
    /// d(λ) in the Λ basis.
    pub q: Vec<i64>,
    pub v: NVec,
}

/// Truncated series in (Q, t, y) whose coefficients are fixed-point classes.
#[derive(Clone, Debug)]
pub struct LocSeries {
    pub profile: Profile,
    pub nvars: usize,
    pub width: usize,
    pub coeffs: BTreeMap<SeriesKey, LocalizedClass>,
}

impl MirrorSetup {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        fan: &StackyFan,
        sigma0: usize,
        ext: &[NVec],
        ample: Option<&[Rat]>,
        qdeg: Rat,
        tord: u32,
        yord: u32,
        chi: Option<&[Rat]>,
    ) -> Result<Self, SetupError> {
        let rd = RefinedFanData::new(fan, sigma0)?;
        let mori = MoriData::new(&rd, ample)?;
        let mut s: Vec<NVec> = fan.rays.iter().map(|r| fan.reduce(r)).collect();
        for l in ext {
            if l.len() != fan.dim_n() {
                return Err(SetupError::BadExt(l.clone(), "wrong length".into()));
            }
            let l = fan.reduce(l);
            if !fan.in_support(&l) {
                return Err(SetupError::BadExt(l, "not in the support".into()));
            }
            if l == fan.zero() {
                return Err(SetupError::BadExt(l, "zero is not allowed".into()));
            }
            if s.contains(&l) {
                return Err(SetupError::BadExt(l, "repeats a ray or another extension point".into()));
            }
            s.push(l);
        }
        let model = match chi {
            Some(c) => FixedPointModel::specialized(fan, c).map_err(SetupError::Chi)?,
            None => FixedPointModel::new(fan),
        };
        let profile = Profile { omega: mori.omega.clone(), qdeg, tord, yord };
        let ext = s[fan.m()..].to_vec();
        Ok(MirrorSetup { rd, mori, ext, s, model, profile, psi_cache: RefCell::new(HashMap::new()) })
    }

    pub fn fan(&self) -> &StackyFan {
        &self.rd.fan
    }

    pub fn m(&self) -> usize {
        self.rd.fan.m()
    }

    pub fn g(&self) -> usize {
        self.ext.len()
    }

    pub fn rank(&self) -> usize {
        self.rd.rank()
    }

    pub fn nvars(&self) -> usize {
        self.model.nvars()
    }

    pub fn with_profile(&self, profile: Profile) -> Self {
        let mut s = self.clone();
        s.profile = profile;
        s
    }

    pub fn psi(&self, k: &[i64]) -> Vec<Rat> {
        let k = self.fan().reduce(k);
        if let Some(p) = self.psi_cache.borrow().get(&k) {
            return p.clone();
        }
        let (p, _) = self.fan().psi(&k).expect("lattice point in the support");
        self.psi_cache.borrow_mut().insert(k, p.clone());
        p
    }

    pub fn age(&self, k: &[i64]) -> Rat {
        self.psi(k).iter().sum()
    }

    /// Grading degree of the monomial Q^d t^α y^a: c₁·d + Σ (1 − |l|) a_l.
    pub fn key_degree(&self, key: &SeriesKey) -> Rat {
        let d = self.rd.from_lambda(&key.q);
        let mut s: Rat = d.iter().sum();
        for (l, &a) in self.ext.iter().zip(&key.y) {
            s += (Rat::one() - self.age(l)) * rint(a as i64);
        }
        s
    }

    pub fn zero_series(&self) -> LocSeries {
        LocSeries::new(self.profile.clone(), self.nvars(), self.model.len())
    }

    /// The series with the single coefficient `c` at `key`.
    pub fn zero_series_with(&self, key: &SeriesKey, c: &LocalizedClass) -> LocSeries {
        let mut s = self.zero_series();
        s.add_class(key, c);
        s
    }

    /// u_i(σ) as a polynomial of the model.
    fn u(&self, cone: usize, i: usize) -> MPoly {
        self.model.weight_poly(cone, i)
    }

    /// K^G_k within the profile.
    pub fn enumerate_k(&self, k: &[i64]) -> Vec<HypIndex> {
        let m = self.m();
        let pk = self.psi(k);
        let gpsi: Vec<Vec<Rat>> = self.ext.iter().map(|l| self.psi(l)).collect();
        let mut out = Vec::new();
        for q in self.mori.enumerate_effective(&self.profile.qdeg) {
            let d = self.rd.from_lambda(&q);
            for a in multi_indices(self.g(), self.profile.yord) {
                let lambda: Vec<Rat> = (0..m)
                    .map(|i| {
                        let mut x = &d[i] - &pk[i];
                        for (p, &al) in gpsi.iter().zip(&a) {
                            x -= &p[i] * rint(al as i64);
                        }
                        x
                    })
                    .collect();
                if let Some(h) = self.index_from_lambda(k, lambda, a, q.clone()) {
                    out.push(h);
                }
            }
        }
        out
    }

    /// Accepts λ when its fractional support is a cone; the balance condition
    /// holds by construction of λ from d.
    pub fn index_from_lambda(&self, k: &[i64], lambda: Vec<Rat>, a: Vec<u32>, q: Vec<i64>) -> Option<HypIndex> {
        let fan = self.fan();
        let fr: Vec<usize> = (0..self.m()).filter(|&i| !is_integral(&lambda[i])).collect();
        if !fan.is_cone(&fr) {
            return None;
        }
        let mut v = fan.reduce(k);
        for (i, x) in lambda.iter().enumerate() {
            let c = to_i64(&ceil_rat(x));
            if c != 0 {
                v = fan.add(&v, &fan.scale(&fan.rays[i], c));
            }
        }
        for (l, &al) in self.ext.iter().zip(&a) {
            if al != 0 {
                v = fan.add(&v, &fan.scale(l, al as i64));
            }
        }
        Some(HypIndex { lambda, a, q, v })
    }

    /// The Box_λ factor restricted to the maximal cone `cone`.
    pub fn hyp_factor(&self, h: &HypIndex, cone: usize) -> RatFn {
        let nv = self.nvars();
        let z = MPoly::var(nv, 0);
        let mut num = MPoly::one(nv);
        let mut dens: Vec<MPoly> = Vec::new();
        for (i, lam) in h.lambda.iter().enumerate() {
            let u = self.u(cone, i);
            if lam.is_positive() {
                let mut c = lam.clone();
                while c.is_positive() {
                    dens.push(&u + &z.scale(&c));
                    c -= Rat::one();
                }
            } else if lam.is_negative() {
                let mut c = lam + Rat::one();
                while !c.is_positive() {
                    let f = &u + &z.scale(&c);
                    if f.is_zero() {
                        return RatFn::zero(nv);
                    }
                    num = &num * &f;
                    c += Rat::one();
                }
            }
        }
        let mut zpow = 0u32;
        for &al in &h.a {
            num = num.scale(&(Rat::one() / Rat::from_integer(factorial(al))));
            zpow += al;
        }
        if zpow > 0 {
            dens.push(z.pow(zpow));
        }
        let mut r = RatFn::from_poly(num);
        for d in &dens {
            assert!(!d.is_zero(), "vanishing hypergeometric denominator");
            r = r.div_poly(d, &[]);
        }
        r
    }

    /// Loc(w_k ω) truncated to the profile.
    pub fn loc_series(&self, k: &[i64]) -> LocSeries {
        let nv = self.nvars();
        let m = self.m();
        let model = &self.model;
        let zinv = RatFn::z(nv).inv();
        let ts = multi_indices(m, self.profile.tord);
        let mut out = self.zero_series();
        for h in self.enumerate_k(k) {
            for (idx, key) in model.keys.iter().enumerate() {
                if key.v != h.v {
                    continue;
                }
                let base = self.hyp_factor(&h, key.cone);
                if base.is_zero() {
                    continue;
                }
                // e^{Σ (λ_i + u_i(σ)/z) t_i}
                let rates: Vec<RatFn> = (0..m)
                    .map(|i| &RatFn::constant(nv, h.lambda[i].clone()) + &(&RatFn::from_poly(self.u(key.cone, i)) * &zinv))
                    .collect();
                for t in &ts {
                    let mut c = base.clone();
                    for (i, &e) in t.iter().enumerate() {
                        if e > 0 {
                            c = &c * &rates[i].pow(e);
                            c = c.scale(&(Rat::one() / Rat::from_integer(factorial(e))));
                        }
                    }
                    let sk = SeriesKey { q: h.q.clone(), t: t.clone(), y: h.a.clone() };
                    out.add_value(&sk, idx, &c);
                }
            }
        }
        out
    }

    /// Loc⁰(w_k ω): the single surviving summand at Q = 0, t = 0, y = 0.
    pub fn loc_zero(&self, k: &[i64]) -> LocalizedClass {
        let fan = self.fan();
        let psi = self.psi(k);
        let lambda: Vec<Rat> = psi.iter().map(|x| -x).collect();
        let h = self
            .index_from_lambda(k, lambda, vec![0; self.g()], vec![0; self.rank()])
            .expect("fractional support of Ψ(k) is a cone");
        let mut out = self.model.zero_class();
        for (idx, key) in self.model.keys.iter().enumerate() {
            if key.v == fan.reduce(&h.v) {
                out.values[idx] = self.hyp_factor(&h, key.cone);
            }
        }
        out
    }

    /// I = z·Loc(w₀ω) in the (Q, t, y) coordinates of `loc_series`.
    pub fn ifunction(&self) -> LocSeries {
        self.loc_series(&self.fan().zero()).scale(&RatFn::z(self.nvars()))
    }

    /// Localized value of ξ̂ = Σ_i ξ̂_i u_i for a functional on ℚ^m.
    pub fn functional_class(&self, xi: &[Rat]) -> LocalizedClass {
        let nv = self.nvars();
        let values = self
            .model
            .keys
            .iter()
            .map(|key| {
                let mut p = MPoly::zero(nv);
                for (i, c) in xi.iter().enumerate() {
                    if !c.is_zero() {
                        p = &p + &self.u(key.cone, i).scale(c);
                    }
                }
                RatFn::from_poly(p)
            })
            .collect();
        LocalizedClass { values }
    }

    /// The class u_i.
    pub fn u_class(&self, i: usize) -> LocalizedClass {
        let mut xi = vec![Rat::zero(); self.m()];
        xi[i] = Rat::one();
        self.functional_class(&xi)
    }

    /// Q^{d(k,l)} times Loc(w_{k+l}) times y_l (y_i = e^{t_i} for rays).
    fn shifted_loc(&self, k: &[i64], j: usize, with_y: bool, cache: &mut HashMap<NVec, LocSeries>) -> LocSeries {
        let fan = self.fan();
        let l = &self.s[j];
        let q = self.rd.dclass(k, l).expect("d(k,l) lies in the curve lattice");
        let kl = fan.add(k, l);
        let base = cache.entry(kl.clone()).or_insert_with(|| self.loc_series(&kl)).clone();
        let mut key = SeriesKey::zero(self.rank(), self.m(), self.g());
        key.q = q;
        let mut r = base.shift(&key);
        if with_y {
            if j < self.m() {
                r = r.mul_exp_t(j, &Rat::one());
            } else {
                let mut ky = SeriesKey::zero(self.rank(), self.m(), self.g());
                ky.y[j - self.m()] = 1;
                r = r.shift(&ky);
            }
        }
        r
    }

    /// Checks the differential equations satisfied by Loc on every k of `window`.
    pub fn verify_loc_ode(&self, window: &[NVec]) -> LocOdeReport {
        let nv = self.nvars();
        let m = self.m();
        let z = RatFn::z(nv);
        let mut cache: HashMap<NVec, LocSeries> = HashMap::new();
        let mut rep = LocOdeReport::default();
        for k in window {
            let k = self.fan().reduce(k);
            let base = cache.entry(k.clone()).or_insert_with(|| self.loc_series(&k)).clone();
            // Q directions: z∇_{ξQ∂Q} w_k = z(ξ·λ(k)) w_k + Σ_l (ξ·λ(l)) y_l Q^{d(k,l)} w_{k+l}
            let lk = self.rd.lambda_of(&k).expect("λ(k) lies in the curve lattice");
            for b in 0..self.rank() {
                let mut xi = vec![Rat::zero(); self.rank()];
                xi[b] = Rat::one();
                let hat = self.functional_class(&self.rd.lift_functional(&xi));
                let mut lhs = base.scale(&z.scale(&rint(lk[b])));
                for j in 0..self.s.len() {
                    let ll = self.rd.lambda_of(&self.s[j]).expect("λ(l) lies in the curve lattice");
                    if ll[b] != 0 {
                        lhs = lhs.add(&self.shifted_loc(&k, j, true, &mut cache).scale_rat(&rint(ll[b])));
                    }
                }
                let rhs = base.q_derivative(&xi).scale(&z).add(&base.times_class(&hat));
                rep.checked += 1;
                if let Some(key) = lhs.first_difference(&rhs, |_| true) {
                    rep.failure.get_or_insert(format!("Q-direction {} at k={:?}, key {:?}", b + 1, k, key));
                }
            }
            // y and t directions
            for j in 0..self.s.len() {
                let lhs = self.shifted_loc(&k, j, j < m, &mut cache);
                let (rhs, ok): (LocSeries, Box<dyn Fn(&SeriesKey) -> bool>) = if j < m {
                    let tord = self.profile.tord;
                    (base.t_derivative(j).scale(&z), Box::new(move |key: &SeriesKey| key.t_order() < tord))
                } else {
                    let yord = self.profile.yord;
                    (base.y_derivative(j - m).scale(&z), Box::new(move |key: &SeriesKey| key.y_order() < yord))
                };
                rep.checked += 1;
                if let Some(key) = lhs.first_difference(&rhs, ok) {
                    rep.failure.get_or_insert(format!("direction {} at k={:?}, key {:?}", j + 1, k, key));
                }
            }
            if !self.model.is_specialized() {
                rep.checked += 1;
                if let Some(msg) = self.homogeneity_violation(&base, &self.age(&k)) {
                    rep.failure.get_or_insert(format!("grading at k={:?}: {}", k, msg));
                }
            }
        }
        rep
    }

    /// Every nonzero coefficient at (key, σ, v) must be homogeneous of degree
    /// `total` − deg(key) − age(v), counting z and χ with degree 1.
    pub fn homogeneity_violation(&self, s: &LocSeries, total: &Rat) -> Option<String> {
        for (key, cls) in &s.coeffs {
            let kd = self.key_degree(key);
            for (idx, val) in cls.values.iter().enumerate() {
                if val.is_zero() {
                    continue;
                }
                let want = total - &kd - self.age(&self.model.keys[idx].v);
                let got = val.homogeneous_degree().map(|d| rint(d));
                if got.as_ref() != Some(&want) {
                    return Some(format!("key {:?} sector {}: degree {:?}, expected {}", key, idx, got, want));
                }
            }
        }
        None
    }

    /// Galois phases: for every nonzero coefficient and every generator ξ of Pic^st,
    /// phase(key) + age_ξ(v) ≡ `expected(ξ)` mod 1.
    pub fn galois_violation(&self, s: &LocSeries, expected: &dyn Fn(&[BigInt]) -> Rat) -> Option<String> {
        let ap = AgePairing::new(&self.rd);
        for xi in &ap.generators {
            let want = frac(&expected(xi));
            for (key, cls) in &s.coeffs {
                let ph = ap.key_phase(&self.rd, xi, &key.q, &self.ext, &key.y);
                for (idx, val) in cls.values.iter().enumerate() {
                    if val.is_zero() {
                        continue;
                    }
                    let v = &self.model.keys[idx].v;
                    let got = frac(&(&ph + ap.age(xi, &self.psi(v), v)));
                    if got != want {
                        return Some(format!("generator {:?}, key {:?}, sector {:?}: phase {} expected {}", xi, key, v, got, want));
                    }
                }
            }
        }
        None
    }

    /// Galois check of Loc(w_k ω): the sector phases must match that of w_k.
    pub fn galois_check_loc(&self, k: &[i64]) -> Option<String> {
        let s = self.loc_series(k);
        let ap = AgePairing::new(&self.rd);
        let pk = self.psi(k);
        let k = self.fan().reduce(k);
        self.galois_violation(&s, &|xi| ap.age(xi, &pk, &k))
    }

    /// 0, Box elements, S: the points on which the ODE checks run by default.
    pub fn default_window(&self) -> Vec<NVec> {
        let mut w = vec![self.fan().zero()];
        for b in self.fan().box_elements() {
            if !w.contains(&b.v) {
                w.push(b.v.clone());
            }
        }
        for l in &self.s {
            if !w.contains(l) {
                w.push(l.clone());
            }
        }
        w
    }
}

#[derive(Clone, Debug, Default)]
pub struct LocOdeReport {
    pub checked: usize,
    pub failure: Option<String>,
}

impl LocOdeReport {
    pub fn ok(&self) -> bool {
        self.failure.is_none()
    }
}

impl LocSeries {
    pub fn new(profile: Profile, nvars: usize, width: usize) -> Self {
        LocSeries { profile, nvars, width, coeffs: BTreeMap::new() }
    }

    fn zero_class(&self) -> LocalizedClass {
        LocalizedClass { values: vec![RatFn::zero(self.nvars); self.width] }
    }

    pub fn get(&self, key: &SeriesKey) -> LocalizedClass {
        self.coeffs.get(key).cloned().unwrap_or_else(|| self.zero_class())
    }

    pub fn add_value(&mut self, key: &SeriesKey, idx: usize, c: &RatFn) {
        if c.is_zero() || !self.profile.contains(key) {
            return;
        }
        let z = self.zero_class();
        let e = self.coeffs.entry(key.clone()).or_insert(z);
        e.values[idx] = &e.values[idx] + c;
    }

    pub fn add_class(&mut self, key: &SeriesKey, c: &LocalizedClass) {
        if !self.profile.contains(key) {
            return;
        }
        let z = self.zero_class();
        let e = self.coeffs.entry(key.clone()).or_insert(z);
        *e = e.add(c);
        if e.is_zero() {
            self.coeffs.remove(key);
        }
    }

    fn map(&self, f: impl Fn(&SeriesKey, &LocalizedClass) -> Option<(SeriesKey, LocalizedClass)>) -> Self {
        let mut out = LocSeries::new(self.profile.clone(), self.nvars, self.width);
        for (k, c) in &self.coeffs {
            if let Some((k2, c2)) = f(k, c) {
                out.add_class(&k2, &c2);
            }
        }
        out.prune();
        out
    }

    fn prune(&mut self) {
        self.coeffs.retain(|_, c| !c.is_zero());
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &o.coeffs {
            out.add_class(k, c);
        }
        out.prune();
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale_rat(&-Rat::one()))
    }

    pub fn scale(&self, c: &RatFn) -> Self {
        self.map(|k, v| Some((k.clone(), v.scale(c))))
    }

    pub fn scale_rat(&self, c: &Rat) -> Self {
        self.scale(&RatFn::constant(self.nvars, c.clone()))
    }

    /// Pointwise product with a fixed-point class.
    pub fn times_class(&self, c: &LocalizedClass) -> Self {
        self.map(|k, v| Some((k.clone(), v.times(c))))
    }

    /// Multiply by the monomial `by` (non-negative t and y parts).
    pub fn shift(&self, by: &SeriesKey) -> Self {
        self.map(|k, v| Some((k.add(by), v.clone())))
    }

    /// Multiply by e^{e·t_i}.
    pub fn mul_exp_t(&self, i: usize, e: &Rat) -> Self {
        let mut out = LocSeries::new(self.profile.clone(), self.nvars, self.width);
        for (k, c) in &self.coeffs {
            let mut pw = Rat::one();
            let mut key = k.clone();
            let mut j = 0u32;
            while self.profile.contains(&key) {
                out.add_class(&key, &c.scale(&RatFn::constant(self.nvars, pw.clone() / Rat::from_integer(factorial(j)))));
                j += 1;
                pw *= e;
                key.t[i] += 1;
            }
        }
        out.prune();
        out
    }

    /// Σ_b ξ_b q_b times each coefficient (the derivation ξQ∂_Q).
    pub fn q_derivative(&self, xi: &[Rat]) -> Self {
        self.map(|k, v| {
            let w: Rat = xi.iter().zip(&k.q).map(|(a, &b)| a * rint(b)).sum();
            Some((k.clone(), v.scale(&RatFn::constant(self.nvars, w))))
        })
    }

    pub fn t_derivative(&self, i: usize) -> Self {
        self.map(|k, v| {
            if k.t[i] == 0 {
                return None;
            }
            let mut k2 = k.clone();
            k2.t[i] -= 1;
            Some((k2, v.scale(&RatFn::constant(self.nvars, rint(k.t[i] as i64)))))
        })
    }

    pub fn y_derivative(&self, l: usize) -> Self {
        self.map(|k, v| {
            if k.y[l] == 0 {
                return None;
            }
            let mut k2 = k.clone();
            k2.y[l] -= 1;
            Some((k2, v.scale(&RatFn::constant(self.nvars, rint(k.y[l] as i64)))))
        })
    }

    /// Restriction to t = 0.
    pub fn at_t_zero(&self) -> Self {
        self.map(|k, v| if k.t_order() == 0 { Some((k.clone(), v.clone())) } else { None })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| c.is_zero())
    }

    /// First key (among those accepted by `filter`) where the two series differ.
    pub fn first_difference(&self, o: &Self, filter: impl Fn(&SeriesKey) -> bool) -> Option<SeriesKey> {
        let mut keys: Vec<&SeriesKey> = self.coeffs.keys().chain(o.coeffs.keys()).collect();
        keys.sort_by(|a, b| self.profile.weight(a).cmp(&self.profile.weight(b)).then_with(|| a.cmp(b)));
        keys.dedup();
        keys.into_iter().find(|k| filter(k) && self.get(k) != o.get(k)).cloned()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;
    use crate::stackyfan::tests::{c2mu2, p1, p12, p2};

    fn setup(fan: &StackyFan, ext: &[NVec], q: i64, t: u32, y: u32) -> MirrorSetup {
        MirrorSetup::new(fan, 0, ext, None, rint(q), t, y, None).unwrap()
    }

    fn key(q: &[i64], t: &[u32], y: &[u32]) -> SeriesKey {
        SeriesKey { q: q.to_vec(), t: t.to_vec(), y: y.to_vec() }
    }

    #[test]
    fn p1_index_set_and_first_coefficient() {
        let s = setup(&p1(), &[], 3, 0, 0);
        let ks = s.enumerate_k(&[0]);
        let lams: Vec<Vec<Rat>> = ks.iter().map(|h| h.lambda.clone()).collect();
        assert_eq!(lams, (0..=3).map(|d| vec![rint(d), rint(d)]).collect::<Vec<_>>());
        let loc = s.loc_series(&[0]);
        let c = loc.get(&key(&[1], &[0, 0], &[]));
        let idx = s.model.keys.iter().position(|k| s.fan().max_cones[k.cone] == vec![0]).unwrap();
        let nv = s.nvars();
        let chi = RatFn::var(nv, 1);
        let z = RatFn::z(nv);
        let want = (&(&chi + &z) * &z).inv();
        // u_1 = χ at the fixed point of the cone {b_1}
        assert_eq!(s.model.weight(s.model.keys[idx].cone, 0), chi);
        assert_eq!(c.values[idx], want);
    }

    #[test]
    fn p12_twisted_summand() {
        let s = setup(&p12(), &[vec![1]], 0, 0, 1);
        let ks = s.enumerate_k(&[0]);
        let h = ks.iter().find(|h| h.a == vec![1]).unwrap();
        assert_eq!(h.lambda, vec![rat(-1, 2), rint(0)]);
        assert_eq!(h.v, vec![1]);
        let loc = s.loc_series(&[0]);
        let c = loc.get(&key(&[0], &[0, 0], &[1]));
        let nv = s.nvars();
        for (idx, k) in s.model.keys.iter().enumerate() {
            let want = if k.v == vec![1] { RatFn::z(nv).inv() } else { RatFn::zero(nv) };
            assert_eq!(c.values[idx], want);
        }
    }

    #[test]
    fn loc_zero_matches_phi_classes() {
        for fan in [p1(), p12(), c2mu2(), p2()] {
            let s = setup(&fan, &[], 1, 0, 0);
            assert_eq!(s.loc_zero(&fan.zero()), s.model.one_class());
            for (i, r) in fan.rays.iter().enumerate() {
                assert_eq!(s.loc_zero(r), s.model.phi_class(r).unwrap(), "ray {}", i);
            }
            for b in fan.box_elements() {
                assert_eq!(s.loc_zero(&b.v), s.model.phi_class(&b.v).unwrap());
            }
            // Loc⁰ is the constant coefficient of Loc
            for k in s.default_window() {
                let loc = s.loc_series(&k);
                assert_eq!(loc.get(&SeriesKey::zero(s.rank(), s.m(), 0)), s.loc_zero(&k));
            }
        }
    }

    #[test]
    fn loc_odes_hold() {
        let s = setup(&p1(), &[], 3, 1, 0);
        let r = s.verify_loc_ode(&s.default_window());
        assert!(r.ok(), "{:?}", r.failure);
        let s = setup(&p12(), &[vec![1]], 2, 0, 3);
        let r = s.verify_loc_ode(&s.default_window());
        assert!(r.ok(), "{:?}", r.failure);
        let s = setup(&c2mu2(), &[vec![1, 1]], 0, 1, 3);
        let r = s.verify_loc_ode(&s.default_window());
        assert!(r.ok(), "{:?}", r.failure);
        let s = setup(&p12(), &[vec![1]], 0, 0, 0);
        assert!(s.verify_loc_ode(&s.default_window()).ok());
    }

    #[test]
    fn specialized_loc_odes_hold() {
        let s = MirrorSetup::new(&p12(), 0, &[vec![1]], None, rint(2), 1, 2, Some(&[rat(3, 1)])).unwrap();
        let r = s.verify_loc_ode(&s.default_window());
        assert!(r.ok(), "{:?}", r.failure);
        assert!(MirrorSetup::new(&p12(), 0, &[], None, rint(1), 0, 0, Some(&[rint(0)])).is_err());
    }

    #[test]
    fn ifunction_and_galois() {
        let s = setup(&p12(), &[vec![1]], 2, 0, 3);
        let i = s.ifunction();
        assert_eq!(i.get(&key(&[0], &[0, 0], &[0])), s.model.one_class().scale(&RatFn::z(s.nvars())));
        assert!(s.homogeneity_violation(&i, &rint(1)).is_none());
        for k in s.default_window() {
            assert_eq!(s.galois_check_loc(&k), None);
        }
        let s = setup(&c2mu2(), &[vec![1, 1]], 0, 0, 4);
        for k in s.default_window() {
            assert_eq!(s.galois_check_loc(&k), None);
        }
    }

    #[test]
    fn bad_extension_points() {
        assert!(MirrorSetup::new(&p1(), 0, &[vec![1]], None, rint(1), 0, 0, None).is_err());
        assert!(MirrorSetup::new(&p1(), 0, &[vec![0]], None, rint(1), 0, 0, None).is_err());
    }
}
