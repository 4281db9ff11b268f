use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{MPoly, Rat};

/// Rational function over Rat in the variables (z, chi_1, ..., chi_n).
/// Variable 0 is always z. The denominator is kept as a list of normalized,
/// pairwise distinct, non-constant factors with multiplicities; constants
/// live in the numerator.
#[derive(Clone, Debug)]
pub struct RatFn {
    num: MPoly,
    den: Vec<(MPoly, u32)>,
}

/// Polynomial / proper decomposition in z.
#[derive(Clone, Debug)]
pub struct ZSplit {
    pub pol: RatFn,
    pub prop: RatFn,
}

pub fn var_names(nvars: usize) -> Vec<String> {
    (0..nvars).map(|i| if i == 0 { "z".to_string() } else { format!("chi{}", i) }).collect()
}

/// f = c * g with g normalized: monic in z when z occurs with a constant
/// leading coefficient, otherwise lex-leading coefficient 1.
fn normalize_factor(f: &MPoly) -> (Rat, MPoly) {
    let c = if f.depends_on(0) {
        let lc = f.coeff_in(0, f.degree_in(0));
        match lc.constant_value() {
            Some(c) => c,
            None => lc.leading().map(|(_, c)| c.clone()).unwrap(),
        }
    } else {
        f.leading().map(|(_, c)| c.clone()).expect("zero factor")
    };
    (c.clone(), f.scale(&(Rat::one() / c)))
}

/// Split p into constant * product of candidate factors * remainder factor.
fn factor_against(p: &MPoly, candidates: &[&MPoly]) -> (Rat, Vec<(MPoly, u32)>) {
    let mut rest = p.clone();
    let mut out: Vec<(MPoly, u32)> = Vec::new();
    for f in candidates {
        let mut e = 0;
        while !rest.is_constant() {
            match rest.div_exact(f) {
                Some(q) => {
                    rest = q;
                    e += 1;
                }
                None => break,
            }
        }
        if e > 0 {
            push_factor(&mut out, (*f).clone(), e);
        }
    }
    // monomial content of z-dependent remainders whose z-leading coefficient is not constant
    if rest.depends_on(0) {
        let lc = rest.coeff_in(0, rest.degree_in(0));
        if lc.constant_value().is_none() {
            for j in 0..rest.nvars() {
                let xj = MPoly::var(rest.nvars(), j);
                let mut e = 0;
                while let Some(q) = rest.div_exact(&xj) {
                    if rest.is_constant() {
                        break;
                    }
                    rest = q;
                    e += 1;
                }
                if e > 0 {
                    push_factor(&mut out, xj, e);
                }
            }
        }
    }
    if rest.is_constant() {
        return (rest.constant_value().unwrap(), out);
    }
    let (c, g) = normalize_factor(&rest);
    push_factor(&mut out, g, 1);
    (c, out)
}

fn push_factor(list: &mut Vec<(MPoly, u32)>, f: MPoly, e: u32) {
    if e == 0 {
        return;
    }
    if let Some(slot) = list.iter_mut().find(|(g, _)| *g == f) {
        slot.1 += e;
    } else {
        list.push((f, e));
    }
}

impl RatFn {
    pub fn from_poly(num: MPoly) -> Self {
        RatFn { num, den: Vec::new() }
    }

    pub fn zero(nvars: usize) -> Self {
        Self::from_poly(MPoly::zero(nvars))
    }

    pub fn one(nvars: usize) -> Self {
        Self::from_poly(MPoly::one(nvars))
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        Self::from_poly(MPoly::constant(nvars, c))
    }

    pub fn z(nvars: usize) -> Self {
        Self::from_poly(MPoly::var(nvars, 0))
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::from_poly(MPoly::var(nvars, i))
    }

    /// num / den where den is an arbitrary nonzero polynomial.
    pub fn from_parts(num: MPoly, den: &MPoly) -> Self {
        RatFn::from_poly(num).div_poly(den, &[])
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn numer(&self) -> &MPoly {
        &self.num
    }

    pub fn den_factors(&self) -> &[(MPoly, u32)] {
        &self.den
    }

    pub fn den_poly(&self) -> MPoly {
        let mut d = MPoly::one(self.nvars());
        for (f, e) in &self.den {
            d = &d * &f.pow(*e);
        }
        d
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_empty() && self.num == MPoly::one(self.nvars())
    }

    pub fn constant_value(&self) -> Option<Rat> {
        if self.den.is_empty() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn depends_on_z(&self) -> bool {
        self.num.depends_on(0) || self.den.iter().any(|(f, _)| f.depends_on(0))
    }

    pub fn is_z_polynomial(&self) -> bool {
        self.den.iter().all(|(f, _)| !f.depends_on(0))
    }

    fn cancel(mut self) -> Self {
        if self.num.is_zero() {
            self.den.clear();
            return self;
        }
        for (f, e) in self.den.iter_mut() {
            while *e > 0 {
                match self.num.div_exact(f) {
                    Some(q) => {
                        self.num = q;
                        *e -= 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|(_, e)| *e > 0);
        self
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars());
        }
        RatFn { num: self.num.scale(c), den: self.den.clone() }
    }

    /// Multiply by a polynomial.
    pub fn mul_poly(&self, p: &MPoly) -> Self {
        RatFn { num: &self.num * p, den: self.den.clone() }.cancel()
    }

    /// Divide by a nonzero polynomial, factoring it against the existing
    /// denominator factors and the supplied hints.
    pub fn div_poly(&self, p: &MPoly, hints: &[MPoly]) -> Self {
        assert!(!p.is_zero(), "division by zero");
        let mut cands: Vec<&MPoly> = self.den.iter().map(|(f, _)| f).collect();
        cands.extend(hints.iter());
        let (c, fs) = factor_against(p, &cands);
        let mut den = self.den.clone();
        for (f, e) in fs {
            push_factor(&mut den, f, e);
        }
        RatFn { num: self.num.scale(&(Rat::one() / c)), den }.cancel()
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        RatFn::from_poly(self.den_poly()).div_poly(&self.num, &[])
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = Self::one(self.nvars());
        for _ in 0..k {
            r = &r * self;
        }
        r
    }

    /// z -> -z.
    pub fn negate_z(&self) -> Self {
        let mut num = self.num.negate_var(0);
        let mut den = Vec::new();
        for (f, e) in &self.den {
            let (c, g) = normalize_factor(&f.negate_var(0));
            num = num.scale(&(Rat::one() / c.pow(*e as i32)));
            push_factor(&mut den, g, *e);
        }
        RatFn { num, den }
    }

    /// Degree of a nonzero z-free homogeneous function, None otherwise.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let mut d = self.num.homogeneous_degree()? as i64;
        for (f, e) in &self.den {
            d -= f.homogeneous_degree()? as i64 * *e as i64;
        }
        Some(d)
    }

    /// Polynomial and proper parts with respect to z.
    pub fn split(&self) -> ZSplit {
        let nv = self.nvars();
        let mut dz = MPoly::one(nv);
        let mut dchi = Vec::new();
        for (f, e) in &self.den {
            if f.depends_on(0) {
                dz = &dz * &f.pow(*e);
            } else {
                dchi.push((f.clone(), *e));
            }
        }
        if dz.is_constant() {
            return ZSplit { pol: self.clone(), prop: Self::zero(nv) };
        }
        let (q, r) = self.num.div_rem_in(0, &dz);
        ZSplit {
            pol: RatFn { num: q, den: dchi }.cancel(),
            prop: RatFn { num: r, den: self.den.clone() }.cancel(),
        }
    }

    /// Coefficients of a z-polynomial, from z^0 upward.
    pub fn z_coeffs(&self) -> Vec<RatFn> {
        assert!(self.is_z_polynomial(), "not polynomial in z");
        let dchi = RatFn { num: MPoly::one(self.nvars()), den: self.den.clone() };
        self.num
            .coeffs_in(0)
            .into_iter()
            .map(|c| dchi.mul_poly(&c))
            .collect()
    }

    /// Laurent coefficients at z = 0 from the pole order up to z^order.
    pub fn expand_at_zero(&self, order: i64) -> Vec<(i64, RatFn)> {
        let nv = self.nvars();
        if self.is_zero() {
            return vec![];
        }
        let mut shift: i64 = 0;
        let mut zfactors: Vec<(MPoly, u32)> = Vec::new();
        let mut dchi = RatFn::one(nv);
        for (f, e) in &self.den {
            if f.depends_on(0) {
                let cs = f.coeffs_in(0);
                let v = cs.iter().position(|c| !c.is_zero()).unwrap();
                shift -= (v as i64) * (*e as i64);
                let g = f.coeffs_in(0)[v..].iter().enumerate().fold(MPoly::zero(nv), |acc, (k, c)| {
                    &acc + &c.times_var_pow(0, k as u32)
                });
                zfactors.push((g, *e));
            } else {
                dchi = dchi.div_poly(f, &[]);
                if *e > 1 {
                    for _ in 1..*e {
                        dchi = dchi.div_poly(f, &[]);
                    }
                }
            }
        }
        let need = order - shift;
        if need < 0 {
            return vec![];
        }
        let need = need as usize;
        let to_rf = |p: &MPoly| RatFn::from_poly(p.clone());
        let mut series: Vec<RatFn> = (0..=need)
            .map(|k| to_rf(&self.num.coeff_in(0, k as u32)))
            .collect();
        for (g, e) in &zfactors {
            let gc: Vec<MPoly> = (0..=need).map(|k| g.coeff_in(0, k as u32)).collect();
            let g0 = &gc[0];
            let mut inv: Vec<RatFn> = Vec::with_capacity(need + 1);
            inv.push(RatFn::one(nv).div_poly(g0, &[]));
            for k in 1..=need {
                let mut s = RatFn::zero(nv);
                for j in 1..=k {
                    if !gc[j].is_zero() {
                        s = &s + &inv[k - j].mul_poly(&gc[j]);
                    }
                }
                inv.push((-&s).div_poly(g0, &[]));
            }
            for _ in 0..*e {
                series = (0..=need)
                    .map(|k| {
                        let mut acc = RatFn::zero(nv);
                        for j in 0..=k {
                            if !series[j].is_zero() && !inv[k - j].is_zero() {
                                acc = &acc + &(&series[j] * &inv[k - j]);
                            }
                        }
                        acc
                    })
                    .collect();
            }
        }
        series
            .into_iter()
            .enumerate()
            .map(|(k, c)| (k as i64 + shift, &c * &dchi))
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }

    /// Substitute values for variables 1..; the result lives in the ring with z only.
    pub fn specialize(&self, values: &[Rat]) -> Option<RatFn> {
        let sub = |p: &MPoly| {
            let mut q = p.clone();
            for (j, v) in values.iter().enumerate() {
                q = q.subst(j + 1, &MPoly::constant(p.nvars(), v.clone()));
            }
            let map: Vec<usize> = (0..p.nvars()).map(|i| if i == 0 { 0 } else { 0 }).collect();
            q.remap(1, &map)
        };
        let mut r = RatFn::from_poly(sub(&self.num));
        for (f, e) in &self.den {
            let g = sub(f);
            if g.is_zero() {
                return None;
            }
            for _ in 0..*e {
                r = r.div_poly(&g, &[]);
            }
        }
        Some(r)
    }

    /// Value at s = 0 after substituting chi = s * dir into a z-free function.
    pub fn limit_along(&self, dir: &[Rat]) -> Result<Rat, String> {
        assert!(!self.depends_on_z(), "limit of z-dependent entry");
        let line = |p: &MPoly| -> MPoly {
            let nv = p.nvars();
            let mut q = MPoly::zero(1);
            for (e, c) in p.terms() {
                let mut coeff = c.clone();
                let mut deg = 0u32;
                for j in 1..nv {
                    for _ in 0..e[j] {
                        coeff *= &dir[j - 1];
                    }
                    deg += e[j];
                }
                q = &q + &MPoly::monomial(vec![deg], coeff);
            }
            q
        };
        let low = |p: &MPoly| -> (u32, Rat) {
            let mut best: Option<(u32, Rat)> = None;
            for (e, c) in p.terms() {
                if best.as_ref().map_or(true, |(d, _)| e[0] < *d) {
                    best = Some((e[0], c.clone()));
                }
            }
            best.expect("zero polynomial on line")
        };
        let n = line(&self.num);
        if n.is_zero() {
            return Ok(Rat::zero());
        }
        let (vn, cn) = low(&n);
        let (mut vd, mut cd) = (0u32, Rat::one());
        for (f, e) in &self.den {
            let g = line(f);
            if g.is_zero() {
                return Err("denominator vanishes on the chosen line".into());
            }
            let (v, c) = low(&g);
            vd += v * e;
            cd *= c.pow(*e as i32);
        }
        if vn > vd {
            Ok(Rat::zero())
        } else if vn == vd {
            Ok(cn / cd)
        } else {
            Err("pole at the origin".into())
        }
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        let n = self.num.fmt_with(names);
        if self.den.is_empty() {
            return n;
        }
        let d: Vec<String> = self
            .den
            .iter()
            .map(|(f, e)| {
                let s = f.fmt_with(names);
                let s = if f.num_terms() > 1 { format!("({})", s) } else { s };
                if *e > 1 { format!("{}^{}", s, e) } else { s }
            })
            .collect();
        let n = if self.num.num_terms() > 1 { format!("({})", n) } else { n };
        format!("{}/({})", n, d.join("*"))
    }

    pub fn to_string_std(&self) -> String {
        self.fmt_with(&var_names(self.nvars()))
    }
}

impl PartialEq for RatFn {
    fn eq(&self, o: &RatFn) -> bool {
        (self - o).is_zero()
    }
}

impl Add for &RatFn {
    type Output = RatFn;
    fn add(self, o: &RatFn) -> RatFn {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.clone();
        }
        let mut den: Vec<(MPoly, u32)> = self.den.clone();
        for (f, e) in &o.den {
            if let Some(slot) = den.iter_mut().find(|(g, _)| g == f) {
                slot.1 = slot.1.max(*e);
            } else {
                den.push((f.clone(), *e));
            }
        }
        let cofactor = |mine: &[(MPoly, u32)]| {
            let mut p = MPoly::one(self.nvars());
            for (f, e) in &den {
                let have = mine.iter().find(|(g, _)| g == f).map_or(0, |x| x.1);
                if *e > have {
                    p = &p * &f.pow(e - have);
                }
            }
            p
        };
        let num = &(&self.num * &cofactor(&self.den)) + &(&o.num * &cofactor(&o.den));
        RatFn { num, den }.cancel()
    }
}

impl Sub for &RatFn {
    type Output = RatFn;
    fn sub(self, o: &RatFn) -> RatFn {
        self + &(-o)
    }
}

impl Neg for &RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        RatFn { num: -&self.num, den: self.den.clone() }
    }
}

impl Mul for &RatFn {
    type Output = RatFn;
    fn mul(self, o: &RatFn) -> RatFn {
        if self.is_zero() || o.is_zero() {
            return RatFn::zero(self.nvars());
        }
        let mut den = self.den.clone();
        for (f, e) in &o.den {
            push_factor(&mut den, f.clone(), *e);
        }
        RatFn { num: &self.num * &o.num, den }.cancel()
    }
}

impl Div for &RatFn {
    type Output = RatFn;
    fn div(self, o: &RatFn) -> RatFn {
        assert!(!o.is_zero(), "division by zero");
        let hints: Vec<MPoly> = o.den.iter().map(|(f, _)| f.clone()).collect();
        let mut r = self.div_poly(&o.num, &hints);
        r = r.mul_poly(&o.den_poly());
        r
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_std())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{rat, rint};

    fn z() -> RatFn {
        RatFn::z(2)
    }
    fn chi() -> RatFn {
        RatFn::var(2, 1)
    }
    fn c(x: Rat) -> RatFn {
        RatFn::constant(2, x)
    }

    #[test]
    fn split_long_division() {
        // z^3/(z - chi) -> z^2 + chi z + chi^2, chi^3/(z - chi)
        let r = &z().pow(3) / &(&z() - &chi());
        let s = r.split();
        let expect_pol = &(&z().pow(2) + &(&chi() * &z())) + &chi().pow(2);
        assert_eq!(s.pol, expect_pol);
        assert_eq!(s.prop, &chi().pow(3) / &(&z() - &chi()));
    }

    #[test]
    fn split_already_split() {
        let prop = &c(rint(1)) / &(&z() - &c(rint(1)));
        let r = &z().pow(2) + &prop;
        let s = r.split();
        assert_eq!(s.pol, z().pow(2));
        assert_eq!(s.prop, prop);
    }

    #[test]
    fn split_proper_input() {
        let r = &c(rint(1)) / &(&(&chi() + &z()) * &z());
        let s = r.split();
        assert!(s.pol.is_zero());
        assert_eq!(s.prop, r);
    }

    #[test]
    fn expand_partial_fraction() {
        // 1/((chi+z) z) at order 0 -> z^-1/chi - 1/chi^2
        let r = &c(rint(1)) / &(&(&chi() + &z()) * &z());
        let e = r.expand_at_zero(0);
        assert_eq!(e.len(), 2);
        assert_eq!(e[0].0, -1);
        assert_eq!(e[0].1, &c(rint(1)) / &chi());
        assert_eq!(e[1].0, 0);
        assert_eq!(e[1].1, -&(&c(rint(1)) / &chi().pow(2)));
    }

    #[test]
    fn expand_geometric() {
        let r = &c(rint(1)) / &(&c(rint(1)) - &z());
        let e = r.expand_at_zero(2);
        let coeffs: Vec<Rat> = e.iter().map(|(_, c)| c.constant_value().unwrap()).collect();
        assert_eq!(coeffs, vec![rint(1), rint(1), rint(1)]);
        let id = z().expand_at_zero(3);
        assert_eq!(id.len(), 1);
        assert_eq!(id[0].0, 1);
    }

    #[test]
    fn cancellation_and_equality() {
        let a = &(&z() - &chi()) / &(&z() - &chi());
        assert!(a.is_one());
        let x = &c(rat(1, 2)) / &chi();
        let y = &c(rint(1)) / &chi().scale(&rint(2));
        assert_eq!(x, y);
        let s = &(&c(rint(1)) / &chi()) - &(&c(rint(1)) / &chi());
        assert!(s.is_zero());
    }

    #[test]
    fn negate_z_factor() {
        let r = &c(rint(1)) / &(&z() + &chi());
        let n = r.negate_z();
        assert_eq!(n, &c(rint(-1)) / &(&z() - &chi()));
    }

    #[test]
    fn limit_on_line() {
        let r = &(&chi().pow(2) + &chi()) / &chi();
        assert_eq!(r.limit_along(&[rint(3)]).unwrap(), rint(1));
        let p = &c(rint(1)) / &chi();
        assert!(p.limit_along(&[rint(1)]).is_err());
    }

    #[test]
    fn homogeneity() {
        let r = &(&z() * &chi()) / &(&z() + &chi());
        assert_eq!(r.homogeneous_degree(), Some(1));
        let s = &z() + &c(rint(1));
        assert_eq!(s.homogeneous_degree(), None);
    }
}
