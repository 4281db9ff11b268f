use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::{fmt_rat, Rat};

/// Sparse polynomial over Rat. Exponent vectors ordered lexicographically,
/// so the last entry of `terms` is the lex-leading term.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rat::one())
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, Rat::one())
    }

    pub fn monomial(exps: Vec<u32>, c: Rat) -> Self {
        let mut p = Self::zero(exps.len());
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    /// Linear form c0 + Σ c_i x_i.
    pub fn linear(nvars: usize, c0: Rat, coeffs: &[(usize, Rat)]) -> Self {
        let mut p = Self::constant(nvars, c0);
        for (i, c) in coeffs {
            p = &p + &Self::var(nvars, *i).scale(c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn constant_value(&self) -> Option<Rat> {
        if !self.is_constant() {
            return None;
        }
        Some(self.terms.values().next().cloned().unwrap_or_else(Rat::zero))
    }

    pub fn constant_term(&self) -> Rat {
        self.terms.get(&vec![0; self.nvars]).cloned().unwrap_or_else(Rat::zero)
    }

    fn insert_add(&mut self, e: Vec<u32>, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = Self::one(self.nvars);
        for _ in 0..k {
            r = &r * self;
        }
        r
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    pub fn depends_on(&self, i: usize) -> bool {
        self.terms.keys().any(|e| e[i] > 0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Some(d) when all terms have total degree d; None for inhomogeneous or zero.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|e| e.iter().sum::<u32>());
        let d = it.next()?;
        if it.all(|x| x == d) {
            Some(d)
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<(&Vec<u32>, &Rat)> {
        self.terms.iter().next_back()
    }

    /// Coefficient of x_i^k as a polynomial (x_i removed, exponent set to 0).
    pub fn coeff_in(&self, i: usize, k: u32) -> Self {
        let mut r = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == k {
                let mut e2 = e.clone();
                e2[i] = 0;
                r.terms.insert(e2, c.clone());
            }
        }
        r
    }

    /// Coefficients in x_i, from x_i^0 upward.
    pub fn coeffs_in(&self, i: usize) -> Vec<Self> {
        if self.is_zero() {
            return vec![];
        }
        (0..=self.degree_in(i)).map(|k| self.coeff_in(i, k)).collect()
    }

    pub fn times_var_pow(&self, i: usize, k: u32) -> Self {
        MPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e2 = e.clone();
                    e2[i] += k;
                    (e2, c.clone())
                })
                .collect(),
        }
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut r = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                r.insert_add(e2, c * Rat::from_integer(e[i].into()));
            }
        }
        r
    }

    /// Substitute x_i := value.
    pub fn subst(&self, i: usize, value: &MPoly) -> Self {
        let mut r = Self::zero(self.nvars);
        let mut powers: Vec<MPoly> = vec![Self::one(self.nvars)];
        for (e, c) in &self.terms {
            while powers.len() <= e[i] as usize {
                let next = powers.last().unwrap() * value;
                powers.push(next);
            }
            let mut e2 = e.clone();
            e2[i] = 0;
            let mono = Self::monomial(e2, c.clone());
            r = &r + &(&mono * &powers[e[i] as usize]);
        }
        r
    }

    /// Substitute x_i := -x_i.
    pub fn negate_var(&self, i: usize) -> Self {
        MPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), if e[i] % 2 == 1 { -c } else { c.clone() }))
                .collect(),
        }
    }

    /// Re-embed into a polynomial ring with a different variable list:
    /// `map[j]` is the new index of old variable j.
    pub fn remap(&self, new_nvars: usize, map: &[usize]) -> Self {
        let mut r = Self::zero(new_nvars);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; new_nvars];
            for (j, &x) in e.iter().enumerate() {
                e2[map[j]] += x;
            }
            r.insert_add(e2, c.clone());
        }
        r
    }

    pub fn eval(&self, point: &[Rat]) -> Rat {
        let mut s = Rat::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    t *= x;
                }
            }
            s += t;
        }
        s
    }

    /// Exact quotient self / d, or None when d does not divide self.
    pub fn div_exact(&self, d: &MPoly) -> Option<MPoly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        let (de, dc) = d.leading().map(|(e, c)| (e.clone(), c.clone()))?;
        let mut r = self.clone();
        let mut q = Self::zero(self.nvars);
        while let Some((re, rc)) = r.leading().map(|(e, c)| (e.clone(), c.clone())) {
            if re.iter().zip(&de).any(|(a, b)| a < b) {
                return None;
            }
            let qe: Vec<u32> = re.iter().zip(&de).map(|(a, b)| a - b).collect();
            let qt = Self::monomial(qe, &rc / &dc);
            r = &r - &(&qt * d);
            q = &q + &qt;
        }
        Some(q)
    }

    /// Division with remainder in x_i by a divisor whose leading coefficient
    /// in x_i is a nonzero constant.
    pub fn div_rem_in(&self, i: usize, d: &MPoly) -> (MPoly, MPoly) {
        let dd = d.degree_in(i);
        let lc = d.coeff_in(i, dd).constant_value().expect("divisor not monic in variable");
        assert!(!lc.is_zero());
        let mut r = self.clone();
        let mut q = Self::zero(self.nvars);
        loop {
            if r.is_zero() {
                break;
            }
            let rd = r.degree_in(i);
            if rd < dd {
                break;
            }
            let c = r.coeff_in(i, rd).scale(&(Rat::one() / &lc)).times_var_pow(i, rd - dd);
            r = &r - &(&c * d);
            q = &q + &c;
        }
        (q, r)
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(j, &k)| if k == 1 { names[j].clone() } else { format!("{}^{}", names[j], k) })
                .collect();
            let neg = c.is_negative();
            let a = c.abs();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if mono.is_empty() {
                out.push_str(&fmt_rat(&a));
            } else if a.is_one() {
                out.push_str(&mono.join("*"));
            } else {
                out.push_str(&format!("{}*{}", fmt_rat(&a), mono.join("*")));
            }
        }
        out
    }
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, o: &MPoly) -> MPoly {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.insert_add(e.clone(), c.clone());
        }
        r
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, o: &MPoly) -> MPoly {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.insert_add(e.clone(), -c);
        }
        r
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, o: &MPoly) -> MPoly {
        let mut r = MPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                r.insert_add(e, c1 * c2);
            }
        }
        r
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        self.scale(&-Rat::one())
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("x{}", i)).collect();
        write!(f, "{}", self.fmt_with(&names))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{rat, rint};

    fn x(i: usize) -> MPoly {
        MPoly::var(2, i)
    }

    #[test]
    fn exact_division() {
        let p = &(&x(0) - &x(1)) * &(&x(0) + &MPoly::constant(2, rint(3)));
        let q = p.div_exact(&(&x(0) - &x(1))).unwrap();
        assert_eq!(q, &x(0) + &MPoly::constant(2, rint(3)));
        assert!(x(0).div_exact(&x(1)).is_none());
        assert!((&x(0) + &x(1)).div_exact(&x(0)).is_none());
    }

    #[test]
    fn long_division_in_z() {
        // z^3 / (z - c) with c = x1
        let z3 = x(0).pow(3);
        let (q, r) = z3.div_rem_in(0, &(&x(0) - &x(1)));
        assert_eq!(q, &(&x(0).pow(2) + &(&x(0) * &x(1))) + &x(1).pow(2));
        assert_eq!(r, x(1).pow(3));
    }

    #[test]
    fn substitution_and_eval() {
        let p = &x(0).pow(2) + &x(1);
        let s = p.subst(0, &MPoly::constant(2, rat(1, 2)));
        assert_eq!(s, &MPoly::constant(2, rat(1, 4)) + &x(1));
        assert_eq!(p.eval(&[rint(2), rint(3)]), rint(7));
        assert_eq!(p.negate_var(0), p);
        assert_eq!(p.derivative(0), x(0).scale(&rint(2)));
    }

    #[test]
    fn display() {
        let p = &x(0).scale(&rat(-1, 2)) + &MPoly::one(2);
        assert_eq!(p.fmt_with(&["z".into(), "chi1".into()]), "-1/2*z + 1");
    }
}
