use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use super::{Rat, RatFn};

/// Monomial Q^q t^t y^y with q in the chosen basis of the curve lattice.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub struct SeriesKey {
    pub q: Vec<i64>,
    pub t: Vec<u32>,
    pub y: Vec<u32>,
}

impl SeriesKey {
    pub fn zero(r: usize, m: usize, g: usize) -> Self {
        SeriesKey { q: vec![0; r], t: vec![0; m], y: vec![0; g] }
    }

    pub fn is_zero(&self) -> bool {
        self.q.iter().all(|&x| x == 0) && self.t.iter().all(|&x| x == 0) && self.y.iter().all(|&x| x == 0)
    }

    pub fn add(&self, o: &SeriesKey) -> SeriesKey {
        SeriesKey {
            q: self.q.iter().zip(&o.q).map(|(a, b)| a + b).collect(),
            t: self.t.iter().zip(&o.t).map(|(a, b)| a + b).collect(),
            y: self.y.iter().zip(&o.y).map(|(a, b)| a + b).collect(),
        }
    }

    /// self - o when t and y stay non-negative.
    pub fn sub(&self, o: &SeriesKey) -> Option<SeriesKey> {
        let t: Option<Vec<u32>> = self.t.iter().zip(&o.t).map(|(a, b)| a.checked_sub(*b)).collect();
        let y: Option<Vec<u32>> = self.y.iter().zip(&o.y).map(|(a, b)| a.checked_sub(*b)).collect();
        Some(SeriesKey { q: self.q.iter().zip(&o.q).map(|(a, b)| a - b).collect(), t: t?, y: y? })
    }

    pub fn t_order(&self) -> u32 {
        self.t.iter().sum()
    }

    pub fn y_order(&self) -> u32 {
        self.y.iter().sum()
    }
}

/// Truncation profile: ample degree bound on Q, total t-order, total y-order.
#[derive(Clone, PartialEq, Debug)]
pub struct Profile {
    /// Ample class in coordinates dual to the Q-basis.
    pub omega: Vec<Rat>,
    pub qdeg: Rat,
    pub tord: u32,
    pub yord: u32,
}

impl Profile {
    pub fn qdegree(&self, q: &[i64]) -> Rat {
        self.omega.iter().zip(q).map(|(w, &x)| w * Rat::from_integer(x.into())).sum()
    }

    pub fn weight(&self, k: &SeriesKey) -> Rat {
        self.qdegree(&k.q) + Rat::from_integer((k.t_order() + k.y_order()).into())
    }

    pub fn contains(&self, k: &SeriesKey) -> bool {
        self.qdegree(&k.q) <= self.qdeg && k.t_order() <= self.tord && k.y_order() <= self.yord
    }

    /// All keys with q from `qs` (effective classes within the degree bound),
    /// sorted by total weight.
    pub fn keys(&self, qs: &[Vec<i64>], m: usize, g: usize) -> Vec<SeriesKey> {
        let ts = multi_indices(m, self.tord);
        let ys = multi_indices(g, self.yord);
        let mut out = Vec::new();
        for q in qs {
            if self.qdegree(q) > self.qdeg {
                continue;
            }
            for t in &ts {
                for y in &ys {
                    out.push(SeriesKey { q: q.clone(), t: t.clone(), y: y.clone() });
                }
            }
        }
        out.sort_by(|a, b| self.weight(a).cmp(&self.weight(b)).then_with(|| a.cmp(b)));
        out
    }
}

/// All vectors in N^n with coordinate sum at most `max`, graded by sum.
pub fn multi_indices(n: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0u32; n]];
    if n == 0 {
        return out;
    }
    for total in 1..=max {
        let mut cur = vec![0u32; n];
        fill(&mut out, &mut cur, 0, total);
    }
    out
}

fn fill(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, pos: usize, left: u32) {
    if pos + 1 == cur.len() {
        cur[pos] = left;
        out.push(cur.clone());
        return;
    }
    for a in (0..=left).rev() {
        cur[pos] = a;
        fill(out, cur, pos + 1, left - a);
    }
    cur[pos] = 0;
}

/// Commutative coefficient ring for series products.
pub trait Coeff: Clone {
    fn is_zero_c(&self) -> bool;
    fn add_c(&self, o: &Self) -> Self;
    fn mul_c(&self, o: &Self) -> Self;
}

impl Coeff for Rat {
    fn is_zero_c(&self) -> bool {
        self.is_zero()
    }
    fn add_c(&self, o: &Self) -> Self {
        self + o
    }
    fn mul_c(&self, o: &Self) -> Self {
        self * o
    }
}

impl Coeff for RatFn {
    fn is_zero_c(&self) -> bool {
        self.is_zero()
    }
    fn add_c(&self, o: &Self) -> Self {
        self + o
    }
    fn mul_c(&self, o: &Self) -> Self {
        self * o
    }
}

#[derive(Clone, Debug)]
pub struct TruncSeries<C> {
    pub profile: Profile,
    pub coeffs: BTreeMap<SeriesKey, C>,
}

#[derive(Debug, PartialEq, Eq)]
pub struct ProfileMismatch;

impl<C: Coeff> TruncSeries<C> {
    pub fn new(profile: Profile) -> Self {
        TruncSeries { profile, coeffs: BTreeMap::new() }
    }

    pub fn insert(&mut self, k: SeriesKey, c: C) {
        if !self.profile.contains(&k) {
            return;
        }
        let v = match self.coeffs.remove(&k) {
            Some(old) => old.add_c(&c),
            None => c,
        };
        if !v.is_zero_c() {
            self.coeffs.insert(k, v);
        }
    }

    pub fn get(&self, k: &SeriesKey) -> Option<&C> {
        self.coeffs.get(k)
    }

    pub fn add(&self, o: &Self) -> Result<Self, ProfileMismatch> {
        if self.profile != o.profile {
            return Err(ProfileMismatch);
        }
        let mut r = self.clone();
        for (k, c) in &o.coeffs {
            r.insert(k.clone(), c.clone());
        }
        Ok(r)
    }

    pub fn mul(&self, o: &Self) -> Result<Self, ProfileMismatch> {
        if self.profile != o.profile {
            return Err(ProfileMismatch);
        }
        let mut r = Self::new(self.profile.clone());
        for (k1, c1) in &self.coeffs {
            for (k2, c2) in &o.coeffs {
                let k = k1.add(k2);
                if r.profile.contains(&k) {
                    r.insert(k, c1.mul_c(c2));
                }
            }
        }
        Ok(r)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{rint, Rat};

    fn prof(qdeg: i64) -> Profile {
        Profile { omega: vec![rint(1)], qdeg: rint(qdeg), tord: 0, yord: 0 }
    }

    fn qk(d: i64) -> SeriesKey {
        SeriesKey { q: vec![d], t: vec![], y: vec![] }
    }

    fn poly(p: &Profile, cs: &[(i64, i64)]) -> TruncSeries<Rat> {
        let mut s = TruncSeries::new(p.clone());
        for &(d, c) in cs {
            s.insert(qk(d), rint(c));
        }
        s
    }

    #[test]
    fn unit_and_difference_of_squares() {
        let p = prof(3);
        let one = poly(&p, &[(0, 1)]);
        let b = poly(&p, &[(0, 2), (1, -5), (3, 7)]);
        assert_eq!(one.mul(&b).unwrap().coeffs, b.coeffs);
        let a = poly(&p, &[(0, 1), (1, 1)]);
        let c = poly(&p, &[(0, 1), (1, -1)]);
        assert_eq!(a.mul(&c).unwrap().coeffs, poly(&p, &[(0, 1), (2, -1)]).coeffs);
    }

    #[test]
    fn telescoping() {
        let p = prof(5);
        let geo = poly(&p, &[(0, 1), (1, 1), (2, 1), (3, 1), (4, 1), (5, 1)]);
        let c = poly(&p, &[(0, 1), (1, -1)]);
        assert_eq!(geo.mul(&c).unwrap().coeffs, poly(&p, &[(0, 1)]).coeffs);
    }

    #[test]
    fn mismatch() {
        let a = poly(&prof(2), &[(0, 1)]);
        let b = poly(&prof(3), &[(0, 1)]);
        assert_eq!(a.mul(&b).unwrap_err(), ProfileMismatch);
    }

    #[test]
    fn multi_index_counts() {
        assert_eq!(multi_indices(2, 3).len(), 10);
        assert_eq!(multi_indices(0, 3).len(), 1);
        assert_eq!(multi_indices(3, 1), vec![vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
    }
}
