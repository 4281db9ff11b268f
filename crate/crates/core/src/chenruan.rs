//! Equivariant Chen–Ruan cohomology through restrictions to torus fixed points.

use std::collections::HashMap;

use num_traits::Zero;

use crate::exactalg::{floor_rat, rint, to_i64, MPoly, Rat, RatFn};
use crate::stackyfan::{FanError, FixedPointData, NVec, StackyFan};

/// Sector (σ, v) of the fixed point of a maximal cone σ, with v ∈ Box(σ).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FixedKey {
    pub cone: usize,
    pub v: NVec,
}

#[derive(Clone, Debug)]
pub struct FixedPointModel {
    pub fan: StackyFan,
    pub keys: Vec<FixedKey>,
    pub data: Vec<FixedPointData>,
    /// Numerical values of χ when the model is specialized; z is then the only variable.
    pub chi: Option<Vec<Rat>>,
    index: HashMap<FixedKey, usize>,
}

/// Values of a class at every fixed-point sector, aligned with `FixedPointModel::keys`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalizedClass {
    pub values: Vec<RatFn>,
}

impl FixedPointModel {
    pub fn new(fan: &StackyFan) -> Self {
        let mut keys = Vec::new();
        let mut data = Vec::new();
        for (c, cone) in fan.max_cones.iter().enumerate() {
            data.push(fan.fixed_point_weights(cone));
            for v in fan.box_of_cone(cone) {
                keys.push(FixedKey { cone: c, v });
            }
        }
        let index = keys.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
        FixedPointModel { fan: fan.clone(), keys, data, chi: None, index }
    }

    /// Model with χ fixed to numbers. Fails when some tangent weight u_j(σ), j ∈ σ, vanishes there.
    pub fn specialized(fan: &StackyFan, chi: &[Rat]) -> Result<Self, String> {
        if chi.len() != fan.rank {
            return Err(format!("expected {} chi values, got {}", fan.rank, chi.len()));
        }
        let mut m = Self::new(fan);
        m.chi = Some(chi.to_vec());
        for (c, cone) in fan.max_cones.iter().enumerate() {
            for &j in cone {
                if m.weight_poly(c, j).is_zero() {
                    return Err(format!("tangent weight u{}({:?}) vanishes at the chosen chi", j + 1, cone));
                }
            }
        }
        Ok(m)
    }

    pub fn is_specialized(&self) -> bool {
        self.chi.is_some()
    }

    /// z, χ_1..χ_n (only z when specialized).
    pub fn nvars(&self) -> usize {
        if self.chi.is_some() {
            1
        } else {
            1 + self.fan.rank
        }
    }

    /// χ_a as a scalar of the model.
    pub fn chi_scalar(&self, a: usize) -> RatFn {
        match &self.chi {
            Some(c) => RatFn::constant(1, c[a].clone()),
            None => RatFn::var(self.nvars(), a + 1),
        }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn key_index(&self, k: &FixedKey) -> Option<usize> {
        self.index.get(k).copied()
    }

    /// u_j(σ) as a linear form in χ.
    pub fn weight_poly(&self, cone: usize, j: usize) -> MPoly {
        let w = &self.data[cone].weights[j];
        if let Some(chi) = &self.chi {
            let v: Rat = w.iter().zip(chi).map(|(a, b)| a * b).sum();
            return MPoly::constant(1, v);
        }
        MPoly::linear(self.nvars(), Rat::zero(), &w.iter().enumerate().map(|(a, c)| (a + 1, c.clone())).collect::<Vec<_>>())
    }

    pub fn weight(&self, cone: usize, j: usize) -> RatFn {
        RatFn::from_poly(self.weight_poly(cone, j))
    }

    pub fn zero_class(&self) -> LocalizedClass {
        LocalizedClass { values: vec![RatFn::zero(self.nvars()); self.len()] }
    }

    pub fn one_class(&self) -> LocalizedClass {
        self.phi_class(&self.fan.zero()).expect("origin is in the support")
    }

    /// The constant class χ_a, i.e. χ_a·1.
    pub fn chi_class(&self, a: usize) -> LocalizedClass {
        self.one_class().scale(&self.chi_scalar(a))
    }

    /// φ_k = ∏ u_i^{⌊Ψ_i(k)⌋} 𝟙_v with v = k − Σ⌊Ψ_i(k)⌋ b_i.
    pub fn phi_class(&self, k: &[i64]) -> Result<LocalizedClass, FanError> {
        let fan = &self.fan;
        let (psi, _) = fan.psi(k)?;
        let floors: Vec<i64> = psi.iter().map(|x| to_i64(&floor_rat(x))).collect();
        let mut v = fan.reduce(k);
        for (i, &f) in floors.iter().enumerate() {
            if f != 0 {
                v = fan.sub(&v, &fan.scale(&fan.rays[i], f));
            }
        }
        let nv = self.nvars();
        let values = self
            .keys
            .iter()
            .map(|key| {
                if key.v != v {
                    return RatFn::zero(nv);
                }
                let cone = &fan.max_cones[key.cone];
                let mut p = MPoly::one(nv);
                for (i, &f) in floors.iter().enumerate() {
                    if f == 0 {
                        continue;
                    }
                    if !cone.contains(&i) {
                        return RatFn::zero(nv);
                    }
                    p = &p * &self.weight_poly(key.cone, i).pow(f as u32);
                }
                RatFn::from_poly(p)
            })
            .collect();
        Ok(LocalizedClass { values })
    }

    /// Orbifold product at each fixed point: 𝟙_{v₁}𝟙_{v₂} = ∏_{i∈σ} u_i^{⌊Ψ_i(v₁)+Ψ_i(v₂)⌋} 𝟙_w
    /// with w the Box representative of v₁ + v₂.
    pub fn cr_times(&self, a: &LocalizedClass, b: &LocalizedClass) -> LocalizedClass {
        let fan = &self.fan;
        let nv = self.nvars();
        let mut out = self.zero_class();
        for (i, k1) in self.keys.iter().enumerate() {
            if a.values[i].is_zero() {
                continue;
            }
            let (p1, _) = fan.psi(&k1.v).expect("Box element in support");
            for (j, k2) in self.keys.iter().enumerate() {
                if k2.cone != k1.cone || b.values[j].is_zero() {
                    continue;
                }
                let (p2, _) = fan.psi(&k2.v).expect("Box element in support");
                let mut w = fan.add(&k1.v, &k2.v);
                let mut p = MPoly::one(nv);
                for &c in &fan.max_cones[k1.cone] {
                    let f = to_i64(&floor_rat(&(&p1[c] + &p2[c])));
                    if f > 0 {
                        w = fan.sub(&w, &fan.scale(&fan.rays[c], f));
                        p = &p * &self.weight_poly(k1.cone, c).pow(f as u32);
                    }
                }
                let t = self.index[&FixedKey { cone: k1.cone, v: w }];
                let term = &(&a.values[i] * &b.values[j]) * &RatFn::from_poly(p);
                out.values[t] = &out.values[t] + &term;
            }
        }
        out
    }

    /// Atiyah–Bott pairing Σ α(σ,v) β(σ,inv v) / (|N(σ)| ∏_{j∈σ∖σ(v)} u_j(σ)).
    pub fn ab_pairing(&self, a: &LocalizedClass, b: &LocalizedClass) -> RatFn {
        let fan = &self.fan;
        let nv = self.nvars();
        let mut total = RatFn::zero(nv);
        for (idx, key) in self.keys.iter().enumerate() {
            if a.values[idx].is_zero() {
                continue;
            }
            let cone = &fan.max_cones[key.cone];
            let w = fan.inv_box(cone, &key.v).expect("key is a Box element");
            let j = self.index[&FixedKey { cone: key.cone, v: w }];
            if b.values[j].is_zero() {
                continue;
            }
            let (psi, _) = fan.psi(&key.v).expect("Box element in support");
            let mut den = MPoly::constant(nv, rint(self.data[key.cone].order));
            for &c in cone {
                if psi[c].is_zero() {
                    den = &den * &self.weight_poly(key.cone, c);
                }
            }
            let term = &(&a.values[idx] * &b.values[j]) / &RatFn::from_poly(den);
            total = &total + &term;
        }
        total
    }
}

/// φ_{k₁}·φ_{k₂}: Some(k₁+k₂) when k̄₁, k̄₂ share a cone, None when the product vanishes.
pub fn cr_product(fan: &StackyFan, k1: &[i64], k2: &[i64]) -> Result<Option<NVec>, FanError> {
    let (_, c1) = fan.psi(k1)?;
    let (_, c2) = fan.psi(k2)?;
    let mut u: Vec<usize> = c1.into_iter().chain(c2).collect();
    u.sort();
    u.dedup();
    Ok(if fan.is_cone(&u) { Some(fan.add(k1, k2)) } else { None })
}

impl LocalizedClass {
    pub fn add(&self, o: &Self) -> Self {
        LocalizedClass { values: self.values.iter().zip(&o.values).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        LocalizedClass { values: self.values.iter().zip(&o.values).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &RatFn) -> Self {
        LocalizedClass { values: self.values.iter().map(|a| a * c).collect() }
    }

    /// Pointwise product.
    pub fn times(&self, o: &Self) -> Self {
        LocalizedClass { values: self.values.iter().zip(&o.values).map(|(a, b)| a * b).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    pub fn negate_z(&self) -> Self {
        LocalizedClass { values: self.values.iter().map(|v| v.negate_z()).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;
    use crate::stackyfan::tests::{bmu2, c2mu2, p1, p12, p2};

    fn chi(nv: usize) -> RatFn {
        RatFn::var(nv, 1)
    }

    #[test]
    fn weighted_line_classes() {
        let f = p12();
        let m = FixedPointModel::new(&f);
        assert_eq!(m.len(), 3);
        let nv = m.nvars();
        let phib1 = m.phi_class(&[2]).unwrap();
        let ka = m.key_index(&FixedKey { cone: 0, v: vec![0] }).unwrap();
        let kb = m.key_index(&FixedKey { cone: 1, v: vec![0] }).unwrap();
        let kt = m.key_index(&FixedKey { cone: 0, v: vec![1] }).unwrap();
        assert_eq!(phib1.values[ka], chi(nv).scale(&rat(1, 2)));
        assert!(phib1.values[kb].is_zero());
        assert!(phib1.values[kt].is_zero());
        let phi1 = m.phi_class(&[1]).unwrap();
        assert!(phi1.values[kt].is_one());
        assert!(phi1.values[ka].is_zero() && phi1.values[kb].is_zero());
        // the integral of 1 over a one-dimensional space vanishes
        assert!(m.ab_pairing(&m.one_class(), &m.one_class()).is_zero());
        assert_eq!(m.ab_pairing(&phi1, &phi1).constant_value(), Some(rat(1, 2)));
        assert_eq!(m.ab_pairing(&m.one_class(), &phib1).constant_value(), Some(rat(1, 2)));
        assert_eq!(cr_product(&f, &[1], &[1]).unwrap(), Some(vec![2]));
        assert_eq!(m.cr_times(&phi1, &phi1), phib1);
        assert_eq!(m.cr_times(&phi1, &m.one_class()), phi1);
    }

    #[test]
    fn projective_line_pairing() {
        let f = p1();
        let m = FixedPointModel::new(&f);
        let one = m.one_class();
        let phib1 = m.phi_class(&[1]).unwrap();
        assert!(m.ab_pairing(&one, &phib1).is_one());
        assert_eq!(cr_product(&f, &[1], &[-1]).unwrap(), None);
        assert!(m.cr_times(&phib1, &m.phi_class(&[-1]).unwrap()).is_zero());
        // χ = Σ (χ·b_i) φ_{b_i}
        let s = phib1.sub(&m.phi_class(&[-1]).unwrap());
        assert_eq!(s, m.chi_class(0));
    }

    #[test]
    fn quotient_pairing() {
        let m = FixedPointModel::new(&c2mu2());
        assert_eq!(m.len(), 2);
        let one = m.one_class();
        let p = m.ab_pairing(&one, &one);
        // 1/(2 u₁ u₂) with u₁ = χ₂ − χ₁/2, u₂ = χ₁/2
        let nv = m.nvars();
        let u1 = &RatFn::var(nv, 2) - &RatFn::var(nv, 1).scale(&rat(1, 2));
        let u2 = RatFn::var(nv, 1).scale(&rat(1, 2));
        assert_eq!(p, (&(&u1 * &u2).scale(&rint(2))).inv());
        let tw = m.phi_class(&[1, 1]).unwrap();
        assert_eq!(m.ab_pairing(&tw, &tw).constant_value(), Some(rat(1, 2)));
    }

    #[test]
    fn plane_and_gerbe() {
        let m = FixedPointModel::new(&p2());
        let h = m.phi_class(&[1, 0]).unwrap();
        let h2 = m.cr_times(&h, &h);
        assert!(m.ab_pairing(&m.one_class(), &h2).is_one());
        assert!(m.ab_pairing(&m.one_class(), &h).is_zero());
        let g = FixedPointModel::new(&bmu2());
        assert_eq!(g.len(), 2);
        assert_eq!(g.ab_pairing(&g.one_class(), &g.one_class()).constant_value(), Some(rat(1, 2)));
        let t = g.phi_class(&[1]).unwrap();
        assert_eq!(g.ab_pairing(&t, &t).constant_value(), Some(rat(1, 2)));
    }
}
