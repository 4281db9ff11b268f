//! Stacky fans: validation, Ψ, Box elements, fixed-point data.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exactalg::lp::{Lp, LpResult, Rel};
use crate::exactalg::{fmt_rat, rank_rat, rint, solve_rat, Rat};
use crate::lattice::{bi, smith_normal_form, IntMatrix};

/// Element of N: free coordinates followed by torsion residues.
pub type NVec = Vec<i64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FanError {
    #[error("ray {ray} has {got} coordinates, expected {expected}")]
    RayLength { ray: usize, got: usize, expected: usize },
    #[error("cone {cone:?} refers to ray {index} but there are only {m} rays")]
    RayIndex { cone: Vec<usize>, index: usize, m: usize },
    #[error("torsion {0:?} is not a divisibility chain of factors >= 2")]
    Torsion(Vec<i64>),
    #[error("ray {0} has zero image in N ⊗ Q")]
    ZeroRay(usize),
    #[error("ray {0} lies in no cone")]
    UnusedRay(usize),
    #[error("cone {cone:?} is not simplicial: rays {dependent:?} are linearly dependent")]
    NonSimplicial { cone: Vec<usize>, dependent: Vec<usize> },
    #[error("no cone of maximal dimension {0}")]
    NoFullCone(usize),
    #[error("maximal cone {0:?} is not of full dimension")]
    NotPure(Vec<usize>),
    #[error("cones {0:?} and {1:?} overlap outside a common face")]
    Overlap(Vec<usize>, Vec<usize>),
    #[error("support is not convex: boundary wall {wall:?} has ray {witness} on the wrong side")]
    NonConvex { wall: Vec<usize>, witness: usize },
    #[error("no strictly convex piecewise-linear support function exists")]
    NotSemiProjective,
    #[error("point {0:?} lies outside the support of the fan")]
    OutsideSupport(NVec),
    #[error("{0:?} is not a Box element of cone {1:?}")]
    NotInBox(NVec, Vec<usize>),
}

#[derive(Clone, Debug)]
pub struct StackyFan {
    pub rank: usize,
    pub torsion: Vec<i64>,
    pub rays: Vec<NVec>,
    /// Maximal cones as sorted 0-based ray index lists, in input order.
    pub max_cones: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoxElement {
    pub v: NVec,
    pub cone: Vec<usize>,
    #[serde(serialize_with = "ser_rats")]
    pub psi: Vec<Rat>,
    #[serde(serialize_with = "ser_rat")]
    pub age: Rat,
}

pub fn ser_rat<S: serde::Serializer>(x: &Rat, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rat(x))
}

pub fn ser_rats<S: serde::Serializer>(x: &[Rat], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(x.len()))?;
    for r in x {
        seq.serialize_element(&fmt_rat(r))?;
    }
    seq.end()
}

/// Restriction data at the fixed point of a maximal cone.
#[derive(Clone, Debug)]
pub struct FixedPointData {
    pub cone: Vec<usize>,
    /// weights[j] = u_j(σ) as coefficients of χ_1..χ_n; zero for j ∉ σ.
    pub weights: Vec<Vec<Rat>>,
    pub order: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagnostic {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagnostics {
    pub checks: Vec<Diagnostic>,
    #[serde(skip)]
    pub errors: Vec<FanError>,
}

impl Diagnostics {
    pub fn ok(&self) -> bool {
        self.errors.is_empty()
    }
}

impl StackyFan {
    /// Builds a fan from the given cones (0-based); only maximal cones are kept.
    pub fn new(rank: usize, torsion: Vec<i64>, rays: Vec<NVec>, cones: Vec<Vec<usize>>) -> Result<Self, FanError> {
        for (i, d) in torsion.iter().enumerate() {
            if *d < 2 || (i > 0 && d % torsion[i - 1] != 0) {
                return Err(FanError::Torsion(torsion.clone()));
            }
        }
        let dim = rank + torsion.len();
        for (i, r) in rays.iter().enumerate() {
            if r.len() != dim {
                return Err(FanError::RayLength { ray: i + 1, got: r.len(), expected: dim });
            }
        }
        let mut normalized: Vec<Vec<usize>> = Vec::new();
        for c in &cones {
            for &i in c {
                if i >= rays.len() {
                    return Err(FanError::RayIndex { cone: c.iter().map(|x| x + 1).collect(), index: i + 1, m: rays.len() });
                }
            }
            let mut s: Vec<usize> = c.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
            s.sort();
            if !normalized.contains(&s) {
                normalized.push(s);
            }
        }
        let max_cones: Vec<Vec<usize>> = normalized
            .iter()
            .filter(|c| !normalized.iter().any(|d| d.len() > c.len() && c.iter().all(|x| d.contains(x))))
            .cloned()
            .collect();
        let mut fan = StackyFan { rank, torsion, rays, max_cones };
        fan.rays = fan.rays.iter().map(|r| fan.reduce(r)).collect();
        Ok(fan)
    }

    pub fn m(&self) -> usize {
        self.rays.len()
    }

    pub fn dim_n(&self) -> usize {
        self.rank + self.torsion.len()
    }

    pub fn torsion_order(&self) -> i64 {
        self.torsion.iter().product()
    }

    pub fn reduce(&self, v: &[i64]) -> NVec {
        let mut r = v.to_vec();
        for (j, d) in self.torsion.iter().enumerate() {
            r[self.rank + j] = r[self.rank + j].rem_euclid(*d);
        }
        r
    }

    pub fn zero(&self) -> NVec {
        vec![0; self.dim_n()]
    }

    pub fn add(&self, a: &[i64], b: &[i64]) -> NVec {
        let s: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        self.reduce(&s)
    }

    pub fn sub(&self, a: &[i64], b: &[i64]) -> NVec {
        let s: Vec<i64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.reduce(&s)
    }

    pub fn scale(&self, a: &[i64], k: i64) -> NVec {
        let s: Vec<i64> = a.iter().map(|x| x * k).collect();
        self.reduce(&s)
    }

    pub fn bar(&self, v: &[i64]) -> Vec<Rat> {
        v[..self.rank].iter().map(|&x| rint(x)).collect()
    }

    fn cone_matrix(&self, cone: &[usize]) -> Vec<Vec<Rat>> {
        // rows = coordinates, columns = rays of the cone
        (0..self.rank).map(|a| cone.iter().map(|&j| rint(self.rays[j][a])).collect()).collect()
    }

    /// Coordinates of x̄ in the basis b̄_j (j ∈ σ) of a full-dimensional cone.
    pub fn cone_coords(&self, cone: &[usize], xbar: &[Rat]) -> Option<Vec<Rat>> {
        solve_rat(&self.cone_matrix(cone), xbar)
    }

    /// All cones: faces of the maximal ones, sorted by size then lexicographically.
    pub fn all_cones(&self) -> Vec<Vec<usize>> {
        let mut set: BTreeSet<Vec<usize>> = BTreeSet::new();
        for c in &self.max_cones {
            for mask in 0u64..(1u64 << c.len()) {
                let f: Vec<usize> = c.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &x)| x).collect();
                set.insert(f);
            }
        }
        let mut v: Vec<Vec<usize>> = set.into_iter().collect();
        v.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        v
    }

    pub fn is_cone(&self, s: &[usize]) -> bool {
        self.max_cones.iter().any(|c| s.iter().all(|x| c.contains(x)))
    }

    pub fn validate(&self) -> Diagnostics {
        let mut checks = Vec::new();
        let mut errors = Vec::new();
        let mut record = |name: &str, res: Result<String, FanError>| match res {
            Ok(d) => checks.push(Diagnostic { check: name.into(), passed: true, detail: d }),
            Err(e) => {
                checks.push(Diagnostic { check: name.into(), passed: false, detail: e.to_string() });
                errors.push(e);
            }
        };
        record("rays", self.check_rays());
        let simplicial = self.check_simplicial();
        let simplicial_ok = simplicial.is_ok();
        record("simplicial", simplicial);
        if !simplicial_ok {
            return Diagnostics { checks, errors };
        }
        record("full-dimensional cone", self.check_full());
        record("face closure and overlaps", self.check_overlaps());
        record("convex support", self.check_convex());
        record("strictly convex support function", self.check_semiprojective());
        Diagnostics { checks, errors }
    }

    fn check_rays(&self) -> Result<String, FanError> {
        for (i, r) in self.rays.iter().enumerate() {
            if r[..self.rank].iter().all(|&x| x == 0) {
                return Err(FanError::ZeroRay(i + 1));
            }
            if !self.max_cones.iter().any(|c| c.contains(&i)) {
                return Err(FanError::UnusedRay(i + 1));
            }
        }
        Ok(format!("{} rays", self.m()))
    }

    fn check_simplicial(&self) -> Result<String, FanError> {
        for c in &self.max_cones {
            let vecs: Vec<Vec<Rat>> = c.iter().map(|&j| self.bar(&self.rays[j])).collect();
            if rank_rat(&vecs) < c.len() {
                // smallest dependent prefix as witness
                let mut dep = Vec::new();
                for k in 1..=c.len() {
                    if rank_rat(&vecs[..k]) < k {
                        dep = c[..k].to_vec();
                        break;
                    }
                }
                return Err(FanError::NonSimplicial {
                    cone: c.iter().map(|x| x + 1).collect(),
                    dependent: dep.iter().map(|x| x + 1).collect(),
                });
            }
        }
        Ok(format!("{} maximal cones", self.max_cones.len()))
    }

    fn check_full(&self) -> Result<String, FanError> {
        if !self.max_cones.iter().any(|c| c.len() == self.rank) {
            return Err(FanError::NoFullCone(self.rank));
        }
        if let Some(c) = self.max_cones.iter().find(|c| c.len() != self.rank) {
            return Err(FanError::NotPure(c.iter().map(|x| x + 1).collect()));
        }
        Ok(format!("all maximal cones have dimension {}", self.rank))
    }

    fn check_overlaps(&self) -> Result<String, FanError> {
        let n = self.rank;
        for (a, s1) in self.max_cones.iter().enumerate() {
            for s2 in &self.max_cones[a + 1..] {
                let vars: Vec<(usize, bool)> = s1.iter().map(|&i| (i, true)).chain(s2.iter().map(|&j| (j, false))).collect();
                let mut lp = Lp::new(vars.len());
                for coord in 0..n {
                    let row = vars
                        .iter()
                        .map(|&(i, first)| {
                            let x = rint(self.rays[i][coord]);
                            if first { x } else { -x }
                        })
                        .collect();
                    lp.add(row, Rel::Eq, Rat::zero());
                }
                let norm = vars
                    .iter()
                    .map(|&(i, first)| {
                        let other = if first { s2 } else { s1 };
                        if other.contains(&i) { Rat::zero() } else { Rat::one() }
                    })
                    .collect();
                lp.add(norm, Rel::Eq, Rat::one());
                if lp.solve() != LpResult::Infeasible {
                    return Err(FanError::Overlap(s1.iter().map(|x| x + 1).collect(), s2.iter().map(|x| x + 1).collect()));
                }
            }
        }
        Ok("maximal cones meet along common faces".into())
    }

    /// Codimension-one faces with the maximal cones containing them.
    pub fn walls(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        let mut out: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        for (ci, c) in self.max_cones.iter().enumerate() {
            for skip in 0..c.len() {
                let tau: Vec<usize> = c.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, &x)| x).collect();
                match out.iter_mut().find(|(t, _)| *t == tau) {
                    Some(slot) => slot.1.push(ci),
                    None => out.push((tau, vec![ci])),
                }
            }
        }
        out
    }

    /// Support equal to N_ℚ: every wall of a valid fan is shared by two maximal cones.
    pub fn is_complete(&self) -> bool {
        self.walls().iter().all(|(_, cs)| cs.len() == 2)
    }

    /// Normal h with h·b̄_k = 0 on the wall and h·b̄_extra > 0.
    fn wall_normal(&self, tau: &[usize], extra: usize) -> Vec<Rat> {
        let rows: Vec<Vec<Rat>> = tau.iter().map(|&k| self.bar(&self.rays[k])).collect();
        let ker = crate::exactalg::kernel_rat(&rows, self.rank);
        let h = ker.into_iter().next().expect("wall of codimension one");
        let s: Rat = h.iter().zip(self.bar(&self.rays[extra])).map(|(a, b)| a * b).sum();
        if s.is_negative() {
            h.into_iter().map(|x| -x).collect()
        } else {
            h
        }
    }

    fn check_convex(&self) -> Result<String, FanError> {
        let mut nb = 0;
        for (tau, owners) in self.walls() {
            if owners.len() != 1 {
                continue;
            }
            nb += 1;
            let c = &self.max_cones[owners[0]];
            let extra = *c.iter().find(|x| !tau.contains(x)).unwrap();
            let h = self.wall_normal(&tau, extra);
            for (j, r) in self.rays.iter().enumerate() {
                let s: Rat = h.iter().zip(self.bar(r)).map(|(a, b)| a * b).sum();
                if s.is_negative() {
                    return Err(FanError::NonConvex { wall: tau.iter().map(|x| x + 1).collect(), witness: j + 1 });
                }
            }
        }
        Ok(format!("{} boundary walls are supporting", nb))
    }

    fn check_semiprojective(&self) -> Result<String, FanError> {
        let n = self.rank;
        let k = self.max_cones.len();
        if k <= 1 {
            return Ok("single maximal cone".into());
        }
        // variables: m_σ (n each, free) and the slack s
        let nv = k * n + 1;
        let mut lp = Lp::new(nv).all_free();
        lp.objective[nv - 1] = Rat::one();
        let mut slack_row = vec![Rat::zero(); nv];
        slack_row[nv - 1] = Rat::one();
        lp.add(slack_row, Rel::Le, Rat::one());
        for (tau, owners) in self.walls() {
            if owners.len() != 2 {
                continue;
            }
            let (a, b) = (owners[0], owners[1]);
            for &i in &tau {
                let mut row = vec![Rat::zero(); nv];
                for c in 0..n {
                    row[a * n + c] = rint(self.rays[i][c]);
                    row[b * n + c] = -rint(self.rays[i][c]);
                }
                lp.add(row, Rel::Eq, Rat::zero());
            }
            for (this, other) in [(a, b), (b, a)] {
                let j = *self.max_cones[other].iter().find(|x| !tau.contains(x)).unwrap();
                // m_this·b̄_j + s <= m_other·b̄_j
                let mut row = vec![Rat::zero(); nv];
                for c in 0..n {
                    row[this * n + c] += rint(self.rays[j][c]);
                    row[other * n + c] -= rint(self.rays[j][c]);
                }
                row[nv - 1] = Rat::one();
                lp.add(row, Rel::Le, Rat::zero());
            }
        }
        match lp.solve() {
            LpResult::Optimal { value, .. } if value.is_positive() => Ok(format!("slack {}", fmt_rat(&value))),
            _ => Err(FanError::NotSemiProjective),
        }
    }

    /// Ψ(k) and the minimal cone containing k̄.
    pub fn psi(&self, k: &[i64]) -> Result<(Vec<Rat>, Vec<usize>), FanError> {
        let kbar = self.bar(k);
        for c in &self.max_cones {
            let Some(coords) = self.cone_coords(c, &kbar) else { continue };
            if coords.iter().all(|x| !x.is_negative()) {
                let mut psi = vec![Rat::zero(); self.m()];
                let mut minimal = Vec::new();
                for (&j, x) in c.iter().zip(coords) {
                    if !x.is_zero() {
                        minimal.push(j);
                    }
                    psi[j] = x;
                }
                minimal.sort();
                return Ok((psi, minimal));
            }
        }
        Err(FanError::OutsideSupport(k.to_vec()))
    }

    pub fn in_support(&self, k: &[i64]) -> bool {
        self.psi(k).is_ok()
    }

    pub fn age(&self, k: &[i64]) -> Result<Rat, FanError> {
        Ok(self.psi(k)?.0.iter().sum())
    }

    /// Box(σ) for a maximal cone σ, zero first, then sorted.
    pub fn box_of_cone(&self, cone: &[usize]) -> Vec<NVec> {
        let n = self.rank;
        let b = IntMatrix::from_rows(&(0..n).map(|a| cone.iter().map(|&j| self.rays[j][a]).collect()).collect::<Vec<_>>());
        let (u, d, _) = smith_normal_form(&b);
        // coset representatives y with 0 <= y_i < d_i, x = U^{-1} y
        let uinv: Vec<Vec<Rat>> = {
            let um: Vec<Vec<Rat>> = (0..n).map(|i| (0..n).map(|j| Rat::from_integer(u.get(i, j).clone())).collect()).collect();
            (0..n)
                .map(|j| {
                    let mut e = vec![Rat::zero(); n];
                    e[j] = Rat::one();
                    solve_rat(&um, &e).unwrap()
                })
                .collect()
        };
        let mut reps: Vec<Vec<i64>> = vec![vec![]];
        for i in 0..n {
            let di = i64::try_from(d.get(i, i)).unwrap();
            reps = reps.into_iter().flat_map(|r| (0..di).map(move |y| { let mut r2 = r.clone(); r2.push(y); r2 })).collect();
        }
        let mut frees: BTreeSet<Vec<i64>> = BTreeSet::new();
        for y in reps {
            let x: Vec<Rat> = (0..n).map(|a| (0..n).map(|j| &uinv[j][a] * rint(y[j])).sum()).collect();
            let c = self.cone_coords(cone, &x).unwrap();
            let cf: Vec<Rat> = c.iter().map(crate::exactalg::frac).collect();
            let xr: Vec<i64> = (0..n)
                .map(|a| {
                    let s: Rat = cone.iter().zip(&cf).map(|(&j, cj)| cj * rint(self.rays[j][a])).sum();
                    assert!(s.is_integer());
                    i64::try_from(s.to_integer()).unwrap()
                })
                .collect();
            frees.insert(xr);
        }
        let tors = self.torsion_elements();
        let mut out = Vec::new();
        for f in &frees {
            for t in &tors {
                let mut v = f.clone();
                v.extend(t);
                out.push(v);
            }
        }
        out.sort_by(|a, b| {
            let za = a.iter().all(|&x| x == 0);
            let zb = b.iter().all(|&x| x == 0);
            zb.cmp(&za).then(a.cmp(b))
        });
        out
    }

    fn torsion_elements(&self) -> Vec<Vec<i64>> {
        let mut out: Vec<Vec<i64>> = vec![vec![]];
        for &d in &self.torsion {
            out = out.into_iter().flat_map(|r| (0..d).map(move |x| { let mut r2 = r.clone(); r2.push(x); r2 })).collect();
        }
        out
    }

    pub fn box_element(&self, v: &[i64]) -> Result<BoxElement, FanError> {
        let (psi, cone) = self.psi(v)?;
        let age = psi.iter().sum();
        Ok(BoxElement { v: v.to_vec(), cone, psi, age })
    }

    /// All Box elements over all cones, without repetition.
    pub fn box_elements(&self) -> Vec<BoxElement> {
        let mut seen: BTreeSet<NVec> = BTreeSet::new();
        let mut out = Vec::new();
        for c in &self.max_cones {
            for v in self.box_of_cone(c) {
                if seen.insert(v.clone()) {
                    out.push(self.box_element(&v).unwrap());
                }
            }
        }
        out.sort_by(|a, b| a.age.cmp(&b.age).then(a.v.cmp(&b.v)));
        out
    }

    pub fn fixed_point_weights(&self, cone: &[usize]) -> FixedPointData {
        let n = self.rank;
        let bm = self.cone_matrix(cone);
        // u = B^{-1} χ: column a of B^{-1} gives the χ_a-coefficients
        let mut weights = vec![vec![Rat::zero(); n]; self.m()];
        for a in 0..n {
            let mut e = vec![Rat::zero(); n];
            e[a] = Rat::one();
            let col = solve_rat(&bm, &e).expect("simplicial maximal cone");
            for (k, &j) in cone.iter().enumerate() {
                weights[j][a] = col[k].clone();
            }
        }
        let det = IntMatrix::from_rows(&(0..n).map(|a| cone.iter().map(|&j| self.rays[j][a]).collect()).collect::<Vec<_>>()).determinant();
        let order = i64::try_from(det * bi(self.torsion_order())).unwrap().abs();
        FixedPointData { cone: cone.to_vec(), weights, order }
    }

    /// The inverse Box element −v + Σ_{i∈σ(v)} b_i.
    pub fn inv_box(&self, cone: &[usize], v: &[i64]) -> Result<NVec, FanError> {
        let bx = self.box_of_cone(cone);
        if !bx.contains(&v.to_vec()) {
            return Err(FanError::NotInBox(v.to_vec(), cone.iter().map(|x| x + 1).collect()));
        }
        let (psi, _) = self.psi(v)?;
        let mut w = self.scale(v, -1);
        for &i in cone {
            if !psi[i].is_zero() {
                w = self.add(&w, &self.rays[i]);
            }
        }
        let w = self.reduce(&w);
        debug_assert!(bx.contains(&w));
        Ok(w)
    }

    /// Some(i) when v is the ray b_i.
    pub fn ray_index(&self, v: &[i64]) -> Option<usize> {
        self.rays.iter().position(|r| r.as_slice() == v)
    }
}

/// The worked examples: ℙ¹, ℙ(1,2), [ℂ²/μ₂], ℙ², ℙ(1,1,2) and Bμ₂.
pub mod examples {
    use super::StackyFan;

    pub fn p1() -> StackyFan {
        StackyFan::new(1, vec![], vec![vec![1], vec![-1]], vec![vec![0], vec![1]]).unwrap()
    }
    pub fn p12() -> StackyFan {
        StackyFan::new(1, vec![], vec![vec![2], vec![-1]], vec![vec![0], vec![1]]).unwrap()
    }
    pub fn c2mu2() -> StackyFan {
        StackyFan::new(2, vec![], vec![vec![0, 1], vec![2, 1]], vec![vec![0, 1]]).unwrap()
    }
    pub fn p2() -> StackyFan {
        StackyFan::new(2, vec![], vec![vec![1, 0], vec![0, 1], vec![-1, -1]], vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }
    pub fn p112() -> StackyFan {
        StackyFan::new(2, vec![], vec![vec![1, 0], vec![-1, 2], vec![0, -1]], vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }
    pub fn bmu2() -> StackyFan {
        StackyFan::new(0, vec![2], vec![], vec![vec![]]).unwrap()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::exactalg::rat;

    pub use super::examples::*;

    #[test]
    fn validation_examples() {
        for f in [p1(), p12(), c2mu2(), p2(), p112(), bmu2()] {
            let d = f.validate();
            assert!(d.ok(), "{:?}", d);
        }
        let triv = StackyFan::new(2, vec![], vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1]]).unwrap();
        assert!(triv.validate().ok());
        assert!(p1().is_complete() && p2().is_complete() && bmu2().is_complete());
        assert!(!c2mu2().is_complete() && !triv.is_complete());
        let bad = StackyFan::new(2, vec![], vec![vec![1, 0], vec![-1, 0]], vec![vec![0], vec![1]]).unwrap();
        assert_eq!(bad.validate().errors[0], FanError::NoFullCone(2));
        let dep = StackyFan::new(1, vec![], vec![vec![1], vec![-1]], vec![vec![0, 1]]).unwrap();
        assert!(matches!(dep.validate().errors[0], FanError::NonSimplicial { .. }));
    }

    #[test]
    fn nonconvex_and_overlap() {
        // three quadrants of ℤ²: support not convex
        let f = StackyFan::new(
            2,
            vec![],
            vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3]],
        )
        .unwrap();
        assert!(matches!(f.validate().errors[0], FanError::NonConvex { .. }));
        let o = StackyFan::new(1, vec![], vec![vec![1], vec![2]], vec![vec![0], vec![1]]).unwrap();
        assert!(matches!(o.validate().errors[0], FanError::Overlap(..)));
    }

    #[test]
    fn psi_examples() {
        let f = p12();
        assert_eq!(f.psi(&[1]).unwrap().0, vec![rat(1, 2), rint(0)]);
        assert_eq!(f.psi(&[2]).unwrap().0, vec![rint(1), rint(0)]);
        let c = c2mu2();
        assert_eq!(c.psi(&[1, 1]).unwrap().0, vec![rat(1, 2), rat(1, 2)]);
        assert!(c.psi(&[-1, 0]).is_err());
    }

    #[test]
    fn box_examples() {
        assert_eq!(p1().box_elements().len(), 1);
        let b = p12().box_elements();
        assert_eq!(b.iter().map(|x| x.v.clone()).collect::<Vec<_>>(), vec![vec![0], vec![1]]);
        assert_eq!(b[1].age, rat(1, 2));
        let c = c2mu2().box_elements();
        assert_eq!(c[1].v, vec![1, 1]);
        assert_eq!(c[1].age, rint(1));
        let bm = bmu2().box_elements();
        assert_eq!(bm.len(), 2);
        let q = p112().box_elements();
        assert_eq!(q.iter().map(|x| x.v.clone()).collect::<Vec<_>>(), vec![vec![0, 0], vec![0, 1]]);
    }

    #[test]
    fn weights_examples() {
        let f = p1();
        assert_eq!(f.fixed_point_weights(&[0]).weights[0], vec![rint(1)]);
        assert_eq!(f.fixed_point_weights(&[1]).weights[1], vec![rint(-1)]);
        let g = p12().fixed_point_weights(&[0]);
        assert_eq!(g.weights[0], vec![rat(1, 2)]);
        assert_eq!(g.order, 2);
        let c = c2mu2().fixed_point_weights(&[0, 1]);
        // χ = u1 b1 + u2 b2: u1 = χ2 - χ1/2, u2 = χ1/2
        assert_eq!(c.weights[0], vec![rat(-1, 2), rint(1)]);
        assert_eq!(c.weights[1], vec![rat(1, 2), rint(0)]);
        assert_eq!(c.order, 2);
        assert_eq!(bmu2().fixed_point_weights(&[]).order, 2);
    }

    #[test]
    fn inverse_box() {
        let f = p12();
        assert_eq!(f.inv_box(&[0], &[0]).unwrap(), vec![0]);
        assert_eq!(f.inv_box(&[0], &[1]).unwrap(), vec![1]);
        assert_eq!(c2mu2().inv_box(&[0, 1], &[1, 1]).unwrap(), vec![1, 1]);
        assert!(f.inv_box(&[1], &[1]).is_err());
    }
}
