//! Refined fan sequence, curve classes, Mori cone, ample grading and the
//! age pairing.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactalg::lp::{Lp, LpResult, Rel};
use crate::exactalg::{ceil_rat, floor_rat, frac, kernel_rat, rint, solve_rat, to_i64, Rat};
use crate::lattice::{hnf_rows, kernel, FgAbGroup, GaleDual, GroupHom, IntMatrix, QuotientGroup};
use crate::stackyfan::{FanError, NVec, StackyFan};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error("ample class pairs to {pairing} with wall class {wall:?}")]
    NotAmple { wall: Vec<i64>, pairing: String },
    #[error("ample class has {got} entries, expected {expected}")]
    AmpleLength { got: usize, expected: usize },
    #[error("class {0:?} is not in the curve lattice")]
    NotInLattice(Vec<String>),
    #[error("sigma0 index {0} is not a maximal cone")]
    BadSigma0(usize),
}

#[derive(Clone, Debug)]
pub struct RefinedFanData {
    pub fan: StackyFan,
    pub sigma0: usize,
    /// Generators (λ, k) of 𝕆: Box elements first (zero omitted), then rays.
    pub o_gens: Vec<(Vec<Rat>, NVec)>,
    pub o_group: FgAbGroup,
    /// Index of ℤ^m = ⟨(e_i,b_i)⟩ in 𝕆, as a finite group.
    pub o_mod_rays: FgAbGroup,
    /// Basis of 𝕃 = ker β in ℤ^m.
    pub l_basis: Vec<Vec<BigInt>>,
    /// Basis of Λ in ℚ^m.
    pub basis: Vec<Vec<Rat>>,
    /// Coordinates of ℚ^m outside σ₀; the basis restricted to them is invertible.
    complement: Vec<usize>,
    comp_inv: Vec<Vec<Rat>>,
}

fn lcm_denoms(vs: &[Vec<Rat>]) -> BigInt {
    let mut d = BigInt::one();
    for v in vs {
        for x in v {
            d = d.lcm(x.denom());
        }
    }
    d
}

impl RefinedFanData {
    pub fn new(fan: &StackyFan, sigma0: usize) -> Result<Self, CurveError> {
        if sigma0 >= fan.max_cones.len() {
            return Err(CurveError::BadSigma0(sigma0 + 1));
        }
        let m = fan.m();
        let n = fan.rank;
        let mut o_gens: Vec<(Vec<Rat>, NVec)> = Vec::new();
        for b in fan.box_elements() {
            if b.v.iter().any(|&x| x != 0) {
                o_gens.push((b.psi.clone(), b.v.clone()));
            }
        }
        let nbox = o_gens.len();
        for i in 0..m {
            let mut e = vec![Rat::zero(); m];
            e[i] = Rat::one();
            o_gens.push((e, fan.rays[i].clone()));
        }
        let s = o_gens.len();
        let den = lcm_denoms(&o_gens.iter().map(|g| g.0.clone()).collect::<Vec<_>>());
        let nt = FgAbGroup { rank: n, torsion: fan.torsion.iter().map(|&d| BigInt::from(d)).collect() };
        // 𝕆 ⊂ ℤ^m ⊕ N after scaling the ℚ^m part
        let amb = FgAbGroup { rank: m + n, torsion: nt.torsion.clone() };
        let mut mat = IntMatrix::zeros(amb.ngens(), s);
        for (j, (lam, k)) in o_gens.iter().enumerate() {
            for i in 0..m {
                mat.set(i, j, (&lam[i] * Rat::from_integer(den.clone())).to_integer());
            }
            for (a, x) in k.iter().enumerate() {
                mat.set(m + a, j, BigInt::from(*x));
            }
        }
        let emb = GroupHom::new(FgAbGroup::free(s), amb, mat).map_err(|_| CurveError::NotInLattice(vec![]))?;
        let rels = kernel(&emb);
        let o_group = QuotientGroup::new(s, &rels).group;
        // ℤ^m inside 𝕆: quotient by the ray generators as well
        let mut rels2 = rels.clone();
        for j in nbox..s {
            let mut e = vec![BigInt::zero(); s];
            e[j] = BigInt::one();
            rels2.push(e);
        }
        let o_mod_rays = QuotientGroup::new(s, &rels2).group;
        // Λ = ψ(ker(𝕆 → N))
        let mut nmat = IntMatrix::zeros(nt.ngens(), s);
        for (j, (_, k)) in o_gens.iter().enumerate() {
            for (a, x) in k.iter().enumerate() {
                nmat.set(a, j, BigInt::from(*x));
            }
        }
        let phi = GroupHom::new(FgAbGroup::free(s), nt.clone(), nmat).map_err(|_| CurveError::NotInLattice(vec![]))?;
        let kap = kernel(&phi);
        let scaled: Vec<Vec<BigInt>> = kap
            .iter()
            .map(|kv| {
                (0..m)
                    .map(|i| {
                        let x: Rat = kv.iter().zip(&o_gens).map(|(c, g)| Rat::from_integer(c.clone()) * &g.0[i]).sum();
                        (x * Rat::from_integer(den.clone())).to_integer()
                    })
                    .collect()
            })
            .collect();
        let lat = if m == 0 { vec![] } else { hnf_rows(&scaled) };
        let basis: Vec<Vec<Rat>> = lat
            .iter()
            .map(|r| r.iter().map(|x| Rat::new(x.clone(), den.clone())).collect())
            .collect();
        let beta = GroupHom::new(
            FgAbGroup::free(m),
            nt,
            IntMatrix::from_big_rows(
                &(0..fan.dim_n()).map(|a| (0..m).map(|i| BigInt::from(fan.rays[i][a])).collect()).collect::<Vec<_>>(),
                m,
            ),
        )
        .map_err(|_| CurveError::NotInLattice(vec![]))?;
        let l_basis = if m == 0 { vec![] } else { kernel(&beta) };
        let sig = &fan.max_cones[sigma0];
        let complement: Vec<usize> = (0..m).filter(|i| !sig.contains(i)).collect();
        let r = basis.len();
        assert_eq!(r, complement.len(), "curve lattice has rank m - n");
        let sub: Vec<Vec<Rat>> = (0..r).map(|a| (0..r).map(|k| basis[k][complement[a]].clone()).collect()).collect();
        let comp_inv: Vec<Vec<Rat>> = (0..r)
            .map(|a| {
                let mut e = vec![Rat::zero(); r];
                e[a] = Rat::one();
                solve_rat(&sub, &e).expect("complement coordinates determine the curve lattice")
            })
            .collect();
        let mut data = RefinedFanData { fan: fan.clone(), sigma0, o_gens, o_group, o_mod_rays, l_basis, basis, complement, comp_inv };
        data.orient_basis();
        Ok(data)
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn m(&self) -> usize {
        self.fan.m()
    }

    fn rebuild_inverse(&mut self) {
        let r = self.rank();
        let sub: Vec<Vec<Rat>> = (0..r).map(|a| (0..r).map(|k| self.basis[k][self.complement[a]].clone()).collect()).collect();
        self.comp_inv = (0..r)
            .map(|a| {
                let mut e = vec![Rat::zero(); r];
                e[a] = Rat::one();
                solve_rat(&sub, &e).unwrap()
            })
            .collect();
    }

    /// In rank one, orient the generator so that wall classes are positive.
    fn orient_basis(&mut self) {
        if self.rank() != 1 {
            return;
        }
        let walls = self.wall_classes_q();
        if let Some(w) = walls.first() {
            let c = self.to_lambda_rat(w).unwrap();
            if c[0].is_negative() {
                self.basis[0] = self.basis[0].iter().map(|x| -x).collect();
                self.rebuild_inverse();
            }
        }
    }

    /// Rational Λ-coordinates of d ∈ 𝕃_ℚ.
    pub fn to_lambda_rat(&self, d: &[Rat]) -> Option<Vec<Rat>> {
        let r = self.rank();
        let dc: Vec<Rat> = self.complement.iter().map(|&i| d[i].clone()).collect();
        // column a of comp_inv solves sub·x = e_a
        let c: Vec<Rat> = (0..r).map(|k| (0..r).map(|a| &self.comp_inv[a][k] * &dc[a]).sum()).collect();
        if self.from_lambda_rat(&c).as_slice() == d {
            Some(c)
        } else {
            None
        }
    }

    /// Integral Λ-coordinates of d, None if d ∉ Λ.
    pub fn to_lambda(&self, d: &[Rat]) -> Option<Vec<i64>> {
        let c = self.to_lambda_rat(d)?;
        if c.iter().all(|x| x.is_integer()) {
            Some(c.iter().map(|x| to_i64(&x.to_integer())).collect())
        } else {
            None
        }
    }

    pub fn from_lambda_rat(&self, q: &[Rat]) -> Vec<Rat> {
        (0..self.m()).map(|i| q.iter().zip(&self.basis).map(|(c, b)| c * &b[i]).sum()).collect()
    }

    pub fn from_lambda(&self, q: &[i64]) -> Vec<Rat> {
        self.from_lambda_rat(&q.iter().map(|&x| rint(x)).collect::<Vec<_>>())
    }

    /// s(x̄): coordinates of x̄ in the basis of σ₀, placed on σ₀'s rays.
    pub fn splitting(&self, k: &[i64]) -> Vec<Rat> {
        let sig = &self.fan.max_cones[self.sigma0];
        let c = self.fan.cone_coords(sig, &self.fan.bar(k)).expect("σ₀ is full-dimensional");
        let mut s = vec![Rat::zero(); self.m()];
        for (&j, x) in sig.iter().zip(c) {
            s[j] = x;
        }
        s
    }

    /// λ(k) = Ψ(k) − s(k̄) in Λ-coordinates.
    pub fn lambda_of(&self, k: &[i64]) -> Result<Vec<i64>, CurveError> {
        let (psi, _) = self.fan.psi(k)?;
        let d: Vec<Rat> = psi.iter().zip(self.splitting(k)).map(|(a, b)| a - b).collect();
        self.to_lambda(&d).ok_or_else(|| CurveError::NotInLattice(d.iter().map(crate::exactalg::fmt_rat).collect()))
    }

    /// d(k,l) = Ψ(k) + Ψ(l) − Ψ(k+l) in ℚ^m.
    pub fn dclass_q(&self, k: &[i64], l: &[i64]) -> Result<Vec<Rat>, CurveError> {
        let (a, _) = self.fan.psi(k)?;
        let (b, _) = self.fan.psi(l)?;
        let (c, _) = self.fan.psi(&self.fan.add(k, l))?;
        Ok((0..self.m()).map(|i| &a[i] + &b[i] - &c[i]).collect())
    }

    pub fn dclass(&self, k: &[i64], l: &[i64]) -> Result<Vec<i64>, CurveError> {
        let d = self.dclass_q(k, l)?;
        self.to_lambda(&d).ok_or_else(|| CurveError::NotInLattice(d.iter().map(crate::exactalg::fmt_rat).collect()))
    }

    /// Wall classes in ℚ^m, one per interior codimension-one face.
    pub fn wall_classes_q(&self) -> Vec<Vec<Rat>> {
        let fan = &self.fan;
        let mut out: Vec<Vec<Rat>> = Vec::new();
        for (tau, owners) in fan.walls() {
            if owners.len() != 2 {
                continue;
            }
            let s1 = &fan.max_cones[owners[0]];
            let s2 = &fan.max_cones[owners[1]];
            let i = *s1.iter().find(|x| !tau.contains(x)).unwrap();
            let j = *s2.iter().find(|x| !tau.contains(x)).unwrap();
            let idx: Vec<usize> = tau.iter().copied().chain([i, j]).collect();
            let rows: Vec<Vec<Rat>> = (0..fan.rank).map(|a| idx.iter().map(|&x| rint(fan.rays[x][a])).collect()).collect();
            let ker = kernel_rat(&rows, idx.len());
            let v = &ker[0];
            let pos_i = idx.iter().position(|&x| x == i).unwrap();
            let sign = if v[pos_i].is_negative() { -Rat::one() } else { Rat::one() };
            let mut w = vec![Rat::zero(); self.m()];
            for (p, &x) in idx.iter().enumerate() {
                w[x] = &v[p] * &sign;
            }
            out.push(w);
        }
        out
    }

    /// Primitive wall classes in Λ-coordinates, without repetition.
    pub fn wall_classes(&self) -> Vec<Vec<i64>> {
        let mut out: Vec<Vec<i64>> = Vec::new();
        for w in self.wall_classes_q() {
            let c = self.to_lambda_rat(&w).expect("wall class in the curve lattice");
            let den = c.iter().fold(BigInt::one(), |a, x| a.lcm(x.denom()));
            let ints: Vec<BigInt> = c.iter().map(|x| (x * Rat::from_integer(den.clone())).to_integer()).collect();
            let g = ints.iter().fold(BigInt::zero(), |a, x| a.gcd(x));
            let prim: Vec<i64> = ints.iter().map(|x| to_i64(&(x / &g))).collect();
            if !out.contains(&prim) {
                out.push(prim);
            }
        }
        out.sort();
        out
    }

    /// Lift of a functional on Λ to (ℚ^m)* vanishing on e_i for i ∈ σ₀.
    pub fn lift_functional(&self, omega: &[Rat]) -> Vec<Rat> {
        let r = self.rank();
        let mut a = vec![Rat::zero(); self.m()];
        // a_comp · basis_comp[k] = omega[k]  ⇒  a_comp = omega · sub^{-1}
        for (p, &i) in self.complement.iter().enumerate() {
            a[i] = (0..r).map(|k| &omega[k] * &self.comp_inv[p][k]).sum();
        }
        a
    }

    /// Pairing of a divisor vector a ∈ (ℚ^m)* with the Λ basis.
    pub fn restrict_functional(&self, a: &[Rat]) -> Vec<Rat> {
        self.basis.iter().map(|b| b.iter().zip(a).map(|(x, y)| x * y).sum()).collect()
    }

    /// True when the elements d(v,w) for v, w ∈ Box ∪ rays generate Λ.
    pub fn generated_by_dclasses(&self) -> bool {
        let mut pts: Vec<NVec> = self.fan.box_elements().into_iter().map(|b| b.v).collect();
        pts.extend(self.fan.rays.iter().cloned());
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        for a in &pts {
            for b in &pts {
                if let Ok(d) = self.dclass(a, b) {
                    rows.push(d.iter().map(|&x| BigInt::from(x)).collect());
                }
            }
        }
        let h = hnf_rows(&rows);
        if self.rank() == 0 {
            return true;
        }
        h.len() == self.rank() && (0..h.len()).map(|i| h[i][i].clone()).product::<BigInt>().abs().is_one()
    }
}

#[derive(Clone, Debug)]
pub struct MoriData {
    pub walls: Vec<Vec<i64>>,
    /// Ample class in Λ-dual coordinates.
    pub omega: Vec<Rat>,
    /// The same class as a divisor vector in (ℚ^m)*.
    pub omega_divisor: Vec<Rat>,
    /// Pairings ω·w with each wall, all positive.
    pub certificate: Vec<Rat>,
}

impl MoriData {
    pub fn new(rd: &RefinedFanData, ample: Option<&[Rat]>) -> Result<Self, CurveError> {
        let walls = rd.wall_classes();
        let r = rd.rank();
        let omega = match ample {
            Some(a) => {
                if a.len() != rd.m() {
                    return Err(CurveError::AmpleLength { got: a.len(), expected: rd.m() });
                }
                rd.restrict_functional(a)
            }
            None => default_ample(&walls, r),
        };
        let mut certificate = Vec::new();
        for w in &walls {
            let p: Rat = omega.iter().zip(w).map(|(a, &b)| a * rint(b)).sum();
            if !p.is_positive() {
                return Err(CurveError::NotAmple { wall: w.clone(), pairing: crate::exactalg::fmt_rat(&p) });
            }
            certificate.push(p);
        }
        let omega_divisor = match ample {
            Some(a) => a.to_vec(),
            None => rd.lift_functional(&omega),
        };
        Ok(MoriData { walls, omega, omega_divisor, certificate })
    }

    pub fn degree(&self, d: &[i64]) -> Rat {
        self.omega.iter().zip(d).map(|(a, &b)| a * rint(b)).sum()
    }

    pub fn is_effective(&self, d: &[i64]) -> bool {
        if d.iter().all(|&x| x == 0) {
            return true;
        }
        if self.walls.is_empty() {
            return false;
        }
        let mut lp = Lp::new(self.walls.len());
        for c in 0..d.len() {
            lp.add(self.walls.iter().map(|w| rint(w[c])).collect(), Rel::Eq, rint(d[c]));
        }
        !matches!(lp.solve(), LpResult::Infeasible)
    }

    /// All effective classes of degree at most dmax, sorted by degree.
    pub fn enumerate_effective(&self, dmax: &Rat) -> Vec<Vec<i64>> {
        let r = self.omega.len();
        if r == 0 {
            return vec![vec![]];
        }
        let mut lo = vec![Rat::zero(); r];
        let mut hi = vec![Rat::zero(); r];
        for w in &self.walls {
            let s = dmax / self.degree(w);
            for c in 0..r {
                let x = &s * rint(w[c]);
                if x < lo[c] {
                    lo[c] = x.clone();
                }
                if x > hi[c] {
                    hi[c] = x;
                }
            }
        }
        let ranges: Vec<(i64, i64)> = (0..r).map(|c| (to_i64(&floor_rat(&lo[c])), to_i64(&ceil_rat(&hi[c])))).collect();
        let mut pts: Vec<Vec<i64>> = vec![vec![]];
        for &(a, b) in &ranges {
            pts = pts.into_iter().flat_map(|p| (a..=b).map(move |x| { let mut q = p.clone(); q.push(x); q })).collect();
        }
        let mut out: Vec<Vec<i64>> = pts.into_iter().filter(|d| &self.degree(d) <= dmax && self.is_effective(d)).collect();
        out.sort_by(|a, b| self.degree(a).cmp(&self.degree(b)).then(a.cmp(b)));
        out
    }
}

/// ω minimizing Σ|ω_k| subject to ω·w ≥ 1 on all walls.
fn default_ample(walls: &[Vec<i64>], r: usize) -> Vec<Rat> {
    if walls.is_empty() {
        return vec![Rat::zero(); r];
    }
    // variables ω (free, r) and bounds a_k ≥ |ω_k|
    let mut lp = Lp::new(2 * r);
    for k in 0..r {
        lp.free[k] = true;
        lp.objective[r + k] = -Rat::one();
        let mut row = vec![Rat::zero(); 2 * r];
        row[k] = Rat::one();
        row[r + k] = -Rat::one();
        lp.add(row.clone(), Rel::Le, Rat::zero());
        row[k] = -Rat::one();
        lp.add(row, Rel::Le, Rat::zero());
    }
    for w in walls {
        let mut row = vec![Rat::zero(); 2 * r];
        for k in 0..r {
            row[k] = rint(w[k]);
        }
        lp.add(row, Rel::Ge, Rat::one());
    }
    match lp.solve() {
        LpResult::Optimal { x, .. } => x[..r].to_vec(),
        _ => panic!("Mori cone is not strongly convex"),
    }
}

/// The pairing between 𝕃^∨ and 𝕆 computed through the resolution
/// F = ℤ^rank ⊕ ℤ^#torsion of N.
#[derive(Clone, Debug)]
pub struct AgePairing {
    pub gale: GaleDual,
    pub m: usize,
    pub torsion: Vec<i64>,
    /// Pic^st and the lifts in (ℤ^m)* ⊕ K* of a generating set.
    pub pic_st: FgAbGroup,
    pub generators: Vec<Vec<BigInt>>,
    ray_tor: Vec<Vec<i64>>,
}

impl AgePairing {
    pub fn new(rd: &RefinedFanData) -> Self {
        let fan = &rd.fan;
        let m = fan.m();
        let t = fan.torsion.len();
        let beta = GroupHom::new(
            FgAbGroup::free(m),
            FgAbGroup { rank: fan.rank, torsion: fan.torsion.iter().map(|&d| BigInt::from(d)).collect() },
            IntMatrix::from_big_rows(
                &(0..fan.dim_n()).map(|a| (0..m).map(|i| BigInt::from(fan.rays[i][a])).collect()).collect::<Vec<_>>(),
                m,
            ),
        )
        .expect("ray map");
        let gale = crate::lattice::gale_dual(&beta);
        let mut ap = AgePairing { gale, m, torsion: fan.torsion.clone(), pic_st: FgAbGroup::free(0), generators: vec![], ray_tor: fan.rays.iter().map(|r| r[fan.rank..].to_vec()).collect() };
        // Pic^st as the image of the coordinate functionals in Hom(𝕆/ℤ^m, ℚ/ℤ)
        let boxes: Vec<(Vec<Rat>, NVec)> = rd.o_gens.iter().filter(|(_, k)| fan.ray_index(k).is_none()).cloned().collect();
        let basis: Vec<Vec<BigInt>> = (0..m + t)
            .map(|j| {
                let mut e = vec![BigInt::zero(); m + t];
                e[j] = BigInt::one();
                e
            })
            .collect();
        let tables: Vec<Vec<Rat>> = basis.iter().map(|xi| boxes.iter().map(|(l, k)| ap.age(xi, l, k)).collect()).collect();
        let den = lcm_denoms(&tables);
        if boxes.is_empty() || den.is_one() {
            return ap;
        }
        let nb = boxes.len();
        let target = FgAbGroup { rank: 0, torsion: vec![den.clone(); nb] };
        let mut mat = IntMatrix::zeros(nb, m + t);
        for (j, row) in tables.iter().enumerate() {
            for (b, x) in row.iter().enumerate() {
                mat.set(b, j, (x * Rat::from_integer(den.clone())).to_integer());
            }
        }
        let hom = GroupHom::new(FgAbGroup::free(m + t), target, mat).unwrap();
        let rels = kernel(&hom);
        ap.pic_st = QuotientGroup::new(m + t, &rels).group;
        ap.generators = basis.into_iter().zip(&tables).filter(|(_, row)| row.iter().any(|x| !x.is_zero())).map(|(e, _)| e).collect();
        ap
    }

    /// age(ξ, (λ, k)) in [0,1), with ξ given by a lift in (ℤ^m)* ⊕ K*.
    pub fn age(&self, xi: &[BigInt], lambda: &[Rat], k: &[i64]) -> Rat {
        let mut s = Rat::zero();
        for i in 0..self.m {
            s += Rat::from_integer(xi[i].clone()) * &lambda[i];
        }
        let rank = k.len() - self.torsion.len();
        for (j, &d) in self.torsion.iter().enumerate() {
            // torsion part of k̃ − β̃(λ), in units of the generator of K
            let mut x = rint(k[rank + j]);
            for i in 0..self.m {
                x -= &lambda[i] * rint(self.ray_tor[i][j]);
            }
            s += Rat::from_integer(xi[self.m + j].clone()) * x / rint(d);
        }
        frac(&s)
    }

    /// Phase of Q^d ∏ y_l^{a_l} under ξ: age(ξ,(d,0)) − Σ a_l age(ξ,(Ψ(l),l)).
    pub fn key_phase(&self, rd: &RefinedFanData, xi: &[BigInt], q: &[i64], ycols: &[NVec], y: &[u32]) -> Rat {
        let d = rd.from_lambda(q);
        let mut s = self.age(xi, &d, &rd.fan.zero());
        for (l, &a) in ycols.iter().zip(y) {
            let (psi, _) = rd.fan.psi(l).expect("extension point in support");
            s -= rint(a as i64) * self.age(xi, &psi, l);
        }
        frac(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;
    use crate::stackyfan::tests::{bmu2, c2mu2, p1, p112, p12, p2};

    fn bi(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn weighted_plane_lattices() {
        let rd = RefinedFanData::new(&p112(), 0).unwrap();
        assert_eq!(rd.basis, vec![vec![rat(1, 2), rat(1, 2), rint(1)]]);
        assert_eq!(rd.l_basis.len(), 1);
        // 𝕃 = ℤ(1,1,2) is twice the generator of Λ
        assert_eq!(rd.to_lambda(&[rint(1), rint(1), rint(2)]), Some(vec![2]));
        assert_eq!(rd.o_mod_rays.torsion, bi(&[2]));
        assert_eq!(rd.o_group.rank, 3);
        assert!(rd.o_group.torsion.is_empty());
        assert!(rd.generated_by_dclasses());
        let mori = MoriData::new(&rd, None).unwrap();
        assert_eq!(mori.walls, vec![vec![1]]);
    }

    #[test]
    fn gerbe_lattices() {
        let rd = RefinedFanData::new(&bmu2(), 0).unwrap();
        assert_eq!(rd.rank(), 0);
        assert_eq!(rd.o_group, FgAbGroup { rank: 0, torsion: bi(&[2]) });
        let mori = MoriData::new(&rd, None).unwrap();
        assert_eq!(mori.enumerate_effective(&rint(3)), vec![Vec::<i64>::new()]);
        let ap = AgePairing::new(&rd);
        assert_eq!(ap.pic_st.torsion, bi(&[2]));
        assert_eq!(ap.age(&bi(&[1]), &[], &[1]), rat(1, 2));
    }

    #[test]
    fn projective_line() {
        let rd = RefinedFanData::new(&p1(), 0).unwrap();
        assert_eq!(rd.basis, vec![vec![rint(1), rint(1)]]);
        assert_eq!(rd.dclass(&[1], &[-1]).unwrap(), vec![1]);
        assert_eq!(rd.lambda_of(&[-1]).unwrap(), vec![1]);
        assert_eq!(rd.lambda_of(&[1]).unwrap(), vec![0]);
        let mori = MoriData::new(&rd, None).unwrap();
        assert_eq!(mori.omega, vec![rint(1)]);
        assert_eq!(mori.enumerate_effective(&rint(3)), vec![vec![0], vec![1], vec![2], vec![3]]);
        assert!(!mori.is_effective(&[-1]));
        let ap = AgePairing::new(&rd);
        assert!(ap.pic_st.is_trivial());
    }

    #[test]
    fn weighted_line() {
        let rd = RefinedFanData::new(&p12(), 0).unwrap();
        assert_eq!(rd.basis, vec![vec![rat(1, 2), rint(1)]]);
        assert_eq!(rd.dclass(&[1], &[-1]).unwrap(), vec![1]);
        assert_eq!(rd.dclass(&[1], &[1]).unwrap(), vec![0]);
        assert_eq!(rd.lambda_of(&[1]).unwrap(), vec![0]);
        assert_eq!(rd.lambda_of(&[-1]).unwrap(), vec![1]);
        let mori = MoriData::new(&rd, None).unwrap();
        assert_eq!(mori.enumerate_effective(&rint(2)), vec![vec![0], vec![1], vec![2]]);
        let ap = AgePairing::new(&rd);
        assert_eq!(ap.pic_st.torsion, bi(&[2]));
        assert_eq!(ap.key_phase(&rd, &bi(&[1, 0]), &[1], &[], &[]), rat(1, 2));
        assert_eq!(ap.key_phase(&rd, &bi(&[1, 0]), &[0], &[vec![1]], &[1]), rat(1, 2));
        // ample class given as a divisor vector
        let m2 = MoriData::new(&rd, Some(&[rint(0), rint(1)])).unwrap();
        assert_eq!(m2.omega, vec![rint(1)]);
        assert!(MoriData::new(&rd, Some(&[rint(0), rint(-1)])).is_err());
    }

    #[test]
    fn quotient_and_plane() {
        let rd = RefinedFanData::new(&c2mu2(), 0).unwrap();
        assert_eq!(rd.rank(), 0);
        assert_eq!(rd.o_mod_rays.torsion, bi(&[2]));
        let ap = AgePairing::new(&rd);
        assert_eq!(ap.pic_st.order_of_torsion(), BigInt::from(2));
        let rd = RefinedFanData::new(&p2(), 0).unwrap();
        assert_eq!(rd.basis, vec![vec![rint(1), rint(1), rint(1)]]);
        let mori = MoriData::new(&rd, None).unwrap();
        assert_eq!(mori.walls, vec![vec![1]]);
        assert_eq!(rd.lift_functional(&mori.omega), vec![rint(0), rint(0), rint(1)]);
    }
}
