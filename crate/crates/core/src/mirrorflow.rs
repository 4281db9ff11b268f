//! Mirror map and quantum D-module data extracted from the localization series:
//! basis selection, Birkhoff factorization, connection matrices, quantum product,
//! grading and Galois checks, higher residue pairing.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::chenruan::LocalizedClass;
use crate::curves::AgePairing;
use crate::exactalg::{binomial, rint, Rat, RatFn, SeriesKey};
use crate::iseries::{LocSeries, MirrorSetup};
use crate::stackyfan::NVec;

#[derive(Debug, Error)]
pub enum MirrorError {
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("basis search exhausted at age {0} with rank {1} of {2}")]
    BasisBound(String, usize, usize),
    #[error("z-dependent connection entry ({row},{col}) at {key}")]
    ZDependent { key: String, row: usize, col: usize },
    #[error("pole in {0}")]
    Pole(String),
    #[error("directions do not generate the cohomology (rank {0} of {1})")]
    NotGenerated(usize, usize),
    #[error("bad direction: {0}")]
    Direction(String),
}

pub type Mat = Vec<Vec<RatFn>>;

pub fn mat_zero(nv: usize, r: usize, c: usize) -> Mat {
    vec![vec![RatFn::zero(nv); c]; r]
}

pub fn mat_id(nv: usize, n: usize) -> Mat {
    let mut m = mat_zero(nv, n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = RatFn::one(nv);
    }
    m
}

pub fn mat_mul(a: &Mat, b: &Mat, nv: usize) -> Mat {
    let (r, k, c) = (a.len(), b.len(), b.first().map_or(0, |x| x.len()));
    let mut out = mat_zero(nv, r, c);
    for i in 0..r {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..c {
                if !b[l][j].is_zero() {
                    out[i][j] = &out[i][j] + &(&a[i][l] * &b[l][j]);
                }
            }
        }
    }
    out
}

pub fn mat_add(a: &Mat, b: &Mat) -> Mat {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect()).collect()
}

pub fn mat_sub(a: &Mat, b: &Mat) -> Mat {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p - q).collect()).collect()
}

pub fn mat_map(a: &Mat, f: impl Fn(&RatFn) -> RatFn) -> Mat {
    a.iter().map(|x| x.iter().map(&f).collect()).collect()
}

pub fn mat_is_zero(a: &Mat) -> bool {
    a.iter().all(|r| r.iter().all(|x| x.is_zero()))
}

/// Gauss–Jordan inverse over the fraction field.
pub fn mat_inv(a: &Mat, nv: usize) -> Option<Mat> {
    let n = a.len();
    let mut m = a.clone();
    let mut inv = mat_id(nv, n);
    for col in 0..n {
        let p = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, p);
        inv.swap(col, p);
        let pinv = m[col][col].inv();
        for j in 0..n {
            m[col][j] = &m[col][j] * &pinv;
            inv[col][j] = &inv[col][j] * &pinv;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for j in 0..n {
                let t = &f * &m[col][j];
                m[r][j] = &m[r][j] - &t;
                let t = &f * &inv[col][j];
                inv[r][j] = &inv[r][j] - &t;
            }
        }
    }
    Some(inv)
}

/// Rank over the fraction field; `cols` are column vectors.
pub fn rank_of_columns(cols: &[Vec<RatFn>]) -> usize {
    let mut rows: Vec<Vec<RatFn>> = cols.to_vec();
    let mut rank = 0;
    let width = rows.first().map_or(0, |r| r.len());
    for c in 0..width {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else { continue };
        rows.swap(rank, p);
        let pinv = rows[rank][c].inv();
        for r in rank + 1..rows.len() {
            if rows[r][c].is_zero() {
                continue;
            }
            let f = &rows[r][c] * &pinv;
            for j in c..width {
                let t = &f * &rows[rank][j];
                rows[r][j] = &rows[r][j] - &t;
            }
        }
        rank += 1;
    }
    rank
}

/// Coefficient of z^{-1} in the expansion at z = ∞ of a proper function.
pub fn zinv_coeff(f: &RatFn) -> RatFn {
    let nv = f.nvars();
    if f.is_zero() {
        return RatFn::zero(nv);
    }
    let den = f.den_poly();
    let b = den.degree_in(0);
    if b == 0 {
        return RatFn::zero(nv);
    }
    let a = f.numer().degree_in(0);
    assert!(a < b, "zinv_coeff of a non-proper function");
    if a + 1 < b {
        return RatFn::zero(nv);
    }
    RatFn::from_poly(f.numer().coeff_in(0, b - 1)).div_poly(&den.coeff_in(0, b), &[])
}

/// Truncated series of matrices.
#[derive(Clone, Debug)]
pub struct MatSeries {
    pub setup_profile: crate::exactalg::Profile,
    pub nvars: usize,
    pub rows: usize,
    pub cols: usize,
    pub coeffs: BTreeMap<SeriesKey, Mat>,
}

impl MatSeries {
    pub fn new(profile: &crate::exactalg::Profile, nvars: usize, rows: usize, cols: usize) -> Self {
        MatSeries { setup_profile: profile.clone(), nvars, rows, cols, coeffs: BTreeMap::new() }
    }

    pub fn constant(profile: &crate::exactalg::Profile, nvars: usize, key0: SeriesKey, m: Mat) -> Self {
        let mut s = Self::new(profile, nvars, m.len(), m.first().map_or(0, |r| r.len()));
        s.add_at(&key0, &m);
        s
    }

    pub fn get(&self, k: &SeriesKey) -> Mat {
        self.coeffs.get(k).cloned().unwrap_or_else(|| mat_zero(self.nvars, self.rows, self.cols))
    }

    pub fn add_at(&mut self, k: &SeriesKey, m: &Mat) {
        if !self.setup_profile.contains(k) || mat_is_zero(m) {
            return;
        }
        let e = self.coeffs.entry(k.clone()).or_insert_with(|| mat_zero(self.nvars, self.rows, self.cols));
        *e = mat_add(e, m);
        if mat_is_zero(e) {
            self.coeffs.remove(k);
        }
    }

    pub fn from_columns(cols: &[LocSeries]) -> Self {
        let p = &cols[0];
        let mut s = Self::new(&p.profile, p.nvars, p.width, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (k, v) in &c.coeffs {
                let mut m = mat_zero(p.nvars, p.width, cols.len());
                for (i, x) in v.values.iter().enumerate() {
                    m[i][j] = x.clone();
                }
                s.add_at(k, &m);
            }
        }
        s
    }

    pub fn column(&self, j: usize) -> LocSeries {
        let mut out = LocSeries::new(self.setup_profile.clone(), self.nvars, self.rows);
        for (k, m) in &self.coeffs {
            let cls = LocalizedClass { values: m.iter().map(|r| r[j].clone()).collect() };
            if !cls.is_zero() {
                out.add_class(k, &cls);
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut s = self.clone();
        for (k, m) in &o.coeffs {
            s.add_at(k, m);
        }
        s
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.map(|x| -x))
    }

    pub fn map(&self, f: impl Fn(&RatFn) -> RatFn) -> Self {
        let mut s = Self::new(&self.setup_profile, self.nvars, self.rows, self.cols);
        for (k, m) in &self.coeffs {
            s.add_at(k, &mat_map(m, &f));
        }
        s
    }

    pub fn map_keys(&self, f: impl Fn(&SeriesKey, &Mat) -> Option<(SeriesKey, Mat)>) -> Self {
        let mut s = Self::new(&self.setup_profile, self.nvars, self.rows, self.cols);
        for (k, m) in &self.coeffs {
            if let Some((k2, m2)) = f(k, m) {
                s.add_at(&k2, &m2);
            }
        }
        s
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut s = Self::new(&self.setup_profile, self.nvars, self.rows, o.cols);
        for (ka, a) in &self.coeffs {
            for (kb, b) in &o.coeffs {
                let k = ka.add(kb);
                if self.setup_profile.contains(&k) {
                    s.add_at(&k, &mat_mul(a, b, self.nvars));
                }
            }
        }
        s
    }

    pub fn left_mul_const(&self, a: &Mat) -> Self {
        self.map_keys(|k, m| Some((k.clone(), mat_mul(a, m, self.nvars))))
    }

    pub fn right_mul_const(&self, a: &Mat) -> Self {
        self.map_keys(|k, m| Some((k.clone(), mat_mul(m, a, self.nvars))))
    }

    /// Inverse of a square series whose constant term is invertible.
    pub fn inverse(&self, keys: &[SeriesKey]) -> Result<Self, MirrorError> {
        let k0 = &keys[0];
        let a0inv = mat_inv(&self.get(k0), self.nvars).ok_or_else(|| MirrorError::Singular("constant term".into()))?;
        let mut x = Self::new(&self.setup_profile, self.nvars, self.rows, self.cols);
        x.add_at(k0, &a0inv);
        for k in &keys[1..] {
            let mut acc = mat_zero(self.nvars, self.rows, self.cols);
            for (ka, a) in &self.coeffs {
                if ka == k0 {
                    continue;
                }
                if let Some(rest) = k.sub(ka) {
                    if let Some(xr) = x.coeffs.get(&rest) {
                        acc = mat_add(&acc, &mat_mul(a, xr, self.nvars));
                    }
                }
            }
            let xk = mat_map(&mat_mul(&a0inv, &acc, self.nvars), |e| -e);
            x.add_at(k, &xk);
        }
        Ok(x)
    }

    /// Keep keys accepted by `f`.
    pub fn restrict(&self, f: impl Fn(&SeriesKey) -> bool) -> Self {
        self.map_keys(|k, m| if f(k) { Some((k.clone(), m.clone())) } else { None })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(mat_is_zero)
    }

    /// First key and entry where some coefficient depends on z.
    pub fn z_dependence(&self) -> Option<(SeriesKey, usize, usize)> {
        for (k, m) in &self.coeffs {
            for (i, r) in m.iter().enumerate() {
                for (j, x) in r.iter().enumerate() {
                    if x.depends_on_z() {
                        return Some((k.clone(), i, j));
                    }
                }
            }
        }
        None
    }
}

/// A coordinate direction of the base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Direction {
    /// zϑ_i, acting on Loc by u_i + z D_i·Q∂_Q (0-based ray index).
    Theta(usize),
    /// z∂_{t_i} (0-based ray index).
    T(usize),
    /// z∂_{y_l} (0-based index into G).
    Y(usize),
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Theta(i) => write!(f, "theta{}", i + 1),
            Direction::T(i) => write!(f, "t{}", i + 1),
            Direction::Y(l) => write!(f, "y{}", l + 1),
        }
    }
}

impl Direction {
    pub fn parse(s: &str) -> Result<Self, MirrorError> {
        let (tag, num) = s.split_at(s.find(|c: char| c.is_ascii_digit()).ok_or_else(|| MirrorError::Direction(s.into()))?);
        let n: usize = num.parse().map_err(|_| MirrorError::Direction(s.into()))?;
        if n == 0 {
            return Err(MirrorError::Direction(s.into()));
        }
        match tag {
            "theta" => Ok(Direction::Theta(n - 1)),
            "t" => Ok(Direction::T(n - 1)),
            "y" => Ok(Direction::Y(n - 1)),
            _ => Err(MirrorError::Direction(s.into())),
        }
    }

    fn check(&self, setup: &MirrorSetup) -> Result<(), MirrorError> {
        let ok = match self {
            Direction::Theta(i) | Direction::T(i) => *i < setup.m(),
            Direction::Y(l) => *l < setup.g(),
        };
        if ok {
            Ok(())
        } else {
            Err(MirrorError::Direction(self.to_string()))
        }
    }

    /// Whether a key stays exact after differentiating in this direction.
    pub fn exact_at(&self, setup: &MirrorSetup, k: &SeriesKey) -> bool {
        match self {
            Direction::Theta(_) => true,
            Direction::T(_) => k.t_order() < setup.profile.tord,
            Direction::Y(_) => k.y_order() < setup.profile.yord,
        }
    }
}

/// Basis members k_1..k_N with Loc⁰ matrix L₀ and its inverse.
#[derive(Clone, Debug)]
pub struct BasisSelection {
    pub members: Vec<NVec>,
    pub l0: Mat,
    pub l0_inv: Mat,
}

/// Lattice points of the support with age ≤ `max_age`, ordered by age, then
/// ℓ¹-height of k̄, then lexicographically larger Ψ(k) first.
pub fn support_points(setup: &MirrorSetup, max_age: &Rat) -> Vec<NVec> {
    let fan = setup.fan();
    let mut pts: Vec<NVec> = Vec::new();
    for cone in &fan.max_cones {
        for v in fan.box_of_cone(cone) {
            let base_age = setup.age(&v);
            if &base_age > max_age {
                continue;
            }
            let room = (max_age - &base_age).floor().to_integer();
            let room = u32::try_from(room).unwrap_or(0);
            for c in crate::exactalg::series::multi_indices(cone.len(), room) {
                let mut k = v.clone();
                for (&i, &ci) in cone.iter().zip(&c) {
                    if ci > 0 {
                        k = fan.add(&k, &fan.scale(&fan.rays[i], ci as i64));
                    }
                }
                if !pts.contains(&k) {
                    pts.push(k);
                }
            }
        }
    }
    let height = |k: &NVec| -> Rat { fan.bar(k).iter().map(|x| if x < &Rat::zero() { -x } else { x.clone() }).sum() };
    pts.sort_by(|a, b| {
        setup
            .age(a)
            .cmp(&setup.age(b))
            .then_with(|| height(a).cmp(&height(b)))
            .then_with(|| setup.psi(b).cmp(&setup.psi(a)))
    });
    pts
}

/// Greedy choice of N = Σ|N(σ)| points whose Loc⁰ classes are independent.
pub fn select_basis(setup: &MirrorSetup) -> Result<BasisSelection, MirrorError> {
    let n = setup.model.len();
    let max_dim = setup.fan().rank as i64 + 1;
    let mut members: Vec<NVec> = Vec::new();
    let mut cols: Vec<Vec<RatFn>> = Vec::new();
    let mut bound = 1i64;
    loop {
        for k in support_points(setup, &rint(bound)) {
            if members.len() == n {
                break;
            }
            if members.contains(&k) {
                continue;
            }
            let c = setup.loc_zero(&k).values;
            let mut trial = cols.clone();
            trial.push(c.clone());
            if rank_of_columns(&trial) > cols.len() {
                cols.push(c);
                members.push(k);
            }
        }
        if members.len() == n {
            break;
        }
        if bound > max_dim + 2 {
            return Err(MirrorError::BasisBound(bound.to_string(), members.len(), n));
        }
        bound += 1;
    }
    basis_from_members(setup, &members)
}

/// Basis from explicitly chosen points.
pub fn basis_from_members(setup: &MirrorSetup, members: &[NVec]) -> Result<BasisSelection, MirrorError> {
    let n = setup.model.len();
    if members.len() != n {
        return Err(MirrorError::Singular(format!("{} members for rank {}", members.len(), n)));
    }
    let nv = setup.nvars();
    let mut l0 = mat_zero(nv, n, n);
    for (j, k) in members.iter().enumerate() {
        for (i, v) in setup.loc_zero(k).values.into_iter().enumerate() {
            l0[i][j] = v;
        }
    }
    let l0_inv = mat_inv(&l0, nv).ok_or_else(|| MirrorError::Singular("Loc⁰ matrix of the basis".into()))?;
    Ok(BasisSelection { members: members.iter().map(|k| setup.fan().reduce(k)).collect(), l0, l0_inv })
}

/// All keys of the profile with effective Q-part, sorted by weight.
pub fn profile_keys(setup: &MirrorSetup) -> Vec<SeriesKey> {
    let qs = setup.mori.enumerate_effective(&setup.profile.qdeg);
    setup.profile.keys(&qs, setup.m(), setup.g())
}

/// L = M·Y with M = I + (proper in z) and Y polynomial in z, Y₀ = L₀.
pub fn birkhoff_factorize(l: &MatSeries, keys: &[SeriesKey]) -> Result<(MatSeries, MatSeries), MirrorError> {
    let nv = l.nvars;
    let n = l.rows;
    let k0 = &keys[0];
    let y0 = l.get(k0);
    let y0inv = mat_inv(&y0, nv).ok_or_else(|| MirrorError::Singular("L₀".into()))?;
    let mut m = MatSeries::constant(&l.setup_profile, nv, k0.clone(), mat_id(nv, n));
    let mut y = MatSeries::constant(&l.setup_profile, nv, k0.clone(), y0);
    for k in &keys[1..] {
        let mut r = l.get(k);
        for (km, mm) in &m.coeffs {
            if km == k0 || km == k {
                continue;
            }
            if let Some(rest) = k.sub(km) {
                if let Some(yr) = y.coeffs.get(&rest) {
                    r = mat_sub(&r, &mat_mul(mm, yr, nv));
                }
            }
        }
        let ry = mat_mul(&r, &y0inv, nv);
        let prop = mat_map(&ry, |x| x.split().prop);
        let pol = mat_map(&ry, |x| x.split().pol);
        m.add_at(k, &prop);
        y.add_at(k, &mat_mul(&pol, &y.get(k0), nv));
    }
    Ok((m, y))
}

/// The mirror data for one setup and basis.
#[derive(Clone, Debug)]
pub struct Mirror {
    pub setup: MirrorSetup,
    pub basis: BasisSelection,
    pub keys: Vec<SeriesKey>,
    /// Columns Loc(Ω_j).
    pub l: MatSeries,
    pub m: MatSeries,
    pub y: MatSeries,
    pub tau: LocSeries,
    /// T_j = Loc⁰(Ω_j) at z = 0, as columns.
    pub tmat: Mat,
    pub tmat_inv: Mat,
}

impl Mirror {
    pub fn new(setup: &MirrorSetup, basis: BasisSelection) -> Result<Self, MirrorError> {
        let nv = setup.nvars();
        let keys = profile_keys(setup);
        let cols: Vec<LocSeries> = basis.members.iter().map(|k| setup.loc_series(k)).collect();
        let l = MatSeries::from_columns(&cols);
        let (m, y) = birkhoff_factorize(&l, &keys)?;
        let one = setup.model.one_class();
        let mut tau = setup.zero_series();
        for (k, mk) in &m.coeffs {
            if k.is_zero() {
                continue;
            }
            let vals: Vec<RatFn> = mk
                .iter()
                .map(|row| {
                    let mut s = RatFn::zero(nv);
                    for (x, o) in row.iter().zip(&one.values) {
                        if !o.is_zero() {
                            s = &s + &(x * o);
                        }
                    }
                    zinv_coeff(&s)
                })
                .collect();
            tau.add_class(k, &LocalizedClass { values: vals });
        }
        let tmat = mat_map(&basis.l0, at_z_zero);
        let tmat_inv = mat_inv(&tmat, nv).ok_or_else(|| MirrorError::Singular("T-basis".into()))?;
        Ok(Mirror { setup: setup.clone(), basis, keys, l, m, y, tau, tmat, tmat_inv })
    }

    pub fn nvars(&self) -> usize {
        self.setup.nvars()
    }

    pub fn n(&self) -> usize {
        self.basis.members.len()
    }

    fn key0(&self) -> SeriesKey {
        self.keys[0].clone()
    }

    /// Coordinates of τ in the T-basis, per key.
    pub fn tau_coords(&self) -> BTreeMap<SeriesKey, Vec<RatFn>> {
        let nv = self.nvars();
        self.tau
            .coeffs
            .iter()
            .map(|(k, c)| {
                let col: Mat = c.values.iter().map(|x| vec![x.clone()]).collect();
                (k.clone(), mat_mul(&self.tmat_inv, &col, nv).into_iter().map(|r| r[0].clone()).collect())
            })
            .collect()
    }

    /// Coordinates c with Loc(w_k ω) = Σ_j c_j Loc(Ω_j), as an N×1 series.
    pub fn expand_in_basis(&self, k: &[i64]) -> Result<MatSeries, MirrorError> {
        let linv = self.l.inverse(&self.keys)?;
        let col = MatSeries::from_columns(&[self.setup.loc_series(k)]);
        Ok(linv.mul(&col))
    }

    /// D_a applied to a fixed-point-valued matrix series.
    fn apply_direction(&self, dir: &Direction, x: &MatSeries) -> MatSeries {
        let nv = self.nvars();
        let z = RatFn::z(nv);
        match dir {
            Direction::Theta(i) => {
                let u = self.setup.u_class(*i);
                let ux = x.map_keys(|k, m| Some((k.clone(), m.iter().zip(&u.values).map(|(r, w)| r.iter().map(|e| e * w).collect()).collect())));
                ux.add(&self.q_derivative(*i, x).map(|e| e * &z))
            }
            Direction::T(i) => self.t_derivative(*i, x).map(|e| e * &z),
            Direction::Y(l) => self.y_derivative(*l, x).map(|e| e * &z),
        }
    }

    /// D_i·Q∂_Q.
    fn q_derivative(&self, i: usize, x: &MatSeries) -> MatSeries {
        let nv = self.nvars();
        x.map_keys(|k, m| {
            let d = self.setup.rd.from_lambda(&k.q);
            let c = RatFn::constant(nv, d[i].clone());
            Some((k.clone(), mat_map(m, |e| e * &c)))
        })
    }

    fn t_derivative(&self, i: usize, x: &MatSeries) -> MatSeries {
        let nv = self.nvars();
        x.map_keys(|k, m| {
            if k.t[i] == 0 {
                return None;
            }
            let mut k2 = k.clone();
            k2.t[i] -= 1;
            let c = RatFn::constant(nv, rint(k.t[i] as i64));
            Some((k2, mat_map(m, |e| e * &c)))
        })
    }

    fn y_derivative(&self, l: usize, x: &MatSeries) -> MatSeries {
        let nv = self.nvars();
        x.map_keys(|k, m| {
            if k.y[l] == 0 {
                return None;
            }
            let mut k2 = k.clone();
            k2.y[l] -= 1;
            let c = RatFn::constant(nv, rint(k.y[l] as i64));
            Some((k2, mat_map(m, |e| e * &c)))
        })
    }

    /// ∂_a without the factor z and without the u-part.
    fn plain_derivative(&self, dir: &Direction, x: &MatSeries) -> MatSeries {
        match dir {
            Direction::Theta(i) => self.q_derivative(*i, x),
            Direction::T(i) => self.t_derivative(*i, x),
            Direction::Y(l) => self.y_derivative(*l, x),
        }
    }

    /// Gauss–Manin matrix B_a in the Ω-basis: D_a L = L·B_a.
    pub fn gm_matrix(&self, dir: &Direction) -> Result<MatSeries, MirrorError> {
        dir.check(&self.setup)?;
        let linv = self.l.inverse(&self.keys)?;
        let b = linv.mul(&self.apply_direction(dir, &self.l));
        Ok(b.restrict(|k| dir.exact_at(&self.setup, k)))
    }

    /// Â_a = Y B_a Y⁻¹ − z (∂_a Y) Y⁻¹ in fixed-point coordinates; asserted z-free.
    pub fn quantum_connection(&self, dir: &Direction) -> Result<MatSeries, MirrorError> {
        let b = self.gm_matrix(dir)?;
        let z = RatFn::z(self.nvars());
        let yinv = self.y.inverse(&self.keys)?;
        let a = self.y.mul(&b).mul(&yinv).sub(&self.plain_derivative(dir, &self.y).mul(&yinv).map(|e| e * &z));
        let a = a.restrict(|k| dir.exact_at(&self.setup, k));
        if let Some((k, row, col)) = a.z_dependence() {
            return Err(MirrorError::ZDependent { key: format!("{:?}", k), row, col });
        }
        Ok(a)
    }

    /// A fixed-point-coordinate matrix series rewritten in the T-basis.
    pub fn in_tbasis(&self, a: &MatSeries) -> MatSeries {
        a.left_mul_const(&self.tmat_inv).right_mul_const(&self.tmat)
    }

    /// Θ(w_k ω) = Y·c_k with c_k from `expand_in_basis`.
    pub fn theta_image(&self, k: &[i64]) -> Result<LocSeries, MirrorError> {
        Ok(self.y.mul(&self.expand_in_basis(k)?).column(0))
    }

    /// Θ(w_k ω) at z = 0.
    pub fn p_class(&self, k: &[i64]) -> Result<LocSeries, MirrorError> {
        let t = self.theta_image(k)?;
        let mut out = self.setup.zero_series();
        for (key, c) in &t.coeffs {
            if c.values.iter().any(|x| !x.is_z_polynomial()) {
                return Err(MirrorError::Pole(format!("Θ(w_{:?}) at {:?}", k, key)));
            }
            out.add_class(key, &LocalizedClass { values: c.values.iter().map(at_z_zero).collect() });
        }
        Ok(out)
    }

    /// The quantum product at τ, generated by the connection matrices of `dirs`.
    pub fn star_algebra(&self, dirs: &[Direction]) -> Result<StarAlgebra, MirrorError> {
        let nv = self.nvars();
        let n = self.n();
        let mats: Vec<MatSeries> = dirs.iter().map(|d| self.quantum_connection(d)).collect::<Result<_, _>>()?;
        let exact = |k: &SeriesKey| dirs.iter().all(|d| d.exact_at(&self.setup, k));
        let keys: Vec<SeriesKey> = self.keys.iter().filter(|k| exact(k)).cloned().collect();
        let one = MatSeries::from_columns(&[self.setup.zero_series_with(&self.key0(), &self.setup.model.one_class())]);
        let id = MatSeries::constant(&self.setup.profile, nv, self.key0(), mat_id(nv, n));
        // monomials in the connection matrices, breadth first, kept when the class A^μ·1 is new at q = 0
        let mut words: Vec<MatSeries> = vec![id];
        let mut vecs: Vec<Vec<RatFn>> = vec![one.get(&self.key0()).iter().map(|r| r[0].clone()).collect()];
        let mut frontier = vec![0usize];
        while words.len() < n && !frontier.is_empty() {
            let mut next = Vec::new();
            for &w in &frontier {
                for a in &mats {
                    if words.len() == n {
                        break;
                    }
                    let cand = a.mul(&words[w]).restrict(exact);
                    let v: Vec<RatFn> = cand.mul(&one).get(&self.key0()).iter().map(|r| r[0].clone()).collect();
                    let mut trial = vecs.clone();
                    trial.push(v.clone());
                    if rank_of_columns(&trial) > vecs.len() {
                        vecs.push(v);
                        words.push(cand);
                        next.push(words.len() - 1);
                    }
                }
            }
            frontier = next;
        }
        if words.len() < n {
            return Err(MirrorError::NotGenerated(words.len(), n));
        }
        let cols: Vec<LocSeries> = words.iter().map(|w| w.mul(&one).column(0)).collect();
        let vinv = MatSeries::from_columns(&cols).inverse(&keys)?.restrict(exact);
        Ok(StarAlgebra { words, vinv, keys, nvars: nv })
    }

    /// P_k ⋆ P_l − Q^{d(k,l)} P_{k+l}; zero when the product transports correctly.
    pub fn quantum_product_defect(&self, alg: &StarAlgebra, k: &[i64], l: &[i64]) -> Result<LocSeries, MirrorError> {
        let pk = self.p_class(k)?;
        let pl = self.p_class(l)?;
        let prod = alg.multiply(&pk, &pl);
        let fan = self.setup.fan();
        let q = self.setup.rd.dclass(k, l).map_err(|e| MirrorError::Singular(e.to_string()))?;
        let mut shift = SeriesKey::zero(self.setup.rank(), self.setup.m(), self.setup.g());
        shift.q = q;
        let rhs = self.p_class(&fan.add(k, l))?.shift(&shift);
        Ok(alg.truncate(&prod.sub(&rhs)))
    }

    /// P_k ⋆ P_l expanded in the T-basis.
    pub fn quantum_product(&self, alg: &StarAlgebra, k: &[i64], l: &[i64]) -> Result<BTreeMap<SeriesKey, Vec<RatFn>>, MirrorError> {
        let prod = alg.multiply(&self.p_class(k)?, &self.p_class(l)?);
        Ok(self.class_coords(&prod))
    }

    pub fn class_coords(&self, s: &LocSeries) -> BTreeMap<SeriesKey, Vec<RatFn>> {
        let nv = self.nvars();
        s.coeffs
            .iter()
            .map(|(k, c)| {
                let col: Mat = c.values.iter().map(|x| vec![x.clone()]).collect();
                (k.clone(), mat_mul(&self.tmat_inv, &col, nv).into_iter().map(|r| r[0].clone()).collect())
            })
            .collect()
    }

    /// (ℰ + Gr₀)τ = τ and homogeneity of the Θ columns.
    pub fn euler_grading_check(&self) -> Result<(), String> {
        if self.setup.model.is_specialized() {
            return Err("grading needs symbolic chi".into());
        }
        if let Some(e) = self.setup.homogeneity_violation(&self.tau, &Rat::one()) {
            return Err(format!("tau: {}", e));
        }
        for (j, k) in self.basis.members.iter().enumerate() {
            if let Some(e) = self.setup.homogeneity_violation(&self.y.column(j), &self.setup.age(k)) {
                return Err(format!("Theta column {}: {}", j + 1, e));
            }
        }
        Ok(())
    }

    /// Galois invariance of τ and equivariance of the Θ columns.
    pub fn galois_check(&self) -> Result<(), String> {
        if let Some(e) = self.setup.galois_violation(&self.tau, &|_| Rat::zero()) {
            return Err(format!("tau: {}", e));
        }
        let ap = AgePairing::new(&self.setup.rd);
        for (j, k) in self.basis.members.iter().enumerate() {
            let pk = self.setup.psi(k);
            let expected = |xi: &[BigInt]| ap.age(xi, &pk, k);
            if let Some(e) = self.setup.galois_violation(&self.y.column(j), &expected) {
                return Err(format!("Theta column {}: {}", j + 1, e));
            }
        }
        Ok(())
    }

    /// ∂τ/∂y_l at the origin must be φ_l for every l ∈ S (rays through t).
    pub fn tau_derivative_check(&self) -> Result<(), String> {
        let s = &self.setup;
        for (j, l) in s.s.iter().enumerate() {
            let mut key = SeriesKey::zero(s.rank(), s.m(), s.g());
            if j < s.m() {
                if s.profile.tord == 0 {
                    continue;
                }
                key.t[j] = 1;
            } else {
                if s.profile.yord == 0 {
                    continue;
                }
                key.y[j - s.m()] = 1;
            }
            let want = s.model.phi_class(l).map_err(|e| e.to_string())?;
            if self.tau.get(&key) != want {
                return Err(format!("derivative of tau along {:?} is not phi", l));
            }
        }
        Ok(())
    }

    /// Higher residue pairing matrix P_ij = (Loc(Ω_i)|_{z→−z}, Loc(Ω_j)) per key.
    pub fn pairing_matrix(&self) -> Result<BTreeMap<SeriesKey, Mat>, MirrorError> {
        Ok(self.pair_columns(&self.l))
    }

    /// Poincaré pairing of the Θ images, which must equal the higher residue pairing.
    pub fn theta_pairing_matrix(&self) -> BTreeMap<SeriesKey, Mat> {
        self.pair_columns(&self.y)
    }

    fn pair_columns(&self, x: &MatSeries) -> BTreeMap<SeriesKey, Mat> {
        let nv = self.nvars();
        let n = self.n();
        let model = &self.setup.model;
        let mut out: BTreeMap<SeriesKey, Mat> = BTreeMap::new();
        let neg: BTreeMap<&SeriesKey, Mat> = x.coeffs.iter().map(|(k, m)| (k, mat_map(m, |e| e.negate_z()))).collect();
        for (ka, a) in &neg {
            for (kb, b) in &x.coeffs {
                let k = ka.add(kb);
                if !self.setup.profile.contains(&k) {
                    continue;
                }
                let slot = out.entry(k).or_insert_with(|| mat_zero(nv, n, n));
                for i in 0..n {
                    let ai = LocalizedClass { values: a.iter().map(|r| r[i].clone()).collect() };
                    if ai.is_zero() {
                        continue;
                    }
                    for j in 0..n {
                        let bj = LocalizedClass { values: b.iter().map(|r| r[j].clone()).collect() };
                        if bj.is_zero() {
                            continue;
                        }
                        slot[i][j] = &slot[i][j] + &model.ab_pairing(&ai, &bj);
                    }
                }
            }
        }
        out.retain(|_, m| !mat_is_zero(m));
        out
    }
}

impl Mirror {
    /// Keys on which a product of the two direction matrices and their derivatives is exact.
    fn exact_pair(&self, a: &Direction, b: &Direction, k: &SeriesKey) -> bool {
        let p = &self.setup.profile;
        let count = |f: fn(&Direction) -> bool| [a, b].iter().filter(|d| f(d)).count() as u32;
        let nt = count(|d| matches!(d, Direction::T(_)));
        let ny = count(|d| matches!(d, Direction::Y(_)));
        k.t_order() + nt <= p.tord && k.y_order() + ny <= p.yord
    }

    /// Integrability of the Gauss–Manin system along a, b:
    /// B_a B_b + z∂_a B_b − B_b B_a − z∂_b B_a.
    pub fn gm_flatness_defect(&self, a: &Direction, b: &Direction) -> Result<MatSeries, MirrorError> {
        let z = RatFn::z(self.nvars());
        let ba = self.gm_matrix(a)?;
        let bb = self.gm_matrix(b)?;
        let lhs = ba.mul(&bb).add(&self.plain_derivative(a, &bb).map(|e| e * &z));
        let rhs = bb.mul(&ba).add(&self.plain_derivative(b, &ba).map(|e| e * &z));
        Ok(lhs.sub(&rhs).restrict(|k| self.exact_pair(a, b, k)))
    }

    /// Flatness of the quantum connection: since Â is z-free, [Â_a, Â_b] and
    /// ∂_a Â_b − ∂_b Â_a vanish separately. Returns (commutator, curl).
    pub fn quantum_flatness_defect(&self, a: &Direction, b: &Direction) -> Result<(MatSeries, MatSeries), MirrorError> {
        let aa = self.quantum_connection(a)?;
        let ab = self.quantum_connection(b)?;
        let comm = aa.mul(&ab).sub(&ab.mul(&aa)).restrict(|k| self.exact_pair(a, b, k));
        let curl = self.plain_derivative(a, &ab).sub(&self.plain_derivative(b, &aa)).restrict(|k| self.exact_pair(a, b, k));
        Ok((comm, curl))
    }

    /// All base directions of the setup.
    pub fn directions(&self) -> Vec<Direction> {
        let s = &self.setup;
        let mut out: Vec<Direction> = (0..s.m()).map(Direction::Theta).collect();
        if s.profile.tord > 0 {
            out.extend((0..s.m()).map(Direction::T));
        }
        if s.profile.yord > 0 {
            out.extend((0..s.g()).map(Direction::Y));
        }
        out
    }
}

/// Δ_{(σ,v)}(−z)·Δ_{(σ,inv v)}(z) must have no positive powers of z up to `order`.
pub fn bernoulli_cancellation(setup: &MirrorSetup, order: usize) -> Result<(), String> {
    let model = &setup.model;
    let fan = setup.fan();
    let nv = setup.nvars();
    for (i, key) in model.keys.iter().enumerate() {
        let inv = fan.inv_box(&fan.max_cones[key.cone], &key.v).map_err(|e| e.to_string())?;
        let j = model
            .key_index(&crate::chenruan::FixedKey { cone: key.cone, v: inv.clone() })
            .ok_or_else(|| format!("inverse of {:?} is not a fixed-point key", key.v))?;
        let a = bernoulli_delta(setup, i, order).series;
        let b = bernoulli_delta(setup, j, order).series;
        for n in 1..=order {
            let mut c = RatFn::zero(nv);
            for p in 0..=n {
                let t = &a[p] * &b[n - p];
                c = if p % 2 == 1 { &c - &t } else { &c + &t };
            }
            if !c.is_zero() {
                return Err(format!("key {:?} of cone {}: z^{} coefficient {}", key.v, key.cone + 1, n, c));
            }
        }
    }
    Ok(())
}

/// z = 0 value of a z-polynomial.
pub fn at_z_zero(x: &RatFn) -> RatFn {
    assert!(x.is_z_polynomial(), "z = 0 of a function with a z-pole");
    x.z_coeffs().into_iter().next().unwrap_or_else(|| RatFn::zero(x.nvars()))
}

/// Quantum product reconstructed from connection matrices: words A^μ with
/// A^μ·1 spanning, and the inverse of the matrix of those classes.
#[derive(Clone, Debug)]
pub struct StarAlgebra {
    pub words: Vec<MatSeries>,
    pub vinv: MatSeries,
    /// Keys on which the product is exact.
    pub keys: Vec<SeriesKey>,
    nvars: usize,
}

impl StarAlgebra {
    /// Multiplication matrix of a class: Σ_μ (V⁻¹α)_μ A^μ.
    pub fn mult_matrix(&self, a: &LocSeries) -> MatSeries {
        let c = self.vinv.mul(&MatSeries::from_columns(&[a.clone()]));
        let mut out = MatSeries::new(&self.words[0].setup_profile, self.nvars, self.words[0].rows, self.words[0].cols);
        for (mu, w) in self.words.iter().enumerate() {
            let mut coeff = MatSeries::new(&w.setup_profile, self.nvars, w.rows, w.rows);
            for (k, m) in &c.coeffs {
                let mut d = mat_zero(self.nvars, w.rows, w.rows);
                for (i, row) in d.iter_mut().enumerate() {
                    row[i] = m[mu][0].clone();
                }
                coeff.add_at(k, &d);
            }
            out = out.add(&coeff.mul(w));
        }
        self.truncate_mat(&out)
    }

    pub fn multiply(&self, a: &LocSeries, b: &LocSeries) -> LocSeries {
        let m = self.mult_matrix(a);
        self.truncate(&m.mul(&MatSeries::from_columns(&[b.clone()])).column(0))
    }

    fn truncate_mat(&self, m: &MatSeries) -> MatSeries {
        m.restrict(|k| self.keys.contains(k))
    }

    pub fn truncate(&self, s: &LocSeries) -> LocSeries {
        let mut out = LocSeries::new(s.profile.clone(), s.nvars, s.width);
        for (k, c) in &s.coeffs {
            if self.keys.contains(k) {
                out.add_class(k, c);
            }
        }
        out
    }
}

/// Bernoulli numbers B_0..B_n with B_1 = −1/2.
pub fn bernoulli_numbers(n: usize) -> Vec<Rat> {
    let mut b = vec![Rat::one()];
    for m in 1..=n {
        let mut s = Rat::zero();
        for (j, bj) in b.iter().enumerate() {
            s += Rat::from_integer(binomial(m as u32 + 1, j as u32)) * bj;
        }
        b.push(-s / rint(m as i64 + 1));
    }
    b
}

/// B_k(h) from t e^{ht}/(e^t − 1).
pub fn bernoulli_poly(k: usize, h: &Rat) -> Rat {
    let b = bernoulli_numbers(k);
    (0..=k).map(|j| Rat::from_integer(binomial(k as u32, j as u32)) * &b[j] * h.pow((k - j) as i32)).sum()
}

/// Δ_{(σ,v)}(z) = (1/|N(σ)|) ∏_{i∈σ} u_i^{-1/2} · exp(series); the square roots are kept
/// symbolically as the list `sqrt_inv` and the exponential as z-coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct BernoulliDelta {
    pub scale: Rat,
    pub sqrt_inv: Vec<RatFn>,
    /// Coefficients of z^0..z^order, functions of χ.
    pub series: Vec<RatFn>,
}

pub fn bernoulli_delta(setup: &MirrorSetup, key_index: usize, order: usize) -> BernoulliDelta {
    let model = &setup.model;
    let nv = setup.nvars();
    let key = &model.keys[key_index];
    let cone = &setup.fan().max_cones[key.cone];
    let psi = setup.psi(&key.v);
    // exponent E(z) = −Σ_i Σ_{k≥2} B_k(v_i)/(k(k−1)) (z/u_i)^{k−1}
    let mut expo = vec![RatFn::zero(nv); order + 1];
    for &i in cone {
        let u = model.weight(key.cone, i);
        let uinv = u.inv();
        for k in 2..=order + 1 {
            let c = bernoulli_poly(k, &psi[i]) / rint((k * (k - 1)) as i64);
            expo[k - 1] = &expo[k - 1] - &uinv.pow((k - 1) as u32).scale(&c);
        }
    }
    BernoulliDelta {
        scale: Rat::one() / rint(model.data[key.cone].order),
        sqrt_inv: cone.iter().map(|&i| model.weight(key.cone, i)).collect(),
        series: series_exp(&expo, nv),
    }
}

/// exp of a z-series with zero constant term.
pub fn series_exp(e: &[RatFn], nv: usize) -> Vec<RatFn> {
    let n = e.len();
    // f' = e' f
    let mut f = vec![RatFn::zero(nv); n];
    if n == 0 {
        return f;
    }
    f[0] = RatFn::one(nv);
    for k in 1..n {
        let mut s = RatFn::zero(nv);
        for j in 1..=k {
            s = &s + &(&e[j].scale(&rint(j as i64)) * &f[k - j]);
        }
        f[k] = s.scale(&(Rat::one() / rint(k as i64)));
    }
    f
}

/// Substitutes χ = s·dir and takes s → 0 entrywise.
pub fn nonequivariant_limit(a: &MatSeries, dir: &[Rat]) -> Result<BTreeMap<SeriesKey, Vec<Vec<Rat>>>, MirrorError> {
    let mut out = BTreeMap::new();
    for (k, m) in &a.coeffs {
        let lm: Vec<Vec<Rat>> = m
            .iter()
            .map(|r| r.iter().map(|x| x.limit_along(dir).map_err(|e| MirrorError::Pole(format!("{:?}: {}", k, e)))).collect::<Result<_, _>>())
            .collect::<Result<_, _>>()?;
        if lm.iter().any(|r| r.iter().any(|x| !x.is_zero())) {
            out.insert(k.clone(), lm);
        }
    }
    Ok(out)
}

/// Product of two rational matrix series (for non-equivariant checks).
pub fn rat_series_mul(
    a: &BTreeMap<SeriesKey, Vec<Vec<Rat>>>,
    b: &BTreeMap<SeriesKey, Vec<Vec<Rat>>>,
    profile: &crate::exactalg::Profile,
) -> BTreeMap<SeriesKey, Vec<Vec<Rat>>> {
    let mut out: BTreeMap<SeriesKey, Vec<Vec<Rat>>> = BTreeMap::new();
    for (ka, x) in a {
        for (kb, y) in b {
            let k = ka.add(kb);
            if !profile.contains(&k) {
                continue;
            }
            let n = x.len();
            let c = y[0].len();
            let slot = out.entry(k).or_insert_with(|| vec![vec![Rat::zero(); c]; n]);
            for i in 0..n {
                for l in 0..y.len() {
                    for j in 0..c {
                        slot[i][j] += &x[i][l] * &y[l][j];
                    }
                }
            }
        }
    }
    out.retain(|_, m| m.iter().any(|r| r.iter().any(|x| !x.is_zero())));
    out
}

/// Power series of (1 + x)^{e} up to x^n.
pub fn binomial_series(e: &Rat, n: usize) -> Vec<Rat> {
    let mut out = vec![Rat::one()];
    for k in 1..=n {
        let prev = out[k - 1].clone();
        out.push(prev * (e - rint(k as i64 - 1)) / rint(k as i64));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;
    use crate::stackyfan::tests::{c2mu2, p1, p12, p2};
    use crate::stackyfan::StackyFan;

    fn setup(fan: &StackyFan, ext: &[NVec], q: i64, t: u32, y: u32) -> MirrorSetup {
        MirrorSetup::new(fan, 0, ext, None, rint(q), t, y, None).unwrap()
    }

    fn key(q: &[i64], t: &[u32], y: &[u32]) -> SeriesKey {
        SeriesKey { q: q.to_vec(), t: t.to_vec(), y: y.to_vec() }
    }

    fn c(nv: usize, x: Rat) -> RatFn {
        RatFn::constant(nv, x)
    }

    #[test]
    fn scalar_birkhoff() {
        // L = 1/(1 − Q/z) = Σ Q^n z^{-n}: all proper, so M = L and Y = 1
        let s = setup(&p1(), &[], 4, 0, 0);
        let keys = profile_keys(&s);
        let nv = s.nvars();
        let mut l = MatSeries::new(&s.profile, nv, 1, 1);
        for k in &keys {
            l.add_at(k, &vec![vec![RatFn::z(nv).inv().pow(k.q[0] as u32)]]);
        }
        let (m, y) = birkhoff_factorize(&l, &keys).unwrap();
        assert!(m.sub(&l).is_zero());
        assert_eq!(y.coeffs.len(), 1);
        // no deformation
        let l0 = MatSeries::constant(&s.profile, nv, keys[0].clone(), vec![vec![&RatFn::z(nv) + &RatFn::one(nv)]]);
        let (m, y) = birkhoff_factorize(&l0, &keys).unwrap();
        assert!(m.sub(&MatSeries::constant(&s.profile, nv, keys[0].clone(), mat_id(nv, 1))).is_zero());
        assert!(y.sub(&l0).is_zero());
    }

    #[test]
    fn greedy_bases() {
        assert_eq!(select_basis(&setup(&p1(), &[], 1, 0, 0)).unwrap().members, vec![vec![0], vec![1]]);
        assert_eq!(select_basis(&setup(&p12(), &[], 1, 0, 0)).unwrap().members, vec![vec![0], vec![1], vec![-1]]);
        assert_eq!(select_basis(&setup(&c2mu2(), &[], 0, 0, 0)).unwrap().members, vec![vec![0, 0], vec![1, 1]]);
        assert_eq!(select_basis(&setup(&p2(), &[], 1, 0, 0)).unwrap().members.len(), 3);
    }

    #[test]
    fn weighted_line_matrices_and_mirror_map() {
        let s = setup(&p12(), &[vec![1]], 2, 0, 4);
        let basis = basis_from_members(&s, &[vec![0], vec![-1], vec![1]]).unwrap();
        let mir = Mirror::new(&s, basis).unwrap();
        let nv = s.nvars();
        for a in mir.directions() {
            for b in mir.directions() {
                assert!(mir.gm_flatness_defect(&a, &b).unwrap().is_zero(), "{} {}", a, b);
                let (c, d) = mir.quantum_flatness_defect(&a, &b).unwrap();
                assert!(c.is_zero() && d.is_zero(), "{} {}", a, b);
            }
        }
        // τ = y 𝟙₁
        let coords = mir.tau_coords();
        assert_eq!(coords.len(), 1);
        let v = &coords[&key(&[0], &[0, 0], &[1])];
        assert_eq!(v, &vec![RatFn::zero(nv), RatFn::zero(nv), RatFn::one(nv)]);
        let chi = RatFn::var(nv, 1);
        let b = mir.gm_matrix(&Direction::Theta(1)).unwrap();
        let half = |x: i64| c(nv, rat(x, 2));
        let z0 = RatFn::zero(nv);
        let one = RatFn::one(nv);
        assert_eq!(b.get(&key(&[0], &[0, 0], &[0])), vec![vec![z0.clone(), z0.clone(), z0.clone()], vec![one.clone(), -&chi, z0.clone()], vec![z0.clone(); 3]]);
        assert_eq!(b.get(&key(&[1], &[0, 0], &[0])), vec![vec![z0.clone(), z0.clone(), one.clone()], vec![z0.clone(); 3], vec![z0.clone(), c(nv, rint(2)), z0.clone()]]);
        assert_eq!(b.get(&key(&[1], &[0, 0], &[1])), vec![vec![z0.clone(), one.clone(), z0.clone()], vec![z0.clone(); 3], vec![z0.clone(); 3]]);
        assert_eq!(b.coeffs.len(), 3);
        let by = mir.gm_matrix(&Direction::Y(0)).unwrap();
        assert_eq!(by.get(&key(&[0], &[0, 0], &[0])), vec![vec![z0.clone(), z0.clone(), &chi * &half(1)], vec![z0.clone(), z0.clone(), half(1)], vec![one.clone(), z0.clone(), z0.clone()]]);
        assert_eq!(by.get(&key(&[0], &[0, 0], &[1])), vec![vec![z0.clone(); 3], vec![z0.clone(); 3], vec![z0.clone(), z0.clone(), half(-1)]]);
        assert_eq!(by.get(&key(&[1], &[0, 0], &[0])), vec![vec![z0.clone(), one.clone(), z0.clone()], vec![z0.clone(); 3], vec![z0.clone(); 3]]);
        assert_eq!(by.coeffs.len(), 3);
        for d in [Direction::Theta(0), Direction::Theta(1), Direction::Y(0)] {
            mir.quantum_connection(&d).unwrap();
        }
        mir.euler_grading_check().unwrap();
        mir.galois_check().unwrap();
        mir.tau_derivative_check().unwrap();
    }

    #[test]
    fn a1_mirror_map_is_arcsine() {
        let s = setup(&c2mu2(), &[vec![1, 1]], 0, 0, 6);
        let basis = select_basis(&s).unwrap();
        let mir = Mirror::new(&s, basis).unwrap();
        let nv = s.nvars();
        let coords = mir.tau_coords();
        let want = [(1u32, rat(1, 1)), (3, rat(1, 24)), (5, rat(3, 640))];
        assert_eq!(coords.len(), 3);
        for (e, cf) in want {
            assert_eq!(coords[&key(&[], &[0, 0], &[e])], vec![RatFn::zero(nv), c(nv, cf)]);
        }
        mir.euler_grading_check().unwrap();
        mir.galois_check().unwrap();
        mir.quantum_connection(&Direction::Y(0)).unwrap();
        // 𝟙_{2b₃} = 4u₁u₂/(4−y²) 𝟙₀ + (z − 2(u₁+u₂)) y/(4−y²) 𝟙_{b₃}, with u_i the weights dual to b_i
        let e = mir.expand_in_basis(&[2, 2]).unwrap();
        let (z, c1, c2) = (RatFn::z(nv), s.model.weight(0, 0), s.model.weight(0, 1));
        for n in 0..=6u32 {
            let m = e.get(&key(&[], &[0, 0], &[n]));
            let (w0, w1) = if n % 2 == 0 {
                (c(nv, Rat::one() / rint(4i64.pow(n / 2))).scale(&rint(1)), RatFn::zero(nv))
            } else {
                (RatFn::zero(nv), c(nv, Rat::one() / rint(4i64.pow(n / 2 + 1))))
            };
            let w0 = &w0 * &(&c1 * &c2);
            let w1 = &w1 * &(&z - &(&c1 + &c2).scale(&rint(2)));
            assert_eq!(m, vec![vec![w0], vec![w1]], "y^{}", n);
        }
    }

    #[test]
    fn p1_product_and_pairing() {
        let s = setup(&p1(), &[], 3, 1, 0);
        let mir = Mirror::new(&s, select_basis(&s).unwrap()).unwrap();
        let alg = mir.star_algebra(&[Direction::Theta(0), Direction::Theta(1)]).unwrap();
        assert!(mir.quantum_product_defect(&alg, &[1], &[-1]).unwrap().is_zero());
        assert!(mir.quantum_product_defect(&alg, &[1], &[1]).unwrap().is_zero());
        assert!(mir.quantum_product_defect(&alg, &[0], &[1]).unwrap().is_zero());
        mir.euler_grading_check().unwrap();
        mir.tau_derivative_check().unwrap();
        let p = mir.pairing_matrix().unwrap();
        let pt = mir.theta_pairing_matrix();
        for (k, m) in &p {
            for i in 0..2 {
                for j in 0..2 {
                    assert!(m[i][j].is_z_polynomial());
                    assert_eq!(m[i][j], m[j][i].negate_z());
                }
            }
            assert_eq!(&pt[k], m);
        }
    }

    #[test]
    fn bernoulli_factor() {
        assert_eq!(bernoulli_numbers(4), vec![rint(1), rat(-1, 2), rat(1, 6), rint(0), rat(-1, 30)]);
        assert_eq!(bernoulli_poly(2, &rint(0)), rat(1, 6));
        let s = setup(&c2mu2(), &[], 0, 0, 0);
        let nv = s.nvars();
        let d0 = bernoulli_delta(&s, 0, 0);
        assert_eq!(d0.series, vec![RatFn::one(nv)]);
        assert_eq!(d0.scale, rat(1, 2));
        let d1 = bernoulli_delta(&s, 0, 1);
        let want = s.model.data[0].cone.iter().fold(RatFn::zero(nv), |acc, &i| &acc - &s.model.weight(0, i).inv().scale(&rat(1, 12)));
        assert_eq!(d1.series[1], want);
        bernoulli_cancellation(&s, 6).unwrap();
        bernoulli_cancellation(&setup(&p12(), &[], 0, 0, 0), 6).unwrap();
    }

    #[test]
    fn p2_hyperplane_cube() {
        let s = setup(&p2(), &[vec![1, 1]], 2, 0, 0);
        let mir = Mirror::new(&s, select_basis(&s).unwrap()).unwrap();
        let a = mir.quantum_connection(&Direction::Theta(2)).unwrap();
        let model = &s.model;
        let h = model.phi_class(&[-1, -1]).unwrap();
        let h2 = model.cr_times(&h, &h);
        let nv = s.nvars();
        let mut p = mat_zero(nv, 3, 3);
        for (j, cl) in [model.one_class(), h, h2].iter().enumerate() {
            for i in 0..3 {
                p[i][j] = cl.values[i].clone();
            }
        }
        let pinv = mat_inv(&p, nv).unwrap();
        let ah = a.left_mul_const(&pinv).right_mul_const(&p);
        let lim = nonequivariant_limit(&ah, &[rint(1), rint(3)]).unwrap();
        let cube = rat_series_mul(&rat_series_mul(&lim, &lim, &s.profile), &lim, &s.profile);
        let mut want = BTreeMap::new();
        want.insert(key(&[1], &[0, 0, 0], &[0]), vec![vec![rint(1), rint(0), rint(0)], vec![rint(0), rint(1), rint(0)], vec![rint(0), rint(0), rint(1)]]);
        assert_eq!(cube, want);
    }
}
