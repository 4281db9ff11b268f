//! Integer linear algebra over finitely generated abelian groups.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Int = BigInt;

pub fn bi(x: i64) -> Int {
    BigInt::from(x)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Int>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Int::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, bi(*v));
            }
        }
        m
    }

    pub fn from_big_rows(rows: &[Vec<Int>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &Int {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Int) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<Int> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<Int> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, o: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, o.rows);
        let mut r = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let v = r.get(i, j) + a * o.get(k, j);
                    r.set(i, j, v);
                }
            }
        }
        r
    }

    pub fn mul_vec(&self, v: &[Int]) -> Vec<Int> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    pub fn determinant(&self) -> Int {
        assert_eq!(self.rows, self.cols);
        // Bareiss fraction-free elimination
        let n = self.rows;
        if n == 0 {
            return Int::one();
        }
        let mut m: Vec<Vec<Int>> = (0..n).map(|i| self.row(i)).collect();
        let mut sign = Int::one();
        let mut prev = Int::one();
        for k in 0..n {
            if m[k][k].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else { return Int::zero() };
                m.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                    m[i][j] = v;
                }
            }
            prev = m[k][k].clone();
        }
        sign * &m[n - 1][n - 1]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row_a += f * row_b
    fn add_row(&mut self, a: usize, b: usize, f: &Int) {
        for j in 0..self.cols {
            let v = self.get(a, j) + f * self.get(b, j);
            self.set(a, j, v);
        }
    }

    /// col_a += f * col_b
    fn add_col(&mut self, a: usize, b: usize, f: &Int) {
        for i in 0..self.rows {
            let v = self.get(i, a) + f * self.get(i, b);
            self.set(i, a, v);
        }
    }

    fn neg_row(&mut self, a: usize) {
        for j in 0..self.cols {
            let v = -self.get(a, j);
            self.set(a, j, v);
        }
    }
}

/// Smith normal form: returns (U, D, V) with U·A·V = D.
pub fn smith_normal_form(a: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let mut d = a.clone();
    let mut u = IntMatrix::identity(a.rows);
    let mut v = IntMatrix::identity(a.cols);
    let n = a.rows.min(a.cols);
    for t in 0..n {
        // smallest nonzero entry of the remaining block as pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..d.rows {
            for j in t..d.cols {
                let x = d.get(i, j);
                if !x.is_zero() && best.map_or(true, |(bi_, bj)| x.abs() < d.get(bi_, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..d.rows {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let q = d.get(i, t).div_floor(d.get(t, t));
                d.add_row(i, t, &-&q);
                u.add_row(i, t, &-&q);
                if !d.get(i, t).is_zero() {
                    d.swap_rows(t, i);
                    u.swap_rows(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..d.cols {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let q = d.get(t, j).div_floor(d.get(t, t));
                d.add_col(j, t, &-&q);
                v.add_col(j, t, &-&q);
                if !d.get(t, j).is_zero() {
                    d.swap_cols(t, j);
                    v.swap_cols(t, j);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            let p = d.get(t, t).clone();
            let mut bad = None;
            'find: for i in t + 1..d.rows {
                for j in t + 1..d.cols {
                    if !(d.get(i, j) % &p).is_zero() {
                        bad = Some(i);
                        break 'find;
                    }
                }
            }
            match bad {
                Some(i) => {
                    d.add_row(t, i, &Int::one());
                    u.add_row(t, i, &Int::one());
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            d.neg_row(t);
            u.neg_row(t);
        }
    }
    (u, d, v)
}

pub fn snf_diagonal(a: &IntMatrix) -> Vec<Int> {
    let (_, d, _) = smith_normal_form(a);
    (0..d.rows.min(d.cols)).map(|i| d.get(i, i).clone()).filter(|x| !x.is_zero()).collect()
}

/// Row-style Hermite normal form basis of the lattice spanned by the rows.
pub fn hnf_rows(rows: &[Vec<Int>]) -> Vec<Vec<Int>> {
    if rows.is_empty() {
        return vec![];
    }
    let cols = rows[0].len();
    let mut m: Vec<Vec<Int>> = rows.to_vec();
    let mut r = 0;
    for c in 0..cols {
        loop {
            let nz: Vec<usize> = (r..m.len()).filter(|&i| !m[i][c].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| m[i][c].abs()).unwrap();
            m.swap(r, p);
            let mut done = true;
            for i in r + 1..m.len() {
                if !m[i][c].is_zero() {
                    let q = m[i][c].div_floor(&m[r][c]);
                    let pr = m[r].clone();
                    for (x, y) in m[i].iter_mut().zip(&pr) {
                        *x -= &q * y;
                    }
                    if !m[i][c].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if r < m.len() && !m[r][c].is_zero() {
            if m[r][c].is_negative() {
                for x in m[r].iter_mut() {
                    *x = -x.clone();
                }
            }
            for i in 0..r {
                let q = m[i][c].div_floor(&m[r][c]);
                if !q.is_zero() {
                    let pr = m[r].clone();
                    for (x, y) in m[i].iter_mut().zip(&pr) {
                        *x -= &q * y;
                    }
                }
            }
            r += 1;
        }
    }
    m.truncate(r);
    m
}

/// Integer kernel basis of A (vectors x with A x = 0), as columns of V.
pub fn integer_kernel(a: &IntMatrix) -> Vec<Vec<Int>> {
    let (_, d, v) = smith_normal_form(a);
    let rank = (0..d.rows.min(d.cols)).filter(|&i| !d.get(i, i).is_zero()).count();
    let basis: Vec<Vec<Int>> = (rank..a.cols).map(|j| v.col(j)).collect();
    hnf_rows(&basis)
}

/// Solve A x = b over the integers; None when no integer solution exists.
pub fn solve_integer(a: &IntMatrix, b: &[Int]) -> Option<Vec<Int>> {
    let (u, d, v) = smith_normal_form(a);
    let ub = u.mul_vec(b);
    let mut y = vec![Int::zero(); a.cols];
    for i in 0..a.rows {
        let di = if i < a.cols { d.get(i, i).clone() } else { Int::zero() };
        if di.is_zero() {
            if !ub[i].is_zero() {
                return None;
            }
        } else {
            if !(&ub[i] % &di).is_zero() {
                return None;
            }
            y[i] = &ub[i] / &di;
        }
    }
    Some(v.mul_vec(&y))
}

/// ℤ^rank ⊕ ⊕ ℤ/d_i with d_1 | d_2 | ... and each d_i ≥ 2.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FgAbGroup {
    pub rank: usize,
    pub torsion: Vec<Int>,
}

impl FgAbGroup {
    pub fn new(rank: usize, torsion: Vec<Int>) -> Result<Self, String> {
        for (i, d) in torsion.iter().enumerate() {
            if *d < bi(2) {
                return Err(format!("invariant factor {} is smaller than 2", d));
            }
            if i > 0 && !(d % &torsion[i - 1]).is_zero() {
                return Err(format!("invariant factors {} and {} do not form a divisibility chain", torsion[i - 1], d));
            }
        }
        Ok(FgAbGroup { rank, torsion })
    }

    pub fn free(rank: usize) -> Self {
        FgAbGroup { rank, torsion: vec![] }
    }

    pub fn ngens(&self) -> usize {
        self.rank + self.torsion.len()
    }

    pub fn order_of_torsion(&self) -> Int {
        self.torsion.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn reduce(&self, x: &[Int]) -> Vec<Int> {
        let mut r = x.to_vec();
        for (j, d) in self.torsion.iter().enumerate() {
            r[self.rank + j] = r[self.rank + j].mod_floor(d);
        }
        r
    }

    /// All torsion elements (free part zero).
    pub fn torsion_elements(&self) -> Vec<Vec<Int>> {
        let mut out = vec![vec![Int::zero(); self.ngens()]];
        for (j, d) in self.torsion.iter().enumerate() {
            let mut next = Vec::new();
            for e in &out {
                let mut k = Int::zero();
                while &k < d {
                    let mut e2 = e.clone();
                    e2[self.rank + j] = k.clone();
                    next.push(e2);
                    k += 1;
                }
            }
            out = next;
        }
        out
    }
}

impl std::fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        if self.rank > 0 {
            parts.push(if self.rank == 1 { "Z".to_string() } else { format!("Z^{}", self.rank) });
        }
        for d in &self.torsion {
            parts.push(format!("Z/{}", d));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Homomorphism given on generators: column j is the image of generator j.
#[derive(Clone, Debug)]
pub struct GroupHom {
    pub source: FgAbGroup,
    pub target: FgAbGroup,
    pub matrix: IntMatrix,
}

impl GroupHom {
    pub fn new(source: FgAbGroup, target: FgAbGroup, matrix: IntMatrix) -> Result<Self, String> {
        assert_eq!(matrix.rows, target.ngens());
        assert_eq!(matrix.cols, source.ngens());
        let h = GroupHom { source, target, matrix };
        for (j, d) in h.source.torsion.iter().enumerate() {
            let col: Vec<Int> = h.matrix.col(h.source.rank + j).iter().map(|x| x * d).collect();
            if !h.target.reduce(&col).iter().all(|x| x.is_zero()) {
                return Err(format!("torsion generator {} of order {} has image of different order", j + 1, d));
            }
        }
        Ok(h)
    }

    pub fn apply(&self, x: &[Int]) -> Vec<Int> {
        self.target.reduce(&self.matrix.mul_vec(x))
    }

    /// Matrix with extra columns for the target's torsion relations.
    fn augmented(&self) -> IntMatrix {
        let t = self.target.torsion.len();
        let mut a = IntMatrix::zeros(self.target.ngens(), self.source.ngens() + t);
        for i in 0..a.rows {
            for j in 0..self.source.ngens() {
                a.set(i, j, self.matrix.get(i, j).clone());
            }
        }
        for (j, d) in self.target.torsion.iter().enumerate() {
            a.set(self.target.rank + j, self.source.ngens() + j, d.clone());
        }
        a
    }

    /// Some preimage of y, if any.
    pub fn preimage(&self, y: &[Int]) -> Option<Vec<Int>> {
        let x = solve_integer(&self.augmented(), y)?;
        Some(self.source.reduce(&x[..self.source.ngens()]))
    }
}

/// Kernel of a homomorphism out of a free group, as a basis of a sublattice.
pub fn kernel(f: &GroupHom) -> Vec<Vec<Int>> {
    assert!(f.source.torsion.is_empty(), "kernel expects a free source");
    let aug = f.augmented();
    let k = integer_kernel(&aug);
    let proj: Vec<Vec<Int>> = k.into_iter().map(|v| v[..f.source.rank].to_vec()).collect();
    hnf_rows(&proj)
}

/// Quotient ℤ^g / span(relations) with a coordinate map into normal form.
#[derive(Clone, Debug)]
pub struct QuotientGroup {
    pub ambient: usize,
    pub group: FgAbGroup,
    u: IntMatrix,
    /// (row index in U·x, modulus or zero for free coordinates)
    coords: Vec<(usize, Int)>,
}

impl QuotientGroup {
    pub fn new(ambient: usize, relations: &[Vec<Int>]) -> Self {
        let mut a = IntMatrix::zeros(ambient, relations.len());
        for (j, r) in relations.iter().enumerate() {
            for (i, x) in r.iter().enumerate() {
                a.set(i, j, x.clone());
            }
        }
        let (u, d, _) = smith_normal_form(&a);
        let mut free = Vec::new();
        let mut tors = Vec::new();
        for i in 0..ambient {
            let di = if i < a.cols { d.get(i, i).clone() } else { Int::zero() };
            if di.is_zero() {
                free.push((i, Int::zero()));
            } else if di > Int::one() {
                tors.push((i, di));
            }
        }
        let group = FgAbGroup { rank: free.len(), torsion: tors.iter().map(|x| x.1.clone()).collect() };
        let mut coords = free;
        coords.extend(tors);
        QuotientGroup { ambient, group, u, coords }
    }

    pub fn class_of(&self, x: &[Int]) -> Vec<Int> {
        let y = self.u.mul_vec(x);
        let v: Vec<Int> = self.coords.iter().map(|(i, _)| y[*i].clone()).collect();
        self.group.reduce(&v)
    }

    pub fn is_zero(&self, x: &[Int]) -> bool {
        self.class_of(x).iter().all(|c| c.is_zero())
    }
}

/// Data of the Gale dual of β: ℤ^m → N computed from the resolution
/// 0 → K → F → N → 0 with F = ℤ^rank ⊕ ℤ^#torsion.
#[derive(Clone, Debug)]
pub struct GaleDual {
    /// Rows: images of the standard basis of M = Hom(N,ℤ) in (ℤ^m)*.
    pub m_image: Vec<Vec<Int>>,
    /// 𝕃^∨ as a quotient of (ℤ^m)* ⊕ K*.
    pub dual: QuotientGroup,
    /// D_i = class of the i-th coordinate functional.
    pub divisor_classes: Vec<Vec<Int>>,
}

/// β given by the images of e_i as columns in N's generator coordinates.
pub fn gale_dual(beta: &GroupHom) -> GaleDual {
    let n = beta.target.rank;
    let t = beta.target.torsion.len();
    let m = beta.source.ngens();
    assert!(beta.source.torsion.is_empty());
    // columns: images of the basis of F* in (ℤ^m)* ⊕ K*
    let mut rels = Vec::new();
    for a in 0..n + t {
        let mut v = vec![Int::zero(); m + t];
        for i in 0..m {
            v[i] = beta.matrix.get(a, i).clone();
        }
        if a >= n {
            v[m + (a - n)] = beta.target.torsion[a - n].clone();
        }
        rels.push(v);
    }
    let dual = QuotientGroup::new(m + t, &rels);
    let divisor_classes = (0..m)
        .map(|i| {
            let mut e = vec![Int::zero(); m + t];
            e[i] = Int::one();
            dual.class_of(&e)
        })
        .collect();
    let m_image = (0..n).map(|a| (0..m).map(|i| beta.matrix.get(a, i).clone()).collect()).collect();
    GaleDual { m_image, dual, divisor_classes }
}

/// A section of a surjection π, built generator by generator: free generators
/// through an integer solve, torsion generators by searching the torsion
/// subgroup of the source.
pub fn solve_section(pi: &GroupHom) -> Option<GroupHom> {
    let tgt = &pi.target;
    let src = &pi.source;
    let mut cols = Vec::new();
    for j in 0..tgt.ngens() {
        let mut e = vec![Int::zero(); tgt.ngens()];
        e[j] = Int::one();
        if j < tgt.rank {
            cols.push(pi.preimage(&e)?);
        } else {
            let d = &tgt.torsion[j - tgt.rank];
            let found = src.torsion_elements().into_iter().find(|x| {
                let dx: Vec<Int> = x.iter().map(|c| c * d).collect();
                src.reduce(&dx).iter().all(|c| c.is_zero()) && pi.apply(x) == tgt.reduce(&e)
            })?;
            cols.push(found);
        }
    }
    let mut mat = IntMatrix::zeros(src.ngens(), tgt.ngens());
    for (j, c) in cols.iter().enumerate() {
        for (i, x) in c.iter().enumerate() {
            mat.set(i, j, x.clone());
        }
    }
    GroupHom::new(tgt.clone(), src.clone(), mat).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(a: &IntMatrix) -> Vec<i64> {
        snf_diagonal(a).iter().map(|x| i64::try_from(x).unwrap()).collect()
    }

    fn check_snf(a: &IntMatrix) {
        let (u, d, v) = smith_normal_form(a);
        assert_eq!(u.mul(a).mul(&v), d);
        assert!(u.determinant().abs().is_one());
        assert!(v.determinant().abs().is_one());
        for i in 0..d.rows {
            for j in 0..d.cols {
                if i != j {
                    assert!(d.get(i, j).is_zero());
                }
            }
        }
    }

    #[test]
    fn snf_examples() {
        let a = IntMatrix::from_rows(&[vec![2]]);
        assert_eq!(diag(&a), vec![2]);
        let b = IntMatrix::from_rows(&[vec![1], vec![1], vec![2]]);
        assert_eq!(diag(&b), vec![1]);
        let c = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(diag(&c), vec![1, 6]);
        check_snf(&c);
        check_snf(&IntMatrix::from_rows(&[vec![4, 6, 2], vec![6, 9, 12], vec![0, 3, -5]]));
    }

    #[test]
    fn kernel_examples() {
        let z = FgAbGroup::free(1);
        let p1 = GroupHom::new(FgAbGroup::free(2), z.clone(), IntMatrix::from_rows(&[vec![1, -1]])).unwrap();
        assert_eq!(kernel(&p1), vec![vec![bi(1), bi(1)]]);
        let p112 = GroupHom::new(FgAbGroup::free(3), FgAbGroup::free(2), IntMatrix::from_rows(&[vec![1, -1, 0], vec![0, 2, -1]])).unwrap();
        assert_eq!(kernel(&p112), vec![vec![bi(1), bi(1), bi(2)]]);
        let inj = GroupHom::new(z.clone(), z, IntMatrix::from_rows(&[vec![3]])).unwrap();
        assert!(kernel(&inj).is_empty());
    }

    #[test]
    fn kernel_with_torsion_target() {
        // ℤ → ℤ/2, 1 ↦ 1: kernel 2ℤ
        let t = FgAbGroup::new(0, vec![bi(2)]).unwrap();
        let f = GroupHom::new(FgAbGroup::free(1), t, IntMatrix::from_rows(&[vec![1]])).unwrap();
        assert_eq!(kernel(&f), vec![vec![bi(2)]]);
    }

    #[test]
    fn gale_examples() {
        let p1 = GroupHom::new(FgAbGroup::free(2), FgAbGroup::free(1), IntMatrix::from_rows(&[vec![1, -1]])).unwrap();
        let g = gale_dual(&p1);
        assert_eq!(g.dual.group, FgAbGroup::free(1));
        assert_eq!(g.divisor_classes[0], g.divisor_classes[1]);
        let p12 = GroupHom::new(FgAbGroup::free(2), FgAbGroup::free(1), IntMatrix::from_rows(&[vec![2, -1]])).unwrap();
        let g = gale_dual(&p12);
        assert_eq!(g.dual.group, FgAbGroup::free(1));
        let d1 = g.divisor_classes[0][0].clone();
        let d2 = g.divisor_classes[1][0].clone();
        assert_eq!(d2, &d1 * 2);
        let bmu2 = GroupHom::new(FgAbGroup::free(0), FgAbGroup::new(0, vec![bi(2)]).unwrap(), IntMatrix::zeros(1, 0)).unwrap();
        let g = gale_dual(&bmu2);
        assert_eq!(g.dual.group, FgAbGroup::new(0, vec![bi(2)]).unwrap());
    }

    #[test]
    fn sections() {
        let z = FgAbGroup::free(1);
        let id = GroupHom::new(z.clone(), z.clone(), IntMatrix::identity(1)).unwrap();
        let s = solve_section(&id).unwrap();
        assert_eq!(s.matrix, IntMatrix::identity(1));
        let two = GroupHom::new(z.clone(), z, IntMatrix::from_rows(&[vec![2]])).unwrap();
        assert!(solve_section(&two).is_none());
        // ℤ ⊕ ℤ/2 → ℤ/2 projecting the torsion part splits
        let src = FgAbGroup::new(1, vec![bi(2)]).unwrap();
        let t = FgAbGroup::new(0, vec![bi(2)]).unwrap();
        let p = GroupHom::new(src, t, IntMatrix::from_rows(&[vec![1, 1]])).unwrap();
        let s = solve_section(&p).unwrap();
        assert_eq!(p.apply(&s.matrix.col(0)), vec![bi(1)]);
        // ℤ → ℤ/2 has no section
        let q = GroupHom::new(FgAbGroup::free(1), FgAbGroup::new(0, vec![bi(2)]).unwrap(), IntMatrix::from_rows(&[vec![1]])).unwrap();
        assert!(solve_section(&q).is_none());
    }

    #[test]
    fn hnf_basis() {
        let rows = vec![vec![bi(2), bi(4)], vec![bi(1), bi(1)], vec![bi(3), bi(5)]];
        let h = hnf_rows(&rows);
        assert_eq!(h, vec![vec![bi(1), bi(1)], vec![bi(0), bi(2)]]);
    }
}
