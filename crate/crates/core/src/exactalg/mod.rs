//! Exact scalars: rationals, multivariate polynomials, rational functions with
//! factored denominators, truncated series and an exact simplex solver.

pub mod lp;
pub mod mpoly;
pub mod ratfn;
pub mod series;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use mpoly::MPoly;
pub use ratfn::{RatFn, ZSplit};
pub use series::{Profile, SeriesKey, TruncSeries};

pub type Int = BigInt;
pub type Rat = BigRational;

/// Rational function in z with coefficients in the fraction field of the
/// equivariant parameters.
pub type ZRat = RatFn;
/// z-free rational function of the equivariant parameters.
pub type EquivScalar = RatFn;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rint(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn floor_rat(x: &Rat) -> BigInt {
    x.floor().to_integer()
}

pub fn ceil_rat(x: &Rat) -> BigInt {
    x.ceil().to_integer()
}

/// Fractional part in [0,1).
pub fn frac(x: &Rat) -> Rat {
    x - Rat::from_integer(floor_rat(x))
}

pub fn is_integral(x: &Rat) -> bool {
    x.is_integer()
}

pub fn to_i64(x: &BigInt) -> i64 {
    x.to_i64().expect("integer overflow")
}

pub fn fmt_rat(x: &Rat) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().ok()?;
        let b: BigInt = b.trim().parse().ok()?;
        if b.is_zero() {
            return None;
        }
        Some(Rat::new(a, b))
    } else {
        let a: BigInt = s.parse().ok()?;
        Some(Rat::from_integer(a))
    }
}

pub fn factorial(n: u32) -> BigInt {
    let mut f = BigInt::one();
    for i in 2..=n {
        f *= i;
    }
    f
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Reduce to a representative in [0,1).
pub fn mod_one(x: &Rat) -> Rat {
    frac(x)
}

pub fn abs_rat(x: &Rat) -> Rat {
    x.abs()
}

/// Solve a square rational system A x = b by Gaussian elimination.
pub fn solve_rat(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    if n == 0 {
        return Some(vec![]);
    }
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let p = m[col][col].clone();
        for j in col..=n {
            m[col][j] = &m[col][j] / &p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in col..=n {
                    let t = &f * &m[col][j];
                    m[r][j] -= t;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n].clone()).collect())
}

/// Rank of a rational matrix (rows of equal length).
pub fn rank_rat(rows: &[Vec<Rat>]) -> usize {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    if m.is_empty() {
        return 0;
    }
    let ncols = m[0].len();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, piv);
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let f = &m[r][col] / &m[rank][col];
                for j in col..ncols {
                    let t = &f * &m[rank][j];
                    m[r][j] -= t;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Nonzero kernel vector of a rational matrix with one more column than its rank.
pub fn kernel_rat(rows: &[Vec<Rat>], ncols: usize) -> Vec<Vec<Rat>> {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, piv);
        let p = m[rank][col].clone();
        for j in 0..ncols {
            m[rank][j] = &m[rank][j] / &p;
        }
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in 0..ncols {
                    let t = &f * &m[rank][j];
                    m[r][j] -= t;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![Rat::zero(); ncols];
            v[fc] = Rat::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][fc].clone();
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rat("-3/6").unwrap(), rat(-1, 2));
        assert_eq!(fmt_rat(&rat(4, 2)), "2");
        assert_eq!(fmt_rat(&rat(-1, 2)), "-1/2");
        assert!(parse_rat("1/0").is_none());
    }

    #[test]
    fn frac_of_negative() {
        assert_eq!(frac(&rat(-1, 2)), rat(1, 2));
        assert_eq!(ceil_rat(&rat(-1, 2)), BigInt::zero());
    }

    #[test]
    fn small_solve() {
        let a = vec![vec![rint(0), rint(2)], vec![rint(1), rint(1)]];
        let x = solve_rat(&a, &[rint(1), rint(1)]).unwrap();
        assert_eq!(x, vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(rank_rat(&a), 2);
        let k = kernel_rat(&[vec![rint(2), rint(-1)]], 2);
        assert_eq!(k, vec![vec![rat(1, 2), rint(1)]]);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(factorial(5), BigInt::from(120));
    }
}
