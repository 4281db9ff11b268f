//! Exact two-phase simplex with Bland's rule.

use num_traits::{One, Signed, Zero};

use super::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Rat>,
    pub rel: Rel,
    pub rhs: Rat,
}

#[derive(Clone, Debug)]
pub struct Lp {
    pub nvars: usize,
    /// Variables without sign restriction.
    pub free: Vec<bool>,
    pub constraints: Vec<Constraint>,
    /// Maximized.
    pub objective: Vec<Rat>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpResult {
    Optimal { value: Rat, x: Vec<Rat> },
    Infeasible,
    Unbounded,
}

impl Lp {
    pub fn new(nvars: usize) -> Self {
        Lp { nvars, free: vec![false; nvars], constraints: vec![], objective: vec![Rat::zero(); nvars] }
    }

    pub fn all_free(mut self) -> Self {
        self.free = vec![true; self.nvars];
        self
    }

    pub fn add(&mut self, coeffs: Vec<Rat>, rel: Rel, rhs: Rat) {
        assert_eq!(coeffs.len(), self.nvars);
        self.constraints.push(Constraint { coeffs, rel, rhs });
    }

    pub fn solve(&self) -> LpResult {
        // column layout: split variables, then slack/surplus, then artificials
        let mut colmap: Vec<(usize, Rat)> = Vec::new();
        for j in 0..self.nvars {
            colmap.push((j, Rat::one()));
            if self.free[j] {
                colmap.push((j, -Rat::one()));
            }
        }
        let nx = colmap.len();
        let m = self.constraints.len();
        let nslack = self.constraints.iter().filter(|c| c.rel != Rel::Eq).count();
        let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(m);
        let mut needs_art = Vec::with_capacity(m);
        let mut slack_col = nx;
        let mut slack_basis = vec![None; m];
        for (i, c) in self.constraints.iter().enumerate() {
            let mut row = vec![Rat::zero(); nx + nslack];
            for (col, (j, s)) in colmap.iter().enumerate() {
                row[col] = &c.coeffs[*j] * s;
            }
            let mut rhs = c.rhs.clone();
            let mut rel = c.rel;
            if c.rel != Rel::Eq {
                row[slack_col] = if c.rel == Rel::Le { Rat::one() } else { -Rat::one() };
            }
            if rhs.is_negative() {
                for v in row.iter_mut() {
                    *v = -v.clone();
                }
                rhs = -rhs;
                rel = match rel {
                    Rel::Le => Rel::Ge,
                    Rel::Ge => Rel::Le,
                    Rel::Eq => Rel::Eq,
                };
            }
            if c.rel != Rel::Eq {
                if rel == Rel::Le {
                    slack_basis[i] = Some(slack_col);
                }
                slack_col += 1;
            }
            needs_art.push(slack_basis[i].is_none());
            row.push(rhs);
            rows.push(row);
        }
        let nart = needs_art.iter().filter(|&&b| b).count();
        let ncols = nx + nslack + nart;
        let mut tab: Vec<Vec<Rat>> = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut art = nx + nslack;
        for (i, row) in rows.into_iter().enumerate() {
            let rhs = row[nx + nslack].clone();
            let mut r = row[..nx + nslack].to_vec();
            r.extend(std::iter::repeat(Rat::zero()).take(nart));
            if needs_art[i] {
                r[art] = Rat::one();
                basis.push(art);
                art += 1;
            } else {
                basis.push(slack_basis[i].unwrap());
            }
            r.push(rhs);
            tab.push(r);
        }
        let is_art = |j: usize| j >= nx + nslack;
        if nart > 0 {
            let mut cost = vec![Rat::zero(); ncols];
            for c in cost.iter_mut().skip(nx + nslack) {
                *c = -Rat::one();
            }
            if run(&mut tab, &mut basis, &cost, &|_| true).is_err() {
                unreachable!("phase one is bounded");
            }
            let val: Rat = basis
                .iter()
                .enumerate()
                .filter(|(_, &b)| is_art(b))
                .map(|(i, _)| tab[i][ncols].clone())
                .sum();
            if !val.is_zero() {
                return LpResult::Infeasible;
            }
            let mut i = 0;
            while i < tab.len() {
                if is_art(basis[i]) {
                    if let Some(j) = (0..nx + nslack).find(|&j| !tab[i][j].is_zero()) {
                        pivot(&mut tab, &mut basis, i, j);
                        i += 1;
                    } else {
                        tab.remove(i);
                        basis.remove(i);
                    }
                } else {
                    i += 1;
                }
            }
        }
        let mut cost = vec![Rat::zero(); ncols];
        for (col, (j, s)) in colmap.iter().enumerate() {
            cost[col] = &self.objective[*j] * s;
        }
        if run(&mut tab, &mut basis, &cost, &|j| !is_art(j)).is_err() {
            return LpResult::Unbounded;
        }
        let mut xs = vec![Rat::zero(); ncols];
        for (i, &b) in basis.iter().enumerate() {
            xs[b] = tab[i][ncols].clone();
        }
        let mut x = vec![Rat::zero(); self.nvars];
        for (col, (j, s)) in colmap.iter().enumerate() {
            x[*j] += &xs[col] * s;
        }
        let value = x.iter().zip(&self.objective).map(|(a, b)| a * b).sum();
        LpResult::Optimal { value, x }
    }
}

fn pivot(tab: &mut [Vec<Rat>], basis: &mut [usize], r: usize, c: usize) {
    let p = tab[r][c].clone();
    for v in tab[r].iter_mut() {
        *v = &*v / &p;
    }
    let prow = tab[r].clone();
    for (i, row) in tab.iter_mut().enumerate() {
        if i != r && !row[c].is_zero() {
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&prow) {
                *v -= &f * pv;
            }
        }
    }
    basis[r] = c;
}

fn run(tab: &mut [Vec<Rat>], basis: &mut [usize], cost: &[Rat], allowed: &dyn Fn(usize) -> bool) -> Result<(), ()> {
    let ncols = cost.len();
    loop {
        let mut enter = None;
        for j in 0..ncols {
            if !allowed(j) || basis.contains(&j) {
                continue;
            }
            let mut rc = cost[j].clone();
            for (i, &b) in basis.iter().enumerate() {
                rc -= &cost[b] * &tab[i][j];
            }
            if rc.is_positive() {
                enter = Some(j);
                break;
            }
        }
        let Some(j) = enter else { return Ok(()) };
        let mut leave: Option<(usize, Rat)> = None;
        for i in 0..tab.len() {
            if tab[i][j].is_positive() {
                let ratio = &tab[i][ncols] / &tab[i][j];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((i, _)) = leave else { return Err(()) };
        pivot(tab, basis, i, j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{rat, rint};

    #[test]
    fn textbook_max() {
        // max 3x + 2y, x + y <= 4, x + 3y <= 6, x <= 3
        let mut lp = Lp::new(2);
        lp.objective = vec![rint(3), rint(2)];
        lp.add(vec![rint(1), rint(1)], Rel::Le, rint(4));
        lp.add(vec![rint(1), rint(3)], Rel::Le, rint(6));
        lp.add(vec![rint(1), rint(0)], Rel::Le, rint(3));
        match lp.solve() {
            LpResult::Optimal { value, x } => {
                assert_eq!(value, rint(11));
                assert_eq!(x, vec![rint(3), rint(1)]);
            }
            r => panic!("{:?}", r),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = Lp::new(1);
        lp.add(vec![rint(1)], Rel::Ge, rint(2));
        lp.add(vec![rint(1)], Rel::Le, rint(1));
        assert_eq!(lp.solve(), LpResult::Infeasible);
        let mut lp = Lp::new(1);
        lp.objective = vec![rint(1)];
        assert_eq!(lp.solve(), LpResult::Unbounded);
    }

    #[test]
    fn free_variables_and_equalities() {
        // min |w| style: max -w s.t. w = -1/2 with w free
        let mut lp = Lp::new(1).all_free();
        lp.objective = vec![rint(-1)];
        lp.add(vec![rint(2)], Rel::Eq, rint(-1));
        match lp.solve() {
            LpResult::Optimal { value, x } => {
                assert_eq!(x, vec![rat(-1, 2)]);
                assert_eq!(value, rat(1, 2));
            }
            r => panic!("{:?}", r),
        }
    }
}
