//! Dense two-phase primal simplex over exact rationals with Bland's rule.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<BigRational>,
    pub value: BigRational,
    /// Optimal dual `y`: `A^T y <= c` and `b^T y = value`.
    pub duals: Vec<BigRational>,
    pub pivots: u64,
}

struct Tableau {
    rows: Vec<Vec<BigRational>>,
    /// reduced costs; last entry is minus the objective value
    obj: Vec<BigRational>,
    basis: Vec<usize>,
    width: usize,
    pivots: u64,
}

impl Tableau {
    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        if !self.obj[col].is_zero() {
            let f = self.obj[col].clone();
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = col;
        self.pivots += 1;
    }

    fn set_objective(&mut self, cost: &[BigRational]) {
        let mut obj = cost.to_vec();
        obj.push(BigRational::zero());
        for (r, &b) in self.basis.iter().enumerate() {
            if cost[b].is_zero() {
                continue;
            }
            let f = cost[b].clone();
            for (v, tv) in obj.iter_mut().zip(&self.rows[r]) {
                *v -= &f * tv;
            }
        }
        self.obj = obj;
    }

    /// Runs Bland pivots over columns `< allowed`.
    fn optimize(&mut self, allowed: usize) -> Result<()> {
        let rhs = self.width - 1;
        loop {
            let Some(col) = (0..allowed).find(|&j| self.obj[j].is_negative()) else {
                return Ok(());
            };
            let mut leave: Option<(usize, BigRational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[col].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[col];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, col),
                None => return Err(Error::Lp("unbounded")),
            }
        }
    }
}

/// Minimizes `c^T x` subject to `A x = b`, `x >= 0`.
pub fn solve_standard(a: &[Vec<BigRational>], b: &[BigRational], c: &[BigRational]) -> Result<LpSolution> {
    let m = a.len();
    let n = c.len();
    let width = n + m + 1;
    let mut signs = Vec::with_capacity(m);
    let mut rows = Vec::with_capacity(m);
    for (i, (row, bi)) in a.iter().zip(b).enumerate() {
        if row.len() != n {
            return Err(Error::ShapeMismatch(format!("LP row {i} has {} entries, expected {n}", row.len())));
        }
        let flip = bi.is_negative();
        signs.push(flip);
        let mut t = Vec::with_capacity(width);
        for v in row {
            t.push(if flip { -v } else { v.clone() });
        }
        for k in 0..m {
            t.push(if k == i { BigRational::from_integer(1.into()) } else { BigRational::zero() });
        }
        t.push(if flip { -bi } else { bi.clone() });
        rows.push(t);
    }
    let mut tab = Tableau { rows, obj: Vec::new(), basis: (n..n + m).collect(), width, pivots: 0 };

    // phase 1
    let mut phase1 = vec![BigRational::zero(); n + m];
    for v in phase1.iter_mut().skip(n) {
        *v = BigRational::from_integer(1.into());
    }
    tab.set_objective(&phase1);
    tab.optimize(n + m)?;
    if !tab.obj[width - 1].is_zero() {
        return Err(Error::Lp("infeasible"));
    }
    for r in 0..m {
        if tab.basis[r] >= n {
            if let Some(col) = (0..n).find(|&j| !tab.rows[r][j].is_zero()) {
                tab.pivot(r, col);
            }
        }
    }

    // phase 2; artificial columns stay in the tableau so B^{-1} can be read off
    let mut cost = c.to_vec();
    cost.extend(std::iter::repeat(BigRational::zero()).take(m));
    tab.set_objective(&cost);
    tab.optimize(n)?;

    let mut x = vec![BigRational::zero(); n];
    for (r, &bv) in tab.basis.iter().enumerate() {
        if bv < n {
            x[bv] = tab.rows[r][width - 1].clone();
        }
    }
    let value: BigRational = x.iter().zip(c).map(|(xi, ci)| xi * ci).sum();
    let duals = (0..m)
        .map(|i| {
            let y: BigRational = tab
                .basis
                .iter()
                .enumerate()
                .filter(|(_, &bv)| !cost[bv].is_zero())
                .map(|(r, &bv)| &cost[bv] * &tab.rows[r][n + i])
                .sum();
            if signs[i] {
                -y
            } else {
                y
            }
        })
        .collect();
    Ok(LpSolution { x, value, duals, pivots: tab.pivots })
}
