//! Exhaustive minimum-mass enumeration over a lattice coset.
//!
//! The feasible set is `start + L` for an integer lattice `L`. Coordinates
//! are visited heaviest weight first; after putting a basis of `L` in column
//! echelon form, each coordinate is either determined by the earlier choices
//! or ranges over an arithmetic progression whose step is the pivot entry.
//! Partial mass plus a lower bound on the remaining rows prunes against the
//! incumbent, so ties with the optimum are all kept. The bound combines the
//! residue each later coordinate is already pinned to with exact tables for
//! linear invariants `phi . x = phi . start (mod q)` of the coset.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::intlinalg::{column_echelon, IntMatrix};

pub(crate) struct CosetProblem<'a> {
    pub start: &'a [BigInt],
    /// Generators of the lattice, as columns.
    pub generators: &'a IntMatrix,
    /// Positive integer weights (rationals scaled to a common denominator).
    pub weights: &'a [i128],
    /// Restrict coordinates to the canonical window `(-n/2, n/2]`.
    pub window: Option<u64>,
    /// Prune anything of mass above this.
    pub bound: i128,
    pub cap: usize,
    /// Functionals `phi` with a modulus `q >= 2` such that `phi . x` is
    /// constant mod `q` on the coset.
    pub invariants: &'a [(Vec<i64>, u64)],
}

/// Largest residue group tabulated for a pair of invariants.
const PAIR_STATES: u64 = 4096;
/// Invariants beyond this many are only used singly.
const PAIR_LIMIT: usize = 16;
const INF: i128 = i128::MAX / 4;

/// Cheapest completion of one or two invariants, per depth and residue.
struct Table {
    members: Vec<usize>,
    /// `cost[r][t]` for residue index `t` still owed by rows `r..`.
    cost: Vec<Vec<i128>>,
}

#[derive(Debug, Clone)]
pub(crate) struct CosetOptimum {
    pub mass: i128,
    pub points: Vec<Vec<i64>>,
    pub exact: bool,
    pub nodes: u64,
}

struct Dfs<'a> {
    weights: Vec<i128>,
    /// per permuted row: Some(column) if it is a pivot row
    pivot_col: Vec<Option<usize>>,
    basis: Vec<Vec<i64>>, // [column][row]
    steps: Vec<i64>,
    /// `reach[r][j]`: gcd of the entries in row `j` over the columns pivoting
    /// in rows `r..=j`; 0 when row `j` is already fixed at depth `r`.
    reach: Vec<Vec<i64>>,
    /// permuted functionals and moduli, owed residues, tables
    phis: Vec<Vec<i64>>,
    moduli: Vec<i64>,
    owed: Vec<i64>,
    tables: Vec<Table>,
    window: Option<(i64, i64)>,
    values: Vec<i64>,
    x: Vec<i64>,
    best: i128,
    points: Vec<Vec<i64>>,
    exact: bool,
    cap: usize,
    nodes: u64,
    _p: std::marker::PhantomData<&'a ()>,
}

fn small(v: &BigInt) -> Result<i64> {
    v.to_i64().ok_or(Error::Overflow("lattice coordinates"))
}

pub(crate) fn minimize(p: &CosetProblem<'_>) -> Result<CosetOptimum> {
    let m = p.start.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p.weights[b].cmp(&p.weights[a]).then(a.cmp(&b)));

    let mut permuted = IntMatrix::zeros(m, p.generators.cols());
    for (new, &old) in order.iter().enumerate() {
        for j in 0..p.generators.cols() {
            permuted[(new, j)] = p.generators[(old, j)].clone();
        }
    }
    let ech = column_echelon(&permuted);
    let mut pivot_col = vec![None; m];
    let mut basis = Vec::with_capacity(ech.pivots.len());
    let mut steps = Vec::with_capacity(ech.pivots.len());
    for (j, &row) in ech.pivots.iter().enumerate() {
        pivot_col[row] = Some(j);
        basis.push((0..m).map(|i| small(&ech.basis[(i, j)])).collect::<Result<Vec<_>>>()?);
        steps.push(small(&ech.basis[(row, j)])?);
    }
    let values = order.iter().map(|&i| small(&p.start[i])).collect::<Result<Vec<_>>>()?;
    let window = p.window.map(|n| {
        let n = n as i64;
        (-((n - 1) / 2), n / 2)
    });

    let mut reach = vec![vec![0i64; m]; m + 1];
    for r in (0..m).rev() {
        for j in r..m {
            let mut g = reach[r + 1][j];
            if let Some(col) = pivot_col[r] {
                g = gcd(g, basis[col][j]);
            }
            reach[r][j] = g;
        }
    }

    let range: Vec<i64> = match window {
        Some((lo, hi)) => (lo..=hi).collect(),
        None => Vec::new(),
    };
    let weights: Vec<i128> = order.iter().map(|&i| p.weights[i]).collect();
    let mut phis = Vec::new();
    let mut moduli = Vec::new();
    let mut owed = Vec::new();
    if !range.is_empty() {
        for (phi, q) in p.invariants {
            let q = i64::try_from(*q).map_err(|_| Error::Overflow("invariant modulus"))?;
            let permuted: Vec<i64> = order.iter().map(|&i| phi[i].rem_euclid(q)).collect();
            if q < 2 || permuted.iter().filter(|&&v| v != 0).count() < 2 {
                continue;
            }
            let mut t = 0i64;
            for (a, &b) in permuted.iter().zip(&values) {
                t = (t + a * b.rem_euclid(q)) % q;
            }
            phis.push(permuted);
            moduli.push(q);
            owed.push(t);
        }
    }
    let mut tables = Vec::new();
    for a in 0..phis.len() {
        tables.push(tabulate(&[a], &phis, &moduli, &weights, &range));
    }
    if phis.len() <= PAIR_LIMIT {
        for a in 0..phis.len() {
            for b in a + 1..phis.len() {
                if (moduli[a] * moduli[b]) as u64 <= PAIR_STATES {
                    tables.push(tabulate(&[a, b], &phis, &moduli, &weights, &range));
                }
            }
        }
    }

    let mut dfs = Dfs {
        weights,
        pivot_col,
        basis,
        steps,
        reach,
        phis,
        moduli,
        owed,
        tables,
        window,
        values,
        x: vec![0; m],
        best: p.bound,
        points: Vec::new(),
        exact: true,
        cap: p.cap,
        nodes: 0,
        _p: std::marker::PhantomData,
    };
    dfs.visit(0, 0);

    let mut points: Vec<Vec<i64>> = dfs
        .points
        .into_iter()
        .map(|pt| {
            let mut out = vec![0; m];
            for (new, &old) in order.iter().enumerate() {
                out[old] = pt[new];
            }
            out
        })
        .collect();
    points.sort();
    Ok(CosetOptimum { mass: dfs.best, points, exact: dfs.exact, nodes: dfs.nodes })
}

impl Dfs<'_> {
    fn record(&mut self, mass: i128) {
        if mass < self.best {
            self.best = mass;
            self.points.clear();
            self.exact = true;
        }
        if self.points.len() < self.cap {
            self.points.push(self.x.clone());
        } else {
            self.exact = false;
        }
    }

    fn visit(&mut self, row: usize, partial: i128) {
        self.nodes += 1;
        if row == self.x.len() {
            self.record(partial);
            return;
        }
        if partial + self.floor(row) > self.best {
            return;
        }
        let w = self.weights[row];
        let slack = self.best - partial;
        let reach = i64::try_from(slack / w).unwrap_or(i64::MAX);
        let (mut lo, mut hi) = (-reach, reach);
        if let Some((wl, wh)) = self.window {
            lo = lo.max(wl);
            hi = hi.min(wh);
        }
        let base = self.values[row];
        match self.pivot_col[row] {
            None => {
                if base >= lo && base <= hi {
                    self.x[row] = base;
                    self.pay(row, base);
                    self.visit(row + 1, partial + w * base.unsigned_abs() as i128);
                    self.pay(row, -base);
                }
            }
            Some(col) => {
                let h = self.steps[col];
                for x in progression(base, h, lo, hi) {
                    let cost = partial + w * x.unsigned_abs() as i128;
                    if cost > self.best {
                        // candidates come in order of increasing |x|
                        break;
                    }
                    let t = (x - base) / h;
                    self.shift(col, row, t);
                    self.x[row] = x;
                    self.pay(row, x);
                    self.visit(row + 1, cost);
                    self.pay(row, -x);
                    self.shift(col, row, -t);
                }
            }
        }
    }

    /// Lower bound on the mass still to come from rows `row..`.
    fn floor(&self, row: usize) -> i128 {
        let reach = &self.reach[row];
        let mut total = 0i128;
        for j in row..self.values.len() {
            let v = self.values[j];
            let d = match reach[j] {
                0 => v.abs(),
                1 => 0,
                g => {
                    let r = v.rem_euclid(g);
                    r.min(g - r)
                }
            };
            total += self.weights[j] * d as i128;
        }
        for t in &self.tables {
            let c = t.cost[row][self.state(&t.members)];
            total = total.max(c);
        }
        total
    }

    fn state(&self, members: &[usize]) -> usize {
        let mut s = 0usize;
        for &a in members {
            s = s * self.moduli[a] as usize + self.owed[a] as usize;
        }
        s
    }

    fn pay(&mut self, row: usize, x: i64) {
        for a in 0..self.phis.len() {
            let q = self.moduli[a];
            self.owed[a] = (self.owed[a] - self.phis[a][row] * x).rem_euclid(q);
        }
    }

    fn shift(&mut self, col: usize, row: usize, t: i64) {
        if t == 0 {
            return;
        }
        let b = &self.basis[col];
        for r in row..self.values.len() {
            self.values[r] += b[r] * t;
        }
    }
}

/// Backward pass: cheapest way for rows `r..` to pay each owed residue of
/// the chosen invariants, each row taking a value from `range`.
fn tabulate(members: &[usize], phis: &[Vec<i64>], moduli: &[i64], weights: &[i128], range: &[i64]) -> Table {
    let m = weights.len();
    let qs: Vec<usize> = members.iter().map(|&a| moduli[a] as usize).collect();
    let states: usize = qs.iter().product();
    let mut cost = vec![vec![INF; states]; m + 1];
    cost[m][0] = 0;
    for r in (0..m).rev() {
        let (head, tail) = cost.split_at_mut(r + 1);
        let (here, next) = (&mut head[r], &tail[0]);
        for &x in range {
            let c = weights[r] * x.unsigned_abs() as i128;
            // residue shift paid by this row
            let mut shift = 0usize;
            for (&a, &q) in members.iter().zip(&qs) {
                shift = shift * q + (phis[a][r] * x).rem_euclid(q as i64) as usize;
            }
            for (t, slot) in here.iter_mut().enumerate() {
                let rest = sub_state(t, shift, &qs);
                let v = next[rest];
                if v < INF && c + v < *slot {
                    *slot = c + v;
                }
            }
        }
    }
    Table { members: members.to_vec(), cost }
}

/// Mixed-radix subtraction of residue tuples.
fn sub_state(t: usize, s: usize, qs: &[usize]) -> usize {
    let (mut t, mut s) = (t, s);
    let mut out = 0usize;
    let mut scale = 1usize;
    for &q in qs.iter().rev() {
        let d = (t % q + q - s % q) % q;
        out += d * scale;
        scale *= q;
        t /= q;
        s /= q;
    }
    out
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Integers `x` in `[lo, hi]` with `x ≡ base (mod h)`, by increasing `|x|`,
/// positive before negative on ties.
fn progression(base: i64, h: i64, lo: i64, hi: i64) -> Vec<i64> {
    if lo > hi {
        return Vec::new();
    }
    let r = base.rem_euclid(h);
    // smallest nonnegative and largest negative members
    let mut pos = r;
    let mut neg = r - h;
    let mut out = Vec::new();
    loop {
        let p_ok = pos <= hi;
        let n_ok = neg >= lo;
        if !p_ok && !n_ok {
            break;
        }
        if p_ok && (!n_ok || pos <= -neg) {
            if pos >= lo {
                out.push(pos);
            }
            pos += h;
        } else {
            if neg <= hi {
                out.push(neg);
            }
            neg -= h;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn progression_order() {
        assert_eq!(progression(0, 1, -2, 2), vec![0, 1, -1, 2, -2]);
        assert_eq!(progression(1, 3, -6, 6), vec![1, -2, 4, -5]);
        assert_eq!(progression(5, 4, 0, 9), vec![1, 5, 9]);
        assert!(progression(0, 2, 1, 1).is_empty());
    }

    #[test]
    fn coset_in_the_plane() {
        // start (1, 0) + Z(1, 1): mass |x| + 2|y| -> minimum at (1, 0) with 1
        let gens = IntMatrix::from_rows(&[vec![1i64], vec![1]]).unwrap();
        let start = [BigInt::from(1), BigInt::from(0)];
        let p = CosetProblem { start: &start, generators: &gens, weights: &[1, 2], window: None, bound: 10, cap: 10, invariants: &[] };
        let r = minimize(&p).unwrap();
        assert_eq!(r.mass, 1);
        assert_eq!(r.points, vec![vec![1, 0]]);
        // equal weights: (1,0) and (0,-1) tie
        let p = CosetProblem { weights: &[1, 1], ..p };
        let r = minimize(&p).unwrap();
        assert_eq!(r.points, vec![vec![0, -1], vec![1, 0]]);
        let p = CosetProblem { cap: 1, ..p };
        assert!(!minimize(&p).unwrap().exact);
    }
}
