//! Exact linear algebra over `Z`, `Q` and `Z/n`.
//!
//! Everything is routed through the integer Smith normal form: solving over
//! `Q` divides by invariant factors, solving over `Z/n` solves the diagonal
//! congruences `d_i y_i = c_i (mod n)`, which handles composite `n` without
//! splitting into primes.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rings::{residue_of, RingElem, RingSpec};

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(Error::ShapeMismatch(format!(
                    "row {i} has {} entries, expected {c}",
                    row.len()
                )));
            }
            data.extend(row.iter().cloned().map(Into::into));
        }
        Ok(IntMatrix { rows: r, cols: c, data })
    }

    /// Builds a matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column {j} has wrong length");
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix applied to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn mul_vec_rat(&self, v: &[BigRational]) -> Result<Vec<BigRational>> {
        if v.len() != self.cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix applied to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = BigRational::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += BigRational::from_integer(a.clone()) * b;
                    }
                }
                acc
            })
            .collect())
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        Ok(sign * &a[(n - 1, n - 1)])
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row[dst] += k * row[src]`
    pub(crate) fn add_row_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j] * k;
            self.data[dst * self.cols + j] += v;
        }
    }

    /// `col[dst] += k * col[src]`
    pub(crate) fn add_col_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + src] * k;
            self.data[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self.data[i * self.cols + j];
            self.data[i * self.cols + j] = v;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -&self.data[i * self.cols + j];
            self.data[i * self.cols + j] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;

    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// `U * A * V = D` with `U`, `V` unimodular. The inverses are kept because
/// homology generators and coordinates need them.
#[derive(Debug, Clone)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
    /// The `min(rows, cols)` diagonal entries; nonzero ones first, each
    /// dividing the next.
    pub diag: Vec<BigInt>,
}

impl SnfResult {
    /// Number of nonzero invariant factors.
    pub fn rank(&self) -> usize {
        self.diag.iter().take_while(|d| !d.is_zero()).count()
    }
}

/// Smith normal form with a fixed pivot rule: the smallest nonzero
/// `|entry|` of the active submatrix, ties broken by lowest row, then lowest
/// column.
pub fn smith_normal_form(a: &IntMatrix) -> SnfResult {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut u_inv = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let mut v_inv = IntMatrix::identity(n);

    let steps = m.min(n);
    'outer: for t in 0..steps {
        loop {
            let Some((pr, pc)) = pick_pivot(&d, t) else {
                break 'outer;
            };
            d.swap_rows(t, pr);
            u.swap_rows(t, pr);
            u_inv.swap_cols(t, pr);
            d.swap_cols(t, pc);
            v.swap_cols(t, pc);
            v_inv.swap_rows(t, pc);

            let pivot = d[(t, t)].clone();
            let mut dirty = false;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = &d[(i, t)] / &pivot;
                let neg_q = -&q;
                d.add_row_multiple(i, t, &neg_q);
                u.add_row_multiple(i, t, &neg_q);
                u_inv.add_col_multiple(t, i, &q);
                dirty |= !d[(i, t)].is_zero();
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = &d[(t, j)] / &pivot;
                let neg_q = -&q;
                d.add_col_multiple(j, t, &neg_q);
                v.add_col_multiple(j, t, &neg_q);
                v_inv.add_row_multiple(t, j, &q);
                dirty |= !d[(t, j)].is_zero();
            }
            if dirty {
                continue;
            }
            // divisibility of the remaining block by the pivot
            let bad_row = (t + 1..m).find(|&i| {
                (t + 1..n).any(|j| !d[(i, j)].is_multiple_of(&pivot))
            });
            if let Some(i) = bad_row {
                let one = BigInt::one();
                d.add_row_multiple(t, i, &one);
                u.add_row_multiple(t, i, &one);
                u_inv.add_col_multiple(i, t, &(-&one));
                continue;
            }
            break;
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
    }

    let diag = (0..steps).map(|i| d[(i, i)].clone()).collect();
    SnfResult { u, d, v, u_inv, v_inv, diag }
}

fn pick_pivot(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..d.rows() {
        for j in t..d.cols() {
            let e = &d[(i, j)];
            if e.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if d[(bi, bj)].abs() <= e.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

/// A basis of the lattice spanned by the columns of `gens`, in column
/// echelon form: column `j` has its first nonzero entry (positive) at row
/// `pivots[j]`, pivots strictly increase, and later columns vanish on and
/// above earlier pivot rows.
#[derive(Debug, Clone)]
pub struct EchelonBasis {
    pub basis: IntMatrix,
    pub pivots: Vec<usize>,
}

pub fn column_echelon(gens: &IntMatrix) -> EchelonBasis {
    // Row-style Hermite reduction of the transpose.
    let mut h = gens.transpose();
    let (k, m) = (h.rows(), h.cols());
    let mut pivots = Vec::new();
    let mut p = 0usize;
    for c in 0..m {
        if p == k {
            break;
        }
        loop {
            // smallest nonzero |entry| in column c among rows >= p
            let mut best: Option<usize> = None;
            for i in p..k {
                if h[(i, c)].is_zero() {
                    continue;
                }
                if best.map_or(true, |b| h[(i, c)].abs() < h[(b, c)].abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            h.swap_rows(p, b);
            let mut done = true;
            for i in p + 1..k {
                if h[(i, c)].is_zero() {
                    continue;
                }
                let q = -(&h[(i, c)] / &h[(p, c)]);
                h.add_row_multiple(i, p, &q);
                done &= h[(i, c)].is_zero();
            }
            if done {
                break;
            }
        }
        if p < k && !h[(p, c)].is_zero() {
            if h[(p, c)].is_negative() {
                h.negate_row(p);
            }
            let piv = h[(p, c)].clone();
            for i in 0..p {
                let q = -h[(i, c)].div_floor(&piv);
                h.add_row_multiple(i, p, &q);
            }
            pivots.push(c);
            p += 1;
        }
    }
    let mut basis = IntMatrix::zeros(m, p);
    for j in 0..p {
        for i in 0..m {
            basis[(i, j)] = h[(j, i)].clone();
        }
    }
    EchelonBasis { basis, pivots }
}

fn check_ring(ring: RingSpec, b: &[RingElem]) -> Result<()> {
    match b.iter().find(|e| !ring.contains(e)) {
        Some(e) => Err(Error::InvalidRing(format!("{e:?} is not an element of {ring}"))),
        None => Ok(()),
    }
}

/// Solves `A x = b` over `ring`. Returns `Ok(None)` when the system has no
/// solution.
pub fn solve_linear(a: &IntMatrix, b: &[RingElem], ring: RingSpec) -> Result<Option<Vec<RingElem>>> {
    if b.len() != a.rows() {
        return Err(Error::ShapeMismatch(format!(
            "right-hand side has length {}, matrix has {} rows",
            b.len(),
            a.rows()
        )));
    }
    check_ring(ring, b)?;
    let snf = smith_normal_form(a);
    solve_with_snf(&snf, b, ring)
}

pub(crate) fn solve_with_snf(
    snf: &SnfResult,
    b: &[RingElem],
    ring: RingSpec,
) -> Result<Option<Vec<RingElem>>> {
    let (m, n) = (snf.u.rows(), snf.v.rows());
    let r = snf.rank();
    match ring {
        RingSpec::Int => {
            let b: Vec<BigInt> = b.iter().map(as_int).collect();
            let c = snf.u.mul_vec(&b)?;
            let mut y = vec![BigInt::zero(); n];
            for i in 0..m {
                if i < r {
                    let (q, rem) = c[i].div_rem(&snf.diag[i]);
                    if !rem.is_zero() {
                        return Ok(None);
                    }
                    y[i] = q;
                } else if !c[i].is_zero() {
                    return Ok(None);
                }
            }
            Ok(Some(snf.v.mul_vec(&y)?.into_iter().map(RingElem::Int).collect()))
        }
        RingSpec::Rat => {
            let b: Vec<BigRational> = b.iter().map(as_rat).collect();
            let c = snf.u.mul_vec_rat(&b)?;
            let mut y = vec![BigRational::zero(); n];
            for i in 0..m {
                if i < r {
                    y[i] = &c[i] / BigRational::from_integer(snf.diag[i].clone());
                } else if !c[i].is_zero() {
                    return Ok(None);
                }
            }
            Ok(Some(snf.v.mul_vec_rat(&y)?.into_iter().map(RingElem::Rat).collect()))
        }
        RingSpec::Mod(modulus) => {
            let nn = BigInt::from(modulus.get());
            let b: Vec<BigInt> = b.iter().map(|e| as_int_lift(e)).collect();
            let c = snf.u.mul_vec(&b)?;
            let mut y = vec![BigInt::zero(); n];
            for i in 0..m {
                let di = if i < r { snf.diag[i].clone() } else { BigInt::zero() };
                match solve_congruence(&di, &c[i], &nn) {
                    Some(s) if i < n => y[i] = s,
                    Some(_) => {}
                    None => return Ok(None),
                }
            }
            let x = snf.v.mul_vec(&y)?;
            Ok(Some(x.iter().map(|v| RingElem::Mod(residue_of(v, modulus.get()))).collect()))
        }
    }
}

/// Some `y` with `d * y = c (mod n)`, or `None`.
fn solve_congruence(d: &BigInt, c: &BigInt, n: &BigInt) -> Option<BigInt> {
    let g = d.extended_gcd(n);
    // g.gcd = d*x + n*y
    if !c.is_multiple_of(&g.gcd) {
        return None;
    }
    if g.gcd.is_zero() {
        return Some(BigInt::zero());
    }
    let scale = c / &g.gcd;
    Some((g.x * scale).mod_floor(n))
}

/// Kernel of `A` over `ring`: a lattice basis over `Z`, a vector-space basis
/// over `Q`, generators of the kernel module over `Z/n`.
pub fn kernel_basis(a: &IntMatrix, ring: RingSpec) -> Vec<Vec<RingElem>> {
    let snf = smith_normal_form(a);
    let n = a.cols();
    let r = snf.rank();
    match ring {
        RingSpec::Int => (r..n)
            .map(|j| snf.v.column(j).into_iter().map(RingElem::Int).collect())
            .collect(),
        RingSpec::Rat => (r..n)
            .map(|j| {
                snf.v
                    .column(j)
                    .into_iter()
                    .map(|v| RingElem::Rat(BigRational::from_integer(v)))
                    .collect()
            })
            .collect(),
        RingSpec::Mod(modulus) => {
            let nn = BigInt::from(modulus.get());
            let mut gens = Vec::new();
            for j in 0..n {
                let factor = if j < r {
                    let g = snf.diag[j].gcd(&nn);
                    &nn / g
                } else {
                    BigInt::one()
                };
                let col: Vec<RingElem> = snf
                    .v
                    .column(j)
                    .iter()
                    .map(|v| RingElem::Mod(residue_of(&(v * &factor), modulus.get())))
                    .collect();
                if col.iter().any(|e| *e != RingElem::Mod(0)) {
                    gens.push(col);
                }
            }
            gens
        }
    }
}

pub(crate) fn as_int(e: &RingElem) -> BigInt {
    match e {
        RingElem::Int(v) => v.clone(),
        _ => panic!("expected an integer, got {e:?}"),
    }
}

fn as_int_lift(e: &RingElem) -> BigInt {
    match e {
        RingElem::Int(v) => v.clone(),
        RingElem::Mod(r) => BigInt::from(*r),
        RingElem::Rat(_) => panic!("expected an integer or residue, got {e:?}"),
    }
}

pub(crate) fn as_rat(e: &RingElem) -> BigRational {
    match e {
        RingElem::Rat(v) => v.clone(),
        RingElem::Int(v) => BigRational::from_integer(v.clone()),
        RingElem::Mod(_) => panic!("expected a rational, got {e:?}"),
    }
}
