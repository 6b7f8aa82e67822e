//! Independent oracles shared by the integration tests: box enumeration for
//! integral and mod-n norms, LP vertex enumeration for real norms, dense
//! rational and mod-p elimination, determinantal divisors, and seeded random
//! complexes.
#![allow(dead_code)]

use std::collections::BTreeSet;

use hasse::intlinalg::{solve_linear, IntMatrix};
use hasse::rings::{canonical_lift, RingElem, RingSpec};
use hasse::{mass, Chain, ClassCoords, HomologyDecomposition, WeightedComplex};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(p.into(), d.into())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dense_int(c: &Chain, len: usize) -> Vec<i64> {
    let mut v = vec![0i64; len];
    for (i, e) in c.iter() {
        v[i] = match e {
            RingElem::Int(x) => x.to_i64().expect("small coefficient"),
            RingElem::Mod(r) => canonical_lift(*r, c.ring.modulus().unwrap()),
            RingElem::Rat(_) => panic!("rational chain"),
        };
    }
    v
}

pub fn dense_rat(c: &Chain, len: usize) -> Vec<BigRational> {
    let mut v = vec![BigRational::zero(); len];
    for (i, e) in c.iter() {
        v[i] = match e {
            RingElem::Int(x) => BigRational::from_integer(x.clone()),
            RingElem::Rat(x) => x.clone(),
            RingElem::Mod(_) => panic!("residue chain"),
        };
    }
    v
}

pub fn int_chain(d: usize, v: &[i64]) -> Chain {
    Chain::from_i64s(d, v)
}

pub fn mod_chain(d: usize, n: u64, v: &[i64]) -> Chain {
    let ring = RingSpec::modulo(n).unwrap();
    Chain::from_pairs(d, ring, v.iter().enumerate().map(|(i, &x)| (i, ring.from_int(&BigInt::from(x))))).unwrap()
}

pub fn small_matrix(m: &IntMatrix) -> Vec<Vec<i64>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|x| x.to_i64().unwrap()).collect()).collect()
}

/// Boundary of degree `d` as a dense small matrix; `None` outside `1..=dim`.
pub fn boundary(k: &WeightedComplex, d: usize) -> Option<Vec<Vec<i64>>> {
    (d >= 1 && d <= k.dim()).then(|| small_matrix(&k.boundary_matrix(d).unwrap()))
}

fn apply(m: &[Vec<i64>], x: &[i64]) -> Vec<i64> {
    m.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

/// Weights scaled to integers by a common denominator.
pub fn scaled_weights(w: &[BigRational]) -> (Vec<i128>, BigInt) {
    let l = w.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let s = w.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer().to_i128().unwrap()).collect();
    (s, l)
}

/// Depth-first walk over a product of candidate lists, pruned on weighted
/// absolute mass exceeding `bound`.
fn walk(cands: &[Vec<i64>], w: &[i128], bound: i128, visit: &mut dyn FnMut(&[i64], i128)) {
    fn go(i: usize, x: &mut Vec<i64>, acc: i128, cands: &[Vec<i64>], w: &[i128], bound: i128, visit: &mut dyn FnMut(&[i64], i128)) {
        if i == cands.len() {
            visit(x, acc);
            return;
        }
        for &v in &cands[i] {
            let a = acc + w[i] * v.unsigned_abs() as i128;
            if a > bound {
                continue;
            }
            x.push(v);
            go(i + 1, x, a, cands, w, bound, visit);
            x.pop();
        }
    }
    go(0, &mut Vec::new(), 0, cands, w, bound, visit);
}

pub struct Brute {
    pub value: BigRational,
    pub set: BTreeSet<Chain>,
}

const BOX_LIMIT: f64 = 3.0e7;

/// All integral cycles in the class of `c`, searched over the box
/// `|x_i| <= mass(z0) / w_i`. `None` when the box is too large to walk.
pub fn brute_int(k: &WeightedComplex, dec: &HomologyDecomposition, c: &ClassCoords) -> Option<Brute> {
    let d = dec.degree;
    let m = k.count(d);
    let z0 = dense_int(&dec.reference_cycle(c).unwrap(), m);
    let (w, scale) = scaled_weights(k.weights(d));
    let bound: i128 = z0.iter().zip(&w).map(|(x, wi)| x.unsigned_abs() as i128 * wi).sum();
    let cands: Vec<Vec<i64>> = w.iter().map(|wi| { let b = (bound / wi) as i64; (-b..=b).collect() }).collect();
    if cands.iter().map(|c| c.len() as f64).product::<f64>() > BOX_LIMIT {
        return None;
    }
    let down = boundary(k, d);
    let up = k.boundary_matrix(d + 1).ok();
    let mut best = i128::MAX;
    let mut set = BTreeSet::new();
    walk(&cands, &w, bound, &mut |x, acc| {
        if acc > best {
            return;
        }
        if let Some(bd) = &down {
            if apply(bd, x).iter().any(|&v| v != 0) {
                return;
            }
        }
        let diff: Vec<i64> = x.iter().zip(&z0).map(|(a, b)| a - b).collect();
        let in_class = match &up {
            None => diff.iter().all(|&v| v == 0),
            Some(a) => {
                let b: Vec<RingElem> = diff.iter().map(|&v| RingElem::Int(v.into())).collect();
                solve_linear(a, &b, RingSpec::Int).unwrap().is_some()
            }
        };
        if !in_class {
            return;
        }
        if acc < best {
            best = acc;
            set.clear();
        }
        set.insert(int_chain(d, x));
    });
    Some(Brute { value: BigRational::new(best.into(), scale), set })
}

/// All mod-`n` cycles in the class of `c` (a class over `Z/n`).
pub fn brute_mod(k: &WeightedComplex, dec: &HomologyDecomposition, c: &ClassCoords) -> Option<Brute> {
    let d = dec.degree;
    let n = c.ring.modulus().unwrap();
    let m = k.count(d);
    let z0 = dense_int(&dec.reference_cycle(c).unwrap(), m);
    let (w, scale) = scaled_weights(k.weights(d));
    let bound: i128 = z0.iter().zip(&w).map(|(x, wi)| x.unsigned_abs() as i128 * wi).sum();
    let window: Vec<i64> = (0..n).map(|r| canonical_lift(r, n)).collect();
    let cands: Vec<Vec<i64>> = vec![window; m];
    if (n as f64).powi(m as i32) > BOX_LIMIT {
        return None;
    }
    let down = boundary(k, d);
    let up = k.boundary_matrix(d + 1).ok();
    let ni = n as i64;
    let mut best = i128::MAX;
    let mut set = BTreeSet::new();
    walk(&cands, &w, bound, &mut |x, acc| {
        if acc > best {
            return;
        }
        if let Some(bd) = &down {
            if apply(bd, x).iter().any(|&v| v.rem_euclid(ni) != 0) {
                return;
            }
        }
        let diff: Vec<i64> = x.iter().zip(&z0).map(|(a, b)| (a - b).rem_euclid(ni)).collect();
        let in_class = match &up {
            None => diff.iter().all(|&v| v == 0),
            Some(a) => {
                let b: Vec<RingElem> = diff.iter().map(|&v| RingElem::Mod(v as u64)).collect();
                solve_linear(a, &b, c.ring).unwrap().is_some()
            }
        };
        if !in_class {
            return;
        }
        if acc < best {
            best = acc;
            set.clear();
        }
        set.insert(mod_chain(d, n, x));
    });
    Some(Brute { value: BigRational::new(best.into(), scale), set })
}

/// Integral norm of a class on a complex where every `(d+1)`-simplex owns a
/// private `d`-face, which makes `y ↦ z0 + ∂y` injective and lets the private
/// coefficients of `z` parametrize the class. `upper` must bound the norm.
pub fn brute_int_private(k: &WeightedComplex, d: usize, z0: &[i64], upper: &BigRational) -> Brute {
    let up = boundary(k, d + 1).unwrap();
    let w = k.weights(d);
    let tops = up[0].len();
    let private: Vec<(usize, i64)> = (0..tops)
        .map(|t| {
            let faces: Vec<usize> = (0..up.len()).filter(|&i| up[i][t] != 0).collect();
            let own = faces
                .into_iter()
                .find(|&i| (0..tops).filter(|&s| up[i][s] != 0).count() == 1)
                .expect("a private face");
            (own, up[own][t])
        })
        .collect();
    let pw: Vec<BigRational> = private.iter().map(|&(e, _)| w[e].clone()).collect();
    let (sw, scale) = scaled_weights(&pw.iter().chain(w.iter()).cloned().collect::<Vec<_>>());
    let pw_scaled = &sw[..tops];
    let bound = (upper * BigRational::from_integer(scale.clone())).floor().to_integer().to_i128().unwrap();
    let cands: Vec<Vec<i64>> = pw_scaled.iter().map(|wi| { let b = (bound / wi) as i64; (-b..=b).collect() }).collect();
    let full_w = &sw[tops..];
    let mut best = i128::MAX;
    let mut set = BTreeSet::new();
    walk(&cands, pw_scaled, bound, &mut |b, _| {
        let y: Vec<i64> = private.iter().zip(b).map(|(&(e, s), &be)| (be - z0[e]) * s).collect();
        let mut z = z0.to_vec();
        for (i, row) in up.iter().enumerate() {
            z[i] += row.iter().zip(&y).map(|(a, b)| a * b).sum::<i64>();
        }
        let acc: i128 = z.iter().zip(full_w).map(|(x, wi)| x.unsigned_abs() as i128 * wi).sum();
        if acc > best {
            return;
        }
        if acc < best {
            best = acc;
            set.clear();
        }
        set.insert(int_chain(d, &z));
    });
    Brute { value: BigRational::new(best.into(), scale), set }
}

/// Gaussian elimination over `Q`; returns (rank, pivot columns).
pub fn rank_q(rows: &[Vec<BigRational>]) -> (usize, Vec<usize>) {
    let mut a: Vec<Vec<BigRational>> = rows.to_vec();
    let cols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = &a[i][c] / &a[r][c];
                for j in c..cols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (r, pivots)
}

pub fn rank_int(m: &[Vec<i64>]) -> usize {
    let rows: Vec<Vec<BigRational>> = m.iter().map(|r| r.iter().map(|&x| q(x, 1)).collect()).collect();
    rank_q(&rows).0
}

pub fn rank_mod_p(m: &[Vec<i64>], p: i64) -> usize {
    let mut a: Vec<Vec<i64>> = m.iter().map(|r| r.iter().map(|x| x.rem_euclid(p)).collect()).collect();
    let cols = a.first().map_or(0, |r| r.len());
    let inv = |x: i64| (1..p).find(|y| x * y % p == 1).unwrap();
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..a.len()).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, piv);
        let s = inv(a[r][c]);
        for j in 0..cols {
            a[r][j] = a[r][j] * s % p;
        }
        for i in 0..a.len() {
            if i != r && a[i][c] != 0 {
                let f = a[i][c];
                for j in 0..cols {
                    a[i][j] = (a[i][j] - f * a[r][j]).rem_euclid(p);
                }
            }
        }
        r += 1;
    }
    r
}

pub fn det_q(a: &[Vec<BigRational>]) -> BigRational {
    let mut a = a.to_vec();
    let n = a.len();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return BigRational::zero() };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c].clone();
        for i in c + 1..n {
            if !a[i][c].is_zero() {
                let f = &a[i][c] / &a[c][c];
                for j in c..n {
                    let t = &f * &a[c][j];
                    a[i][j] -= t;
                }
            }
        }
    }
    det
}

pub fn det_int(a: &[Vec<i64>]) -> BigInt {
    let r: Vec<Vec<BigRational>> = a.iter().map(|row| row.iter().map(|&x| q(x, 1)).collect()).collect();
    det_q(&r).to_integer()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    subsets(n, k)
}

fn minor(a: &[Vec<i64>], rows: &[usize], cols: &[usize]) -> BigInt {
    let sub: Vec<Vec<i64>> = rows.iter().map(|&i| cols.iter().map(|&j| a[i][j]).collect()).collect();
    det_int(&sub)
}

/// Invariant factors `d_k / d_{k-1}` from gcds of all `k × k` minors.
pub fn invariant_factors(a: &[Vec<i64>]) -> Vec<BigInt> {
    let (m, n) = (a.len(), a.first().map_or(0, |r| r.len()));
    let mut prev = BigInt::one();
    let mut out = Vec::new();
    for k in 1..=m.min(n) {
        let mut g = BigInt::zero();
        for rs in subsets(m, k) {
            for cs in subsets(n, k) {
                g = g.gcd(&minor(a, &rs, &cs));
            }
        }
        if g.is_zero() {
            break;
        }
        out.push(&g / &prev);
        prev = g;
    }
    out
}

pub struct TorsionCertificate {
    pub rank: usize,
    /// `(p, exponent)` for each cyclic factor, each of prime order.
    pub factors: Vec<(u64, u32)>,
    pub order: BigInt,
}

/// Proves the torsion of `coker a` when it is a product of cyclic groups of
/// prime order: counts invariant factors divisible by each small prime from
/// rank drops mod p, then finds maximal minors whose gcd meets that lower
/// bound, so the product of invariant factors is pinned exactly.
pub fn torsion_certificate(a: &[Vec<i64>], seed: u64) -> Option<TorsionCertificate> {
    let r = rank_int(a);
    let mut factors = Vec::new();
    let mut lower = BigInt::one();
    for p in [2i64, 3, 5, 7, 11, 13] {
        let drop = r - rank_mod_p(a, p);
        for _ in 0..drop {
            factors.push((p as u64, 1));
            lower *= p;
        }
    }
    if r == 0 {
        return Some(TorsionCertificate { rank: 0, factors, order: lower });
    }
    let (m, n) = (a.len(), a[0].len());
    let mut rng = rng(seed);
    let mut g = BigInt::zero();
    let rows_all: Vec<usize> = (0..m).collect();
    let cols_all: Vec<usize> = (0..n).collect();
    for _ in 0..20_000 {
        let mut rs: Vec<usize> = rows_all.choose_multiple(&mut rng, r).copied().collect();
        let mut cs: Vec<usize> = cols_all.choose_multiple(&mut rng, r).copied().collect();
        rs.sort();
        cs.sort();
        g = g.gcd(&minor(a, &rs, &cs));
        if !g.is_zero() && g == lower {
            return Some(TorsionCertificate { rank: r, factors, order: lower });
        }
    }
    None
}

/// Real norm by enumerating the vertices of `{z0 + G t}` cut out by
/// `rank G` coordinate hyperplanes.
pub fn brute_real(k: &WeightedComplex, dec: &HomologyDecomposition, c: &ClassCoords) -> BigRational {
    let d = dec.degree;
    let m = k.count(d);
    let z0 = dense_rat(&dec.reference_cycle(c).unwrap(), m);
    let w = k.weights(d);
    let g: Vec<Vec<BigRational>> = match boundary(k, d + 1) {
        None => vec![Vec::new(); m],
        Some(up) => {
            let rows: Vec<Vec<BigRational>> = up.iter().map(|r| r.iter().map(|&x| q(x, 1)).collect()).collect();
            // independent columns of the boundary span the same image
            let (_, cols) = rank_q(&rows);
            rows.iter().map(|r| cols.iter().map(|&j| r[j].clone()).collect()).collect()
        }
    };
    let r = g.first().map_or(0, |row| row.len());
    let eval = |z: &[BigRational]| -> BigRational { z.iter().zip(w).map(|(x, wi)| x.abs() * wi).sum() };
    if r == 0 {
        return eval(&z0);
    }
    let mut best: Option<BigRational> = None;
    for s in subsets(m, r) {
        let a: Vec<Vec<BigRational>> = s.iter().map(|&i| g[i].clone()).collect();
        if det_q(&a).is_zero() {
            continue;
        }
        let b: Vec<BigRational> = s.iter().map(|&i| -z0[i].clone()).collect();
        let t = solve_square(a, b);
        let z: Vec<BigRational> = (0..m)
            .map(|i| &z0[i] + g[i].iter().zip(&t).map(|(x, y)| x * y).sum::<BigRational>())
            .collect();
        let v = eval(&z);
        if best.as_ref().map_or(true, |b| v < *b) {
            best = Some(v);
        }
    }
    best.expect("some vertex exists")
}

fn solve_square(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Vec<BigRational> {
    let n = a.len();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero()).unwrap();
        a.swap(p, c);
        b.swap(p, c);
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = &a[i][c] / &a[c][c];
                for j in c..n {
                    let t = &f * &a[c][j];
                    a[i][j] -= t;
                }
                let t = &f * &b[c];
                b[i] -= t;
            }
        }
    }
    (0..n).map(|i| &b[i] / &a[i][i]).collect()
}

/// Checks a calibration directly: closed, comass at most one, pairs to `value`.
pub fn certificate_holds(k: &WeightedComplex, dec: &HomologyDecomposition, c: &ClassCoords, phi: &[BigRational], value: &BigRational) -> bool {
    let d = dec.degree;
    let w = k.weights(d);
    if let Some(up) = boundary(k, d + 1) {
        for j in 0..up[0].len() {
            let s: BigRational = (0..up.len()).map(|i| &phi[i] * q(up[i][j], 1)).sum();
            if !s.is_zero() {
                return false;
            }
        }
    }
    if phi.iter().zip(w).any(|(p, wi)| p.abs() > *wi) {
        return false;
    }
    let z0 = dense_rat(&dec.reference_cycle(c).unwrap(), k.count(d));
    let pairing: BigRational = z0.iter().zip(phi).map(|(a, b)| a * b).sum();
    pairing == *value
}

pub fn random_weight(rng: &mut ChaCha8Rng) -> BigRational {
    q(rng.gen_range(1..=6), rng.gen_range(1..=4))
}

/// Random 2-complex on at most `max_v` vertices with random positive weights.
pub fn random_complex(rng: &mut ChaCha8Rng, max_v: usize, edge_p: f64, tri_p: f64) -> WeightedComplex {
    let nv = rng.gen_range(3..=max_v);
    let mut facets: Vec<Vec<usize>> = (0..nv).map(|v| vec![v]).collect();
    let mut edges = BTreeSet::new();
    for a in 0..nv {
        for b in a + 1..nv {
            if rng.gen_bool(edge_p) {
                edges.insert((a, b));
                facets.push(vec![a, b]);
            }
        }
    }
    for a in 0..nv {
        for b in a + 1..nv {
            for c in b + 1..nv {
                if edges.contains(&(a, b)) && edges.contains(&(a, c)) && edges.contains(&(b, c)) && rng.gen_bool(tri_p) {
                    facets.push(vec![a, b, c]);
                }
            }
        }
    }
    let mut k = WeightedComplex::from_facets("random", &facets).unwrap();
    for d in 1..=k.dim() {
        let w = (0..k.count(d)).map(|_| random_weight(rng)).collect();
        k = k.with_weights(d, w).unwrap();
    }
    k
}

/// Uniform random class with free coordinates in `-r..=r`.
pub fn random_class(rng: &mut ChaCha8Rng, dec: &HomologyDecomposition, r: i64) -> ClassCoords {
    let free = (0..dec.betti).map(|_| RingElem::Int(rng.gen_range(-r..=r).into())).collect();
    let t: Vec<BigInt> = dec.torsion_orders().iter().map(|&o| rng.gen_range(0..o).into()).collect();
    dec.class(RingSpec::Int, free, &t, &[]).unwrap()
}

/// Every class with free coordinates in `-r..=r` and every torsion value.
pub fn all_classes(dec: &HomologyDecomposition, r: i64) -> Vec<ClassCoords> {
    let mut out = vec![(Vec::new(), Vec::new())];
    for _ in 0..dec.betti {
        out = out
            .into_iter()
            .flat_map(|(f, t): (Vec<i64>, Vec<i64>)| (-r..=r).map(move |a| { let mut f = f.clone(); f.push(a); (f, t.clone()) }))
            .collect();
    }
    for o in dec.torsion_orders() {
        out = out
            .into_iter()
            .flat_map(|(f, t)| (0..o as i64).map(move |a| { let mut t = t.clone(); t.push(a); (f.clone(), t) }))
            .collect();
    }
    out.into_iter()
        .map(|(f, t)| {
            let free = f.iter().map(|&a| RingElem::Int(a.into())).collect();
            let t: Vec<BigInt> = t.iter().map(|&a| a.into()).collect();
            dec.class(RingSpec::Int, free, &t, &[]).unwrap()
        })
        .collect()
}

/// Complexes with at most six `d`-simplices, paired with the degree `d`.
pub fn small_corpus(seed: u64) -> Vec<(WeightedComplex, usize)> {
    let mut rng = rng(seed);
    let mut out = vec![(hasse::suite::triangle_circle(), 1)];
    let tet: Vec<Vec<usize>> = vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]];
    let sphere = WeightedComplex::from_facets("tetrahedron-boundary", &tet).unwrap();
    out.push((sphere.clone(), 2));
    let w: Vec<BigRational> = vec![q(1, 2), q(2, 1), q(1, 1), q(3, 2)];
    out.push((sphere.with_weights(2, w).unwrap(), 2));
    while out.len() < 24 {
        let k = random_complex(&mut rng, 5, 0.7, 0.4);
        if k.count(1) <= 6 && k.count(1) >= 3 {
            out.push((k, 1));
        }
    }
    out
}

pub fn mass_of(k: &WeightedComplex, c: &Chain) -> BigRational {
    mass(k, c).unwrap()
}
