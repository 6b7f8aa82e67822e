//! Class norms over `Q`, `Z` and `Z/n`, calibration certificates and the
//! canonical mod-`n` lift.
//!
//! * [`min_real`] solves `min Σ w|x|` over `x = z₀ + ∂y` as an exact LP and
//!   returns the optimal dual cocycle as a calibration certificate.
//! * [`min_int`] and [`min_mod`] enumerate every optimal chain of the coset
//!   `z₀ + B_d` (resp. `z₀ + B_d + n·C_d`) by lattice branch-and-bound.

mod lattice;
pub mod simplex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::complex::{mass, reduce_chain, Chain, Cochain, WeightedComplex};
use crate::error::{Error, Result};
use crate::homology::{ClassCoords, HomologyDecomposition};
use crate::intlinalg::{kernel_basis, IntMatrix};
use crate::rings::{canonical_lift, RingElem, RingSpec};

pub const DEFAULT_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    /// Maximum number of minimizers kept; hitting it clears the exactness flag.
    pub cap: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { cap: DEFAULT_CAP }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptReport {
    pub ring: RingSpec,
    pub class: ClassCoords,
    pub value: BigRational,
    /// Sorted by simplex index, then coefficient.
    pub minimizers: Vec<Chain>,
    pub minimizer_count_exact: bool,
    pub certificate: Option<Cochain>,
    pub nodes_explored: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftReport {
    pub input: Chain,
    pub lifted: Chain,
    pub is_cycle: bool,
    pub lifted_class: Option<ClassCoords>,
    pub mass_preserved: bool,
}

fn zero_report(dec: &HomologyDecomposition, c: &ClassCoords, k: &WeightedComplex) -> OptReport {
    OptReport {
        ring: c.ring,
        class: c.clone(),
        value: BigRational::zero(),
        minimizers: vec![Chain::zero(dec.degree, c.ring)],
        minimizer_count_exact: true,
        certificate: (c.ring == RingSpec::Rat).then(|| Cochain::zero(dec.degree, k.count(dec.degree))),
        nodes_explored: 0,
    }
}

fn expect_ring(c: &ClassCoords, want: fn(RingSpec) -> bool, name: &str) -> Result<()> {
    if want(c.ring) {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{name} needs a class over the matching ring, got {}", c.ring)))
    }
}

fn check_degree(k: &WeightedComplex, dec: &HomologyDecomposition) -> Result<()> {
    if dec.chain_len() != k.count(dec.degree) {
        return Err(Error::ShapeMismatch("decomposition was computed for a different complex".into()));
    }
    Ok(())
}

/// Real (rational) class norm by exact LP, with a calibration certificate.
pub fn min_real(k: &WeightedComplex, dec: &HomologyDecomposition, c: &ClassCoords) -> Result<OptReport> {
    expect_ring(c, |r| r == RingSpec::Rat, "min_real")?;
    check_degree(k, dec)?;
    dec.validate(c)?;
    if dec.is_zero_class(c) {
        return Ok(zero_report(dec, c, k));
    }
    let d = dec.degree;
    let m = k.count(d);
    let z0 = dec.reference_cycle(c)?.to_rats(m);
    let up = k.boundary(d + 1);
    let mu = up.cols();
    let w = k.weights(d);

    // variables: p (m), q (m), y+ (mu), y- (mu); p - q - ∂y+ + ∂y- = z0
    let nvars = 2 * m + 2 * mu;
    let int = |v: &BigInt| BigRational::from_integer(v.clone());
    let a: Vec<Vec<BigRational>> = (0..m)
        .map(|i| {
            let mut row = vec![BigRational::zero(); nvars];
            row[i] = BigRational::one();
            row[m + i] = -BigRational::one();
            for j in 0..mu {
                let e = &up[(i, j)];
                if !e.is_zero() {
                    row[2 * m + j] = -int(e);
                    row[2 * m + mu + j] = int(e);
                }
            }
            row
        })
        .collect();
    let mut cost = Vec::with_capacity(nvars);
    cost.extend(w.iter().cloned());
    cost.extend(w.iter().cloned());
    cost.extend(std::iter::repeat(BigRational::zero()).take(2 * mu));

    let sol = simplex::solve_standard(&a, &z0, &cost)?;
    let x: Vec<RingElem> = (0..m).map(|i| RingElem::Rat(&sol.x[i] - &sol.x[m + i])).collect();
    let minimizer = Chain::from_dense(d, RingSpec::Rat, x)?;
    debug_assert_eq!(mass(k, &minimizer)?, sol.value);
    Ok(OptReport {
        ring: RingSpec::Rat,
        class: c.clone(),
        value: sol.value,
        minimizers: vec![minimizer],
        minimizer_count_exact: true,
        certificate: Some(Cochain { degree: d, values: sol.duals }),
        nodes_explored: sol.pivots,
    })
}

/// Weights scaled by the lcm of their denominators.
fn scaled_weights(k: &WeightedComplex, d: usize) -> Result<(Vec<i128>, BigInt)> {
    let w = k.weights(d);
    let l = w.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let scaled = w
        .iter()
        .map(|q| (q.numer() * (&l / q.denom())).to_i128().ok_or(Error::Overflow("scaled weights")))
        .collect::<Result<Vec<_>>>()?;
    Ok((scaled, l))
}

fn scaled_bound(value: &BigRational, l: &BigInt) -> Result<i128> {
    (value * BigRational::from_integer(l.clone()))
        .floor()
        .to_integer()
        .to_i128()
        .ok_or(Error::Overflow("mass bound"))
}

/// Integral class norm with every optimal chain enumerated (up to the cap).
pub fn min_int(k: &WeightedComplex, dec: &HomologyDecomposition, c: &ClassCoords, cfg: &SearchConfig) -> Result<OptReport> {
    min_int_bounded(k, dec, c, cfg, None)
}

/// As [`min_int`], with a known upper bound on the optimum used to prune.
/// The bound must be at least the true norm or minimizers are lost.
pub fn min_int_bounded(
    k: &WeightedComplex,
    dec: &HomologyDecomposition,
    c: &ClassCoords,
    cfg: &SearchConfig,
    upper: Option<&BigRational>,
) -> Result<OptReport> {
    expect_ring(c, |r| r == RingSpec::Int, "min_int")?;
    lattice_min(k, dec, c, cfg, upper)
}

/// Mod-`n` class norm with every optimal chain enumerated (up to the cap).
pub fn min_mod(k: &WeightedComplex, dec: &HomologyDecomposition, c: &ClassCoords, cfg: &SearchConfig) -> Result<OptReport> {
    min_mod_bounded(k, dec, c, cfg, None)
}

/// As [`min_mod`], with a known upper bound on the optimum.
pub fn min_mod_bounded(
    k: &WeightedComplex,
    dec: &HomologyDecomposition,
    c: &ClassCoords,
    cfg: &SearchConfig,
    upper: Option<&BigRational>,
) -> Result<OptReport> {
    expect_ring(c, |r| r.modulus().is_some(), "min_mod")?;
    lattice_min(k, dec, c, cfg, upper)
}

fn lattice_min(
    k: &WeightedComplex,
    dec: &HomologyDecomposition,
    c: &ClassCoords,
    cfg: &SearchConfig,
    upper: Option<&BigRational>,
) -> Result<OptReport> {
    check_degree(k, dec)?;
    dec.validate(c)?;
    if dec.is_zero_class(c) {
        return Ok(zero_report(dec, c, k));
    }
    let d = dec.degree;
    let m = k.count(d);
    let reference = dec.reference_cycle(c)?;
    let start = reference.to_ints(m);
    let up = k.boundary(d + 1);
    let invariants: Vec<(Vec<i64>, u64)> = match c.ring.modulus() {
        None => Vec::new(),
        Some(n) => kernel_basis(&up.transpose(), c.ring)
            .into_iter()
            .map(|v| (v.iter().map(|e| if let RingElem::Mod(r) = e { *r as i64 } else { 0 }).collect(), n))
            .collect(),
    };
    let generators = match c.ring.modulus() {
        None => up,
        Some(n) => {
            let mut g = IntMatrix::zeros(m, up.cols() + m);
            for i in 0..m {
                for j in 0..up.cols() {
                    g[(i, j)] = up[(i, j)].clone();
                }
                g[(i, up.cols() + i)] = BigInt::from(n);
            }
            g
        }
    };
    let (weights, l) = scaled_weights(k, d)?;
    let mut bound = mass(k, &reference)?;
    if let Some(u) = upper {
        if *u < bound {
            bound = u.clone();
        }
    }
    let problem = lattice::CosetProblem {
        start: &start,
        generators: &generators,
        weights: &weights,
        window: c.ring.modulus(),
        bound: scaled_bound(&bound, &l)?,
        cap: cfg.cap,
        invariants: &invariants,
    };
    let opt = lattice::minimize(&problem)?;
    if opt.points.is_empty() {
        return Err(Error::Precondition(
            "upper bound is below the class norm; no representative found".into(),
        ));
    }
    let mut minimizers: Vec<Chain> = opt
        .points
        .iter()
        .map(|pt| {
            let ints = Chain::from_i64s(d, pt);
            match c.ring {
                RingSpec::Int => Ok(ints),
                ring => reduce_chain(&ints, ring),
            }
        })
        .collect::<Result<_>>()?;
    minimizers.sort();
    let value = BigRational::new(BigInt::from(opt.mass), l);
    Ok(OptReport {
        ring: c.ring,
        class: c.clone(),
        value,
        minimizers,
        minimizer_count_exact: opt.exact,
        certificate: None,
        nodes_explored: opt.nodes,
    })
}

/// Largest value of `|φ(σ)| / w_σ` over the `d`-simplices.
pub fn comass(k: &WeightedComplex, phi: &Cochain) -> BigRational {
    k.weights(phi.degree)
        .iter()
        .zip(&phi.values)
        .map(|(w, v)| v.abs() / w)
        .max()
        .unwrap_or_else(BigRational::zero)
}

/// Checks that `φ` is a cocycle of comass at most one pairing to `claimed`
/// with the class `c`, which certifies `claimed <= ‖c‖`.
pub fn verify_certificate(
    k: &WeightedComplex,
    dec: &HomologyDecomposition,
    c: &ClassCoords,
    phi: &Cochain,
    claimed: &BigRational,
) -> Result<bool> {
    expect_ring(c, |r| r == RingSpec::Rat, "verify_certificate")?;
    let d = dec.degree;
    if phi.degree != d || phi.values.len() != k.count(d) {
        return Err(Error::ShapeMismatch("cochain does not match the class degree".into()));
    }
    let up = k.boundary(d + 1);
    let closed = (0..up.cols()).all(|j| {
        let s: BigRational = (0..up.rows())
            .filter(|&i| !up[(i, j)].is_zero())
            .map(|i| &phi.values[i] * BigRational::from_integer(up[(i, j)].clone()))
            .sum();
        s.is_zero()
    });
    if !closed || comass(k, phi) > BigRational::one() {
        return Ok(false);
    }
    let z0 = dec.reference_cycle(c)?;
    Ok(phi.eval(&z0) == *claimed)
}

/// Coefficientwise canonical lift of a mod-`n` cycle to an integral chain.
pub fn lift_minimizer(k: &WeightedComplex, dec: &HomologyDecomposition, t: &Chain) -> Result<LiftReport> {
    let Some(n) = t.ring.modulus() else {
        return Err(Error::Precondition(format!("lift_minimizer expects a Z/n chain, got {}", t.ring)));
    };
    k.check_chain(t)?;
    let lifted = Chain::from_pairs(
        t.degree,
        RingSpec::Int,
        t.iter().map(|(i, e)| {
            let RingElem::Mod(r) = e else { unreachable!() };
            (i, RingElem::Int(BigInt::from(canonical_lift(*r, n))))
        }),
    )?;
    let is_cycle = k.boundary_of(&lifted)?.is_zero();
    let lifted_class = if is_cycle && t.degree == dec.degree {
        Some(dec.class_of_cycle(&lifted)?)
    } else {
        None
    };
    let mass_preserved = mass(k, &lifted)? == mass(k, t)?;
    Ok(LiftReport { input: t.clone(), lifted, is_cycle, lifted_class, mass_preserved })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::suite;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn comass_examples() {
        let k = WeightedComplex::new(
            "two edges",
            vec![vec![vec![0], vec![1], vec![2]], vec![vec![0, 1], vec![1, 2]]],
            vec![vec![q(1, 1); 3], vec![q(1, 1), q(2, 1)]],
        )
        .unwrap();
        let phi = Cochain { degree: 1, values: vec![q(1, 1), q(3, 1)] };
        assert_eq!(comass(&k, &phi), q(3, 2));
        assert_eq!(comass(&k, &Cochain::zero(1, 2)), q(0, 1));
        let unit = Cochain { degree: 1, values: k.weights(1).to_vec() };
        assert_eq!(comass(&k, &unit), q(1, 1));
    }

    #[test]
    fn circle_norms() {
        let k = suite::triangle_circle();
        let dec = HomologyDecomposition::compute(&k, 1).unwrap();
        let c = dec.parse_class("f:1", RingSpec::Int).unwrap();
        let cfg = SearchConfig::default();
        let r = min_int(&k, &dec, &c, &cfg).unwrap();
        assert_eq!(r.value, q(3, 1));
        assert_eq!(r.minimizers.len(), 1);
        let c2 = dec.parse_class("f:2", RingSpec::Int).unwrap();
        assert_eq!(min_int(&k, &dec, &c2, &cfg).unwrap().value, q(6, 1));

        let cr = dec.reduce_class(&c, RingSpec::Rat).unwrap();
        let rr = min_real(&k, &dec, &cr).unwrap();
        assert_eq!(rr.value, q(3, 1));
        let cert = rr.certificate.clone().unwrap();
        assert!(verify_certificate(&k, &dec, &cr, &cert, &rr.value).unwrap());
        assert!(!verify_certificate(&k, &dec, &cr, &cert.scale(&q(2, 1)), &q(6, 1)).unwrap());

        let z3 = RingSpec::modulo(3).unwrap();
        let cm = dec.reduce_class(&c, z3).unwrap();
        assert_eq!(min_mod(&k, &dec, &cm, &cfg).unwrap().value, q(3, 1));
    }

    #[test]
    fn zero_class_short_circuit() {
        let k = suite::torus();
        let dec = HomologyDecomposition::compute(&k, 1).unwrap();
        let cfg = SearchConfig::default();
        for ring in [RingSpec::Int, RingSpec::Rat, RingSpec::modulo(4).unwrap()] {
            let z = dec.zero_class(ring);
            let r = match ring {
                RingSpec::Int => min_int(&k, &dec, &z, &cfg).unwrap(),
                RingSpec::Rat => min_real(&k, &dec, &z).unwrap(),
                _ => min_mod(&k, &dec, &z, &cfg).unwrap(),
            };
            assert!(r.value.is_zero());
            assert_eq!(r.minimizers, vec![Chain::zero(1, ring)]);
        }
        let zr = dec.zero_class(RingSpec::Rat);
        assert!(verify_certificate(&k, &dec, &zr, &Cochain::zero(1, k.count(1)), &q(0, 1)).unwrap());
    }

    #[test]
    fn wrong_ring_rejected() {
        let k = suite::triangle_circle();
        let dec = HomologyDecomposition::compute(&k, 1).unwrap();
        let c = dec.parse_class("f:1", RingSpec::Int).unwrap();
        assert!(min_real(&k, &dec, &c).is_err());
        assert!(min_mod(&k, &dec, &c, &SearchConfig::default()).is_err());
    }

    #[test]
    fn lift_examples() {
        let k = suite::triangle_circle();
        let dec = HomologyDecomposition::compute(&k, 1).unwrap();
        let c = dec.parse_class("f:1", RingSpec::Int).unwrap();
        let z5 = RingSpec::modulo(5).unwrap();
        let circle = dec.reference_cycle(&dec.reduce_class(&c, z5).unwrap()).unwrap();
        let lift = lift_minimizer(&k, &dec, &circle).unwrap();
        assert!(lift.is_cycle && lift.mass_preserved);
        assert_eq!(lift.lifted_class, Some(c));
        assert_eq!(reduce_chain(&lift.lifted, z5).unwrap(), circle);

        let zero = lift_minimizer(&k, &dec, &Chain::zero(1, z5)).unwrap();
        assert!(zero.is_cycle && zero.lifted.is_zero());

        let p = suite::rp2();
        let dec2 = HomologyDecomposition::compute(&p, 2).unwrap();
        let z2 = RingSpec::modulo(2).unwrap();
        let ones = Chain::from_dense(2, z2, vec![RingElem::Mod(1); 10]).unwrap();
        let l = lift_minimizer(&p, &dec2, &ones).unwrap();
        assert!(!l.is_cycle && l.lifted_class.is_none() && l.mass_preserved);
    }
}
