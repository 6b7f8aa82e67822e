//! Coefficient rings `Z`, `Q` and `Z/n` with their norms.
//!
//! The norm on `Z` and `Q` is the absolute value. The norm on `Z/n` is the
//! absolute value of the unique lift into `(-n/2, n/2]`. None of these norms
//! is required to be homogeneous; `Z/n` in particular is not.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A modulus `n >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Modulus(u64);

impl Modulus {
    pub fn new(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidRing(format!("modulus {n} must be at least 2")));
        }
        Ok(Modulus(n))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }
}

/// Which coefficient ring a chain or class lives over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RingSpec {
    Int,
    Rat,
    Mod(Modulus),
}

/// An element of one of the coefficient rings. `Mod` residues are always
/// stored canonically in `[0, n)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RingElem {
    Int(BigInt),
    Rat(BigRational),
    Mod(u64),
}

/// The unique integer in `(-n/2, n/2]` congruent to `residue`.
pub fn canonical_lift(residue: u64, n: u64) -> i64 {
    debug_assert!(n >= 2 && residue < n);
    // residue > n/2  <=>  2 * residue > n
    if 2 * (residue as u128) > n as u128 {
        residue as i64 - n as i64
    } else {
        residue as i64
    }
}

/// `k mod n` as a canonical residue.
pub fn residue_of(k: &BigInt, n: u64) -> u64 {
    k.mod_floor(&BigInt::from(n))
        .to_u64()
        .expect("residue below a u64 modulus")
}

/// The inverse of `k` modulo `n`, or `None` when `gcd(k, n) != 1`.
pub fn mod_inverse(k: i64, n: u64) -> Option<u64> {
    let k = BigInt::from(k);
    mod_inverse_big(&k, n)
}

pub(crate) fn mod_inverse_big(k: &BigInt, n: u64) -> Option<u64> {
    let m = BigInt::from(n);
    let r = k.mod_floor(&m);
    let g = r.extended_gcd(&m);
    if !g.gcd.is_one() {
        return None;
    }
    Some(residue_of(&g.x, n))
}

/// The norm of `e` in `ring`.
pub fn norm(ring: RingSpec, e: &RingElem) -> BigRational {
    match (ring, e) {
        (RingSpec::Int, RingElem::Int(v)) => BigRational::from_integer(v.abs()),
        (RingSpec::Rat, RingElem::Rat(v)) => v.abs(),
        (RingSpec::Mod(n), RingElem::Mod(r)) => {
            BigRational::from_integer(BigInt::from(canonical_lift(*r, n.get()).unsigned_abs()))
        }
        _ => panic!("element {e:?} does not belong to {ring}"),
    }
}

impl RingSpec {
    pub fn modulo(n: u64) -> Result<Self> {
        Ok(RingSpec::Mod(Modulus::new(n)?))
    }

    pub fn modulus(self) -> Option<u64> {
        match self {
            RingSpec::Mod(n) => Some(n.get()),
            _ => None,
        }
    }

    pub fn zero(self) -> RingElem {
        match self {
            RingSpec::Int => RingElem::Int(BigInt::zero()),
            RingSpec::Rat => RingElem::Rat(BigRational::zero()),
            RingSpec::Mod(_) => RingElem::Mod(0),
        }
    }

    /// Image of an integer under the canonical map `Z -> R`.
    pub fn from_int(self, k: &BigInt) -> RingElem {
        match self {
            RingSpec::Int => RingElem::Int(k.clone()),
            RingSpec::Rat => RingElem::Rat(BigRational::from_integer(k.clone())),
            RingSpec::Mod(n) => RingElem::Mod(residue_of(k, n.get())),
        }
    }

    pub fn contains(self, e: &RingElem) -> bool {
        match (self, e) {
            (RingSpec::Int, RingElem::Int(_)) | (RingSpec::Rat, RingElem::Rat(_)) => true,
            (RingSpec::Mod(n), RingElem::Mod(r)) => *r < n.get(),
            _ => false,
        }
    }

    pub fn is_zero(self, e: &RingElem) -> bool {
        match e {
            RingElem::Int(v) => v.is_zero(),
            RingElem::Rat(v) => v.is_zero(),
            RingElem::Mod(r) => *r == 0,
        }
    }

    pub fn add(self, a: &RingElem, b: &RingElem) -> RingElem {
        match (self, a, b) {
            (RingSpec::Int, RingElem::Int(x), RingElem::Int(y)) => RingElem::Int(x + y),
            (RingSpec::Rat, RingElem::Rat(x), RingElem::Rat(y)) => RingElem::Rat(x + y),
            (RingSpec::Mod(n), RingElem::Mod(x), RingElem::Mod(y)) => {
                RingElem::Mod(((*x as u128 + *y as u128) % n.get() as u128) as u64)
            }
            _ => panic!("mixed-ring addition {a:?} + {b:?} over {self}"),
        }
    }

    pub fn neg(self, a: &RingElem) -> RingElem {
        match (self, a) {
            (RingSpec::Int, RingElem::Int(x)) => RingElem::Int(-x),
            (RingSpec::Rat, RingElem::Rat(x)) => RingElem::Rat(-x),
            (RingSpec::Mod(n), RingElem::Mod(x)) => RingElem::Mod((n.get() - x) % n.get()),
            _ => panic!("element {a:?} does not belong to {self}"),
        }
    }

    /// `k * a` for an integer scalar `k`.
    pub fn scale(self, k: &BigInt, a: &RingElem) -> RingElem {
        match (self, a) {
            (RingSpec::Int, RingElem::Int(x)) => RingElem::Int(k * x),
            (RingSpec::Rat, RingElem::Rat(x)) => {
                RingElem::Rat(BigRational::from_integer(k.clone()) * x)
            }
            (RingSpec::Mod(n), RingElem::Mod(x)) => {
                RingElem::Mod(residue_of(&(k * BigInt::from(*x)), n.get()))
            }
            _ => panic!("element {a:?} does not belong to {self}"),
        }
    }

    pub fn parse_elem(self, s: &str) -> Result<RingElem> {
        let s = s.trim();
        match self {
            RingSpec::Int => parse_integer(s).map(RingElem::Int),
            RingSpec::Rat => parse_rational(s).map(RingElem::Rat),
            RingSpec::Mod(n) => Ok(RingElem::Mod(residue_of(&parse_integer(s)?, n.get()))),
        }
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingSpec::Int => write!(f, "Z"),
            RingSpec::Rat => write!(f, "Q"),
            RingSpec::Mod(n) => write!(f, "Z/{}", n.get()),
        }
    }
}

impl FromStr for RingSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "Z" => Ok(RingSpec::Int),
            "Q" | "R" => Ok(RingSpec::Rat),
            other => {
                let n = other
                    .strip_prefix("Z/")
                    .ok_or_else(|| Error::InvalidRing(format!("unknown ring tag {other:?}")))?;
                let n: u64 = n
                    .parse()
                    .map_err(|_| Error::InvalidRing(format!("bad modulus in {other:?}")))?;
                RingSpec::modulo(n)
            }
        }
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingElem::Int(v) => write!(f, "{v}"),
            RingElem::Rat(v) => write!(f, "{}", format_rational(v)),
            RingElem::Mod(r) => write!(f, "{r}"),
        }
    }
}

pub fn parse_integer(s: &str) -> Result<BigInt> {
    BigInt::from_str(s.trim()).map_err(|_| Error::Parse(format!("bad integer {s:?}")))
}

/// Parses `"p/q"` or a bare integer `"p"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p = parse_integer(p)?;
            let q = parse_integer(q)?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(parse_integer(s)?)),
    }
}

/// Formats a rational as reduced `"p/q"` with `q > 0`.
pub fn format_rational(v: &BigRational) -> String {
    format!("{}/{}", v.numer(), v.denom())
}
