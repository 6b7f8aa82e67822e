//! Integral homology decompositions and class coordinates over `Z`, `Q`, `Z/n`.
//!
//! `H_d(K; Z) = Z^b ⊕ ⊕_i Z/q_i` with `q_i` prime powers, computed from the
//! Smith forms of `∂_d` and of `∂_{d+1}` written in a kernel basis. The basis
//! is whatever the fixed pivot rule produces; it is not canonical, so all
//! coordinates are relative to it.
//!
//! Mod-`n` classes carry a third block of coordinates, the Bockstein image in
//! `Tor(H_{d-1}, Z/n) = ⊕_i Z/gcd(q'_i, n)`. A class is a reduction of an
//! integral class exactly when that block vanishes.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::complex::{Chain, WeightedComplex};
use crate::error::{Error, Result};
use crate::intlinalg::{as_int, smith_normal_form, solve_with_snf, IntMatrix, SnfResult};
use crate::rings::{mod_inverse_big, parse_integer, parse_rational, residue_of, RingElem, RingSpec};

#[derive(Debug, Clone)]
struct TorsionSlot {
    /// Row of the coordinate map carrying this invariant factor.
    row: usize,
    /// Prime-power order `q = p^ν`.
    order: u64,
    /// Inverse of `e / q` modulo `q`, where `e` is the invariant factor.
    cofactor_inv: BigInt,
}

/// Homology of one degree together with the data needed to convert between
/// cycles and class coordinates.
#[derive(Debug, Clone)]
pub struct HomologyDecomposition {
    pub degree: usize,
    pub betti: usize,
    /// `(p_i, ν_i)` for each cyclic factor `Z/p_i^ν_i`.
    pub torsion_factors: Vec<(u64, u32)>,
    /// Product of all `p_i^ν_i`; 1 when torsion-free.
    pub torsion_number: u64,
    pub free_basis: Vec<Chain>,
    pub torsion_basis: Vec<Chain>,
    /// `(d+1)`-chains `t_i` with `∂ t_i = q_i · v_i`.
    pub torsion_witnesses: Vec<Chain>,
    chain_len: usize,
    coords: IntMatrix,
    free_rows: Vec<usize>,
    slots: Vec<TorsionSlot>,
    boundary: IntMatrix,
    boundary_snf: SnfResult,
    lower: Option<Box<HomologyDecomposition>>,
}

/// Coordinates of a homology class in the basis of a decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassCoords {
    pub degree: usize,
    pub ring: RingSpec,
    /// `α_j`, elements of the ring.
    pub free: Vec<RingElem>,
    /// `β_i`, residues modulo `q_i` (over Z) or `gcd(q_i, n)` (over Z/n);
    /// empty over Q.
    pub torsion: Vec<u64>,
    /// Bockstein coordinates modulo `gcd(q'_i, n)` against the torsion of
    /// `H_{d-1}`; only populated over Z/n.
    pub bockstein: Vec<u64>,
}

fn to_u64(v: &BigInt, what: &'static str) -> Result<u64> {
    v.to_u64().ok_or(Error::Overflow(what))
}

fn prime_powers(mut e: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= e {
        if e % p == 0 {
            let mut nu = 0;
            while e % p == 0 {
                e /= p;
                nu += 1;
            }
            out.push((p, nu));
        }
        p += 1;
    }
    if e > 1 {
        out.push((e, 1));
    }
    out
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

impl HomologyDecomposition {
    /// Decomposition of `H_d(K; Z)`, `0 <= d <= dim`. For `d >= 1` the
    /// decomposition of `H_{d-1}` is kept alongside for mod-`n` Bockstein
    /// coordinates.
    pub fn compute(k: &WeightedComplex, d: usize) -> Result<Self> {
        let mut dec = Self::compute_single(k, d)?;
        if d >= 1 {
            dec.lower = Some(Box::new(Self::compute_single(k, d - 1)?));
        }
        Ok(dec)
    }

    fn compute_single(k: &WeightedComplex, d: usize) -> Result<Self> {
        if d > k.dim() {
            return Err(Error::DegreeOutOfRange { degree: d, max: k.dim() });
        }
        let m = k.count(d);
        let boundary = k.boundary(d);
        let up = k.boundary(d + 1);
        let snf = smith_normal_form(&boundary);
        let r = snf.rank();
        let z = m - r;

        let mut kmat = IntMatrix::zeros(m, z);
        let mut kinv = IntMatrix::zeros(z, m);
        for j in 0..z {
            for i in 0..m {
                kmat[(i, j)] = snf.v[(i, r + j)].clone();
                kinv[(j, i)] = snf.v_inv[(r + j, i)].clone();
            }
        }
        let reduced = kinv.mul(&up)?;
        let snf_up = smith_normal_form(&reduced);
        let s = snf_up.rank();
        let coords = snf_up.u.mul(&kinv)?;
        let gens = kmat.mul(&snf_up.u_inv)?;

        let mut torsion_factors = Vec::new();
        let mut torsion_basis = Vec::new();
        let mut torsion_witnesses = Vec::new();
        let mut slots = Vec::new();
        let mut torsion_number = 1u64;
        for i in 0..s {
            let e = &snf_up.diag[i];
            if e.is_one() {
                continue;
            }
            let e64 = to_u64(e, "torsion order")?;
            let g = gens.column(i);
            let witness = Chain::from_ints(d + 1, &snf_up.v.column(i));
            for (p, nu) in prime_powers(e64) {
                let q = p.pow(nu);
                torsion_number = torsion_number.checked_mul(q).ok_or(Error::Overflow("torsion number"))?;
                let cof = BigInt::from(e64 / q);
                let cofactor_inv = BigInt::from(mod_inverse_big(&cof, q).unwrap_or(0));
                let v: Vec<BigInt> = g.iter().map(|x| x * &cof).collect();
                torsion_factors.push((p, nu));
                torsion_basis.push(Chain::from_ints(d, &v));
                torsion_witnesses.push(witness.clone());
                slots.push(TorsionSlot { row: i, order: q, cofactor_inv });
            }
        }
        let free_rows: Vec<usize> = (s..z).collect();
        let free_basis = free_rows.iter().map(|&i| Chain::from_ints(d, &gens.column(i))).collect();

        Ok(HomologyDecomposition {
            degree: d,
            betti: z - s,
            torsion_factors,
            torsion_number,
            free_basis,
            torsion_basis,
            torsion_witnesses,
            chain_len: m,
            coords,
            free_rows,
            slots,
            boundary,
            boundary_snf: snf,
            lower: None,
        })
    }

    pub fn chain_len(&self) -> usize {
        self.chain_len
    }

    /// Orders `q_i` of the torsion factors.
    pub fn torsion_orders(&self) -> Vec<u64> {
        self.slots.iter().map(|s| s.order).collect()
    }

    /// Orders of the torsion factors of `H_{d-1}`.
    pub fn lower_torsion_orders(&self) -> Vec<u64> {
        self.lower.as_ref().map_or_else(Vec::new, |l| l.torsion_orders())
    }

    fn torsion_modulus(&self, i: usize, ring: RingSpec) -> Option<u64> {
        match ring {
            RingSpec::Int => Some(self.slots[i].order),
            RingSpec::Rat => None,
            RingSpec::Mod(n) => Some(gcd_u64(self.slots[i].order, n.get())),
        }
    }

    pub fn zero_class(&self, ring: RingSpec) -> ClassCoords {
        let (t, b) = match ring {
            RingSpec::Int => (self.slots.len(), 0),
            RingSpec::Rat => (0, 0),
            RingSpec::Mod(_) => (self.slots.len(), self.lower_torsion_orders().len()),
        };
        ClassCoords {
            degree: self.degree,
            ring,
            free: vec![ring.zero(); self.betti],
            torsion: vec![0; t],
            bockstein: vec![0; b],
        }
    }

    /// Builds class coordinates, reducing residues into range.
    pub fn class(
        &self,
        ring: RingSpec,
        free: Vec<RingElem>,
        torsion: &[BigInt],
        bockstein: &[BigInt],
    ) -> Result<ClassCoords> {
        let zero = self.zero_class(ring);
        if free.len() != zero.free.len()
            || torsion.len() != zero.torsion.len()
            || bockstein.len() != zero.bockstein.len()
        {
            return Err(Error::InvalidClass(format!(
                "degree {} over {ring} expects {} free, {} torsion, {} Bockstein coordinates; got {}, {}, {}",
                self.degree,
                zero.free.len(),
                zero.torsion.len(),
                zero.bockstein.len(),
                free.len(),
                torsion.len(),
                bockstein.len()
            )));
        }
        if let Some(e) = free.iter().find(|e| !ring.contains(e)) {
            return Err(Error::InvalidClass(format!("{e:?} is not an element of {ring}")));
        }
        let torsion = torsion
            .iter()
            .enumerate()
            .map(|(i, b)| residue_of(b, self.torsion_modulus(i, ring).unwrap().max(1)))
            .collect();
        let lower = self.lower_torsion_orders();
        let bockstein = bockstein
            .iter()
            .enumerate()
            .map(|(i, b)| residue_of(b, gcd_u64(lower[i], ring.modulus().unwrap()).max(1)))
            .collect();
        Ok(ClassCoords { degree: self.degree, ring, free, torsion, bockstein })
    }

    pub fn validate(&self, c: &ClassCoords) -> Result<()> {
        if c.degree != self.degree {
            return Err(Error::InvalidClass(format!(
                "class of degree {} against decomposition of degree {}",
                c.degree, self.degree
            )));
        }
        let torsion: Vec<BigInt> = c.torsion.iter().map(|&t| BigInt::from(t)).collect();
        let bock: Vec<BigInt> = c.bockstein.iter().map(|&t| BigInt::from(t)).collect();
        let normalized = self.class(c.ring, c.free.clone(), &torsion, &bock)?;
        if normalized != *c {
            return Err(Error::InvalidClass(format!("coordinates {c} are not reduced")));
        }
        Ok(())
    }

    pub fn is_zero_class(&self, c: &ClassCoords) -> bool {
        c.free.iter().all(|e| c.ring.is_zero(e))
            && c.torsion.iter().all(|&t| t == 0)
            && c.bockstein.iter().all(|&t| t == 0)
    }

    fn check_chain(&self, z: &Chain) -> Result<()> {
        if z.degree != self.degree {
            return Err(Error::ShapeMismatch(format!(
                "chain of degree {} against decomposition of degree {}",
                z.degree, self.degree
            )));
        }
        if z.iter().any(|(i, _)| i >= self.chain_len) {
            return Err(Error::ShapeMismatch("chain index out of range".into()));
        }
        Ok(())
    }

    /// Coordinates of an integral cycle given densely (no cycle check).
    fn int_coords(&self, x: &[BigInt]) -> Result<(Vec<BigInt>, Vec<u64>)> {
        let c = self.coords.mul_vec(x)?;
        let free = self.free_rows.iter().map(|&i| c[i].clone()).collect();
        let torsion = self
            .slots
            .iter()
            .map(|s| {
                let q = BigInt::from(s.order);
                residue_of(&(&c[s.row] * &s.cofactor_inv).mod_floor(&q), s.order)
            })
            .collect();
        Ok((free, torsion))
    }

    /// Class of a cycle over its own ring.
    pub fn class_of_cycle(&self, z: &Chain) -> Result<ClassCoords> {
        self.check_chain(z)?;
        match z.ring {
            RingSpec::Int => {
                let x = z.to_ints(self.chain_len);
                if !self.boundary.mul_vec(&x)?.iter().all(Zero::is_zero) {
                    return Err(Error::NotACycle(z.ring.to_string()));
                }
                let (free, torsion) = self.int_coords(&x)?;
                Ok(ClassCoords {
                    degree: self.degree,
                    ring: RingSpec::Int,
                    free: free.into_iter().map(RingElem::Int).collect(),
                    torsion,
                    bockstein: Vec::new(),
                })
            }
            RingSpec::Rat => {
                let x = z.to_rats(self.chain_len);
                if !self.boundary.mul_vec_rat(&x)?.iter().all(Zero::is_zero) {
                    return Err(Error::NotACycle(z.ring.to_string()));
                }
                let c = self.coords.mul_vec_rat(&x)?;
                Ok(ClassCoords {
                    degree: self.degree,
                    ring: RingSpec::Rat,
                    free: self.free_rows.iter().map(|&i| RingElem::Rat(c[i].clone())).collect(),
                    torsion: Vec::new(),
                    bockstein: Vec::new(),
                })
            }
            RingSpec::Mod(modulus) => self.mod_class(z, modulus.get()),
        }
    }

    fn mod_class(&self, z: &Chain, n: u64) -> Result<ClassCoords> {
        let nn = BigInt::from(n);
        let ring = z.ring;
        let mut x = z.to_ints(self.chain_len);
        let bx = self.boundary.mul_vec(&x)?;
        if !bx.iter().all(|v| v.is_multiple_of(&nn)) {
            return Err(Error::NotACycle(ring.to_string()));
        }
        let mut bockstein = Vec::new();
        if let Some(lower) = &self.lower {
            // w = ∂x / n is an integral (d-1)-cycle; its class is the Bockstein image.
            let w: Vec<BigInt> = bx.iter().map(|v| v / &nn).collect();
            let (free, tors) = lower.int_coords(&w)?;
            debug_assert!(free.iter().all(Zero::is_zero));
            for (i, slot) in lower.slots.iter().enumerate() {
                let g = gcd_u64(slot.order, n);
                let step = slot.order / g;
                debug_assert_eq!(tors[i] % step, 0);
                let gamma = (tors[i] / step) % g;
                bockstein.push(gamma);
                if gamma != 0 {
                    // subtract gamma * (n/g) * t'_i, a mod-n cycle with Bockstein e_i
                    let k = BigInt::from(gamma) * BigInt::from(n / g);
                    for (j, e) in lower.torsion_witnesses[i].iter() {
                        x[j] -= &k * as_int(e);
                    }
                }
            }
            let bx = self.boundary.mul_vec(&x)?;
            let w: Vec<RingElem> = bx.iter().map(|v| RingElem::Int(v / &nn)).collect();
            let u = solve_with_snf(&self.boundary_snf, &w, RingSpec::Int)?
                .ok_or_else(|| Error::NotACycle("Bockstein correction failed".into()))?;
            for (xi, ui) in x.iter_mut().zip(&u) {
                *xi -= &nn * as_int(ui);
            }
            debug_assert!(self.boundary.mul_vec(&x)?.iter().all(Zero::is_zero));
        }
        let (free, torsion) = self.int_coords(&x)?;
        Ok(ClassCoords {
            degree: self.degree,
            ring,
            free: free.iter().map(|a| ring.from_int(a)).collect(),
            torsion: torsion
                .iter()
                .enumerate()
                .map(|(i, &t)| t % self.torsion_modulus(i, ring).unwrap())
                .collect(),
            bockstein,
        })
    }

    /// A cycle over `c.ring` representing `c`.
    pub fn reference_cycle(&self, c: &ClassCoords) -> Result<Chain> {
        self.validate(c)?;
        let d = self.degree;
        match c.ring {
            RingSpec::Rat => {
                let mut out = vec![BigRational::zero(); self.chain_len];
                for (a, f) in c.free.iter().zip(&self.free_basis) {
                    let RingElem::Rat(a) = a else { unreachable!() };
                    for (i, e) in f.iter() {
                        out[i] += a * BigRational::from_integer(as_int(e));
                    }
                }
                Chain::from_dense(d, RingSpec::Rat, out.into_iter().map(RingElem::Rat).collect())
            }
            ring => {
                let mut out = vec![BigInt::zero(); self.chain_len];
                let mut acc = |k: BigInt, basis: &Chain| {
                    for (i, e) in basis.iter() {
                        out[i] += &k * as_int(e);
                    }
                };
                for (a, f) in c.free.iter().zip(&self.free_basis) {
                    let k = match a {
                        RingElem::Int(v) => v.clone(),
                        RingElem::Mod(r) => BigInt::from(*r),
                        RingElem::Rat(_) => unreachable!(),
                    };
                    acc(k, f);
                }
                for (&b, v) in c.torsion.iter().zip(&self.torsion_basis) {
                    acc(BigInt::from(b), v);
                }
                if let (RingSpec::Mod(n), Some(lower)) = (ring, &self.lower) {
                    for (i, &g) in c.bockstein.iter().enumerate() {
                        let gcd = gcd_u64(lower.slots[i].order, n.get());
                        acc(BigInt::from(g) * BigInt::from(n.get() / gcd), &lower.torsion_witnesses[i]);
                    }
                }
                let values = out.iter().map(|v| ring.from_int(v)).collect();
                Chain::from_dense(d, ring, values)
            }
        }
    }

    /// Image of an integral class under `H_d(Z) ⊗ R -> H_d(R)`.
    pub fn reduce_class(&self, c: &ClassCoords, target: RingSpec) -> Result<ClassCoords> {
        if c.ring != RingSpec::Int {
            return Err(Error::Precondition(format!("reduce_class expects a Z-class, got {}", c.ring)));
        }
        self.validate(c)?;
        let free = c
            .free
            .iter()
            .map(|a| target.from_int(&as_int(a)))
            .collect();
        let torsion: Vec<BigInt> = match target {
            RingSpec::Rat => Vec::new(),
            _ => c.torsion.iter().map(|&t| BigInt::from(t)).collect(),
        };
        let bock = match target {
            RingSpec::Mod(_) => vec![BigInt::zero(); self.lower_torsion_orders().len()],
            _ => Vec::new(),
        };
        self.class(target, free, &torsion, &bock)
    }

    /// For `τ_d | n`: when `X` and `Y` agree mod `n`, the free class `W` with
    /// `X - Y = n W`.
    pub fn kernel_witness(&self, x: &ClassCoords, y: &ClassCoords, n: u64) -> Result<Option<ClassCoords>> {
        if n < 2 || n % self.torsion_number != 0 {
            return Err(Error::Precondition(format!(
                "torsion number {} does not divide n = {n}",
                self.torsion_number
            )));
        }
        let ring = RingSpec::modulo(n)?;
        if self.reduce_class(x, ring)? != self.reduce_class(y, ring)? {
            return Ok(None);
        }
        let nn = BigInt::from(n);
        let free = x
            .free
            .iter()
            .zip(&y.free)
            .map(|(a, b)| RingElem::Int((as_int(a) - as_int(b)) / &nn))
            .collect();
        let w = self.class(RingSpec::Int, free, &vec![BigInt::zero(); self.slots.len()], &[])?;
        Ok(Some(w))
    }

    /// Whether a mod-`n` class is the reduction of an integral class.
    pub fn in_reduction_image(&self, c: &ClassCoords) -> Result<bool> {
        if c.ring.modulus().is_none() {
            return Err(Error::Precondition("in_reduction_image expects a Z/n class".into()));
        }
        self.validate(c)?;
        Ok(c.bockstein.iter().all(|&g| g == 0))
    }

    pub fn add_classes(&self, a: &ClassCoords, b: &ClassCoords) -> Result<ClassCoords> {
        if a.ring != b.ring || a.degree != b.degree {
            return Err(Error::InvalidClass("adding classes over different rings".into()));
        }
        let free = a.free.iter().zip(&b.free).map(|(x, y)| a.ring.add(x, y)).collect();
        let t: Vec<BigInt> = a.torsion.iter().zip(&b.torsion).map(|(x, y)| BigInt::from(x + y)).collect();
        let bk: Vec<BigInt> = a.bockstein.iter().zip(&b.bockstein).map(|(x, y)| BigInt::from(x + y)).collect();
        self.class(a.ring, free, &t, &bk)
    }

    pub fn scale_class(&self, k: &BigInt, c: &ClassCoords) -> Result<ClassCoords> {
        let free = c.free.iter().map(|x| c.ring.scale(k, x)).collect();
        let t: Vec<BigInt> = c.torsion.iter().map(|&x| k * BigInt::from(x)).collect();
        let bk: Vec<BigInt> = c.bockstein.iter().map(|&x| k * BigInt::from(x)).collect();
        self.class(c.ring, free, &t, &bk)
    }

    /// Rational multiple of a rational class.
    pub fn scale_class_rat(&self, q: &BigRational, c: &ClassCoords) -> Result<ClassCoords> {
        if c.ring != RingSpec::Rat {
            return Err(Error::Precondition("rational scaling needs a Q-class".into()));
        }
        let free = c
            .free
            .iter()
            .map(|x| match x {
                RingElem::Rat(v) => RingElem::Rat(v * q),
                _ => unreachable!(),
            })
            .collect();
        self.class(RingSpec::Rat, free, &[], &[])
    }

    /// Parses the `f:a1,a2;t:b1;b:c1` class syntax against this basis.
    /// Missing sections are zero.
    pub fn parse_class(&self, text: &str, ring: RingSpec) -> Result<ClassCoords> {
        let zero = self.zero_class(ring);
        let mut free: Vec<RingElem> = zero.free.clone();
        let mut torsion = vec![BigInt::zero(); zero.torsion.len()];
        let mut bock = vec![BigInt::zero(); zero.bockstein.len()];
        let text = text.trim();
        if !(text.is_empty() || text == "0") {
            for section in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
                let (tag, body) = section
                    .split_once(':')
                    .ok_or_else(|| Error::Parse(format!("class section {section:?} lacks a tag")))?;
                let items: Vec<&str> = body.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
                match tag.trim() {
                    "f" => {
                        if items.len() != free.len() {
                            return Err(Error::InvalidClass(format!(
                                "{} free coordinates given, betti number is {}",
                                items.len(),
                                free.len()
                            )));
                        }
                        free = items
                            .iter()
                            .map(|s| match ring {
                                RingSpec::Rat => parse_rational(s).map(RingElem::Rat),
                                _ => ring.parse_elem(s),
                            })
                            .collect::<Result<_>>()?;
                    }
                    "t" | "b" => {
                        let target = if tag.trim() == "t" { &mut torsion } else { &mut bock };
                        if items.len() != target.len() {
                            return Err(Error::InvalidClass(format!(
                                "{} {tag} coordinates given, expected {}",
                                items.len(),
                                target.len()
                            )));
                        }
                        *target = items.iter().map(|s| parse_integer(s)).collect::<Result<_>>()?;
                    }
                    other => return Err(Error::Parse(format!("unknown class section {other:?}"))),
                }
            }
        }
        self.class(ring, free, &torsion, &bock)
    }
}

impl fmt::Display for ClassCoords {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: Vec<String>| v.join(",");
        write!(f, "f:{}", join(self.free.iter().map(ToString::to_string).collect()))?;
        if !self.torsion.is_empty() {
            write!(f, ";t:{}", join(self.torsion.iter().map(ToString::to_string).collect()))?;
        }
        if !self.bockstein.is_empty() {
            write!(f, ";b:{}", join(self.bockstein.iter().map(ToString::to_string).collect()))?;
        }
        Ok(())
    }
}
