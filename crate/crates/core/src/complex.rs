//! Weighted simplicial complexes, chains, cochains and mass.
//!
//! Simplices are strictly increasing vertex tuples; that ordering fixes the
//! orientation and the boundary carries alternating signs. The weight of a
//! simplex is its volume and is the only metric data mass sees.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intlinalg::IntMatrix;
use crate::rings::{canonical_lift, format_rational, norm, parse_rational, RingElem, RingSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedComplex {
    name: String,
    simplices: Vec<Vec<Vec<usize>>>,
    weights: Vec<Vec<BigRational>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ComplexDocument {
    name: String,
    dimension: usize,
    simplices: BTreeMap<String, Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    weights: BTreeMap<String, Vec<String>>,
}

/// Parses a complex document (JSON) and checks every invariant.
pub fn load_complex(text: &str) -> Result<WeightedComplex> {
    let doc: ComplexDocument =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    for key in doc.simplices.keys().chain(doc.weights.keys()) {
        match key.parse::<usize>() {
            Ok(k) if k <= doc.dimension => {}
            _ => {
                return Err(Error::Parse(format!(
                    "degree key {key:?} outside 0..={}",
                    doc.dimension
                )))
            }
        }
    }
    let mut simplices = Vec::with_capacity(doc.dimension + 1);
    let mut weights = Vec::with_capacity(doc.dimension + 1);
    for k in 0..=doc.dimension {
        let key = k.to_string();
        let list = doc.simplices.get(&key).cloned().unwrap_or_default();
        let w = match doc.weights.get(&key) {
            Some(ws) => {
                if ws.len() != list.len() {
                    return Err(Error::Parse(format!(
                        "degree {k}: {} weights for {} simplices",
                        ws.len(),
                        list.len()
                    )));
                }
                ws.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?
            }
            None => vec![BigRational::one(); list.len()],
        };
        simplices.push(list);
        weights.push(w);
    }
    WeightedComplex::new(doc.name, simplices, weights)
}

impl WeightedComplex {
    /// Builds a complex from per-degree simplex lists and weights.
    pub fn new(
        name: impl Into<String>,
        simplices: Vec<Vec<Vec<usize>>>,
        weights: Vec<Vec<BigRational>>,
    ) -> Result<Self> {
        if simplices.is_empty() {
            return Err(Error::Parse("complex needs at least degree 0".into()));
        }
        if weights.len() != simplices.len() {
            return Err(Error::Parse("weights and simplices disagree on dimension".into()));
        }
        let mut index: Vec<HashMap<Vec<usize>, usize>> = Vec::with_capacity(simplices.len());
        for (k, list) in simplices.iter().enumerate() {
            if weights[k].len() != list.len() {
                return Err(Error::Parse(format!("degree {k}: weight count mismatch")));
            }
            let mut idx = HashMap::with_capacity(list.len());
            for (i, s) in list.iter().enumerate() {
                if s.len() != k + 1 {
                    return Err(Error::MalformedSimplex {
                        simplex: s.clone(),
                        reason: format!("listed in degree {k} but has {} vertices", s.len()),
                    });
                }
                if s.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::MalformedSimplex {
                        simplex: s.clone(),
                        reason: "vertices must be strictly increasing".into(),
                    });
                }
                if idx.insert(s.clone(), i).is_some() {
                    return Err(Error::DuplicateSimplex(s.clone()));
                }
                if k > 0 {
                    for face in faces(s) {
                        if !index[k - 1].contains_key(&face) {
                            return Err(Error::FaceClosure { simplex: s.clone(), face });
                        }
                    }
                }
                if !weights[k][i].is_positive() {
                    return Err(Error::NonPositiveWeight {
                        simplex: s.clone(),
                        weight: format_rational(&weights[k][i]),
                    });
                }
            }
            index.push(idx);
        }
        Ok(WeightedComplex { name: name.into(), simplices, weights, index })
    }

    /// The closure of a list of facets, simplices sorted lexicographically in
    /// every degree, unit weights.
    pub fn from_facets(name: impl Into<String>, facets: &[Vec<usize>]) -> Result<Self> {
        let dim = facets.iter().map(|f| f.len()).max().unwrap_or(1).max(1) - 1;
        let mut sets: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); dim + 1];
        for f in facets {
            let mut f = f.clone();
            f.sort_unstable();
            f.dedup();
            let n = f.len();
            for mask in 1u64..(1u64 << n) {
                let sub: Vec<usize> =
                    (0..n).filter(|b| mask & (1 << b) != 0).map(|b| f[b]).collect();
                sets[sub.len() - 1].insert(sub);
            }
        }
        let simplices: Vec<Vec<Vec<usize>>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        let weights = simplices.iter().map(|l| vec![BigRational::one(); l.len()]).collect();
        Self::new(name, simplices, weights)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.simplices.len() - 1
    }

    /// Number of `k`-simplices (zero above the dimension).
    pub fn count(&self, k: usize) -> usize {
        self.simplices.get(k).map_or(0, Vec::len)
    }

    pub fn simplices(&self, k: usize) -> &[Vec<usize>] {
        self.simplices.get(k).map_or(&[], |v| v.as_slice())
    }

    pub fn weights(&self, k: usize) -> &[BigRational] {
        self.weights.get(k).map_or(&[], |v| v.as_slice())
    }

    pub fn index_of(&self, k: usize, simplex: &[usize]) -> Option<usize> {
        self.index.get(k)?.get(simplex).copied()
    }

    /// A copy with the weights of the listed `k`-simplices multiplied by `factor`.
    pub fn with_scaled_weights(&self, k: usize, which: &[usize], factor: &BigRational) -> Result<Self> {
        if !factor.is_positive() {
            return Err(Error::Precondition(format!(
                "scale factor {} must be positive",
                format_rational(factor)
            )));
        }
        let mut out = self.clone();
        for &i in which {
            let w = out
                .weights
                .get_mut(k)
                .and_then(|ws| ws.get_mut(i))
                .ok_or_else(|| Error::Precondition(format!("no {k}-simplex with index {i}")))?;
            *w = &*w * factor;
        }
        Ok(out)
    }

    pub fn with_weights(&self, k: usize, weights: Vec<BigRational>) -> Result<Self> {
        let mut simplices = self.simplices.clone();
        let mut all = self.weights.clone();
        if k >= all.len() || weights.len() != all[k].len() {
            return Err(Error::ShapeMismatch(format!("weights for degree {k}")));
        }
        all[k] = weights;
        Self::new(self.name.clone(), std::mem::take(&mut simplices), all)
    }

    /// Serializes back into the document format.
    pub fn to_document(&self) -> String {
        let mut simplices = BTreeMap::new();
        let mut weights = BTreeMap::new();
        for k in 0..=self.dim() {
            simplices.insert(k.to_string(), self.simplices[k].clone());
            if self.weights[k].iter().any(|w| !w.is_one()) {
                weights.insert(k.to_string(), self.weights[k].iter().map(format_rational).collect());
            }
        }
        let doc = ComplexDocument { name: self.name.clone(), dimension: self.dim(), simplices, weights };
        serde_json::to_string_pretty(&doc).expect("complex document serializes")
    }

    /// Matrix of the boundary map `C_d -> C_{d-1}`, for `1 <= d <= dim`.
    pub fn boundary_matrix(&self, d: usize) -> Result<IntMatrix> {
        if d == 0 || d > self.dim() {
            return Err(Error::DegreeOutOfRange { degree: d, max: self.dim() });
        }
        Ok(self.boundary(d))
    }

    /// `∂_d` for any `d`: `0 x m_0` for `d = 0`, `m_dim x 0` above the top.
    pub(crate) fn boundary(&self, d: usize) -> IntMatrix {
        if d == 0 {
            return IntMatrix::zeros(0, self.count(0));
        }
        let mut m = IntMatrix::zeros(self.count(d - 1), self.count(d));
        for (j, s) in self.simplices(d).iter().enumerate() {
            for (pos, face) in faces(s).into_iter().enumerate() {
                let i = self.index[d - 1][&face];
                m[(i, j)] = if pos % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            }
        }
        m
    }

    pub fn check_chain(&self, c: &Chain) -> Result<()> {
        if let Some((&i, _)) = c.coeffs.iter().next_back() {
            if i >= self.count(c.degree) {
                return Err(Error::ShapeMismatch(format!(
                    "chain references {}-simplex {i}, complex has {}",
                    c.degree,
                    self.count(c.degree)
                )));
            }
        }
        Ok(())
    }

    /// `∂c` over the chain's ring.
    pub fn boundary_of(&self, c: &Chain) -> Result<Chain> {
        self.check_chain(c)?;
        let mut out = Chain::zero(c.degree.saturating_sub(1), c.ring);
        if c.degree == 0 {
            return Ok(out);
        }
        for (&j, e) in &c.coeffs {
            for (pos, face) in faces(&self.simplices[c.degree][j]).into_iter().enumerate() {
                let i = self.index[c.degree - 1][&face];
                let term = if pos % 2 == 0 { e.clone() } else { c.ring.neg(e) };
                out.add_at(i, &term);
            }
        }
        Ok(out)
    }
}

/// Codimension-one faces in boundary order: face `i` drops vertex `i`.
fn faces(s: &[usize]) -> Vec<Vec<usize>> {
    if s.len() <= 1 {
        return Vec::new();
    }
    (0..s.len())
        .map(|skip| s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect())
        .collect()
}

/// A sparse chain: nonzero coefficients keyed by simplex index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Chain {
    pub degree: usize,
    pub ring: RingSpec,
    coeffs: BTreeMap<usize, RingElem>,
}

impl Chain {
    pub fn zero(degree: usize, ring: RingSpec) -> Self {
        Chain { degree, ring, coeffs: BTreeMap::new() }
    }

    /// Sums repeated indices and drops zeros.
    pub fn from_pairs(degree: usize, ring: RingSpec, pairs: impl IntoIterator<Item = (usize, RingElem)>) -> Result<Self> {
        let mut c = Self::zero(degree, ring);
        for (i, e) in pairs {
            if !ring.contains(&e) {
                return Err(Error::InvalidRing(format!("{e:?} is not an element of {ring}")));
            }
            c.add_at(i, &e);
        }
        Ok(c)
    }

    pub fn from_dense(degree: usize, ring: RingSpec, values: Vec<RingElem>) -> Result<Self> {
        Self::from_pairs(degree, ring, values.into_iter().enumerate())
    }

    pub fn from_ints(degree: usize, values: &[BigInt]) -> Self {
        let mut c = Self::zero(degree, RingSpec::Int);
        for (i, v) in values.iter().enumerate() {
            if !v.is_zero() {
                c.coeffs.insert(i, RingElem::Int(v.clone()));
            }
        }
        c
    }

    pub fn from_i64s(degree: usize, values: &[i64]) -> Self {
        let v: Vec<BigInt> = values.iter().map(|&x| BigInt::from(x)).collect();
        Self::from_ints(degree, &v)
    }

    pub(crate) fn add_at(&mut self, i: usize, e: &RingElem) {
        let ring = self.ring;
        let sum = match self.coeffs.get(&i) {
            Some(old) => ring.add(old, e),
            None => e.clone(),
        };
        if ring.is_zero(&sum) {
            self.coeffs.remove(&i);
        } else {
            self.coeffs.insert(i, sum);
        }
    }

    pub fn coeff(&self, i: usize) -> RingElem {
        self.coeffs.get(&i).cloned().unwrap_or_else(|| self.ring.zero())
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &RingElem)> {
        self.coeffs.iter().map(|(&i, e)| (i, e))
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn neg(&self) -> Chain {
        Chain {
            degree: self.degree,
            ring: self.ring,
            coeffs: self.coeffs.iter().map(|(&i, e)| (i, self.ring.neg(e))).collect(),
        }
    }

    pub fn add(&self, other: &Chain) -> Result<Chain> {
        if self.degree != other.degree || self.ring != other.ring {
            return Err(Error::ShapeMismatch("adding chains of different degree or ring".into()));
        }
        let mut out = self.clone();
        for (&i, e) in &other.coeffs {
            out.add_at(i, e);
        }
        Ok(out)
    }

    pub fn scale(&self, k: &BigInt) -> Chain {
        let mut out = Self::zero(self.degree, self.ring);
        for (&i, e) in &self.coeffs {
            out.add_at(i, &self.ring.scale(k, e));
        }
        out
    }

    /// Dense integer vector: INT coefficients as-is, MOD coefficients as
    /// their canonical lifts.
    pub(crate) fn to_ints(&self, len: usize) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); len];
        for (&i, e) in &self.coeffs {
            v[i] = match e {
                RingElem::Int(x) => x.clone(),
                RingElem::Mod(r) => BigInt::from(canonical_lift(*r, self.ring.modulus().unwrap())),
                RingElem::Rat(_) => panic!("rational chain has no integer form"),
            };
        }
        v
    }

    pub(crate) fn to_rats(&self, len: usize) -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); len];
        for (&i, e) in &self.coeffs {
            v[i] = match e {
                RingElem::Int(x) => BigRational::from_integer(x.clone()),
                RingElem::Rat(x) => x.clone(),
                RingElem::Mod(_) => panic!("residue chain has no rational form"),
            };
        }
        v
    }
}

/// Real-valued (rational) cochain: one value per `d`-simplex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cochain {
    pub degree: usize,
    pub values: Vec<BigRational>,
}

impl Cochain {
    pub fn zero(degree: usize, len: usize) -> Self {
        Cochain { degree, values: vec![BigRational::zero(); len] }
    }

    /// Pairing with an integral or rational chain.
    pub fn eval(&self, c: &Chain) -> BigRational {
        c.iter()
            .map(|(i, e)| match e {
                RingElem::Int(x) => &self.values[i] * BigRational::from_integer(x.clone()),
                RingElem::Rat(x) => &self.values[i] * x,
                RingElem::Mod(_) => panic!("cochains pair with integral or rational chains"),
            })
            .sum()
    }

    pub fn scale(&self, q: &BigRational) -> Cochain {
        Cochain { degree: self.degree, values: self.values.iter().map(|v| v * q).collect() }
    }
}

/// `Σ_σ w_σ · ‖c_σ‖`
pub fn mass(k: &WeightedComplex, t: &Chain) -> Result<BigRational> {
    k.check_chain(t)?;
    let w = k.weights(t.degree);
    Ok(t.iter().map(|(i, e)| &w[i] * norm(t.ring, e)).sum())
}

/// Coefficientwise image of an integral chain under `Z -> R`.
pub fn reduce_chain(t: &Chain, target: RingSpec) -> Result<Chain> {
    if t.ring != RingSpec::Int {
        return Err(Error::Precondition(format!("reduce_chain expects a Z-chain, got {}", t.ring)));
    }
    let mut out = Chain::zero(t.degree, target);
    for (i, e) in t.iter() {
        let RingElem::Int(x) = e else { unreachable!() };
        out.add_at(i, &target.from_int(x));
    }
    Ok(out)
}
