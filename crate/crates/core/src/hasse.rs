//! Experiment harness comparing the integral norm with the real and mod-`n`
//! norms: modulus scans with minimizer-set bijection checks, the sequence
//! `‖k·c‖^Z / k`, and weight sweeps that open Lavrentiev gaps.
//!
//! Thresholds are empirical: a scan reports what it observed on the scanned
//! range and says nothing about moduli it did not visit.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::complex::{reduce_chain, Chain, WeightedComplex};
use crate::error::{Error, Result};
use crate::homology::{ClassCoords, HomologyDecomposition};
use crate::optimize::{
    lift_minimizer, min_int, min_int_bounded, min_mod_bounded, min_real, OptReport, SearchConfig,
};
use crate::rings::RingSpec;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanRow {
    pub n: u64,
    pub value_mod: BigRational,
    pub value_int: BigRational,
    pub equal: bool,
    pub tau_divides: bool,
    pub bijection: Option<bool>,
    pub lift_all_cycles: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BijectionReport {
    pub n: u64,
    pub int_minimizers: usize,
    pub mod_minimizers: usize,
    /// Distinct integral minimizers reduce to distinct mod-`n` chains.
    pub injective: bool,
    /// The reductions are exactly the mod-`n` minimizers.
    pub surjective: bool,
    /// Per mod-`n` minimizer: its canonical lift is an integral cycle in the class.
    pub lifts_in_class: Vec<bool>,
    pub verdict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FedererRow {
    pub k: u64,
    pub value_int: BigRational,
    pub ratio: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FedererTable {
    pub rows: Vec<FedererRow>,
    pub value_real: BigRational,
    /// Smallest ratio seen; an upper bound for the limit.
    pub min_ratio: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapRow {
    pub shrink_factor: BigRational,
    pub value_int: BigRational,
    pub value_real: BigRational,
    pub value_mod: Vec<(u64, BigRational)>,
    /// `value_int / value_real`; `None` when only the denominator vanishes.
    pub gap_ratio_real: Option<BigRational>,
    pub gap_ratio_mod: Vec<(u64, Option<BigRational>)>,
    pub in_lavrentiev_real: bool,
    pub in_lavrentiev_mod: Vec<(u64, bool)>,
}

fn int_class(c: &ClassCoords) -> Result<()> {
    if c.ring != RingSpec::Int {
        return Err(Error::Precondition(format!("expected a Z-class, got {}", c.ring)));
    }
    Ok(())
}

/// Compares an exact integral minimizer set with an exact mod-`n` one.
fn compare_sets(
    k: &WeightedComplex,
    dec: &HomologyDecomposition,
    c: &ClassCoords,
    n: u64,
    int_rep: &OptReport,
    mod_rep: &OptReport,
) -> Result<BijectionReport> {
    let ring = RingSpec::modulo(n)?;
    let images: Vec<Chain> = int_rep
        .minimizers
        .iter()
        .map(|z| reduce_chain(z, ring))
        .collect::<Result<_>>()?;
    let image_set: BTreeSet<&Chain> = images.iter().collect();
    let mod_set: BTreeSet<&Chain> = mod_rep.minimizers.iter().collect();
    let injective = image_set.len() == images.len();
    let surjective = image_set == mod_set;
    let lifts_in_class = mod_rep
        .minimizers
        .iter()
        .map(|t| {
            let l = lift_minimizer(k, dec, t)?;
            Ok(l.is_cycle && l.lifted_class.as_ref() == Some(c))
        })
        .collect::<Result<Vec<bool>>>()?;
    let verdict = injective && surjective && lifts_in_class.iter().all(|&b| b);
    Ok(BijectionReport {
        n,
        int_minimizers: int_rep.minimizers.len(),
        mod_minimizers: mod_rep.minimizers.len(),
        injective,
        surjective,
        lifts_in_class,
        verdict,
    })
}

/// Checks that mod-`n` reduction maps the integral minimizers of `c` one to
/// one onto the mod-`n` minimizers of its reduction. Requires `τ_d | n`.
pub fn bijection_check(
    k: &WeightedComplex,
    dec: &HomologyDecomposition,
    c: &ClassCoords,
    n: u64,
    cfg: &SearchConfig,
) -> Result<BijectionReport> {
    int_class(c)?;
    if n < 2 || n % dec.torsion_number != 0 {
        return Err(Error::Precondition(format!(
            "torsion number {} does not divide n = {n}",
            dec.torsion_number
        )));
    }
    let int_rep = min_int(k, dec, c, cfg)?;
    let ring = RingSpec::modulo(n)?;
    let mod_rep = min_mod_bounded(k, dec, &dec.reduce_class(c, ring)?, cfg, Some(&int_rep.value))?;
    if !int_rep.minimizer_count_exact || !mod_rep.minimizer_count_exact {
        return Err(Error::InexactEnumeration { cap: cfg.cap });
    }
    compare_sets(k, dec, c, n, &int_rep, &mod_rep)
}

/// One row per modulus in `n_min..=n_max`, ascending. `bijection` is the
/// set-level statement about reduction; the lifts are reported separately
/// in `lift_all_cycles`.
pub fn scan_moduli(
    k: &WeightedComplex,
    dec: &HomologyDecomposition,
    c: &ClassCoords,
    n_min: u64,
    n_max: u64,
    cfg: &SearchConfig,
) -> Result<Vec<ScanRow>> {
    int_class(c)?;
    if n_min < 2 {
        return Err(Error::Precondition(format!("n_min = {n_min} must be at least 2")));
    }
    let int_rep = min_int(k, dec, c, cfg)?;
    let moduli: Vec<u64> = (n_min..=n_max).collect();
    moduli
        .par_iter()
        .map(|&n| {
            let ring = RingSpec::modulo(n)?;
            let mod_rep =
                min_mod_bounded(k, dec, &dec.reduce_class(c, ring)?, cfg, Some(&int_rep.value))?;
            let tau_divides = n % dec.torsion_number == 0;
            let (bijection, lift_all_cycles) = if tau_divides && mod_rep.minimizer_count_exact {
                let all_cycles = mod_rep
                    .minimizers
                    .iter()
                    .map(|t| lift_minimizer(k, dec, t).map(|l| l.is_cycle))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .all(|b| b);
                let bij = if int_rep.minimizer_count_exact {
                    let cmp = compare_sets(k, dec, c, n, &int_rep, &mod_rep)?;
                    Some(cmp.injective && cmp.surjective)
                } else {
                    None
                };
                (bij, Some(all_cycles))
            } else {
                (None, None)
            };
            Ok(ScanRow {
                n,
                equal: mod_rep.value == int_rep.value,
                value_mod: mod_rep.value,
                value_int: int_rep.value.clone(),
                tau_divides,
                bijection,
                lift_all_cycles,
            })
        })
        .collect()
}

/// Smallest scanned `N` such that every scanned `n >= N` with `τ | n` has
/// equal norms and a verified bijection.
pub fn empirical_threshold(rows: &[ScanRow], tau: u64) -> Option<u64> {
    let mut rows: Vec<&ScanRow> = rows.iter().filter(|r| tau != 0 && r.n % tau == 0).collect();
    rows.sort_by_key(|r| r.n);
    let mut threshold = None;
    for r in rows.iter().rev() {
        if r.equal && r.bijection == Some(true) {
            threshold = Some(r.n);
        } else {
            break;
        }
    }
    threshold
}

/// `‖k·c‖^Z` and `‖k·c‖^Z / k` for `k = 1..=k_max`, next to `‖c‖^R`.
pub fn federer_sequence(
    k: &WeightedComplex,
    dec: &HomologyDecomposition,
    c: &ClassCoords,
    k_max: u64,
    cfg: &SearchConfig,
) -> Result<FedererTable> {
    int_class(c)?;
    if k_max == 0 {
        return Err(Error::Precondition("k_max must be at least 1".into()));
    }
    let value_real = min_real(k, dec, &dec.reduce_class(c, RingSpec::Rat)?)?.value;
    let mut rows: Vec<FedererRow> = Vec::with_capacity(k_max as usize);
    for m in 1..=k_max {
        let ck = dec.scale_class(&BigInt::from(m), c)?;
        // ‖m c‖ <= ‖(m-1) c‖ + ‖c‖
        let hint = rows.last().map(|prev| &prev.value_int + &rows[0].value_int);
        let rep = min_int_bounded(k, dec, &ck, cfg, hint.as_ref())?;
        let ratio = &rep.value / BigRational::from_integer(BigInt::from(m));
        rows.push(FedererRow { k: m, value_int: rep.value, ratio });
    }
    let min_ratio = rows.iter().map(|r| r.ratio.clone()).min().unwrap_or_else(BigRational::zero);
    Ok(FedererTable { rows, value_real, min_ratio })
}

fn ratio(num: &BigRational, den: &BigRational) -> Option<BigRational> {
    match (num.is_zero(), den.is_zero()) {
        (true, true) => Some(BigRational::one()),
        (_, true) => None,
        _ => Some(num / den),
    }
}

/// For each factor, rescales the weights of `shrink` and re-solves every norm.
pub fn gap_sweep(
    k: &WeightedComplex,
    dec: &HomologyDecomposition,
    c: &ClassCoords,
    shrink: &[usize],
    factors: &[BigRational],
    moduli: &[u64],
    cfg: &SearchConfig,
) -> Result<Vec<GapRow>> {
    int_class(c)?;
    if shrink.is_empty() {
        return Err(Error::Precondition("shrink set is empty".into()));
    }
    let d = dec.degree;
    let real_class = dec.reduce_class(c, RingSpec::Rat)?;
    let mod_classes = moduli
        .iter()
        .map(|&n| Ok((n, dec.reduce_class(c, RingSpec::modulo(n)?)?)))
        .collect::<Result<Vec<_>>>()?;
    factors
        .par_iter()
        .map(|f| {
            let kf = k.with_scaled_weights(d, shrink, f)?;
            let vi = min_int(&kf, dec, c, cfg)?.value;
            let vr = min_real(&kf, dec, &real_class)?.value;
            let mut value_mod = Vec::new();
            for (n, cm) in &mod_classes {
                value_mod.push((*n, min_mod_bounded(&kf, dec, cm, cfg, Some(&vi))?.value));
            }
            Ok(GapRow {
                shrink_factor: f.clone(),
                gap_ratio_real: ratio(&vi, &vr),
                gap_ratio_mod: value_mod.iter().map(|(n, v)| (*n, ratio(&vi, v))).collect(),
                in_lavrentiev_real: vi > vr,
                in_lavrentiev_mod: value_mod.iter().map(|(n, v)| (*n, vi > *v)).collect(),
                value_int: vi,
                value_real: vr,
                value_mod,
            })
        })
        .collect()
}
