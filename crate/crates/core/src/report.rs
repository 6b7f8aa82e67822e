//! Report emission: JSON documents for single computations, CSV tables for
//! harness runs, and CSV re-parsing back into row types.
//!
//! Rationals are written `p/q`, booleans `true`/`false`, unset optional
//! booleans as an empty field, and an unbounded gap ratio as `inf`.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::complex::{Chain, Cochain, WeightedComplex};
use crate::error::{Error, Result};
use crate::hasse::{BijectionReport, FedererRow, FedererTable, GapRow, ScanRow};
use crate::homology::HomologyDecomposition;
use crate::optimize::{LiftReport, OptReport};
use crate::rings::{format_rational, parse_rational, RingElem};

pub fn elem_string(e: &RingElem) -> String {
    match e {
        RingElem::Int(v) => v.to_string(),
        RingElem::Rat(v) => format_rational(v),
        RingElem::Mod(r) => r.to_string(),
    }
}

pub fn chain_json(c: &Chain) -> Value {
    let coeffs: Vec<Value> = c.iter().map(|(i, e)| json!([i, elem_string(e)])).collect();
    json!({ "ring": c.ring.to_string(), "degree": c.degree, "coeffs": coeffs })
}

pub fn cochain_json(phi: &Cochain) -> Value {
    let values: Vec<String> = phi.values.iter().map(format_rational).collect();
    json!({ "degree": phi.degree, "values": values })
}

pub fn homology_json(k: &WeightedComplex, dec: &HomologyDecomposition) -> Value {
    let torsion: Vec<Value> = dec
        .torsion_factors
        .iter()
        .map(|&(p, e)| json!({ "prime": p, "exponent": e, "order": p.pow(e) }))
        .collect();
    json!({
        "complex": k.name(),
        "degree": dec.degree,
        "betti": dec.betti,
        "torsion": torsion,
        "tau": dec.torsion_number,
        "free_basis": dec.free_basis.iter().map(chain_json).collect::<Vec<_>>(),
        "torsion_basis": dec.torsion_basis.iter().map(chain_json).collect::<Vec<_>>(),
        "bockstein_orders": dec.lower_torsion_orders(),
    })
}

pub fn opt_json(r: &OptReport) -> Value {
    json!({
        "ring": r.ring.to_string(),
        "class": r.class.to_string(),
        "value": format_rational(&r.value),
        "minimizer_count": r.minimizers.len(),
        "minimizer_count_exact": r.minimizer_count_exact,
        "minimizers": r.minimizers.iter().map(chain_json).collect::<Vec<_>>(),
        "certificate": r.certificate.as_ref().map(cochain_json),
        "nodes_explored": r.nodes_explored,
    })
}

pub fn lift_json(r: &LiftReport) -> Value {
    json!({
        "input": chain_json(&r.input),
        "lifted": chain_json(&r.lifted),
        "is_cycle": r.is_cycle,
        "lifted_class": r.lifted_class.as_ref().map(ToString::to_string),
        "mass_preserved": r.mass_preserved,
    })
}

pub fn bijection_json(r: &BijectionReport) -> Value {
    json!({
        "n": r.n,
        "int_minimizers": r.int_minimizers,
        "mod_minimizers": r.mod_minimizers,
        "injective": r.injective,
        "surjective": r.surjective,
        "lifts_in_class": r.lifts_in_class,
        "verdict": r.verdict,
    })
}

fn opt_ratio(v: &Option<BigRational>) -> String {
    v.as_ref().map_or_else(|| "inf".to_string(), format_rational)
}

pub fn scan_json(rows: &[ScanRow], tau: u64, threshold: Option<u64>) -> Value {
    let rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "n": r.n,
                "value_mod": format_rational(&r.value_mod),
                "value_int": format_rational(&r.value_int),
                "equal": r.equal,
                "tau_divides": r.tau_divides,
                "bijection": r.bijection,
                "lift_all_cycles": r.lift_all_cycles,
            })
        })
        .collect();
    json!({ "tau": tau, "empirical_threshold": threshold, "rows": rows })
}

pub fn federer_json(t: &FedererTable) -> Value {
    let rows: Vec<Value> = t
        .rows
        .iter()
        .map(|r| json!({ "k": r.k, "value_int": format_rational(&r.value_int), "ratio": format_rational(&r.ratio) }))
        .collect();
    json!({ "value_real": format_rational(&t.value_real), "min_ratio": format_rational(&t.min_ratio), "rows": rows })
}

pub fn gap_json(rows: &[GapRow]) -> Value {
    let rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            let per_n = |f: &dyn Fn(usize) -> Value| -> Value {
                Value::Object(r.value_mod.iter().enumerate().map(|(i, (n, _))| (n.to_string(), f(i))).collect())
            };
            json!({
                "shrink_factor": format_rational(&r.shrink_factor),
                "value_int": format_rational(&r.value_int),
                "value_real": format_rational(&r.value_real),
                "value_mod": per_n(&|i| json!(format_rational(&r.value_mod[i].1))),
                "gap_ratio_real": opt_ratio(&r.gap_ratio_real),
                "gap_ratio_mod": per_n(&|i| json!(opt_ratio(&r.gap_ratio_mod[i].1))),
                "in_lavrentiev_set_real": r.in_lavrentiev_real,
                "in_lavrentiev_set_mod": per_n(&|i| json!(r.in_lavrentiev_mod[i].1)),
            })
        })
        .collect();
    json!({ "rows": rows })
}

/// Pretty-printed JSON with a trailing newline. Object keys come out sorted.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}

fn write_csv(header: &[String], records: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in records {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

fn read_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r
        .headers()
        .map_err(|e| Error::Parse(format!("csv header: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::Parse(format!("csv record: {e}")))?;
        rows.push(rec.iter().map(str::to_string).collect());
    }
    Ok((header, rows))
}

fn expect_header(got: &[String], want: &[String]) -> Result<()> {
    if got != want {
        return Err(Error::Parse(format!("unexpected csv header {}", got.join(","))));
    }
    Ok(())
}

fn parse_bool(s: &str) -> Result<bool> {
    match s {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(Error::Parse(format!("expected true or false, got '{s}'"))),
    }
}

fn parse_opt_bool(s: &str) -> Result<Option<bool>> {
    if s.is_empty() {
        Ok(None)
    } else {
        parse_bool(s).map(Some)
    }
}

fn parse_u64(s: &str) -> Result<u64> {
    s.parse().map_err(|_| Error::Parse(format!("expected an unsigned integer, got '{s}'")))
}

fn parse_opt_ratio(s: &str) -> Result<Option<BigRational>> {
    if s == "inf" {
        Ok(None)
    } else {
        parse_rational(s).map(Some)
    }
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn opt_bool(b: Option<bool>) -> String {
    b.map(|b| b.to_string()).unwrap_or_default()
}

pub fn scan_header() -> Vec<String> {
    strings(&["n", "value_mod", "value_int", "equal", "tau_divides", "bijection", "lift_all_cycles"])
}

pub fn scan_csv(rows: &[ScanRow]) -> String {
    let records = rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                format_rational(&r.value_mod),
                format_rational(&r.value_int),
                r.equal.to_string(),
                r.tau_divides.to_string(),
                opt_bool(r.bijection),
                opt_bool(r.lift_all_cycles),
            ]
        })
        .collect();
    write_csv(&scan_header(), records)
}

/// Re-parses [`scan_csv`] output, rejecting rows that break the row invariants.
pub fn parse_scan_csv(text: &str) -> Result<Vec<ScanRow>> {
    let (header, records) = read_csv(text)?;
    expect_header(&header, &scan_header())?;
    records
        .iter()
        .map(|f| {
            let row = ScanRow {
                n: parse_u64(&f[0])?,
                value_mod: parse_rational(&f[1])?,
                value_int: parse_rational(&f[2])?,
                equal: parse_bool(&f[3])?,
                tau_divides: parse_bool(&f[4])?,
                bijection: parse_opt_bool(&f[5])?,
                lift_all_cycles: parse_opt_bool(&f[6])?,
            };
            let populated = row.bijection.is_some() || row.lift_all_cycles.is_some();
            if row.equal != (row.value_mod == row.value_int)
                || row.value_mod > row.value_int
                || (populated && !row.tau_divides)
            {
                return Err(Error::Parse(format!("scan row n = {} violates its invariants", row.n)));
            }
            Ok(row)
        })
        .collect()
}

pub fn federer_header() -> Vec<String> {
    strings(&["k", "value_int", "ratio", "value_real"])
}

pub fn federer_csv(t: &FedererTable) -> String {
    let real = format_rational(&t.value_real);
    let records = t
        .rows
        .iter()
        .map(|r| vec![r.k.to_string(), format_rational(&r.value_int), format_rational(&r.ratio), real.clone()])
        .collect();
    write_csv(&federer_header(), records)
}

pub fn parse_federer_csv(text: &str) -> Result<FedererTable> {
    let (header, records) = read_csv(text)?;
    expect_header(&header, &federer_header())?;
    let mut rows = Vec::new();
    let mut value_real = None;
    for f in &records {
        let row = FedererRow { k: parse_u64(&f[0])?, value_int: parse_rational(&f[1])?, ratio: parse_rational(&f[2])? };
        let real = parse_rational(&f[3])?;
        if row.k == 0 || row.ratio != &row.value_int / BigRational::from_integer(row.k.into()) {
            return Err(Error::Parse(format!("federer row k = {} has an inconsistent ratio", row.k)));
        }
        if value_real.get_or_insert_with(|| real.clone()) != &real {
            return Err(Error::Parse("value_real differs between rows".into()));
        }
        rows.push(row);
    }
    let min_ratio = rows.iter().map(|r| r.ratio.clone()).min().unwrap_or_default();
    Ok(FedererTable { rows, value_real: value_real.unwrap_or_default(), min_ratio })
}

pub fn gap_header(moduli: &[u64]) -> Vec<String> {
    let mut h = strings(&["shrink_factor", "value_int", "value_real"]);
    h.extend(moduli.iter().map(|n| format!("value_mod_{n}")));
    h.push("gap_ratio_real".into());
    h.extend(moduli.iter().map(|n| format!("gap_ratio_mod_{n}")));
    h.push("in_lavrentiev_set_real".into());
    h.extend(moduli.iter().map(|n| format!("in_lavrentiev_set_mod_{n}")));
    h
}

pub fn gap_csv(rows: &[GapRow], moduli: &[u64]) -> String {
    let records = rows
        .iter()
        .map(|r| {
            let mut f = vec![format_rational(&r.shrink_factor), format_rational(&r.value_int), format_rational(&r.value_real)];
            f.extend(r.value_mod.iter().map(|(_, v)| format_rational(v)));
            f.push(opt_ratio(&r.gap_ratio_real));
            f.extend(r.gap_ratio_mod.iter().map(|(_, v)| opt_ratio(v)));
            f.push(r.in_lavrentiev_real.to_string());
            f.extend(r.in_lavrentiev_mod.iter().map(|(_, b)| b.to_string()));
            f
        })
        .collect();
    write_csv(&gap_header(moduli), records)
}

/// Re-parses [`gap_csv`] output; the moduli are read from the header.
pub fn parse_gap_csv(text: &str) -> Result<Vec<GapRow>> {
    let (header, records) = read_csv(text)?;
    let moduli: Vec<u64> = header
        .iter()
        .filter_map(|h| h.strip_prefix("value_mod_"))
        .map(parse_u64)
        .collect::<Result<_>>()?;
    expect_header(&header, &gap_header(&moduli))?;
    let m = moduli.len();
    records
        .iter()
        .map(|f| {
            let row = GapRow {
                shrink_factor: parse_rational(&f[0])?,
                value_int: parse_rational(&f[1])?,
                value_real: parse_rational(&f[2])?,
                value_mod: (0..m).map(|i| Ok((moduli[i], parse_rational(&f[3 + i])?))).collect::<Result<_>>()?,
                gap_ratio_real: parse_opt_ratio(&f[3 + m])?,
                gap_ratio_mod: (0..m).map(|i| Ok((moduli[i], parse_opt_ratio(&f[4 + m + i])?))).collect::<Result<_>>()?,
                in_lavrentiev_real: parse_bool(&f[4 + 2 * m])?,
                in_lavrentiev_mod: (0..m).map(|i| Ok((moduli[i], parse_bool(&f[5 + 2 * m + i])?))).collect::<Result<_>>()?,
            };
            let one = BigRational::one();
            let ratio_ok = |r: &Option<BigRational>, v: &BigRational| match r {
                Some(x) if v.is_zero() => row.value_int.is_zero() && x.is_one(),
                Some(x) => *x >= one && x * v == row.value_int,
                None => v.is_zero() && !row.value_int.is_zero(),
            };
            let ok = ratio_ok(&row.gap_ratio_real, &row.value_real)
                && row.in_lavrentiev_real == (row.value_int > row.value_real)
                && (0..m).all(|i| {
                    let v = &row.value_mod[i].1;
                    ratio_ok(&row.gap_ratio_mod[i].1, v) && row.in_lavrentiev_mod[i].1 == (row.value_int > *v)
                });
            if !ok {
                return Err(Error::Parse(format!("gap row {} violates its invariants", format_rational(&row.shrink_factor))));
            }
            Ok(row)
        })
        .collect()
}
