//! Command-line front end. `run` parses arguments, dispatches to the library
//! and writes one report; it returns the process exit code (0 success,
//! 1 computation error, 2 usage error).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::json;

use crate::complex::{load_complex, Chain, WeightedComplex};
use crate::error::{Error, Result};
use crate::hasse;
use crate::homology::HomologyDecomposition;
use crate::optimize::{self, SearchConfig, DEFAULT_CAP};
use crate::report;
use crate::rings::{format_rational, parse_rational, RingSpec};

#[derive(Parser, Debug)]
#[command(name = "hasse", version, about = "Minimal-mass homology representatives over Z, Q and Z/n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Betti number, torsion factors and bases in one degree
    Homology {
        #[command(flatten)]
        common: Common,
    },
    /// Class norm and all minimizers over one ring
    Norm {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        class: ClassArg,
        #[arg(long, default_value = "Z", value_parser = parse_ring)]
        ring: RingSpec,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Integral versus mod-n norms over a range of moduli
    Scan {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        class: ClassArg,
        #[arg(long, value_parser = parse_moduli)]
        n: Moduli,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Canonical integral lift of a mod-n chain
    Lift {
        #[command(flatten)]
        common: Common,
        /// Coefficients as idx=coeff,...
        #[arg(long)]
        chain: String,
        #[arg(long, value_parser = parse_ring)]
        ring: RingSpec,
    },
    /// Integral norms of the multiples k*c against the real norm
    Federer {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        class: ClassArg,
        #[arg(long)]
        k_max: u64,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Norm ratios while shrinking the weights of chosen simplices
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        class: ClassArg,
        /// Indices of the d-simplices to rescale
        #[arg(long, value_delimiter = ',', required = true)]
        shrink: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true, value_parser = parse_factor)]
        factors: Vec<BigRational>,
        #[arg(long, value_parser = parse_moduli)]
        n: Option<Moduli>,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Real norm with its calibration cochain, independently verified
    Certify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        class: ClassArg,
    },
    /// Whether mod-n reduction matches the integral and mod-n minimizer sets
    Bijection {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        class: ClassArg,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Complex file
    input: PathBuf,
    #[arg(long)]
    dim: usize,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ClassArg {
    /// Class coordinates as f:a,b;t:c;b:d
    #[arg(long)]
    class: String,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Report,
}

#[derive(Clone, Debug)]
struct Moduli(Vec<u64>);

fn parse_ring(s: &str) -> std::result::Result<RingSpec, String> {
    s.parse::<RingSpec>().map_err(|e| e.to_string())
}

fn parse_factor(s: &str) -> std::result::Result<BigRational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// `n`, `a..b` (inclusive) or `a,b,c`.
fn parse_moduli(s: &str) -> std::result::Result<Moduli, String> {
    let num = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("invalid modulus '{t}'"));
    let v: Vec<u64> = if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b)?);
        if a > b {
            return Err(format!("empty range {s}"));
        }
        (a..=b).collect()
    } else {
        s.split(',').map(num).collect::<std::result::Result<_, _>>()?
    };
    if v.iter().any(|&n| n < 2) {
        return Err("moduli must be at least 2".into());
    }
    Ok(Moduli(v))
}

enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

fn load(path: &Path, dim: usize) -> std::result::Result<(WeightedComplex, HomologyDecomposition), Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Compute(format!("cannot read {}: {e}", path.display())))?;
    let k = load_complex(&text).map_err(|e| Failure::Compute(format!("{}: {e}", path.display())))?;
    let dec = HomologyDecomposition::compute(&k, dim)?;
    Ok((k, dec))
}

fn parse_chain(k: &WeightedComplex, degree: usize, ring: RingSpec, text: &str) -> Result<Chain> {
    let mut pairs = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (i, c) = item
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("chain entry '{item}' is not idx=coeff")))?;
        let i: usize = i.trim().parse().map_err(|_| Error::Parse(format!("bad simplex index '{i}'")))?;
        pairs.push((i, ring.parse_elem(c.trim())?));
    }
    let chain = Chain::from_pairs(degree, ring, pairs)?;
    k.check_chain(&chain)?;
    Ok(chain)
}

fn tabular(format: Option<Format>) -> bool {
    format != Some(Format::Report)
}

fn report_only(format: Option<Format>, name: &str) -> std::result::Result<(), Failure> {
    if format == Some(Format::Csv) {
        return Err(Failure::Usage(format!("{name} has no csv output; use --format report")));
    }
    Ok(())
}

fn execute(cmd: &Command) -> std::result::Result<(String, Option<PathBuf>), Failure> {
    let text = match cmd {
        Command::Homology { common } => {
            report_only(common.format, "homology")?;
            let (k, dec) = load(&common.input, common.dim)?;
            report::render(&report::homology_json(&k, &dec))
        }
        Command::Norm { common, class, ring, cap } => {
            report_only(common.format, "norm")?;
            let (k, dec) = load(&common.input, common.dim)?;
            let c = dec.parse_class(&class.class, *ring)?;
            let cfg = SearchConfig { cap: *cap };
            let rep = match ring {
                RingSpec::Int => optimize::min_int(&k, &dec, &c, &cfg)?,
                RingSpec::Rat => optimize::min_real(&k, &dec, &c)?,
                RingSpec::Mod(_) => optimize::min_mod(&k, &dec, &c, &cfg)?,
            };
            report::render(&report::opt_json(&rep))
        }
        Command::Scan { common, class, n, cap } => {
            let (k, dec) = load(&common.input, common.dim)?;
            let c = dec.parse_class(&class.class, RingSpec::Int)?;
            let (lo, hi) = (n.0[0], n.0[n.0.len() - 1]);
            if n.0.windows(2).any(|w| w[1] != w[0] + 1) {
                return Err(Failure::Usage("scan takes a single modulus or a range a..b".into()));
            }
            let rows = hasse::scan_moduli(&k, &dec, &c, lo, hi, &SearchConfig { cap: *cap })?;
            if tabular(common.format) {
                report::scan_csv(&rows)
            } else {
                let tau = dec.torsion_number;
                report::render(&report::scan_json(&rows, tau, hasse::empirical_threshold(&rows, tau)))
            }
        }
        Command::Lift { common, chain, ring } => {
            report_only(common.format, "lift")?;
            if ring.modulus().is_none() {
                return Err(Failure::Usage("lift needs --ring Z/n".into()));
            }
            let (k, dec) = load(&common.input, common.dim)?;
            let t = parse_chain(&k, common.dim, *ring, chain)?;
            report::render(&report::lift_json(&optimize::lift_minimizer(&k, &dec, &t)?))
        }
        Command::Federer { common, class, k_max, cap } => {
            let (k, dec) = load(&common.input, common.dim)?;
            let c = dec.parse_class(&class.class, RingSpec::Int)?;
            let t = hasse::federer_sequence(&k, &dec, &c, *k_max, &SearchConfig { cap: *cap })?;
            if tabular(common.format) {
                report::federer_csv(&t)
            } else {
                report::render(&report::federer_json(&t))
            }
        }
        Command::Sweep { common, class, shrink, factors, n, cap } => {
            let (k, dec) = load(&common.input, common.dim)?;
            let c = dec.parse_class(&class.class, RingSpec::Int)?;
            let moduli = n.as_ref().map(|m| m.0.clone()).unwrap_or_default();
            let rows = hasse::gap_sweep(&k, &dec, &c, shrink, factors, &moduli, &SearchConfig { cap: *cap })?;
            if tabular(common.format) {
                report::gap_csv(&rows, &moduli)
            } else {
                report::render(&report::gap_json(&rows))
            }
        }
        Command::Certify { common, class } => {
            report_only(common.format, "certify")?;
            let (k, dec) = load(&common.input, common.dim)?;
            let c = dec.parse_class(&class.class, RingSpec::Rat)?;
            let rep = optimize::min_real(&k, &dec, &c)?;
            let phi = rep.certificate.as_ref().expect("min_real always certifies");
            let verified = optimize::verify_certificate(&k, &dec, &c, phi, &rep.value)?;
            report::render(&json!({
                "class": c.to_string(),
                "value": format_rational(&rep.value),
                "certificate": report::cochain_json(phi),
                "comass": format_rational(&optimize::comass(&k, phi)),
                "verified": verified,
            }))
        }
        Command::Bijection { common, class, n, cap } => {
            report_only(common.format, "bijection")?;
            let (k, dec) = load(&common.input, common.dim)?;
            let c = dec.parse_class(&class.class, RingSpec::Int)?;
            let rep = hasse::bijection_check(&k, &dec, &c, *n, &SearchConfig { cap: *cap })?;
            report::render(&report::bijection_json(&rep))
        }
    };
    let out = match cmd {
        Command::Homology { common }
        | Command::Norm { common, .. }
        | Command::Scan { common, .. }
        | Command::Lift { common, .. }
        | Command::Federer { common, .. }
        | Command::Sweep { common, .. }
        | Command::Certify { common, .. }
        | Command::Bijection { common, .. } => common.out.clone(),
    };
    Ok((text, out))
}

/// Runs one command. `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(&cli.command) {
        Ok((text, None)) => match out.write_all(text.as_bytes()) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(err, "error: cannot write output: {e}");
                1
            }
        },
        Ok((text, Some(path))) => match std::fs::write(&path, text) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
                1
            }
        },
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "usage error: {msg}");
            2
        }
        Err(Failure::Compute(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}
