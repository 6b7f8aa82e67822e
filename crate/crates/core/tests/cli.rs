use hasse::cli::run;
use hasse::report::parse_scan_csv;
use serde_json::Value;

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

struct Outcome {
    code: i32,
    out: String,
    err: String,
}

fn hasse(args: &[&str]) -> Outcome {
    let mut argv = vec!["hasse".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    Outcome { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn json(o: &Outcome) -> Value {
    assert_eq!(o.code, 0, "{}", o.err);
    serde_json::from_str(&o.out).unwrap()
}

#[test]
fn homology_of_the_torus() {
    let v = json(&hasse(&["homology", &fixture("torus.cplx"), "--dim", "1"]));
    assert_eq!(v["betti"], 2);
    assert_eq!(v["tau"], 1);
    assert_eq!(v["torsion"].as_array().unwrap().len(), 0);
    let v = json(&hasse(&["homology", &fixture("rp2.cplx"), "--dim", "1"]));
    assert_eq!((v["betti"].as_u64(), v["tau"].as_u64()), (Some(0), Some(2)));
}

#[test]
fn torsion_norm_on_rp2_is_positive() {
    let v = json(&hasse(&["norm", &fixture("rp2.cplx"), "--dim", "1", "--class", "t:1", "--ring", "Z"]));
    let value = v["value"].as_str().unwrap();
    assert!(!value.starts_with('0') && !value.starts_with('-'), "{value}");
    assert!(v["minimizer_count"].as_u64().unwrap() >= 1);
}

#[test]
fn scan_emits_one_row_per_modulus() {
    let o = hasse(&["scan", &fixture("mobius_eps.cplx"), "--dim", "1", "--class", "f:1", "--n", "2..16"]);
    assert_eq!(o.code, 0, "{}", o.err);
    assert_eq!(o.out.lines().count(), 16);
    let rows = parse_scan_csv(&o.out).unwrap();
    assert_eq!(rows.len(), 15);
    assert!(!rows[1].equal);
    assert!(rows.last().unwrap().equal);
    let report = json(&hasse(&["scan", &fixture("mobius_eps.cplx"), "--dim", "1", "--class", "f:1", "--n", "2..16", "--format", "report"]));
    assert_eq!(report["empirical_threshold"], 4);
}

#[test]
fn other_commands_run() {
    let m = fixture("mobius_eps.cplx");
    let v = json(&hasse(&["certify", &m, "--dim", "1", "--class", "f:1"]));
    assert_eq!((v["value"].as_str(), v["verified"].as_bool()), (Some("5/8"), Some(true)));
    let o = hasse(&["federer", &m, "--dim", "1", "--class", "f:1", "--k-max", "3"]);
    assert_eq!(o.code, 0, "{}", o.err);
    assert_eq!(o.out.lines().next(), Some("k,value_int,ratio,value_real"));
    let o = hasse(&["sweep", &m, "--dim", "1", "--class", "f:1", "--shrink", "1,2,5,6,8", "--factors", "1,1/2", "--n", "3"]);
    assert_eq!((o.code, o.out.lines().count()), (0, 3));
    let v = json(&hasse(&["bijection", &m, "--dim", "1", "--class", "f:1", "--n", "3"]));
    assert_eq!(v["verdict"], false);
    let v = json(&hasse(&["lift", &m, "--dim", "1", "--chain", "0=1,3=2", "--ring", "Z/3"]));
    assert_eq!(v["lifted"]["coeffs"][1][1], "-1");
}

#[test]
fn out_writes_the_report_to_a_file() {
    let path = format!("{}/torus-homology.json", env!("CARGO_TARGET_TMPDIR"));
    let _ = std::fs::remove_file(&path);
    let o = hasse(&["homology", &fixture("torus.cplx"), "--dim", "1", "--out", &path]);
    assert_eq!((o.code, o.out.as_str()), (0, ""));
    let direct = hasse(&["homology", &fixture("torus.cplx"), "--dim", "1"]);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), direct.out);
}

#[test]
fn usage_errors_exit_with_two() {
    let t = fixture("torus.cplx");
    for args in [
        vec!["homology", &t, "--dim", "1", "--format", "csv"],
        vec!["norm", &t, "--dim", "1"],
        vec!["scan", &t, "--dim", "1", "--class", "f:1,0", "--n", "1..4"],
        vec!["scan", &t, "--dim", "1", "--class", "f:1,0", "--n", "2,5"],
        vec!["lift", &t, "--dim", "1", "--chain", "0=1", "--ring", "Z"],
        vec!["frobnicate"],
    ] {
        let o = hasse(&args);
        assert_eq!(o.code, 2, "{args:?}: {}", o.err);
        assert!(o.out.is_empty());
    }
    assert_eq!(hasse(&["--help"]).code, 0);
}

#[test]
fn computation_errors_exit_with_one_line() {
    let t = fixture("torus.cplx");
    let missing = fixture("no-such.cplx");
    for args in [
        vec!["homology", missing.as_str(), "--dim", "1"],
        vec!["norm", &t, "--dim", "1", "--class", "f:1"],
        vec!["homology", &t, "--dim", "7"],
        vec!["bijection", &fixture("rp2.cplx"), "--dim", "1", "--class", "t:1", "--n", "3"],
    ] {
        let o = hasse(&args);
        assert_eq!(o.code, 1, "{args:?}");
        assert!(o.err.starts_with("error: "), "{}", o.err);
        assert_eq!(o.err.trim_end().lines().count(), 1);
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["norm", &fixture("klein_bottle.cplx"), "--dim", "1", "--class", "f:1;t:1", "--ring", "Z/4"];
    assert_eq!(hasse(&args).out, hasse(&args).out);
}
