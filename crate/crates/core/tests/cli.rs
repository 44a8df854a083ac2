use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn spinspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinspec"))
        .args(args)
        .env_remove("SPINSPEC_SEED")
        .output()
        .expect("spawn spinspec")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn number(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

fn verify_rows(text: &str) -> Vec<(String, String)> {
    csv_rows(text)
        .into_iter()
        .map(|r| (r[0].clone(), r[1].clone()))
        .collect()
}

#[test]
fn k2_spectrum_example() {
    let o = spinspec(&[
        "spectrum", "--model", "K2", "--omega1", "1", "--omega2", "2", "--eps", "0.5",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 4);
    let values: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    let (outer, inner) = (9.25f64.sqrt(), 1.25f64.sqrt());
    for (got, want) in values.iter().zip([-outer, -inner, inner, outer]) {
        assert!((got - want).abs() <= 1e-10, "{values:?}");
    }
    for r in &rows {
        assert!(r[3].parse::<f64>().unwrap() > 0.0);
        assert_eq!(r[4], "tangle");
    }
}

#[test]
fn partitions_agree_without_coupling() {
    let z = |model: &str| -> f64 {
        let o = spinspec(&[
            "partition",
            "--model",
            model,
            "--omega1",
            "1",
            "--omega2",
            "2",
            "--eps",
            "0",
            "--inverse-temperature",
            "1",
        ]);
        assert_eq!(o.status.code(), Some(0));
        csv_rows(&stdout(&o))[0][1].parse().unwrap()
    };
    assert!((z("H2") - z("K2")).abs() <= 1e-12);
}

#[test]
fn sweep_reports_crossings_near_one_and_two() {
    let o = spinspec(&[
        "sweep", "--model", "H2", "--omega1", "1", "--omega2", "2", "--param", "eps", "--range", "0:3", "--steps",
        "301",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("param,track_0,track_1,track_2,track_3\n"));
    assert_eq!(csv_rows(&text).len(), 301);
    let locations: Vec<f64> = text
        .lines()
        .filter(|l| l.starts_with("# crossing: kind=exact"))
        .map(|l| {
            l.split("param=")
                .nth(1)
                .unwrap()
                .split(' ')
                .next()
                .unwrap()
                .parse()
                .unwrap()
        })
        .collect();
    assert_eq!(locations.len(), 2, "{text}");
    assert!((locations[0] - 1.0).abs() <= 1e-8 && (locations[1] - 2.0).abs() <= 1e-8);
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, extra: &[&str]| -> Vec<u8> {
        let path = dir.path().join(name);
        let mut args = extra.to_vec();
        args.extend(["--out", path.to_str().unwrap()]);
        assert_eq!(spinspec(&args).status.code(), Some(0));
        fs::read(path).unwrap()
    };
    let sweep = [
        "sweep",
        "--model",
        "K3",
        "--omega1",
        "1",
        "--omega2",
        "0.7",
        "--omega3",
        "0.3",
        "--gamma12",
        "0.2",
        "--gamma13",
        "0.1",
        "--gamma23",
        "0.05",
        "--param",
        "eps",
        "--range",
        "0:2",
        "--steps",
        "201",
    ];
    assert_eq!(run("a.csv", &sweep), run("b.csv", &sweep));
    let spectrum = [
        "spectrum", "--model", "H3", "--omega1", "1", "--omega2", "0.7", "--omega3", "0.3", "--eps", "0.4", "--format",
        "json",
    ];
    assert_eq!(run("a.json", &spectrum), run("b.json", &spectrum));
}

#[test]
fn json_spectrum_round_trips() {
    let o = spinspec(&[
        "spectrum",
        "--model",
        "K3",
        "--omega1",
        "1",
        "--omega2",
        "0.7",
        "--omega3",
        "0.3",
        "--gamma12",
        "0.2",
        "--gamma13",
        "0.1",
        "--gamma23",
        "0.05",
        "--eps",
        "0.4",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let json_text = stdout(&o);
    let v: Value = serde_json::from_str(&json_text).unwrap();
    let complex = |z: &Value| num_complex::Complex64::new(number(&z[0]), number(&z[1]));
    let matrix: Vec<Vec<num_complex::Complex64>> = v["matrix"]
        .as_array()
        .unwrap()
        .iter()
        .map(|row| row.as_array().unwrap().iter().map(complex).collect())
        .collect();
    let n = matrix.len();
    assert_eq!(n, 8);
    let bound = number(&v["residual_bound"]);
    for (k, vector) in v["eigenvectors"].as_array().unwrap().iter().enumerate() {
        let x: Vec<_> = vector.as_array().unwrap().iter().map(complex).collect();
        let lambda = number(&v["eigenvalues"][k]);
        let residual = (0..n)
            .map(|i| ((0..n).map(|j| matrix[i][j] * x[j]).sum::<num_complex::Complex64>() - x[i] * lambda).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(residual <= bound, "eigenpair {k}: {residual} > {bound}");
    }
    let csv = spinspec(&[
        "spectrum",
        "--model",
        "K3",
        "--omega1",
        "1",
        "--omega2",
        "0.7",
        "--omega3",
        "0.3",
        "--gamma12",
        "0.2",
        "--gamma13",
        "0.1",
        "--gamma23",
        "0.05",
        "--eps",
        "0.4",
    ]);
    for (k, row) in csv_rows(&stdout(&csv)).iter().enumerate() {
        assert_eq!(number(&v["eigenvalues"][k]), row[1].parse::<f64>().unwrap());
        assert!(json_text.contains(&format!("    {},\n", row[1])) || json_text.contains(&format!("    {}\n", row[1])));
    }
}

#[test]
fn missing_parameter_is_a_usage_error() {
    let o = spinspec(&["spectrum", "--model", "H2", "--omega1", "1", "--eps", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.contains("omega2"), "{err}");
    assert!(stdout(&o).is_empty());
}

#[test]
fn bad_flag_value_names_the_flag() {
    let o = spinspec(&[
        "sweep", "--model", "H2", "--omega1", "1", "--omega2", "2", "--param", "eps", "--range", "0:3", "--steps", "1",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("steps"));
    let o = spinspec(&[
        "spectrum", "--model", "H2", "--omega1", "1", "--omega2", "2", "--eps", "0", "--bogus", "1",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bogus"));
}

#[test]
fn help_exits_zero() {
    let o = spinspec(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verify-paper"));
}

#[test]
fn verify_paper_report() {
    let o = spinspec(&["verify-paper"]);
    let text = stdout(&o);
    let rows = verify_rows(&text);
    assert!(rows.len() >= 30);
    let failing: Vec<&str> = rows
        .iter()
        .filter(|(_, s)| s == "fail")
        .map(|(n, _)| n.as_str())
        .collect();
    // The pinned K3 point has exact crossings and only product eigenvectors, so
    // the two K3 claims fail there and the report says so.
    assert_eq!(
        failing,
        ["j.K3_eigenvector_entangled_across_every_cut", "j.K3_no_exact_crossing"]
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(text.contains("# overall: fail (2 of"));
    assert!(text.contains("# note: K3 exact crossing at eps="));
}

#[test]
fn verify_paper_detects_injected_fault() {
    let o = spinspec(&["verify-paper", "--fault-k02", "1e-3"]);
    assert_eq!(o.status.code(), Some(3));
    let rows = verify_rows(&stdout(&o));
    assert!(rows.iter().any(|(n, s)| n.starts_with("f.") && s == "fail"));
}

#[test]
fn verify_paper_closed_forms_carry_hbar() {
    let o = spinspec(&["verify-paper", "--hbar", "2"]);
    let text = stdout(&o);
    assert!(text.starts_with("# verify-paper seed=42 hbar=2.0000000000000000e0"));
    for (name, status) in verify_rows(&text) {
        if name.starts_with("f.") || name.starts_with("g.") {
            assert_eq!(status, "pass", "{name}");
        }
    }
}

#[test]
fn verify_paper_seed_comes_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_spinspec"))
        .arg("verify-paper")
        .env("SPINSPEC_SEED", "7")
        .output()
        .unwrap();
    assert!(stdout(&o).starts_with("# verify-paper seed=7 "));
    let o = Command::new(env!("CARGO_BIN_EXE_spinspec"))
        .arg("verify-paper")
        .env("SPINSPEC_SEED", "seven")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("SPINSPEC_SEED"));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("k2.conf");
    fs::write(
        &config,
        "# two-spin point\nmodel = K2\nomega1 = 1\nomega2 = 2\neps = 0.5\n",
    )
    .unwrap();
    let value = |extra: &[&str]| -> f64 {
        let mut args = vec!["spectrum", "--config", config.to_str().unwrap()];
        args.extend(extra);
        let o = spinspec(&args);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        csv_rows(&stdout(&o))[0][1].parse().unwrap()
    };
    assert!((value(&[]) + 9.25f64.sqrt()).abs() <= 1e-10);
    assert!((value(&["--eps", "1.0"]) + 10.0f64.sqrt()).abs() <= 1e-10);

    fs::write(&config, "model = K2\nbeta = 1\n").unwrap();
    let o = spinspec(&["spectrum", "--config", config.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("beta"));
}

#[test]
fn failed_runs_leave_outputs_untouched() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("spectrum.csv");
    fs::write(&out, "previous\n").unwrap();
    let o = spinspec(&[
        "spectrum",
        "--model",
        "H2",
        "--omega1",
        "1",
        "--eps",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(fs::read_to_string(&out).unwrap(), "previous\n");

    let missing = dir.path().join("absent").join("spectrum.csv");
    let o = spinspec(&[
        "spectrum",
        "--model",
        "H2",
        "--omega1",
        "1",
        "--omega2",
        "2",
        "--eps",
        "0",
        "--out",
        missing.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!missing.exists());

    let o = spinspec(&[
        "spectrum",
        "--model",
        "H2",
        "--omega1",
        "1",
        "--omega2",
        "2",
        "--eps",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(fs::read_to_string(&out).unwrap().starts_with("# model=H2 dim=4"));
    let leftovers = fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(leftovers, 1, "temporary files left behind");
}

#[test]
fn entangle_ghz_and_product() {
    let o = spinspec(&["entangle", "--state", "[1, 0, 0, 0, 0, 0, 0, 1]"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    let get = |name: &str| -> f64 { rows.iter().find(|r| r[0] == name).unwrap()[1].parse().unwrap() };
    assert_eq!(get("qubits"), 3.0);
    assert!((get("three_tangle") - 1.0).abs() <= 1e-10);
    assert_eq!(get("product_q0"), 0.0);

    let o = spinspec(&["entangle", "--state", "[[0.5, 0], [0, 0.5], 0.5, [0, 0.5]]"]);
    let rows = csv_rows(&stdout(&o));
    let tangle: f64 = rows.iter().find(|r| r[0] == "tangle").unwrap()[1].parse().unwrap();
    assert!(tangle <= 1e-12);

    let o = spinspec(&["entangle", "--state", "[1, 0, 0]"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn terms_file_matches_preset() {
    let dir = tempfile::tempdir().unwrap();
    let terms = dir.path().join("h2.terms");
    fs::write(&terms, "# H2 at (1, 2, 0.5)\n1 ZI\n2 IX\n0.5 ZX\n").unwrap();
    let from_terms = spinspec(&["build", "--terms", terms.to_str().unwrap()]);
    let from_preset = spinspec(&[
        "build", "--model", "H2", "--omega1", "1", "--omega2", "2", "--eps", "0.5",
    ]);
    assert_eq!(from_terms.status.code(), Some(0));
    assert_eq!(stdout(&from_terms), stdout(&from_preset));
    assert_eq!(csv_rows(&stdout(&from_terms)).len(), 16);

    fs::write(&terms, "1 ZQ\n").unwrap();
    let o = spinspec(&["build", "--terms", terms.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 1") && stderr(&o).contains("ZQ"));
}
