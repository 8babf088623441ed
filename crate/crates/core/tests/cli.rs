use transmission_bounds::cli::{run, EXIT_NUMERIC, EXIT_OK, EXIT_PRECONDITION, EXIT_USAGE, SWEEP_HEADER};

fn tbound(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("tbound").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn sweep_csv_shape() {
    let (code, out, _) =
        tbound(&["sweep", "--potential", "square", "--emin", "0.5", "--emax", "2", "--n", "3", "--budget", "20"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], SWEEP_HEADER.join(","));
    assert_eq!(lines.len(), 4);
    for l in &lines[1..] {
        assert_eq!(l.split(',').count(), SWEEP_HEADER.len());
    }
    // The Schwartzian bound needs a smooth profile.
    assert!(lines[1].split(',').nth(8) == Some("NaN"));
}

#[test]
fn sweep_json() {
    let (code, out, _) = tbound(&[
        "sweep",
        "--potential",
        "sech2",
        "--emin",
        "0.5",
        "--emax",
        "1",
        "--n",
        "2",
        "--format",
        "json",
        "--budget",
        "20",
    ]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    assert!(v["rows"][0]["T_exact"].as_f64().unwrap() > 0.0);
}

#[test]
fn usage_errors() {
    for args in [
        &["sweep", "--potential", "nope", "--emin", "1", "--emax", "2"][..],
        &["sweep", "--potential", "square", "--params", "W=1", "--emin", "1", "--emax", "2"],
        &["sweep", "--potential", "square", "--params", "V0=abc", "--emin", "1", "--emax", "2"],
        &["sweep", "--potential", "square", "--emin", "1", "--emax", "2", "--n", "1"],
        &["sweep", "--potential", "square", "--emin", "-1", "--emax", "2"],
        &["bound", "--potential", "square", "--energy", "1", "--family", "nope"],
        &["bogus"],
    ] {
        let (code, _, err) = tbound(args);
        assert_eq!(code, EXIT_USAGE, "{args:?}: {err}");
    }
    let (code, out, _) = tbound(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("sweep"));
}

#[test]
fn precondition_exit_code() {
    let (code, out, err) = tbound(&["bound", "--potential", "square", "--energy", "2", "--family", "schwartzian"]);
    assert_eq!(code, EXIT_PRECONDITION);
    assert!(out.is_empty());
    assert!(err.contains("PreconditionFailed"));
    let (code, _, err) =
        tbound(&["bound", "--potential", "gaussian", "--energy", "0.5", "--family", "low-energy", "--params", "V0=-1"]);
    assert_eq!(code, EXIT_PRECONDITION, "{err}");
}

#[test]
fn bound_json_carries_particle_bound() {
    let (code, out, _) =
        tbound(&["bound", "--potential", "sech2", "--energy", "0.8", "--family", "delta-mg", "--optimize"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let theta = v["theta"].as_f64().unwrap();
    let n = v["particle_bound"]["n_bound"].as_f64().unwrap();
    assert!((n - theta.sinh().powi(2)).abs() < 1e-12 * n.max(1.0));
    assert_eq!(v["family"], "delta-mg");
}

#[test]
fn invariance_command() {
    let (code, out, _) = tbound(&["invariance", "--potential", "sech2", "--energy", "0.7", "--j", "bump"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("\"pass\": true"));
    let (code, _, _) =
        tbound(&["invariance", "--potential", "sech2", "--energy", "0.7", "--j", "bump", "--tol", "1e-300"]);
    assert_eq!(code, EXIT_NUMERIC);
    let (code, _, err) = tbound(&["invariance", "--potential", "sech2", "--energy", "0.7", "--j", "exp"]);
    assert_eq!(code, EXIT_PRECONDITION);
    assert!(err.contains("DivergentAsymptotics"));
}

#[test]
fn config_file() {
    let dir = std::env::temp_dir().join(format!("tbound-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("good.toml");
    std::fs::write(&good, "budget = 10\nrefine_tol = 1e-8\n").unwrap();
    let bad = dir.join("bad.toml");
    std::fs::write(&bad, "bugdet = 10\n").unwrap();
    let base = ["bound", "--potential", "sech2", "--energy", "0.8", "--family", "hconst", "--config"];
    let (code, _, _) = tbound(&[&base[..], &[good.to_str().unwrap()]].concat());
    assert_eq!(code, EXIT_OK);
    let (code, _, err) = tbound(&[&base[..], &[bad.to_str().unwrap()]].concat());
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("bugdet"), "{err}");
    // Flags override the file, and are validated too.
    let (code, _, _) = tbound(&[&base[..], &[good.to_str().unwrap(), "--budget", "0"]].concat());
    assert_eq!(code, EXIT_USAGE);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn corpus_lists_all() {
    let (code, out, _) = tbound(&["corpus"]);
    assert_eq!(code, EXIT_OK);
    for name in ["zero", "square", "smooth-square", "sech2", "step", "sharp-step", "gaussian"] {
        assert!(out.lines().any(|l| l.starts_with(&format!("{name},"))));
    }
}

#[test]
fn schwartzian_below_barrier_names_forbidden_region() {
    let (code, _, err) = tbound(&["bound", "--potential", "square", "--energy", "0.5", "--family", "schwartzian"]);
    assert_eq!(code, EXIT_PRECONDITION);
    assert!(err.contains("ForbiddenRegionPresent"), "{err}");
}

#[test]
fn wkb_like_above_barrier_terms() {
    let (code, out, _) = tbound(&["bound", "--potential", "square", "--energy", "2", "--family", "wkb-like"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let d = v["diagnostics"].as_array().unwrap();
    assert_eq!(d.len(), 4);
    for t in &d[..3] {
        assert_eq!(t["value"].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn zero_potential_sweep_is_transparent() {
    let (code, out, _) = tbound(&[
        "sweep",
        "--potential",
        "zero",
        "--emin",
        "0.5",
        "--emax",
        "3",
        "--n",
        "4",
        "--spacing",
        "log",
        "--budget",
        "20",
    ]);
    assert_eq!(code, EXIT_OK);
    for l in out.lines().skip(1) {
        let t: f64 = l.split(',').nth(1).unwrap().parse().unwrap();
        assert!((t - 1.0).abs() < 1e-9);
    }
}
