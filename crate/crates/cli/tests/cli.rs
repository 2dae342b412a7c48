use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn mzlaw(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mzlaw"))
        .args(args)
        .env("MZLAW_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const CONFIG: &str = "\
version = 1

[potential]
d = 3
shells = 1:6

[experiment]
r_grid = 8, 12, 16
mesh = 0.05

[window lower]
shape = disc
center = 0, -0.5
radius = 0.45

[window across]
shape = disc
center = 0.3, 0
radius = 0.4

[window edge]
shape = sector
theta1 = 0
theta2 = 1
";

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("exp.cfg");
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn verify_passes_for_odd_dimensions() {
    let cache = TempDir::new().unwrap();
    for d in ["3", "5"] {
        let o = mzlaw(cache.path(), &["verify", "--d", d]);
        assert_eq!(code(&o), 0, "{}", stdout(&o));
        let out = stdout(&o);
        assert!(out.lines().filter(|l| l.starts_with("pass")).count() >= 10);
        assert!(!out.contains("FAIL"));
    }
    // the profile went through the cache directory
    assert!(fs::read_dir(cache.path()).unwrap().count() >= 2);
}

#[test]
fn verify_writes_a_check_table() {
    let cache = TempDir::new().unwrap();
    let out = cache.path().join("checks.csv");
    let o = mzlaw(cache.path(), &["verify", "--d", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(out).unwrap();
    assert!(text.starts_with("check,value,limit,passed\n"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",1")));
}

#[test]
fn usage_errors_exit_with_two() {
    let cache = TempDir::new().unwrap();
    for args in [
        vec!["verify", "--d", "4"],
        vec!["verify", "--d", "3", "--tol", "0"],
        vec!["verify", "--d", "3", "--tol=-1e-9"],
        vec!["verify"],
        vec!["sector-mass", "--d", "3", "--theta1", "2", "--theta2", "1"],
        vec!["hd-table", "--d", "3", "--n", "1"],
        vec!["sample", "--d", "2", "--n", "5", "--seed", "1"],
        vec!["resonances", "--config", "/nonexistent/exp.cfg"],
        vec!["frobnicate"],
    ] {
        let o = mzlaw(cache.path(), &args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
    }
    let o = mzlaw(cache.path(), &["verify", "--d", "4"]);
    assert!(stderr(&o).contains("dimension 4"));
}

#[test]
fn hd_table_shape() {
    let cache = TempDir::new().unwrap();
    let o = mzlaw(cache.path(), &["hd-table", "--d", "3", "--n", "9"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "theta,h,dh,ddh,angular_factor");
    assert_eq!(lines.len(), 10);
    let mid: Vec<f64> = lines[5].split(',').map(|v| v.parse().unwrap()).collect();
    assert!((mid[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    assert!((mid[1] - 2.191_741_189_459_563).abs() < 1e-9);
}

#[test]
fn sector_mass_conventions() {
    let cache = TempDir::new().unwrap();
    let both = stdout(&mzlaw(
        cache.path(),
        &["sector-mass", "--d", "3", "--theta1", "0", "--theta2", "1.1"],
    ));
    assert_eq!(both.lines().count(), 3);
    assert!(both.contains("lemma,") && both.contains("corollary,"));
    let value = |s: &str, conv: &str| -> f64 {
        s.lines()
            .find(|l| l.starts_with(conv))
            .unwrap()
            .rsplit(',')
            .next()
            .unwrap()
            .parse()
            .unwrap()
    };
    // the corollary convention adds the radius mass e_d / (2 pi d c_d)
    let line = (4.0 / 3.0) / (2.0 * std::f64::consts::PI * 3.0 * 1.889_806_225_697_729);
    assert!((value(&both, "corollary") - value(&both, "lemma") - line).abs() < 1e-9);
    let inner = stdout(&mzlaw(
        cache.path(),
        &["sector-mass", "--d", "3", "--theta1", "0.4", "--theta2", "1.1"],
    ));
    assert_eq!(inner.lines().count(), 2);
    let only = stdout(&mzlaw(
        cache.path(),
        &[
            "sector-mass",
            "--d",
            "3",
            "--theta1",
            "0",
            "--theta2",
            "1.1",
            "--convention",
            "corollary",
        ],
    ));
    assert_eq!(only.lines().count(), 2);
    assert!(only.contains("corollary,"));
}

#[test]
fn sampling_is_reproducible() {
    let cache = TempDir::new().unwrap();
    let (a, b) = (cache.path().join("a.csv"), cache.path().join("b.csv"));
    for p in [&a, &b] {
        let o = mzlaw(
            cache.path(),
            &[
                "sample",
                "--d",
                "3",
                "--n",
                "500",
                "--seed",
                "42",
                "--out",
                p.to_str().unwrap(),
            ],
        );
        assert_eq!(code(&o), 0);
    }
    let bytes = fs::read(&a).unwrap();
    assert_eq!(bytes, fs::read(&b).unwrap());
    let text = String::from_utf8(bytes).unwrap();
    assert_eq!(text.lines().count(), 501);
    for l in text.lines().skip(1) {
        let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(v[1] <= 0.0 && v[0].hypot(v[1]) <= 1.0);
    }
    let other = stdout(&mzlaw(
        cache.path(),
        &["sample", "--d", "3", "--n", "500", "--seed", "43"],
    ));
    assert_ne!(other.as_bytes(), fs::read(&a).unwrap().as_slice());
}

#[test]
fn resonances_with_oracle() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let out = dir.path().join("res");
    let o = mzlaw(
        dir.path(),
        &[
            "resonances",
            "--config",
            &cfg,
            "--oracle",
            "--out",
            out.to_str().unwrap(),
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("agrees with the s-wave oracle"));
    let csv = fs::read_to_string(out.join("resonances.csv")).unwrap();
    assert!(csv.starts_with("re_lambda,im_lambda,l,channel_order,harmonic_mult,total_mult,residual\n"));
    assert!(csv.lines().count() > 100);

    let d5 = write_config(dir.path(), &CONFIG.replace("d = 3", "d = 5"));
    let o = mzlaw(
        dir.path(),
        &[
            "resonances",
            "--config",
            &d5,
            "--oracle",
            "--out",
            out.to_str().unwrap(),
        ],
    );
    assert_eq!(code(&o), 2);
}

#[test]
fn malformed_config_reports_the_line() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), &CONFIG.replace("mesh = 0.05", "mesh = coarse"));
    let o = mzlaw(dir.path(), &["converge", "--config", &cfg]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(err.contains("line 9") && err.contains("mesh"), "{err}");
}

#[test]
fn converge_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let runs = [dir.path().join("a"), dir.path().join("b")];
    for out in &runs {
        let o = mzlaw(
            dir.path(),
            &["converge", "--config", &cfg, "--out", out.to_str().unwrap()],
        );
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    for f in [
        "resonances.csv",
        "report.csv",
        "distances.csv",
        "summary.json",
        "config.txt",
    ] {
        let a = fs::read(runs[0].join(f)).unwrap();
        assert_eq!(a, fs::read(runs[1].join(f)).unwrap(), "{f}");
        assert!(!a.contains(&b'\r'));
    }
    let distances = fs::read_to_string(runs[0].join("distances.csv")).unwrap();
    // three radii for each of the three windows
    assert_eq!(distances.lines().count(), 10);
    // a window with an edge along the axis is kept out of the mass report
    let report = fs::read_to_string(runs[0].join("report.csv")).unwrap();
    assert!(report.contains(",lower,") && report.contains(",across,") && !report.contains(",edge,"));
    let summary = fs::read_to_string(runs[0].join("summary.json")).unwrap();
    assert!(summary.contains("\"lower\"") && summary.contains("\"slope\""));
}
