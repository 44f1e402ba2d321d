//! End-to-end runs of the `qpswf` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qpswf::qbessel::jv_lattice;
use qpswf::qfourier::fqv_transform;
use qpswf::report::fmt_e;
use qpswf::{Bandlimit, LatticeFunction, LatticeWindow, PswfBasis, QParams, TransformPlan};
use rand::{Rng, SeedableRng};

fn qpswf(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpswf"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn csv_column(path: &Path, name: &str) -> Vec<Option<f64>> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == name).unwrap();
    lines
        .map(|l| {
            let cell = l.split(',').nth(col).unwrap();
            (!cell.is_empty()).then(|| cell.parse().unwrap())
        })
        .collect()
}

fn write_samples(path: &Path, f: &LatticeFunction) {
    let mut s = String::from("# k value\n");
    for (k, x) in f.iter() {
        if x != 0.0 {
            s += &format!("{k} {x:e}\n");
        }
    }
    fs::write(path, s).unwrap();
}

#[test]
fn eigen_prints_library_eigenvalues() {
    let dir = tempfile::tempdir().unwrap();
    let o = qpswf(&["eigen"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let p = QParams::new(0.5, -0.5).unwrap();
    let basis = PswfBasis::compute(Bandlimit::new(0, 60).unwrap(), &p, 15).unwrap();
    let expected: String = basis
        .eigenvalues()
        .iter()
        .map(|l| fmt_e(*l) + "\n")
        .collect();
    assert_eq!(stdout(&o), expected);

    for name in ["eigen.json", "eigen.csv", "manifest.json"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("eigen.json")).unwrap()).unwrap();
    assert_eq!(json["eigenvalues"].as_array().unwrap().len(), 15);
    assert_eq!(
        json["eigenvalues"][1].as_f64().unwrap(),
        basis.eigenvalues()[1]
    );
}

#[test]
fn invalid_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = qpswf(&["eigen", "--q", "1.5"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("q must lie in (0,1)"), "{}", stderr(&o));

    let o = qpswf(&["eigen", "--keep", "61"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = qpswf(&["eigen", "--grid", "4:1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = qpswf(&["eigen", "--a-exp", "0", "--a-exp", "1"], dir.path());
    assert_eq!(o.status.code(), Some(2));

    let config = dir.path().join("bad.json");
    fs::write(&config, r#"{"q": 0.5, "colour": 1}"#).unwrap();
    let o = qpswf(&["eigen", "--config", config.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn manifest_reproduces_run() {
    let first = tempfile::tempdir().unwrap();
    let o = qpswf(
        &[
            "eigen", "--v", "0", "--keep", "5", "--a-exp", "-1", "--format", "svg",
        ],
        first.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let second = tempfile::tempdir().unwrap();
    let manifest = first.path().join("manifest.json");
    let o2 = qpswf(
        &["eigen", "--config", manifest.to_str().unwrap()],
        second.path(),
    );
    assert_eq!(o2.status.code(), Some(0));
    assert_eq!(o.stdout, o2.stdout);
    for name in ["eigen.json", "eigen.csv", "eigen.svg"] {
        assert_eq!(
            fs::read(first.path().join(name)).unwrap(),
            fs::read(second.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn reconstruct_runge_writes_three_plots() {
    let dir = tempfile::tempdir().unwrap();
    let o = qpswf(
        &["reconstruct", "--function", "runge", "--format", "json"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 3);
    for a in [0, -1, -2] {
        let svg = fs::read_to_string(dir.path().join(format!("reconstruct_a{a}.svg"))).unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let polylines = doc
            .descendants()
            .filter(|n| n.has_tag_name("polyline"))
            .count();
        assert_eq!(polylines, 2);

        let csv = dir.path().join(format!("reconstruct_a{a}.csv"));
        let z = csv_column(&csv, "z");
        assert!(z.len() >= 200);
        let err = csv_column(&csv, "abs_error");
        assert!(err.iter().all(|e| e.unwrap() >= 0.0));
    }
    let summary: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("reconstruct_summary.json")).unwrap(),
    )
    .unwrap();
    let errors: Vec<f64> = summary
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["sup_error"].as_f64().unwrap())
        .collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
}

#[test]
fn reconstruct_narrow_preset_uses_short_grid() {
    let dir = tempfile::tempdir().unwrap();
    let o = qpswf(
        &["reconstruct", "--preset", "narrow", "--a-exp", "0"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["grid"], serde_json::json!([-1, 10]));
    assert_eq!(manifest["a_exp"], serde_json::json!([0]));
}

#[test]
fn reconstruct_zero_samples_gives_flat_output() {
    let dir = tempfile::tempdir().unwrap();
    let samples = dir.path().join("zero.txt");
    fs::write(&samples, "0 0\n5 0.0\n").unwrap();
    let o = qpswf(
        &["reconstruct", "--samples", samples.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for a in [0, -1, -2] {
        let col = csv_column(
            &dir.path().join(format!("reconstruct_a{a}.csv")),
            "f_reconstructed",
        );
        assert!(col.iter().all(|x| x.unwrap() == 0.0));
    }
}

#[test]
fn reconstruct_bandlimited_input_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let p = QParams::new(0.5, -0.5).unwrap();
    let window = LatticeWindow::new(-15, 60).unwrap();
    let plan = TransformPlan::symmetric(window, p);
    let mut rng = rand::rngs::StdRng::seed_from_u64(17);
    let u = LatticeFunction::from_exponent_fn(window, |k| {
        if (0..20).contains(&k) {
            rng.gen_range(-1.0..1.0)
        } else {
            0.0
        }
    });
    let f = fqv_transform(&u, &plan).unwrap();
    let samples = dir.path().join("f.txt");
    write_samples(&samples, &f);
    let o = qpswf(
        &[
            "reconstruct",
            "--samples",
            samples.to_str().unwrap(),
            "--format",
            "json",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let summary: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("reconstruct_summary.json")).unwrap(),
    )
    .unwrap();
    for s in summary.as_array().unwrap() {
        assert!(s["sup_error"].as_f64().unwrap() <= 1e-8, "{s}");
    }
}

#[test]
fn transform_of_indicator() {
    let dir = tempfile::tempdir().unwrap();
    let samples = dir.path().join("e0.txt");
    fs::write(&samples, "0 1\n").unwrap();
    let o = qpswf(
        &[
            "transform",
            "--samples",
            samples.to_str().unwrap(),
            "--v",
            "0",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let p = QParams::new(0.5, 0.0).unwrap();
    let ks = csv_column(&dir.path().join("transform.csv"), "k");
    let values = csv_column(&dir.path().join("transform.csv"), "transform");
    assert_eq!(ks.len(), 76);
    for (k, x) in ks.iter().zip(&values) {
        let m = k.unwrap() as i32;
        let expected = p.c_qv() * (1.0 - p.q()) * jv_lattice(m, &p);
        assert_eq!(fmt_e(x.unwrap()), fmt_e(expected), "m={m}");
    }
}

#[test]
fn transform_roundtrip_reports_deviation() {
    let dir = tempfile::tempdir().unwrap();
    let window = LatticeWindow::new(-15, 60).unwrap();
    let mut rng = rand::rngs::StdRng::seed_from_u64(23);
    let f = LatticeFunction::from_exponent_fn(window, |k| {
        if (-3..=10).contains(&k) {
            rng.gen_range(-1.0..1.0)
        } else {
            0.0
        }
    });
    let samples = dir.path().join("f.txt");
    write_samples(&samples, &f);
    let o = qpswf(
        &[
            "transform",
            "--samples",
            samples.to_str().unwrap(),
            "--roundtrip",
            "--format",
            "json",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let line = stdout(&o);
    let deviation: f64 = line
        .trim()
        .strip_prefix("roundtrip_deviation=")
        .unwrap()
        .parse()
        .unwrap();
    assert!(deviation <= 1e-8);
    assert!(csv_column(&dir.path().join("transform.csv"), "roundtrip").len() == 76);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("transform.json")).unwrap())
            .unwrap();
    assert!(json["roundtrip_deviation"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn bad_input_files_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.txt");
    fs::write(&empty, "").unwrap();
    let o = qpswf(
        &["transform", "--samples", empty.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(4));

    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "# ok\n0 1\n1 two\n").unwrap();
    let o = qpswf(
        &["transform", "--samples", bad.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let outside = dir.path().join("outside.txt");
    fs::write(&outside, "99 1\n").unwrap();
    let o = qpswf(
        &["reconstruct", "--samples", outside.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(4));

    let missing = dir.path().join("missing.txt");
    let o = qpswf(
        &["reconstruct", "--samples", missing.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(4));
}
