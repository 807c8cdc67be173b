//! End-to-end runs of the `turnwave` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_turnwave"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(format!("{name}.conf"))
}

fn turnwave(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn turnwave")
}

fn run_into(name: &str, out: &Path, sets: &[&str]) -> Output {
    let mut args = vec!["run".to_string(), config(name).display().to_string(), "--out".into(), out.display().to_string()];
    for s in sets {
        args.push("--set".into());
        args.push(s.to_string());
    }
    bin().args(&args).output().expect("spawn turnwave")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn default_muskat_linear_decays_at_the_linear_rate() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_into("muskat-linear", tmp.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let err = summary(tmp.path())["rate_rel_error"].as_f64().unwrap();
    assert!(err < 5e-3, "relative rate error {err}");
    for f in ["config.resolved", "diagnostics.csv", "events.json", "summary.json", "curves.svg", "snap_00000.csv"] {
        assert!(tmp.path().join(f).exists(), "missing {f}");
    }
}

#[test]
fn unknown_key_is_a_config_error_naming_the_key() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_into("muskat-linear", tmp.path(), &["numerics.dT=1e-3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("numerics.dT"), "{}", stderr(&o));

    let bad = tmp.path().join("bad.conf");
    fs::write(&bad, "scenario = muskat-linear\ndT = 0.1\n").unwrap();
    let o = turnwave(&["run", bad.to_str().unwrap(), "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("'dT'"), "{}", stderr(&o));
}

#[test]
fn failed_certificate_exits_with_code_four() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_into("muskat-turning", tmp.path(), &["turning.b=1"]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(stderr(&o).contains("certificate"));
}

#[test]
fn reruns_and_renders_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = run_into("ck-compare", d.path(), &[]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let mut names: Vec<String> =
        fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    for n in &names {
        let (x, y) = (fs::read(a.path().join(n)).unwrap(), fs::read(b.path().join(n)).unwrap());
        if n == "config.resolved" {
            // differs only in output_dir
            let strip = |v: &[u8]| {
                String::from_utf8_lossy(v).lines().filter(|l| !l.starts_with("output_dir")).collect::<Vec<_>>().join("\n")
            };
            assert_eq!(strip(&x), strip(&y));
        } else {
            assert!(x == y, "{n} differs between reruns");
        }
    }
    let before = fs::read(a.path().join("curves.svg")).unwrap();
    let o = turnwave(&["render", a.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(before, fs::read(a.path().join("curves.svg")).unwrap());
}

fn attr(tag: &str, name: &str) -> f64 {
    let key = format!("{name}=\"");
    let rest = &tag[tag.find(&key).unwrap() + key.len()..];
    rest[..rest.find('"').unwrap()].parse().unwrap()
}

#[test]
fn svg_highlight_matches_reported_negative_intervals() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_into("rt-verify", tmp.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("rt_report.json")).unwrap()).unwrap();
    let intervals: Vec<(f64, f64)> = serde_json::from_value(report["negative_intervals"].clone()).unwrap();
    assert!(!intervals.is_empty(), "no negative sigma at the final snapshot");

    let cfg = fs::read_to_string(tmp.path().join("config.resolved")).unwrap();
    let n: f64 = cfg.lines().find_map(|l| l.strip_prefix("grid.n = ")).unwrap().trim().parse().unwrap();
    let cell = 2.0 * std::f64::consts::PI / n;

    let svg = fs::read_to_string(tmp.path().join("curves.svg")).unwrap();
    let marked: Vec<(f64, f64, f64)> = svg
        .lines()
        .filter(|l| l.contains("class=\"rt-negative\""))
        .map(|l| (attr(l, "data-t"), attr(l, "data-alpha-lo"), attr(l, "data-alpha-hi")))
        .collect();
    let t_last = marked.iter().map(|m| m.0).fold(f64::NEG_INFINITY, f64::max);
    let last: Vec<(f64, f64)> = marked.iter().filter(|m| m.0 == t_last).map(|m| (m.1, m.2)).collect();
    assert_eq!(last.len(), intervals.len());
    for (lo, hi) in &intervals {
        let hit = last.iter().any(|(a, b)| (a - lo).abs() <= cell && (b - hi).abs() <= cell);
        assert!(hit, "interval [{lo}, {hi}] has no matching highlight in {last:?}");
    }
}

#[test]
fn verify_accepts_a_fresh_run_and_rejects_a_tampered_one() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_into("rt-verify", tmp.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = turnwave(&["verify", tmp.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}{}", String::from_utf8_lossy(&o.stdout), stderr(&o));

    let p = tmp.path().join("rt_report.json");
    let mut rep: Value = serde_json::from_str(&fs::read_to_string(&p).unwrap()).unwrap();
    rep["min_sigma"] = Value::from(rep["min_sigma"].as_f64().unwrap() + 1.0);
    fs::write(&p, serde_json::to_string_pretty(&rep).unwrap()).unwrap();
    let o = turnwave(&["verify", tmp.path().to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL rt_report reproduces"));

    let o = turnwave(&["verify", tmp.path().join("nope").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
