use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn rabi(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rabi"))
        .args(args)
        .arg("--output-dir")
        .arg(out)
        .output()
        .expect("run rabi")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn meta(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("meta.json")).unwrap()).unwrap()
}

fn csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn column(rows: &[Vec<String>], i: usize) -> Vec<f64> {
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn levels_default_grid() {
    let dir = tempfile::tempdir().unwrap();
    let o = rabi(&["levels"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = csv(&dir.path().join("levels.csv"));
    assert_eq!(header[..7], ["g", "E0", "E1", "E2", "E3", "E4", "E5"]);
    assert_eq!(rows.len(), 151);
    let first: Vec<f64> = rows[0][1..7].iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(first, [-0.5, 0.5, 0.5, 1.5, 1.5, 2.5]);
    assert_eq!(rows[0][7], "+");
    let (_, np) = csv(&dir.path().join("nphoton.csv"));
    assert_eq!(np.len(), 151);
    assert_eq!(meta(dir.path())["command"], "levels");
}

#[test]
fn outputs_are_byte_identical_across_runs_and_thread_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["sweep", "--g-min", "0", "--g-max", "2", "--g-step", "0.25"];
    assert_eq!(code(&rabi(&[&args[..], &["--jobs", "1"]].concat(), a.path())), 0);
    assert_eq!(code(&rabi(&[&args[..], &["--jobs", "4"]].concat(), b.path())), 0);
    let read = |d: &Path| fs::read(d.join("sweep.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));

    let c = tempfile::tempdir().unwrap();
    let d = tempfile::tempdir().unwrap();
    for dir in [&c, &d] {
        assert_eq!(code(&rabi(&["levels", "--g-max", "1"], dir.path())), 0);
    }
    for name in ["levels.csv", "nphoton.csv"] {
        assert_eq!(
            fs::read(c.path().join(name)).unwrap(),
            fs::read(d.path().join(name)).unwrap()
        );
    }
}

#[test]
fn metadata_round_trips_into_a_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = rabi(
        &["spectrum", "--g", "0.3", "--kappa", "0.05", "--n-tr", "30"],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let m = meta(dir.path());
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(m["config"]["model"]["g"], 0.3);
    let cfg_path = dir.path().join("resolved.json");
    fs::write(&cfg_path, serde_json::to_string(&m["config"]).unwrap()).unwrap();

    let again = tempfile::tempdir().unwrap();
    let o = rabi(&["spectrum", "--config", cfg_path.to_str().unwrap()], again.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let m2 = meta(again.path());
    let mut c1 = m["config"].clone();
    let mut c2 = m2["config"].clone();
    c1["output_dir"] = Value::Null;
    c2["output_dir"] = Value::Null;
    assert_eq!(c1, c2);
    assert_eq!(
        fs::read(dir.path().join("spectrum.csv")).unwrap(),
        fs::read(again.path().join("spectrum.csv")).unwrap()
    );
}

#[test]
fn spectrum_peaks() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&rabi(&["spectrum", "--g", "0.8"], dir.path())), 0);
    let peaks: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("peaks.json")).unwrap()).unwrap();
    assert_eq!(peaks["peaks"].as_array().unwrap().len(), 3);
    let s: Vec<f64> = peaks["splittings"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert!((s[0] - 1.18).abs() < 0.01 && (s[1] - 0.697).abs() < 0.01, "{s:?}");
    let (header, rows) = csv(&dir.path().join("spectrum.csv"));
    assert_eq!(header, ["nu", "S"]);
    assert_eq!(rows.len(), 4001);

    let zero = tempfile::tempdir().unwrap();
    assert_eq!(code(&rabi(&["spectrum", "--g", "0"], zero.path())), 0);
    let peaks: Value = serde_json::from_str(&fs::read_to_string(zero.path().join("peaks.json")).unwrap()).unwrap();
    let list = peaks["peaks"].as_array().unwrap();
    assert_eq!(list.len(), 1);
    assert!((list[0]["frequency"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let weak = tempfile::tempdir().unwrap();
    assert_eq!(code(&rabi(&["spectrum", "--g", "0.1"], weak.path())), 0);
    let peaks: Value = serde_json::from_str(&fs::read_to_string(weak.path().join("peaks.json")).unwrap()).unwrap();
    let w: Vec<f64> = peaks["peaks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["weight"].as_f64().unwrap())
        .collect();
    assert_eq!(w.len(), 2);
    assert!((w[0] - w[1]).abs() / w[0].max(w[1]) > 0.01);
}

#[test]
fn weak_coupling_dynamics_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = rabi(
        &["dynamics", "--g", "0.02", "--method", "exact,rwa", "--tau-max", "20"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for m in ["exact", "rwa"] {
        let (header, rows) = csv(&dir.path().join(format!("dynamics_{m}.csv")));
        assert_eq!(header, ["tau", "P"]);
        assert_eq!(rows.len(), 1001);
        assert!((column(&rows, 1)[0] + 1.0).abs() < 1e-12);
    }
    let m = meta(dir.path());
    let exact = &m["results"]["methods"]["exact"];
    assert!((exact["captured_norm"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert!(exact["energy_drift"].as_f64().unwrap() < 1e-8 * exact["spectral_width"].as_f64().unwrap());
}

#[test]
fn strong_coupling_dynamics_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let step = (2.0 * std::f64::consts::PI / 200.0).to_string();
    let end = (8.0 * std::f64::consts::PI).to_string();
    let o = rabi(
        &[
            "dynamics",
            "--g",
            "2",
            "--axis",
            "omega-t",
            "--tau-max",
            &end,
            "--t-step",
            &step,
            "--method",
            "exact,perturbative",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rms = meta(dir.path())["results"]["comparisons"]["perturbative"]["rms_vs_exact"]
        .as_f64()
        .unwrap();
    assert!(rms < 0.1, "{rms}");
    let (header, _) = csv(&dir.path().join("dynamics_perturbative.csv"));
    assert_eq!(header, ["omega_t", "P"]);
}

#[test]
fn revival_contrast_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let o = rabi(
        &["dynamics", "--g", "0.5", "--method", "exact", "--tau-max", "50"],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let c = &meta(dir.path())["results"]["methods"]["exact"]["revival_contrast"];
    assert!(c.as_f64().unwrap() > 1.0, "{c}");
}

#[test]
fn verify_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    let o = rabi(&["verify", "--g", "0.8"], dir.path());
    assert_eq!(code(&o), 0);
    let r = &meta(dir.path())["results"];
    assert_eq!(r["pass"], true);
    assert!(r["max_abs_diff"].as_f64().unwrap() < 1e-7);
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS"));

    let zero = tempfile::tempdir().unwrap();
    assert_eq!(code(&rabi(&["verify", "--g", "0"], zero.path())), 0);
    assert_eq!(meta(zero.path())["results"]["max_abs_diff"], 0.0);

    let under = tempfile::tempdir().unwrap();
    let o = rabi(&["verify", "--g", "2", "--n-tr", "3"], under.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("raise n_tr"));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&rabi(&["levels", "--no-such-flag"], dir.path())), 1);
    assert_eq!(code(&rabi(&["spectrum", "--kappa", "-1"], dir.path())), 1);
    assert_eq!(
        code(&rabi(&["levels", "--config", "/nonexistent/run.json"], dir.path())),
        1
    );
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"model": {"q": 1}}"#).unwrap();
    assert_eq!(
        code(&rabi(&["levels", "--config", bad.to_str().unwrap()], dir.path())),
        1
    );
    let o = rabi(
        &["dynamics", "--g", "2", "--fixed-n-tr", "--method", "exact"],
        dir.path(),
    );
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("raise n_tr to at least"));
    assert_eq!(
        code(&rabi(&["dynamics", "--g", "0", "--method", "exact"], dir.path())),
        1
    );
}

#[test]
fn json_format() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&rabi(&["levels", "--g-list", "0,1", "--format", "json"], dir.path())),
        0
    );
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("levels.json")).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    assert_eq!(v["columns"][0], "g");
    assert!(!dir.path().join("levels.csv").exists());
}
