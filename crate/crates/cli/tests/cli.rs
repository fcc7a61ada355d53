use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn qpm(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpm"))
        .current_dir(dir)
        .env_remove("QPM_DATA_DIR")
        .args(args)
        .output()
        .expect("run qpm")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Data rows (not comments, not the header) of a CSV artifact.
fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn key(out: &str, name: &str) -> f64 {
    out.split_whitespace()
        .find_map(|kv| kv.strip_prefix(&format!("{name}=")))
        .unwrap_or_else(|| panic!("no {name} in {out}"))
        .parse()
        .unwrap()
}

#[test]
fn periodic_design_alternates() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "p.toml", "[design]\nalgorithm = \"periodic\"\ndomains = 50\n");
    let o = qpm(tmp.path(), &["design", "--config", cfg.to_str().unwrap(), "--out", "out"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = rows(&tmp.path().join("out/poling.csv"));
    assert_eq!(r.len(), 50);
    for (j, row) in r.iter().enumerate() {
        assert_eq!(row[2], if j % 2 == 0 { "1" } else { "-1" });
    }
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("out/poling.json")).unwrap()).unwrap();
    assert_eq!(meta["domains"], 50);
    assert_eq!(meta["config"]["design"]["algorithm"], "periodic");
    assert_eq!(meta["version"], env!("CARGO_PKG_VERSION"));
    for name in ["amplitude.csv", "pmf.csv"] {
        assert!(tmp.path().join("out").join(name).is_file());
    }
}

#[test]
fn domain_by_domain_amplitude_tracks_target() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "d.toml", "[design]\nalgorithm = \"domain-by-domain\"\ndomains = 50\n");
    let o = qpm(tmp.path(), &["design", "--config", cfg.to_str().unwrap(), "--out", "out"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let lc = key(&stdout(&o), "coherence_length_m");
    let step = 2.0 * lc / std::f64::consts::PI;
    let r = rows(&tmp.path().join("out/amplitude.csv"));
    assert_eq!(r.len(), 51);
    for row in r.iter().skip(3) {
        let re: f64 = row[2].parse().unwrap();
        let im: f64 = row[3].parse().unwrap();
        let goal: f64 = row[4].parse().unwrap();
        assert!((re - goal).abs() <= 2.0 * step, "{row:?}");
        assert!(im.abs() < 1e-12 * 50.0 * lc);
    }
}

fn assert_config_error(o: &Output, field: &str) {
    assert_eq!(o.status.code(), Some(2), "{}", stderr(o));
    let err = stderr(o);
    let line = err.lines().last().unwrap();
    let v: serde_json::Value = serde_json::from_str(line).unwrap();
    assert_eq!(v["error"]["exit_code"], 2);
    assert_eq!(v["error"]["field"], field, "{line}");
}

#[test]
fn invalid_values_exit_two_naming_the_field() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "bad.toml", "[design]\nsigma_ratio = 0.0\n");
    let o = qpm(tmp.path(), &["design", "--config", cfg.to_str().unwrap()]);
    assert_config_error(&o, "design.sigma_ratio");

    let cfg = write_config(tmp.path(), "unitless.toml", "[process]\npump = 7.91e-7\n");
    let o = qpm(tmp.path(), &["gvm-report", "--config", cfg.to_str().unwrap()]);
    assert_config_error(&o, "process.pump");
    assert!(stderr(&o).contains("unitless"));
}

#[test]
fn missing_poling_file_exits_two() {
    let tmp = TempDir::new().unwrap();
    let o = qpm(tmp.path(), &["purity", "--poling", "nope.csv"]);
    assert_config_error(&o, "poling");
}

#[test]
fn purity_of_reference_periodic_crystal() {
    let tmp = TempDir::new().unwrap();
    let o = qpm(tmp.path(), &["purity", "--out", "out"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("purity="), "{out}");
    let p = key(&out, "purity");
    assert!((p - 0.854).abs() < 0.01, "{p}");
    assert!(key(&out, "bandwidth_rad_s") > 0.0);
    let s = rows(&tmp.path().join("out/schmidt.csv"));
    assert_eq!(s.len(), 100);
    let jsa = fs::read_to_string(tmp.path().join("out/jsa.csv")).unwrap();
    assert!(jsa.contains("# tool: qpm"));
    assert_eq!(jsa.lines().filter(|l| !l.starts_with('#')).count(), 101);
}

#[test]
fn purity_from_exported_file_matches_inline_design() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "b.toml", "[design]\nalgorithm = \"tambasco-blocks\"\n");
    let c = cfg.to_str().unwrap();
    let inline = qpm(tmp.path(), &["purity", "--config", c, "--out", "a"]);
    let export = qpm(tmp.path(), &["export", "--config", c, "--out", "e"]);
    assert!(export.status.success(), "{}", stderr(&export));
    let from_file = qpm(tmp.path(), &["purity", "--config", c, "--out", "b", "--poling", "e/poling.csv"]);
    assert!(inline.status.success() && from_file.status.success());
    // the file holds 12 significant digits
    let (a, b) = (stdout(&inline), stdout(&from_file));
    assert!((key(&a, "purity") - key(&b, "purity")).abs() < 1e-9, "{a} {b}");
    assert!((key(&a, "bandwidth_rad_s") / key(&b, "bandwidth_rad_s") - 1.0).abs() < 1e-3);
}

#[test]
fn export_import_export_is_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "s.toml",
        "[design]\nalgorithm = \"sub-coherence\"\ndomains = 40\nsubdivisions = 7\n",
    );
    let c = cfg.to_str().unwrap();
    for format in ["csv-boundaries", "csv-widths"] {
        let first = qpm(tmp.path(), &["export", "--config", c, "--out", "one", "--format", format]);
        assert!(first.status.success(), "{}", stderr(&first));
        let a = fs::read_to_string(tmp.path().join("one/poling.csv")).unwrap();
        let second = qpm(
            tmp.path(),
            &["export", "--config", c, "--out", "two", "--format", format, "--poling", "one/poling.csv"],
        );
        assert!(second.status.success(), "{}", stderr(&second));
        let third = qpm(
            tmp.path(),
            &["export", "--config", c, "--out", "three", "--format", format, "--poling", "two/poling.csv"],
        );
        assert!(third.status.success());
        let data = |s: &str| s.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n");
        let b = fs::read_to_string(tmp.path().join("two/poling.csv")).unwrap();
        let c3 = fs::read_to_string(tmp.path().join("three/poling.csv")).unwrap();
        assert_eq!(data(&a), data(&b));
        assert_eq!(data(&b), data(&c3));
        assert!(a.contains(&format!("format = \"{format}\"")));
    }
}

#[test]
fn annealed_design_is_byte_reproducible() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "a.toml",
        "seed = 5\n[design]\nalgorithm = \"annealed\"\ndomains = 40\n[anneal]\nmax_iterations = 2000\nrestarts = 2\n[output]\ntrace = true\n",
    );
    let c = cfg.to_str().unwrap();
    for dir in ["r1", "r2"] {
        let o = qpm(tmp.path(), &["design", "--config", c, "--out", dir]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for name in ["poling.csv", "poling.json", "amplitude.csv", "pmf.csv", "anneal_trace.csv"] {
        let a = fs::read(tmp.path().join("r1").join(name)).unwrap();
        let b = fs::read(tmp.path().join("r2").join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
    let o = qpm(tmp.path(), &["design", "--config", c, "--out", "r3", "--seed", "6"]);
    assert!(o.status.success());
    assert_ne!(
        fs::read(tmp.path().join("r1/poling.csv")).unwrap(),
        fs::read(tmp.path().join("r3/poling.csv")).unwrap()
    );
    let trace = rows(&tmp.path().join("r1/anneal_trace.csv"));
    assert!(trace.len() > 1);
}

#[test]
fn sweep_is_independent_of_worker_count() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "sw.toml",
        "[design]\nalgorithm = \"domain-by-domain\"\n[sweep]\nlengths_lc = [40, 60, 80, 120]\n",
    );
    let c = cfg.to_str().unwrap();
    let one = qpm(tmp.path(), &["sweep", "--config", c, "--out", "p1", "--parallel", "1"]);
    let four = qpm(tmp.path(), &["sweep", "--config", c, "--out", "p4", "--parallel", "4"]);
    assert!(one.status.success() && four.status.success(), "{}", stderr(&one));
    assert_eq!(
        fs::read(tmp.path().join("p1/sweep.csv")).unwrap(),
        fs::read(tmp.path().join("p4/sweep.csv")).unwrap()
    );
    assert_eq!(rows(&tmp.path().join("p1/sweep.csv")).len(), 4);
}

#[test]
fn single_length_sweep_matches_purity() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "one.toml",
        "[design]\nalgorithm = \"domain-by-domain\"\ndomains = 60\n[sweep]\nlengths_lc = [60]\n",
    );
    let c = cfg.to_str().unwrap();
    let s = qpm(tmp.path(), &["sweep", "--config", c, "--out", "s"]);
    let p = qpm(tmp.path(), &["purity", "--config", c, "--out", "p"]);
    assert!(s.status.success() && p.status.success());
    assert_eq!(key(&stdout(&s), "purity"), key(&stdout(&p), "purity"));
    assert_eq!(key(&stdout(&s), "bandwidth_rad_s"), key(&stdout(&p), "bandwidth_rad_s"));
}

#[test]
fn sub_coherence_sweep_rises_with_length() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "sc.toml",
        "[design]\nalgorithm = \"sub-coherence\"\n[sweep]\nlengths_lc = [100, 200, 400]\n",
    );
    let o = qpm(tmp.path(), &["sweep", "--config", cfg.to_str().unwrap(), "--out", "o"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = rows(&tmp.path().join("o/sweep.csv"));
    assert_eq!(r.len(), 3);
    let p: Vec<f64> = r.iter().map(|row| row[3].parse().unwrap()).collect();
    assert!(p.windows(2).all(|w| w[1] >= w[0]), "{p:?}");
    assert!(r.iter().all(|row| row[6] == "ok"));
}

#[test]
fn gvm_report_for_ktp() {
    let tmp = TempDir::new().unwrap();
    let o = qpm(tmp.path(), &["gvm-report", "--out", "g"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!((key(&out, "theta_deg") - 45.0).abs() < 0.5, "{out}");
    let lc = key(&out, "coherence_length_m");
    assert!(lc > 20e-6 && lc < 26e-6);
    assert!(tmp.path().join("g/gvm.json").is_file());
}

#[test]
fn data_dir_env_resolves_tables() {
    let tmp = TempDir::new().unwrap();
    let data = tmp.path().join("data");
    fs::create_dir(&data).unwrap();
    fs::write(data.join("ktp-copy.toml"), qpm_core::dispersion::KTP_TABLE).unwrap();
    let cfg = write_config(tmp.path(), "t.toml", "[dispersion]\ntable = \"ktp-copy.toml\"\n");
    let run = |env: Option<&Path>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_qpm"));
        c.current_dir(tmp.path()).env_remove("QPM_DATA_DIR");
        if let Some(d) = env {
            c.env("QPM_DATA_DIR", d);
        }
        c.args(["gvm-report", "--config", cfg.to_str().unwrap(), "--out", "g"]).output().unwrap()
    };
    let ok = run(Some(&data));
    assert!(ok.status.success(), "{}", stderr(&ok));
    let missing = run(Some(&tmp.path().join("elsewhere")));
    assert_config_error(&missing, "dispersion.table");
}

#[test]
fn usage_errors_are_one_json_line() {
    let tmp = TempDir::new().unwrap();
    let o = qpm(tmp.path(), &["sweep", "--parallel", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1);
    let v: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(v["error"]["kind"], "usage");
}

#[test]
fn unwritable_output_is_a_runtime_error() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("blocked"), "").unwrap();
    let o = qpm(tmp.path(), &["gvm-report", "--out", "blocked"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(stderr(&o).trim()).unwrap();
    assert_eq!(v["error"]["exit_code"], 1);
    assert_eq!(v["error"]["kind"], "runtime");
}
