//! Harness behaviour: registry, output layout, determinism, exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use entinflate_cli::config::ExperimentConfig;
use entinflate_cli::output::{read_manifest, sha256_hex, staging_dir};
use entinflate_cli::record::read_csv_file;
use entinflate_cli::registry::{list_experiments, registry, run_experiment};
use entinflate_cli::CliError;

fn bin(args: &[&str], out: Option<&Path>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_entinflate"));
    c.args(args);
    match out {
        Some(p) => c.env("ENTINFLATE_OUT", p),
        None => c.env_remove("ENTINFLATE_OUT"),
    };
    c.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Small settings that still exercise every code path of an entry.
fn tiny(id: &str) -> Vec<(&'static str, &'static str)> {
    let step = ("lambda_step", "0.25");
    let starts = ("starts", "2");
    match id {
        "fig3-ggm-vs-lambda" => vec![("rounds", "2"), step, starts],
        "fig4-critical-vs-z" => vec![("z_lo_deg", "10"), ("z_hi_deg", "40"), ("z_step_deg", "15"), step, starts],
        "fig5-logneg" => vec![("z", "0.5"), ("rounds", "2"), step, starts],
        "fig6-ggm-vs-ein" => vec![("lambdas", "0.5"), ("z_points", "3"), step, starts],
        "fig7-ggm-vs-round" => vec![("z", "0.5"), ("max_rounds", "2"), step, starts],
        "fig8-haar-hist" => vec![("samples", "3"), ("bins", "4"), step, starts],
        "fig9-10-werner-pb" | "fig17-18-werner-eb" => vec![
            ("curve_p", "0.9"),
            ("rounds", "1"),
            ("p_lo", "0.6"),
            ("p_step", "0.2"),
            ("scan_lambda_step", "0.25"),
            step,
            starts,
        ],
        "fig11-ghz-vs-w" => vec![("rounds", "1"), step, starts],
        "fig12-class-hist" => vec![("samples", "3"), ("bins", "4"), step, starts],
        "fig13-scatter" => vec![("samples", "3"), ("z_points", "3"), ("reference_lambda_step", "0.25"), step, starts],
        "fig15-eb-nme" => vec![("z", "0.5"), ("rounds", "2"), step, starts],
        "fig16-pb-vs-eb" => vec![("samples", "3"), ("z_points", "3"), step, starts],
        other => panic!("no tiny settings for {other}"),
    }
}

fn tiny_config(id: &str, out: &Path) -> ExperimentConfig {
    tiny(id)
        .into_iter()
        .fold(ExperimentConfig::new(id, out), |c, (k, v)| c.with_set(k, v))
}

#[test]
fn registry_listing() {
    assert_eq!(list_experiments(None).len(), 13);
    assert_eq!(list_experiments(Some("werner")).len(), 2);
    assert!(list_experiments(Some("zzz")).is_empty());

    let o = bin(&["list"], None);
    assert_eq!(o.status.code(), Some(0));
    let ids: Vec<&str> = registry().iter().map(|e| e.id).collect();
    for id in &ids {
        assert!(stdout(&o).contains(id));
    }
    let o = bin(&["list", "werner"], None);
    assert_eq!(o.status.code(), Some(0));
    let listed = ids.iter().filter(|id| stdout(&o).contains(*id)).count();
    assert_eq!(listed, 2);
    let o = bin(&["list", "zzz"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).trim().is_empty());
}

#[test]
fn every_entry_runs_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for e in registry() {
        let r = run_experiment(&tiny_config(e.id, dir.path())).unwrap_or_else(|err| panic!("{}: {err}", e.id));
        assert_eq!(r.dir, dir.path().join(e.id));
        let m = read_manifest(&r.dir).unwrap();
        assert_eq!(m.status, "complete");
        assert_eq!(m.files.len(), r.tables.len());
        for (f, t) in m.files.iter().zip(&r.tables) {
            let path = r.dir.join(&f.file);
            let bytes = fs::read(&path).unwrap();
            assert_eq!(f.sha256, sha256_hex(&bytes), "{}", f.file);
            assert!(bytes.starts_with(b"# manifest=manifest.json\n"));
            assert_eq!(read_csv_file(&path).unwrap(), t.records, "{}", f.file);
            assert!(!t.records.is_empty(), "{} {}", e.id, f.file);
        }
        // nothing but the listed files and the manifest
        let mut on_disk: Vec<String> = fs::read_dir(&r.dir)
            .unwrap()
            .map(|d| d.unwrap().file_name().into_string().unwrap())
            .collect();
        on_disk.sort();
        let mut listed: Vec<String> = m.files.iter().map(|f| f.file.clone()).collect();
        listed.push("manifest.json".into());
        listed.sort();
        assert_eq!(on_disk, listed);
    }
}

#[test]
fn rerun_is_byte_identical_regardless_of_jobs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let id = "fig8-haar-hist";
    let mut ca = tiny_config(id, a.path());
    ca.seed = 9;
    let mut cb = tiny_config(id, b.path());
    cb.seed = 9;
    cb.jobs = 3;
    let ra = run_experiment(&ca).unwrap();
    let rb = run_experiment(&cb).unwrap();
    for f in &ra.manifest.files {
        let x = fs::read(ra.dir.join(&f.file)).unwrap();
        let y = fs::read(rb.dir.join(&f.file)).unwrap();
        assert_eq!(x, y, "{}", f.file);
    }
    let mut cc = tiny_config(id, b.path());
    cc.seed = 10;
    let rc = run_experiment(&cc).unwrap();
    assert_ne!(rc.tables[0].records, ra.tables[0].records);
}

#[test]
fn failed_run_leaves_no_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let id = "fig15-eb-nme";
    run_experiment(&tiny_config(id, dir.path())).unwrap();
    let before = fs::read(dir.path().join(id).join("manifest.json")).unwrap();
    // z outside the NME range fails inside the computation, after staging
    let bad = tiny_config(id, dir.path()).with_set("z", "0.5,9");
    let err = run_experiment(&bad).unwrap_err();
    assert!(matches!(err, CliError::Compute(_)), "{err}");
    assert!(!staging_dir(dir.path(), id).exists());
    assert_eq!(fs::read(dir.path().join(id).join("manifest.json")).unwrap(), before);

    let fresh = tempfile::tempdir().unwrap();
    assert!(run_experiment(&tiny_config("fig15-eb-nme", fresh.path()).with_set("z", "9")).is_err());
    assert_eq!(fs::read_dir(fresh.path()).unwrap().count(), 0);
}

#[test]
fn usage_errors_stop_before_any_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never");
    let o = bin(&["run", "no-such-experiment"], Some(&out));
    assert_eq!(o.status.code(), Some(2));
    let o = bin(&["run", "fig3-ggm-vs-lambda", "--set", "nope=1"], Some(&out));
    assert_eq!(o.status.code(), Some(2));
    let o = bin(&["run", "fig3-ggm-vs-lambda", "--set", "rounds"], Some(&out));
    assert_eq!(o.status.code(), Some(2));
    let o = bin(&["run", "fig3-ggm-vs-lambda", "--set", "rounds=two"], Some(&out));
    assert_eq!(o.status.code(), Some(2));
    let o = bin(&["frobnicate"], Some(&out));
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn binary_run_uses_the_environment_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["run", "fig11-ghz-vs-w", "--seed", "4"];
    let sets: Vec<String> = tiny("fig11-ghz-vs-w").iter().map(|(k, v)| format!("{k}={v}")).collect();
    for s in &sets {
        args.extend(["--set", s.as_str()]);
    }
    let o = bin(&args, Some(dir.path()));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let m = read_manifest(&dir.path().join("fig11-ghz-vs-w")).unwrap();
    assert_eq!(m.seed, 4);
    assert_eq!(m.parameters["rounds"], "1");
    assert_eq!(m.parameters["lambda_step"], "0.25");
}

#[test]
fn verify_exit_codes_and_negative_control() {
    let o = bin(&["verify", "--only", "2"], None);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS criterion  2"));

    let o = bin(&["verify", "--only", "1", "--tol-scale", "0"], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL criterion  1"));
    assert!(stdout(&o).contains("failed: lambda_c"));

    let o = bin(&["verify", "--only", "12"], None);
    assert_eq!(o.status.code(), Some(2));
}
