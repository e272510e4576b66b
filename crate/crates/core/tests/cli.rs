use std::fs;
use std::process::{Command, Output};

use maxwell_mixed::cli::STUDY_HEADER;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxwell-mixed")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn convergence_study_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t1.csv");
    let out = run(&["--preset", "table1", "--nx", "4,8", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], STUDY_HEADER);
    assert_eq!(lines.len(), 3);
    let first: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(&first[..3], &["4", "200", "5e-3"]);
    assert_eq!(first[4], "");
    let e: f64 = first[3].parse().unwrap();
    assert!((e - 0.0097).abs() < 0.05 * 0.0097, "{e}");
    let order: f64 = lines[2].split(',').nth(4).unwrap().parse().unwrap();
    assert!((order - 0.83).abs() < 0.1);
}

#[test]
fn output_is_reproducible() {
    let args = ["--mode", "temporal-convergence", "--element", "nedelec-q1q0", "--example", "2", "--nt", "4,8"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 3);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "mode = convergence\nnx = 2,4\ndt = 0.25\nexample = 3\n").unwrap();
    let out = run(&["--config", cfg.to_str().unwrap(), "--nx", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().starts_with("2,4,2.5e-1,"));
}

#[test]
fn snapshots_are_written_next_to_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("solve.csv");
    let out = run(&["--nx", "2", "--nt", "4", "--snapshot-every", "2", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let snaps = fs::read_to_string(dir.path().join("solve_snapshots.csv")).unwrap();
    let lines: Vec<&str> = snaps.lines().collect();
    assert_eq!(lines[0], "n,t,x,y,sigma11,sigma22,sigma12,v1,v2");
    // levels 0, 2, 4 on four elements
    assert_eq!(lines.len(), 1 + 3 * 4);
    assert!(lines[1].starts_with("0,0e0,2.5e-1,2.5e-1,"));
}

#[test]
fn stability_mode_reports_energy_balance() {
    let out = run(&["--mode", "stability", "--element", "nedelec-q1q0", "--nt", "20", "--seed", "4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "n,t,energy,dissipation,work,identity_defect,gronwall_bound,within_bound");
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    assert_eq!(rows.len(), 21);
    for r in &rows {
        assert!(r[5].parse::<f64>().unwrap() <= 1e-10);
        assert_eq!(r[7], "true");
    }
}

#[test]
fn infsup_mode() {
    let out = run(&["--mode", "infsup", "--nx", "2,4"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().next(), Some("N,beta_h"));
    let out = run(&["--mode", "infsup", "--nx", "16"]);
    assert!(!out.status.success());
}

#[test]
fn residual_gate_blocks_inconsistent_material() {
    let out = run(&["--mu", "2", "--nx", "2", "--nt", "2"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error: ") && err.contains("--force"), "{err}");
    let out = run(&["--mu", "2", "--nx", "2", "--nt", "2", "--force"]);
    assert!(out.status.success());
}

#[test]
fn invalid_settings_fail_with_a_diagnostic() {
    for args in [
        &["--preset", "table5"][..],
        &["--element", "bogus"],
        &["--dt", "0.3"],
        &["--mode", "temporal-convergence", "--nt", "3,5"],
        &["--example", "9"],
    ] {
        let out = run(args);
        assert!(!out.status.success(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}
