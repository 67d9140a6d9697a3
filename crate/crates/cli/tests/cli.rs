use std::process::{Command, Output};

fn harness(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adi-harness")).args(args).output().unwrap()
}

#[test]
fn converge_writes_csv_to_stdout() {
    let out = harness(&["converge", "--dim", "2", "--jmax", "3", "--method", "douglas"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "method,m,kappa,j,tau,N,error_linf,order");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("douglas,2,0,2,2.5e-1,3,"));
    assert!(lines[2].starts_with("douglas,2,0,3,1.25e-1,7,"));
}

#[test]
fn converge_output_file_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = harness(&["converge", "--dim", "2", "--kappa", "1", "--jmax", "4", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    assert_eq!(String::from_utf8(ta).unwrap().lines().count(), 1 + 3 * 3);
}

#[test]
fn flags_override_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("study.cfg");
    std::fs::write(&cfg, "# manifest\ndim = 4\nkappa = 1\njmax = 3\nmethod = amfw1\n").unwrap();
    let out = harness(&["converge", "--config", cfg.to_str().unwrap(), "--dim", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.starts_with("amfw1,2,1,")));
}

#[test]
fn configuration_errors_exit_with_two() {
    for args in [
        vec!["converge", "--dim", "7"],
        vec!["converge", "--method", "euler"],
        vec!["converge", "--coeffs", "var3d", "--dim", "2"],
        vec!["converge", "--dim", "3", "--jmax", "6"],
        vec!["converge", "--theta", "abc"],
        vec!["converge", "--config", "/nonexistent/study.cfg"],
        vec!["converge", "--bogus"],
        vec!["integrate"],
    ] {
        let out = harness(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn eigen_suite_passes() {
    let out = harness(&["eigen"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("suite,config,measured,bound,pass\n"));
    assert!(!text.contains(",false"));
}

#[test]
fn sector_suite_passes() {
    let out = harness(&["sector", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("hv-origin"));
    assert!(text.contains(",diag"));
}

#[test]
fn help_exits_cleanly() {
    let out = harness(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("converge"));
}
