use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isingff"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("spawn isingff")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn singular_vector_line() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["voa-singular", "--level", "4"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("sign=-1: zero vector; sign=+1: 3·ψ_{-5/2}|0>"), "{}", stdout(&o));
    for f in ["singular.csv", "summary.txt", "config.txt"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn lattice_verify_agrees_with_enumeration() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["lattice-verify", "--m", "2", "--n", "2", "--beta", "0.4"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let csv = std::fs::read_to_string(dir.path().join("lattice_verify.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("partition_function,") && l.ends_with(",pass")), "{csv}");
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["voa-singular", "--bogus", "1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(run(&["no-such-command"], dir.path()).status.code(), Some(2));
    // truncation below 5/2
    assert_eq!(run(&["voa-singular", "--level", "1"], dir.path()).status.code(), Some(2));
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "kappa = 4\n").unwrap();
    let o = run(&["sle-generator", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    std::fs::write(&cfg, "unknown_key = 1\n").unwrap();
    let o = run(&["voa-singular", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn help_exits_zero() {
    let o = Command::new(env!("CARGO_BIN_EXE_isingff")).arg("--help").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("sle-martingale"));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# small run\nkappa = 3\npaths = 1000\nt_max = 0.05\ndt = 1e-3\nseed = 9 # overridden\n").unwrap();
    let out = dir.path().join("out");
    let o = run(&["sle-generator", "--config", cfg.to_str().unwrap(), "--seed", "5"], &out);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let echo = std::fs::read_to_string(out.join("config.txt")).unwrap();
    assert!(echo.contains("paths = 1000\n") && echo.contains("seed = 5\n") && echo.contains("t_max = 0.05\n"), "{echo}");
    // the echo reproduces the run
    let again = dir.path().join("again");
    let o2 = run(&["sle-generator", "--config", out.join("config.txt").to_str().unwrap()], &again);
    assert_eq!(o2.status.code(), Some(0));
    assert_eq!(
        std::fs::read(out.join("generator.csv")).unwrap(),
        std::fs::read(again.join("generator.csv")).unwrap()
    );
}

#[test]
fn martingale_csv_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sle-martingale", "--paths", "1000", "--dt", "1e-4", "--t-max", "0.1", "--localize", "0.1", "--seed", "7"];
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let o = run(&args, &a);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    run(&args, &b);
    let ca = std::fs::read(a.join("martingale.csv")).unwrap();
    assert_eq!(ca, std::fs::read(b.join("martingale.csv")).unwrap());
    let text = String::from_utf8(ca).unwrap();
    assert!(text.starts_with("path_count,t,obs_mean,obs_se,z_score,swallowed_frac"));
    assert_eq!(text.lines().count(), 1 + 1 + 5);
    assert!(a.join("plot.gp").exists());
}

#[test]
fn excessive_swallowing_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["sle-martingale", "--paths", "1000", "--dt", "1e-3", "--t-max", "0.1", "--swallow-eps", "0.5"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
}

#[test]
fn shifted_vacuum_fails_commutators() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["voa-commutators", "--level", "4"], dir.path()).status.code(), Some(0));
    let o = run(&["voa-commutators", "--level", "4", "--a0", "1/16"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("max deviation = "));
}

#[test]
fn cft_subcommands_pass() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["cft-ward", "--chart", "strip", "--n", "1"],
        vec!["cft-ward", "--chart", "identity", "--z", "0.1+2i", "--ws", "i,0.5+0.5i"],
        vec!["cft-nullfield", "--configs", "6"],
        vec!["cft-ope", "--chart", "moebius", "--pair", "T_psi"],
        vec!["sle-pde", "--xs", "-1,0.5"],
    ] {
        let o = run(&args, dir.path());
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stdout(&o));
    }
    assert_eq!(run(&["cft-ward", "--n", "3"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["cft-ope", "--pair", "psi_T"], dir.path()).status.code(), Some(2));
}
