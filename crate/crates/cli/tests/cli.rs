use std::fs;
use std::process::Command;

fn cgc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cgc"))
}

#[test]
fn solve_with_builtin_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = cgc()
        .args(["solve", "--seed", "umbilic", "--grid", "17", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("grid.nx = 17\n"));
    assert!(report.contains("summary.pass = true"));
}

#[test]
fn family_with_repeated_lambdas() {
    let dir = tempfile::tempdir().unwrap();
    let copy = dir.path().join("copy.txt");
    let out = cgc()
        .args(["family", "--grid", "17", "--lambda", "1,0", "--lambda", "0,1", "--lambda", "-1,0", "--report"])
        .arg(&copy)
        .arg("--out")
        .arg(dir.path().join("job"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for k in 0..3 {
        assert!(dir.path().join(format!("job/mesh_{k}.obj")).exists());
    }
    assert_eq!(fs::read(&copy).unwrap(), fs::read(dir.path().join("job/report.txt")).unwrap());
}

#[test]
fn failing_threshold_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("job.toml");
    let text = format!(
        "K = -0.75\nN = 17\nr = 0.8\nQ = [[0, 0]]\nbc = \"umbilic\"\ntol.k_spread = 1e-300\nout = {:?}\n",
        dir.path().join("out").display().to_string()
    );
    fs::write(&cfg, text).unwrap();
    let out = cgc().arg("mesh").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("k_spread"));
}

#[test]
fn invalid_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "K = -1.5\nN = 64\nr = 0.8\n").unwrap();
    let out = cgc().arg("solve").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("`K`") && err.contains("`N`"), "{err}");
}

#[test]
fn bad_lambda_is_a_usage_error() {
    let out = cgc().args(["frame", "--lambda", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.txt"), dir.path().join("b.txt"));
    for p in [&a, &b] {
        let out = cgc().arg("verify").arg("--report").arg(p).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let lines = String::from_utf8_lossy(&out.stderr).lines().filter(|l| l.starts_with("PASS")).count();
        assert_eq!(lines, 14);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}
