use std::process::Command;

fn uavsim() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_uavsim"));
    cmd.env_remove(uavsim::OUTPUT_DIR_ENV);
    cmd
}

#[test]
fn version_flag() {
    let out = uavsim().arg("--version").output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let good = tmp.path().join("good.toml");
    std::fs::write(&good, "[learning]\nepisodes = 20\n").unwrap();
    let bad = tmp.path().join("bad.toml");
    std::fs::write(&bad, "[learning]\nalpha = 1.5\n").unwrap();

    let ok = uavsim()
        .args(["run", "--config"])
        .arg(&good)
        .args(["--algo", "q", "--seed", "3", "--out"])
        .arg(tmp.path().join("out"))
        .output()
        .unwrap()
        .status;
    assert_eq!(ok.code(), Some(0));
    assert!(tmp.path().join("out/qlearning/seed_3/metrics.csv").exists());

    let config_error = uavsim().args(["run", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(config_error.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&config_error.stderr).contains("learning.alpha"));

    let missing = uavsim()
        .args(["run", "--config"])
        .arg(tmp.path().join("none.toml"))
        .output()
        .unwrap()
        .status;
    assert_eq!(missing.code(), Some(1));

    let blocker = tmp.path().join("blocker");
    std::fs::write(&blocker, "").unwrap();
    let runtime = uavsim()
        .args(["run", "--config"])
        .arg(&good)
        .arg("--out")
        .arg(blocker.join("x"))
        .output()
        .unwrap()
        .status;
    assert_eq!(runtime.code(), Some(2));
}

#[test]
fn output_dir_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let good = tmp.path().join("c.toml");
    std::fs::write(&good, "[learning]\nepisodes = 10\n").unwrap();
    let status = uavsim()
        .env(uavsim::OUTPUT_DIR_ENV, tmp.path().join("env_out"))
        .args(["run", "--algo", "vi", "--config"])
        .arg(&good)
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    assert!(tmp.path().join("env_out/manifest.csv").exists());
}

#[test]
fn probe_and_compare() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.toml");
    std::fs::write(
        &cfg,
        "seeds = [0, 1]\n[learning]\nepisodes = 40\n[probe]\nresolution = 21\n",
    )
    .unwrap();
    let probe = uavsim()
        .args(["probe", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path().join("p"))
        .output()
        .unwrap()
        .status;
    assert!(probe.success());
    assert!(tmp.path().join("p/objective_field.csv").exists());

    let run = uavsim()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path().join("r"))
        .output()
        .unwrap()
        .status;
    assert!(run.success());
    let cmp = uavsim()
        .args(["compare", "--out"])
        .arg(tmp.path().join("c"))
        .arg(tmp.path().join("r/manifest.csv"))
        .output()
        .unwrap()
        .status;
    assert!(cmp.success());
    let table = std::fs::read_to_string(tmp.path().join("c/comparison.csv")).unwrap();
    assert_eq!(table.lines().count(), 4);

    let lone = uavsim()
        .args(["compare", "--out"])
        .arg(tmp.path().join("c2"))
        .arg(tmp.path().join("p/manifest.csv"))
        .output()
        .unwrap()
        .status;
    assert_eq!(lone.code(), Some(2));
}
