use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn configs() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwave"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn write_cfg(dir: &Path, body: &str) -> String {
    let p = dir.join("cfg.json");
    fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .filter(|e| e.file_name() != "cfg.json")
        .map(|e| (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap()))
        .collect();
    v.sort();
    v
}

fn twice(args: &[&str]) -> Vec<(String, Vec<u8>)> {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ra = run(args, a.path());
    assert!(ra.status.success(), "{}", String::from_utf8_lossy(&ra.stderr));
    assert!(run(args, b.path()).status.success());
    let (sa, sb) = (snapshot(a.path()), snapshot(b.path()));
    assert!(!sa.is_empty());
    assert_eq!(sa, sb, "outputs differ for {args:?}");
    sa
}

#[test]
fn repeated_runs_are_byte_identical() {
    let g = configs().join("gauss.json");
    let g = g.to_str().unwrap();
    twice(&["--config", g, "verify-oracle"]);
    let files = twice(&["--config", g, "gauss"]);
    let csv = files.iter().find(|(n, _)| n == "gauss_profile.csv").unwrap();
    assert!(String::from_utf8_lossy(&csv.1).starts_with("# qwave"));

    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        r#"{"n_x": 3, "Lx_kx0": 5.0, "eps0": 1.0, "eps_qsvt": 1e-3, "n_y": 5, "shots": 50, "seed": 11}"#,
    );
    twice(&["--config", &cfg, "energy"]);
    twice(&["--config", &cfg, "solve"]);
    let files = twice(&["--config", &cfg, "--seed", "3", "energy"]);
    let json = files.iter().find(|(n, _)| n == "energy.json").unwrap();
    let v: serde_json::Value = serde_json::from_slice(&json.1).unwrap();
    assert!(v["meta"]["config_hash"].is_string());
}

#[test]
fn missing_config_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run(&["solve"], tmp.path()).status.code(), Some(2));
    let cfg = write_cfg(tmp.path(), r#"{"n_x": 3, "eps0": 1.0}"#);
    let o = run(&["--config", &cfg, "solve"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn degree_budget_exits_four() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        r#"{"n_x": 3, "Lx_kx0": 5.0, "eps0": 1.0, "kappa_qsvt": 1e6, "eps_qsvt": 1e-9}"#,
    );
    assert_eq!(run(&["--config", &cfg, "angles"], tmp.path()).status.code(), Some(4));
}
