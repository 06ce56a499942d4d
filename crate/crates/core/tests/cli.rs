use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_isogroup"))
}

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

#[test]
fn classify_prints_json() {
    let out = bin().args(["classify", "--n", "4", "--k", "2", "--l", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "InfiniteMultiplicityThm12");
}

#[test]
fn classify_invalid_exits_2() {
    let out = bin().args(["classify", "--n", "3", "--k", "1", "--l", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn analyze_screw_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().arg("analyze").arg(config("screw.json")).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["classification"]["verdict"], "Unknown");
    assert_eq!(report["dimension"]["k_hat"], 1);
    assert_eq!(report["translation_lattice"]["rank"], 0);
    let csv = std::fs::read_to_string(dir.path().join("growth.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "r,N,Lambda,NV,LambdaV");
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn analyze_z2_in_r5() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().arg("analyze").arg(config("z2_in_r5.json")).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    let c = &report["classification"];
    assert_eq!(c["verdict"], "InfiniteMultiplicityThm13");
    let thms: Vec<&str> = c["applicable_theorems"].as_array().unwrap().iter().map(|t| t.as_str().unwrap()).collect();
    assert!(thms.contains(&"Thm12") && thms.contains(&"Thm13"));
}

#[test]
fn malformed_config_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{ \"dim\": 2, ").unwrap();
    let out = bin().arg("analyze").arg(&path).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(4));
    assert!(!dir.path().join("report.json").exists());
}

#[test]
fn conjugation_and_selection_subcommands() {
    let out = bin().arg("conjugation").arg(config("glide.json")).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["index"]["index"], 9);

    let out = bin().arg("select-lines").arg(config("screw_r4.json")).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["block_dims"], serde_json::json!([1, 2]));
    assert!(v["max_inner_product"].as_f64().unwrap() < 1e-9);
}

#[test]
fn growth_subcommand_prints_csv() {
    let out = bin().arg("growth").arg(config("screw.json")).args(["--radii", "8,16"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "r,N,Lambda,NV,LambdaV");
    assert!(rows[1].starts_with("8,17,"));
    assert!(rows[2].starts_with("16,33,"));
}
