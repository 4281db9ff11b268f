use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_toric-mirror"))
}

fn fan(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/fans").join(name)
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("toric-mirror-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn writes_matching_text_and_json() {
    let json = scratch("inertia.json");
    let out = bin().args(["inertia"]).arg(fan("p12.fan")).arg("--json").arg(&json).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["command"], "inertia");
    let digest = report["input_digest"].as_str().unwrap();
    assert!(text.starts_with(&format!("inertia (input {})", &digest[..12])));
}

#[test]
fn overrides_are_applied() {
    let json = scratch("p1.json");
    let out = bin().arg("validate").arg(fan("p1.fan")).args(["--profile", "yord=0,qdeg=1", "--chi", "3", "--json"]).arg(&json).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let profile = report["results"]["profile"].as_str().unwrap_or_default();
    assert!(profile.contains("qdeg=1") && profile.contains("yord=0"), "{}", report["results"]);
}

#[test]
fn exit_codes() {
    let bad = scratch("bad.fan");
    std::fs::write(&bad, "rank = 1\nray = 1\nray = -1\ncone = 1 2\n").unwrap();
    let out = bin().arg("validate").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    let out = bin().arg("mirror").arg(fan("p1.fan")).args(["--chi", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));

    let out = bin().arg("checks").arg(fan("p1.fan")).args(["--sigma0", "7"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
