use std::path::PathBuf;
use std::process::{Command, Output};

fn synthvid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_synthvid")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("synthvid-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(synthvid(&[]).status.code(), Some(2));
    assert_eq!(synthvid(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(synthvid(&["sample-configs"]).status.code(), Some(2), "missing --out");
}

#[test]
fn operation_errors_exit_1() {
    let out = synthvid(&["trajectory", "--config", "/nonexistent/config.json", "--out", "/tmp/x.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn configs_flow_through_caption_and_manifest() {
    let dir = scratch("pipeline");
    let d = |p: &str| dir.join(p).to_string_lossy().into_owned();
    assert!(synthvid(&["sample-configs", "--count", "3", "--seed", "4", "--out", &d("cfgs")]).status.success());
    let configs: Vec<String> = (0..3).map(|i| d(&format!("cfgs/config_{i:05}.json"))).collect();
    for c in &configs {
        assert!(std::path::Path::new(c).exists());
    }

    let mut args = vec!["caption", "--tags", "tags"];
    args.push("--config");
    args.extend(configs.iter().map(String::as_str));
    let syn = d("syn.json");
    args.extend(["--out", &syn]);
    assert!(synthvid(&args).status.success());

    let real = d("real.json");
    std::fs::write(
        &real,
        r#"[{"uri":"real/0","caption":{"text":"a dog","tags":[],"negative_text":"","domain":"Real"},"source":"Real"}]"#,
    )
    .unwrap();
    let run = |out: &str| {
        synthvid(&["build-manifest", "--synthetic", &syn, "--real", &real, "--ratio", "0.5", "--steps", "50", "--seed", "1", "--out", out])
    };
    assert!(run(&d("m1.ndjson")).status.success());
    assert!(run(&d("m2.ndjson")).status.success());
    let m1 = std::fs::read(d("m1.ndjson")).unwrap();
    assert_eq!(m1, std::fs::read(d("m2.ndjson")).unwrap());
    assert_eq!(m1.iter().filter(|&&b| b == b'\n').count(), 50);

    // Tagged captions may not be placed in the real pool.
    let bad = synthvid(&["build-manifest", "--synthetic", &syn, "--real", &syn, "--ratio", "0.5", "--steps", "5", "--out", &d("bad")]);
    assert_eq!(bad.status.code(), Some(1));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn evaluate_reports_oracle_tracks() {
    let dir = scratch("evaluate");
    let scene = concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenes/golden_cube.json");
    let report = dir.join("report.json");
    let out = synthvid(&["evaluate", "--config", scene, "--report", report.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let r = &v["reconstruction"];
    assert!(r["N"].as_u64().unwrap() > 0);
    assert!(r["eps_proj"].as_f64().unwrap() < 1e-6);
    assert_eq!(r["eps_proj"], r["eps_proj_top1000"]);
    let _ = std::fs::remove_dir_all(&dir);
}
