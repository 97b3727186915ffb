use std::process::{Command, Output};

fn pvc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pvc")).args(args).env("PVC_SEED", "42").output().expect("pvc runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn show_e7star_omega4() {
    let o = pvc(&["show", "--label", "E7star", "--what", "omega"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().any(|l| l == "omega4 = Ginf^2 + Ginf^-2"));
}

#[test]
fn full_json_run_is_byte_identical() {
    let a = pvc(&["verify", "--suite", "all", "--format", "json", "--parallel", "4"]);
    let b = pvc(&["verify", "--suite", "all", "--format", "json", "--parallel", "1"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 42);
    assert!(v["policy_violations"].as_array().unwrap().is_empty());
}

#[test]
fn single_label_subset() {
    let o = pvc(&["verify", "--suite", "shear", "--label", "D5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let checks: Vec<&str> = text.lines().filter(|l| l.starts_with("pass") || l.starts_with("fail")).collect();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|l| l.contains(" shear ") && l.contains(" D5 ")));
}

#[test]
fn text_digest_is_short_and_points_to_json() {
    let o = pvc(&["verify", "--suite", "quantum", "--label", "D8"]);
    let text = stdout(&o);
    let line = text.lines().find(|l| l.starts_with("calibrated")).unwrap();
    let digest = line.split("residual: ").nth(1).unwrap().split("  [json:").next().unwrap();
    assert!(digest.chars().count() <= 120);
    assert!(line.ends_with("[json: quantum/D8/qcubic]"));
}

#[test]
fn strict_policy_is_violated() {
    let dir = std::env::temp_dir().join(format!("pvc-policy-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("strict.policy");
    std::fs::write(&path, "* * * pass\n").unwrap();
    let o = pvc(&["verify", "--suite", "unfolding", "--policy", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("policy violation: unfolding E6 modulo_u_check is calibrated"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(pvc(&["verify", "--suite", "nonsense"]).status.code(), Some(2));
    assert_eq!(pvc(&["verify", "--label", "D9"]).status.code(), Some(2));
    assert_eq!(pvc(&["confluence", "--edge", "D4:E8"]).status.code(), Some(2));
    assert_eq!(pvc(&["mutate", "--label", "D6", "--word", "3"]).status.code(), Some(2));
    let bad_seed = Command::new(env!("CARGO_BIN_EXE_pvc")).args(["verify"]).env("PVC_SEED", "x").output().unwrap();
    assert_eq!(bad_seed.status.code(), Some(2));
}

#[test]
fn mutate_d4_word() {
    let o = pvc(&["mutate", "--label", "D4", "--word", "1,2,3", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["cubic_invariant"], true);
    assert_eq!(v["laurent"]["payload"]["all_exact"], true);
}

#[test]
fn confluence_edge_with_dropped_terms() {
    let o = pvc(&["confluence", "--edge", "D4:D5", "--show-dropped"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("pass confluence D4:D5"));
    assert_eq!(text.lines().filter(|l| l.starts_with("dropped x")).count(), 3);
}
