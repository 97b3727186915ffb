use pvc_core::suites;
use pvc_core::{catalog, DynkinLabel, Status, Suite, DEFAULT_SEED};

fn non_passing() -> Vec<(String, String, String, Status)> {
    suites::run(&Suite::ALL, &DynkinLabel::ALL, DEFAULT_SEED)
        .unwrap()
        .into_iter()
        .filter(|r| r.status != Status::Pass)
        .map(|r| (r.suite, r.label, r.check, r.status))
        .collect()
}

#[test]
fn frozen_outcome_inventory() {
    let got = non_passing();
    let expect_failures = [
        ("confluence", "D5:D7", "edge"),
        ("confluence", "D6:D8", "edge"),
        ("shear", "D7", "cubic"),
        ("shear", "D8", "cubic"),
    ];
    let failures: Vec<_> = got.iter().filter(|r| r.3 == Status::Fail).map(|r| (r.0.as_str(), r.1.as_str(), r.2.as_str())).collect();
    assert_eq!(failures, expect_failures);

    let calibrated: Vec<_> = got.iter().filter(|r| r.3 == Status::Calibrated).map(|r| format!("{}/{}/{}", r.0, r.1, r.2)).collect();
    let mut expect_calibrated = vec!["dynamics/E6/mutation_1".to_string(), "unfolding/E6/modulo_u_check".to_string()];
    expect_calibrated.extend(DynkinLabel::ALL.iter().map(|l| format!("quantum/{}/qcubic", l.name())));
    expect_calibrated.sort();
    assert_eq!(calibrated, expect_calibrated);
}

#[test]
fn runs_are_reproducible() {
    let a = suites::run(&Suite::ALL, &DynkinLabel::ALL, 11).unwrap();
    let b = suites::run(&Suite::ALL, &DynkinLabel::ALL, 11).unwrap();
    let ja: Vec<_> = a.iter().map(|r| r.to_json().to_string()).collect();
    let jb: Vec<_> = b.iter().map(|r| r.to_json().to_string()).collect();
    assert_eq!(ja, jb);
}

#[test]
fn seed_does_not_change_verdicts() {
    let a = suites::run(&Suite::ALL, &DynkinLabel::ALL, 1).unwrap();
    let b = suites::run(&Suite::ALL, &DynkinLabel::ALL, 2).unwrap();
    let sa: Vec<_> = a.iter().map(|r| (r.key(), r.status)).collect();
    let sb: Vec<_> = b.iter().map(|r| (r.key(), r.status)).collect();
    assert_eq!(sa, sb);
}

#[test]
fn e7star_omega4_display() {
    let spec = catalog::build(DynkinLabel::E7star);
    assert_eq!(spec.omega_display()[3].to_string(), "Ginf^2 + Ginf^-2");
}

#[test]
fn smooth_rows_of_table_one() {
    for l in DynkinLabel::ALL {
        let smooth = matches!(l, DynkinLabel::D7 | DynkinLabel::D8 | DynkinLabel::E8);
        assert_eq!(l.singularity() == "non-singular", smooth, "{l:?}");
    }
}
