use k3gap::certifier::{certify_gap, revalidate, Verdict};
use k3gap::config::{parse_config, Expectation, RunConfig};
use k3gap::exact::{q, qi};
use k3gap::frame::{build_frame, FrameParams};
use k3gap::lattice::{alpha, build_k3_lattice, LatticeVector};
use k3gap::report::run_pipeline;
use k3gap::search::{exclusion_search, Outcome, SearchOptions};
use proptest::prelude::*;
use std::path::Path;
use std::process::Command;

fn config_path(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
}

#[test]
fn shipped_configs_parse() {
    let reference = RunConfig::load(&config_path("reference.cfg")).unwrap();
    assert_eq!(reference.t_list.len(), 5);
    assert_eq!(reference.budget_sq, qi(4));
    assert_eq!(reference.targets[0].expect, Expectation::Impossible);
    assert_eq!(parse_config(&reference.emit()).unwrap(), reference);

    let control = RunConfig::load(&config_path("positive_control.cfg")).unwrap();
    assert_eq!(control.targets.len(), 2);
    assert_eq!(control.budget_sq, q(9, 4));
}

#[test]
fn rejects_inconsistent_period_data() {
    let e = parse_config("sigma = 1, 2, 2\ntau = 2, 1, 2\n").unwrap_err();
    assert!(e.message.contains("sigma.tau"), "{e}");
    let e = parse_config("rho = 1, 0, 0\n").unwrap_err();
    assert!(e.message.contains("rho.sigma"), "{e}");
}

#[test]
fn positive_control_pipeline() {
    let mut cfg = RunConfig::load(&config_path("positive_control.cfg")).unwrap();
    cfg.cache_dir = None;
    let report = run_pipeline(&cfg).unwrap();
    assert!(report.overall.pass);
    let ex = &report.frames[0].exclusions;
    assert_eq!(ex[0].verdict.as_ref().unwrap().outcome, Outcome::Found);
    assert_eq!(ex[1].verdict.as_ref().unwrap().outcome, Outcome::Impossible);
}

#[test]
fn weak_chain_is_reported_not_passed() {
    // Unscaled ρ leaves ω_t·ω_t negative; no certificate can be issued.
    let cfg = parse_config("rho = -2, 2, -1\nt_list = 1/2\n").unwrap();
    let report = run_pipeline(&cfg).unwrap();
    assert!(!report.overall.pass);
    let err = report.frames[0].error.as_deref().unwrap();
    assert!(err.contains("omega_t.omega_t > 0"), "{err}");
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_k3gap"))
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();

    let out = cli()
        .args(["--cache-dir", cache, "roots", "enumerate"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["count"], 240);

    let out = cli().args(["lattice", "check"]).output().unwrap();
    assert!(out.status.success());

    let out = cli()
        .args(["certify", "--t", "1/2", "--norm-floor", "-4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    let out = cli()
        .args([
            "exclude",
            "--target",
            "a1 - a2",
            "--budget-sq",
            "4",
            "--t",
            "1/2",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["outcome"], "impossible");

    let out = cli()
        .args([
            "exclude",
            "--target",
            "a1",
            "--budget-sq",
            "9/4",
            "--expect",
            "impossible",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    let out = cli()
        .args(["donaldson", "--genus", "1", "--euler-normal", "0"])
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["h0_lower_bound"], 1);

    let report = dir.path().join("report.json");
    let out = cli()
        .args([
            "--cache-dir",
            cache,
            "--out",
            report.to_str().unwrap(),
            "run",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&report).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["overall"]["pass"], true);
    assert!(text.find("\n  \"timing\"").unwrap() > text.find("\n  \"overall\"").unwrap());

    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "t_list = 1/2\nbudget = 4\n").unwrap();
    let out = cli()
        .args(["--config", bad.to_str().unwrap(), "run"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:1:"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    /// The gap certificate and the exclusion hold across the whole segment.
    #[test]
    fn certificate_and_exclusion_hold_for_all_t(num in 1i64..60, extra in 1i64..40) {
        let t = q(num, num + extra);
        let lat = build_k3_lattice();
        let f = build_frame(&lat, &FrameParams::reference(t)).unwrap();
        let cert = certify_gap(&lat, &f, -2).unwrap();
        prop_assert_eq!(cert.verdict, Verdict::Pass);
        prop_assert!(revalidate(&lat, &cert).is_ok());
        let target = LatticeVector::combo(&[(alpha(1), 1), (alpha(2), -1)]);
        let v = exclusion_search(&lat, &target, &qi(4), &f, &cert, SearchOptions::default()).unwrap();
        prop_assert_eq!(v.outcome, Outcome::Impossible);
    }
}

#[test]
fn small_rho_multiples_do_not_certify() {
    use k3gap::certifier::CertifyError;
    let lat = build_k3_lattice();
    for (scale, failing) in [(12, "omega_t.omega_t > 0"), (36, "")] {
        let f = build_frame(&lat, &FrameParams::reference_with_rho_scale(scale, q(1, 2))).unwrap();
        match certify_gap(&lat, &f, -2) {
            Err(CertifyError::ChainTooWeak(rec)) => {
                assert!(!rec.holds);
                assert!(rec.name.contains(failing), "scale {scale}: {}", rec.name);
            }
            other => panic!("scale {scale}: expected ChainTooWeak, got {other:?}"),
        }
    }
}

/// With `budget_sq ≤ t²` no part fits, whatever the target.
#[test]
fn budget_below_cheapest_class_excludes_everything() {
    let lat = build_k3_lattice();
    let t = q(1, 2);
    let f = build_frame(&lat, &FrameParams::reference(t.clone())).unwrap();
    let cert = certify_gap(&lat, &f, -2).unwrap();
    let targets = [
        LatticeVector::basis(alpha(0)),
        LatticeVector::basis(alpha(1)),
        LatticeVector::combo(&[(alpha(1), 1), (alpha(2), -1)]),
        LatticeVector::combo(&[(alpha(4), 1), (alpha(5), -1)]),
    ];
    for budget in [&t * &t, q(1, 5), qi(0)] {
        for g in &targets {
            let v =
                exclusion_search(&lat, g, &budget, &f, &cert, SearchOptions::default()).unwrap();
            assert_eq!(v.outcome, Outcome::Impossible, "{} at {budget}", g.ascii());
        }
    }
}
