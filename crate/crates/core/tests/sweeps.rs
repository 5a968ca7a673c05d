use proptest::prelude::*;
use riesz_core::bounds::sharp_constant_diag;
use riesz_core::harness::{
    emit_report, read_csv_records, run_norm_validation, run_sandwich_report, run_witness_sweep, Report, ReportFormat,
    Status, SweepConfig,
};
use riesz_core::kernel::{bilinear_functional, riesz_potential};
use riesz_core::maximal::hedberg_bound;
use riesz_core::radial::lp_norm;
use riesz_core::{Error, ProblemParams, QuadratureSpec, RadialProfile};

fn config(entries: &[(&str, &str)]) -> SweepConfig {
    SweepConfig::from_entries(entries.iter().copied()).unwrap()
}

#[test]
fn csv_report_of_a_sweep_round_trips() {
    let cfg = config(&[("p-grid", "1.5,1.8")]);
    let records = run_norm_validation(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("norms.csv");
    emit_report(&Report::new(&cfg, records.clone()).unwrap(), ReportFormat::Csv, &path).unwrap();
    let back = read_csv_records(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(back, records);
}

#[test]
fn json_report_echoes_free_constants_in_every_record() {
    let cfg = config(&[("p-grid", "1.5"), ("free-const", "c1d=3")]);
    let records = run_norm_validation(&cfg).unwrap();
    let report = Report::new(&cfg, records).unwrap();
    let text = riesz_core::harness::render_report(&report, ReportFormat::Json).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for rec in v["records"].as_array().unwrap() {
        assert_eq!(rec["inputs"]["free.c1d"], "3");
        assert!(rec["inputs"].get("free.thm4_c").is_some());
    }
}

#[test]
fn sandwich_fails_only_where_the_upper_bound_is_below_sharp() {
    let records = run_sandwich_report(&config(&[])).unwrap();
    for r in records.iter().filter(|r| r.name == "sandwich_sharp_le_upper") {
        let alpha: f64 = r.inputs["alpha"].parse().unwrap();
        assert_eq!(r.status == Status::Fail, alpha < 1.0, "{r:?}");
    }
    assert!(records
        .iter()
        .filter(|r| r.name == "sandwich_lower_le_sharp")
        .all(|r| r.status == Status::Pass));
}

#[test]
fn witness_grid_outside_the_open_range_is_a_config_error() {
    let err = run_witness_sweep(&config(&[("p-grid", "1.5,2")])).unwrap_err();
    assert!(matches!(err, Error::Config(_)), "{err}");
}

#[test]
fn witness_records_come_in_fours() {
    let records = run_witness_sweep(&config(&[("p-grid", "1.3,1.6")])).unwrap();
    assert_eq!(records.len(), 8);
    assert!(records.iter().all(|r| r.status == Status::Pass), "{records:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn hedberg_split_dominates_the_potential(r in 0.05f64..20.0, p in 1.1f64..1.9, lambda in 0.3f64..3.0) {
        let params = ProblemParams::new(2, 1.0).unwrap();
        let quad = QuadratureSpec::default().with_rel_tol(1e-8);
        let f = RadialProfile::bump_trial(lambda, &params).unwrap();
        let u = riesz_potential(&f, &params, r, &quad.nested()).unwrap();
        let split = hedberg_bound(&f, p, &params, r, &quad).unwrap();
        prop_assert!(u <= (split.near_part + split.far_part) * (1.0 + 1e-6));
    }

    #[test]
    fn diagonal_ratio_never_exceeds_the_sharp_constant(lambda in 0.2f64..5.0, radius in 0.2f64..5.0) {
        let params = ProblemParams::new(1, 0.5).unwrap();
        let quad = QuadratureSpec::default().with_rel_tol(1e-8);
        let r = 2.0 * params.dim() / (params.dim() + params.alpha());
        let sharp = sharp_constant_diag(&params).unwrap().value;
        for f in [RadialProfile::bump_trial(lambda, &params).unwrap(), RadialProfile::indicator_ball(radius).unwrap()] {
            let norm = lp_norm(&f, r, &params, &quad).unwrap().value;
            let b = bilinear_functional(&f, &f, &params, &quad).unwrap();
            prop_assert!(b / (norm * norm) <= sharp * (1.0 + 1e-6));
        }
    }
}
