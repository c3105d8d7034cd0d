//! Shared by the golden and acceptance targets.
#![allow(dead_code)]

use std::path::PathBuf;

use prefbandit::harness::{report_inputs, ExperimentConfig};
use prefbandit::theory::{bound_constants, bound_report, general_ps_bound, theorem1_n0, two_action_n0, ReportInputs};
use serde_json::{json, Map, Value};

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn cases() -> Vec<(&'static str, ExperimentConfig)> {
    let base = ExperimentConfig::default();
    vec![
        ("default", base.clone()),
        ("beta_1", ExperimentConfig { true_beta: 1.0, ..base.clone() }),
        ("beta_50", ExperimentConfig { true_beta: 50.0, ..base.clone() }),
        ("n_200", ExperimentConfig { n: 200, ..base.clone() }),
        ("exact_rater", ExperimentConfig { true_lambda: f64::INFINITY, ..base.clone() }),
        ("k5_d2", ExperimentConfig { k: 5, d: 2, base_seed: 3, ..base }),
    ]
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

fn vector(v: &nalgebra::DVector<f64>) -> Value {
    Value::Array(v.iter().map(|&x| json!(x)).collect())
}

fn dump(inp: &ReportInputs) -> Value {
    let cov = inp.prior.covariance();
    let rows: Vec<Value> = (0..cov.nrows()).map(|i| Value::Array((0..cov.ncols()).map(|j| json!(cov[(i, j)])).collect())).collect();
    json!({
        "actions": inp.actions.iter().map(vector).collect::<Vec<_>>(),
        "prior_mean": vector(inp.prior.mean()),
        "prior_cov": rows,
        "theta0": vector(&inp.theta0),
        "N": inp.n,
        "T": inp.horizon,
        "beta": num(inp.beta),
        "lambda": num(inp.lambda),
        "eps": inp.eps,
        "mu_min": inp.mu_min,
        "pair": [inp.actions.len(), 0],
    })
}

pub fn all_inputs() -> Value {
    let mut m = Map::new();
    for (name, cfg) in cases() {
        let inp = report_inputs(&cfg).unwrap();
        let mut v = dump(&inp);
        let r = bound_report(&inp);
        v["pair"] = json!([r.two_action_pair.0, r.two_action_pair.1]);
        v["c1"] = json!(r.c1);
        m.insert(name.into(), v);
    }
    m.insert("general_ps".into(), json!({"E": 3.0, "eps": 0.1, "K": 10, "T": 300, "C1": 2.0}));
    Value::Object(m)
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).unwrap();
    s.push('\n');
    s
}

fn close(name: &str, got: f64, want: f64) -> Result<(), String> {
    let rel = (got - want).abs() / want.abs().max(f64::MIN_POSITIVE);
    if rel <= 1e-10 {
        Ok(())
    } else {
        Err(format!("{name}: got {got:e}, oracle {want:e}, rel {rel:e}"))
    }
}

/// Compares every quantity with the frozen oracle values at 1e-10 relative;
/// returns how many were checked.
pub fn compare_with_oracle() -> Result<usize, String> {
    let text = std::fs::read_to_string(golden_dir().join("theory_expected.json")).map_err(|e| e.to_string())?;
    let expected: Value = serde_json::from_str(&text).unwrap();
    let want = |case: &str, key: &str| -> f64 { expected[case][key].as_str().unwrap().parse().unwrap() };
    let mut checked = 0;
    for (name, cfg) in cases() {
        let inp = report_inputs(&cfg).unwrap();
        let k = inp.actions.len();
        let c = bound_constants(inp.n, k, inp.horizon, inp.beta, inp.lambda, inp.actions.dim(), inp.mu_min).unwrap();
        let report = bound_report(&inp);
        let (i, j) = report.two_action_pair;
        let two = two_action_n0(inp.actions.get(i), inp.actions.get(j), &inp.prior, &inp.theta0, inp.beta, inp.eps).unwrap();
        let (n0, k_max) = theorem1_n0(&inp.actions, &inp.prior, &inp.theta0, inp.beta, inp.eps, inp.mu_min).unwrap();
        let values = [
            ("delta", c.delta),
            ("alpha1", c.alpha1),
            ("alpha2", c.alpha2),
            ("f1_tilde", c.f1_tilde),
            ("f1", c.f1),
            ("f2", c.f2),
            ("appendix_variant_f2", c.appendix_variant_f2),
            ("two_action_n0", two),
            ("theorem1_n0", n0),
            ("k_max", k_max),
            ("general_ps_bound", report.general_ps_bound.clone().unwrap()),
            ("warmpref_bound", report.warmpref_bound.clone().unwrap()),
        ];
        for (key, got) in values {
            if key == "alpha2" && inp.lambda.is_infinite() {
                assert_eq!(got, 0.0);
                continue;
            }
            close(&format!("{name}.{key}"), got, want(name, key))?;
            checked += 1;
        }
    }
    let g = general_ps_bound(3.0, 0.1, 10, 300, 2.0).unwrap();
    close("general_ps", g, want("general_ps", "value"))?;
    Ok(checked + 1)
}
