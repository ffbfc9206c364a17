//! Values computed independently (scipy / mpmath) and frozen in data/oracles.json.

use serde_json::Value;
use threshold_lab::decomposition::{hypercontractive_sigma, wolff_sigma};
use threshold_lab::families::plurality;
use threshold_lab::qfun::{expectation, MeasurePath};
use threshold_lab::threshold::{scan_path, threshold_window, Method};
use threshold_lab::TieBreak;

fn oracles() -> Value {
    serde_json::from_str(include_str!("data/oracles.json")).unwrap()
}

#[test]
fn two_point_sigma() {
    for (alpha, want) in oracles()["wolff_sigma"].as_object().unwrap() {
        let got = wolff_sigma(alpha.parse().unwrap()).unwrap();
        assert!((got - want.as_f64().unwrap()).abs() < 1e-12, "alpha {alpha}: {got}");
    }
    assert_eq!(hypercontractive_sigma(0.5).unwrap(), 1.0 / 24.0);
}

#[test]
fn majority_of_three_curve() {
    let f = plurality(2, 3, TieBreak::FirstOccurrence).unwrap().indicator(0).unwrap();
    let path = MeasurePath::uniform_base(2, 0).unwrap();
    for (t, want) in oracles()["majority3_G"].as_object().unwrap() {
        let got = expectation(&f, &path.at(t.parse().unwrap())).unwrap();
        assert!((got - want.as_f64().unwrap()).abs() < 1e-14, "t {t}: {got}");
    }
}

#[test]
fn plurality_window_endpoints() {
    let o = oracles();
    for n in [9usize, 81] {
        let want = &o["plurality_q2_windows_eps_0_1"][n.to_string()];
        let f = plurality(2, n, TieBreak::FirstOccurrence).unwrap();
        let base = MeasurePath::uniform_base(2, 0).unwrap().base().clone();
        let curve = scan_path(&f, 0, &base, 101, Method::Exact).unwrap();
        let w = threshold_window(&curve, 0.1, &f).unwrap();
        assert!((w.t_lo - want["t_lo"].as_f64().unwrap()).abs() < 1e-5, "n {n}");
        assert!((w.t_hi - want["t_hi"].as_f64().unwrap()).abs() < 1e-5, "n {n}");
    }
}
