use proptest::prelude::*;
use threshold_lab::decomposition::{efron_stein, lp_norm, noise_operator};
use threshold_lab::families::{dictator, plurality, recursive_plurality};
use threshold_lab::io::{from_json_with_schema, with_schema, FUNCTION_SCHEMA};
use threshold_lab::qfun::{conditional_expectation, expectation, prob_value, value_distribution};
use threshold_lab::structure::check_fair;
use threshold_lab::{ProductMeasure, QaryFunction, TieBreak};

const TOL: f64 = 1e-9;

fn instance() -> impl Strategy<Value = (QaryFunction, ProductMeasure)> {
    (2usize..=3, 1usize..=4).prop_flat_map(|(q, n)| {
        let len = q.pow(n as u32);
        (prop::collection::vec(-1.0f64..1.0, len), prop::collection::vec(0.05f64..1.0, q)).prop_map(
            move |(table, weights)| {
                (QaryFunction::from_reals(q, n, table).unwrap(), ProductMeasure::from_weights(&weights).unwrap())
            },
        )
    })
}

fn max_diff(a: &QaryFunction, b: &QaryFunction) -> f64 {
    a.reals().unwrap().iter().zip(b.reals().unwrap().iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn subset(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decomposition_reconstructs_and_is_orthogonal((f, mu) in instance()) {
        let d = efron_stein(&f, &mu).unwrap();
        prop_assert!(max_diff(&d.reconstruct(), &f) <= TOL);
        for s in d.masks() {
            for t in d.masks().filter(|&t| t > s) {
                let inner = QaryFunction::from_reals(
                    f.q(),
                    f.n(),
                    d.component(s).iter().zip(d.component(t)).map(|(x, y)| x * y).collect(),
                )
                .unwrap();
                prop_assert!(expectation(&inner, &mu).unwrap().abs() <= TOL);
            }
        }
        let parseval: f64 = d.masks().skip(1).map(|s| d.component_sq_norm(s)).sum();
        prop_assert!((d.variance() - parseval).abs() <= TOL);
    }

    #[test]
    fn decomposition_is_linear((f, mu) in instance(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let g = QaryFunction::from_reals(f.q(), f.n(), f.reals().unwrap().iter().map(|v| v * v - 0.3).collect()).unwrap();
        let combo = f.linear_combination(a, &g, b).unwrap();
        let (df, dg, dc) = (efron_stein(&f, &mu).unwrap(), efron_stein(&g, &mu).unwrap(), efron_stein(&combo, &mu).unwrap());
        for s in df.masks() {
            for ((x, y), z) in df.component(s).iter().zip(dg.component(s)).zip(dc.component(s)) {
                prop_assert!((a * x + b * y - z).abs() <= TOL);
            }
        }
    }

    #[test]
    fn conditional_expectation_tower_and_idempotence((f, mu) in instance(), a in 0u32..16, b in 0u32..16) {
        let n = f.n();
        let (sa, sb) = (subset(a, n), subset(b, n));
        let both = subset(a & b, n);
        let ea = conditional_expectation(&f, &mu, &sa).unwrap();
        let tower = conditional_expectation(&ea, &mu, &sb).unwrap();
        prop_assert!(max_diff(&tower, &conditional_expectation(&f, &mu, &both).unwrap()) <= TOL);
        prop_assert!(max_diff(&conditional_expectation(&ea, &mu, &sa).unwrap(), &ea) <= TOL);
        prop_assert!((expectation(&ea, &mu).unwrap() - expectation(&f, &mu).unwrap()).abs() <= TOL);
    }

    #[test]
    fn noise_operator_contracts((f, mu) in instance(), theta in 0.0f64..=1.0) {
        let d = efron_stein(&f, &mu).unwrap();
        let smoothed = noise_operator(&d, theta).unwrap();
        prop_assert!(lp_norm(&smoothed, &mu, 2.0).unwrap() <= lp_norm(&f, &mu, 2.0).unwrap() + TOL);
        prop_assert!(max_diff(&noise_operator(&d, 1.0).unwrap(), &f) <= TOL);
        let mean = expectation(&f, &mu).unwrap();
        prop_assert!(noise_operator(&d, 0.0).unwrap().reals().unwrap().iter().all(|v| (v - mean).abs() <= TOL));
    }

    #[test]
    fn value_probabilities_sum_to_one(q in 2usize..=4, n in 1usize..=5, seed in any::<u64>(), weights in prop::collection::vec(0.0f64..1.0, 4)) {
        prop_assume!(weights[..q].iter().sum::<f64>() > 0.0);
        let mu = ProductMeasure::from_weights(&weights[..q]).unwrap();
        let f = QaryFunction::tabulate_symbols(q, n, q, |x| {
            (x.iter().fold(seed, |h, &s| h.wrapping_mul(31).wrapping_add(s as u64 + 7)) % q as u64) as u32
        })
        .unwrap();
        let total: f64 = (0..q as u32).map(|a| prob_value(&f, &mu, a).unwrap()).sum();
        prop_assert!((total - 1.0).abs() <= TOL);
        let dist = value_distribution(&f, &mu).unwrap();
        prop_assert!((dist.iter().sum::<f64>() - 1.0).abs() <= TOL);
    }

    #[test]
    fn fair_functions_are_balanced_at_uniform(q in 2usize..=3, n in 1usize..=5, pick in 0usize..3) {
        let f = match pick {
            0 => plurality(q, n, TieBreak::FirstOccurrence).unwrap(),
            1 => dictator(q, n, n - 1).unwrap(),
            _ => recursive_plurality(q, 3, 1 + n % 2, TieBreak::FirstOccurrence).unwrap(),
        };
        prop_assert!(check_fair(&f.tabulate().unwrap()).unwrap().pass);
        let mu = ProductMeasure::uniform(q);
        for a in 0..q as u32 {
            prop_assert!((prob_value(&f, &mu, a).unwrap() - 1.0 / q as f64).abs() <= TOL);
        }
    }

    #[test]
    fn function_files_round_trip((f, _mu) in instance()) {
        let text = serde_json::to_string(&with_schema(FUNCTION_SCHEMA, &f).unwrap()).unwrap();
        let back: QaryFunction = from_json_with_schema(&text, FUNCTION_SCHEMA).unwrap();
        prop_assert_eq!(back, f);
    }
}
