mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rcpp::geometry::{verify, Verdict, VerifyLimits};
use rcpp::oracle::{brute_force_opt, OracleLimits};
use rcpp::patterns::{
    enumerate_patterns, multiset_for, rectangle_container, rectangular_caps, CountVectors,
    EnumerationOptions,
};
use rcpp::pricing::{price_rectangular, reduced_cost, PricingLimits, PricingResult};
use rcpp::solver::{price_and_verify_root, SolveConfig};

/// Best `sum_t lambda_t P_t` over every count vector within the caps.
fn exhaustive_best(inst: &rcpp::Instance, lambda: &[f64]) -> Option<f64> {
    let c = rectangle_container(inst);
    let mut best = 0.0f64;
    for v in CountVectors::new(rectangular_caps(inst)) {
        let value = 1.0 - reduced_cost(&v, lambda);
        if value <= best {
            continue;
        }
        match verify(&c, &multiset_for(inst, &v), &VerifyLimits::default()).0 {
            Verdict::Feasible(_) => best = value,
            Verdict::Infeasible => {}
            Verdict::Unknown(_) => return None,
        }
    }
    Some(best)
}

#[test]
fn exact_phase_finds_the_best_column() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    for seed in 0..25 {
        let inst = common::tiny_instance(seed, 8);
        let lambda: Vec<f64> = (0..inst.num_types()).map(|_| rng.gen_range(0.0..0.8)).collect();
        let Some(best) = exhaustive_best(&inst, &lambda) else { continue };
        checked += 1;
        match price_rectangular(&inst, &lambda, &PricingLimits::default()) {
            PricingResult::ImprovingColumn { pattern, reduced_cost: rc, bound, .. } => {
                assert!(best > 1.0, "{}: improving column without one existing", inst.name);
                assert_eq!(rc, reduced_cost(&pattern.counts, &lambda));
                // the greedy phase may return any improving column
                if let Some(z) = bound {
                    assert!((z - (1.0 - best)).abs() <= 1e-9, "{}: {z} vs {}", inst.name, 1.0 - best);
                    assert!((rc - (1.0 - best)).abs() <= 1e-9);
                }
            }
            PricingResult::NoImprovement { proof } => {
                assert!(proof);
                assert!(best <= 1.0 + 1e-9, "{}: missed value {best}", inst.name);
            }
            PricingResult::BoundOnly { .. } => panic!("{}: limits hit", inst.name),
        }
    }
    assert!(checked >= 20);
}

#[test]
fn root_dual_bound_is_valid() {
    for seed in 100..130 {
        let inst = common::tiny_instance(seed, 8);
        let Ok(opt) = brute_force_opt(&inst, &OracleLimits::default()) else { continue };
        let mut sets = enumerate_patterns(&inst, &EnumerationOptions::default());
        let root = price_and_verify_root(&inst, &mut sets, &SolveConfig::desk()).unwrap();
        assert!(root.last_valid_dual <= opt as i64, "{}", inst.name);
        if let Some(v) = root.root_lp_value {
            assert!(v <= opt as f64 + 1e-9, "{}: LP {v} above optimum {opt}", inst.name);
        }
    }
}
