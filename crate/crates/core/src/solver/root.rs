use std::collections::HashMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::geometry::{verify, Verdict, VerifyLimits};
use crate::master::{build_master, MasterModel};
use crate::model::Instance;
use crate::patterns::{
    multiset_for, CircularPattern, FeasiblePattern, InfeasiblePattern, InfeasibleReason,
    PatternSets, RectangularPattern,
};
use crate::pricing::{farley_bound, price_rectangular_cached, PricingCache, PricingLimits, PricingResult};

use super::{SolveConfig, SolveError};

const MAX_PRICING_ROUNDS: u64 = 100_000;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RootStats {
    /// number of times the pricing loop was entered
    pub pricing_entries: u64,
    pub pricing_rounds: u64,
    pub columns_priced: u64,
    pub verified_feasible: Vec<CircularPattern>,
    pub verified_infeasible: Vec<CircularPattern>,
    /// unknown patterns whose escalated check was inconclusive
    pub marked_tested: Vec<CircularPattern>,
    /// unknown patterns fixed to zero without a verdict
    pub fixed_unverified: Vec<CircularPattern>,
    pub farley_bounds: Vec<i64>,
    /// master LP value after each solve
    pub lp_values: Vec<f64>,
    pub pricing_stopped: bool,
}

#[derive(Debug, Clone)]
pub struct RootOutcome {
    pub master: MasterModel,
    /// LP value of the last solve
    pub lp_value: f64,
    /// largest LP value reached with proved pricing convergence before any invalidation
    pub root_lp_value: Option<f64>,
    /// best dual bound proved before any invalidating fix
    pub last_valid_dual: i64,
    pub dual_valid: bool,
    pub pricing_converged: bool,
    pub rect_witnesses: HashMap<RectangularPattern, Vec<(f64, f64)>>,
    pub stats: RootStats,
}

struct Clock {
    start: Instant,
    total: Duration,
}

impl Clock {
    fn remaining(&self) -> Duration {
        self.total.saturating_sub(self.start.elapsed())
    }
}

/// Column generation at the root with on-demand verification of unknown patterns.
///
/// Pricing runs until it proves convergence or only yields a bound, after which
/// it is not called again. Unknown patterns with positive LP value are verified
/// with the escalated limits; infeasible ones are fixed to zero and pricing
/// resumes. If unverified patterns still carry value after every one has been
/// tried, all unknown patterns are fixed and the LP stops being a valid bound.
pub fn price_and_verify_root(
    instance: &Instance,
    sets: &mut PatternSets,
    config: &SolveConfig,
) -> Result<RootOutcome, SolveError> {
    price_and_verify_root_timed(instance, sets, config, Instant::now())
}

pub(crate) fn price_and_verify_root_timed(
    instance: &Instance,
    sets: &mut PatternSets,
    config: &SolveConfig,
    start: Instant,
) -> Result<RootOutcome, SolveError> {
    let clock = Clock {
        start,
        total: config.total_time_limit,
    };
    let tol = config.tolerance;
    let n = instance.num_types();
    let mut circular = sets.feasible_patterns();
    circular.extend(sets.unknown_patterns());
    let mut rect_witnesses = HashMap::new();
    let mut singletons = Vec::with_capacity(n);
    for t in 0..n {
        let mut counts = vec![0u32; n];
        counts[t] = 1;
        let r = instance.ring_type(t).outer_radius;
        let p = RectangularPattern::new(counts);
        rect_witnesses.insert(p.clone(), vec![(r, r)]);
        singletons.push(p);
    }
    let mut master = build_master(instance, &circular, &singletons)?;
    let mut stats = RootStats::default();
    let mut cache = PricingCache::default();
    let mut dual_valid = true;
    let mut converged = false;
    let mut root_lp_value: Option<f64> = None;
    let mut last_valid_dual: i64 = 0;
    let mut pricing_active = true;
    let verification_start = Instant::now();

    let mut result = master.lp_relax_value()?;
    stats.lp_values.push(result.objective);
    stats.pricing_entries = 1;
    'outer: loop {
        // pricing
        while pricing_active {
            if stats.pricing_rounds >= MAX_PRICING_ROUNDS {
                pricing_active = false;
                stats.pricing_stopped = true;
                break;
            }
            stats.pricing_rounds += 1;
            converged = false;
            let lambda = master.duals(&result).recursion;
            let limits = PricingLimits {
                time_limit: config.pricing_limit.min(clock.remaining()),
                verify: VerifyLimits {
                    time_limit: config.enumeration_call_limit,
                    node_limit: config.geometry_node_limit,
                    tolerance: tol,
                },
                node_limit: u64::MAX,
            };
            let nu = result.objective;
            match price_rectangular_cached(instance, &lambda, &limits, &mut cache) {
                PricingResult::ImprovingColumn {
                    pattern,
                    witness,
                    bound,
                    ..
                } => {
                    if let (Some(z), true) = (bound, dual_valid) {
                        if let Ok(f) = farley_bound(nu, z) {
                            stats.farley_bounds.push(f);
                            last_valid_dual = last_valid_dual.max(f);
                        }
                    }
                    if master.contains_rectangular(&pattern) {
                        log::warn!("pricing returned an existing column; stopping pricing");
                        pricing_active = false;
                        stats.pricing_stopped = true;
                        break;
                    }
                    master.add_rect_column(pattern.clone())?;
                    rect_witnesses.insert(pattern, witness);
                    stats.columns_priced += 1;
                    result = master.lp_relax_value()?;
                    stats.lp_values.push(result.objective);
                }
                PricingResult::NoImprovement { proof } => {
                    if proof {
                        converged = true;
                        if dual_valid {
                            root_lp_value = Some(root_lp_value.map_or(nu, |v: f64| v.max(nu)));
                            let f = farley_bound(nu, 0.0).unwrap_or(0);
                            last_valid_dual = last_valid_dual.max(f);
                        }
                    } else {
                        pricing_active = false;
                        stats.pricing_stopped = true;
                    }
                    break;
                }
                PricingResult::BoundOnly { z_pricing } => {
                    if dual_valid {
                        if let Ok(f) = farley_bound(nu, z_pricing) {
                            stats.farley_bounds.push(f);
                            last_valid_dual = last_valid_dual.max(f);
                        }
                    }
                    pricing_active = false;
                    stats.pricing_stopped = true;
                    break;
                }
            }
        }

        // verification of unknown patterns used by the LP
        loop {
            let pick = sets.unknown.iter().position(|u| {
                !u.tested
                    && !master.is_fixed(&u.pattern)
                    && master
                        .circular_column(&u.pattern)
                        .is_some_and(|c| result.primal[c] > tol)
            });
            let Some(idx) = pick else { break };
            let pattern = sets.unknown[idx].pattern.clone();
            let budget_left = config
                .verification_budget
                .saturating_sub(verification_start.elapsed())
                .min(clock.remaining());
            let limits = VerifyLimits {
                time_limit: config.verification_call_limit.min(budget_left),
                node_limit: config.geometry_node_limit,
                tolerance: tol,
            };
            let (verdict, source) = verify(
                &pattern.container(instance),
                &multiset_for(instance, &pattern.counts),
                &limits,
            );
            match verdict {
                Verdict::Feasible(witness) => {
                    sets.unknown.remove(idx);
                    sets.all_feasible.push(pattern.clone());
                    sets.feasible.push(FeasiblePattern {
                        pattern: pattern.clone(),
                        witness,
                    });
                    stats.verified_feasible.push(pattern);
                }
                Verdict::Infeasible => {
                    sets.unknown.remove(idx);
                    master.fix_circular_zero(&pattern)?;
                    sets.infeasible.push(InfeasiblePattern {
                        pattern: pattern.clone(),
                        reason: InfeasibleReason::Verified(source),
                    });
                    stats.verified_infeasible.push(pattern);
                    result = master.lp_relax_value()?;
                    stats.lp_values.push(result.objective);
                    if pricing_active {
                        stats.pricing_entries += 1;
                        continue 'outer;
                    }
                }
                Verdict::Unknown(_) => {
                    sets.unknown[idx].tested = true;
                    stats.marked_tested.push(pattern);
                }
            }
        }

        // unverified patterns still in use: drop them all, the bound is gone
        let still_used = sets.unknown.iter().any(|u| {
            !master.is_fixed(&u.pattern)
                && master
                    .circular_column(&u.pattern)
                    .is_some_and(|c| result.primal[c] > tol)
        });
        if still_used {
            dual_valid = false;
            for u in &sets.unknown {
                if !master.is_fixed(&u.pattern) {
                    master.fix_circular_zero(&u.pattern)?;
                    stats.fixed_unverified.push(u.pattern.clone());
                }
            }
            result = master.lp_relax_value()?;
            stats.lp_values.push(result.objective);
            if pricing_active {
                stats.pricing_entries += 1;
                continue 'outer;
            }
        }
        break;
    }

    Ok(RootOutcome {
        master,
        lp_value: result.objective,
        root_lp_value,
        last_valid_dual,
        dual_valid,
        pricing_converged: converged,
        rect_witnesses,
        stats,
    })
}
