//! End-to-end solver: enumeration, root column generation with verification,
//! a branch-and-bound over the generated columns, and reconstruction of an
//! explicit packing.

mod config;
mod ip;
mod reconstruct;
mod report;
mod root;

use std::collections::HashMap;
use std::time::{Duration, Instant};

use thiserror::Error;

pub use config::{ConfigError, Profile, SolveConfig};
pub use ip::{solve_restricted_ip, IpOutcome};
pub use reconstruct::{fallback_solution, reconstruct_placements, PatternSelection, ReconstructError};
pub use report::{gap, table_header, SolveReport, SolveStatistics, SolveStatus, Timings, REPORT_FORMAT};
pub use root::{price_and_verify_root, RootOutcome, RootStats};

use crate::geometry::VerifyLimits;
use crate::lp::LpError;
use crate::master::{MasterError, MasterModel};
use crate::model::{Instance, PlacedSolution};
use crate::patterns::{enumerate_patterns, CircularPattern, EnumerationOptions, PatternSets};
use crate::validate::{validate_solution, volume_lower_bound};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("ring type {type_index} (outer radius {radius}) does not fit the rectangle")]
    RingDoesNotFit { type_index: usize, radius: f64 },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Master(#[from] MasterError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Reconstruct(#[from] ReconstructError),
}

/// Enumeration options derived from a solve configuration.
pub fn enumeration_options(config: &SolveConfig) -> EnumerationOptions {
    EnumerationOptions {
        per_call: VerifyLimits {
            time_limit: config.enumeration_call_limit,
            node_limit: config.geometry_node_limit,
            tolerance: config.tolerance,
        },
        budget: config.enumeration_budget.min(config.total_time_limit),
        threads: if config.deterministic { 1 } else { config.threads },
    }
}

fn check_fits(instance: &Instance, tol: f64) -> Result<(), SolveError> {
    let side = instance.width.min(instance.height);
    for (t, ty) in instance.types().iter().enumerate() {
        if 2.0 * ty.outer_radius > side + tol {
            return Err(SolveError::RingDoesNotFit {
                type_index: t + 1,
                radius: ty.outer_radius,
            });
        }
    }
    Ok(())
}

/// Integer solution of the restricted master without unverified columns.
pub fn restricted_ip(
    master: &MasterModel,
    sets: &PatternSets,
    cutoff: Option<u64>,
    node_limit: u64,
) -> Result<(IpOutcome, Option<PatternSelection>), SolveError> {
    let mut lp = master.lp_without_artificials()?;
    for u in &sets.unknown {
        if let Some(col) = master.circular_column(&u.pattern) {
            lp.fix_column_zero(col)?;
        }
    }
    let out = solve_restricted_ip(&lp, cutoff, node_limit)?;
    let selection = out.solution.as_ref().map(|values| PatternSelection {
        circular: master
            .circular_patterns()
            .filter(|(_, col)| values[*col] > 0)
            .map(|(c, col)| (c.clone(), values[col]))
            .collect(),
        rectangular: master
            .rectangular_patterns()
            .filter(|(_, col)| values[*col] > 0)
            .map(|(p, col)| (p.clone(), values[col]))
            .collect(),
    });
    Ok((out, selection))
}

pub fn solve(instance: &Instance, config: &SolveConfig) -> Result<SolveReport, SolveError> {
    solve_with_patterns(instance, config, None)
}

/// [`solve`], optionally starting from given pattern sets instead of enumerating.
pub fn solve_with_patterns(
    instance: &Instance,
    config: &SolveConfig,
    patterns: Option<PatternSets>,
) -> Result<SolveReport, SolveError> {
    let start = Instant::now();
    let tol = config.tolerance;
    check_fits(instance, tol)?;
    let volume = volume_lower_bound(instance);
    let mut stats = SolveStatistics::default();
    let fallback = fallback_solution(instance, tol);

    if instance.ring_count() == 0 {
        return Ok(SolveReport {
            format: REPORT_FORMAT.into(),
            instance: instance.name.clone(),
            status: SolveStatus::Optimal,
            primal_bound: 0,
            dual_bound: 0,
            gap: 0.0,
            dual_valid: true,
            volume_bound: 0,
            root_lp_value: Some(0.0),
            selection: PatternSelection::default(),
            incumbent: PlacedSolution {
                rings: Vec::new(),
                rectangle_count: 0,
            },
            statistics: stats,
            timings: (!config.deterministic).then(|| Timings {
                enumeration_seconds: 0.0,
                root_seconds: 0.0,
                ip_seconds: 0.0,
                total_seconds: start.elapsed().as_secs_f64(),
            }),
        });
    }

    let mut sets = match patterns {
        Some(p) => p,
        None => enumerate_patterns(instance, &enumeration_options(config)),
    };
    let t_enum = start.elapsed();
    stats.candidates = sets.stats.candidates;
    stats.exact_calls = sets.stats.exact_calls;
    let unknown_after_enumeration = !sets.unknown.is_empty();

    let root = root::price_and_verify_root_timed(instance, &mut sets, config, start)?;
    let t_root = start.elapsed();
    stats.pricing_rounds = root.stats.pricing_rounds;
    stats.columns_priced = root.stats.columns_priced;
    stats.verified_in_loop = (root.stats.verified_feasible.len()
        + root.stats.verified_infeasible.len()
        + root.stats.marked_tested.len()) as u64;
    stats.fixed_infeasible = root.stats.verified_infeasible.len() as u64;
    stats.fixed_unverified = root.stats.fixed_unverified.len() as u64;
    stats.farley_bounds = root.stats.farley_bounds.clone();
    stats.pricing_converged = root.pricing_converged;

    // one above the fallback, so a tie still yields a pattern selection
    let cutoff = fallback.rectangle_count as u64 + 1;
    let (ip, selection) = restricted_ip(&root.master, &sets, Some(cutoff), config.ip_node_limit)?;
    let t_ip = start.elapsed();
    stats.ip_nodes = ip.nodes;
    stats.ip_node_limit_reached = ip.node_limit_reached;
    stats.ip_exhausted = ip.exhausted;

    let circular_witness: HashMap<CircularPattern, Vec<(f64, f64)>> = sets
        .feasible
        .iter()
        .map(|f| (f.pattern.clone(), f.witness.clone()))
        .collect();
    let (incumbent, selection) = match selection {
        Some(sel) => {
            match reconstruct_placements(instance, &sel, &circular_witness, &root.rect_witnesses) {
                Ok(sol) if validate_solution(instance, &sol, tol).feasible => (sol, sel),
                Ok(_) => {
                    log::warn!("reconstructed packing failed validation; using the fallback");
                    stats.used_fallback = true;
                    (fallback.clone(), PatternSelection::default())
                }
                Err(e) => {
                    log::warn!("reconstruction failed ({e}); using the fallback");
                    stats.used_fallback = true;
                    (fallback.clone(), PatternSelection::default())
                }
            }
        }
        None => {
            stats.used_fallback = true;
            (fallback.clone(), PatternSelection::default())
        }
    };
    stats.feasible_patterns = sets.feasible.len() as u64;
    stats.infeasible_patterns = sets.infeasible.len() as u64;
    stats.unknown_patterns = sets.unknown.len() as u64;

    let primal = incumbent.rectangle_count as u64;
    let dual = volume.max(root.last_valid_dual.max(0) as u64);
    let limits_hit = root.stats.pricing_stopped
        || !root.dual_valid
        || ip.node_limit_reached
        || unknown_after_enumeration
        || start.elapsed() >= config.total_time_limit;
    let status = if primal == dual {
        SolveStatus::Optimal
    } else if limits_hit {
        SolveStatus::ResourceLimit
    } else {
        SolveStatus::FeasibleNotProven
    };
    let secs = |d: Duration| d.as_secs_f64();
    Ok(SolveReport {
        format: REPORT_FORMAT.into(),
        instance: instance.name.clone(),
        status,
        primal_bound: primal,
        dual_bound: dual,
        gap: gap(primal, dual),
        dual_valid: root.dual_valid,
        volume_bound: volume,
        root_lp_value: root.root_lp_value,
        selection,
        incumbent,
        statistics: stats,
        timings: (!config.deterministic).then(|| Timings {
            enumeration_seconds: secs(t_enum),
            root_seconds: secs(t_root - t_enum),
            ip_seconds: secs(t_ip - t_root),
            total_seconds: secs(start.elapsed()),
        }),
    })
}
