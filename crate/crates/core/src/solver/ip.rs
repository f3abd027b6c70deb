use serde::{Deserialize, Serialize};

use crate::lp::{LinearProgram, LpError, LpStatus};

const INTEGRALITY: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IpOutcome {
    /// integer column values of the best solution, if one beat the cutoff
    pub solution: Option<Vec<u64>>,
    pub objective: Option<u64>,
    /// the tree was explored completely
    pub exhausted: bool,
    pub nodes: u64,
    pub node_limit_reached: bool,
}

struct Node {
    bounds: Vec<(usize, f64, f64)>,
}

/// Depth-first branch-and-bound with integrality on every column.
///
/// `cutoff` is an objective known to be achievable; only strictly better
/// solutions are returned. Branching picks the most fractional column, ties go
/// to the larger objective coefficient and then the lower column id, and the
/// up branch is explored first.
pub fn solve_restricted_ip(
    lp: &LinearProgram,
    cutoff: Option<u64>,
    node_limit: u64,
) -> Result<IpOutcome, LpError> {
    let mut best: Option<(u64, Vec<u64>)> = None;
    let mut incumbent = cutoff.map(|c| c as f64);
    let mut stack = vec![Node { bounds: Vec::new() }];
    let mut nodes = 0u64;
    let mut limit_hit = false;
    let mut base = lp.clone();
    base.clear_basis();
    while let Some(node) = stack.pop() {
        if nodes >= node_limit {
            limit_hit = true;
            break;
        }
        nodes += 1;
        let mut sub = base.clone();
        for &(j, lo, hi) in &node.bounds {
            sub.set_bounds(j, lo, hi)?;
        }
        let r = sub.solve()?;
        if r.status != LpStatus::Optimal {
            continue;
        }
        if let Some(inc) = incumbent {
            if (r.objective - 1e-6).ceil() >= inc - 0.5 {
                continue;
            }
        }
        // keep the parent basis around for the children
        base = sub.clone();
        for &(j, _, _) in &node.bounds {
            let (lo, hi) = lp.bounds(j);
            if !lp.is_fixed(j) {
                base.set_bounds(j, lo, hi)?;
            }
        }
        let mut branch: Option<(usize, f64, f64)> = None;
        for (j, &x) in r.primal.iter().enumerate() {
            let frac = x - x.floor();
            let dist = frac.min(1.0 - frac);
            if dist <= INTEGRALITY {
                continue;
            }
            let c = lp.objective_coefficient(j);
            let better = match branch {
                None => true,
                Some((bj, bd, bc)) => {
                    dist > bd + 1e-12 || ((dist - bd).abs() <= 1e-12 && (c > bc || (c == bc && j < bj)))
                }
            };
            if better {
                branch = Some((j, dist, c));
            }
        }
        match branch {
            None => {
                let values: Vec<u64> = r.primal.iter().map(|&x| x.round().max(0.0) as u64).collect();
                let obj: f64 = values
                    .iter()
                    .enumerate()
                    .map(|(j, &v)| v as f64 * lp.objective_coefficient(j))
                    .sum();
                let obj = obj.round() as u64;
                if incumbent.is_none_or(|inc| (obj as f64) < inc - 0.5) {
                    incumbent = Some(obj as f64);
                    best = Some((obj, values));
                }
            }
            Some((j, _, _)) => {
                let x = r.primal[j];
                let (lo, hi) = node
                    .bounds
                    .iter()
                    .rev()
                    .find(|b| b.0 == j)
                    .map(|b| (b.1, b.2))
                    .unwrap_or_else(|| lp.bounds(j));
                let mut down = node.bounds.clone();
                down.push((j, lo, x.floor()));
                let mut up = node.bounds;
                up.push((j, x.ceil(), hi));
                stack.push(Node { bounds: down });
                stack.push(Node { bounds: up });
            }
        }
    }
    let exhausted = stack.is_empty() && !limit_hit;
    Ok(IpOutcome {
        objective: best.as_ref().map(|b| b.0),
        solution: best.map(|b| b.1),
        exhausted,
        nodes,
        node_limit_reached: limit_hit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integral_lp_needs_no_branching() {
        let mut lp = LinearProgram::new();
        lp.add_row(&[], 2.0).unwrap();
        lp.add_column(1.0, &[(0, 1.0)]).unwrap();
        let out = solve_restricted_ip(&lp, None, 100).unwrap();
        assert_eq!(out.objective, Some(2));
        assert_eq!(out.nodes, 1);
        assert!(out.exhausted);
    }

    #[test]
    fn fractional_cover_rounds_up() {
        // min a + b + c, each pair covers one of three rows: LP 1.5, IP 2
        let mut lp = LinearProgram::new();
        for _ in 0..3 {
            lp.add_row(&[], 1.0).unwrap();
        }
        lp.add_column(1.0, &[(0, 1.0), (1, 1.0)]).unwrap();
        lp.add_column(1.0, &[(1, 1.0), (2, 1.0)]).unwrap();
        lp.add_column(1.0, &[(0, 1.0), (2, 1.0)]).unwrap();
        let out = solve_restricted_ip(&lp, None, 100).unwrap();
        assert_eq!(out.objective, Some(2));
        assert!(out.exhausted);
        let cut = solve_restricted_ip(&lp, Some(2), 100).unwrap();
        assert_eq!(cut.objective, None);
        assert!(cut.exhausted);
    }

    #[test]
    fn node_limit_is_reported() {
        let mut lp = LinearProgram::new();
        for _ in 0..3 {
            lp.add_row(&[], 1.0).unwrap();
        }
        lp.add_column(1.0, &[(0, 1.0), (1, 1.0)]).unwrap();
        lp.add_column(1.0, &[(1, 1.0), (2, 1.0)]).unwrap();
        lp.add_column(1.0, &[(0, 1.0), (2, 1.0)]).unwrap();
        let out = solve_restricted_ip(&lp, None, 1).unwrap();
        assert!(out.node_limit_reached);
        assert!(!out.exhausted);
    }
}
