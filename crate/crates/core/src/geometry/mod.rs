//! Packability of circle multisets in disks and rectangles.
//!
//! Disks are centered at the origin; rectangles span `[0, W] x [0, H]`.
//! Witness centers are listed in the expansion order of the [`CircleMultiset`]:
//! radii ascending, each repeated `count` times.

mod exact;
mod greedy;
mod prefilter;

use std::time::Duration;

use serde::{Deserialize, Serialize};

pub use exact::{verify_exact, verify_exact_with, SearchOptions};
pub use greedy::{greedy_pack, GreedyPlacer};
pub use prefilter::{analytic_prefilter, three_in_disk_threshold};

use crate::model::DEFAULT_TOLERANCE;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Container {
    Disk { radius: f64 },
    Rectangle { width: f64, height: f64 },
}

impl Container {
    pub fn area(&self) -> f64 {
        match *self {
            Container::Disk { radius } => std::f64::consts::PI * radius * radius,
            Container::Rectangle { width, height } => width * height,
        }
    }

    /// Radius of the largest circle that fits.
    pub fn inradius(&self) -> f64 {
        match *self {
            Container::Disk { radius } => radius,
            Container::Rectangle { width, height } => 0.5 * width.min(height),
        }
    }

    /// Whether a circle of `radius` centered at `(x, y)` lies inside, relaxed by `tol`.
    pub fn contains(&self, radius: f64, x: f64, y: f64, tol: f64) -> bool {
        match *self {
            Container::Disk { radius: rho } => x.hypot(y) <= rho - radius + tol,
            Container::Rectangle { width, height } => {
                radius - tol <= x
                    && x <= width - radius + tol
                    && radius - tol <= y
                    && y <= height - radius + tol
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleMultiset {
    entries: Vec<(f64, u32)>,
}

impl CircleMultiset {
    /// Builds a multiset, merging equal radii and dropping zero counts.
    pub fn new(entries: impl IntoIterator<Item = (f64, u32)>) -> Self {
        let mut v: Vec<(f64, u32)> = entries.into_iter().filter(|e| e.1 > 0).collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, u32)> = Vec::with_capacity(v.len());
        for (r, c) in v {
            match merged.last_mut() {
                Some(last) if last.0 == r => last.1 += c,
                _ => merged.push((r, c)),
            }
        }
        Self { entries: merged }
    }

    pub fn entries(&self) -> &[(f64, u32)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.iter().map(|e| e.1 as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Radii in expansion order.
    pub fn radii(&self) -> Vec<f64> {
        self.entries
            .iter()
            .flat_map(|&(r, c)| std::iter::repeat(r).take(c as usize))
            .collect()
    }

    pub fn total_area(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(r, c)| c as f64 * std::f64::consts::PI * r * r)
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnknownReason {
    TimeLimit,
    NodeLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Verdict {
    Feasible(Vec<(f64, f64)>),
    Infeasible,
    Unknown(UnknownReason),
}

impl Verdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Verdict::Feasible(_))
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, Verdict::Infeasible)
    }

    pub fn witness(&self) -> Option<&[(f64, f64)]> {
        match self {
            Verdict::Feasible(w) => Some(w),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyLimits {
    pub time_limit: Duration,
    pub node_limit: u64,
    pub tolerance: f64,
}

impl Default for VerifyLimits {
    fn default() -> Self {
        Self {
            time_limit: Duration::from_secs(10),
            node_limit: 1_000_000,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

impl VerifyLimits {
    pub fn with_time(time_limit: Duration) -> Self {
        Self {
            time_limit,
            ..Self::default()
        }
    }
}

/// Pairwise non-overlap and containment of every circle, relaxed by `tolerance`.
pub fn check_placements(
    container: &Container,
    circles: &[(f64, (f64, f64))],
    tolerance: f64,
) -> bool {
    for (i, &(ri, (xi, yi))) in circles.iter().enumerate() {
        if !(xi.is_finite() && yi.is_finite()) || !container.contains(ri, xi, yi, tolerance) {
            return false;
        }
        for &(rj, (xj, yj)) in &circles[i + 1..] {
            if (xi - xj).hypot(yi - yj) < ri + rj - tolerance {
                return false;
            }
        }
    }
    true
}

/// [`check_placements`] for a multiset and a witness in expansion order.
pub fn check_witness(
    container: &Container,
    multiset: &CircleMultiset,
    witness: &[(f64, f64)],
    tolerance: f64,
) -> bool {
    let radii = multiset.radii();
    if radii.len() != witness.len() {
        return false;
    }
    let circles: Vec<(f64, (f64, f64))> = radii.into_iter().zip(witness.iter().copied()).collect();
    check_placements(container, &circles, tolerance)
}

/// Which stage of [`verify`] produced the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictSource {
    Prefilter,
    Greedy,
    Exact,
}

/// The full pipeline: analytic prefilter, then greedy, then the exact search.
pub fn verify(
    container: &Container,
    multiset: &CircleMultiset,
    limits: &VerifyLimits,
) -> (Verdict, VerdictSource) {
    if let Some(v) = analytic_prefilter(container, multiset, limits.tolerance) {
        return (v, VerdictSource::Prefilter);
    }
    if let v @ Verdict::Feasible(_) = greedy_pack(container, multiset, limits.tolerance) {
        return (v, VerdictSource::Greedy);
    }
    (verify_exact(container, multiset, limits), VerdictSource::Exact)
}

/// Prefilter and greedy only; failures map to `Unknown`.
pub fn verify_cheap(container: &Container, multiset: &CircleMultiset, tolerance: f64) -> Verdict {
    if let Some(v) = analytic_prefilter(container, multiset, tolerance) {
        return v;
    }
    match greedy_pack(container, multiset, tolerance) {
        v @ Verdict::Feasible(_) => v,
        _ => Verdict::Unknown(UnknownReason::TimeLimit),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tight_pair_in_disk() {
        let disk = Container::Disk { radius: 1.4 };
        assert!(check_placements(&disk, &[(0.7, (-0.7, 0.0)), (0.7, (0.7, 0.0))], 1e-9));
        assert!(!check_placements(&disk, &[(0.7, (-0.6, 0.0)), (0.7, (0.6, 0.0))], 1e-9));
    }

    #[test]
    fn corner_circle_in_rectangle() {
        let rect = Container::Rectangle {
            width: 4.0,
            height: 4.0,
        };
        assert!(check_placements(&rect, &[(0.7, (0.7, 0.7))], 1e-9));
        assert!(!check_placements(&rect, &[(0.7, (0.6, 0.7))], 1e-9));
    }

    #[test]
    fn multiset_merges_and_expands() {
        let m = CircleMultiset::new([(1.0, 1), (0.5, 2), (1.0, 2), (0.3, 0)]);
        assert_eq!(m.entries(), &[(0.5, 2), (1.0, 3)]);
        assert_eq!(m.radii(), vec![0.5, 0.5, 1.0, 1.0, 1.0]);
        assert_eq!(m.len(), 5);
    }
}
