//! Circular and rectangular patterns, componentwise dominance, and the
//! enumeration of circular patterns.
//!
//! A circular pattern `(t, P)` is a ring of type `t` holding `P_s` rings of each
//! type `s` directly in its hole. Only outer radii matter for packability, so a
//! pattern is checked as a multiset of circles inside a disk of radius `r_t`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::geometry::{
    analytic_prefilter, greedy_pack, verify_exact, CircleMultiset, Container, Verdict,
    VerdictSource, VerifyLimits,
};
use crate::model::{Instance, ModelError};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CircularPattern {
    pub outer_type: usize,
    pub counts: Vec<u32>,
}

impl CircularPattern {
    pub fn new(outer_type: usize, counts: Vec<u32>) -> Self {
        Self { outer_type, counts }
    }

    pub fn container(&self, instance: &Instance) -> Container {
        Container::Disk {
            radius: instance.ring_type(self.outer_type).inner_radius,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RectangularPattern {
    pub counts: Vec<u32>,
}

impl RectangularPattern {
    pub fn new(counts: Vec<u32>) -> Self {
        Self { counts }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }
}

pub fn rectangle_container(instance: &Instance) -> Container {
    Container::Rectangle {
        width: instance.width,
        height: instance.height,
    }
}

/// `q <= p` componentwise.
pub fn counts_le(q: &[u32], p: &[u32]) -> bool {
    q.len() == p.len() && q.iter().zip(p).all(|(a, b)| a <= b)
}

/// `p` dominates `q`: same outer type, `q <= p` componentwise and `q != p`.
pub fn dominates(p: &CircularPattern, q: &CircularPattern) -> bool {
    p.outer_type == q.outer_type && counts_le(&q.counts, &p.counts) && q.counts != p.counts
}

/// Maximal elements under [`dominates`], in input order.
pub fn filter_dominated(patterns: &[CircularPattern]) -> Vec<CircularPattern> {
    let mut out: Vec<CircularPattern> = Vec::new();
    for (i, q) in patterns.iter().enumerate() {
        let beaten = patterns.iter().any(|p| dominates(p, q));
        let repeated = patterns[..i].contains(q);
        if !beaten && !repeated {
            out.push(q.clone());
        }
    }
    out
}

/// Circles of the outer radii given by `counts`.
pub fn multiset_for(instance: &Instance, counts: &[u32]) -> CircleMultiset {
    CircleMultiset::new(
        counts
            .iter()
            .enumerate()
            .map(|(s, &c)| (instance.ring_type(s).outer_radius, c)),
    )
}

/// Type of each witness entry, matching the expansion order of [`multiset_for`].
pub fn witness_types(counts: &[u32]) -> Vec<usize> {
    // types are sorted by nondecreasing outer radius, so expanding them in index
    // order matches the ascending-radius expansion of the multiset
    counts
        .iter()
        .enumerate()
        .flat_map(|(s, &c)| std::iter::repeat(s).take(c as usize))
        .collect()
}

/// Per-type bounds on circular pattern counts for outer type `t`.
pub fn circular_caps(instance: &Instance, t: usize, tolerance: f64) -> Vec<u32> {
    let r = instance.ring_type(t).inner_radius;
    (0..instance.num_types())
        .map(|s| {
            if !instance.fits_inside(s, t, tolerance) {
                return 0;
            }
            let rs = instance.ring_type(s).outer_radius;
            let area_cap = ((r * r) / (rs * rs) + 1e-9).floor();
            (area_cap.min(instance.ring_type(s).demand as f64)).max(0.0) as u32
        })
        .collect()
}

/// Per-type bounds on rectangular pattern counts: `min(D_t, floor(W H / (pi R_t^2)))`.
pub fn rectangular_caps(instance: &Instance) -> Vec<u32> {
    instance
        .types()
        .iter()
        .map(|ty| {
            let cap = (instance.area() / (std::f64::consts::PI * ty.outer_radius * ty.outer_radius)
                + 1e-9)
                .floor();
            cap.min(ty.demand as f64) as u32
        })
        .collect()
}

/// All vectors `0 <= v <= caps`, ordered by total and then lexicographically.
#[derive(Debug, Clone)]
pub struct CountVectors {
    caps: Vec<u32>,
    total: u64,
    max_total: u64,
    current: Option<Vec<u32>>,
}

impl CountVectors {
    pub fn new(caps: Vec<u32>) -> Self {
        let max_total = caps.iter().map(|&c| c as u64).sum();
        Self {
            caps,
            total: 0,
            max_total,
            current: None,
        }
    }

    /// Lexicographically smallest vector with the given total, filling from the back.
    fn first_with_total(&self, total: u64) -> Option<Vec<u32>> {
        let mut v = vec![0u32; self.caps.len()];
        let mut left = total;
        for i in (0..self.caps.len()).rev() {
            let take = left.min(self.caps[i] as u64);
            v[i] = take as u32;
            left -= take;
        }
        (left == 0).then_some(v)
    }

    /// Next vector with the same total in lexicographic order.
    fn next_same_total(&self, v: &[u32]) -> Option<Vec<u32>> {
        let n = v.len();
        // find the rightmost position i that can be incremented while the suffix
        // after it can still absorb one unit less
        let mut suffix: u64 = 0;
        for i in (0..n).rev() {
            if suffix > 0 && v[i] < self.caps[i] {
                let mut w = v.to_vec();
                w[i] += 1;
                let mut left = suffix - 1;
                for j in (i + 1..n).rev() {
                    let take = left.min(self.caps[j] as u64);
                    w[j] = take as u32;
                    left -= take;
                }
                if left == 0 {
                    return Some(w);
                }
            }
            suffix += v[i] as u64;
        }
        None
    }
}

impl Iterator for CountVectors {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let next = match &self.current {
            None => self.first_with_total(0),
            Some(v) => self.next_same_total(v).or_else(|| {
                let mut t = self.total + 1;
                while t <= self.max_total {
                    if let Some(f) = self.first_with_total(t) {
                        return Some(f);
                    }
                    t += 1;
                }
                None
            }),
        }?;
        self.total = next.iter().map(|&c| c as u64).sum();
        self.current = Some(next.clone());
        Some(next)
    }
}

/// Candidate count vectors for circular patterns of outer type `t`.
pub fn candidate_space(instance: &Instance, t: usize, tolerance: f64) -> CountVectors {
    CountVectors::new(circular_caps(instance, t, tolerance))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasiblePattern {
    pub pattern: CircularPattern,
    /// circle centers relative to the ring center, ordered as [`witness_types`]
    pub witness: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum InfeasibleReason {
    Verified(VerdictSource),
    /// implied by a smaller infeasible pattern of the same outer type
    Dominance(Vec<u32>),
    Loaded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfeasiblePattern {
    pub pattern: CircularPattern,
    pub reason: InfeasibleReason,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnknownPattern {
    pub pattern: CircularPattern,
    /// set once an escalated verification call has been tried
    pub tested: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationStats {
    pub candidates: u64,
    pub skipped_by_feasible: u64,
    pub infeasible_by_dominance: u64,
    pub exact_calls: u64,
    pub feasible_before_filter: u64,
    pub unknown_before_filter: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PatternSets {
    pub feasible: Vec<FeasiblePattern>,
    pub infeasible: Vec<InfeasiblePattern>,
    pub unknown: Vec<UnknownPattern>,
    /// every pattern proved feasible, before dominated ones were removed
    pub all_feasible: Vec<CircularPattern>,
    pub stats: EnumerationStats,
}

impl PatternSets {
    pub fn feasible_patterns(&self) -> Vec<CircularPattern> {
        self.feasible.iter().map(|f| f.pattern.clone()).collect()
    }

    pub fn unknown_patterns(&self) -> Vec<CircularPattern> {
        self.unknown.iter().map(|u| u.pattern.clone()).collect()
    }

    pub fn witness_of(&self, pattern: &CircularPattern) -> Option<&[(f64, f64)]> {
        self.feasible
            .iter()
            .find(|f| &f.pattern == pattern)
            .map(|f| f.witness.as_slice())
    }
}

/// Definitive verdicts keyed by `(outer type, counts)`.
#[derive(Debug, Clone, Default)]
pub struct VerdictCache {
    entries: HashMap<(usize, Vec<u32>), Verdict>,
}

impl VerdictCache {
    pub fn get(&self, pattern: &CircularPattern) -> Option<&Verdict> {
        self.entries.get(&(pattern.outer_type, pattern.counts.clone()))
    }

    pub fn insert(&mut self, pattern: &CircularPattern, verdict: Verdict) {
        if !matches!(verdict, Verdict::Unknown(_)) {
            self.entries.insert((pattern.outer_type, pattern.counts.clone()), verdict);
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn merge(&mut self, other: VerdictCache) {
        self.entries.extend(other.entries);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnumerationOptions {
    /// limits for one exact verification call
    pub per_call: VerifyLimits,
    /// total time after which only the prefilter and greedy stages run
    pub budget: Duration,
    /// worker threads, one outer type at a time each; 1 runs sequentially
    pub threads: usize,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        Self {
            per_call: VerifyLimits::with_time(Duration::from_secs(10)),
            budget: Duration::from_secs(1200),
            threads: 1,
        }
    }
}

#[derive(Default)]
struct TypeResult {
    feasible: Vec<FeasiblePattern>,
    infeasible: Vec<InfeasiblePattern>,
    unknown: Vec<CircularPattern>,
    stats: EnumerationStats,
    cache: VerdictCache,
}

fn classify(
    container: &Container,
    multiset: &CircleMultiset,
    limits: &VerifyLimits,
    exact_allowed: bool,
    stats: &mut EnumerationStats,
) -> (Verdict, VerdictSource) {
    if let Some(v) = analytic_prefilter(container, multiset, limits.tolerance) {
        return (v, VerdictSource::Prefilter);
    }
    if let v @ Verdict::Feasible(_) = greedy_pack(container, multiset, limits.tolerance) {
        return (v, VerdictSource::Greedy);
    }
    if !exact_allowed {
        return (
            Verdict::Unknown(crate::geometry::UnknownReason::TimeLimit),
            VerdictSource::Exact,
        );
    }
    stats.exact_calls += 1;
    (verify_exact(container, multiset, limits), VerdictSource::Exact)
}

fn enumerate_type(
    instance: &Instance,
    t: usize,
    options: &EnumerationOptions,
    start: Instant,
    cache: &VerdictCache,
) -> TypeResult {
    let mut out = TypeResult::default();
    let tol = options.per_call.tolerance;
    let container = Container::Disk {
        radius: instance.ring_type(t).inner_radius,
    };
    let mut verified_infeasible: Vec<Vec<u32>> = Vec::new();
    let mut feasible_counts: Vec<Vec<u32>> = Vec::new();
    for counts in candidate_space(instance, t, tol) {
        out.stats.candidates += 1;
        let pattern = CircularPattern::new(t, counts.clone());
        if let Some(q) = verified_infeasible.iter().find(|q| counts_le(q, &counts)) {
            out.stats.infeasible_by_dominance += 1;
            out.infeasible.push(InfeasiblePattern {
                pattern,
                reason: InfeasibleReason::Dominance(q.clone()),
            });
            continue;
        }
        if feasible_counts
            .iter()
            .any(|p| counts_le(&counts, p) && p != &counts)
        {
            out.stats.skipped_by_feasible += 1;
            continue;
        }
        let multiset = multiset_for(instance, &counts);
        let (verdict, source) = match cache.get(&pattern) {
            Some(v) => (v.clone(), VerdictSource::Exact),
            None => {
                let elapsed = start.elapsed();
                let exact_allowed = elapsed < options.budget;
                let mut limits = options.per_call;
                if exact_allowed {
                    limits.time_limit = limits.time_limit.min(options.budget - elapsed);
                }
                classify(&container, &multiset, &limits, exact_allowed, &mut out.stats)
            }
        };
        out.cache.insert(&pattern, verdict.clone());
        match verdict {
            Verdict::Feasible(witness) => {
                feasible_counts.push(counts);
                out.feasible.push(FeasiblePattern { pattern, witness });
            }
            Verdict::Infeasible => {
                verified_infeasible.push(counts);
                out.infeasible.push(InfeasiblePattern {
                    pattern,
                    reason: InfeasibleReason::Verified(source),
                });
            }
            Verdict::Unknown(_) => out.unknown.push(pattern),
        }
    }
    out
}

/// Classifies every circular pattern candidate as feasible, infeasible or unknown.
pub fn enumerate_patterns(instance: &Instance, options: &EnumerationOptions) -> PatternSets {
    enumerate_patterns_cached(instance, options, &mut VerdictCache::default())
}

/// [`enumerate_patterns`] reusing and extending a verdict cache.
pub fn enumerate_patterns_cached(
    instance: &Instance,
    options: &EnumerationOptions,
    cache: &mut VerdictCache,
) -> PatternSets {
    let start = Instant::now();
    let n = instance.num_types();
    let threads = options.threads.max(1).min(n.max(1));
    let results: Vec<TypeResult> = if threads <= 1 {
        (0..n)
            .map(|t| enumerate_type(instance, t, options, start, cache))
            .collect()
    } else {
        let shared: &VerdictCache = cache;
        let mut slots: Vec<Option<TypeResult>> = (0..n).map(|_| None).collect();
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..threads)
                .map(|w| {
                    scope.spawn(move || {
                        (w..n)
                            .step_by(threads)
                            .map(|t| (t, enumerate_type(instance, t, options, start, shared)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            for h in handles {
                for (t, r) in h.join().expect("enumeration worker panicked") {
                    slots[t] = Some(r);
                }
            }
        });
        slots.into_iter().map(|s| s.expect("all types enumerated")).collect()
    };

    let mut sets = PatternSets::default();
    let mut unknown_all: Vec<CircularPattern> = Vec::new();
    for r in results {
        sets.stats.candidates += r.stats.candidates;
        sets.stats.skipped_by_feasible += r.stats.skipped_by_feasible;
        sets.stats.infeasible_by_dominance += r.stats.infeasible_by_dominance;
        sets.stats.exact_calls += r.stats.exact_calls;
        sets.feasible.extend(r.feasible);
        sets.infeasible.extend(r.infeasible);
        unknown_all.extend(r.unknown);
        cache.merge(r.cache);
    }
    sets.stats.feasible_before_filter = sets.feasible.len() as u64;
    sets.stats.unknown_before_filter = unknown_all.len() as u64;
    sets.all_feasible = sets.feasible_patterns();
    let keep = filter_dominated(&sets.all_feasible);
    sets.feasible.retain(|f| keep.contains(&f.pattern));
    // an unknown pattern below a feasible one adds nothing; unknowns are never
    // dropped because of other unknowns
    sets.unknown = unknown_all
        .into_iter()
        .filter(|u| {
            !sets
                .all_feasible
                .iter()
                .any(|p| p.outer_type == u.outer_type && counts_le(&u.counts, &p.counts))
        })
        .map(|pattern| UnknownPattern {
            pattern,
            tested: false,
        })
        .collect();
    sets
}

/// One line per pattern: `C t P_1 .. P_T status [x y ...]`, `t` 1-based.
pub fn write_pattern_dump(sets: &PatternSets) -> String {
    let mut out = String::from("# rcpp patterns v1\n");
    let line = |out: &mut String, p: &CircularPattern, status: &str| {
        let _ = write!(out, "C {}", p.outer_type + 1);
        for c in &p.counts {
            let _ = write!(out, " {c}");
        }
        let _ = write!(out, " {}", status);
    };
    for f in &sets.feasible {
        line(&mut out, &f.pattern, "feasible");
        for (x, y) in &f.witness {
            let _ = write!(out, " {} {}", crate::model::format_sig12(*x), crate::model::format_sig12(*y));
        }
        out.push('\n');
    }
    for i in &sets.infeasible {
        line(&mut out, &i.pattern, "infeasible");
        out.push('\n');
    }
    for u in &sets.unknown {
        line(&mut out, &u.pattern, "unknown");
        out.push('\n');
    }
    out
}

/// Reads a pattern dump for an instance with `num_types` types.
pub fn read_pattern_dump(text: &str, num_types: usize) -> Result<PatternSets, ModelError> {
    let mut sets = PatternSets::default();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| ModelError::MalformedInput {
            line: ln + 1,
            column: 1,
            message,
        };
        let tok: Vec<&str> = line.split_whitespace().collect();
        if tok.len() < num_types + 3 || tok[0] != "C" {
            return Err(err(format!("expected `C t P_1..P_{num_types} status`")));
        }
        let t: usize = tok[1].parse().map_err(|_| err("bad type index".into()))?;
        if t == 0 || t > num_types {
            return Err(err(format!("type index {t} out of range")));
        }
        let counts = tok[2..2 + num_types]
            .iter()
            .map(|s| s.parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| err("bad count".into()))?;
        let pattern = CircularPattern::new(t - 1, counts);
        let rest = &tok[3 + num_types..];
        match tok[2 + num_types] {
            "feasible" => {
                let vals = rest
                    .iter()
                    .map(|s| s.parse::<f64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| err("bad witness coordinate".into()))?;
                let need = pattern.counts.iter().map(|&c| c as usize).sum::<usize>() * 2;
                if vals.len() != need {
                    return Err(err(format!("expected {need} witness coordinates")));
                }
                let witness = vals.chunks(2).map(|c| (c[0], c[1])).collect();
                sets.all_feasible.push(pattern.clone());
                sets.feasible.push(FeasiblePattern { pattern, witness });
            }
            "infeasible" => sets.infeasible.push(InfeasiblePattern {
                pattern,
                reason: InfeasibleReason::Loaded,
            }),
            "unknown" => sets.unknown.push(UnknownPattern {
                pattern,
                tested: false,
            }),
            other => return Err(err(format!("unknown status `{other}`"))),
        }
    }
    Ok(sets)
}
