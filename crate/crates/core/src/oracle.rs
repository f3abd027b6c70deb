//! Brute-force ground truth for tiny instances.
//!
//! Packable count vectors are built bottom-up: the contents of a container are
//! a verified multiset of direct children plus, for each child, anything that
//! fits into the child's hole. Direct children of each type are limited by the
//! demand, the same domain the circular and rectangular patterns use.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::geometry::{verify, Container, Verdict, VerifyLimits};
use crate::lp::{LinearProgram, LpError, LpStatus};
use crate::model::Instance;
use crate::patterns::{multiset_for, rectangle_container, CountVectors};

pub const MAX_RINGS: u64 = 12;
pub const MAX_VECTORS: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("instance too large for the oracle: {0}")]
    Intractable(String),
    #[error("geometry check undecided for {0}")]
    Undecided(String),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("oracle LP is {0:?}")]
    LpStatus(LpStatus),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleLimits {
    pub verify: VerifyLimits,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            verify: VerifyLimits::with_time(std::time::Duration::from_secs(30)),
        }
    }
}

struct Builder<'a> {
    instance: &'a Instance,
    limits: OracleLimits,
    /// contents of the hole of each type
    holes: HashMap<usize, BTreeSet<Vec<u32>>>,
}

impl Builder<'_> {
    fn add(a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    fn packs(&self, container: &Container, direct: &[u32]) -> Result<bool, OracleError> {
        let (v, _) = verify(container, &multiset_for(self.instance, direct), &self.limits.verify);
        match v {
            Verdict::Feasible(_) => Ok(true),
            Verdict::Infeasible => Ok(false),
            Verdict::Unknown(_) => Err(OracleError::Undecided(format!("{direct:?} in {container:?}"))),
        }
    }

    /// Every count vector that can be placed in `container`, using only types in `allowed`.
    fn contents(&mut self, container: Container, allowed: &[bool]) -> Result<BTreeSet<Vec<u32>>, OracleError> {
        let n = self.instance.num_types();
        let cap = container.area();
        let caps: Vec<u32> = (0..n)
            .map(|s| {
                if !allowed[s] {
                    return 0;
                }
                let r = self.instance.ring_type(s).outer_radius;
                let area = std::f64::consts::PI * r * r;
                ((cap / area + 1e-9).floor() as u32).min(self.instance.ring_type(s).demand)
            })
            .collect();
        let mut out = BTreeSet::new();
        for direct in CountVectors::new(caps) {
            if direct.iter().any(|&c| c > 0) && !self.packs(&container, &direct)? {
                continue;
            }
            let mut sums: BTreeSet<Vec<u32>> = BTreeSet::from([direct.clone()]);
            for (s, &k) in direct.iter().enumerate().filter(|(_, &k)| k > 0) {
                let inner = self.hole(s)?;
                for _ in 0..k {
                    let mut next = BTreeSet::new();
                    for a in &sums {
                        for b in &inner {
                            next.insert(Self::add(a, b));
                        }
                    }
                    if next.len() > MAX_VECTORS {
                        return Err(OracleError::Intractable(format!(
                            "more than {MAX_VECTORS} packable vectors"
                        )));
                    }
                    sums = next;
                }
            }
            out.extend(sums);
            if out.len() > MAX_VECTORS {
                return Err(OracleError::Intractable(format!("more than {MAX_VECTORS} packable vectors")));
            }
        }
        Ok(out)
    }

    fn hole(&mut self, t: usize) -> Result<BTreeSet<Vec<u32>>, OracleError> {
        if let Some(s) = self.holes.get(&t) {
            return Ok(s.clone());
        }
        let n = self.instance.num_types();
        let tol = self.limits.verify.tolerance;
        let allowed: Vec<bool> = (0..n).map(|s| self.instance.fits_inside(s, t, tol)).collect();
        let container = Container::Disk {
            radius: self.instance.ring_type(t).inner_radius,
        };
        let set = self.contents(container, &allowed)?;
        self.holes.insert(t, set.clone());
        Ok(set)
    }
}

/// All packable count vectors of one rectangle, sorted, including the zero vector.
pub fn enumerate_packable_rectangles(
    instance: &Instance,
    limits: &OracleLimits,
) -> Result<Vec<Vec<u32>>, OracleError> {
    if instance.ring_count() > MAX_RINGS {
        return Err(OracleError::Intractable(format!(
            "{} rings, at most {MAX_RINGS} supported",
            instance.ring_count()
        )));
    }
    let mut b = Builder {
        instance,
        limits: *limits,
        holes: HashMap::new(),
    };
    let allowed = vec![true; instance.num_types()];
    let set = b.contents(rectangle_container(instance), &allowed)?;
    Ok(set.into_iter().collect())
}

/// LP relaxation of the cover over all packable rectangles.
pub fn solve_dw_lp(instance: &Instance, limits: &OracleLimits) -> Result<f64, OracleError> {
    let vectors = enumerate_packable_rectangles(instance, limits)?;
    let mut lp = LinearProgram::new();
    for ty in instance.types() {
        lp.add_row(&[], ty.demand as f64)?;
    }
    for f in vectors.iter().filter(|f| f.iter().any(|&c| c > 0)) {
        let coeffs: Vec<(usize, f64)> = f
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(t, &c)| (t, c as f64))
            .collect();
        lp.add_column(1.0, &coeffs)?;
    }
    let r = lp.solve()?;
    if r.status != LpStatus::Optimal {
        return Err(OracleError::LpStatus(r.status));
    }
    Ok(r.objective)
}

/// Exact minimum number of rectangles, by exhaustive search over packable rectangles.
pub fn brute_force_opt(instance: &Instance, limits: &OracleLimits) -> Result<u64, OracleError> {
    let demand = instance.demands();
    let vectors = enumerate_packable_rectangles(instance, limits)?;
    let capped: BTreeSet<Vec<u32>> = vectors
        .iter()
        .map(|f| f.iter().zip(&demand).map(|(&a, &d)| a.min(d)).collect::<Vec<u32>>())
        .filter(|f| f.iter().any(|&c| c > 0))
        .collect();
    let capped: Vec<Vec<u32>> = capped.into_iter().collect();
    let maximal: Vec<Vec<u32>> = capped
        .iter()
        .filter(|f| {
            !capped
                .iter()
                .any(|g| g != *f && g.iter().zip(f.iter()).all(|(a, b)| a >= b))
        })
        .cloned()
        .collect();
    let mut memo = HashMap::new();
    Ok(cover(&demand, &maximal, &mut memo))
}

fn cover(residual: &[u32], rects: &[Vec<u32>], memo: &mut HashMap<Vec<u32>, u64>) -> u64 {
    if residual.iter().all(|&d| d == 0) {
        return 0;
    }
    if let Some(&v) = memo.get(residual) {
        return v;
    }
    // the first type with residual demand has to be served by some rectangle
    let first = residual.iter().position(|&d| d > 0).expect("nonzero residual");
    let mut best = u64::MAX;
    for f in rects.iter().filter(|f| f[first] > 0) {
        let next: Vec<u32> = residual.iter().zip(f).map(|(&d, &c)| d.saturating_sub(c)).collect();
        best = best.min(1 + cover(&next, rects, memo));
    }
    memo.insert(residual.to_vec(), best);
    best
}
