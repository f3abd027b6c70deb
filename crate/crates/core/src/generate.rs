//! Seeded random instances following the `i<T>_<alpha>_<beta>_<gamma>` recipe.
//!
//! `alpha = max_t r_t / min_t R_t`, `beta = max(W, H) / max_t R_t`, and `gamma`
//! scales the demand of each type with `W H / (pi R_t^2)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Instance, ModelError, RingType};

pub const GENERATED_SIDE: f64 = 10.0;

/// Demand drawn from `[ceil(0.8 g A / (pi R^2)), floor(1.2 g A / (pi R^2))]`, or
/// `max(1, floor(lower))` when rounding empties the interval.
pub fn demand_interval(gamma: f64, area: f64, outer_radius: f64) -> (u32, u32) {
    let base = gamma * area / (std::f64::consts::PI * outer_radius * outer_radius);
    let lo_real = 0.8 * base;
    let lo = lo_real.ceil();
    let hi = (1.2 * base).floor();
    if lo <= hi {
        (lo as u32, hi as u32)
    } else {
        let d = lo_real.floor().max(1.0) as u32;
        (d, d)
    }
}

pub fn instance_name(types: usize, alpha: f64, beta: f64, gamma: f64) -> String {
    format!("i{}_{:.1}_{:.1}_{}", types, alpha, beta, gamma)
}

pub fn generate_instance(
    types: usize,
    alpha: f64,
    beta: f64,
    gamma: f64,
    seed: u64,
) -> Result<Instance, ModelError> {
    if types == 0 {
        return Err(ModelError::InfeasibleParameters("T must be at least 1".into()));
    }
    if !(alpha >= 1.0 && beta >= 2.0 && gamma >= 1.0) {
        return Err(ModelError::InfeasibleParameters(format!(
            "need alpha >= 1, beta >= 2, gamma >= 1 (got {alpha}, {beta}, {gamma})"
        )));
    }
    let w = GENERATED_SIDE;
    let h = GENERATED_SIDE;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r_max = w.max(h) / beta;

    // (inner, outer) in ascending outer radius
    let mut radii: Vec<(f64, f64)> = Vec::with_capacity(types);
    if types == 1 {
        // single type: alpha = r_1 / R_1, so alpha > 1 is impossible
        if alpha > 1.0 {
            return Err(ModelError::InfeasibleParameters(format!(
                "a single type needs alpha <= 1 to satisfy r <= R (alpha = {alpha})"
            )));
        }
        radii.push((alpha * r_max, r_max));
    } else {
        let r_min = r_max * rng.gen_range(0.6..0.95) / alpha;
        let inner_max = alpha * r_min;
        if inner_max > r_max {
            return Err(ModelError::InfeasibleParameters(
                "largest inner radius would exceed the largest outer radius".into(),
            ));
        }
        let mut middle: Vec<f64> = (0..types - 2)
            .map(|_| {
                let u: f64 = rng.gen_range(0.0..1.0);
                (r_min.ln() + u * (r_max.ln() - r_min.ln())).exp()
            })
            .collect();
        middle.sort_by(f64::total_cmp);
        radii.push((rng.gen_range(0.3..0.9) * r_min, r_min));
        for outer in middle {
            let inner = (rng.gen_range(0.3..0.9) * outer).min(inner_max);
            radii.push((inner, outer));
        }
        radii.push((inner_max, r_max));
    }

    let ring_types = radii
        .into_iter()
        .map(|(inner, outer)| {
            let (lo, hi) = demand_interval(gamma, w * h, outer);
            let demand = rng.gen_range(lo..=hi);
            RingType::new(inner, outer, demand)
        })
        .collect();
    Instance::new(w, h, ring_types, instance_name(types, alpha, beta, gamma))
}
