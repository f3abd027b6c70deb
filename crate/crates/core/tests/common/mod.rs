#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rcpp::{Instance, RingType};

pub fn tiny3() -> Instance {
    Instance::new(
        4.0,
        4.0,
        vec![
            RingType::new(0.5, 0.7, 2),
            RingType::new(1.0, 1.2, 1),
            RingType::new(1.4, 1.8, 1),
        ],
        "tiny3",
    )
    .unwrap()
}

/// Small random instance with at most `max_rings` rings and up to three types.
pub fn tiny_instance(seed: u64, max_rings: u32) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side: f64 = rng.gen_range(3.0..5.0);
    let height: f64 = rng.gen_range(0.6 * side..side);
    let types = rng.gen_range(1..=3usize);
    let mut rings = Vec::new();
    let mut left = max_rings.max(types as u32);
    for i in 0..types {
        let outer = rng.gen_range(0.3..0.5 * height.min(side));
        // every other type gets a hole big enough to be useful
        let inner = if i % 2 == 0 {
            rng.gen_range(0.3..0.9) * outer
        } else {
            rng.gen_range(0.0..0.3) * outer
        };
        let most = left - (types - i - 1) as u32;
        let demand = rng.gen_range(1..=most.min(4));
        left -= demand;
        rings.push(RingType::new(inner, outer, demand));
    }
    Instance::new(side, height, rings, &format!("tiny-{seed}")).unwrap()
}
