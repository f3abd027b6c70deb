use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Instance, PlacedRing, PlacedSolution, Placement};
use crate::patterns::{witness_types, CircularPattern, RectangularPattern};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReconstructError {
    #[error("pattern multiset violates {0}")]
    InconsistentMultiset(String),
    #[error("missing witness for pattern {0}")]
    MissingWitness(String),
}

/// Selected patterns with multiplicities.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PatternSelection {
    pub circular: Vec<(CircularPattern, u64)>,
    pub rectangular: Vec<(RectangularPattern, u64)>,
}

impl PatternSelection {
    pub fn rectangles(&self) -> u64 {
        self.rectangular.iter().map(|r| r.1).sum()
    }

    /// Checks the demand and recursion inequalities as integers.
    pub fn check(&self, instance: &Instance) -> Result<(), ReconstructError> {
        let n = instance.num_types();
        let mut instances = vec![0i64; n];
        let mut slots = vec![0i64; n];
        for (c, k) in &self.circular {
            instances[c.outer_type] += *k as i64;
            for s in 0..n {
                slots[s] += c.counts[s] as i64 * *k as i64;
            }
        }
        for (p, k) in &self.rectangular {
            for s in 0..n {
                slots[s] += p.counts[s] as i64 * *k as i64;
            }
        }
        for t in 0..n {
            if instances[t] < instance.ring_type(t).demand as i64 {
                return Err(ReconstructError::InconsistentMultiset(format!(
                    "the demand row of type {}",
                    t + 1
                )));
            }
            if slots[t] < instances[t] {
                return Err(ReconstructError::InconsistentMultiset(format!(
                    "the recursion row of type {}",
                    t + 1
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
struct Slot {
    /// the real container holding this position
    parent: Placement,
    x: f64,
    y: f64,
}

/// Turns a pattern selection into explicit placements.
///
/// Types are processed from the largest down. Every selected circular pattern
/// instance takes an open slot of its type. The first `D_t` instances become
/// rings; the remaining ones are left out, and circles of their holes are
/// handed to the container that held them.
pub fn reconstruct_placements(
    instance: &Instance,
    selection: &PatternSelection,
    circular_witness: &HashMap<CircularPattern, Vec<(f64, f64)>>,
    rect_witness: &HashMap<RectangularPattern, Vec<(f64, f64)>>,
) -> Result<PlacedSolution, ReconstructError> {
    selection.check(instance)?;
    let n = instance.num_types();
    let mut open: Vec<Vec<Slot>> = vec![Vec::new(); n];
    let mut rect_count = 0usize;
    for (p, k) in &selection.rectangular {
        let w = rect_witness
            .get(p)
            .ok_or_else(|| ReconstructError::MissingWitness(format!("{p:?}")))?;
        let types = witness_types(&p.counts);
        for _ in 0..*k {
            for (&s, &(x, y)) in types.iter().zip(w) {
                open[s].push(Slot {
                    parent: Placement::Rectangle(rect_count),
                    x,
                    y,
                });
            }
            rect_count += 1;
        }
    }
    let mut rings: Vec<PlacedRing> = Vec::new();
    for t in (0..n).rev() {
        let demand = instance.ring_type(t).demand as usize;
        let mut used = 0usize;
        let mut slots = std::mem::take(&mut open[t]).into_iter();
        for (c, k) in selection.circular.iter().filter(|c| c.0.outer_type == t) {
            let w = circular_witness
                .get(c)
                .ok_or_else(|| ReconstructError::MissingWitness(format!("{c:?}")))?;
            let types = witness_types(&c.counts);
            for _ in 0..*k {
                let slot = slots.next().ok_or_else(|| {
                    ReconstructError::InconsistentMultiset(format!("the recursion row of type {}", t + 1))
                })?;
                let holder = if used < demand {
                    rings.push(PlacedRing {
                        type_index: t,
                        center_x: slot.x,
                        center_y: slot.y,
                        container: slot.parent,
                    });
                    Placement::Ring(rings.len() - 1)
                } else {
                    slot.parent
                };
                used += 1;
                for (&s, &(dx, dy)) in types.iter().zip(w) {
                    open[s].push(Slot {
                        parent: holder,
                        x: slot.x + dx,
                        y: slot.y + dy,
                    });
                }
            }
        }
    }
    Ok(drop_empty_rectangles(PlacedSolution {
        rings,
        rectangle_count: rect_count,
    }))
}

fn drop_empty_rectangles(mut sol: PlacedSolution) -> PlacedSolution {
    let mut used = vec![false; sol.rectangle_count];
    for (i, _) in sol.rings.iter().enumerate() {
        if let Some(r) = sol.rectangle_of(i) {
            used[r] = true;
        }
    }
    let mut remap = vec![usize::MAX; sol.rectangle_count];
    let mut next = 0;
    for (r, u) in used.iter().enumerate() {
        if *u {
            remap[r] = next;
            next += 1;
        }
    }
    for ring in &mut sol.rings {
        if let Placement::Rectangle(r) = ring.container {
            ring.container = Placement::Rectangle(remap[r]);
        }
    }
    sol.rectangle_count = next;
    sol
}

/// One rectangle per chain of concentric rings, largest rings first.
pub fn fallback_solution(instance: &Instance, tolerance: f64) -> PlacedSolution {
    let n = instance.num_types();
    let mut left: Vec<u32> = instance.demands();
    let mut rings = Vec::new();
    let mut rect = 0usize;
    let (cx, cy) = (0.5 * instance.width, 0.5 * instance.height);
    while let Some(root) = (0..n).rev().find(|&t| left[t] > 0) {
        left[root] -= 1;
        rings.push(PlacedRing {
            type_index: root,
            center_x: cx,
            center_y: cy,
            container: Placement::Rectangle(rect),
        });
        let mut inner = root;
        while let Some(s) = (0..inner)
            .rev()
            .find(|&s| left[s] > 0 && instance.fits_inside(s, inner, tolerance))
        {
            left[s] -= 1;
            rings.push(PlacedRing {
                type_index: s,
                center_x: cx,
                center_y: cy,
                container: Placement::Ring(rings.len() - 1),
            });
            inner = s;
        }
        rect += 1;
    }
    PlacedSolution {
        rings,
        rectangle_count: rect,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RingType;
    use crate::validate::validate_solution;

    fn tiny3() -> Instance {
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

    fn cp(t: usize, c: &[u32]) -> CircularPattern {
        CircularPattern::new(t, c.to_vec())
    }

    fn rp(c: &[u32]) -> RectangularPattern {
        RectangularPattern::new(c.to_vec())
    }

    fn witnesses() -> (
        HashMap<CircularPattern, Vec<(f64, f64)>>,
        HashMap<RectangularPattern, Vec<(f64, f64)>>,
    ) {
        let circ = HashMap::from([
            (cp(0, &[0, 0, 0]), vec![]),
            (cp(1, &[1, 0, 0]), vec![(0.0, 0.0)]),
            (cp(2, &[0, 1, 0]), vec![(0.1, 0.0)]),
        ]);
        let rect = HashMap::from([
            (rp(&[0, 0, 1]), vec![(1.8, 1.8)]),
            (rp(&[1, 0, 0]), vec![(0.7, 0.7)]),
        ]);
        (circ, rect)
    }

    #[test]
    fn tiny3_incumbent_is_valid() {
        let inst = tiny3();
        let (circ, rect) = witnesses();
        let sel = PatternSelection {
            circular: vec![(cp(0, &[0, 0, 0]), 2), (cp(1, &[1, 0, 0]), 1), (cp(2, &[0, 1, 0]), 1)],
            rectangular: vec![(rp(&[0, 0, 1]), 1), (rp(&[1, 0, 0]), 1)],
        };
        let sol = reconstruct_placements(&inst, &sel, &circ, &rect).unwrap();
        assert_eq!(sol.rings.len(), 4);
        assert_eq!(sol.rectangle_count, 2);
        assert!(validate_solution(&inst, &sol, 1e-9).feasible);
    }

    #[test]
    fn violated_recursion_row() {
        let inst = tiny3();
        let (circ, rect) = witnesses();
        let sel = PatternSelection {
            circular: vec![(cp(0, &[0, 0, 0]), 2), (cp(1, &[1, 0, 0]), 1), (cp(2, &[0, 1, 0]), 1)],
            rectangular: vec![(rp(&[0, 0, 1]), 1)],
        };
        assert!(matches!(
            reconstruct_placements(&inst, &sel, &circ, &rect),
            Err(ReconstructError::InconsistentMultiset(_))
        ));
    }

    #[test]
    fn surplus_instances_and_slots() {
        let inst = tiny3();
        let (circ, rect) = witnesses();
        // a surplus type-1 instance and an unused slot
        let sel = PatternSelection {
            circular: vec![(cp(0, &[0, 0, 0]), 3), (cp(1, &[1, 0, 0]), 1), (cp(2, &[0, 1, 0]), 1)],
            rectangular: vec![(rp(&[0, 0, 1]), 2), (rp(&[1, 0, 0]), 2)],
        };
        let sol = reconstruct_placements(&inst, &sel, &circ, &rect).unwrap();
        assert_eq!(sol.rings.len(), 4);
        // the second type-3 slot stays empty and its rectangle is dropped
        assert_eq!(sol.rectangle_count, 3);
        assert!(validate_solution(&inst, &sol, 1e-9).feasible);
    }

    #[test]
    fn fallback_nests_chains() {
        let inst = tiny3();
        let sol = fallback_solution(&inst, 1e-9);
        // chain 3 > 2 > 1, then a lone type-1 ring
        assert_eq!(sol.rectangle_count, 2);
        assert!(validate_solution(&inst, &sol, 1e-9).feasible);
    }
}
