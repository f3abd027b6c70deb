//! Geometric validation of placed solutions and the volume lower bound.

use serde::{Deserialize, Serialize};

use crate::model::{Instance, PlacedSolution, Placement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ViolationKind {
    BoundaryX,
    BoundaryY,
    Overlap,
    ContainmentBreach,
    DemandShortfall,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Ring indices for geometric violations; the type index for demand shortfalls.
    pub rings: Vec<usize>,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        Self {
            feasible: violations.is_empty(),
            violations,
        }
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }
}

/// Checks boundary containment, pairwise disjointness, nesting and demand coverage.
pub fn validate_solution(
    instance: &Instance,
    solution: &PlacedSolution,
    tolerance: f64,
) -> ValidationReport {
    let rings = &solution.rings;
    let n = rings.len();
    let mut violations = Vec::new();

    // parent links and the rectangle of each ring
    let mut rect = vec![None; n];
    let mut depth_ok = vec![true; n];
    for i in 0..n {
        if rings[i].type_index >= instance.num_types() {
            violations.push(Violation {
                kind: ViolationKind::ContainmentBreach,
                rings: vec![i],
                magnitude: f64::INFINITY,
            });
            depth_ok[i] = false;
            continue;
        }
        match solution.rectangle_of(i) {
            Some(r) if r < solution.rectangle_count => rect[i] = Some(r),
            _ => {
                violations.push(Violation {
                    kind: ViolationKind::ContainmentBreach,
                    rings: vec![i],
                    magnitude: f64::INFINITY,
                });
                depth_ok[i] = false;
            }
        }
    }

    let ty = |i: usize| instance.ring_type(rings[i].type_index);
    for i in 0..n {
        if !depth_ok[i] {
            continue;
        }
        let ring = &rings[i];
        let outer = ty(i).outer_radius;
        match ring.container {
            Placement::Rectangle(_) => {
                let w = instance.width;
                let h = instance.height;
                let bx = (outer - ring.center_x).max(ring.center_x - (w - outer));
                if bx > tolerance {
                    violations.push(Violation {
                        kind: ViolationKind::BoundaryX,
                        rings: vec![i],
                        magnitude: bx,
                    });
                }
                let by = (outer - ring.center_y).max(ring.center_y - (h - outer));
                if by > tolerance {
                    violations.push(Violation {
                        kind: ViolationKind::BoundaryY,
                        rings: vec![i],
                        magnitude: by,
                    });
                }
            }
            Placement::Ring(p) => {
                if !depth_ok[p] {
                    continue;
                }
                let hole = ty(p).inner_radius;
                let d = dist(rings[i].center_x - rings[p].center_x, rings[i].center_y - rings[p].center_y);
                let breach = d - (hole - outer);
                if breach > tolerance || outer > ty(p).outer_radius {
                    violations.push(Violation {
                        kind: ViolationKind::ContainmentBreach,
                        rings: vec![i, p],
                        magnitude: breach.max(0.0),
                    });
                }
            }
        }
    }

    let is_ancestor = |a: usize, mut b: usize| -> bool {
        for _ in 0..n {
            match rings[b].container {
                Placement::Ring(p) if p == a => return true,
                Placement::Ring(p) => b = p,
                Placement::Rectangle(_) => return false,
            }
        }
        false
    };

    for i in 0..n {
        for j in (i + 1)..n {
            if !(depth_ok[i] && depth_ok[j]) || rect[i] != rect[j] {
                continue;
            }
            if is_ancestor(i, j) || is_ancestor(j, i) {
                continue;
            }
            let d = dist(rings[i].center_x - rings[j].center_x, rings[i].center_y - rings[j].center_y);
            let need = ty(i).outer_radius + ty(j).outer_radius;
            if d < need - tolerance {
                violations.push(Violation {
                    kind: ViolationKind::Overlap,
                    rings: vec![i, j],
                    magnitude: need - d,
                });
            }
        }
    }

    let mut counts = vec![0u64; instance.num_types()];
    for r in rings {
        if r.type_index < counts.len() {
            counts[r.type_index] += 1;
        }
    }
    for (t, ring_type) in instance.types().iter().enumerate() {
        if counts[t] < ring_type.demand as u64 {
            violations.push(Violation {
                kind: ViolationKind::DemandShortfall,
                rings: vec![t],
                magnitude: (ring_type.demand as u64 - counts[t]) as f64,
            });
        }
    }

    ValidationReport::from_violations(violations)
}

fn dist(dx: f64, dy: f64) -> f64 {
    dx.hypot(dy)
}

/// `max(1, ceil(total annulus material / (W H)))` for a nonempty instance.
pub fn volume_lower_bound(instance: &Instance) -> u64 {
    if instance.ring_count() == 0 {
        return 0;
    }
    let material: f64 = instance
        .types()
        .iter()
        .map(|t| t.demand as f64 * t.material_area())
        .sum();
    let ratio = material / instance.area();
    let bound = (ratio - 1e-9).ceil().max(1.0);
    bound as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{PlacedRing, RingType};

    fn ring(t: usize, x: f64, y: f64, container: Placement) -> PlacedRing {
        PlacedRing {
            type_index: t,
            center_x: x,
            center_y: y,
            container,
        }
    }

    fn tiny3() -> Instance {
        Instance::new(
            4.0,
            4.0,
            vec![
                RingType::new(0.5, 0.7, 2),
                RingType::new(1.0, 1.2, 1),
                RingType::new(1.4, 1.8, 1),
            ],
            "TINY3",
        )
        .unwrap()
    }

    #[test]
    fn corner_ring_is_feasible() {
        let inst = Instance::new(4.0, 4.0, vec![RingType::new(0.5, 1.0, 1)], "").unwrap();
        let sol = PlacedSolution {
            rings: vec![ring(0, 1.0, 1.0, Placement::Rectangle(0))],
            rectangle_count: 1,
        };
        assert!(validate_solution(&inst, &sol, 1e-9).feasible);
    }

    #[test]
    fn overlap_magnitude() {
        let inst = Instance::new(4.0, 4.0, vec![RingType::new(0.5, 1.0, 2)], "").unwrap();
        let sol = PlacedSolution {
            rings: vec![
                ring(0, 1.0, 1.0, Placement::Rectangle(0)),
                ring(0, 2.5, 1.0, Placement::Rectangle(0)),
            ],
            rectangle_count: 1,
        };
        let rep = validate_solution(&inst, &sol, 1e-9);
        assert!(!rep.feasible);
        assert_eq!(rep.violations.len(), 1);
        assert_eq!(rep.violations[0].kind, ViolationKind::Overlap);
        assert!((rep.violations[0].magnitude - 0.5).abs() < 1e-12);
    }

    #[test]
    fn tight_nesting_at_parent_center() {
        let inst = Instance::new(
            4.0,
            4.0,
            vec![RingType::new(0.0, 0.7, 1), RingType::new(0.7, 1.0, 1)],
            "",
        )
        .unwrap();
        let sol = PlacedSolution {
            rings: vec![
                ring(1, 2.0, 2.0, Placement::Rectangle(0)),
                ring(0, 2.0, 2.0, Placement::Ring(0)),
            ],
            rectangle_count: 1,
        };
        assert!(validate_solution(&inst, &sol, 1e-9).feasible);
    }

    #[test]
    fn reports_boundary_breach_and_shortfall() {
        let inst = tiny3();
        let sol = PlacedSolution {
            rings: vec![ring(2, 1.7, 2.0, Placement::Rectangle(0))],
            rectangle_count: 1,
        };
        let rep = validate_solution(&inst, &sol, 1e-9);
        assert_eq!(rep.count(ViolationKind::BoundaryX), 1);
        assert_eq!(rep.count(ViolationKind::BoundaryY), 0);
        assert_eq!(rep.count(ViolationKind::DemandShortfall), 2);
    }

    #[test]
    fn nested_ring_outside_hole_is_a_breach() {
        let inst = tiny3();
        let sol = PlacedSolution {
            rings: vec![
                ring(1, 2.0, 2.0, Placement::Rectangle(0)),
                ring(0, 2.4, 2.0, Placement::Ring(0)),
            ],
            rectangle_count: 1,
        };
        let rep = validate_solution(&inst, &sol, 1e-9);
        assert_eq!(rep.count(ViolationKind::ContainmentBreach), 1);
    }

    #[test]
    fn cyclic_parent_links_are_rejected() {
        let inst = tiny3();
        let sol = PlacedSolution {
            rings: vec![
                ring(1, 2.0, 2.0, Placement::Ring(1)),
                ring(0, 2.0, 2.0, Placement::Ring(0)),
            ],
            rectangle_count: 1,
        };
        let rep = validate_solution(&inst, &sol, 1e-9);
        assert!(!rep.feasible);
        assert!(rep.count(ViolationKind::ContainmentBreach) >= 2);
    }

    #[test]
    fn volume_bound_tiny3() {
        // ceil(pi * 2.24 / 16) = ceil(0.4398) = 1
        assert_eq!(volume_lower_bound(&tiny3()), 1);
    }

    #[test]
    fn volume_bound_clamps_to_one() {
        let inst = Instance::new(4.0, 4.0, vec![RingType::new(1.0, 1.0, 1)], "").unwrap();
        assert_eq!(volume_lower_bound(&inst), 1);
    }

    #[test]
    fn volume_bound_exact_fill() {
        // one solid disk whose area equals W*H exactly in real arithmetic
        let side = (std::f64::consts::PI).sqrt();
        let inst = Instance::new(side, side, vec![RingType::new(0.0, 1.0, 1)], "").unwrap();
        assert_eq!(volume_lower_bound(&inst), 1);
    }
}
