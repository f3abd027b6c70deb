use super::{CircleMultiset, Container, Verdict};

/// Largest radius of three equal circles that fit a disk of radius `rho`.
pub fn three_in_disk_threshold(rho: f64) -> f64 {
    (2.0 * 3f64.sqrt() - 3.0) * rho
}

/// Cheap certificates: area and inradius arguments for infeasibility, and closed
/// forms for up to three equal circles in a disk. `None` when nothing is certified.
pub fn analytic_prefilter(
    container: &Container,
    multiset: &CircleMultiset,
    tolerance: f64,
) -> Option<Verdict> {
    let radii = multiset.radii();
    if radii.is_empty() {
        return Some(Verdict::Feasible(Vec::new()));
    }
    let largest = *radii.last().unwrap();
    if largest > container.inradius() + tolerance {
        return Some(Verdict::Infeasible);
    }
    // relax the area by the tolerance band on every radius
    let relaxed_area: f64 = radii
        .iter()
        .map(|&r| {
            let r = (r - tolerance).max(0.0);
            std::f64::consts::PI * r * r
        })
        .sum();
    if relaxed_area > container.area() + tolerance {
        return Some(Verdict::Infeasible);
    }
    if radii.len() == 1 {
        let c = match *container {
            Container::Disk { .. } => (0.0, 0.0),
            Container::Rectangle { width, height } => {
                (largest.min(0.5 * width), largest.min(0.5 * height))
            }
        };
        return Some(Verdict::Feasible(vec![c]));
    }
    if let Container::Disk { radius: rho } = *container {
        if multiset.entries().len() == 1 {
            let r = largest;
            let spread = (rho - r).max(0.0);
            match radii.len() {
                2 => {
                    if r > 0.5 * rho + tolerance {
                        return Some(Verdict::Infeasible);
                    }
                    return Some(Verdict::Feasible(vec![(-spread, 0.0), (spread, 0.0)]));
                }
                3 if r <= three_in_disk_threshold(rho) => {
                    let w = (0..3)
                        .map(|k| {
                            let a = std::f64::consts::PI + k as f64 * 2.0 * std::f64::consts::PI / 3.0;
                            (spread * a.cos(), spread * a.sin())
                        })
                        .collect();
                    return Some(Verdict::Feasible(w));
                }
                _ => {}
            }
        }
    }
    None
}
