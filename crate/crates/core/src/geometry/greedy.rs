use super::{CircleMultiset, Container, Verdict};

/// Incremental left-most-then-lowest placement.
///
/// Candidate centers are the extreme point of the feasible center region,
/// the points where that region's boundary touches a circle tangent to an
/// already placed one, and the points tangent to two placed circles.
#[derive(Debug, Clone)]
pub struct GreedyPlacer {
    container: Container,
    tolerance: f64,
    placed: Vec<(f64, (f64, f64))>,
}

impl GreedyPlacer {
    pub fn new(container: Container, tolerance: f64) -> Self {
        Self {
            container,
            tolerance,
            placed: Vec::new(),
        }
    }

    pub fn placed(&self) -> &[(f64, (f64, f64))] {
        &self.placed
    }

    fn fits(&self, radius: f64, x: f64, y: f64) -> bool {
        let tol = self.tolerance;
        if !(x.is_finite() && y.is_finite()) || !self.container.contains(radius, x, y, tol) {
            return false;
        }
        self.placed
            .iter()
            .all(|&(r, (px, py))| (x - px).hypot(y - py) >= radius + r - tol)
    }

    fn candidates(&self, radius: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let tangent: Vec<((f64, f64), f64)> = self
            .placed
            .iter()
            .map(|&(r, c)| (c, r + radius))
            .collect();
        match self.container {
            Container::Disk { radius: rho } => {
                let a = rho - radius;
                if a < -self.tolerance {
                    return out;
                }
                let a = a.max(0.0);
                out.push((-a, 0.0));
                if a == 0.0 {
                    return out;
                }
                for &(c, d) in &tangent {
                    circle_circle((0.0, 0.0), a, c, d, &mut out);
                }
            }
            Container::Rectangle { width, height } => {
                let (x0, x1) = (radius, width - radius);
                let (y0, y1) = (radius, height - radius);
                if x1 < x0 - self.tolerance || y1 < y0 - self.tolerance {
                    return out;
                }
                let x1 = x1.max(x0);
                let y1 = y1.max(y0);
                out.extend([(x0, y0), (x0, y1), (x1, y0), (x1, y1)]);
                for &(c, d) in &tangent {
                    for x in [x0, x1] {
                        line_circle_vertical(x, c, d, &mut out);
                    }
                    for y in [y0, y1] {
                        line_circle_horizontal(y, c, d, &mut out);
                    }
                }
            }
        }
        for i in 0..tangent.len() {
            for j in (i + 1)..tangent.len() {
                circle_circle(tangent[i].0, tangent[i].1, tangent[j].0, tangent[j].1, &mut out);
            }
        }
        out
    }

    /// Left-most, then lowest feasible position for a circle of `radius`.
    pub fn best_position(&self, radius: f64) -> Option<(f64, f64)> {
        let mut best: Option<(f64, f64)> = None;
        for (x, y) in self.candidates(radius) {
            if !self.fits(radius, x, y) {
                continue;
            }
            let better = match best {
                None => true,
                Some((bx, by)) => x < bx - 1e-12 || (x <= bx + 1e-12 && y < by),
            };
            if better {
                best = Some((x, y));
            }
        }
        best
    }

    /// Places a circle if there is room; returns its center.
    pub fn try_place(&mut self, radius: f64) -> Option<(f64, f64)> {
        let pos = self.best_position(radius)?;
        self.placed.push((radius, pos));
        Some(pos)
    }
}

fn circle_circle(c1: (f64, f64), r1: f64, c2: (f64, f64), r2: f64, out: &mut Vec<(f64, f64)>) {
    let dx = c2.0 - c1.0;
    let dy = c2.1 - c1.1;
    let d = dx.hypot(dy);
    if d < 1e-14 {
        return;
    }
    let a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
    let mut h2 = r1 * r1 - a * a;
    let scale = 1e-9 * (r1 * r1 + r2 * r2).max(1.0);
    if h2 < -scale {
        return;
    }
    if h2 < 0.0 {
        h2 = 0.0;
    }
    let h = h2.sqrt();
    let px = c1.0 + a * dx / d;
    let py = c1.1 + a * dy / d;
    out.push((px - h * dy / d, py + h * dx / d));
    if h > 0.0 {
        out.push((px + h * dy / d, py - h * dx / d));
    }
}

fn line_circle_vertical(x: f64, c: (f64, f64), r: f64, out: &mut Vec<(f64, f64)>) {
    let dx = x - c.0;
    let h2 = r * r - dx * dx;
    if h2 < 0.0 {
        return;
    }
    let h = h2.sqrt();
    out.push((x, c.1 - h));
    out.push((x, c.1 + h));
}

fn line_circle_horizontal(y: f64, c: (f64, f64), r: f64, out: &mut Vec<(f64, f64)>) {
    let dy = y - c.1;
    let h2 = r * r - dy * dy;
    if h2 < 0.0 {
        return;
    }
    let h = h2.sqrt();
    out.push((c.0 - h, y));
    out.push((c.0 + h, y));
}

/// Greedy packing in order of nonincreasing radius. `Infeasible` only means the
/// heuristic failed, it is not a proof.
pub fn greedy_pack(container: &Container, multiset: &CircleMultiset, tolerance: f64) -> Verdict {
    let radii = multiset.radii();
    let mut placer = GreedyPlacer::new(*container, tolerance);
    let mut witness = vec![(0.0, 0.0); radii.len()];
    for idx in (0..radii.len()).rev() {
        match placer.try_place(radii[idx]) {
            Some(p) => witness[idx] = p,
            None => return Verdict::Infeasible,
        }
    }
    Verdict::Feasible(witness)
}
