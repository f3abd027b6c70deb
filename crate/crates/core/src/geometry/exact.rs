//! Spatial branch-and-bound over circle center boxes.
//!
//! A node assigns each circle an axis-aligned box of admissible centers. Nodes
//! are pruned when a pair or containment constraint is violated by more than the
//! tolerance over the whole box, and accepted when a repaired midpoint placement
//! passes [`check_placements`](super::check_placements).
//!
//! Symmetry reductions (all exact, so they never change the verdict):
//! equal circles are ordered by x; in a disk the first of the largest circles is
//! rotated onto the negative x-axis and is the farthest of its class from the
//! center, and the second circle is reflected into `y >= 0`; in a rectangle the
//! first circle is reflected into the lower-left quadrant.

use std::time::Instant;

use super::{check_placements, CircleMultiset, Container, UnknownReason, Verdict, VerifyLimits};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub symmetry_breaking: bool,
    pub local_repair: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            symmetry_breaking: true,
            local_repair: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    fn width(&self) -> f64 {
        self.hi - self.lo
    }

    fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    /// Smallest absolute value attained.
    fn min_abs(&self) -> f64 {
        if self.lo > 0.0 {
            self.lo
        } else if self.hi < 0.0 {
            -self.hi
        } else {
            0.0
        }
    }

    fn intersect(&mut self, lo: f64, hi: f64) -> bool {
        let before = *self;
        self.lo = self.lo.max(lo);
        self.hi = self.hi.min(hi);
        *self != before
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct CenterBox {
    x: Interval,
    y: Interval,
}

impl CenterBox {
    fn is_empty(&self) -> bool {
        self.x.is_empty() || self.y.is_empty()
    }

    fn min_norm(&self) -> f64 {
        self.x.min_abs().hypot(self.y.min_abs())
    }

    fn max_size(&self) -> f64 {
        self.x.width().max(self.y.width())
    }

    fn mid(&self) -> (f64, f64) {
        (self.x.mid(), self.y.mid())
    }
}

fn max_dist(a: &CenterBox, b: &CenterBox) -> f64 {
    let dx = (a.x.hi - b.x.lo).abs().max((b.x.hi - a.x.lo).abs());
    let dy = (a.y.hi - b.y.lo).abs().max((b.y.hi - a.y.lo).abs());
    dx.hypot(dy)
}

/// Clips a box to the disk of radius `rho` around the origin. `false` if empty.
fn clip_to_disk(b: &mut CenterBox, rho: f64) -> bool {
    if rho < 0.0 {
        return false;
    }
    let r2 = rho * rho;
    let ymin = b.y.min_abs();
    if ymin * ymin > r2 {
        return false;
    }
    let xr = (r2 - ymin * ymin).sqrt();
    b.x.intersect(-xr, xr);
    if b.x.is_empty() {
        return false;
    }
    let xmin = b.x.min_abs();
    if xmin * xmin > r2 {
        return false;
    }
    let yr = (r2 - xmin * xmin).sqrt();
    b.y.intersect(-yr, yr);
    !b.y.is_empty()
}

struct Problem {
    container: Container,
    /// radii in search order (descending)
    radii: Vec<f64>,
    /// class id per search index; equal radii share a class
    class: Vec<usize>,
    /// search index -> expansion index
    to_expansion: Vec<usize>,
    tol: f64,
    symmetry: bool,
    repair: bool,
}

impl Problem {
    fn containment_radius(&self, i: usize) -> f64 {
        match self.container {
            Container::Disk { radius } => radius - self.radii[i] + self.tol,
            Container::Rectangle { .. } => f64::INFINITY,
        }
    }

    fn root(&self) -> Option<Vec<CenterBox>> {
        let n = self.radii.len();
        let mut boxes = Vec::with_capacity(n);
        for i in 0..n {
            let r = self.radii[i];
            let b = match self.container {
                Container::Disk { radius } => {
                    let a = radius - r + self.tol;
                    CenterBox {
                        x: Interval::new(-a, a),
                        y: Interval::new(-a, a),
                    }
                }
                Container::Rectangle { width, height } => CenterBox {
                    x: Interval::new(r - self.tol, width - r + self.tol),
                    y: Interval::new(r - self.tol, height - r + self.tol),
                },
            };
            if b.is_empty() {
                return None;
            }
            boxes.push(b);
        }
        if self.symmetry && n > 0 {
            match self.container {
                Container::Disk { .. } => {
                    boxes[0].y = Interval::new(0.0, 0.0);
                    boxes[0].x.intersect(f64::NEG_INFINITY, 0.0);
                    if n > 1 {
                        boxes[1].y.intersect(0.0, f64::INFINITY);
                    }
                }
                Container::Rectangle { width, height } => {
                    boxes[0].x.intersect(f64::NEG_INFINITY, 0.5 * width);
                    boxes[0].y.intersect(f64::NEG_INFINITY, 0.5 * height);
                }
            }
            if boxes.iter().any(CenterBox::is_empty) {
                return None;
            }
        }
        Some(boxes)
    }

    /// Contracts boxes and checks for infeasibility over the node. `false` prunes.
    fn propagate(&self, boxes: &mut [CenterBox]) -> bool {
        let n = boxes.len();
        for _round in 0..4 {
            let mut changed = false;
            if let Container::Disk { .. } = self.container {
                for (i, b) in boxes.iter_mut().enumerate() {
                    let before = *b;
                    if !clip_to_disk(b, self.containment_radius(i)) {
                        return false;
                    }
                    changed |= *b != before;
                }
            }
            if self.symmetry {
                for k in 0..n.saturating_sub(1) {
                    if self.class[k] == self.class[k + 1] {
                        let lo = boxes[k].x.lo;
                        let hi = boxes[k + 1].x.hi;
                        changed |= boxes[k + 1].x.intersect(lo, f64::INFINITY);
                        changed |= boxes[k].x.intersect(f64::NEG_INFINITY, hi);
                        if boxes[k].is_empty() || boxes[k + 1].is_empty() {
                            return false;
                        }
                    }
                }
                if let Container::Disk { .. } = self.container {
                    // the first circle is the farthest of its class from the center
                    let far = -boxes[0].x.lo;
                    for j in 1..n {
                        if self.class[j] != self.class[0] {
                            break;
                        }
                        let before = boxes[j];
                        if !clip_to_disk(&mut boxes[j], far) {
                            return false;
                        }
                        changed |= boxes[j] != before;
                        let near = boxes[j].min_norm();
                        changed |= boxes[0].x.intersect(f64::NEG_INFINITY, -near);
                        if boxes[0].is_empty() {
                            return false;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let need = self.radii[i] + self.radii[j] - self.tol;
                if max_dist(&boxes[i], &boxes[j]) < need {
                    return false;
                }
            }
        }
        true
    }

    fn circles(&self, pos: &[(f64, f64)]) -> Vec<(f64, (f64, f64))> {
        self.radii.iter().copied().zip(pos.iter().copied()).collect()
    }

    fn try_accept(&self, boxes: &[CenterBox]) -> Option<Vec<(f64, f64)>> {
        let mut pos: Vec<(f64, f64)> = boxes.iter().map(CenterBox::mid).collect();
        if check_placements(&self.container, &self.circles(&pos), self.tol) {
            return Some(pos);
        }
        if self.repair && repair(&self.container, &self.radii, &mut pos, self.tol)
        {
            return Some(pos);
        }
        None
    }

    fn to_witness(&self, pos: &[(f64, f64)]) -> Vec<(f64, f64)> {
        let mut w = vec![(0.0, 0.0); pos.len()];
        for (k, &p) in pos.iter().enumerate() {
            w[self.to_expansion[k]] = p;
        }
        w
    }
}

/// Pushes overlapping pairs apart and projects back into the container.
fn repair(container: &Container, radii: &[f64], pos: &mut [(f64, f64)], tol: f64) -> bool {
    let n = pos.len();
    for _ in 0..40 {
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let dx = pos[j].0 - pos[i].0;
                let dy = pos[j].1 - pos[i].1;
                let d = dx.hypot(dy);
                let need = radii[i] + radii[j];
                if d < need {
                    worst = worst.max(need - d);
                    let (ux, uy) = if d > 1e-12 {
                        (dx / d, dy / d)
                    } else {
                        let a = (i * 7 + j * 13) as f64;
                        (a.cos(), a.sin())
                    };
                    let push = 0.5 * (need - d) * (1.0 + 1e-9);
                    pos[i].0 -= ux * push;
                    pos[i].1 -= uy * push;
                    pos[j].0 += ux * push;
                    pos[j].1 += uy * push;
                }
            }
        }
        for (p, &r) in pos.iter_mut().zip(radii) {
            match *container {
                Container::Disk { radius } => {
                    let lim = (radius - r).max(0.0);
                    let d = p.0.hypot(p.1);
                    if d > lim {
                        worst = worst.max(d - lim);
                        let s = if d > 0.0 { lim / d } else { 0.0 };
                        p.0 *= s;
                        p.1 *= s;
                    }
                }
                Container::Rectangle { width, height } => {
                    let cx = p.0.clamp(r, (width - r).max(r));
                    let cy = p.1.clamp(r, (height - r).max(r));
                    worst = worst.max((cx - p.0).abs()).max((cy - p.1).abs());
                    *p = (cx, cy);
                }
            }
        }
        if worst <= tol {
            let circles: Vec<(f64, (f64, f64))> =
                radii.iter().copied().zip(pos.iter().copied()).collect();
            if check_placements(container, &circles, tol) {
                return true;
            }
        }
    }
    let circles: Vec<(f64, (f64, f64))> = radii.iter().copied().zip(pos.iter().copied()).collect();
    check_placements(container, &circles, tol)
}

/// Complete search with default options.
pub fn verify_exact(container: &Container, multiset: &CircleMultiset, limits: &VerifyLimits) -> Verdict {
    verify_exact_with(container, multiset, limits, SearchOptions::default())
}

pub fn verify_exact_with(
    container: &Container,
    multiset: &CircleMultiset,
    limits: &VerifyLimits,
    options: SearchOptions,
) -> Verdict {
    let start = Instant::now();
    if limits.time_limit.is_zero() {
        return Verdict::Unknown(UnknownReason::TimeLimit);
    }
    let expansion = multiset.radii();
    let n = expansion.len();
    if n == 0 {
        return Verdict::Feasible(Vec::new());
    }
    let to_expansion: Vec<usize> = (0..n).rev().collect();
    let radii: Vec<f64> = to_expansion.iter().map(|&e| expansion[e]).collect();
    let mut class = vec![0usize; n];
    for k in 1..n {
        class[k] = if radii[k] == radii[k - 1] { class[k - 1] } else { class[k - 1] + 1 };
    }
    let problem = Problem {
        container: *container,
        radii,
        class,
        to_expansion,
        tol: limits.tolerance,
        symmetry: options.symmetry_breaking,
        repair: options.local_repair,
    };
    let Some(root) = problem.root() else {
        return Verdict::Infeasible;
    };
    let scale = container.inradius().max(1.0);
    let mut stack = vec![root];
    let mut nodes: u64 = 0;
    while let Some(mut boxes) = stack.pop() {
        nodes += 1;
        if nodes > limits.node_limit {
            return Verdict::Unknown(UnknownReason::NodeLimit);
        }
        if nodes % 64 == 0 && start.elapsed() >= limits.time_limit {
            return Verdict::Unknown(UnknownReason::TimeLimit);
        }
        if !problem.propagate(&mut boxes) {
            continue;
        }
        if let Some(pos) = problem.try_accept(&boxes) {
            return Verdict::Feasible(problem.to_witness(&pos));
        }
        // branch on the largest box, splitting its longest side
        let (pick, size) = boxes
            .iter()
            .enumerate()
            .map(|(i, b)| (i, b.max_size()))
            .fold((0, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if size <= 1e-13 * scale {
            // inside the tolerance band: no witness, treat as exhausted
            continue;
        }
        let b = boxes[pick];
        let (mut lower, mut upper) = (boxes.clone(), boxes);
        if b.x.width() >= b.y.width() {
            let m = b.x.mid();
            lower[pick].x.hi = m;
            upper[pick].x.lo = m;
        } else {
            let m = b.y.mid();
            lower[pick].y.hi = m;
            upper[pick].y.lo = m;
        }
        stack.push(upper);
        stack.push(lower);
    }
    Verdict::Infeasible
}
