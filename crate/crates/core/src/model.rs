//! Instance and solution data model, plus the `.rpa` and solution text formats.
//!
//! Ring types inside an [`Instance`] are always sorted by nondecreasing outer
//! radius; type indices used throughout the crate refer to that sorted order.
//! Text formats use 1-based type indices in the same sorted order.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute geometric tolerance on lengths used by feasibility checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("malformed input at line {line}, column {column}: {message}")]
    MalformedInput {
        line: usize,
        column: usize,
        message: String,
    },
    /// `type_index` is 1-based and refers to the order of appearance in the input.
    #[error("invariant violated for type {type_index}: {message}")]
    InvariantViolation { type_index: usize, message: String },
    #[error("infeasible generator parameters: {0}")]
    InfeasibleParameters(String),
}

/// One ring type: an annulus with inner radius `r_t`, outer radius `R_t` and a demand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingType {
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub demand: u32,
}

impl RingType {
    pub fn new(inner_radius: f64, outer_radius: f64, demand: u32) -> Self {
        Self {
            inner_radius,
            outer_radius,
            demand,
        }
    }

    /// Area of the annulus material.
    pub fn material_area(&self) -> f64 {
        std::f64::consts::PI
            * (self.outer_radius * self.outer_radius - self.inner_radius * self.inner_radius)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub width: f64,
    pub height: f64,
    types: Vec<RingType>,
    /// `original_order[k]` is the sorted index of the k-th type as given in the input.
    original_order: Vec<usize>,
    pub name: String,
}

impl Instance {
    /// Builds an instance, sorting the types by outer radius (stable).
    pub fn new(
        width: f64,
        height: f64,
        types: Vec<RingType>,
        name: impl Into<String>,
    ) -> Result<Self, ModelError> {
        if !(width.is_finite() && height.is_finite() && width > 0.0 && height > 0.0) {
            return Err(ModelError::InvariantViolation {
                type_index: 0,
                message: format!("rectangle dimensions must be positive, got {width} x {height}"),
            });
        }
        if types.is_empty() {
            return Err(ModelError::InvariantViolation {
                type_index: 0,
                message: "instance has no ring types".into(),
            });
        }
        let limit = width.min(height);
        for (k, t) in types.iter().enumerate() {
            let bad = |message: String| ModelError::InvariantViolation {
                type_index: k + 1,
                message,
            };
            if !(t.inner_radius.is_finite() && t.outer_radius.is_finite()) {
                return Err(bad("radii must be finite".into()));
            }
            if t.inner_radius < 0.0 {
                return Err(bad(format!("inner radius {} is negative", t.inner_radius)));
            }
            if t.outer_radius <= 0.0 {
                return Err(bad(format!("outer radius {} is not positive", t.outer_radius)));
            }
            if t.inner_radius > t.outer_radius {
                return Err(bad(format!(
                    "r>R: inner radius {} exceeds outer radius {}",
                    t.inner_radius, t.outer_radius
                )));
            }
            if t.outer_radius > limit {
                return Err(bad(format!(
                    "outer radius {} exceeds min(W, H) = {limit}",
                    t.outer_radius
                )));
            }
        }
        let mut idx: Vec<usize> = (0..types.len()).collect();
        idx.sort_by(|&a, &b| types[a].outer_radius.total_cmp(&types[b].outer_radius));
        let sorted: Vec<RingType> = idx.iter().map(|&k| types[k]).collect();
        let mut original_order = vec![0; types.len()];
        for (sorted_pos, &orig) in idx.iter().enumerate() {
            original_order[orig] = sorted_pos;
        }
        Ok(Self {
            width,
            height,
            types: sorted,
            original_order,
            name: name.into(),
        })
    }

    pub fn types(&self) -> &[RingType] {
        &self.types
    }

    pub fn ring_type(&self, t: usize) -> &RingType {
        &self.types[t]
    }

    pub fn num_types(&self) -> usize {
        self.types.len()
    }

    /// Total number of demanded rings `n`.
    pub fn ring_count(&self) -> u64 {
        self.types.iter().map(|t| t.demand as u64).sum()
    }

    pub fn demands(&self) -> Vec<u32> {
        self.types.iter().map(|t| t.demand).collect()
    }

    pub fn outer_radii(&self) -> Vec<f64> {
        self.types.iter().map(|t| t.outer_radius).collect()
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    /// Sorted index of the k-th type in input order.
    pub fn original_order(&self) -> &[usize] {
        &self.original_order
    }

    /// Copy of this instance with different demands (sorted order).
    pub fn with_demands(&self, demands: &[u32]) -> Self {
        assert_eq!(demands.len(), self.types.len());
        let mut out = self.clone();
        for (t, &d) in out.types.iter_mut().zip(demands) {
            t.demand = d;
        }
        out
    }

    /// A type `s` can be nested into the hole of type `t` only when it is smaller
    /// in the sorted order and its outer radius fits the hole.
    pub fn fits_inside(&self, s: usize, t: usize, tol: f64) -> bool {
        s < t && self.types[s].outer_radius <= self.types[t].inner_radius + tol
    }
}

/// Where a placed ring sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Placement {
    Rectangle(usize),
    Ring(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlacedRing {
    pub type_index: usize,
    pub center_x: f64,
    pub center_y: f64,
    pub container: Placement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacedSolution {
    pub rings: Vec<PlacedRing>,
    pub rectangle_count: usize,
}

impl PlacedSolution {
    /// Rectangle index of each ring, following parent links. `None` for broken links.
    pub fn rectangle_of(&self, ring: usize) -> Option<usize> {
        let mut cur = ring;
        for _ in 0..=self.rings.len() {
            match self.rings.get(cur)?.container {
                Placement::Rectangle(r) => return Some(r),
                Placement::Ring(p) => cur = p,
            }
        }
        None
    }
}

fn parse_number(tok: &str, line: usize, column: usize) -> Result<f64, ModelError> {
    let v: f64 = tok.parse().map_err(|_| ModelError::MalformedInput {
        line,
        column,
        message: format!("expected a number, found `{tok}`"),
    })?;
    if !v.is_finite() {
        return Err(ModelError::MalformedInput {
            line,
            column,
            message: format!("non-finite number `{tok}`"),
        });
    }
    Ok(v)
}

/// Whitespace-separated tokens with their 1-based column.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

/// Parses the `.rpa` format: `W H` on the first data line, then one `r R D` line per
/// type. Lines starting with `#` are comments; a `# name: <text>` comment sets the name.
pub fn parse_instance(text: &str) -> Result<Instance, ModelError> {
    let mut dims: Option<(f64, f64)> = None;
    let mut types = Vec::new();
    let mut name = String::new();
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some(n) = comment.trim().strip_prefix("name:") {
                name = n.trim().to_string();
            }
            continue;
        }
        let toks = tokens(raw);
        match dims {
            None => {
                if toks.len() != 2 {
                    return Err(ModelError::MalformedInput {
                        line: line_no,
                        column: toks.get(2).map_or(1, |t| t.0),
                        message: format!("expected `W H`, found {} fields", toks.len()),
                    });
                }
                let w = parse_number(toks[0].1, line_no, toks[0].0)?;
                let h = parse_number(toks[1].1, line_no, toks[1].0)?;
                dims = Some((w, h));
            }
            Some(_) => {
                if toks.len() != 3 {
                    return Err(ModelError::MalformedInput {
                        line: line_no,
                        column: toks.get(3).map_or(1, |t| t.0),
                        message: format!("expected `r R D`, found {} fields", toks.len()),
                    });
                }
                let r = parse_number(toks[0].1, line_no, toks[0].0)?;
                let big_r = parse_number(toks[1].1, line_no, toks[1].0)?;
                let d: u32 = toks[2].1.parse().map_err(|_| ModelError::MalformedInput {
                    line: line_no,
                    column: toks[2].0,
                    message: format!("expected a nonnegative integer demand, found `{}`", toks[2].1),
                })?;
                types.push(RingType::new(r, big_r, d));
            }
        }
    }
    let (w, h) = dims.ok_or(ModelError::MalformedInput {
        line: 1,
        column: 1,
        message: "missing `W H` header".into(),
    })?;
    Instance::new(w, h, types, name)
}

/// Writes the `.rpa` text in the original input order so that parsing reproduces the instance.
pub fn write_instance(instance: &Instance) -> String {
    let mut out = String::new();
    if !instance.name.is_empty() {
        let _ = writeln!(out, "# name: {}", instance.name);
    }
    let _ = writeln!(out, "{} {}", instance.width, instance.height);
    for &sorted in &instance.original_order {
        let t = &instance.types[sorted];
        let _ = writeln!(out, "{} {} {}", t.inner_radius, t.outer_radius, t.demand);
    }
    out
}

/// Rounds to 12 significant digits and prints the shortest decimal for that value.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{:.11e}", x).parse().unwrap_or(x);
    format!("{}", rounded)
}

/// Solution text format:
///
/// ```text
/// # rcpp solution v1
/// rectangles <count>
/// type <t> <r_t> <R_t>          (one per type, 1-based t)
/// rings <n>
/// <t> <rect> <parent|-1> <x> <y> (one per ring)
/// ```
///
/// `rect` is the 0-based rectangle index, `parent` the 0-based index of the
/// containing ring or -1 when the ring lies directly in the rectangle.
pub fn write_solution(instance: &Instance, solution: &PlacedSolution) -> String {
    let mut out = String::from("# rcpp solution v1\n");
    let _ = writeln!(out, "rectangles {}", solution.rectangle_count);
    let _ = writeln!(out, "size {} {}", instance.width, instance.height);
    for (t, ty) in instance.types().iter().enumerate() {
        let _ = writeln!(out, "type {} {} {}", t + 1, ty.inner_radius, ty.outer_radius);
    }
    let _ = writeln!(out, "rings {}", solution.rings.len());
    for (i, ring) in solution.rings.iter().enumerate() {
        let rect = solution.rectangle_of(i).map_or(-1, |r| r as i64);
        let parent = match ring.container {
            Placement::Rectangle(_) => -1,
            Placement::Ring(p) => p as i64,
        };
        let _ = writeln!(
            out,
            "{} {} {} {} {}",
            ring.type_index + 1,
            rect,
            parent,
            format_sig12(ring.center_x),
            format_sig12(ring.center_y)
        );
    }
    out
}

/// A parsed solution file: the solution plus the geometry it was written against.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionFile {
    pub solution: PlacedSolution,
    pub width: f64,
    pub height: f64,
    /// `(inner, outer)` radius per type, sorted order.
    pub radii: Vec<(f64, f64)>,
}

pub fn parse_solution(text: &str) -> Result<SolutionFile, ModelError> {
    let mut rect_count = None;
    let mut size = None;
    let mut radii: Vec<(usize, f64, f64)> = Vec::new();
    let mut expected_rings = None;
    let mut rings = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let toks = tokens(raw);
        let malformed = |column: usize, message: String| ModelError::MalformedInput {
            line: line_no,
            column,
            message,
        };
        let int = |i: usize| -> Result<i64, ModelError> {
            let (col, tok) = toks[i];
            tok.parse::<i64>()
                .map_err(|_| malformed(col, format!("expected an integer, found `{tok}`")))
        };
        match toks[0].1 {
            "rectangles" if toks.len() == 2 => rect_count = Some(int(1)?.max(0) as usize),
            "size" if toks.len() == 3 => {
                size = Some((
                    parse_number(toks[1].1, line_no, toks[1].0)?,
                    parse_number(toks[2].1, line_no, toks[2].0)?,
                ))
            }
            "type" if toks.len() == 4 => {
                let t = int(1)?;
                if t < 1 {
                    return Err(malformed(toks[1].0, "type index must be >= 1".into()));
                }
                radii.push((
                    t as usize - 1,
                    parse_number(toks[2].1, line_no, toks[2].0)?,
                    parse_number(toks[3].1, line_no, toks[3].0)?,
                ));
            }
            "rings" if toks.len() == 2 => expected_rings = Some(int(1)?.max(0) as usize),
            _ if toks.len() == 5 => {
                let t = int(0)?;
                let rect = int(1)?;
                let parent = int(2)?;
                if t < 1 {
                    return Err(malformed(toks[0].0, "type index must be >= 1".into()));
                }
                let x = parse_number(toks[3].1, line_no, toks[3].0)?;
                let y = parse_number(toks[4].1, line_no, toks[4].0)?;
                let container = if parent >= 0 {
                    Placement::Ring(parent as usize)
                } else if rect >= 0 {
                    Placement::Rectangle(rect as usize)
                } else {
                    return Err(malformed(toks[1].0, "ring has neither rectangle nor parent".into()));
                };
                rings.push(PlacedRing {
                    type_index: t as usize - 1,
                    center_x: x,
                    center_y: y,
                    container,
                });
            }
            other => return Err(malformed(toks[0].0, format!("unrecognized record `{other}`"))),
        }
    }
    let rectangle_count = rect_count.ok_or(ModelError::MalformedInput {
        line: 1,
        column: 1,
        message: "missing `rectangles` header".into(),
    })?;
    if let Some(n) = expected_rings {
        if n != rings.len() {
            return Err(ModelError::MalformedInput {
                line: 1,
                column: 1,
                message: format!("header announces {n} rings, found {}", rings.len()),
            });
        }
    }
    radii.sort_by_key(|r| r.0);
    let (width, height) = size.unwrap_or((0.0, 0.0));
    Ok(SolutionFile {
        solution: PlacedSolution {
            rings,
            rectangle_count,
        },
        width,
        height,
        radii: radii.into_iter().map(|(_, r, big)| (r, big)).collect(),
    })
}
