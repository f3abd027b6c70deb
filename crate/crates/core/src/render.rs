//! SVG drawings of placed solutions.

use std::fmt::Write;

use crate::model::{Instance, PlacedSolution, Placement, SolutionFile};

const GAP: f64 = 0.1;
const PIXELS_PER_UNIT: f64 = 100.0;

/// Six decimals without trailing zeros.
fn num(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Rectangles side by side, each ring as an outer disk with its hole cut out.
/// Containers are drawn before what they hold.
pub fn render_svg(file: &SolutionFile) -> String {
    let (w, h) = (file.width, file.height);
    let sol = &file.solution;
    let n = sol.rectangle_count.max(1) as f64;
    let total_w = n * w + (n + 1.0) * GAP * w;
    let total_h = h + 2.0 * GAP * w;
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{:.0}" height="{:.0}" viewBox="0 0 {} {}">"#,
        total_w * PIXELS_PER_UNIT,
        total_h * PIXELS_PER_UNIT,
        num(total_w),
        num(total_h)
    );
    let stroke = num(0.004 * w.max(h));
    let origin = |r: usize| (GAP * w + r as f64 * (w + GAP * w), GAP * w);
    for r in 0..sol.rectangle_count {
        let (ox, oy) = origin(r);
        let _ = writeln!(
            out,
            r#"  <rect x="{}" y="{}" width="{}" height="{}" fill="white" stroke="black" stroke-width="{stroke}"/>"#,
            num(ox),
            num(oy),
            num(w),
            num(h)
        );
    }
    for i in drawing_order(sol) {
        let ring = &sol.rings[i];
        let Some(rect) = sol.rectangle_of(i) else { continue };
        let Some(&(inner, outer)) = file.radii.get(ring.type_index) else { continue };
        let (ox, oy) = origin(rect);
        // flip y so the rectangle origin is at the bottom left
        let cx = num(ox + ring.center_x);
        let cy = num(oy + h - ring.center_y);
        let (inner, outer) = (num(inner), num(outer));
        let _ = writeln!(out, r#"  <g class="ring" data-type="{}">"#, ring.type_index + 1);
        let _ = writeln!(
            out,
            r#"    <circle cx="{cx}" cy="{cy}" r="{outer}" fill="dimgray" stroke="black" stroke-width="{stroke}"/>"#
        );
        let _ = writeln!(
            out,
            r#"    <circle cx="{cx}" cy="{cy}" r="{inner}" fill="white" stroke="black" stroke-width="{stroke}"/>"#
        );
        let _ = writeln!(out, "  </g>");
    }
    out.push_str("</svg>\n");
    out
}

pub fn render_solution(instance: &Instance, solution: &PlacedSolution) -> String {
    render_svg(&SolutionFile {
        solution: solution.clone(),
        width: instance.width,
        height: instance.height,
        radii: instance
            .types()
            .iter()
            .map(|t| (t.inner_radius, t.outer_radius))
            .collect(),
    })
}

/// Ring indices sorted by nesting depth, then index.
fn drawing_order(sol: &PlacedSolution) -> Vec<usize> {
    let depth = |i: usize| {
        let mut d = 0usize;
        let mut cur = i;
        while let Some(Placement::Ring(p)) = sol.rings.get(cur).map(|r| r.container) {
            d += 1;
            cur = p;
            if d > sol.rings.len() {
                break;
            }
        }
        d
    };
    let mut order: Vec<usize> = (0..sol.rings.len()).collect();
    order.sort_by_key(|&i| (depth(i), i));
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{PlacedRing, RingType};

    #[test]
    fn structure() {
        let inst = Instance::new(
            4.0,
            4.0,
            vec![RingType::new(0.5, 0.7, 1), RingType::new(1.0, 1.2, 1)],
            "two",
        )
        .unwrap();
        let sol = PlacedSolution {
            rings: vec![
                PlacedRing {
                    type_index: 0,
                    center_x: 2.0,
                    center_y: 2.0,
                    container: Placement::Ring(1),
                },
                PlacedRing {
                    type_index: 1,
                    center_x: 2.0,
                    center_y: 2.0,
                    container: Placement::Rectangle(0),
                },
            ],
            rectangle_count: 2,
        };
        let svg = render_solution(&inst, &sol);
        assert_eq!(svg.matches("<rect").count(), 2);
        assert_eq!(svg.matches("<g class=\"ring\"").count(), 2);
        assert_eq!(svg.matches("<circle").count(), 4);
        // the container comes first
        assert!(svg.find("data-type=\"2\"").unwrap() < svg.find("data-type=\"1\"").unwrap());
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
