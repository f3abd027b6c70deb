//! Exact solver for the recursive circle packing problem.
//!
//! Rings of several types, each an annulus with an inner and outer radius and a
//! demand, are packed into identical rectangles. A ring may hold smaller rings
//! inside its hole, recursively. The goal is to pack every demanded ring with
//! the fewest rectangles.

pub mod generate;
pub mod lp;
pub mod master;
pub mod geometry;
pub mod model;
pub mod oracle;
pub mod patterns;
pub mod pricing;
pub mod render;
pub mod solver;
pub mod validate;

pub use model::{
    parse_instance, parse_solution, write_instance, write_solution, Instance, ModelError,
    PlacedRing, PlacedSolution, Placement, RingType, SolutionFile, DEFAULT_TOLERANCE,
};
