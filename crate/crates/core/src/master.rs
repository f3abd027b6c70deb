//! The pattern-based master problem.
//!
//! Rows `0..T` are demand rows: `sum_{C with outer type t} z_C >= D_t`.
//! Rows `T..2T` are recursion rows: for each type `s`,
//! `sum_P P_s z_P + sum_C (C_s - [outer(C) = s]) z_C >= 0`.
//! Rectangular columns cost 1, circular columns cost 0. An artificial column per
//! demand row, costing `n + 1`, keeps every restricted master feasible.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::{LinearProgram, LpError, LpResult};
use crate::model::Instance;
use crate::patterns::{CircularPattern, RectangularPattern};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MasterError {
    #[error("pattern added twice: {0}")]
    DuplicatePattern(String),
    #[error("pattern not in the master: {0}")]
    UnknownPattern(String),
    #[error("pattern has {got} counts, instance has {expected} types")]
    WrongDimension { expected: usize, got: usize },
    #[error(transparent)]
    Lp(#[from] LpError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualVector {
    pub demand: Vec<f64>,
    /// recursion duals, the prices of rectangular pattern entries
    pub recursion: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct MasterModel {
    instance: Instance,
    lp: LinearProgram,
    circular: Vec<(CircularPattern, usize)>,
    circular_index: HashMap<CircularPattern, usize>,
    rectangular: Vec<(RectangularPattern, usize)>,
    rectangular_index: HashMap<RectangularPattern, usize>,
    artificial: Vec<usize>,
    fixed: Vec<CircularPattern>,
}

/// Master with the feasibility safeguard columns.
pub fn build_master(
    instance: &Instance,
    circular: &[CircularPattern],
    rectangular: &[RectangularPattern],
) -> Result<MasterModel, MasterError> {
    build_master_with(instance, circular, rectangular, true)
}

pub fn build_master_with(
    instance: &Instance,
    circular: &[CircularPattern],
    rectangular: &[RectangularPattern],
    safeguard: bool,
) -> Result<MasterModel, MasterError> {
    let t = instance.num_types();
    let mut lp = LinearProgram::new();
    for ty in instance.types() {
        lp.add_row(&[], ty.demand as f64)?;
    }
    for _ in 0..t {
        lp.add_row(&[], 0.0)?;
    }
    let mut model = MasterModel {
        instance: instance.clone(),
        lp,
        circular: Vec::new(),
        circular_index: HashMap::new(),
        rectangular: Vec::new(),
        rectangular_index: HashMap::new(),
        artificial: Vec::new(),
        fixed: Vec::new(),
    };
    if safeguard {
        let cost = instance.ring_count() as f64 + 1.0;
        for row in 0..t {
            let col = model.lp.add_column(cost, &[(row, 1.0)])?;
            model.artificial.push(col);
        }
    }
    for c in circular {
        model.add_circular_column(c.clone())?;
    }
    for p in rectangular {
        model.add_rect_column(p.clone())?;
    }
    Ok(model)
}

impl MasterModel {
    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn lp(&self) -> &LinearProgram {
        &self.lp
    }

    pub fn num_types(&self) -> usize {
        self.instance.num_types()
    }

    pub fn demand_row(&self, t: usize) -> usize {
        t
    }

    pub fn recursion_row(&self, s: usize) -> usize {
        self.num_types() + s
    }

    fn check_dim(&self, counts: &[u32]) -> Result<(), MasterError> {
        if counts.len() != self.num_types() {
            return Err(MasterError::WrongDimension {
                expected: self.num_types(),
                got: counts.len(),
            });
        }
        Ok(())
    }

    pub fn add_circular_column(&mut self, c: CircularPattern) -> Result<usize, MasterError> {
        self.check_dim(&c.counts)?;
        if self.circular_index.contains_key(&c) {
            return Err(MasterError::DuplicatePattern(format!("{c:?}")));
        }
        let t = self.num_types();
        let mut coeffs = vec![(c.outer_type, 1.0)];
        for s in 0..t {
            let a = c.counts[s] as f64 - if s == c.outer_type { 1.0 } else { 0.0 };
            if a != 0.0 {
                coeffs.push((t + s, a));
            }
        }
        let col = self.lp.add_column(0.0, &coeffs)?;
        self.circular_index.insert(c.clone(), col);
        self.circular.push((c, col));
        Ok(col)
    }

    pub fn add_rect_column(&mut self, p: RectangularPattern) -> Result<usize, MasterError> {
        self.check_dim(&p.counts)?;
        if self.rectangular_index.contains_key(&p) {
            return Err(MasterError::DuplicatePattern(format!("{p:?}")));
        }
        let t = self.num_types();
        let coeffs: Vec<(usize, f64)> = p
            .counts
            .iter()
            .enumerate()
            .filter(|e| *e.1 > 0)
            .map(|(s, &c)| (t + s, c as f64))
            .collect();
        let col = self.lp.add_column(1.0, &coeffs)?;
        self.rectangular_index.insert(p.clone(), col);
        self.rectangular.push((p, col));
        Ok(col)
    }

    /// Permanently removes a circular pattern from the relaxation.
    pub fn fix_circular_zero(&mut self, c: &CircularPattern) -> Result<(), MasterError> {
        let col = *self
            .circular_index
            .get(c)
            .ok_or_else(|| MasterError::UnknownPattern(format!("{c:?}")))?;
        self.lp.fix_column_zero(col)?;
        if !self.fixed.contains(c) {
            self.fixed.push(c.clone());
        }
        Ok(())
    }

    pub fn is_fixed(&self, c: &CircularPattern) -> bool {
        self.fixed.contains(c)
    }

    pub fn fixed(&self) -> &[CircularPattern] {
        &self.fixed
    }

    pub fn circular_patterns(&self) -> impl Iterator<Item = (&CircularPattern, usize)> {
        self.circular.iter().map(|(c, col)| (c, *col))
    }

    pub fn rectangular_patterns(&self) -> impl Iterator<Item = (&RectangularPattern, usize)> {
        self.rectangular.iter().map(|(p, col)| (p, *col))
    }

    pub fn circular_column(&self, c: &CircularPattern) -> Option<usize> {
        self.circular_index.get(c).copied()
    }

    pub fn rectangular_column(&self, p: &RectangularPattern) -> Option<usize> {
        self.rectangular_index.get(p).copied()
    }

    pub fn contains_rectangular(&self, p: &RectangularPattern) -> bool {
        self.rectangular_index.contains_key(p)
    }

    pub fn artificial_columns(&self) -> &[usize] {
        &self.artificial
    }

    pub fn lp_relax_value(&mut self) -> Result<LpResult, MasterError> {
        Ok(self.lp.solve()?)
    }

    pub fn duals(&self, result: &LpResult) -> DualVector {
        let t = self.num_types();
        DualVector {
            demand: result.duals[..t].to_vec(),
            recursion: result.duals[t..2 * t].to_vec(),
        }
    }

    /// Total value of the safeguard columns in a solution.
    pub fn artificial_activity(&self, result: &LpResult) -> f64 {
        self.artificial.iter().map(|&c| result.primal[c]).sum()
    }

    /// Rebuilds the same model from scratch, including fixings.
    pub fn rebuild(&self) -> Result<MasterModel, MasterError> {
        let circular: Vec<CircularPattern> = self.circular.iter().map(|c| c.0.clone()).collect();
        let rectangular: Vec<RectangularPattern> =
            self.rectangular.iter().map(|p| p.0.clone()).collect();
        let mut m = build_master_with(&self.instance, &circular, &rectangular, !self.artificial.is_empty())?;
        for c in &self.fixed {
            m.fix_circular_zero(c)?;
        }
        Ok(m)
    }

    /// Copy of the LP for the integer phase: safeguard columns disabled.
    pub fn lp_without_artificials(&self) -> Result<LinearProgram, MasterError> {
        let mut lp = self.lp.clone();
        for &c in &self.artificial {
            lp.fix_column_zero(c)?;
        }
        lp.clear_basis();
        Ok(lp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RingType;

    fn single(d: u32) -> Instance {
        Instance::new(4.0, 4.0, vec![RingType::new(0.0, 1.0, d)], "one").unwrap()
    }

    #[test]
    fn single_type_value_is_demand() {
        let inst = single(3);
        let mut m = build_master(
            &inst,
            &[CircularPattern::new(0, vec![0])],
            &[RectangularPattern::new(vec![1])],
        )
        .unwrap();
        let r = m.lp_relax_value().unwrap();
        assert!((r.objective - 3.0).abs() < 1e-9);
        assert_eq!(m.artificial_activity(&r), 0.0);
    }

    #[test]
    fn without_rectangles_only_the_safeguard_covers_demand() {
        let inst = single(2);
        let mut bare = build_master_with(&inst, &[CircularPattern::new(0, vec![0])], &[], false).unwrap();
        let r = bare.lp_relax_value().unwrap();
        // z_C >= 2 and -z_C >= 0
        assert_eq!(r.status, crate::lp::LpStatus::Infeasible);
        let mut safe = build_master(&inst, &[CircularPattern::new(0, vec![0])], &[]).unwrap();
        let r = safe.lp_relax_value().unwrap();
        assert!((safe.artificial_activity(&r) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn duplicates_are_rejected() {
        let inst = single(1);
        let c = CircularPattern::new(0, vec![0]);
        assert!(matches!(
            build_master(&inst, &[c.clone(), c], &[]),
            Err(MasterError::DuplicatePattern(_))
        ));
    }

    #[test]
    fn fixing_unused_column_keeps_value() {
        let inst = single(2);
        let mut m = build_master(
            &inst,
            &[CircularPattern::new(0, vec![0])],
            &[RectangularPattern::new(vec![1]), RectangularPattern::new(vec![2])],
        )
        .unwrap();
        let before = m.lp_relax_value().unwrap().objective;
        assert!((before - 1.0).abs() < 1e-9);
        let rebuilt = m.rebuild().unwrap().lp_relax_value().unwrap().objective;
        assert!((rebuilt - before).abs() < 1e-9);
    }
}
