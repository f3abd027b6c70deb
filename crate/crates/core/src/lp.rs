//! Dense bounded revised simplex for `min c x  s.t.  A x >= b,  l <= x <= u`.
//!
//! Every row is a `>=` row. Lower bounds must be finite, upper bounds may be
//! infinite. Row duals are reported for the minimization, so they are
//! nonnegative at an optimum. After a solve the final basis is kept and the next
//! solve starts from it when it is still primal feasible.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("unknown lp column {0}")]
    UnknownColumn(usize),
    #[error("unknown lp row {0}")]
    UnknownRow(usize),
    #[error("unsupported operation: {0}")]
    UnknownOperation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpTolerances {
    pub primal: f64,
    pub optimality: f64,
    pub pivot: f64,
    /// relative residual accepted by the post-solve KKT check
    pub kkt: f64,
}

impl Default for LpTolerances {
    fn default() -> Self {
        Self {
            primal: 1e-9,
            optimality: 1e-9,
            pivot: 1e-11,
            kkt: 1e-7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpResult {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    pub duals: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub warm_started: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
enum Var {
    Col(usize),
    Surplus(usize),
    Artificial(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SavedBasis {
    rows: usize,
    basic: Vec<Var>,
    at_upper: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    objective: Vec<f64>,
    columns: Vec<Vec<(usize, f64)>>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    fixed: Vec<bool>,
    rhs: Vec<f64>,
    basis: Option<SavedBasis>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn num_columns(&self) -> usize {
        self.objective.len()
    }

    /// Adds a row `sum a_j x_j >= rhs` and returns its id.
    pub fn add_row(&mut self, coefficients: &[(usize, f64)], rhs: f64) -> Result<usize, LpError> {
        let row = self.rhs.len();
        for &(j, _) in coefficients {
            if j >= self.num_columns() {
                return Err(LpError::UnknownColumn(j));
            }
        }
        for &(j, a) in coefficients {
            if a != 0.0 {
                insert_entry(&mut self.columns[j], row, a);
            }
        }
        self.rhs.push(rhs);
        self.basis = None;
        Ok(row)
    }

    /// Adds a column with bounds `[0, inf)` and returns its id.
    pub fn add_column(&mut self, objective: f64, coefficients: &[(usize, f64)]) -> Result<usize, LpError> {
        let mut col: Vec<(usize, f64)> = Vec::with_capacity(coefficients.len());
        for &(i, a) in coefficients {
            if i >= self.num_rows() {
                return Err(LpError::UnknownRow(i));
            }
            if a != 0.0 {
                insert_entry(&mut col, i, a);
            }
        }
        self.objective.push(objective);
        self.columns.push(col);
        self.lower.push(0.0);
        self.upper.push(f64::INFINITY);
        self.fixed.push(false);
        Ok(self.objective.len() - 1)
    }

    /// Sets `x_j = 0` permanently.
    pub fn fix_column_zero(&mut self, j: usize) -> Result<(), LpError> {
        if j >= self.num_columns() {
            return Err(LpError::UnknownColumn(j));
        }
        self.lower[j] = 0.0;
        self.upper[j] = 0.0;
        self.fixed[j] = true;
        Ok(())
    }

    pub fn is_fixed(&self, j: usize) -> bool {
        self.fixed.get(j).copied().unwrap_or(false)
    }

    /// Changes the bounds of a column that has not been fixed.
    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) -> Result<(), LpError> {
        if j >= self.num_columns() {
            return Err(LpError::UnknownColumn(j));
        }
        if self.fixed[j] {
            return Err(LpError::UnknownOperation(format!(
                "column {j} was fixed to zero and cannot be released"
            )));
        }
        if !lower.is_finite() || upper < lower {
            return Err(LpError::UnknownOperation(format!(
                "invalid bounds [{lower}, {upper}] for column {j}"
            )));
        }
        self.lower[j] = lower;
        self.upper[j] = upper;
        Ok(())
    }

    pub fn bounds(&self, j: usize) -> (f64, f64) {
        (self.lower[j], self.upper[j])
    }

    pub fn objective_coefficient(&self, j: usize) -> f64 {
        self.objective[j]
    }

    pub fn rhs(&self, i: usize) -> f64 {
        self.rhs[i]
    }

    pub fn column(&self, j: usize) -> &[(usize, f64)] {
        &self.columns[j]
    }

    pub fn coefficient(&self, i: usize, j: usize) -> f64 {
        self.columns[j]
            .iter()
            .find(|e| e.0 == i)
            .map(|e| e.1)
            .unwrap_or(0.0)
    }

    /// Forgets the saved basis so the next solve starts cold.
    pub fn clear_basis(&mut self) {
        self.basis = None;
    }

    pub fn solve(&mut self) -> Result<LpResult, LpError> {
        self.solve_with(&LpTolerances::default())
    }

    pub fn solve_with(&mut self, tol: &LpTolerances) -> Result<LpResult, LpError> {
        let warm = self.basis.clone();
        let first = Simplex::new(self, *tol, false).run(warm.as_ref());
        let (result, basis) = match first {
            Ok(ok) => ok,
            Err(LpError::NumericalFailure(_)) => Simplex::new(self, *tol, true).run(None)?,
            Err(e) => return Err(e),
        };
        self.basis = basis;
        Ok(result)
    }

    /// Plain text dump: objective, rows as `>=` with `col:coef` terms, then bounds.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# rcpp lp v1");
        let _ = writeln!(out, "columns {} rows {}", self.num_columns(), self.num_rows());
        out.push_str("min");
        for (j, c) in self.objective.iter().enumerate() {
            let _ = write!(out, " {j}:{c}");
        }
        out.push('\n');
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.num_rows()];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, a) in col {
                rows[i].push((j, a));
            }
        }
        for (i, terms) in rows.iter().enumerate() {
            let _ = write!(out, "row {i}");
            for (j, a) in terms {
                let _ = write!(out, " {j}:{a}");
            }
            let _ = writeln!(out, " >= {}", self.rhs[i]);
        }
        for j in 0..self.num_columns() {
            let _ = writeln!(
                out,
                "bounds {j} {} {}{}",
                self.lower[j],
                self.upper[j],
                if self.fixed[j] { " fixed" } else { "" }
            );
        }
        out
    }
}

fn insert_entry(col: &mut Vec<(usize, f64)>, row: usize, a: f64) {
    match col.iter_mut().find(|e| e.0 == row) {
        Some(e) => e.1 += a,
        None => col.push((row, a)),
    }
}

const REFACTOR_EVERY: usize = 50;
const DEGENERACY_LIMIT: usize = 50;

struct Simplex<'a> {
    lp: &'a LinearProgram,
    tol: LpTolerances,
    m: usize,
    n: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    at_upper: Vec<bool>,
    binv: Vec<f64>,
    bland: bool,
    iterations: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl<'a> Simplex<'a> {
    fn new(lp: &'a LinearProgram, tol: LpTolerances, bland: bool) -> Self {
        let m = lp.num_rows();
        let n = lp.num_columns();
        let total = n + 2 * m;
        let mut lower = vec![0.0; total];
        let mut upper = vec![f64::INFINITY; total];
        lower[..n].copy_from_slice(&lp.lower);
        upper[..n].copy_from_slice(&lp.upper);
        for u in upper.iter_mut().skip(n + m) {
            *u = 0.0;
        }
        Self {
            lp,
            tol,
            m,
            n,
            lower,
            upper,
            cost: vec![0.0; total],
            basis: Vec::new(),
            is_basic: vec![false; total],
            at_upper: vec![false; total],
            binv: vec![0.0; m * m],
            bland,
            iterations: 0,
        }
    }

    fn var_index(&self, v: Var) -> Option<usize> {
        match v {
            Var::Col(j) if j < self.n => Some(j),
            Var::Surplus(i) if i < self.m => Some(self.n + i),
            Var::Artificial(i) if i < self.m => Some(self.n + self.m + i),
            _ => None,
        }
    }

    fn var_of(&self, k: usize) -> Var {
        if k < self.n {
            Var::Col(k)
        } else if k < self.n + self.m {
            Var::Surplus(k - self.n)
        } else {
            Var::Artificial(k - self.n - self.m)
        }
    }

    fn for_column(&self, k: usize, mut f: impl FnMut(usize, f64)) {
        if k < self.n {
            for &(i, a) in &self.lp.columns[k] {
                f(i, a);
            }
        } else if k < self.n + self.m {
            f(k - self.n, -1.0);
        } else {
            f(k - self.n - self.m, 1.0);
        }
    }

    fn nonbasic_value(&self, k: usize) -> f64 {
        if self.at_upper[k] {
            self.upper[k]
        } else {
            self.lower[k]
        }
    }

    fn refactor(&mut self) -> Result<(), LpError> {
        let m = self.m;
        let mut b = vec![0.0; m * m];
        for (c, &k) in self.basis.iter().enumerate() {
            self.for_column(k, |i, a| b[i * m + c] = a);
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for c in 0..m {
            let mut p = c;
            let mut best = b[c * m + c].abs();
            for r in (c + 1)..m {
                let v = b[r * m + c].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best < 1e-12 {
                return Err(LpError::NumericalFailure("singular basis".into()));
            }
            if p != c {
                for k in 0..m {
                    b.swap(c * m + k, p * m + k);
                    inv.swap(c * m + k, p * m + k);
                }
            }
            let d = b[c * m + c];
            for k in 0..m {
                b[c * m + k] /= d;
                inv[c * m + k] /= d;
            }
            for r in 0..m {
                if r != c {
                    let f = b[r * m + c];
                    if f != 0.0 {
                        for k in 0..m {
                            b[r * m + k] -= f * b[c * m + k];
                            inv[r * m + k] -= f * inv[c * m + k];
                        }
                    }
                }
            }
        }
        self.binv = inv;
        Ok(())
    }

    fn basic_values(&self) -> Vec<f64> {
        let m = self.m;
        let mut r = self.lp.rhs.clone();
        for k in 0..(self.n + 2 * m) {
            if self.is_basic[k] {
                continue;
            }
            let v = self.nonbasic_value(k);
            if v != 0.0 {
                self.for_column(k, |i, a| r[i] -= a * v);
            }
        }
        (0..m)
            .map(|i| (0..m).map(|c| self.binv[i * m + c] * r[c]).sum())
            .collect()
    }

    fn duals(&self) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (i, &k) in self.basis.iter().enumerate() {
            let c = self.cost[k];
            if c != 0.0 {
                for (col, yc) in y.iter_mut().enumerate() {
                    *yc += c * self.binv[i * m + col];
                }
            }
        }
        y
    }

    fn reduced_cost(&self, k: usize, y: &[f64]) -> f64 {
        let mut d = self.cost[k];
        self.for_column(k, |i, a| d -= y[i] * a);
        d
    }

    fn set_basis(&mut self, basis: Vec<usize>) {
        self.is_basic.iter_mut().for_each(|b| *b = false);
        for &k in &basis {
            self.is_basic[k] = true;
            self.at_upper[k] = false;
        }
        self.basis = basis;
    }

    /// Surplus where the row is already satisfied at the bounds, artificial elsewhere.
    fn crash(&mut self) -> Result<bool, LpError> {
        let m = self.m;
        self.at_upper.iter_mut().for_each(|u| *u = false);
        for k in self.n + m..self.n + 2 * m {
            self.upper[k] = 0.0;
        }
        let mut r = self.lp.rhs.clone();
        for j in 0..self.n {
            let v = self.lower[j];
            if v != 0.0 {
                self.for_column(j, |i, a| r[i] -= a * v);
            }
        }
        let mut basis = Vec::with_capacity(m);
        let mut needs_phase1 = false;
        for (i, &ri) in r.iter().enumerate() {
            if ri <= 0.0 {
                basis.push(self.n + i);
            } else {
                let k = self.n + m + i;
                self.upper[k] = f64::INFINITY;
                basis.push(k);
                needs_phase1 = true;
            }
        }
        self.set_basis(basis);
        self.refactor()?;
        Ok(needs_phase1)
    }

    fn try_warm(&mut self, saved: &SavedBasis) -> bool {
        if saved.rows != self.m || saved.basic.len() != self.m {
            return false;
        }
        let mut basis = Vec::with_capacity(self.m);
        for &v in &saved.basic {
            match self.var_index(v) {
                Some(k) => basis.push(k),
                None => return false,
            }
        }
        self.at_upper.iter_mut().for_each(|u| *u = false);
        for &k in &saved.at_upper {
            if k < self.n && self.upper[k].is_finite() {
                self.at_upper[k] = true;
            }
        }
        self.set_basis(basis);
        if self.refactor().is_err() {
            return false;
        }
        let xb = self.basic_values();
        self.basis.iter().zip(&xb).all(|(&k, &v)| {
            let scale = 1.0 + v.abs();
            v >= self.lower[k] - self.tol.primal * scale && v <= self.upper[k] + self.tol.primal * scale
        })
    }

    fn iterate(&mut self) -> Result<Outcome, LpError> {
        let m = self.m;
        let total = self.n + 2 * m;
        let limit = 20_000 + 50 * (total + m);
        let mut since_refactor = 0usize;
        let mut degenerate = 0usize;
        loop {
            self.iterations += 1;
            if self.iterations > limit {
                return Err(LpError::NumericalFailure("iteration limit reached".into()));
            }
            if since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
                since_refactor = 0;
            }
            let y = self.duals();
            let mut entering: Option<(usize, f64)> = None;
            for k in 0..total {
                if self.is_basic[k] || self.upper[k] <= self.lower[k] {
                    continue;
                }
                let d = self.reduced_cost(k, &y);
                let score = if self.at_upper[k] { d } else { -d };
                if score > self.tol.optimality {
                    match entering {
                        None => entering = Some((k, score)),
                        Some((_, s)) if !self.bland && score > s => entering = Some((k, score)),
                        _ => {}
                    }
                    if self.bland {
                        break;
                    }
                }
            }
            let Some((q, _)) = entering else {
                return Ok(Outcome::Optimal);
            };
            let dir = if self.at_upper[q] { -1.0 } else { 1.0 };
            let mut aq = vec![0.0; m];
            self.for_column(q, |i, a| aq[i] = a);
            let w: Vec<f64> = (0..m)
                .map(|i| (0..m).map(|c| self.binv[i * m + c] * aq[c]).sum())
                .collect();
            let xb = self.basic_values();
            let mut theta = self.upper[q] - self.lower[q];
            let mut leave: Option<(usize, bool)> = None;
            for i in 0..m {
                let delta = -dir * w[i];
                let k = self.basis[i];
                let (t, to_upper) = if delta < -self.tol.pivot {
                    (((xb[i] - self.lower[k]) / -delta).max(0.0), false)
                } else if delta > self.tol.pivot && self.upper[k].is_finite() {
                    (((self.upper[k] - xb[i]) / delta).max(0.0), true)
                } else {
                    continue;
                };
                let better = if t < theta - 1e-12 {
                    true
                } else if t <= theta + 1e-12 {
                    match leave {
                        None => true,
                        Some((r, _)) if self.bland => k < self.basis[r],
                        Some((r, _)) => w[i].abs() > w[r].abs(),
                    }
                } else {
                    false
                };
                if better {
                    theta = t.min(theta);
                    leave = Some((i, to_upper));
                }
            }
            if !theta.is_finite() {
                return Ok(Outcome::Unbounded);
            }
            if theta <= 1e-12 {
                degenerate += 1;
                if degenerate > DEGENERACY_LIMIT {
                    self.bland = true;
                }
            } else {
                degenerate = 0;
            }
            match leave {
                None => {
                    self.at_upper[q] = !self.at_upper[q];
                }
                Some((r, to_upper)) => {
                    let old = self.basis[r];
                    let piv = w[r];
                    for c in 0..m {
                        self.binv[r * m + c] /= piv;
                    }
                    for i in 0..m {
                        if i != r && w[i] != 0.0 {
                            let f = w[i];
                            for c in 0..m {
                                self.binv[i * m + c] -= f * self.binv[r * m + c];
                            }
                        }
                    }
                    self.is_basic[old] = false;
                    self.at_upper[old] = to_upper && self.upper[old].is_finite();
                    self.basis[r] = q;
                    self.is_basic[q] = true;
                    self.at_upper[q] = false;
                    since_refactor += 1;
                }
            }
        }
    }

    fn primal(&self) -> Vec<f64> {
        let xb = self.basic_values();
        let mut x: Vec<f64> = (0..self.n + 2 * self.m).map(|k| self.nonbasic_value(k)).collect();
        for (i, &k) in self.basis.iter().enumerate() {
            x[k] = xb[i];
        }
        x
    }

    fn saved(&self) -> SavedBasis {
        SavedBasis {
            rows: self.m,
            basic: self.basis.iter().map(|&k| self.var_of(k)).collect(),
            at_upper: (0..self.n)
                .filter(|&k| !self.is_basic[k] && self.at_upper[k])
                .collect(),
        }
    }

    fn kkt_check(&self, x: &[f64], y: &[f64]) -> Result<(), LpError> {
        let lp = self.lp;
        let tol = self.tol.kkt;
        let mut activity = vec![0.0; self.m];
        for j in 0..self.n {
            for &(i, a) in &lp.columns[j] {
                activity[i] += a * x[j];
            }
            let s = 1.0 + x[j].abs();
            if x[j] < lp.lower[j] - tol * s || x[j] > lp.upper[j] + tol * s {
                return Err(LpError::NumericalFailure(format!("bound violated on column {j}")));
            }
        }
        for i in 0..self.m {
            if activity[i] < lp.rhs[i] - tol * (1.0 + lp.rhs[i].abs()) {
                return Err(LpError::NumericalFailure(format!("row {i} violated")));
            }
            if y[i] < -tol {
                return Err(LpError::NumericalFailure(format!("negative dual on row {i}")));
            }
        }
        let mut primal_obj = 0.0;
        let mut dual_obj: f64 = y.iter().zip(&lp.rhs).map(|(a, b)| a * b).sum();
        for j in 0..self.n {
            primal_obj += lp.objective[j] * x[j];
            let d = self.reduced_cost(j, y);
            let scale = 1.0 + lp.objective[j].abs();
            if self.is_basic[j] {
                if d.abs() > tol * scale {
                    return Err(LpError::NumericalFailure(format!("basic column {j} has reduced cost {d}")));
                }
            } else {
                if (!self.at_upper[j] && d < -tol * scale && self.upper[j] > self.lower[j])
                    || (self.at_upper[j] && d > tol * scale)
                {
                    return Err(LpError::NumericalFailure(format!("column {j} is dual infeasible")));
                }
                dual_obj += d * x[j];
            }
        }
        if (primal_obj - dual_obj).abs() > tol * (1.0 + primal_obj.abs()) {
            return Err(LpError::NumericalFailure(format!(
                "duality gap {primal_obj} vs {dual_obj}"
            )));
        }
        Ok(())
    }

    fn run(mut self, warm: Option<&SavedBasis>) -> Result<(LpResult, Option<SavedBasis>), LpError> {
        let m = self.m;
        let n = self.n;
        let warm_started = warm.is_some_and(|s| self.try_warm(s));
        if !warm_started && self.crash()? {
            for k in 0..n + 2 * m {
                self.cost[k] = if k >= n + m { 1.0 } else { 0.0 };
            }
            if let Outcome::Unbounded = self.iterate()? {
                return Err(LpError::NumericalFailure("phase one unbounded".into()));
            }
            let x = self.primal();
            let infeas: f64 = x[n + m..].iter().sum();
            let scale = 1.0 + self.lp.rhs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            for k in n + m..n + 2 * m {
                self.upper[k] = 0.0;
            }
            if infeas > 1e-7 * scale {
                let result = LpResult {
                    status: LpStatus::Infeasible,
                    primal: x[..n].to_vec(),
                    duals: vec![0.0; m],
                    objective: f64::INFINITY,
                    iterations: self.iterations,
                    warm_started,
                };
                return Ok((result, None));
            }
            self.refactor()?;
        }
        self.cost = vec![0.0; n + 2 * m];
        self.cost[..n].copy_from_slice(&self.lp.objective);
        let outcome = self.iterate()?;
        self.refactor()?;
        let x = self.primal();
        let y = self.duals();
        let objective: f64 = (0..n).map(|j| self.lp.objective[j] * x[j]).sum();
        match outcome {
            Outcome::Unbounded => Ok((
                LpResult {
                    status: LpStatus::Unbounded,
                    primal: x[..n].to_vec(),
                    duals: vec![0.0; m],
                    objective: f64::NEG_INFINITY,
                    iterations: self.iterations,
                    warm_started,
                },
                None,
            )),
            Outcome::Optimal => {
                self.kkt_check(&x, &y)?;
                let saved = self.saved();
                Ok((
                    LpResult {
                        status: LpStatus::Optimal,
                        primal: x[..n].to_vec(),
                        duals: y.into_iter().map(|v| v.max(0.0)).collect(),
                        objective,
                        iterations: self.iterations,
                        warm_started,
                    },
                    Some(saved),
                ))
            }
        }
    }
}
