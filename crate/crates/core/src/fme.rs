//! Linear rate-inequality systems and Fourier-Motzkin elimination.
//!
//! Every declared variable is implicitly nonnegative. Rows are stored in the
//! normalized form `coeffs · x <= rhs`; a `>=` row is negated on entry.
//! Constant-only conditions (no rate variables) live in `feasibility_rows`
//! and make the whole system infeasible when violated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::{maximize, LpOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
}

/// One inequality `coeffs · x <= rhs` over the system's variable list.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Row {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

/// A constant-only condition `lhs <= rhs` (for example a feasibility
/// requirement on the quantization rate after elimination).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeasibilityRow {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
}

impl FeasibilityRow {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + 1e-12
    }
}

/// Linear inequalities over named nonnegative rate variables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InequalitySystem {
    pub vars: Vec<String>,
    pub rows: Vec<Row>,
    #[serde(default)]
    pub feasibility_rows: Vec<FeasibilityRow>,
}

impl InequalitySystem {
    pub fn new(vars: Vec<String>) -> Self {
        InequalitySystem { vars, rows: Vec::new(), feasibility_rows: Vec::new() }
    }

    pub fn var_index(&self, var: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v == var)
            .ok_or_else(|| Error::UnknownVariable(var.to_string()))
    }

    /// Adds `terms · x (sense) rhs`, where `terms` pairs variable names with
    /// coefficients. Unknown names error.
    pub fn push_row(&mut self, terms: &[(&str, f64)], sense: Sense, rhs: f64) -> Result<()> {
        let mut coeffs = vec![0.0; self.vars.len()];
        for (name, c) in terms {
            let i = self.var_index(name)?;
            coeffs[i] += c;
        }
        if sense == Sense::Ge {
            coeffs.iter_mut().for_each(|c| *c = -*c);
            self.rows.push(Row { coeffs, rhs: -rhs });
        } else {
            self.rows.push(Row { coeffs, rhs });
        }
        Ok(())
    }

    pub fn push_feasibility(&mut self, label: &str, lhs: f64, rhs: f64) {
        self.feasibility_rows.push(FeasibilityRow { label: label.to_string(), lhs, rhs });
    }

    pub fn feasibility_ok(&self) -> bool {
        self.feasibility_rows.iter().all(FeasibilityRow::holds)
    }

    /// Fixes a variable to zero by adding `var <= 0` (the implicit `>= 0`
    /// closes the equality).
    pub fn pin_zero(&mut self, var: &str) -> Result<()> {
        self.push_row(&[(var, 1.0)], Sense::Le, 0.0)
    }

    /// Eliminates `var` by pairing its upper bounds with its lower bounds
    /// (including implicit nonnegativity), then prunes redundant rows.
    pub fn fme_eliminate(&self, var: &str) -> Result<InequalitySystem> {
        let idx = self.var_index(var)?;
        let mut out = InequalitySystem {
            vars: self
                .vars
                .iter()
                .filter(|v| v.as_str() != var)
                .cloned()
                .collect(),
            rows: Vec::new(),
            feasibility_rows: self.feasibility_rows.clone(),
        };
        let strip = |row: &Row| -> Vec<f64> {
            row.coeffs
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != idx)
                .map(|(_, &c)| c)
                .collect()
        };
        let mut uppers: Vec<Row> = Vec::new(); // coeff on var > 0
        let mut lowers: Vec<Row> = Vec::new(); // coeff on var < 0
        for row in &self.rows {
            let c = row.coeffs[idx];
            if c > 1e-12 {
                uppers.push(row.clone());
            } else if c < -1e-12 {
                lowers.push(row.clone());
            } else {
                out.push_normalized(Row { coeffs: strip(row), rhs: row.rhs });
            }
        }
        for u in &uppers {
            let cu = u.coeffs[idx];
            // Pair with the implicit lower bound var >= 0.
            out.push_normalized(Row { coeffs: strip(u).iter().map(|c| c / cu).collect(), rhs: u.rhs / cu });
            for l in &lowers {
                let cl = -l.coeffs[idx];
                let coeffs: Vec<f64> = strip(u)
                    .iter()
                    .zip(strip(l).iter())
                    .map(|(a, b)| a / cu + b / cl)
                    .collect();
                out.push_normalized(Row { coeffs, rhs: u.rhs / cu + l.rhs / cl });
            }
        }
        // Lower bounds without any upper partner vanish (var can absorb them
        // upward), so nothing to add for `lowers` alone.
        out.dedup_rows();
        out.lp_prune();
        Ok(out)
    }

    /// Moves constant rows out of `rows`, folding them into feasibility.
    fn push_normalized(&mut self, row: Row) {
        if row.coeffs.iter().all(|c| c.abs() < 1e-12) {
            if row.rhs < -1e-12 {
                self.feasibility_rows.push(FeasibilityRow {
                    label: "derived constant row".to_string(),
                    lhs: -row.rhs,
                    rhs: 0.0,
                });
            }
            // 0 <= rhs with rhs >= 0 is vacuous.
            return;
        }
        self.rows.push(row);
    }

    /// Removes duplicate and scaled-duplicate rows, keeping the tightest rhs.
    fn dedup_rows(&mut self) {
        let mut kept: Vec<Row> = Vec::new();
        'outer: for row in self.rows.drain(..) {
            let norm = row.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            debug_assert!(norm > 0.0);
            let scaled: Vec<f64> = row.coeffs.iter().map(|c| c / norm).collect();
            let rhs = row.rhs / norm;
            for k in kept.iter_mut() {
                let knorm = k.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
                let kscaled: Vec<f64> = k.coeffs.iter().map(|c| c / knorm).collect();
                if scaled
                    .iter()
                    .zip(&kscaled)
                    .all(|(a, b)| (a - b).abs() < 1e-10)
                {
                    if rhs < k.rhs / knorm {
                        *k = Row { coeffs: scaled, rhs };
                    }
                    continue 'outer;
                }
            }
            kept.push(Row { coeffs: scaled, rhs });
        }
        self.rows = kept;
        self.rows.sort_by(|a, b| {
            a.coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| x.partial_cmp(y).unwrap())
                .find(|o| o.is_ne())
                .unwrap_or_else(|| a.rhs.partial_cmp(&b.rhs).unwrap())
        });
    }

    /// Drops every row whose removal leaves the feasible set unchanged,
    /// verified with an exact LP per row.
    fn lp_prune(&mut self) {
        let mut i = 0;
        while i < self.rows.len() {
            let candidate = self.rows[i].clone();
            let others: Vec<Vec<f64>> = self
                .rows
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, r)| r.coeffs.clone())
                .collect();
            let rhs: Vec<f64> = self
                .rows
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, r)| r.rhs)
                .collect();
            let redundant = match maximize(&candidate.coeffs, &others, &rhs) {
                LpOutcome::Optimal(v) => v <= candidate.rhs + 1e-9,
                LpOutcome::Infeasible => true,
                LpOutcome::Unbounded => false,
            };
            if redundant {
                self.rows.remove(i);
            } else {
                i += 1;
            }
        }
    }

    /// True when `{x >= 0 : rows}` is empty or a feasibility row fails.
    pub fn is_infeasible(&self) -> bool {
        if !self.feasibility_ok() {
            return true;
        }
        let zeros = vec![0.0; self.vars.len()];
        let rows: Vec<Vec<f64>> = self.rows.iter().map(|r| r.coeffs.clone()).collect();
        let rhs: Vec<f64> = self.rows.iter().map(|r| r.rhs).collect();
        matches!(maximize(&zeros, &rows, &rhs), LpOutcome::Infeasible)
    }

    /// Maximum of a linear functional over the feasible set.
    pub fn maximize(&self, objective: &[(&str, f64)]) -> Result<LpOutcome> {
        let mut c = vec![0.0; self.vars.len()];
        for (name, v) in objective {
            c[self.var_index(name)?] += v;
        }
        let rows: Vec<Vec<f64>> = self.rows.iter().map(|r| r.coeffs.clone()).collect();
        let rhs: Vec<f64> = self.rows.iter().map(|r| r.rhs).collect();
        Ok(maximize(&c, &rows, &rhs))
    }

    /// Eliminates every variable except `keep`, cheapest pairing first.
    pub fn eliminate_all_except(&self, keep: &[&str]) -> Result<InequalitySystem> {
        let mut sys = self.clone();
        loop {
            let targets: Vec<String> = sys
                .vars
                .iter()
                .filter(|v| !keep.contains(&v.as_str()))
                .cloned()
                .collect();
            if targets.is_empty() {
                return Ok(sys);
            }
            // Heuristic: eliminate the variable with the fewest upper*lower
            // pairings first; ties break by name for determinism.
            let mut best: Option<(usize, &String)> = None;
            for v in &targets {
                let idx = sys.var_index(v)?;
                let ups = sys.rows.iter().filter(|r| r.coeffs[idx] > 1e-12).count();
                let downs = sys.rows.iter().filter(|r| r.coeffs[idx] < -1e-12).count();
                let cost = ups * (downs + 1);
                if best.is_none_or(|(c, bv)| cost < c || (cost == c && v < bv)) {
                    best = Some((cost, v));
                }
            }
            let var = best.expect("nonempty targets").1.clone();
            sys = sys.fme_eliminate(&var)?;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(vars: &[&str]) -> InequalitySystem {
        InequalitySystem::new(vars.iter().map(|s| s.to_string()).collect())
    }

    #[test]
    fn eliminate_chained_bound() {
        // {x <= 1, y <= x} over nonnegative x, y: eliminating x leaves y <= 1.
        let mut s = sys(&["x", "y"]);
        s.push_row(&[("x", 1.0)], Sense::Le, 1.0).unwrap();
        s.push_row(&[("y", 1.0), ("x", -1.0)], Sense::Le, 0.0).unwrap();
        let out = s.fme_eliminate("x").unwrap();
        assert_eq!(out.vars, vec!["y".to_string()]);
        assert_eq!(out.rows.len(), 1);
        assert!((out.rows[0].coeffs[0] - 1.0).abs() < 1e-12);
        assert!((out.rows[0].rhs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eliminate_absent_variable() {
        let mut s = sys(&["x", "y"]);
        s.push_row(&[("y", 1.0)], Sense::Le, 2.0).unwrap();
        let out = s.fme_eliminate("x").unwrap();
        assert_eq!(out.vars, vec!["y".to_string()]);
        assert_eq!(out.rows.len(), 1);
    }

    #[test]
    fn ge_rows_normalize() {
        let mut s = sys(&["x"]);
        s.push_row(&[("x", 1.0)], Sense::Ge, 0.25).unwrap();
        s.push_row(&[("x", 1.0)], Sense::Le, 1.0).unwrap();
        match s.maximize(&[("x", -1.0)]).unwrap() {
            LpOutcome::Optimal(v) => assert!((v + 0.25).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_detected() {
        let mut s = sys(&["x"]);
        s.push_row(&[("x", 1.0)], Sense::Le, -0.5).unwrap();
        assert!(s.is_infeasible());
    }

    #[test]
    fn derived_constant_row_flags_infeasibility() {
        // x >= 2 and x <= 1: eliminating x must leave an infeasible marker.
        let mut s = sys(&["x", "y"]);
        s.push_row(&[("x", 1.0)], Sense::Ge, 2.0).unwrap();
        s.push_row(&[("x", 1.0)], Sense::Le, 1.0).unwrap();
        s.push_row(&[("y", 1.0)], Sense::Le, 1.0).unwrap();
        let out = s.fme_eliminate("x").unwrap();
        assert!(!out.feasibility_ok());
    }

    #[test]
    fn redundant_row_pruned() {
        let mut s = sys(&["x", "y"]);
        s.push_row(&[("x", 1.0), ("y", 1.0)], Sense::Le, 1.0).unwrap();
        s.push_row(&[("x", 1.0), ("y", 1.0)], Sense::Le, 2.0).unwrap();
        s.push_row(&[("x", 1.0)], Sense::Le, 5.0).unwrap();
        let out = s.fme_eliminate("x").unwrap();
        // Only y <= 1 should survive.
        assert_eq!(out.rows.len(), 1);
        assert!((out.rows[0].rhs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projection_preserved_on_small_system() {
        // Project {x + y <= 1, z <= y} onto (x, z): x <= 1, x + z <= 1.
        let mut s = sys(&["x", "y", "z"]);
        s.push_row(&[("x", 1.0), ("y", 1.0)], Sense::Le, 1.0).unwrap();
        s.push_row(&[("z", 1.0), ("y", -1.0)], Sense::Le, 0.0).unwrap();
        let out = s.eliminate_all_except(&["x", "z"]).unwrap();
        // Max x = 1, max z = 1, max x+z = 1.
        match out.maximize(&[("x", 1.0), ("z", 1.0)]).unwrap() {
            LpOutcome::Optimal(v) => assert!((v - 1.0).abs() < 1e-9, "{v}"),
            other => panic!("{other:?}"),
        }
        match out.maximize(&[("z", 1.0)]).unwrap() {
            LpOutcome::Optimal(v) => assert!((v - 1.0).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }
}
