//! A small dense two-phase simplex for the redundancy and boundedness
//! queries inside Fourier-Motzkin elimination.
//!
//! Solves `maximize c·x` subject to `A x <= b`, `x >= 0`. Problem sizes here
//! are tiny (tens of rows, at most a dozen variables), so a textbook tableau
//! with Bland's rule is plenty.

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LpOutcome {
    Optimal(f64),
    Unbounded,
    Infeasible,
}

const EPS: f64 = 1e-9;

/// Maximizes `c·x` over `{x >= 0 : rows[i]·x <= rhs[i]}`.
pub fn maximize(c: &[f64], rows: &[Vec<f64>], rhs: &[f64]) -> LpOutcome {
    let n = c.len();
    let m = rows.len();
    debug_assert!(rows.iter().all(|r| r.len() == n));

    // Tableau columns: n structural + m slack + 1 rhs. Artificial variables
    // are introduced on demand for rows with negative rhs.
    let needs_artificial: Vec<bool> = rhs.iter().map(|&b| b < 0.0).collect();
    let n_art = needs_artificial.iter().filter(|&&x| x).count();
    let cols = n + m + n_art + 1;
    let mut t = vec![vec![0.0; cols]; m];
    let mut basis = vec![0usize; m];
    let mut art_idx = 0usize;
    for i in 0..m {
        for j in 0..n {
            t[i][j] = rows[i][j];
        }
        t[i][n + i] = 1.0;
        t[i][cols - 1] = rhs[i];
        if needs_artificial[i] {
            // Flip the row so rhs is nonnegative, then add the artificial.
            for v in t[i].iter_mut() {
                *v = -*v;
            }
            t[i][n + m + art_idx] = 1.0;
            basis[i] = n + m + art_idx;
            art_idx += 1;
        } else {
            basis[i] = n + i;
        }
    }

    if n_art > 0 {
        // Phase 1: minimize the sum of artificials.
        let mut obj = vec![0.0; cols];
        for j in n + m..n + m + n_art {
            obj[j] = -1.0;
        }
        // Price out the basic artificials.
        for i in 0..m {
            if basis[i] >= n + m {
                for j in 0..cols {
                    obj[j] += t[i][j];
                }
            }
        }
        if !run_simplex(&mut t, &mut basis, &mut obj, cols) {
            // Phase 1 of a bounded-below objective cannot be unbounded.
            return LpOutcome::Infeasible;
        }
        if obj[cols - 1] > EPS {
            return LpOutcome::Infeasible;
        }
        // Drive any artificial still in the basis out (degenerate rows).
        for i in 0..m {
            if basis[i] >= n + m {
                let pivot_col = (0..n + m).find(|&j| t[i][j].abs() > EPS);
                match pivot_col {
                    Some(j) => {
                        let mut dummy = vec![f64::NEG_INFINITY; cols];
                        pivot(&mut t, &mut basis, i, j, &mut dummy);
                    }
                    None => { /* redundant zero row */ }
                }
            }
        }
    }

    // Phase 2.
    let mut obj = vec![0.0; cols];
    for (j, &cj) in c.iter().enumerate() {
        obj[j] = cj;
    }
    // Forbid artificials from re-entering.
    for j in n + m..n + m + n_art {
        obj[j] = f64::NEG_INFINITY;
    }
    for i in 0..m {
        let b = basis[i];
        if b < n && obj[b].abs() > 0.0 {
            let coef = obj[b];
            for j in 0..cols {
                if obj[j].is_finite() {
                    obj[j] -= coef * t[i][j];
                }
            }
            obj[b] = 0.0;
        }
    }
    // The running objective value lives in obj[cols-1] as -value.
    if !run_simplex(&mut t, &mut basis, &mut obj, cols) {
        return LpOutcome::Unbounded;
    }
    LpOutcome::Optimal(-obj[cols - 1])
}

/// Returns false when the objective is unbounded.
fn run_simplex(t: &mut [Vec<f64>], basis: &mut [usize], obj: &mut [f64], cols: usize) -> bool {
    let m = t.len();
    loop {
        // Bland's rule: first improving column.
        let enter = (0..cols - 1).find(|&j| obj[j].is_finite() && obj[j] > EPS);
        let Some(enter) = enter else { return true };
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            if t[i][enter] > EPS {
                let ratio = t[i][cols - 1] / t[i][enter];
                if ratio < best - EPS
                    || (ratio < best + EPS && leave.is_none_or(|l| basis[i] < basis[l]))
                {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(leave) = leave else { return false };
        pivot(t, basis, leave, enter, obj);
    }
}

fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], row: usize, col: usize, obj: &mut [f64]) {
    let cols = t[row].len();
    let piv = t[row][col];
    for v in t[row].iter_mut() {
        *v /= piv;
    }
    for i in 0..t.len() {
        if i != row && t[i][col].abs() > 1e-13 {
            let f = t[i][col];
            for j in 0..cols {
                t[i][j] -= f * t[row][j];
            }
            t[i][col] = 0.0;
        }
    }
    if obj[col].is_finite() && obj[col].abs() > 1e-13 {
        let f = obj[col];
        for j in 0..cols {
            if obj[j].is_finite() {
                obj[j] -= f * t[row][j];
            }
        }
        obj[col] = 0.0;
    }
    basis[row] = col;
}
