//! Phase-1 simplex on a dense tableau with Bland's rule.
//!
//! Free variables are split as `x = x+ - x-`, every inequality gets a slack,
//! and rows whose right-hand side cannot start with a nonnegative slack in
//! the basis receive an artificial variable. Rows are scaled to unit
//! infinity norm before pivoting. After the tableau terminates, the basic
//! values are recomputed from the unscaled data with an LU solve, which
//! removes the rounding accumulated over the pivots.

use nalgebra::{DMatrix, DVector};

use super::LinearSystem;

const PIVOT_EPS: f64 = 1e-11;
const COST_EPS: f64 = 1e-12;

pub(super) struct PhaseOneOutcome {
    pub x: Vec<f64>,
    pub objective: f64,
    pub basis_condition: f64,
}

pub(super) fn phase_one(sys: &LinearSystem) -> PhaseOneOutcome {
    let v = sys.vars();
    let (eq, f) = sys.equalities();
    let (le, h) = sys.inequalities();
    let m_eq = eq.len();
    let m = m_eq + le.len();
    if m == 0 {
        return PhaseOneOutcome {
            x: vec![0.0; v],
            objective: 0.0,
            basis_condition: 1.0,
        };
    }

    let n_slack = le.len();
    // Columns: x+ (v), x- (v), slacks, then artificials (allocated below).
    let base_cols = 2 * v + n_slack;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut rhs: Vec<f64> = Vec::with_capacity(m);
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    let mut needs_artificial: Vec<bool> = Vec::with_capacity(m);

    for r in 0..m {
        let (coef, b, slack) = if r < m_eq {
            (&eq[r], f[r], None)
        } else {
            (&le[r - m_eq], h[r - m_eq], Some(r - m_eq))
        };
        let scale = coef
            .iter()
            .fold(0.0f64, |acc, c| acc.max(c.abs()))
            .max(1e-300);
        let mut row = vec![0.0; base_cols];
        for j in 0..v {
            row[j] = coef[j] / scale;
            row[v + j] = -coef[j] / scale;
        }
        let mut b = b / scale;
        if let Some(k) = slack {
            row[2 * v + k] = 1.0 / scale;
        }
        if b < 0.0 {
            row.iter_mut().for_each(|c| *c = -*c);
            b = -b;
        }
        let slack_basic = slack.map(|k| row[2 * v + k] > 0.0).unwrap_or(false);
        if slack_basic {
            // Normalize the slack column to 1 so it can serve as a basis column.
            let k = slack.unwrap();
            let s = row[2 * v + k];
            row.iter_mut().for_each(|c| *c /= s);
            b /= s;
            basis.push(2 * v + k);
        } else {
            basis.push(usize::MAX);
        }
        needs_artificial.push(!slack_basic);
        rows.push(row);
        rhs.push(b);
    }

    let n_art = needs_artificial.iter().filter(|&&a| a).count();
    let ncols = base_cols + n_art;
    let mut art = base_cols;
    for (r, row) in rows.iter_mut().enumerate() {
        row.resize(ncols, 0.0);
        if needs_artificial[r] {
            row[art] = 1.0;
            basis[r] = art;
            art += 1;
        }
    }

    // Keep an untouched copy of the standard-form data for the final solve.
    let std_rows = rows.clone();
    let std_rhs = rhs.clone();

    // Reduced costs of the phase-1 objective (sum of artificials).
    let mut cost = vec![0.0; ncols];
    let mut obj = 0.0;
    for r in 0..m {
        if needs_artificial[r] {
            for j in 0..base_cols {
                cost[j] -= rows[r][j];
            }
            obj -= rhs[r];
        }
    }

    let max_iter = 50 * (m + ncols) + 1000;
    for _ in 0..max_iter {
        let Some(enter) = (0..ncols).find(|&j| cost[j] < -COST_EPS) else {
            break;
        };
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for r in 0..m {
            let a = rows[r][enter];
            if a > PIVOT_EPS {
                let ratio = rhs[r] / a;
                let better = match leave {
                    None => true,
                    Some(l) => {
                        ratio < best - 1e-15 || (ratio <= best + 1e-15 && basis[r] < basis[l])
                    }
                };
                if better {
                    best = ratio;
                    leave = Some(r);
                }
            }
        }
        let Some(pr) = leave else {
            // Unbounded direction in phase 1 cannot occur (objective bounded
            // below by zero); treat as numerical breakdown.
            cost[enter] = 0.0;
            continue;
        };
        pivot(&mut rows, &mut rhs, &mut cost, &mut obj, pr, enter);
        basis[pr] = enter;
    }

    // Drive remaining zero-level artificials out of the basis where possible
    // so the final basis solve uses structural columns.
    for r in 0..m {
        if basis[r] >= base_cols && rhs[r].abs() <= 1e-12 {
            if let Some(j) =
                (0..base_cols).find(|&j| rows[r][j].abs() > 1e-9 && !basis.contains(&j))
            {
                pivot(&mut rows, &mut rhs, &mut cost, &mut obj, r, j);
                basis[r] = j;
            }
        }
    }

    let (values, condition) = refine(&std_rows, &std_rhs, &basis).unwrap_or_else(|| {
        let mut vals = vec![0.0; ncols];
        for r in 0..m {
            vals[basis[r]] = rhs[r];
        }
        (vals, f64::INFINITY)
    });
    let x: Vec<f64> = (0..v).map(|j| values[j] - values[v + j]).collect();
    let objective = values[base_cols..]
        .iter()
        .map(|a| a.max(0.0))
        .sum::<f64>()
        .max(-obj);
    PhaseOneOutcome {
        x,
        objective,
        basis_condition: condition,
    }
}

fn pivot(
    rows: &mut [Vec<f64>],
    rhs: &mut [f64],
    cost: &mut [f64],
    obj: &mut f64,
    pr: usize,
    pc: usize,
) {
    let p = rows[pr][pc];
    rows[pr].iter_mut().for_each(|c| *c /= p);
    rhs[pr] /= p;
    let pivot_row = rows[pr].clone();
    let pivot_rhs = rhs[pr];
    for (r, row) in rows.iter_mut().enumerate() {
        if r == pr {
            continue;
        }
        let factor = row[pc];
        if factor != 0.0 {
            for (c, pv) in row.iter_mut().zip(&pivot_row) {
                *c -= factor * pv;
            }
            row[pc] = 0.0;
            rhs[r] -= factor * pivot_rhs;
            if rhs[r] < 0.0 && rhs[r] > -1e-13 {
                rhs[r] = 0.0;
            }
        }
    }
    let factor = cost[pc];
    if factor != 0.0 {
        for (c, pv) in cost.iter_mut().zip(&pivot_row) {
            *c -= factor * pv;
        }
        cost[pc] = 0.0;
        *obj -= factor * pivot_rhs;
    }
}

/// Solves `B x_B = b` on the original standard-form data.
fn refine(rows: &[Vec<f64>], rhs: &[f64], basis: &[usize]) -> Option<(Vec<f64>, f64)> {
    let m = rows.len();
    let ncols = rows[0].len();
    let b_mat = DMatrix::from_fn(m, m, |i, j| rows[i][basis[j]]);
    let sv = b_mat.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if !(condition < 1e13) {
        return None;
    }
    let xb = b_mat.lu().solve(&DVector::from_column_slice(rhs))?;
    let mut vals = vec![0.0; ncols];
    for (r, &j) in basis.iter().enumerate() {
        vals[j] = xb[r].max(0.0);
    }
    Some((vals, condition))
}
