//! Least squares over a polyhedron by a primal active-set method.
//!
//! Minimizes `||M x - t||^2` subject to `G x <= h`. The Hessian `M^T M` is
//! only positive semidefinite in general, so a ridge of relative size 1e-12
//! is added; it selects a small-norm minimizer and changes the optimal
//! value by a negligible amount for desk-sized problems.

use nalgebra::{DMatrix, DVector};

use super::{solve_feasibility, LinearSystem, DEFAULT_TOL};
use crate::error::{Error, Result};

const RIDGE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct QpSolution {
    pub x: DVector<f64>,
    /// `||M x - t||^2` at the returned point.
    pub residual_sq: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes `||m x - t||^2` subject to `g x <= h`.
///
/// Returns `Ok(None)` when the constraints are infeasible.
pub fn constrained_least_squares(
    m: &DMatrix<f64>,
    t: &DVector<f64>,
    g: &DMatrix<f64>,
    h: &DVector<f64>,
) -> Result<Option<QpSolution>> {
    let nv = m.ncols();
    if m.nrows() != t.len() || g.nrows() != h.len() || (g.nrows() > 0 && g.ncols() != nv) {
        return Err(Error::ShapeMismatch(
            "constrained least squares operands".into(),
        ));
    }
    let nc = g.nrows();

    let mut x = if h.iter().all(|&v| v >= 0.0) {
        DVector::zeros(nv)
    } else {
        let mut sys = LinearSystem::new(nv);
        for i in 0..nc {
            sys.push_le(g.row(i).iter().copied().collect(), h[i]);
        }
        let res = solve_feasibility(&sys, DEFAULT_TOL)?;
        match res.witness {
            Some(w) => DVector::from_vec(w),
            None => return Ok(None),
        }
    };

    let mut hess = m.transpose() * m;
    let diag_max = (0..nv).map(|i| hess[(i, i)]).fold(0.0, f64::max);
    let ridge = RIDGE * (1.0 + diag_max);
    for i in 0..nv {
        hess[(i, i)] += ridge;
    }
    let lin = -(m.transpose() * t);
    let scale = 1.0 + t.amax() + diag_max.sqrt();
    let feas_tol = 1e-12 * scale;

    let mut working: Vec<usize> = Vec::new();
    let max_iter = 20 * (nv + nc) + 200;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let grad = &hess * &x + &lin;
        let w = working.len();
        let k = nv + w;
        let mut kkt = DMatrix::zeros(k, k);
        kkt.view_mut((0, 0), (nv, nv)).copy_from(&hess);
        for (r, &ci) in working.iter().enumerate() {
            for j in 0..nv {
                kkt[(nv + r, j)] = g[(ci, j)];
                kkt[(j, nv + r)] = g[(ci, j)];
            }
        }
        let mut rhs = DVector::zeros(k);
        rhs.rows_mut(0, nv).copy_from(&(-&grad));
        let Some(sol) = kkt.full_piv_lu().solve(&rhs) else {
            // Dependent working rows; drop the newest one and retry.
            working.pop();
            continue;
        };
        let step = sol.rows(0, nv).into_owned();
        let mult = sol.rows(nv, w).into_owned();

        if step.amax() <= 1e-13 * (1.0 + x.amax()) {
            let mult_tol = 1e-11 * (1.0 + grad.amax());
            let most_negative = (0..w)
                .filter(|&r| mult[r] < -mult_tol)
                .min_by(|&a, &b| mult[a].total_cmp(&mult[b]));
            match most_negative {
                None => {
                    converged = true;
                    break;
                }
                Some(r) => {
                    working.remove(r);
                    continue;
                }
            }
        }

        let mut alpha = 1.0;
        let mut blocking: Option<usize> = None;
        for ci in 0..nc {
            if working.contains(&ci) {
                continue;
            }
            let gp: f64 = g.row(ci).iter().zip(step.iter()).map(|(a, b)| a * b).sum();
            if gp > 1e-14 * (1.0 + step.amax()) {
                let gx: f64 = g.row(ci).iter().zip(x.iter()).map(|(a, b)| a * b).sum();
                let room = (h[ci] - gx).max(0.0);
                let ratio = if room <= feas_tol { 0.0 } else { room / gp };
                if ratio < alpha {
                    alpha = ratio;
                    blocking = Some(ci);
                }
            }
        }
        x += alpha * &step;
        if let Some(ci) = blocking {
            working.push(ci);
        }
    }

    let residual_sq = (m * &x - t).norm_squared();
    Ok(Some(QpSolution {
        x,
        residual_sq,
        iterations,
        converged,
    }))
}
