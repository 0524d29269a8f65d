//! Dense linear feasibility, least squares and rank.
//!
//! Every problem handled here is desk-sized (tens of variables), so the
//! routines favour robustness over speed: a two-phase simplex with Bland's
//! rule for feasibility, SVD-based minimum-norm least squares, and a primal
//! active-set method for least squares over a polyhedron.
//!
//! Strict inequalities are never represented. Callers that need `u > 0` on a
//! positively homogeneous system encode it as `u >= 1`.

mod qp;
mod simplex;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub use qp::{constrained_least_squares, QpSolution};

/// Default feasibility tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Default relative tolerance for [`numerical_rank`].
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// `E x = f`, `G x <= h` over `vars` free variables.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    vars: usize,
    eq: Vec<Vec<f64>>,
    eq_rhs: Vec<f64>,
    le: Vec<Vec<f64>>,
    le_rhs: Vec<f64>,
}

impl LinearSystem {
    pub fn new(vars: usize) -> Self {
        Self {
            vars,
            eq: Vec::new(),
            eq_rhs: Vec::new(),
            le: Vec::new(),
            le_rhs: Vec::new(),
        }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    fn check_row(&self, row: &[f64], rhs: f64) {
        assert_eq!(row.len(), self.vars, "constraint row has the wrong length");
        assert!(
            row.iter().all(|v| v.is_finite()) && rhs.is_finite(),
            "constraint has non-finite entries"
        );
    }

    /// Adds `row . x = rhs`.
    pub fn push_eq(&mut self, row: Vec<f64>, rhs: f64) {
        self.check_row(&row, rhs);
        self.eq.push(row);
        self.eq_rhs.push(rhs);
    }

    /// Adds `row . x <= rhs`.
    pub fn push_le(&mut self, row: Vec<f64>, rhs: f64) {
        self.check_row(&row, rhs);
        self.le.push(row);
        self.le_rhs.push(rhs);
    }

    /// Adds `row . x >= rhs`.
    pub fn push_ge(&mut self, row: Vec<f64>, rhs: f64) {
        self.push_le(row.into_iter().map(|v| -v).collect(), -rhs);
    }

    pub fn equalities(&self) -> (&[Vec<f64>], &[f64]) {
        (&self.eq, &self.eq_rhs)
    }

    pub fn inequalities(&self) -> (&[Vec<f64>], &[f64]) {
        (&self.le, &self.le_rhs)
    }

    pub fn equality_matrix(&self) -> DMatrix<f64> {
        rows_to_matrix(&self.eq, self.vars)
    }

    pub fn inequality_matrix(&self) -> DMatrix<f64> {
        rows_to_matrix(&self.le, self.vars)
    }

    /// Largest violation of any constraint at `x` (0 when satisfied).
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let dot = |row: &[f64]| row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        let eq = self
            .eq
            .iter()
            .zip(&self.eq_rhs)
            .map(|(r, &f)| (dot(r) - f).abs());
        let le = self
            .le
            .iter()
            .zip(&self.le_rhs)
            .map(|(r, &h)| (dot(r) - h).max(0.0));
        eq.chain(le).fold(0.0, f64::max)
    }
}

fn rows_to_matrix(rows: &[Vec<f64>], cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeasibilityStatus {
    Feasible,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityResult {
    pub status: FeasibilityStatus,
    /// Present iff feasible.
    pub witness: Option<Vec<f64>>,
    /// Violation of the witness, or of the best phase-1 point when infeasible.
    pub max_violation: f64,
    /// Final phase-1 objective (sum of artificial variables on row-scaled data).
    pub phase1_objective: f64,
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        self.status == FeasibilityStatus::Feasible
    }
}

/// Decides whether `sys` has a solution, to absolute tolerance `tol`.
pub fn solve_feasibility(sys: &LinearSystem, tol: f64) -> Result<FeasibilityResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let out = simplex::phase_one(sys);
    let violation = sys.max_violation(&out.x);
    if violation <= tol {
        return Ok(FeasibilityResult {
            status: FeasibilityStatus::Feasible,
            witness: Some(out.x),
            max_violation: violation,
            phase1_objective: out.objective,
        });
    }
    if out.objective > tol {
        return Ok(FeasibilityResult {
            status: FeasibilityStatus::Infeasible,
            witness: None,
            max_violation: violation,
            phase1_objective: out.objective,
        });
    }
    Err(Error::IllConditioned {
        condition: out.basis_condition,
    })
}

/// Minimum-norm minimizer of `||A x - b||`.
pub fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Err(Error::InvalidInput(
            "least squares needs a nonempty matrix".into(),
        ));
    }
    if a.nrows() != b.len() {
        return Err(Error::ShapeMismatch(format!(
            "matrix has {} rows, right-hand side has {}",
            a.nrows(),
            b.len()
        )));
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return Ok(DVector::zeros(a.ncols()));
    }
    let eps = (a.nrows().max(a.ncols()) as f64) * f64::EPSILON * smax;
    svd.solve(b, eps)
        .map_err(|e| Error::InvalidInput(format!("least squares failed: {e}")))
}

/// Singular values in descending order.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = a
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Number of singular values above `rel_tol` times the largest one.
pub fn numerical_rank(a: &DMatrix<f64>, rel_tol: f64) -> usize {
    let sv = singular_values(a);
    match sv.first() {
        Some(&smax) if smax > 0.0 => sv.iter().filter(|&&s| s > rel_tol * smax).count(),
        _ => 0,
    }
}

/// Orthonormal basis (as columns) of the null space of `a`.
pub fn null_space(a: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let cols = a.ncols();
    if a.nrows() == 0 {
        return DMatrix::identity(cols, cols);
    }
    // Pad to a square matrix so the SVD returns a full right basis.
    let rows = a.nrows().max(cols);
    let padded = DMatrix::from_fn(
        rows,
        cols,
        |i, j| if i < a.nrows() { a[(i, j)] } else { 0.0 },
    );
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| smax == 0.0 || svd.singular_values[i] <= rel_tol * smax)
        .collect();
    DMatrix::from_fn(cols, keep.len(), |i, j| v_t[(keep[j], i)])
}
