//! Numeric membership search for two-layer ReLU networks with several
//! outputs, where the image is not a union of polyhedra and no finite
//! certificate of absence is available.
//!
//! Each restart alternates between the output layer, which is a linear
//! least-squares problem once the hidden responses are fixed, and a damped
//! Gauss-Newton step on the hidden parameters. Between steps neurons are
//! rebalanced (hidden row scaled by `c`, output column by `1/c`), which
//! leaves the network function unchanged and minimizes the weight norm.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{MembershipCertificate, Verdict};
use crate::error::{Error, Result};
use crate::linfeas;
use crate::network::{
    flat_norm, jacobian_flat, weight_map_flat, Activation, NetworkSpec, ResponseMatrix,
    SampleMatrix, Weights,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NumericConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    /// Success threshold on the largest absolute residual entry.
    pub tol: f64,
    /// Bound on the weight norm of every iterate.
    pub norm_cap: Option<f64>,
}

impl Default for NumericConfig {
    fn default() -> Self {
        Self {
            restarts: 8,
            max_iters: 2000,
            seed: 0,
            tol: 1e-6,
            norm_cap: Some(1e3),
        }
    }
}

struct Problem<'a> {
    spec: NetworkSpec,
    rows: Vec<Vec<f64>>,
    targets: &'a DMatrix<f64>,
    p: usize,
    d: usize,
    q: usize,
    cap: Option<f64>,
}

impl Problem<'_> {
    fn hidden_len(&self) -> usize {
        self.d * (self.p + 1)
    }

    fn hidden_responses(&self, params: &[f64]) -> DMatrix<f64> {
        let (p, d) = (self.p, self.d);
        DMatrix::from_fn(self.rows.len(), d + 1, |i, k| {
            if k == d {
                return 1.0;
            }
            let w = &params[k * p..(k + 1) * p];
            let b = params[d * p + k];
            let z: f64 = w.iter().zip(&self.rows[i]).map(|(a, s)| a * s).sum::<f64>() + b;
            z.max(0.0)
        })
    }

    fn residual(&self, params: &[f64]) -> DMatrix<f64> {
        self.targets - weight_map_flat(&self.spec, params, &self.rows)
    }

    fn set_output(&self, params: &mut [f64], coef: &DMatrix<f64>) {
        let (d, q) = (self.d, self.q);
        let off = self.hidden_len();
        for j in 0..q {
            for k in 0..d {
                params[off + j * d + k] = coef[(k, j)];
            }
            params[off + q * d + j] = coef[(d, j)];
        }
    }

    /// Least-squares output layer, ridge-regularized just enough to respect
    /// the norm cap.
    fn solve_output(&self, params: &mut [f64]) -> Result<()> {
        let x = self.hidden_responses(params);
        let mut coef = DMatrix::zeros(self.d + 1, self.q);
        for j in 0..self.q {
            let col = linfeas::least_squares(&x, &self.targets.column(j).into_owned())?;
            coef.set_column(j, &col);
        }
        self.set_output(params, &coef);
        let Some(cap) = self.cap else {
            return Ok(());
        };
        if flat_norm(params) <= cap {
            return Ok(());
        }
        let hidden = flat_norm(&params[..self.hidden_len()]);
        if hidden > cap / 2f64.sqrt() {
            let c = cap / (2f64.sqrt() * hidden);
            params[..self.hidden_len()].iter_mut().for_each(|v| *v *= c);
        }
        let x = self.hidden_responses(params);
        let gram = x.transpose() * &x;
        let rhs = x.transpose() * self.targets;
        let ridge = |rho: f64| -> DMatrix<f64> {
            let m = &gram + DMatrix::identity(self.d + 1, self.d + 1) * rho;
            m.lu()
                .solve(&rhs)
                .unwrap_or_else(|| DMatrix::zeros(self.d + 1, self.q))
        };
        let hidden_sq = flat_norm(&params[..self.hidden_len()]).powi(2);
        let within = |c: &DMatrix<f64>| (hidden_sq + c.norm_squared()).sqrt() <= cap;
        let mut hi = 1e-12 * (1.0 + gram.norm());
        while !within(&ridge(hi)) && hi < 1e30 {
            hi *= 4.0;
        }
        let mut lo = 0.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if within(&ridge(mid)) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        self.set_output(params, &ridge(hi));
        Ok(())
    }

    fn rebalance(&self, params: &mut [f64]) {
        let (p, d, q) = (self.p, self.d, self.q);
        let off = self.hidden_len();
        for k in 0..d {
            let h = (params[k * p..(k + 1) * p]
                .iter()
                .map(|v| v * v)
                .sum::<f64>()
                + params[d * p + k].powi(2))
            .sqrt();
            let o = (0..q)
                .map(|j| params[off + j * d + k].powi(2))
                .sum::<f64>()
                .sqrt();
            if h > 0.0 && o > 0.0 {
                let c = (o / h).sqrt();
                params[k * p..(k + 1) * p].iter_mut().for_each(|v| *v *= c);
                params[d * p + k] *= c;
                (0..q).for_each(|j| params[off + j * d + k] /= c);
            }
        }
    }

    /// One accepted damped Gauss-Newton step on the hidden parameters, or
    /// `false` when no damping level reduces the loss.
    fn hidden_step(&self, params: &mut [f64], damping: &mut f64) -> bool {
        let h = self.hidden_len();
        let res = self.residual(params);
        let loss = res.norm_squared();
        let jac = jacobian_flat(&self.spec, params, &self.rows, false).expect("kinks tolerated");
        let jh = jac.columns(0, h).into_owned();
        // Row-major vectorization, matching the Jacobian's row order.
        let r = DVector::from_column_slice(res.transpose().as_slice());
        let g = jh.transpose() * &r;
        let a = jh.transpose() * &jh;
        let scale = (0..h).map(|i| a[(i, i)]).fold(0.0, f64::max).max(1e-300);
        for _ in 0..12 {
            let mut m = a.clone();
            for i in 0..h {
                m[(i, i)] += *damping * scale;
            }
            if let Some(step) = m.cholesky().map(|c| c.solve(&g)) {
                let mut trial = params.to_vec();
                trial[..h]
                    .iter_mut()
                    .zip(step.iter())
                    .for_each(|(v, s)| *v += s);
                if self.residual(&trial).norm_squared() < loss {
                    params.copy_from_slice(&trial);
                    *damping = (*damping / 3.0).max(1e-15);
                    return true;
                }
            }
            *damping *= 4.0;
        }
        false
    }
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Searches for two-layer ReLU weights of width `d` reproducing `t`. Never
/// reports non-membership.
pub fn membership_2layer_general(
    s: &SampleMatrix,
    t: &ResponseMatrix,
    d: usize,
    config: &NumericConfig,
) -> Result<MembershipCertificate> {
    t.check_paired(s)?;
    if d == 0 || config.restarts == 0 {
        return Err(Error::InvalidInput(
            "width and restarts must be positive".into(),
        ));
    }
    let spec = NetworkSpec::two_layer(s.p(), d, t.q(), Activation::Relu)?;
    let prob = Problem {
        spec: spec.clone(),
        rows: s.rows(),
        targets: t.matrix(),
        p: s.p(),
        d,
        q: t.q(),
        cap: config.norm_cap,
    };

    let runs: Vec<(f64, Vec<f64>)> = (0..config.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(r as u64);
            let mut params = Weights::random(&spec, 1.0, &mut rng).into_vec();
            let mut damping = 1e-3;
            let mut best = (f64::INFINITY, params.clone());
            let mut stalled = 0;
            for _ in 0..config.max_iters {
                prob.solve_output(&mut params)?;
                let err = max_abs(&prob.residual(&params));
                if err < best.0 {
                    stalled = if err < 0.999 * best.0 { 0 } else { stalled + 1 };
                    best = (err, params.clone());
                } else {
                    stalled += 1;
                }
                if err <= config.tol {
                    break;
                }
                if stalled > 50 || !prob.hidden_step(&mut params, &mut damping) {
                    // Stuck, typically with a neuron switched off on samples
                    // it needs: restart from the best point with the hidden
                    // layer perturbed.
                    params.copy_from_slice(&best.1);
                    for v in params[..prob.hidden_len()].iter_mut() {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        *v += 0.5 * (1.0 + v.abs()) * z;
                    }
                    damping = 1e-3;
                    stalled = 0;
                    continue;
                }
                prob.rebalance(&mut params);
            }
            Ok(best)
        })
        .collect::<Result<_>>()?;

    let (residual, params) = runs
        .into_iter()
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .expect("at least one restart");
    let witness = Weights::from_flat(&spec, params)?;
    let bias = witness.bias(1).iter().copied().collect();
    Ok(MembershipCertificate {
        verdict: if residual <= config.tol {
            Verdict::MemberNumeric
        } else {
            Verdict::Inconclusive
        },
        witness: Some(witness),
        bias,
        pattern: None,
        residual: Some(residual),
        patterns_checked: 0,
    })
}
