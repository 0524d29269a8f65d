//! Empirical risk minimization `min ||T - psi(theta)||_F^2` and a heuristic
//! diagnosis of whether the infimum is attained.
//!
//! Each restart can spend part of its budget on per-parameter adaptive
//! (Adam-style) descent on the subgradient. The rest goes to a
//! Levenberg-Marquardt polish: the output layer is solved exactly, the inner
//! layers take a damped Gauss-Newton step, and a stalled run is kicked from
//! its best point. By default the whole budget is polish. When the infimum is not
//! attained, minimizing sequences must have unbounded norm, so a run whose
//! loss is still falling while its norm grows past a threshold is reported
//! as suspected non-attainment.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datasets;
use crate::error::{Error, Result};
use crate::linfeas;
use crate::network::{
    flat_norm, jacobian_flat, loss_and_gradient, loss_only, weight_map, weight_norm, NetworkSpec,
    ResponseMatrix, SampleMatrix, Tape, Weights,
};

/// Runs shorter than this are never classified.
pub const MIN_CLASSIFIABLE_ITERS: usize = 100;

/// Trajectories keep at most this many points per restart.
pub const MAX_TRAJECTORY_POINTS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    pub restarts: usize,
    /// Iterations per restart, polish included.
    pub max_iters: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Steps are relative to `max(|theta_j|, step_floor)`, so a parameter
    /// that keeps the same gradient sign grows geometrically.
    pub step_floor: f64,
    /// Share of each restart's budget spent on the Levenberg-Marquardt
    /// polish; the remainder is adaptive descent.
    pub polish_fraction: f64,
    /// Re-solve the output layer by least squares after every descent step.
    pub exact_output: bool,
    pub init_scale: f64,
    /// Relative size of the perturbation applied when the polish stalls.
    pub kick_scale: f64,
    pub seed: u64,
    /// Weight norm above which a still-improving run counts as divergent.
    pub norm_divergence_threshold: f64,
    pub grad_tol: f64,
    /// Optional bound on the weight norm; iterates are projected onto it.
    pub norm_cap: Option<f64>,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            restarts: 8,
            max_iters: 20_000,
            learning_rate: 1e-2,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-12,
            step_floor: 1.0,
            polish_fraction: 1.0,
            exact_output: false,
            init_scale: 1.0,
            kick_scale: 1.0,
            seed: 0,
            norm_divergence_threshold: 1e2,
            grad_tol: 1e-6,
            norm_cap: None,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.learning_rate,
            self.epsilon,
            self.step_floor,
            self.init_scale,
            self.norm_divergence_threshold,
            self.grad_tol,
        ];
        if self.restarts == 0 || self.max_iters == 0 || positive.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidInput(
                "fit configuration values must be positive".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(Error::InvalidInput(
                "moment decay rates must lie in [0, 1)".into(),
            ));
        }
        if !(self.kick_scale >= 0.0) {
            return Err(Error::InvalidInput("kick scale must be nonnegative".into()));
        }
        if !(0.0..=1.0).contains(&self.polish_fraction) {
            return Err(Error::InvalidInput(
                "polish fraction must lie in [0, 1]".into(),
            ));
        }
        if matches!(self.norm_cap, Some(c) if !(c > 0.0)) {
            return Err(Error::InvalidInput("norm cap must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AttainmentClass {
    LikelyAttained,
    SuspectedNonAttained,
    Inconclusive,
}

impl AttainmentClass {
    pub fn label(self) -> &'static str {
        match self {
            AttainmentClass::LikelyAttained => "LIKELY_ATTAINED",
            AttainmentClass::SuspectedNonAttained => "SUSPECTED_NON_ATTAINED",
            AttainmentClass::Inconclusive => "INCONCLUSIVE",
        }
    }
}

impl std::fmt::Display for AttainmentClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Best-so-far state of a restart after `iteration` iterations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub iteration: usize,
    pub loss: f64,
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartSummary {
    pub restart: usize,
    pub best_loss: f64,
    pub best_norm: f64,
    pub iterations: usize,
    pub trajectory: Vec<TrajectoryPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    /// Squared Frobenius loss of `best_weights`.
    pub best_loss: f64,
    pub best_weights: Weights,
    pub best_norm: f64,
    /// Index of the winning restart; `restarts` when the constant fit won.
    pub best_restart: usize,
    /// Euclidean norm of the (sub)gradient at the best weights.
    pub final_gradient_norm: f64,
    pub restarts: Vec<RestartSummary>,
    pub classification: AttainmentClass,
    /// The classification is always a heuristic.
    pub heuristic: bool,
    pub seed: u64,
    /// Largest iteration count over the restarts.
    pub iterations: usize,
    /// Losses at or below this level count as exact fits.
    pub exact_level: f64,
}

impl FitReport {
    pub fn best_distance(&self) -> f64 {
        self.best_loss.sqrt()
    }

    fn winning_trajectory(&self) -> Option<&[TrajectoryPoint]> {
        self.restarts
            .iter()
            .find(|r| r.restart == self.best_restart)
            .map(|r| r.trajectory.as_slice())
    }
}

struct Data<'a> {
    spec: &'a NetworkSpec,
    rows: Vec<Vec<f64>>,
    targets: Vec<Vec<f64>>,
    /// Losses at or below this are exact fits up to rounding.
    exact: f64,
}

impl Data<'_> {
    fn residual_vector(&self, params: &[f64], tape: &mut Tape) -> DVector<f64> {
        let q = self.spec.output_dim();
        let mut r = DVector::zeros(self.rows.len() * q);
        for (i, (s, t)) in self.rows.iter().zip(&self.targets).enumerate() {
            tape.forward(self.spec, params, s);
            for j in 0..q {
                r[i * q + j] = t[j] - tape.output()[j];
            }
        }
        r
    }
    /// Replaces the output layer by its least-squares optimum for the current
    /// inner layers, keeping the old one if that is not an improvement.
    /// Returns the resulting loss.
    fn solve_output(&self, params: &mut [f64], tape: &mut Tape) -> f64 {
        let spec = self.spec;
        let k = spec.depth();
        let (din, dout) = (spec.widths()[k - 1], spec.widths()[k]);
        let off = spec.layer_offset(k - 1);
        let mut features = DMatrix::from_element(self.rows.len(), din + 1, 1.0);
        for (i, s) in self.rows.iter().enumerate() {
            tape.forward(spec, params, s);
            for (c, &h) in tape.post[k - 2].iter().enumerate() {
                features[(i, c)] = h;
            }
        }
        let before = loss_only(spec, params, &self.rows, &self.targets, tape);
        let mut trial = params.to_vec();
        for j in 0..dout {
            let col = DVector::from_iterator(self.rows.len(), self.targets.iter().map(|t| t[j]));
            let Ok(coef) = linfeas::least_squares(&features, &col) else {
                return before;
            };
            trial[off + j * din..off + (j + 1) * din].copy_from_slice(&coef.as_slice()[..din]);
            trial[off + din * dout + j] = coef[din];
        }
        let after = loss_only(spec, &trial, &self.rows, &self.targets, tape);
        if after < before {
            params.copy_from_slice(&trial);
            after
        } else {
            before
        }
    }
}

struct Tracker {
    best_loss: f64,
    best_params: Vec<f64>,
    trajectory: Vec<TrajectoryPoint>,
    stride: usize,
    cap: Option<f64>,
}

impl Tracker {
    fn observe(&mut self, iteration: usize, loss: f64, params: &[f64]) {
        // Ties replace the incumbent, so runs that keep moving at a loss
        // flat to machine precision still report their latest point.
        if loss <= self.best_loss {
            self.best_loss = loss;
            self.best_params.copy_from_slice(params);
        }
        if iteration.is_multiple_of(self.stride) {
            self.record(iteration);
        }
    }

    fn record(&mut self, iteration: usize) {
        if self.trajectory.last().map(|p| p.iteration) == Some(iteration) {
            return;
        }
        self.trajectory.push(TrajectoryPoint {
            iteration,
            loss: self.best_loss,
            norm: flat_norm(&self.best_params),
        });
    }

    fn project(&self, params: &mut [f64]) {
        if let Some(cap) = self.cap {
            let n = flat_norm(params);
            if n > cap {
                params.iter_mut().for_each(|v| *v *= cap / n);
            }
        }
    }
}

fn run_restart(data: &Data, config: &FitConfig, restart: usize) -> (RestartSummary, Vec<f64>) {
    let spec = data.spec;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(restart as u64);
    let mut params = Weights::random(spec, config.init_scale, &mut rng).into_vec();
    let m = params.len();
    let mut tape = Tape::new(spec);
    let mut grad = vec![0.0; m];
    let mut tracker = Tracker {
        best_loss: f64::INFINITY,
        best_params: params.clone(),
        trajectory: Vec::new(),
        stride: config.max_iters.div_ceil(MAX_TRAJECTORY_POINTS - 1).max(1),
        cap: config.norm_cap,
    };
    tracker.project(&mut params);

    let polish = if config.max_iters >= MIN_CLASSIFIABLE_ITERS {
        (config.max_iters as f64 * config.polish_fraction).round() as usize
    } else {
        0
    };
    let descent = config.max_iters - polish;

    let mut m1 = vec![0.0; m];
    let mut m2 = vec![0.0; m];
    let (mut pow1, mut pow2) = (1.0, 1.0);
    let mut it = 0;
    while it < descent {
        let loss = loss_and_gradient(
            spec,
            &params,
            &data.rows,
            &data.targets,
            &mut tape,
            &mut grad,
        );
        tracker.observe(it, loss, &params);
        if loss <= data.exact {
            break;
        }
        pow1 *= config.beta1;
        pow2 *= config.beta2;
        for k in 0..m {
            m1[k] = config.beta1 * m1[k] + (1.0 - config.beta1) * grad[k];
            m2[k] = config.beta2 * m2[k] + (1.0 - config.beta2) * grad[k] * grad[k];
            let mhat = m1[k] / (1.0 - pow1);
            let vhat = m2[k] / (1.0 - pow2);
            let scale = params[k].abs().max(config.step_floor);
            params[k] -= config.learning_rate * scale * mhat / (vhat.sqrt() + config.epsilon);
        }
        tracker.project(&mut params);
        if config.exact_output && config.norm_cap.is_none() && spec.depth() > 1 {
            data.solve_output(&mut params, &mut tape);
        }
        it += 1;
    }
    let loss = loss_only(spec, &params, &data.rows, &data.targets, &mut tape);
    tracker.observe(it, loss, &params);

    // Levenberg-Marquardt from the best point found so far. Without a norm
    // cap the output layer is solved exactly before each step and only the
    // inner layers are damped; along a valley whose output weights blow up
    // this moves much further than a joint step.
    params.copy_from_slice(&tracker.best_params);
    let project_out = config.norm_cap.is_none() && spec.depth() > 1;
    let inner = if project_out {
        spec.layer_offset(spec.depth() - 1)
    } else {
        m
    };
    let mut loss = tracker.best_loss;
    let mut damping = 1e-3;
    let mut stalled = 0;
    let mut stall_ref = loss;
    let mut kick = config.kick_scale;
    let mut kick_ref = loss;
    while it < config.max_iters && loss > data.exact {
        it += 1;
        if project_out {
            let solved = data.solve_output(&mut params, &mut tape);
            if solved < loss {
                loss = solved;
            }
        }
        let jac = jacobian_flat(spec, &params, &data.rows, false).expect("kinks tolerated");
        let jac = jac.columns(0, inner);
        let r = data.residual_vector(&params, &mut tape);
        let g = jac.transpose() * &r;
        let a = jac.transpose() * jac;
        let dmax = (0..inner).map(|i| a[(i, i)]).fold(0.0, f64::max);
        if dmax == 0.0 {
            break;
        }
        let mut accepted = false;
        for _ in 0..30 {
            let mut sys = a.clone();
            for i in 0..inner {
                sys[(i, i)] += damping * a[(i, i)].max(1e-10 * dmax);
            }
            if let Some(step) = sys.cholesky().map(|c| c.solve(&g)) {
                let mut trial = params.clone();
                trial[..inner]
                    .iter_mut()
                    .zip(step.iter())
                    .for_each(|(p, s)| *p += s);
                tracker.project(&mut trial);
                let trial_loss = loss_only(spec, &trial, &data.rows, &data.targets, &mut tape);
                if trial_loss < loss {
                    params = trial;
                    loss = trial_loss;
                    damping = (damping / 3.0).max(1e-12);
                    accepted = true;
                    break;
                }
            }
            damping *= 4.0;
        }
        tracker.observe(it, loss, &params);
        if accepted && loss < 0.999 * stall_ref {
            stall_ref = loss;
            stalled = 0;
        } else {
            stalled += 1;
        }
        if !accepted || stalled > 50 {
            if !project_out {
                break;
            }
            // Stuck on a kink: continue from the best point with the inner
            // layers perturbed.
            // Kicks that lead nowhere shrink; an improvement resets them.
            if tracker.best_loss < kick_ref {
                kick = config.kick_scale;
            } else {
                kick = (kick * 0.5).max(config.kick_scale * 1e-6);
                if kick <= config.kick_scale * 1e-6 {
                    kick = config.kick_scale;
                }
            }
            kick_ref = tracker.best_loss;
            params.copy_from_slice(&tracker.best_params);
            for v in params[..inner].iter_mut() {
                let z: f64 = StandardNormal.sample(&mut rng);
                *v += kick * (1.0 + v.abs()) * z;
            }
            loss = loss_only(spec, &params, &data.rows, &data.targets, &mut tape);
            damping = 1e-3;
            stalled = 0;
            stall_ref = tracker.best_loss;
            continue;
        }
        damping = damping.min(1e12);
    }
    tracker.record(it);

    let summary = RestartSummary {
        restart,
        best_loss: tracker.best_loss,
        best_norm: flat_norm(&tracker.best_params),
        iterations: it,
        trajectory: tracker.trajectory,
    };
    (summary, tracker.best_params)
}

fn exact_fit_level(t: &ResponseMatrix) -> f64 {
    (16.0 * f64::EPSILON * t.matrix().norm()).powi(2)
}

/// Squared loss of the best network with constant output (column means).
pub fn baseline_loss(t: &ResponseMatrix) -> f64 {
    let m = t.matrix();
    (0..m.ncols())
        .map(|j| {
            let col = m.column(j);
            let mean = col.mean();
            col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        })
        .sum()
}

fn constant_weights(spec: &NetworkSpec, t: &ResponseMatrix) -> Weights {
    let mut params = vec![0.0; spec.param_count()];
    let q = spec.output_dim();
    let start = params.len() - q;
    for j in 0..q {
        params[start + j] = t.matrix().column(j).mean();
    }
    Weights::from_flat(spec, params).expect("sized from spec")
}

/// Multi-restart minimization of the squared Frobenius loss.
pub fn fit(
    spec: &NetworkSpec,
    s: &SampleMatrix,
    t: &ResponseMatrix,
    config: &FitConfig,
) -> Result<FitReport> {
    config.validate()?;
    t.check_paired(s)?;
    if s.p() != spec.input_dim() || t.q() != spec.output_dim() {
        return Err(Error::ShapeMismatch(format!(
            "data is {}x{} -> {}, network maps {} -> {}",
            s.n(),
            s.p(),
            t.q(),
            spec.input_dim(),
            spec.output_dim()
        )));
    }
    let data = Data {
        spec,
        rows: s.rows(),
        targets: t.rows(),
        exact: exact_fit_level(t),
    };
    let runs: Vec<(RestartSummary, Vec<f64>)> = (0..config.restarts)
        .into_par_iter()
        .map(|r| run_restart(&data, config, r))
        .collect();

    let mut best_restart = config.restarts;
    let mut best_weights = constant_weights(spec, t);
    let mut best_loss = loss_only(
        spec,
        best_weights.as_slice(),
        &data.rows,
        &data.targets,
        &mut Tape::new(spec),
    );
    for (summary, params) in runs.iter().rev() {
        if summary.best_loss <= best_loss {
            best_loss = summary.best_loss;
            best_restart = summary.restart;
            best_weights = Weights::from_flat(spec, params.clone())?;
        }
    }
    let mut grad = vec![0.0; spec.param_count()];
    loss_and_gradient(
        spec,
        best_weights.as_slice(),
        &data.rows,
        &data.targets,
        &mut Tape::new(spec),
        &mut grad,
    );

    let mut report = FitReport {
        best_loss,
        best_norm: weight_norm(&best_weights),
        best_weights,
        best_restart,
        final_gradient_norm: flat_norm(&grad),
        iterations: runs.iter().map(|(r, _)| r.iterations).max().unwrap_or(0),
        restarts: runs.into_iter().map(|(r, _)| r).collect(),
        classification: AttainmentClass::Inconclusive,
        heuristic: true,
        seed: config.seed,
        exact_level: data.exact,
    };
    report.classification = classify_attainment(&report, config);
    Ok(report)
}

/// Slope of the least-squares line through `(x, y)`.
fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Heuristic attainment label for a finished fit.
///
/// Likely attained: small gradient at a bounded point. Suspected
/// non-attained: over the last tenth of the winning run, cut where its best
/// point last moved, the norm exceeds the threshold and keeps growing while
/// the loss keeps falling (or stays flat to machine precision, which is how
/// a loss approaching an unattained infimum looks once the remaining gap
/// drops below rounding).
pub fn classify_attainment(report: &FitReport, config: &FitConfig) -> AttainmentClass {
    // A zero residual attains the infimum whatever the norm.
    if report.best_loss <= report.exact_level {
        return AttainmentClass::LikelyAttained;
    }
    if report.iterations < MIN_CLASSIFIABLE_ITERS {
        return AttainmentClass::Inconclusive;
    }
    let threshold = config.norm_divergence_threshold;
    if report.final_gradient_norm <= config.grad_tol && report.best_norm <= threshold {
        return AttainmentClass::LikelyAttained;
    }
    let Some(traj) = report.winning_trajectory() else {
        return AttainmentClass::Inconclusive;
    };
    // The window ends where the incumbent last moved: a run that drove the
    // loss to rounding level and then froze says nothing new, while one
    // that keeps sliding along a flat valley does.
    if traj.is_empty() {
        return AttainmentClass::Inconclusive;
    }
    let end = (1..traj.len())
        .rev()
        .find(|&i| traj[i].loss != traj[i - 1].loss || traj[i].norm != traj[i - 1].norm)
        .unwrap_or(0);
    let traj = &traj[..=end];
    let last = traj.last().expect("nonempty trajectory");
    let from = (last.iteration as f64 * 0.9).floor() as usize;
    let mut window: Vec<&TrajectoryPoint> = traj.iter().filter(|p| p.iteration >= from).collect();
    if window.len() < 3 {
        window = traj.iter().rev().take(3).rev().collect();
    }
    if window.len() < 2 {
        return AttainmentClass::Inconclusive;
    }
    let first = window[0];
    let loss_slope = slope(
        &window
            .iter()
            .map(|p| (p.iteration as f64, p.loss))
            .collect::<Vec<_>>(),
    );
    let flat = (last.loss - first.loss).abs() <= 4.0 * f64::EPSILON * first.loss.abs();
    let falling = loss_slope < 0.0 || (flat && last.loss > 0.0);
    let growing = last.norm > first.norm * (1.0 + 1e-9);
    if report.best_norm > threshold && growing && falling {
        AttainmentClass::SuspectedNonAttained
    } else {
        AttainmentClass::Inconclusive
    }
}

/// One member of the divergent weight sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SequencePoint {
    pub k: f64,
    pub distance: f64,
    pub norm: f64,
}

/// Distance to the built-in limit target and weight norm along the
/// sequence whose images converge to it.
pub fn replicate_nonclosed_sequence(k_values: &[f64]) -> Result<Vec<SequencePoint>> {
    let spec = datasets::nonclosed_spec();
    let s = datasets::paper_sample();
    let t = datasets::paper_response();
    k_values
        .iter()
        .map(|&k| {
            if !(k >= 1.0) || !k.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "sequence index {k} must be at least 1"
                )));
            }
            let w = datasets::nonclosed_weights(k);
            let y = weight_map(&spec, &w, &s)?;
            let diff: DMatrix<f64> = t.matrix() - y;
            Ok(SequencePoint {
                k,
                distance: diff.norm(),
                norm: weight_norm(&w),
            })
        })
        .collect()
}
