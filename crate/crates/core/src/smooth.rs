//! Non-attainment for one-neuron chains `s -> c * act(a s + b) + d` with a
//! monotone smooth activation.
//!
//! Every output of such a chain is coordinatewise monotone in the samples,
//! so the distance from a target to the monotone cone (in either
//! orientation) bounds the fit loss from below. On three samples the bound
//! is approached by ever steeper steps and reached only in the limit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::erm::{fit, AttainmentClass, FitConfig, TrajectoryPoint};
use crate::error::{Error, Result};
use crate::network::{weight_map, Activation, NetworkSpec, ResponseMatrix, SampleMatrix, Weights};

pub use crate::datasets::CHAIN_SAMPLE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Nondecreasing,
    Nonincreasing,
}

/// Squared distance from a target to the nearest monotone vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsotonicBound {
    pub distance_sq: f64,
    pub minimizer: Vec<f64>,
    pub orientation: Orientation,
}

/// Pool-adjacent-violators projection onto nondecreasing vectors.
fn pava(t: &[f64]) -> Vec<f64> {
    // Blocks of (sum, count); merging keeps block means nondecreasing.
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(t.len());
    for &v in t {
        blocks.push((v, 1));
        while blocks.len() > 1 {
            let (s1, n1) = blocks[blocks.len() - 1];
            let (s0, n0) = blocks[blocks.len() - 2];
            if s0 / n0 as f64 <= s1 / n1 as f64 {
                break;
            }
            blocks.pop();
            *blocks.last_mut().unwrap() = (s0 + s1, n0 + n1);
        }
    }
    blocks
        .into_iter()
        .flat_map(|(s, n)| std::iter::repeat_n(s / n as f64, n))
        .collect()
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Best monotone approximation over both orientations. Ties go to the
/// nondecreasing one.
pub fn isotonic_bound(t: &[f64]) -> Result<IsotonicBound> {
    if t.is_empty() {
        return Err(Error::InvalidInput(
            "isotonic bound needs at least one value".into(),
        ));
    }
    if t.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(
            "target contains non-finite values".into(),
        ));
    }
    let up = pava(t);
    let neg: Vec<f64> = t.iter().map(|v| -v).collect();
    let down: Vec<f64> = pava(&neg).into_iter().map(|v| -v).collect();
    let (du, dd) = (sq_dist(t, &up), sq_dist(t, &down));
    Ok(if du <= dd {
        IsotonicBound {
            distance_sq: du,
            minimizer: up,
            orientation: Orientation::Nondecreasing,
        }
    } else {
        IsotonicBound {
            distance_sq: dd,
            minimizer: down,
            orientation: Orientation::Nonincreasing,
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainAnalysis {
    pub activation: Activation,
    pub sample: Vec<f64>,
    pub target: Vec<f64>,
    pub bound: IsotonicBound,
    pub best_loss: f64,
    /// Norm of the best iterate.
    pub best_norm: f64,
    /// `best_loss - bound.distance_sq`; never meaningfully negative.
    pub gap: f64,
    pub classification: AttainmentClass,
    /// Exact zero-loss weights when the target is constant or strictly
    /// monotone.
    pub witness: Option<Weights>,
    /// Best-so-far (loss, norm) trajectory of the winning restart.
    pub trajectory: Vec<TrajectoryPoint>,
    /// Sigmoid chains follow the same argument but are not the worked case.
    pub extension: bool,
}

/// Fit settings for chain analyses: adaptive descent only, with the output
/// layer solved exactly after each step. The relative steps keep pushing
/// the inner parameters outward while the loss is flat to rounding; the
/// polish would stop at the first non-improving step.
pub fn chain_config() -> FitConfig {
    FitConfig {
        restarts: 4,
        max_iters: 20_000,
        polish_fraction: 0.0,
        exact_output: true,
        // Gradients shrink geometrically along the escaping ray; a long
        // second-moment memory would throttle the steps to a crawl.
        beta2: 0.9,
        epsilon: 1e-300,
        ..FitConfig::default()
    }
}

fn chain_spec(activation: Activation) -> NetworkSpec {
    NetworkSpec::new(vec![1, 1, 1], activation).expect("valid chain widths")
}

/// Weights `(a, b, c, d)` hitting a three-point target exactly, if any.
fn exact_chain(activation: Activation, t: &[f64]) -> Option<Weights> {
    let spec = chain_spec(activation);
    let scale = t.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let build = |p: [f64; 4]| -> Option<Weights> {
        let w = Weights::from_flat(&spec, p.to_vec()).ok()?;
        let s = SampleMatrix::from_column(&CHAIN_SAMPLE).ok()?;
        let y = weight_map(&spec, &w, &s).ok()?;
        let err = y
            .iter()
            .zip(t)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        (err <= 1e-9 * scale).then_some(w)
    };
    if t[0] == t[1] && t[1] == t[2] {
        return build([0.0, 0.0, 0.0, t[0]]);
    }
    let (d0, d1) = (t[1] - t[0], t[2] - t[1]);
    if d0 * d1 <= 0.0 {
        return None;
    }
    let f = |x: f64| activation.apply(x);
    let ratio = |a: f64, b: f64| (f(2.0 * a + b) - f(a + b)) / (f(a + b) - f(b));
    let want = d1 / d0;
    // For fixed a > 0 the ratio falls as the centre -b/a moves left.
    let mut a = 1.0;
    let (mut lo, mut hi);
    loop {
        lo = -4.0 * a;
        hi = 2.0 * a;
        if (ratio(a, lo) >= want && ratio(a, hi) <= want) || a > 64.0 {
            break;
        }
        a *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ratio(a, mid) > want {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let b = 0.5 * (lo + hi);
    let c = d0 / (f(a + b) - f(b));
    build([a, b, c, t[0] - c * f(b)])
}

/// Fits the one-neuron chain on the three built-in samples and compares
/// the result with the monotone bound.
pub fn chain_analysis(
    activation: Activation,
    t: &[f64],
    config: &FitConfig,
) -> Result<ChainAnalysis> {
    if t.len() != CHAIN_SAMPLE.len() {
        return Err(Error::ShapeMismatch(format!(
            "chain target needs 3 values, got {}",
            t.len()
        )));
    }
    if activation == Activation::Relu {
        return Err(Error::InvalidInput(
            "chain analysis needs a smooth activation".into(),
        ));
    }
    let bound = isotonic_bound(t)?;
    let spec = chain_spec(activation);
    let s = SampleMatrix::from_column(&CHAIN_SAMPLE)?;
    let resp = ResponseMatrix::from_column(t)?;
    let report = fit(&spec, &s, &resp, config)?;
    let witness = exact_chain(activation, t);
    let classification = if witness.is_some() {
        AttainmentClass::LikelyAttained
    } else {
        report.classification
    };
    let trajectory = report
        .restarts
        .iter()
        .find(|r| r.restart == report.best_restart)
        .map(|r| r.trajectory.clone())
        .unwrap_or_default();
    Ok(ChainAnalysis {
        activation,
        sample: CHAIN_SAMPLE.to_vec(),
        target: t.to_vec(),
        gap: report.best_loss - bound.distance_sq,
        bound,
        best_loss: report.best_loss,
        best_norm: report.best_norm,
        classification,
        witness,
        trajectory,
        extension: activation != Activation::Tanh,
    })
}

pub fn tanh_example_analysis(t: &[f64], config: &FitConfig) -> Result<ChainAnalysis> {
    chain_analysis(Activation::Tanh, t, config)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridAnalysis {
    pub center: Vec<f64>,
    pub epsilon: f64,
    pub grid_points: usize,
    /// Grid points in lexicographic order, last coordinate fastest.
    pub points: Vec<ChainAnalysis>,
    pub suspected_fraction: f64,
}

/// Chain analyses on a uniform grid over the closed box of half-width
/// `epsilon` around `center`. `epsilon = 0` analyses the center alone.
pub fn epsilon_grid_analysis(
    center: &[f64],
    epsilon: f64,
    grid_points: usize,
    config: &FitConfig,
) -> Result<GridAnalysis> {
    if center.len() != CHAIN_SAMPLE.len() {
        return Err(Error::ShapeMismatch(format!(
            "grid center needs 3 values, got {}",
            center.len()
        )));
    }
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidInput(
            "epsilon must be a nonnegative number".into(),
        ));
    }
    if grid_points == 0 {
        return Err(Error::InvalidInput(
            "grid needs at least one point per axis".into(),
        ));
    }
    let g = if epsilon == 0.0 { 1 } else { grid_points };
    let axis: Vec<f64> = (0..g)
        .map(|j| {
            if g == 1 {
                0.0
            } else {
                epsilon * (2.0 * j as f64 / (g - 1) as f64 - 1.0)
            }
        })
        .collect();
    let targets: Vec<Vec<f64>> = (0..g * g * g)
        .map(|idx| {
            let offs = [idx / (g * g), (idx / g) % g, idx % g];
            center.iter().zip(offs).map(|(c, o)| c + axis[o]).collect()
        })
        .collect();
    let points: Vec<ChainAnalysis> = targets
        .par_iter()
        .map(|t| tanh_example_analysis(t, config))
        .collect::<Result<_>>()?;
    let suspected = points
        .iter()
        .filter(|p| p.classification == AttainmentClass::SuspectedNonAttained)
        .count();
    Ok(GridAnalysis {
        center: center.to_vec(),
        epsilon,
        grid_points: g,
        suspected_fraction: suspected as f64 / points.len() as f64,
        points,
    })
}
