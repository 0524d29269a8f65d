//! The image of two-layer networks: membership, distance and dimension,
//! and the image of deep networks with one neuron per layer.

mod exact;
mod numeric;

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cone::{self, IndexSet};
use crate::error::{Error, Result};
use crate::linfeas::{self, LinearSystem};
use crate::network::{jacobian_flat, Activation, NetworkSpec, SampleMatrix, Weights};

pub use exact::{
    fit_distance_2layer_q1, fit_distance_2layer_q1_with_cap, membership_2layer_q1,
    membership_2layer_q1_with_cap, DistanceResult, MAX_PATTERNS,
};
pub use numeric::{membership_2layer_general, NumericConfig};

/// Support and output sign of one hidden neuron. Sign 0 marks an unused
/// neuron (its support is then empty).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NeuronPattern {
    pub support: IndexSet,
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternAssignment {
    pub neurons: Vec<NeuronPattern>,
}

impl std::fmt::Display for PatternAssignment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .neurons
            .iter()
            .map(|np| match np.sign {
                0 => "0".to_string(),
                1 => format!("+{}", np.support),
                _ => format!("-{}", np.support),
            })
            .collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    /// Certified by an exact linear feasibility witness.
    Member,
    /// Every pattern was checked and none is feasible.
    NonMember,
    /// A numeric search reached the residual tolerance.
    MemberNumeric,
    Inconclusive,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Member => "MEMBER",
            Verdict::NonMember => "NON_MEMBER",
            Verdict::MemberNumeric => "MEMBER_NUMERIC",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }

    pub fn is_member(self) -> bool {
        matches!(self, Verdict::Member | Verdict::MemberNumeric)
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipCertificate {
    pub verdict: Verdict,
    /// Weights reproducing the target (members) or the best iterate found
    /// (numeric search).
    pub witness: Option<Weights>,
    /// Output bias of the witness.
    pub bias: Vec<f64>,
    pub pattern: Option<PatternAssignment>,
    /// Largest absolute entry of `target - image(witness)`.
    pub residual: Option<f64>,
    /// Patterns examined before the verdict (exact path only).
    pub patterns_checked: usize,
}

/// `d rk[S,1] + 1` for one output, `(q + rk[S,1]) d + q` otherwise.
pub fn dim_upper_bound(s: &SampleMatrix, d: usize, q: usize) -> usize {
    let r = cone::cone_dim(s);
    if q == 1 {
        d * r + 1
    } else {
        (q + r) * d + q
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenericDimension {
    pub value: usize,
    /// Set when the sample-size threshold is a guess rather than proven.
    pub heuristic: bool,
}

/// Dimension of the two-layer image for samples in general position, when
/// a formula applies: `d (p + 1) + 1` for one output once
/// `n >= d (p + 1) + 1`, and `(p + q + 1) d + q` for several outputs once
/// `n` reaches that value (flagged heuristic).
pub fn generic_dim_2layer(p: usize, d: usize, q: usize, n: usize) -> Option<GenericDimension> {
    if q == 1 {
        let v = d * (p + 1) + 1;
        (n >= v).then_some(GenericDimension {
            value: v,
            heuristic: false,
        })
    } else {
        let v = (p + q + 1) * d + q;
        (n >= v).then_some(GenericDimension {
            value: v,
            heuristic: true,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionReport {
    /// Bound implied by the structure of the image (and by `min(m, n q)`).
    pub theoretical_upper: usize,
    pub generic_formula: Option<GenericDimension>,
    pub numerical_rank_max: usize,
    /// Draws requested, and how many were discarded for touching a kink.
    pub trials: usize,
    pub kinked_draws: usize,
    pub seed: u64,
    pub rel_tol: f64,
    /// Rank -> number of draws with that Jacobian rank.
    pub histogram: BTreeMap<usize, usize>,
}

/// Largest numerical rank of the Jacobian of the weight map over `trials`
/// Gaussian weight draws. Draw `i` uses stream `i` of a ChaCha generator
/// seeded with `seed`, so the report does not depend on thread count.
pub fn numerical_image_dim(
    spec: &NetworkSpec,
    s: &SampleMatrix,
    trials: usize,
    seed: u64,
    rel_tol: f64,
) -> Result<DimensionReport> {
    if trials == 0 {
        return Err(Error::InvalidInput("at least one trial is required".into()));
    }
    if s.p() != spec.input_dim() {
        return Err(Error::ShapeMismatch(format!(
            "sample has {} columns, network expects {}",
            s.p(),
            spec.input_dim()
        )));
    }
    let rows = s.rows();
    let relu = spec.activation() == Activation::Relu;
    let ranks: Vec<Option<usize>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let w = Weights::random(spec, 1.0, &mut rng);
            match jacobian_flat(spec, w.as_slice(), &rows, relu) {
                Ok(j) => Ok(Some(linfeas::numerical_rank(&j, rel_tol))),
                Err(Error::KinkTouching { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let mut histogram = BTreeMap::new();
    for r in ranks.iter().flatten() {
        *histogram.entry(*r).or_insert(0) += 1;
    }
    let Some(&numerical_rank_max) = histogram.keys().next_back() else {
        return Err(Error::AllDrawsKinked { trials });
    };

    let widths = spec.widths();
    let mut theoretical_upper = (s.n() * spec.output_dim()).min(spec.param_count());
    let mut generic_formula = None;
    if widths.len() == 3 && relu {
        theoretical_upper = theoretical_upper.min(dim_upper_bound(s, widths[1], widths[2]));
        generic_formula = generic_dim_2layer(widths[0], widths[1], widths[2], s.n());
    }
    Ok(DimensionReport {
        theoretical_upper,
        generic_formula,
        numerical_rank_max,
        trials,
        kinked_draws: ranks.iter().filter(|r| r.is_none()).count(),
        seed,
        rel_tol,
        histogram,
    })
}

/// An `n x p` sample whose columns are strictly increasing: Gaussian draws
/// sorted per column.
pub fn generate_monotone_sample(n: usize, p: usize, seed: u64) -> Result<SampleMatrix> {
    if n < 2 || p == 0 {
        return Err(Error::InvalidInput("need n >= 2 and p >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = nalgebra::DMatrix::zeros(n, p);
    for c in 0..p {
        let col = loop {
            let mut col: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            col.sort_by(f64::total_cmp);
            if col.windows(2).all(|w| w[0] < w[1]) {
                break col;
            }
        };
        for (r, v) in col.into_iter().enumerate() {
            data[(r, c)] = v;
        }
    }
    SampleMatrix::new(data)
}

/// Which orientations of the clipped-affine shape fit a chain target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainMembership {
    pub member: bool,
    pub ascending: bool,
    pub descending: bool,
}

/// Whether `x` is reachable by a deep network with one neuron per layer on
/// the sorted inputs `s`, i.e. `x_i = min(max(alpha s_i + beta, lo), hi)`
/// for some `alpha, beta` and `lo <= hi`. Both signs of `alpha` are tried.
pub fn deep_chain_membership(s: &[f64], x: &[f64], tol: f64) -> Result<ChainMembership> {
    if s.len() != x.len() || s.is_empty() {
        return Err(Error::ShapeMismatch(format!(
            "sample has length {}, target has {}",
            s.len(),
            x.len()
        )));
    }
    if s.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::NotSorted);
    }
    let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= tol {
        return Ok(ChainMembership {
            member: true,
            ascending: true,
            descending: true,
        });
    }
    // The clip levels may be taken as the extreme values of x; points at a
    // level only need the affine value beyond it.
    let fits = |slope_sign: f64| -> Result<bool> {
        let mut sys = LinearSystem::new(2);
        sys.push_ge(vec![slope_sign, 0.0], 0.0);
        for (&si, &xi) in s.iter().zip(x) {
            if xi - lo <= tol {
                sys.push_le(vec![si, 1.0], lo);
            } else if hi - xi <= tol {
                sys.push_ge(vec![si, 1.0], hi);
            } else {
                sys.push_eq(vec![si, 1.0], xi);
            }
        }
        Ok(linfeas::solve_feasibility(&sys, tol)?.is_feasible())
    };
    let ascending = fits(1.0)?;
    let descending = fits(-1.0)?;
    Ok(ChainMembership {
        member: ascending || descending,
        ascending,
        descending,
    })
}
