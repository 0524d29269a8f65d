//! Exact membership and distance for single-output two-layer ReLU networks.
//!
//! A point of the image is `sum_i c_i max(S a_i + b_i 1, 0) + lambda 1`.
//! Since `c max(u, 0) = sign(c) max(|c| u, 0)`, every coefficient can be
//! taken in `{-1, 0, +1}`. Fixing, per neuron, a realizable support `I_i` and
//! a sign turns the image into a linear image of a polyhedral cone, so
//! membership is one linear feasibility problem per pattern and the
//! distance is one least-squares problem over a polyhedron per pattern.

use std::sync::atomic::{AtomicBool, Ordering};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::{MembershipCertificate, NeuronPattern, PatternAssignment, Verdict};
use crate::cone::{self, augmented_rows, IndexSet};
use crate::error::{Error, Result};
use crate::linfeas::{self, LinearSystem};
use crate::network::{weight_map, Activation, NetworkSpec, SampleMatrix, Weights};

/// Upper limit on the number of patterns a single query may visit.
pub const MAX_PATTERNS: usize = 2_000_000;

/// `(support, sign)` choices for one active neuron, in search order:
/// supports by size then lexicographically, `+` before `-`.
fn neuron_options(s: &SampleMatrix, cap: usize) -> Result<Vec<NeuronPattern>> {
    let faces = cone::enumerate_faces_with_cap(s, cap)?;
    Ok(faces
        .faces
        .iter()
        .filter(|f| !f.indices.is_empty())
        .flat_map(|f| {
            [1i8, -1].map(|sign| NeuronPattern {
                support: f.indices,
                sign,
            })
        })
        .collect())
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

fn combinations(n: usize, r: usize, out: &mut Vec<Vec<usize>>) {
    let mut idx: Vec<usize> = (0..r).collect();
    if r > n {
        return;
    }
    loop {
        out.push(idx.clone());
        let Some(i) = (0..r).rev().find(|&i| idx[i] != i + n - r) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Sets of distinct options of the given sizes, sorted by total support
/// size and then by option index. Repeating an option is never needed: two
/// neurons with the same support and sign span the same closed face.
fn pattern_list(
    options: &[NeuronPattern],
    sizes: impl Iterator<Item = usize>,
) -> Result<Vec<Vec<usize>>> {
    let sizes: Vec<usize> = sizes.collect();
    let total = sizes.iter().fold(0usize, |acc, &r| {
        acc.saturating_add(binomial(options.len(), r))
    });
    if total > MAX_PATTERNS {
        return Err(Error::CapExceeded {
            size: total,
            cap: MAX_PATTERNS,
        });
    }
    let mut combos = Vec::with_capacity(total);
    for r in sizes {
        combinations(options.len(), r, &mut combos);
    }
    let weight = |c: &Vec<usize>| c.iter().map(|&i| options[i].support.len()).sum::<usize>();
    combos.sort_by(|a, b| weight(a).cmp(&weight(b)).then_with(|| a.cmp(b)));
    Ok(combos)
}

/// Variables: `(a_i, b_i)` per active neuron, then `lambda`.
struct PatternProblem {
    /// Rows of `x -> sum_i eps_i [j in I_i] (s_j a_i + b_i) + lambda`.
    value: DMatrix<f64>,
    /// Sign constraints `G x <= 0`.
    sign: DMatrix<f64>,
}

fn pattern_problem(rows: &[Vec<f64>], active: &[NeuronPattern]) -> PatternProblem {
    let n = rows.len();
    let w = rows[0].len();
    let nv = active.len() * w + 1;
    let mut value = DMatrix::zeros(n, nv);
    let mut sign = DMatrix::zeros(active.len() * n, nv);
    for (i, np) in active.iter().enumerate() {
        let eps = np.sign as f64;
        for (j, row) in rows.iter().enumerate() {
            let on = np.support.contains(j);
            let dir = if on { -1.0 } else { 1.0 };
            for c in 0..w {
                if on {
                    value[(j, i * w + c)] = eps * row[c];
                }
                sign[(i * n + j, i * w + c)] = dir * row[c];
            }
        }
    }
    for j in 0..n {
        value[(j, nv - 1)] = 1.0;
    }
    PatternProblem { value, sign }
}

/// Two-layer weights of width `d` realizing the pattern solution `x`.
fn reconstruct(p: usize, d: usize, active: &[NeuronPattern], x: &[f64]) -> Weights {
    let w = p + 1;
    let mut a1 = DMatrix::zeros(d, p);
    let mut b1 = DVector::zeros(d);
    let mut a2 = DMatrix::zeros(1, d);
    for (i, np) in active.iter().enumerate() {
        for c in 0..p {
            a1[(i, c)] = x[i * w + c];
        }
        b1[i] = x[i * w + p];
        a2[(0, i)] = np.sign as f64;
    }
    let b2 = DVector::from_element(1, x[x.len() - 1]);
    Weights::from_layers(&[(a1, b1), (a2, b2)]).expect("consistent shapes")
}

fn assignment(d: usize, active: &[NeuronPattern]) -> PatternAssignment {
    let mut neurons = active.to_vec();
    neurons.resize(
        d,
        NeuronPattern {
            support: IndexSet::EMPTY,
            sign: 0,
        },
    );
    PatternAssignment { neurons }
}

fn check_inputs(s: &SampleMatrix, t: &[f64], d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidInput("width must be at least 1".into()));
    }
    if t.len() != s.n() {
        return Err(Error::ShapeMismatch(format!(
            "target has length {}, sample has {} rows",
            t.len(),
            s.n()
        )));
    }
    if !t.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidInput("target has non-finite entries".into()));
    }
    Ok(())
}

fn output_of(s: &SampleMatrix, w: &Weights) -> Vec<f64> {
    let d = w.widths()[1];
    let spec = NetworkSpec::two_layer(s.p(), d, 1, Activation::Relu).expect("valid widths");
    weight_map(&spec, w, s)
        .expect("consistent shapes")
        .column(0)
        .iter()
        .copied()
        .collect()
}

enum Probe {
    Found(MembershipCertificate),
    Empty,
    Unreliable,
}

/// Exact membership of `t` in the image of the width-`d` two-layer ReLU
/// network on `s`, with the default face-enumeration cap.
///
/// `tol` bounds the coordinatewise forward-pass residual of a witness.
pub fn membership_2layer_q1(
    s: &SampleMatrix,
    t: &[f64],
    d: usize,
    tol: f64,
) -> Result<MembershipCertificate> {
    membership_2layer_q1_with_cap(s, t, d, tol, cone::DEFAULT_FACE_CAP)
}

pub fn membership_2layer_q1_with_cap(
    s: &SampleMatrix,
    t: &[f64],
    d: usize,
    tol: f64,
    cap: usize,
) -> Result<MembershipCertificate> {
    check_inputs(s, t, d)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let options = neuron_options(s, cap)?;
    let patterns = pattern_list(&options, 0..=d.min(options.len()))?;
    let rows = augmented_rows(s);
    // A witness of the linear system within this tolerance reproduces `t`
    // through the forward pass to within `tol`.
    let lp_tol = tol / (2.0 * (d as f64 + 1.0));

    let probe = |combo: &Vec<usize>| -> Probe {
        let active: Vec<NeuronPattern> = combo.iter().map(|&i| options[i]).collect();
        let prob = pattern_problem(&rows, &active);
        let mut sys = LinearSystem::new(prob.value.ncols());
        for (j, &tj) in t.iter().enumerate() {
            sys.push_eq(prob.value.row(j).iter().copied().collect(), tj);
        }
        for r in 0..prob.sign.nrows() {
            sys.push_le(prob.sign.row(r).iter().copied().collect(), 0.0);
        }
        match linfeas::solve_feasibility(&sys, lp_tol) {
            Ok(res) => match res.witness {
                None => Probe::Empty,
                Some(x) => {
                    let witness = reconstruct(s.p(), d, &active, &x);
                    let y = output_of(s, &witness);
                    let residual = y
                        .iter()
                        .zip(t)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max);
                    if residual > tol {
                        return Probe::Unreliable;
                    }
                    Probe::Found(MembershipCertificate {
                        verdict: Verdict::Member,
                        bias: vec![x[x.len() - 1]],
                        witness: Some(witness),
                        pattern: Some(assignment(d, &active)),
                        residual: Some(residual),
                        patterns_checked: 0,
                    })
                }
            },
            Err(_) => Probe::Unreliable,
        }
    };

    let unreliable = AtomicBool::new(false);
    let found = patterns
        .par_iter()
        .enumerate()
        .find_map_first(|(k, c)| match probe(c) {
            Probe::Found(mut cert) => {
                cert.patterns_checked = k + 1;
                Some(cert)
            }
            Probe::Unreliable => {
                unreliable.store(true, Ordering::Relaxed);
                None
            }
            Probe::Empty => None,
        });
    if let Some(cert) = found {
        return Ok(cert);
    }
    Ok(MembershipCertificate {
        verdict: if unreliable.into_inner() {
            Verdict::Inconclusive
        } else {
            Verdict::NonMember
        },
        witness: None,
        bias: Vec::new(),
        pattern: None,
        residual: None,
        patterns_checked: patterns.len(),
    })
}

/// Nearest point of the width-`d` single-output image to a target.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DistanceResult {
    pub distance: f64,
    pub nearest: Vec<f64>,
    pub pattern: PatternAssignment,
    pub witness: Weights,
    pub patterns_checked: usize,
}

/// Euclidean distance from `t` to the image (which is closed for a single
/// output), with the default face-enumeration cap.
pub fn fit_distance_2layer_q1(s: &SampleMatrix, t: &[f64], d: usize) -> Result<DistanceResult> {
    fit_distance_2layer_q1_with_cap(s, t, d, cone::DEFAULT_FACE_CAP)
}

pub fn fit_distance_2layer_q1_with_cap(
    s: &SampleMatrix,
    t: &[f64],
    d: usize,
    cap: usize,
) -> Result<DistanceResult> {
    check_inputs(s, t, d)?;
    let options = neuron_options(s, cap)?;
    // Adding a neuron never shrinks a pattern's closed set (its weights may
    // be zero), so only patterns with the maximal number of neurons matter.
    let patterns = pattern_list(&options, std::iter::once(d.min(options.len())))?;
    let rows = augmented_rows(s);
    let target = DVector::from_column_slice(t);

    let solved: Vec<(f64, Vec<f64>, usize)> = patterns
        .par_iter()
        .enumerate()
        .map(|(k, combo)| {
            let active: Vec<NeuronPattern> = combo.iter().map(|&i| options[i]).collect();
            let prob = pattern_problem(&rows, &active);
            let h = DVector::zeros(prob.sign.nrows());
            let sol = linfeas::constrained_least_squares(&prob.value, &target, &prob.sign, &h)?
                .expect("the zero vector satisfies homogeneous sign constraints");
            Ok((sol.residual_sq, sol.x.iter().copied().collect(), k))
        })
        .collect::<Result<_>>()?;
    let (_, x, k) = solved
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)))
        .expect("at least the empty pattern");
    let active: Vec<NeuronPattern> = patterns[k].iter().map(|&i| options[i]).collect();
    let witness = reconstruct(s.p(), d, &active, &x);
    let nearest = output_of(s, &witness);
    let distance = nearest
        .iter()
        .zip(t)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    Ok(DistanceResult {
        distance,
        nearest,
        pattern: assignment(d, &active),
        witness,
        patterns_checked: patterns.len(),
    })
}

/// Coordinates `s_j a + b` of every active neuron at the witness; used by
/// tests to confirm the pattern's sign constraints.
#[cfg(test)]
pub(crate) fn preactivations(s: &SampleMatrix, w: &Weights) -> Vec<Vec<f64>> {
    let a1 = w.matrix(0);
    let b1 = w.bias(0);
    let rows = augmented_rows(s);
    (0..a1.nrows())
        .map(|i| {
            let mut wi: Vec<f64> = a1.row(i).iter().copied().collect();
            wi.push(b1[i]);
            rows.iter().map(|r| cone::dot(r, &wi)).collect()
        })
        .collect()
}
