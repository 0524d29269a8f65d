//! Domain types, activations, forward evaluation and the weight map.
//!
//! A network with widths `d_1, ..., d_{k+1}` alternates affine layers with a
//! coordinatewise activation; the last affine layer is not followed by an
//! activation. Weights are stored as one flat parameter vector: for every
//! layer the matrix `A_i` in row-major order followed by the bias `b_i`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Activation applied between affine layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Tanh,
    Sigmoid,
}

impl Activation {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::Tanh => x.tanh(),
            Activation::Sigmoid => {
                if x >= 0.0 {
                    1.0 / (1.0 + (-x).exp())
                } else {
                    let e = x.exp();
                    e / (1.0 + e)
                }
            }
        }
    }

    /// Derivative; for ReLU the value at the kink is 0.
    #[inline]
    pub fn derivative(self, x: f64) -> f64 {
        match self {
            Activation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => {
                // sech^2 without cancellation, so gradients stay nonzero deep
                // into saturation.
                let e = (-2.0 * x.abs()).exp();
                4.0 * e / ((1.0 + e) * (1.0 + e))
            }
            Activation::Sigmoid => {
                let e = (-x.abs()).exp();
                e / ((1.0 + e) * (1.0 + e))
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Tanh => "tanh",
            Activation::Sigmoid => "sigmoid",
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "relu" => Ok(Activation::Relu),
            "tanh" => Ok(Activation::Tanh),
            "sigmoid" => Ok(Activation::Sigmoid),
            other => Err(Error::InvalidInput(format!("unknown activation '{other}'"))),
        }
    }
}

/// Coordinatewise activation of a vector.
pub fn activate(kind: Activation, x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| kind.apply(v)).collect()
}

fn check_finite(m: &DMatrix<f64>, what: &str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "{what} has non-finite entries"
        )))
    }
}

fn from_rows(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::InvalidInput(format!("{what} has no rows")));
    }
    let cols = rows[0].len();
    if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
        return Err(Error::ShapeMismatch(format!(
            "{what}: row {} has {} entries, expected {cols}",
            bad + 1,
            rows[bad].len()
        )));
    }
    Ok(DMatrix::from_fn(n, cols, |i, j| rows[i][j]))
}

/// Design matrix: one sample per row.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    data: DMatrix<f64>,
}

impl SampleMatrix {
    pub fn new(data: DMatrix<f64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::InvalidInput(
                "sample matrix needs at least one row and one column".into(),
            ));
        }
        check_finite(&data, "sample matrix")?;
        Ok(Self { data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(from_rows(rows, "sample matrix")?)
    }

    /// Single-feature sample from a column of values.
    pub fn from_column(values: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_column_slice(values.len(), 1, values))
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn p(&self) -> usize {
        self.data.ncols()
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.data.row(i).iter().copied().collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n()).map(|i| self.row(i)).collect()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    /// The n x (p+1) matrix `[S, 1]`.
    pub fn augmented(&self) -> DMatrix<f64> {
        let (n, p) = self.data.shape();
        DMatrix::from_fn(n, p + 1, |i, j| if j < p { self.data[(i, j)] } else { 1.0 })
    }

    /// Rows permuted so that row `i` of the result is row `perm[i]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> Self {
        let data = DMatrix::from_fn(self.n(), self.p(), |i, j| self.data[(perm[i], j)]);
        Self { data }
    }
}

/// Response matrix: one target per row.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseMatrix {
    data: DMatrix<f64>,
}

impl ResponseMatrix {
    pub fn new(data: DMatrix<f64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::InvalidInput(
                "response matrix needs at least one row and one column".into(),
            ));
        }
        check_finite(&data, "response matrix")?;
        Ok(Self { data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(from_rows(rows, "response matrix")?)
    }

    pub fn from_column(values: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_column_slice(values.len(), 1, values))
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn q(&self) -> usize {
        self.data.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n())
            .map(|i| self.data.row(i).iter().copied().collect())
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.data.column(j).iter().copied().collect()
    }

    /// Fails unless the row count matches the sample count of `s`.
    pub fn check_paired(&self, s: &SampleMatrix) -> Result<()> {
        if self.n() != s.n() {
            return Err(Error::ShapeMismatch(format!(
                "response has {} rows but sample has {}",
                self.n(),
                s.n()
            )));
        }
        Ok(())
    }
}

/// Architecture: widths `d_1 = p, ..., d_{k+1} = q` and the activation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkSpec {
    widths: Vec<usize>,
    activation: Activation,
}

impl NetworkSpec {
    pub fn new(widths: Vec<usize>, activation: Activation) -> Result<Self> {
        if widths.len() < 2 {
            return Err(Error::InvalidInput(
                "a network needs at least an input and an output width".into(),
            ));
        }
        if widths.contains(&0) {
            return Err(Error::InvalidInput("all widths must be at least 1".into()));
        }
        Ok(Self { widths, activation })
    }

    /// Two-layer network `p -> d -> q`.
    pub fn two_layer(p: usize, d: usize, q: usize, activation: Activation) -> Result<Self> {
        Self::new(vec![p, d, q], activation)
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    /// Number of affine layers `k`.
    pub fn depth(&self) -> usize {
        self.widths.len() - 1
    }

    pub fn input_dim(&self) -> usize {
        self.widths[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.widths.last().unwrap()
    }

    /// `m = sum (d_i + 1) d_{i+1}`.
    pub fn param_count(&self) -> usize {
        self.widths.windows(2).map(|w| (w[0] + 1) * w[1]).sum()
    }

    /// Offset of layer `l` in the flat parameter vector.
    pub(crate) fn layer_offset(&self, l: usize) -> usize {
        self.widths[..=l]
            .windows(2)
            .map(|w| (w[0] + 1) * w[1])
            .sum()
    }
}

/// Flat weight vector tagged with the widths it belongs to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    widths: Vec<usize>,
    params: Vec<f64>,
}

impl Weights {
    pub fn zeros(spec: &NetworkSpec) -> Self {
        Self {
            widths: spec.widths.clone(),
            params: vec![0.0; spec.param_count()],
        }
    }

    pub fn from_flat(spec: &NetworkSpec, params: Vec<f64>) -> Result<Self> {
        if params.len() != spec.param_count() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} parameters, got {}",
                spec.param_count(),
                params.len()
            )));
        }
        Ok(Self {
            widths: spec.widths.clone(),
            params,
        })
    }

    /// Builds weights from `(A_i, b_i)` pairs; widths are read off the shapes.
    pub fn from_layers(layers: &[(DMatrix<f64>, DVector<f64>)]) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidInput("no layers given".into()));
        }
        let mut widths = vec![layers[0].0.ncols()];
        let mut params = Vec::new();
        for (l, (a, b)) in layers.iter().enumerate() {
            if a.ncols() != *widths.last().unwrap() || b.len() != a.nrows() {
                return Err(Error::ShapeMismatch(format!(
                    "layer {} has inconsistent shapes {}x{} / {}",
                    l + 1,
                    a.nrows(),
                    a.ncols(),
                    b.len()
                )));
            }
            for i in 0..a.nrows() {
                params.extend(a.row(i).iter());
            }
            params.extend(b.iter());
            widths.push(a.nrows());
        }
        Ok(Self { widths, params })
    }

    /// Gaussian entries with standard deviation `scale / sqrt(fan_in)`.
    pub fn random<R: Rng + ?Sized>(spec: &NetworkSpec, scale: f64, rng: &mut R) -> Self {
        let mut params = Vec::with_capacity(spec.param_count());
        for w in spec.widths.windows(2) {
            let std = scale / (w[0] as f64).sqrt();
            for _ in 0..(w[0] + 1) * w[1] {
                let z: f64 = StandardNormal.sample(rng);
                params.push(std * z);
            }
        }
        Self {
            widths: spec.widths.clone(),
            params,
        }
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.params
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.params
    }

    fn layer_offset(&self, l: usize) -> usize {
        self.widths[..=l]
            .windows(2)
            .map(|w| (w[0] + 1) * w[1])
            .sum()
    }

    /// Matrix `A_l` (0-based layer index).
    pub fn matrix(&self, l: usize) -> DMatrix<f64> {
        let (din, dout) = (self.widths[l], self.widths[l + 1]);
        let off = self.layer_offset(l);
        DMatrix::from_row_slice(dout, din, &self.params[off..off + din * dout])
    }

    /// Bias `b_l` (0-based layer index).
    pub fn bias(&self, l: usize) -> DVector<f64> {
        let (din, dout) = (self.widths[l], self.widths[l + 1]);
        let off = self.layer_offset(l) + din * dout;
        DVector::from_column_slice(&self.params[off..off + dout])
    }

    pub fn check(&self, spec: &NetworkSpec) -> Result<()> {
        if self.widths != spec.widths {
            return Err(Error::ShapeMismatch(format!(
                "weights have widths {:?}, network has {:?}",
                self.widths, spec.widths
            )));
        }
        if !self.params.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput(
                "weights have non-finite entries".into(),
            ));
        }
        Ok(())
    }

    /// Every entry multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            widths: self.widths.clone(),
            params: self.params.iter().map(|v| v * c).collect(),
        }
    }
}

/// `sqrt(sum ||A_i||_F^2 + ||b_i||^2)`.
pub fn weight_norm(w: &Weights) -> f64 {
    flat_norm(w.as_slice())
}

pub(crate) fn flat_norm(params: &[f64]) -> f64 {
    params.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Scratch space for evaluating a network on flat parameters.
pub(crate) struct Tape {
    /// Pre-activations of every affine layer (the last one is the output).
    pub pre: Vec<Vec<f64>>,
    /// Activated hidden values; `post[l]` is the input to layer `l + 1`.
    pub post: Vec<Vec<f64>>,
    delta: Vec<f64>,
    delta_prev: Vec<f64>,
}

impl Tape {
    pub fn new(spec: &NetworkSpec) -> Self {
        let pre = spec.widths[1..].iter().map(|&w| vec![0.0; w]).collect();
        let post = spec.widths[1..].iter().map(|&w| vec![0.0; w]).collect();
        let maxw = *spec.widths.iter().max().unwrap();
        Self {
            pre,
            post,
            delta: vec![0.0; maxw],
            delta_prev: vec![0.0; maxw],
        }
    }

    pub fn output(&self) -> &[f64] {
        self.pre.last().unwrap()
    }

    pub fn forward(&mut self, spec: &NetworkSpec, params: &[f64], s: &[f64]) {
        let k = spec.depth();
        let mut off = 0;
        for l in 0..k {
            let (din, dout) = (spec.widths[l], spec.widths[l + 1]);
            let (before, rest) = self.post.split_at_mut(l);
            let input: &[f64] = if l == 0 { s } else { &before[l - 1] };
            let a = &params[off..off + din * dout];
            let b = &params[off + din * dout..off + din * dout + dout];
            let z = &mut self.pre[l];
            for r in 0..dout {
                let row = &a[r * din..(r + 1) * din];
                let mut acc = b[r];
                for c in 0..din {
                    acc += row[c] * input[c];
                }
                z[r] = acc;
            }
            if l + 1 < k {
                let act = spec.activation;
                for (h, &zv) in rest[0].iter_mut().zip(z.iter()) {
                    *h = act.apply(zv);
                }
            }
            off += (din + 1) * dout;
        }
    }

    /// First hidden pre-activation that is exactly zero, as (layer, neuron).
    pub fn kink(&self) -> Option<(usize, usize)> {
        let hidden = self.pre.len() - 1;
        for l in 0..hidden {
            if let Some(j) = self.pre[l].iter().position(|&z| z == 0.0) {
                return Some((l + 1, j));
            }
        }
        None
    }

    /// Accumulates `scale * d(output . seed)/d(params)` into `grad`.
    /// Requires a preceding [`Tape::forward`] on the same input.
    pub fn backward(
        &mut self,
        spec: &NetworkSpec,
        params: &[f64],
        s: &[f64],
        seed: &[f64],
        grad: &mut [f64],
    ) {
        let k = spec.depth();
        let act = spec.activation;
        self.delta[..seed.len()].copy_from_slice(seed);
        for l in (0..k).rev() {
            let (din, dout) = (spec.widths[l], spec.widths[l + 1]);
            let off = spec.layer_offset(l);
            let input: &[f64] = if l == 0 { s } else { &self.post[l - 1] };
            for r in 0..dout {
                let dr = self.delta[r];
                if dr == 0.0 {
                    continue;
                }
                let g = &mut grad[off + r * din..off + (r + 1) * din];
                for c in 0..din {
                    g[c] += dr * input[c];
                }
                grad[off + din * dout + r] += dr;
            }
            if l > 0 {
                let a = &params[off..off + din * dout];
                let zprev = &self.pre[l - 1];
                for c in 0..din {
                    let mut acc = 0.0;
                    for r in 0..dout {
                        acc += a[r * din + c] * self.delta[r];
                    }
                    self.delta_prev[c] = acc * act.derivative(zprev[c]);
                }
                std::mem::swap(&mut self.delta, &mut self.delta_prev);
            }
        }
    }
}

/// Output of the network on a single input vector.
pub fn forward(spec: &NetworkSpec, w: &Weights, s: &[f64]) -> Result<Vec<f64>> {
    w.check(spec)?;
    if s.len() != spec.input_dim() {
        return Err(Error::ShapeMismatch(format!(
            "input has length {}, network expects {}",
            s.len(),
            spec.input_dim()
        )));
    }
    let mut tape = Tape::new(spec);
    tape.forward(spec, w.as_slice(), s);
    Ok(tape.output().to_vec())
}

fn check_sample(spec: &NetworkSpec, s: &SampleMatrix) -> Result<()> {
    if s.p() != spec.input_dim() {
        return Err(Error::ShapeMismatch(format!(
            "sample has {} columns, network expects {}",
            s.p(),
            spec.input_dim()
        )));
    }
    Ok(())
}

/// The n x q matrix whose i-th row is the network output on sample i.
pub fn weight_map(spec: &NetworkSpec, w: &Weights, s: &SampleMatrix) -> Result<DMatrix<f64>> {
    w.check(spec)?;
    check_sample(spec, s)?;
    Ok(weight_map_flat(spec, w.as_slice(), &s.rows()))
}

pub(crate) fn weight_map_flat(
    spec: &NetworkSpec,
    params: &[f64],
    rows: &[Vec<f64>],
) -> DMatrix<f64> {
    let q = spec.output_dim();
    let mut out = DMatrix::zeros(rows.len(), q);
    let mut tape = Tape::new(spec);
    for (i, s) in rows.iter().enumerate() {
        tape.forward(spec, params, s);
        for (j, &y) in tape.output().iter().enumerate() {
            out[(i, j)] = y;
        }
    }
    out
}

/// How [`jacobian`] differentiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JacobianMode {
    Analytic,
    FiniteDifference,
}

/// Derivative of the row-major vectorization of the weight map with respect
/// to the flat parameter vector; shape `(n q) x m`.
///
/// In analytic mode with ReLU, a hidden pre-activation exactly at zero is
/// reported as [`Error::KinkTouching`].
pub fn jacobian(
    spec: &NetworkSpec,
    w: &Weights,
    s: &SampleMatrix,
    mode: JacobianMode,
) -> Result<DMatrix<f64>> {
    w.check(spec)?;
    check_sample(spec, s)?;
    let rows = s.rows();
    match mode {
        JacobianMode::Analytic => jacobian_flat(
            spec,
            w.as_slice(),
            &rows,
            spec.activation == Activation::Relu,
        ),
        JacobianMode::FiniteDifference => Ok(jacobian_fd(spec, w.as_slice(), &rows)),
    }
}

pub(crate) fn jacobian_flat(
    spec: &NetworkSpec,
    params: &[f64],
    rows: &[Vec<f64>],
    fail_on_kink: bool,
) -> Result<DMatrix<f64>> {
    let q = spec.output_dim();
    let m = spec.param_count();
    let mut jac = DMatrix::zeros(rows.len() * q, m);
    let mut tape = Tape::new(spec);
    let mut seed = vec![0.0; q];
    let mut grad = vec![0.0; m];
    for (i, s) in rows.iter().enumerate() {
        tape.forward(spec, params, s);
        if fail_on_kink {
            if let Some((layer, neuron)) = tape.kink() {
                return Err(Error::KinkTouching {
                    sample: i,
                    layer,
                    neuron,
                });
            }
        }
        for j in 0..q {
            seed.iter_mut().for_each(|v| *v = 0.0);
            seed[j] = 1.0;
            grad.iter_mut().for_each(|v| *v = 0.0);
            tape.backward(spec, params, s, &seed, &mut grad);
            for (c, &g) in grad.iter().enumerate() {
                jac[(i * q + j, c)] = g;
            }
        }
    }
    Ok(jac)
}

/// Central differences with step `1e-6 (1 + |theta_j|)`.
pub(crate) fn jacobian_fd(spec: &NetworkSpec, params: &[f64], rows: &[Vec<f64>]) -> DMatrix<f64> {
    let q = spec.output_dim();
    let m = spec.param_count();
    let mut jac = DMatrix::zeros(rows.len() * q, m);
    let mut work = params.to_vec();
    for c in 0..m {
        let h = 1e-6 * (1.0 + params[c].abs());
        work[c] = params[c] + h;
        let plus = weight_map_flat(spec, &work, rows);
        work[c] = params[c] - h;
        let minus = weight_map_flat(spec, &work, rows);
        work[c] = params[c];
        for i in 0..rows.len() {
            for j in 0..q {
                jac[(i * q + j, c)] = (plus[(i, j)] - minus[(i, j)]) / (2.0 * h);
            }
        }
    }
    jac
}

/// Squared Frobenius loss and its gradient (`grad` is overwritten).
pub(crate) fn loss_and_gradient(
    spec: &NetworkSpec,
    params: &[f64],
    rows: &[Vec<f64>],
    targets: &[Vec<f64>],
    tape: &mut Tape,
    grad: &mut [f64],
) -> f64 {
    grad.iter_mut().for_each(|g| *g = 0.0);
    let q = spec.output_dim();
    let mut seed = vec![0.0; q];
    let mut loss = 0.0;
    for (s, t) in rows.iter().zip(targets) {
        tape.forward(spec, params, s);
        for j in 0..q {
            let r = tape.output()[j] - t[j];
            loss += r * r;
            seed[j] = 2.0 * r;
        }
        tape.backward(spec, params, s, &seed, grad);
    }
    loss
}

/// Squared Frobenius loss only.
pub(crate) fn loss_only(
    spec: &NetworkSpec,
    params: &[f64],
    rows: &[Vec<f64>],
    targets: &[Vec<f64>],
    tape: &mut Tape,
) -> f64 {
    let mut loss = 0.0;
    for (s, t) in rows.iter().zip(targets) {
        tape.forward(spec, params, s);
        for (y, tv) in tape.output().iter().zip(t) {
            loss += (y - tv) * (y - tv);
        }
    }
    loss
}
