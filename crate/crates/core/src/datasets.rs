//! Built-in instances: the 6 x 2 non-closedness example and its
//! divergent weight sequence, plus the three-point smooth-activation example.

use nalgebra::{DMatrix, DVector};

use crate::network::{Activation, NetworkSpec, ResponseMatrix, SampleMatrix, Weights};

/// Samples `(i - 3, 0)` for `i = 1..5` and `(1, 1)`.
pub fn paper_sample() -> SampleMatrix {
    SampleMatrix::from_rows(&[
        vec![-2.0, 0.0],
        vec![-1.0, 0.0],
        vec![0.0, 0.0],
        vec![1.0, 0.0],
        vec![2.0, 0.0],
        vec![1.0, 1.0],
    ])
    .expect("static data")
}

/// Target in the closure of the two-layer image but not in the image.
pub fn paper_response() -> ResponseMatrix {
    ResponseMatrix::from_rows(&[
        vec![2.0, 0.0],
        vec![1.0, 0.0],
        vec![0.0, 0.0],
        vec![-2.0, 0.0],
        vec![-4.0, 0.0],
        vec![0.0, 1.0],
    ])
    .expect("static data")
}

/// Widths `(2, 2, 2)` with ReLU.
pub fn nonclosed_spec() -> NetworkSpec {
    NetworkSpec::two_layer(2, 2, 2, Activation::Relu).expect("static widths")
}

/// Member `k` of the weight sequence whose image converges to
/// [`paper_response`] while its norm grows without bound.
pub fn nonclosed_weights(k: f64) -> Weights {
    let a1 = DMatrix::from_row_slice(2, 2, &[-1.0, 2.0 * k + 1.0, 1.0, k - 1.0]);
    let a2 = DMatrix::from_row_slice(2, 2, &[1.0, -2.0, 0.0, 1.0 / k]);
    Weights::from_layers(&[(a1, DVector::zeros(2)), (a2, DVector::zeros(2))])
        .expect("static shapes")
}

/// Sample points `0, 1, 2` of the single-input smooth example.
pub const CHAIN_SAMPLE: [f64; 3] = [0.0, 1.0, 2.0];

/// Target `(0, 2, 1)` of the single-input smooth example.
pub const CHAIN_TARGET: [f64; 3] = [0.0, 2.0, 1.0];
