//! Geometry of the image of weights of shallow neural networks.
//!
//! The crate answers questions about the set of response matrices a fixed
//! architecture can produce on a fixed sample: its ReLU cone building block
//! ([`cone`]), membership, distance and dimension for two-layer networks
//! ([`geometry`]), empirical risk minimization with attainment diagnostics
//! ([`erm`]), and the monotone-chain analysis for smooth activations
//! ([`smooth`]). Small dense linear feasibility, least-squares and
//! constrained least-squares kernels live in [`linfeas`].

// `!(x > 0.0)` is the NaN-rejecting form used for argument checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cone;
pub mod datasets;
pub mod erm;
mod error;
pub mod geometry;
pub mod linfeas;
pub mod network;
pub mod smooth;

pub use cone::{ConeFace, ConeMembership, FaceDecomposition, IndexSet};
pub use erm::{AttainmentClass, FitConfig, FitReport};
pub use error::{Error, Result};
pub use geometry::{DimensionReport, MembershipCertificate, NumericConfig, Verdict};
pub use network::{
    activate, forward, jacobian, weight_map, weight_norm, Activation, JacobianMode, NetworkSpec,
    ResponseMatrix, SampleMatrix, Weights,
};
pub use smooth::{ChainAnalysis, GridAnalysis, IsotonicBound};
