//! Lossy compression of biased binary memoryless sources with a
//! nonmonotonic-perceptron code.
//!
//! A codeword `s ∈ {±1}^N` is decoded into the representative
//! `ỹ^μ = f_k(x^μ · s / √N)` for `M` Gaussian codebook vectors `x^μ`, where
//! `f_k(u) = +1` iff `|u| < k`. Encoding searches for the codeword whose
//! representative is closest in Hamming distance to the source sequence; the
//! practical encoder is a Gaussian-cavity message-passing iteration
//! ([`bp_encoder`]), checked against an exhaustive search ([`oracle`]) and
//! the rate-distortion bound ([`reference`]).
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`). The aliases
//! below fix the precision used by the container format and the harness.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bp_encoder;
pub mod codec;
pub mod error;
pub mod harness;
pub mod mathutil;
pub mod model;
pub mod oracle;
pub mod reference;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use model::{BinarySeq, Codebook, CodecParams, RdPoint, SourceModel};
pub use scalar::Scalar;

/// Double-precision codebook, as regenerated from container headers.
pub type Codebook64 = Codebook<f64>;
/// Single-precision codebook.
pub type Codebook32 = Codebook<f32>;
pub type CodecParams64 = CodecParams<f64>;
pub type CodecParams32 = CodecParams<f32>;
pub type BpState64 = bp_encoder::BpState<f64>;
pub type BpState32 = bp_encoder::BpState<f32>;
pub type XiIntegrals64 = mathutil::XiIntegrals<f64>;
