//! Rate-distortion references for a Bernoulli(p) source under Hamming
//! distortion, and the default threshold heuristic.
//!
//! The rate-distortion function of this source is the textbook expression
//!
//! ```text
//! R(D) = H2(p) - H2(D)   for 0 <= D < min(p, 1-p)
//! R(D) = 0               otherwise
//! ```
//!
//! with `H2` the binary entropy in bits. Every distortion at or above
//! `min(p, 1-p)` is achievable at zero rate by emitting the majority symbol.

use crate::error::{Error, Result};
use crate::mathutil::{binary_entropy, gaussian_tail, inv_binary_entropy, inv_gaussian_tail};
use crate::model::RdPoint;

/// Largest source bias accepted by [`default_threshold`].
pub const MAX_THRESHOLD_BIAS: f64 = 1.0 - 1e-6;

/// Default number of distortion samples on an [`RdCurve`].
pub const DEFAULT_CURVE_POINTS: usize = 512;

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "must lie strictly between 0 and 1",
        });
    }
    Ok(())
}

/// Minimum rate (bits per source symbol) achieving per-symbol distortion `d`.
pub fn rdf(p: f64, d: f64) -> Result<f64> {
    check_p(p)?;
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::InvalidParameter {
            name: "D",
            value: d,
            reason: "must lie in [0, 1]",
        });
    }
    if d >= p.min(1.0 - p) {
        return Ok(0.0);
    }
    Ok((binary_entropy(p)? - binary_entropy(d)?).max(0.0))
}

/// Distortion on the rate-distortion curve at rate `r`, for `0 <= r <= H2(p)`.
pub fn rdf_inverse(p: f64, r: f64) -> Result<f64> {
    check_p(p)?;
    let hp = binary_entropy(p)?;
    if !(r >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "R",
            value: r,
            reason: "must be nonnegative",
        });
    }
    if r > hp {
        return Err(Error::InvalidParameter {
            name: "R",
            value: r,
            reason: "exceeds the source entropy; zero distortion is achievable",
        });
    }
    inv_binary_entropy(hp - r)
}

/// Distortion on the curve, treating rates at or above the entropy as lossless.
pub fn rdf_inverse_saturating(p: f64, r: f64) -> Result<f64> {
    check_p(p)?;
    if r >= binary_entropy(p)? {
        return Ok(0.0);
    }
    rdf_inverse(p, r)
}

/// Threshold `k` at which a random codeword's representative symbols are +1
/// with probability `p`: `1 - 2 H(k) = p`.
pub fn default_threshold(p: f64) -> Result<f64> {
    check_p(p)?;
    if p > MAX_THRESHOLD_BIAS {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "threshold diverges as p approaches 1",
        });
    }
    inv_gaussian_tail((1.0 - p) / 2.0)
}

/// Fraction of +1 representative symbols for a random codeword at threshold `k`.
pub fn output_bias(k: f64) -> Result<f64> {
    Ok(1.0 - 2.0 * gaussian_tail(k)?)
}

/// Sampled rate-distortion curve.
#[derive(Debug, Clone, PartialEq)]
pub struct RdCurve {
    pub p: f64,
    pub points: Vec<RdPoint>,
}

/// Samples `R(D)` on a uniform grid of `points` distortions over `[0, 0.5]`.
/// Points with zero rate keep `rate = 0` even though [`RdPoint::new`] would
/// reject them.
pub fn rd_curve(p: f64, points: usize) -> Result<RdCurve> {
    check_p(p)?;
    if points < 2 {
        return Err(Error::InvalidParameter {
            name: "points",
            value: points as f64,
            reason: "need at least two samples",
        });
    }
    let step = 0.5 / (points - 1) as f64;
    let points = (0..points)
        .map(|i| {
            let d = i as f64 * step;
            rdf(p, d).map(|rate| RdPoint {
                rate,
                distortion: d,
            })
        })
        .collect::<Result<_>>()?;
    Ok(RdCurve { p, points })
}

impl RdCurve {
    /// `D,R` CSV with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("D,R\n");
        for pt in &self.points {
            out.push_str(&format!("{},{}\n", pt.distortion, pt.rate));
        }
        out
    }
}
