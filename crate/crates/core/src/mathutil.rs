//! Numerically stable scalar functions: the Gaussian tail, binary entropy and
//! its inverse, and the closed-form Gaussian averages of the two-threshold
//! channel factor.
//!
//! The channel factor for a source symbol `y` is
//! `Xi(u) = exp(-(beta/2) * (1 - y * f_k(u)))`, which equals 1 when the
//! perceptron output matches `y` and `exp(-beta)` otherwise. Averaged over a
//! Gaussian cavity field `u = delta - (1-q) a + sqrt(1-q) z`, the factor and
//! its first two derivatives reduce to Gaussian interval probabilities and
//! density differences evaluated at
//!
//! ```text
//! w± = (±k - delta + (1-q) a) / sqrt(1-q)
//! ```

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Gaussian averages of the channel factor and of its first and second
/// derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiIntegrals<T> {
    pub i0: T,
    pub i1: T,
    pub i2: T,
}

impl<T: Scalar> XiIntegrals<T> {
    /// Cavity ratio `i1 / i0`.
    #[inline]
    pub fn ratio(&self) -> T {
        self.i1 / self.i0
    }

    /// Per-factor Onsager contribution `i2 / i0 - (i1 / i0)^2`.
    #[inline]
    pub fn onsager_term(&self) -> T {
        let r = self.ratio();
        self.i2 / self.i0 - r * r
    }
}

/// Integration limits of the cavity integral in standardized units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityGeometry<T> {
    pub w_minus: T,
    pub w_plus: T,
    /// `1 - q` after clamping from below.
    pub one_minus_q: T,
}

impl<T: Scalar> CavityGeometry<T> {
    pub fn new(delta: T, a: T, q: T, k: T, epsilon_q: T) -> Self {
        let one_minus_q = (T::one() - q).max(epsilon_q);
        let sigma = one_minus_q.sqrt();
        let shift = one_minus_q * a;
        Self {
            w_minus: (-k - delta + shift) / sigma,
            w_plus: (k - delta + shift) / sigma,
            one_minus_q,
        }
    }
}

#[inline]
fn std_normal_pdf<T: Scalar>(x: T) -> T {
    // 1/sqrt(2*pi)
    T::of(0.398_942_280_401_432_7) * (-(x * x) / T::of(2.0)).exp()
}

#[inline]
fn tail_unchecked<T: Scalar>(x: T) -> T {
    T::of(0.5) * (x * T::FRAC_1_SQRT_2()).erfc()
}

/// Upper Gaussian tail `H(x) = P(Z > x)` for a standard normal `Z`.
pub fn gaussian_tail<T: Scalar>(x: T) -> Result<T> {
    if !x.is_finite() {
        return Err(Error::InvalidParameter {
            name: "x",
            value: x.to_f64_lossy(),
            reason: "gaussian tail requires a finite argument",
        });
    }
    Ok(tail_unchecked(x))
}

/// The `x >= 0` solving `gaussian_tail(x) = tail`, for `tail` in `(0, 0.5]`.
pub fn inv_gaussian_tail(tail: f64) -> Result<f64> {
    if !(tail > 0.0 && tail <= 0.5) {
        return Err(Error::InvalidParameter {
            name: "tail",
            value: tail,
            reason: "must lie in (0, 0.5]",
        });
    }
    let (mut lo, mut hi) = (0.0_f64, 40.0_f64);
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if tail_unchecked(mid) > tail {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Binary entropy in bits, with `0 log 0 = 0`.
pub fn binary_entropy(q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidParameter {
            name: "q",
            value: q,
            reason: "binary entropy needs a probability in [0, 1]",
        });
    }
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    Ok(term(q) + term(1.0 - q))
}

/// Inverse of [`binary_entropy`] on the lower branch `[0, 0.5]`, by bisection
/// to an absolute tolerance of 1e-12.
pub fn inv_binary_entropy(h: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&h) {
        return Err(Error::InvalidParameter {
            name: "h",
            value: h,
            reason: "entropy must lie in [0, 1] bits",
        });
    }
    if h == 0.0 {
        return Ok(0.0);
    }
    if h == 1.0 {
        return Ok(0.5);
    }
    let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if binary_entropy(mid)? < h {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Probability mass of a standard normal inside and outside `(lo, hi)`,
/// assuming `lo <= hi` and `lo + hi >= 0`.
#[inline]
fn interval_masses<T: Scalar>(lo: T, hi: T) -> (T, T) {
    let upper = tail_unchecked(hi);
    if lo >= T::zero() {
        let from_lo = tail_unchecked(lo);
        (from_lo - upper, tail_unchecked(-lo) + upper)
    } else {
        let below = tail_unchecked(-lo);
        (T::one() - below - upper, below + upper)
    }
}

/// `phi(lo) - phi(hi)` and `lo phi(lo) - hi phi(hi)` for `hi >= |lo|`,
/// factoring out `phi(lo)` so no two large exponentials are subtracted.
#[inline]
fn density_differences<T: Scalar>(lo: T, hi: T) -> (T, T) {
    let pdf_lo = std_normal_pdf(lo);
    let half_gap = (hi - lo) * (hi + lo) / T::of(2.0);
    let em1 = (-half_gap).exp_m1();
    let first = -pdf_lo * em1;
    let second = pdf_lo * ((lo - hi) - hi * em1);
    (first, second)
}

/// Closed-form Gaussian averages of the channel factor and its first two
/// derivatives for source symbol `y`, cavity mean `delta`, cavity ratio `a`
/// and overlap `q`.
///
/// The interval endpoints are reflected into a canonical orientation before
/// evaluation, so mirrored inputs `(delta, a) -> (-delta, -a)` yield exactly
/// the same `i0` and `i2` and exactly negated `i1`.
pub fn xi_integrals<T: Scalar>(
    y: i8,
    delta: T,
    a: T,
    q: T,
    k: T,
    beta: T,
    epsilon_q: T,
) -> Result<XiIntegrals<T>> {
    let geometry = CavityGeometry::new(delta, a, q, k, epsilon_q);
    xi_integrals_at(y, &geometry, beta)
}

/// [`xi_integrals`] for precomputed cavity geometry.
pub fn xi_integrals_at<T: Scalar>(
    y: i8,
    geometry: &CavityGeometry<T>,
    beta: T,
) -> Result<XiIntegrals<T>> {
    let CavityGeometry {
        w_minus,
        w_plus,
        one_minus_q,
    } = *geometry;
    let overflow = || Error::NumericOverflow {
        w_minus: w_minus.to_f64_lossy(),
        w_plus: w_plus.to_f64_lossy(),
        iteration: None,
    };
    if !(w_minus.is_finite() && w_plus.is_finite()) {
        return Err(overflow());
    }

    let mirrored = w_minus + w_plus < T::zero();
    let (lo, hi) = if mirrored {
        (-w_plus, -w_minus)
    } else {
        (w_minus, w_plus)
    };
    let (inside, outside) = interval_masses(lo, hi);
    let (pdf_diff, weighted_diff) = density_differences(lo, hi);
    let pdf_diff = if mirrored { -pdf_diff } else { pdf_diff };

    let floor = (-beta).exp();
    let weight = -(-beta).exp_m1();
    let sign = if y >= 0 { T::one() } else { -T::one() };
    let matched = if y >= 0 { inside } else { outside };

    let i0 = floor + weight * matched;
    let i1 = weight * sign * pdf_diff / one_minus_q.sqrt();
    let i2 = weight * sign * weighted_diff / one_minus_q;

    if !(i0.is_finite() && i1.is_finite() && i2.is_finite()) {
        return Err(overflow());
    }
    Ok(XiIntegrals { i0, i1, i2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_tail_values() {
        assert_eq!(gaussian_tail(0.0_f64).unwrap(), 0.5);
        assert!((gaussian_tail(1.2816_f64).unwrap() - 0.1000).abs() < 1e-4);
        let far = gaussian_tail(-8.0_f64).unwrap();
        assert!((far - (1.0 - 6.22e-16)).abs() < 1e-16 || far == 1.0);
        assert!(gaussian_tail(f64::NAN).is_err());
        assert!(gaussian_tail(f64::INFINITY).is_err());
        assert!((gaussian_tail(1.0_f32).unwrap() - 0.158_655_26).abs() < 1e-6);
    }

    #[test]
    fn gaussian_tail_reflection() {
        for i in -400..=400 {
            let x = i as f64 * 0.025;
            let s = gaussian_tail(x).unwrap() + gaussian_tail(-x).unwrap();
            assert!((s - 1.0).abs() <= 1e-14, "x = {x}: {s}");
        }
    }

    #[test]
    fn gaussian_tail_is_decreasing() {
        let mut prev = 1.0;
        for i in -300..=300 {
            let v = gaussian_tail(i as f64 * 0.02).unwrap();
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn inverse_tail() {
        assert!((inv_gaussian_tail(0.25).unwrap() - 0.674_489_750_196_08).abs() < 1e-10);
        assert!(inv_gaussian_tail(0.5).unwrap().abs() < 1e-13);
        assert!(inv_gaussian_tail(0.0).is_err());
        assert!(inv_gaussian_tail(0.6).is_err());
    }

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        let direct = -0.11 * 0.11_f64.log2() - 0.89 * 0.89_f64.log2();
        assert_eq!(binary_entropy(0.11).unwrap(), direct);
        assert!((direct - 0.4999).abs() < 1e-4);
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.1).is_err());
    }

    #[test]
    fn inverse_entropy_values() {
        assert_eq!(inv_binary_entropy(1.0).unwrap(), 0.5);
        assert_eq!(inv_binary_entropy(0.0).unwrap(), 0.0);
        assert!((inv_binary_entropy(0.5).unwrap() - 0.1100).abs() < 1e-4);
        assert!(inv_binary_entropy(1.5).is_err());
    }

    #[test]
    fn beta_to_zero_flattens_the_channel() {
        for &y in &[1i8, -1] {
            let xi = xi_integrals(y, 0.4_f64, -0.2, 0.3, 0.8, 1e-12, 1e-12).unwrap();
            assert!((xi.i0 - 1.0).abs() < 1e-11);
            assert!(xi.i1.abs() < 1e-11);
            assert!(xi.i2.abs() < 1e-11);
        }
    }

    #[test]
    fn huge_threshold_always_matches_plus_one() {
        let xi = xi_integrals(1, 0.2_f64, 0.1, 0.5, 60.0, 3.0, 1e-12).unwrap();
        assert!((xi.i0 - 1.0).abs() < 1e-15);
        assert!(xi.i1.abs() < 1e-15);
    }

    #[test]
    fn i1_antisymmetric_in_y_and_mirror_symmetry_is_exact() {
        for &(d, a, q) in &[(0.3, 0.1, 0.25), (-1.7, 0.9, 0.8), (2.5, -0.4, 0.0)] {
            let p = xi_integrals::<f64>(1, d, a, q, 0.9, 2.0, 1e-12).unwrap();
            let m = xi_integrals(-1, d, a, q, 0.9, 2.0, 1e-12).unwrap();
            assert_eq!(p.i1, -m.i1);
            for &y in &[1i8, -1] {
                let f = xi_integrals(y, d, a, q, 0.9, 2.0, 1e-12).unwrap();
                let r = xi_integrals(y, -d, -a, q, 0.9, 2.0, 1e-12).unwrap();
                assert_eq!(f.i0, r.i0);
                assert_eq!(f.i1, -r.i1);
                assert_eq!(f.i2, r.i2);
            }
        }
    }

    #[test]
    fn i0_stays_in_unit_interval() {
        for &y in &[1i8, -1] {
            for i in 0..40 {
                let d = -4.0 + 0.2 * i as f64;
                let xi = xi_integrals::<f64>(y, d, 0.3, 0.6, 0.67, 10.0, 1e-12).unwrap();
                assert!(xi.i0 > 0.0 && xi.i0 <= 1.0);
            }
        }
    }

    #[test]
    fn overlap_near_one_is_clamped() {
        let xi = xi_integrals(1, 0.1_f64, 0.0, 1.0, 0.5, 5.0, 1e-12).unwrap();
        assert!(xi.i0.is_finite() && xi.i1.is_finite() && xi.i2.is_finite());
        let g = CavityGeometry::new(0.0_f64, 0.0, 1.0, 1.0, 1e-12);
        assert_eq!(g.one_minus_q, 1e-12);
    }

    #[test]
    fn non_finite_inputs_report_overflow() {
        assert!(matches!(
            xi_integrals::<f64>(1, f64::NAN, 0.0, 0.0, 1.0, 1.0, 1e-12),
            Err(Error::NumericOverflow { .. })
        ));
    }

    #[test]
    fn single_precision_tracks_double() {
        let d = xi_integrals(-1, 0.3_f64, 0.1, 0.25, 1.0, 2.0, 1e-12).unwrap();
        let s = xi_integrals(-1_i8, 0.3_f32, 0.1, 0.25, 1.0, 2.0, 1e-12).unwrap();
        assert!((d.i0 - s.i0 as f64).abs() < 1e-6);
        assert!((d.i1 - s.i1 as f64).abs() < 1e-6);
        assert!((d.i2 - s.i2 as f64).abs() < 1e-6);
    }
}
