//! Ground-truth and baseline encoders, and Monte Carlo estimates of the
//! finite-length fidelity failure/success probabilities.

use rayon::prelude::*;

use crate::codec::{decode, hamming_distortion, output_fk};
use crate::error::{Error, Result};
use crate::harness::gen_instance;
use crate::model::{validate_instance, BinarySeq, Codebook, SourceModel};
use crate::reference::rdf;
use crate::rng::RngStream;
use crate::scalar::Scalar;

/// Largest codeword length accepted by [`encode_exhaustive`].
pub const MAX_EXHAUSTIVE_N: usize = 24;

fn check_search_size(n: usize) -> Result<()> {
    if n > MAX_EXHAUSTIVE_N {
        return Err(Error::TooLarge {
            n,
            max: MAX_EXHAUSTIVE_N,
        });
    }
    Ok(())
}

fn unnormalized_dots<T: Scalar>(s: &[i8], codebook: &Codebook<T>) -> Vec<T> {
    (0..codebook.rows())
        .map(|mu| {
            codebook.row(mu).iter().zip(s).fold(
                T::zero(),
                |acc, (&x, &b)| if b > 0 { acc + x } else { acc - x },
            )
        })
        .collect()
}

#[inline]
fn count_distortion<T: Scalar>(y: &[i8], dots: &[T], scale: T, k: T) -> usize {
    y.iter()
        .zip(dots)
        .filter(|(&y, &dot)| output_fk(dot / scale, k) != y)
        .count()
}

/// Codeword whose lexicographic index (position 0 most significant, +1 before -1) is `index`.
fn word_from_index(index: u64, n: usize) -> Vec<i8> {
    (0..n)
        .map(|pos| {
            if index >> (n - 1 - pos) & 1 == 1 {
                -1
            } else {
                1
            }
        })
        .collect()
}

/// Gray-code scan over all codewords with `s_0 = +1` (`half`) or over the
/// full cube, returning the lexicographic index of the best word.
fn gray_scan<T: Scalar>(y: &BinarySeq, codebook: &Codebook<T>, k: T, half: bool) -> u64 {
    let n = codebook.cols();
    let free_bits = if half { n - 1 } else { n };
    let scale = T::of(n as f64).sqrt();
    let two = T::of(2.0);
    let mut word = vec![1i8; n];
    let mut dots = unnormalized_dots(&word, codebook);
    let ys = y.as_slice();

    let mut best_dist = count_distortion(ys, &dots, scale, k);
    let mut best_index = 0u64;
    let mut gray = 0u64;
    for i in 1..(1u64 << free_bits) {
        let bit = i.trailing_zeros() as usize;
        gray ^= 1 << bit;
        let pos = n - 1 - bit;
        let flip_to = -word[pos];
        word[pos] = flip_to;
        for (mu, dot) in dots.iter_mut().enumerate() {
            let x = codebook.row(mu)[pos];
            *dot = if flip_to > 0 {
                *dot + two * x
            } else {
                *dot - two * x
            };
        }
        let d = count_distortion(ys, &dots, scale, k);
        if d < best_dist || (d == best_dist && gray < best_index) {
            best_dist = d;
            best_index = gray;
        }
    }
    best_index
}

/// Exact minimum-distortion codeword by enumeration.
///
/// Ties resolve to the lexicographically smallest word with +1 ordered
/// before -1. Since decoding is even in the codeword, only words with
/// `s_0 = +1` are scanned; the smallest minimizer always lies in that half.
pub fn encode_exhaustive<T: Scalar>(
    y: &BinarySeq,
    codebook: &Codebook<T>,
    k: T,
) -> Result<(BinarySeq, usize)> {
    validate_instance(y, codebook)?;
    check_search_size(codebook.cols())?;
    let index = gray_scan(y, codebook, k, true);
    let word = BinarySeq::from_trusted(word_from_index(index, codebook.cols()));
    let distortion = hamming_distortion(y, &decode(&word, codebook, k)?)?;
    Ok((word, distortion))
}

/// Single-bit-flip descent from a random start, visiting positions in a fresh
/// random order each pass and accepting only strict improvements. Stops after
/// a pass without improvement or after `max_passes` passes.
pub fn encode_greedy<T: Scalar>(
    y: &BinarySeq,
    codebook: &Codebook<T>,
    k: T,
    max_passes: usize,
    rng: &mut RngStream,
) -> Result<(BinarySeq, usize)> {
    validate_instance(y, codebook)?;
    if max_passes == 0 {
        return Err(Error::InvalidParameter {
            name: "max_passes",
            value: 0.0,
            reason: "must be at least 1",
        });
    }
    let n = codebook.cols();
    let scale = T::of(n as f64).sqrt();
    let two = T::of(2.0);
    let ys = y.as_slice();
    let mut word: Vec<i8> = (0..n)
        .map(|_| if rng.next_uniform() <= 0.5 { 1 } else { -1 })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();

    for _ in 0..max_passes {
        let mut dots = unnormalized_dots(&word, codebook);
        let mut current = count_distortion(ys, &dots, scale, k);
        let mut improved = false;
        rng.shuffle(&mut order);
        for &pos in &order {
            let flip_to = -word[pos];
            let candidate: Vec<T> = dots
                .iter()
                .enumerate()
                .map(|(mu, &dot)| {
                    let x = codebook.row(mu)[pos];
                    if flip_to > 0 {
                        dot + two * x
                    } else {
                        dot - two * x
                    }
                })
                .collect();
            let d = count_distortion(ys, &candidate, scale, k);
            if d < current {
                word[pos] = flip_to;
                dots = candidate;
                current = d;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    let word = BinarySeq::from_trusted(word);
    let distortion = hamming_distortion(y, &decode(&word, codebook, k)?)?;
    Ok((word, distortion))
}

/// Which side of the rate-distortion curve an estimate measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `R >= R(D)`: probability that the best codeword breaks the fidelity
    /// criterion (per-symbol distortion `>= D`).
    Failure,
    /// `R < R(D)`: probability that the best codeword meets it (`< D`).
    Success,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Failure => "failure",
            Regime::Success => "success",
        }
    }
}

/// Empirical tail probability at one source length.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentEstimate {
    pub m: usize,
    pub n: usize,
    pub rate: f64,
    pub distortion: f64,
    pub trials: usize,
    pub regime: Regime,
    /// Trials whose optimal per-symbol distortion was `>= D`.
    pub failures: usize,
    pub p_hat: f64,
    /// `-ln(p_hat) / M`, defined when `p_hat > 0`.
    pub rate_estimate: Option<f64>,
}

/// Monte Carlo estimate of the fidelity tail probability for random
/// instances of length `m` at rate `rate` (so `N = round(rate * m)`), using
/// the exhaustive encoder. A trial fails when its optimal per-symbol
/// distortion is `>= distortion`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_tail_probability(
    source: SourceModel,
    m: usize,
    rate: f64,
    distortion: f64,
    k: f64,
    trials: usize,
    rng: &mut RngStream,
) -> Result<ExponentEstimate> {
    if trials == 0 {
        return Err(Error::InvalidParameter {
            name: "trials",
            value: 0.0,
            reason: "must be at least 1",
        });
    }
    if !(distortion > 0.0 && distortion <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "D",
            value: distortion,
            reason: "must lie in (0, 1]",
        });
    }
    if !(rate > 0.0) || m == 0 {
        return Err(Error::InvalidParameter {
            name: "R",
            value: rate,
            reason: "rate and length must be positive",
        });
    }
    let n = (rate * m as f64).round() as usize;
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "R",
            value: rate,
            reason: "rate * M rounds to zero code bits",
        });
    }
    check_search_size(n)?;

    let regime = if rate >= rdf(source.p(), distortion)? {
        Regime::Failure
    } else {
        Regime::Success
    };

    let instances = (0..trials)
        .map(|_| gen_instance::<f64>(source.p(), m, n, rng))
        .collect::<Result<Vec<_>>>()?;
    let failures = instances
        .par_iter()
        .map(|(y, codebook)| {
            encode_exhaustive(y, codebook, k)
                .map(|(_, d)| (d as f64 / m as f64 >= distortion) as usize)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum::<usize>();

    let hits = match regime {
        Regime::Failure => failures,
        Regime::Success => trials - failures,
    };
    let p_hat = hits as f64 / trials as f64;
    Ok(ExponentEstimate {
        m,
        n,
        rate,
        distortion,
        trials,
        regime,
        failures,
        p_hat,
        rate_estimate: (p_hat > 0.0).then(|| -p_hat.ln() / m as f64),
    })
}
