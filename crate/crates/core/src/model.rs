//! Domain types shared by the codec, the encoders and the harness.

use std::ops::Neg;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::scalar::Scalar;

/// A nonempty sequence of ±1 symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinarySeq {
    values: Vec<i8>,
}

impl BinarySeq {
    /// Validates and wraps raw signed symbols.
    pub fn new(values: Vec<i8>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySequence);
        }
        if let Some((index, &v)) = values.iter().enumerate().find(|(_, &v)| v != 1 && v != -1) {
            return Err(Error::InvalidSymbol {
                index,
                value: v as i64,
            });
        }
        Ok(Self { values })
    }

    /// Interprets raw bytes as two's-complement symbols (`0x01` is +1, `0xff` is -1).
    pub fn from_raw_bytes(bytes: &[u8]) -> Result<Self> {
        Self::new(bytes.iter().map(|&b| b as i8).collect())
    }

    /// `true` maps to +1.
    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        Self::new(bits.iter().map(|&b| if b { 1 } else { -1 }).collect())
    }

    pub fn filled(len: usize, symbol: i8) -> Result<Self> {
        Self::new(vec![symbol; len])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.values
    }

    pub fn get(&self, i: usize) -> i8 {
        self.values[i]
    }

    pub fn to_bits(&self) -> Vec<bool> {
        self.values.iter().map(|&v| v == 1).collect()
    }

    /// Number of +1 symbols.
    pub fn count_plus(&self) -> usize {
        self.values.iter().filter(|&&v| v == 1).count()
    }

    /// Constructor for internal callers that already guarantee the invariants.
    pub(crate) fn from_trusted(values: Vec<i8>) -> Self {
        debug_assert!(!values.is_empty() && values.iter().all(|&v| v == 1 || v == -1));
        Self { values }
    }
}

impl Neg for &BinarySeq {
    type Output = BinarySeq;

    fn neg(self) -> BinarySeq {
        BinarySeq::from_trusted(self.values.iter().map(|&v| -v).collect())
    }
}

impl TryFrom<Vec<i8>> for BinarySeq {
    type Error = Error;

    fn try_from(values: Vec<i8>) -> Result<Self> {
        Self::new(values)
    }
}

/// Bernoulli source emitting +1 with probability `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceModel {
    p: f64,
}

impl SourceModel {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter {
                name: "p",
                value: p,
                reason: "must lie strictly between 0 and 1",
            });
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// The M×N matrix of Gaussian direction vectors, stored row-major, plus the
/// seed that regenerates it.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook<T> {
    rows: usize,
    cols: usize,
    seed: u64,
    entries: Vec<T>,
}

impl<T: Scalar> Codebook<T> {
    /// Regenerates the codebook: `rows * cols` standard normals from the
    /// stream seeded with `seed`, in row-major order.
    pub fn from_seed(seed: u64, rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 {
            return Err(Error::DimensionMismatch {
                what: "codebook rows (must be positive)",
                expected: 1,
                actual: 0,
            });
        }
        if cols == 0 {
            return Err(Error::DimensionMismatch {
                what: "codebook columns (must be positive)",
                expected: 1,
                actual: 0,
            });
        }
        let mut rng = rng_from_seed(seed);
        let entries = (0..rows * cols)
            .map(|_| T::of(rng.next_gaussian()))
            .collect();
        Ok(Self {
            rows,
            cols,
            seed,
            entries,
        })
    }

    /// Number of codebook vectors (the source length M).
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Dimension of each vector (the compressed length N).
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn row(&self, mu: usize) -> &[T] {
        &self.entries[mu * self.cols..(mu + 1) * self.cols]
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    /// Coding rate N/M.
    pub fn rate(&self) -> f64 {
        self.cols as f64 / self.rows as f64
    }
}

/// Threshold, temperature, inertia and iteration settings of the codec.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodecParams<T> {
    /// Output-function threshold.
    pub k: T,
    /// Inverse temperature of the Boltzmann weight.
    pub beta: T,
    /// Inertia constant, in `[0, 1)`.
    pub gamma: T,
    /// Number of message-passing sweeps.
    pub max_iters: usize,
    /// Amplitude of the uniform random initial magnetizations.
    pub init_amplitude: T,
    /// Lower clamp applied to `1 - q`.
    pub epsilon_q: T,
    /// Return the best sgn-readout over all sweeps instead of the last one.
    pub best_iterate: bool,
}

impl<T: Scalar> CodecParams<T> {
    pub const DEFAULT_BETA: f64 = 1.0;
    pub const DEFAULT_GAMMA: f64 = 0.4;
    pub const DEFAULT_ITERS: usize = 35;
    pub const DEFAULT_INIT_AMPLITUDE: f64 = 0.1;
    pub const DEFAULT_EPSILON_Q: f64 = 1e-12;

    /// Parameters with threshold `k` and defaults for everything else.
    pub fn new(k: T) -> Self {
        Self {
            k,
            beta: T::of(Self::DEFAULT_BETA),
            gamma: T::of(Self::DEFAULT_GAMMA),
            max_iters: Self::DEFAULT_ITERS,
            init_amplitude: T::of(Self::DEFAULT_INIT_AMPLITUDE),
            epsilon_q: T::of(Self::DEFAULT_EPSILON_Q),
            best_iterate: false,
        }
    }

    pub fn with_beta(mut self, beta: T) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_gamma(mut self, gamma: T) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_init_amplitude(mut self, delta: T) -> Self {
        self.init_amplitude = delta;
        self
    }

    pub fn with_best_iterate(mut self, best_iterate: bool) -> Self {
        self.best_iterate = best_iterate;
        self
    }

    /// Checks the parameter ranges. `gamma = 1` is rejected because the
    /// inertia term `atanh(gamma * m)` diverges as `|m| -> 1`.
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter {
                name: "max_iters",
                value: 0.0,
                reason: "must be at least 1",
            });
        }
        self.validate_numeric()
    }

    /// Same as [`validate`](Self::validate) but allows a zero iteration
    /// budget, which the encoder treats as "read out the initialization".
    pub fn validate_numeric(&self) -> Result<()> {
        let bad = |name, value: T, reason| {
            Err(Error::InvalidParameter {
                name,
                value: value.to_f64_lossy(),
                reason,
            })
        };
        if !(self.k >= T::zero()) || !self.k.is_finite() {
            return bad("k", self.k, "must be finite and nonnegative");
        }
        if !(self.beta > T::zero()) || !self.beta.is_finite() {
            return bad("beta", self.beta, "must be finite and positive");
        }
        if !(self.gamma >= T::zero() && self.gamma < T::one()) {
            return bad("gamma", self.gamma, "must lie in [0, 1)");
        }
        if !(self.init_amplitude >= T::zero() && self.init_amplitude < T::one()) {
            return bad("init_amplitude", self.init_amplitude, "must lie in [0, 1)");
        }
        if !(self.epsilon_q > T::zero() && self.epsilon_q < T::one()) {
            return bad("epsilon_q", self.epsilon_q, "must lie in (0, 1)");
        }
        Ok(())
    }
}

/// A (rate, distortion) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RdPoint {
    pub rate: f64,
    pub distortion: f64,
}

impl RdPoint {
    pub fn new(rate: f64, distortion: f64) -> Result<Self> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::InvalidParameter {
                name: "rate",
                value: rate,
                reason: "must be positive",
            });
        }
        if !(0.0..=1.0).contains(&distortion) {
            return Err(Error::InvalidParameter {
                name: "distortion",
                value: distortion,
                reason: "must lie in [0, 1]",
            });
        }
        Ok(Self { rate, distortion })
    }
}

/// Checks that `y` and the codebook agree on the source length M.
pub fn validate_instance<T: Scalar>(y: &BinarySeq, codebook: &Codebook<T>) -> Result<()> {
    if y.len() != codebook.rows() {
        return Err(Error::DimensionMismatch {
            what: "source length vs codebook rows",
            expected: codebook.rows(),
            actual: y.len(),
        });
    }
    Ok(())
}
