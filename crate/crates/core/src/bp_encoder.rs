//! Message-passing encoder.
//!
//! Each sweep approximates the marginals of the Boltzmann measure
//! `exp(-beta * distortion)` over codewords with a Gaussian-cavity (TAP-style)
//! iteration on the complete bipartite graph between source symbols and code
//! bits:
//!
//! ```text
//! delta_mu = sum_i x_i^mu m_i / sqrt(N)
//! q        = sum_i m_i^2 / N
//! a_mu'    = i1 / i0                        (at w± built from delta_mu, a_mu, q)
//! G'       = sum_mu [ i2 / i0 - (i1 / i0)^2 ]
//! m_l'     = tanh( sum_mu x_l^mu a_mu' / sqrt(N) - G' m_l / N + atanh(gamma m_l) )
//! ```
//!
//! The all-zero magnetization vector is a fixed point of the iteration
//! because the channel factor is even, so the state starts from a small random
//! perturbation and the inertia term amplifies whatever asymmetry survives.
//! The codeword is the sign of the final magnetizations.

use crate::codec::{decode, hamming_distortion};
use crate::error::{Error, Result};
use crate::mathutil::{xi_integrals_at, CavityGeometry};
use crate::model::{validate_instance, BinarySeq, Codebook, CodecParams};
use crate::rng::RngStream;
use crate::scalar::Scalar;

/// Magnetization sweeps below this max change count as converged.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-8;

/// i0 below this is treated as a degenerate channel.
const I0_FLOOR: f64 = 1e-300;

/// Encoder state between sweeps.
#[derive(Debug, Clone, PartialEq)]
pub struct BpState<T> {
    /// Posterior magnetizations, one per code bit.
    pub m: Vec<T>,
    /// Cavity ratios, one per source symbol.
    pub a: Vec<T>,
    /// Onsager coefficient from the last sweep.
    pub g: T,
    /// Mean squared magnetization.
    pub q: T,
    /// Completed sweeps.
    pub t: usize,
}

impl<T: Scalar> BpState<T> {
    /// State with the given magnetizations, zero cavity ratios for `rows`
    /// factors, and a consistent overlap.
    pub fn from_magnetizations(m: Vec<T>, rows: usize) -> Self {
        let q = overlap(&m);
        Self {
            m,
            a: vec![T::zero(); rows],
            g: T::zero(),
            q,
            t: 0,
        }
    }
}

/// One record per completed sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub q: f64,
    pub mean_abs_m: f64,
    /// Distortion (symbol count) of the sign readout after this sweep.
    pub distortion: usize,
    pub max_delta_m: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BpTrace {
    pub records: Vec<IterationRecord>,
    /// Whether the last sweep moved no magnetization by more than
    /// [`CONVERGENCE_TOLERANCE`].
    pub converged: bool,
    /// Sweep whose readout was returned (0 is the initialization).
    pub selected_iteration: usize,
    pub best_iterate: bool,
}

/// Result of [`encode_bp`].
#[derive(Debug, Clone, PartialEq)]
pub struct Encoding {
    pub word: BinarySeq,
    pub distortion: usize,
    pub trace: BpTrace,
}

fn overlap<T: Scalar>(m: &[T]) -> T {
    let sum = m.iter().fold(T::zero(), |acc, &v| acc + v * v);
    sum / T::of(m.len() as f64)
}

/// Uniform random magnetizations on `[-delta, delta]`, zero cavity ratios.
pub fn init_state<T: Scalar>(n: usize, m: usize, delta: T, rng: &mut RngStream) -> BpState<T> {
    let mags = (0..n)
        .map(|_| {
            let u = T::of(rng.next_uniform());
            delta * (T::of(2.0) * u - T::one())
        })
        .collect();
    BpState::from_magnetizations(mags, m)
}

/// Largest magnetization magnitude below 1, so `atanh` stays finite and
/// `q < 1` after saturation.
fn saturation<T: Scalar>() -> T {
    T::one() - T::epsilon() / T::of(2.0)
}

/// One synchronous sweep. The input state is left untouched.
pub fn bp_step<T: Scalar>(
    state: &BpState<T>,
    y: &BinarySeq,
    codebook: &Codebook<T>,
    params: &CodecParams<T>,
) -> Result<BpState<T>> {
    validate_instance(y, codebook)?;
    let (rows, cols) = (codebook.rows(), codebook.cols());
    if state.m.len() != cols {
        return Err(Error::DimensionMismatch {
            what: "magnetizations vs codebook columns",
            expected: cols,
            actual: state.m.len(),
        });
    }
    if state.a.len() != rows {
        return Err(Error::DimensionMismatch {
            what: "cavity ratios vs codebook rows",
            expected: rows,
            actual: state.a.len(),
        });
    }

    let inv_sqrt_n = T::one() / T::of(cols as f64).sqrt();
    let q = overlap(&state.m);

    let mut a_new = Vec::with_capacity(rows);
    let mut g_new = T::zero();
    for mu in 0..rows {
        let x = codebook.row(mu);
        let delta = x
            .iter()
            .zip(&state.m)
            .fold(T::zero(), |acc, (&xi, &mi)| acc + xi * mi)
            * inv_sqrt_n;
        let geometry = CavityGeometry::new(delta, state.a[mu], q, params.k, params.epsilon_q);
        let xi = xi_integrals_at(y.get(mu), &geometry, params.beta).map_err(|e| match e {
            Error::NumericOverflow {
                w_minus, w_plus, ..
            } => Error::NumericOverflow {
                w_minus,
                w_plus,
                iteration: Some(state.t + 1),
            },
            other => other,
        })?;
        if !(xi.i0.to_f64_lossy() >= I0_FLOOR) {
            return Err(Error::ChannelDegenerate {
                iteration: state.t + 1,
                factor: mu,
                i0: xi.i0.to_f64_lossy(),
            });
        }
        a_new.push(xi.ratio());
        g_new = g_new + xi.onsager_term();
    }

    // field_l = sum_mu x_l^mu a_mu, accumulated row by row for contiguous access
    let mut field = vec![T::zero(); cols];
    for (mu, &a_mu) in a_new.iter().enumerate() {
        for (f, &x) in field.iter_mut().zip(codebook.row(mu)) {
            *f = *f + x * a_mu;
        }
    }

    let reaction = g_new / T::of(cols as f64);
    let cap = saturation::<T>();
    let m_new: Vec<T> = field
        .iter()
        .zip(&state.m)
        .map(|(&f, &m_old)| {
            let h = f * inv_sqrt_n - reaction * m_old + (params.gamma * m_old).odd_atanh();
            let m = h.odd_tanh();
            m.max(-cap).min(cap)
        })
        .collect();

    let q_new = overlap(&m_new);
    Ok(BpState {
        m: m_new,
        a: a_new,
        g: g_new,
        q: q_new,
        t: state.t + 1,
    })
}

/// Sign readout; zero magnetization reads as +1.
pub fn readout<T: Scalar>(state: &BpState<T>) -> BinarySeq {
    BinarySeq::from_trusted(
        state
            .m
            .iter()
            .map(|&m| if m < T::zero() { -1 } else { 1 })
            .collect(),
    )
}

/// Runs `params.max_iters` sweeps from a random initialization drawn from
/// `rng` and reads out the codeword.
pub fn encode_bp<T: Scalar>(
    y: &BinarySeq,
    codebook: &Codebook<T>,
    params: &CodecParams<T>,
    rng: &mut RngStream,
) -> Result<Encoding> {
    validate_instance(y, codebook)?;
    params.validate_numeric()?;
    let state = init_state(codebook.cols(), codebook.rows(), params.init_amplitude, rng);
    encode_from_state(state, y, codebook, params)
}

/// [`encode_bp`] from a caller-supplied initial state.
pub fn encode_from_state<T: Scalar>(
    mut state: BpState<T>,
    y: &BinarySeq,
    codebook: &Codebook<T>,
    params: &CodecParams<T>,
) -> Result<Encoding> {
    validate_instance(y, codebook)?;
    let mut word = readout(&state);
    let mut distortion = hamming_distortion(y, &decode(&word, codebook, params.k)?)?;
    let mut trace = BpTrace {
        best_iterate: params.best_iterate,
        ..BpTrace::default()
    };

    for _ in 0..params.max_iters {
        let next = bp_step(&state, y, codebook, params)?;
        let max_delta_m = next
            .m
            .iter()
            .zip(&state.m)
            .map(|(&a, &b)| (a - b).abs().to_f64_lossy())
            .fold(0.0, f64::max);
        let current = readout(&next);
        let d = hamming_distortion(y, &decode(&current, codebook, params.k)?)?;
        let mean_abs_m =
            next.m.iter().map(|v| v.abs().to_f64_lossy()).sum::<f64>() / next.m.len() as f64;
        trace.records.push(IterationRecord {
            q: next.q.to_f64_lossy(),
            mean_abs_m,
            distortion: d,
            max_delta_m,
        });
        trace.converged = max_delta_m < CONVERGENCE_TOLERANCE;

        let take = if params.best_iterate {
            trace.records.len() == 1 || d < distortion
        } else {
            true
        };
        if take {
            word = current;
            distortion = d;
            trace.selected_iteration = next.t;
        }
        state = next;
    }

    Ok(Encoding {
        word,
        distortion,
        trace,
    })
}
