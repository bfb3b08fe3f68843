//! Test-only oracles, written independently of the library's closed forms.
#![allow(dead_code, clippy::too_many_arguments, clippy::needless_range_loop)]

use plc_core::harness::gen_instance;
use plc_core::rng::rng_from_seed;
use plc_core::{BinarySeq, Codebook};

/// Raw two-threshold output.
pub fn f_k(u: f64, k: f64) -> f64 {
    if u.abs() < k {
        1.0
    } else {
        -1.0
    }
}

/// Raw channel factor exp(-(beta/2)(1 - y f_k(u))).
pub fn channel(y: f64, u: f64, k: f64, beta: f64) -> f64 {
    (-(beta / 2.0) * (1.0 - y * f_k(u, k))).exp()
}

/// Uniform trapezoidal grid on [-10, 10] with cached Gaussian weights.
pub struct Quadrature {
    z: Vec<f64>,
    phi: Vec<f64>,
}

impl Quadrature {
    pub fn new(points: usize) -> Self {
        let z: Vec<f64> = (0..points)
            .map(|j| -10.0 + 20.0 * j as f64 / (points - 1) as f64)
            .collect();
        let phi = z
            .iter()
            .map(|z| (-z * z / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt())
            .collect();
        Self { z, phi }
    }

    /// Gaussian averages of the channel factor and of its first and second
    /// derivatives at `u = c + sigma z`, `c = delta - (1-q) a`. Derivative
    /// averages come from Gaussian integration by parts,
    /// `E[Xi'] = E[z Xi] / sigma`, `E[Xi''] = E[(z^2 - 1) Xi] / sigma^2`,
    /// so every integrand is piecewise smooth; the points where `u = ±k` are
    /// inserted as extra nodes and each sub-interval uses the factor's value
    /// at its midpoint.
    pub fn xi(&self, y: i8, delta: f64, a: f64, q: f64, k: f64, beta: f64, eps: f64) -> [f64; 3] {
        let omq = (1.0 - q).max(eps);
        let sigma = omq.sqrt();
        let c = delta - omq * a;
        let yf = y as f64;
        let mut breaks: Vec<f64> = [(-k - c) / sigma, (k - c) / sigma]
            .into_iter()
            .filter(|b| *b > -10.0 && *b < 10.0)
            .collect();
        breaks.sort_by(f64::total_cmp);

        let pdf = |z: f64| (-z * z / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut acc = [0.0f64; 3];
        let mut add = |z0: f64, p0: f64, z1: f64, p1: f64| {
            let w = channel(yf, c + sigma * 0.5 * (z0 + z1), k, beta);
            let h = 0.5 * (z1 - z0) * w;
            acc[0] += h * (p0 + p1);
            acc[1] += h * (z0 * p0 + z1 * p1);
            acc[2] += h * ((z0 * z0 - 1.0) * p0 + (z1 * z1 - 1.0) * p1);
        };
        let mut next_break = 0;
        for j in 0..self.z.len() - 1 {
            let (mut z0, mut p0) = (self.z[j], self.phi[j]);
            let (z1, p1) = (self.z[j + 1], self.phi[j + 1]);
            while next_break < breaks.len() && breaks[next_break] < z1 {
                let b = breaks[next_break];
                if b > z0 {
                    let pb = pdf(b);
                    add(z0, p0, b, pb);
                    z0 = b;
                    p0 = pb;
                }
                next_break += 1;
            }
            add(z0, p0, z1, p1);
        }
        [acc[0], acc[1] / sigma, acc[2] / omq]
    }
}

/// One message-passing sweep written directly from the update equations,
/// with quadrature in place of the closed forms. Returns (m, a, G).
#[allow(clippy::too_many_arguments)]
pub fn reference_step(
    quad: &Quadrature,
    m: &[f64],
    a: &[f64],
    y: &BinarySeq,
    codebook: &Codebook<f64>,
    k: f64,
    beta: f64,
    gamma: f64,
    eps: f64,
) -> (Vec<f64>, Vec<f64>, f64) {
    let rows = codebook.rows();
    let cols = codebook.cols();
    let sqrt_n = (cols as f64).sqrt();
    let q = m.iter().map(|v| v * v).sum::<f64>() / cols as f64;
    let mut a_new = vec![0.0; rows];
    let mut g = 0.0;
    for mu in 0..rows {
        let mut delta = 0.0;
        for i in 0..cols {
            delta += codebook.row(mu)[i] * m[i];
        }
        delta /= sqrt_n;
        let [i0, i1, i2] = quad.xi(y.get(mu), delta, a[mu], q, k, beta, eps);
        a_new[mu] = i1 / i0;
        g += i2 / i0 - (i1 / i0) * (i1 / i0);
    }
    let mut m_new = vec![0.0; cols];
    for l in 0..cols {
        let mut field = 0.0;
        for mu in 0..rows {
            field += codebook.row(mu)[l] * a_new[mu] / sqrt_n;
        }
        m_new[l] = (field - g / cols as f64 * m[l] + (gamma * m[l]).atanh()).tanh();
    }
    (m_new, a_new, g)
}

/// Straightforward scan of all 2^N codewords in lexicographic order (+1
/// before -1), keeping the first strict minimum.
pub fn brute_force(y: &BinarySeq, codebook: &Codebook<f64>, k: f64) -> (Vec<i8>, usize) {
    let n = codebook.cols();
    let mut best: Option<(Vec<i8>, usize)> = None;
    for index in 0u64..(1 << n) {
        let word: Vec<i8> = (0..n)
            .map(|pos| {
                if (index >> (n - 1 - pos)) & 1 == 1 {
                    -1
                } else {
                    1
                }
            })
            .collect();
        let mut d = 0;
        for mu in 0..codebook.rows() {
            let mut dot = 0.0;
            for i in 0..n {
                dot += codebook.row(mu)[i] * word[i] as f64;
            }
            let out = f_k(dot / (n as f64).sqrt(), k) as i8;
            if out != y.get(mu) {
                d += 1;
            }
        }
        if best.as_ref().is_none_or(|(_, bd)| d < *bd) {
            best = Some((word, d));
        }
    }
    best.unwrap()
}

pub fn instance(seed: u64, p: f64, m: usize, n: usize) -> (BinarySeq, Codebook<f64>) {
    gen_instance(p, m, n, &mut rng_from_seed(seed)).unwrap()
}
