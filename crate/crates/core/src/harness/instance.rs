use crate::error::Result;
use crate::model::{BinarySeq, Codebook, SourceModel};
use crate::rng::RngStream;
use crate::scalar::Scalar;

/// Draws a Bernoulli(p) source sequence of length `m` and an `m x n`
/// codebook. The M uniforms for the source come first; the next `u64` from
/// `rng` becomes the codebook seed, and the codebook itself is regenerated
/// from that seed on its own stream.
pub fn gen_instance<T: Scalar>(
    p: f64,
    m: usize,
    n: usize,
    rng: &mut RngStream,
) -> Result<(BinarySeq, Codebook<T>)> {
    let p = SourceModel::new(p)?.p();
    if m == 0 {
        return Err(crate::Error::EmptySequence);
    }
    let y = (0..m)
        .map(|_| if rng.next_uniform() < p { 1 } else { -1 })
        .collect();
    let y = BinarySeq::new(y)?;
    let codebook = Codebook::from_seed(rng.next_u64(), m, n)?;
    Ok((y, codebook))
}
