use crate::bp_encoder::{encode_bp, BpTrace};
use crate::codec::{pack_blob, unpack_blob, CompressedBlob};
use crate::error::{Error, Result};
use crate::model::{BinarySeq, Codebook, CodecParams};
use crate::rng::rng_from_seed;

/// Output of [`compress`].
#[derive(Debug, Clone, PartialEq)]
pub struct Compressed {
    pub blob: CompressedBlob,
    pub bytes: Vec<u8>,
    /// Distortion (symbol count) of the decoded representative.
    pub distortion: usize,
    pub trace: BpTrace,
}

/// Encodes `y` at `rate` into a container. The first draw of the stream
/// seeded by `seed` becomes the codebook seed; the encoder's initialization
/// continues on the same stream.
pub fn compress(
    y: &BinarySeq,
    rate: f64,
    params: &CodecParams<f64>,
    seed: u64,
) -> Result<Compressed> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "rate",
            value: rate,
            reason: "must lie in (0, 1]",
        });
    }
    params.validate()?;
    let m = y.len();
    let n = ((rate * m as f64).round() as usize).max(1);
    let mut rng = rng_from_seed(seed);
    let codebook = Codebook::<f64>::from_seed(rng.next_u64(), m, n)?;
    let enc = encode_bp(y, &codebook, params, &mut rng)?;
    let (blob, bytes) = pack_blob(&enc.word, &codebook, params.k)?;
    Ok(Compressed {
        blob,
        bytes,
        distortion: enc.distortion,
        trace: enc.trace,
    })
}

/// Parses a container and decodes the representative sequence.
pub fn decompress(bytes: &[u8]) -> Result<(CompressedBlob, BinarySeq)> {
    let blob = unpack_blob(bytes)?;
    let restored = blob.decode::<f64>()?;
    Ok((blob, restored))
}

/// Unpacks bytes MSB-first into symbols, bit 1 ⇔ +1.
pub fn bits_from_bytes(bytes: &[u8]) -> Result<BinarySeq> {
    BinarySeq::new(
        bytes
            .iter()
            .flat_map(|&b| (0..8).map(move |i| if b & (0x80 >> i) != 0 { 1 } else { -1 }))
            .collect(),
    )
}

/// Packs symbols MSB-first, zero-padding the final byte.
pub fn bits_to_bytes(seq: &BinarySeq) -> Vec<u8> {
    let mut out = vec![0u8; seq.len().div_ceil(8)];
    for (i, &v) in seq.as_slice().iter().enumerate() {
        if v > 0 {
            out[i / 8] |= 0x80 >> (i % 8);
        }
    }
    out
}

/// Parses a text of `0`/`1` characters (whitespace ignored), `1` ⇔ +1.
pub fn bits_from_text(text: &str) -> Result<BinarySeq> {
    let mut out = Vec::new();
    for (i, c) in text.chars().enumerate() {
        match c {
            '1' => out.push(1),
            '0' => out.push(-1),
            c if c.is_whitespace() => {}
            c => {
                return Err(Error::Config(format!(
                    "unexpected character {c:?} at offset {i} in bit text"
                )))
            }
        }
    }
    BinarySeq::new(out)
}

pub fn bits_to_text(seq: &BinarySeq) -> String {
    let mut s: String = seq
        .as_slice()
        .iter()
        .map(|&v| if v > 0 { '1' } else { '0' })
        .collect();
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{decode, hamming_distortion};
    use crate::reference::default_threshold;

    #[test]
    fn byte_and_text_forms() {
        let seq = bits_from_bytes(&[0b1010_0000, 0xff]).unwrap();
        assert_eq!(&seq.as_slice()[..4], &[1, -1, 1, -1]);
        assert_eq!(bits_to_bytes(&seq), vec![0b1010_0000, 0xff]);
        let t = bits_from_text("10 1\n1").unwrap();
        assert_eq!(t.as_slice(), &[1, -1, 1, 1]);
        assert_eq!(bits_to_text(&t), "1011\n");
        assert!(bits_from_text("102").is_err());
        assert!(bits_from_text("").is_err());
    }

    #[test]
    fn compress_round_trip() {
        let y = bits_from_bytes(&[0xf3, 0x5a, 0x11, 0xee, 0x42]).unwrap();
        let params = CodecParams::new(default_threshold(0.5).unwrap());
        let c = compress(&y, 0.5, &params, 17).unwrap();
        assert_eq!(c.blob.n, 20);
        let again = compress(&y, 0.5, &params, 17).unwrap();
        assert_eq!(c.bytes, again.bytes);
        let (blob, restored) = decompress(&c.bytes).unwrap();
        assert_eq!(blob, c.blob);
        assert_eq!(hamming_distortion(&y, &restored).unwrap(), c.distortion);
        let cb = Codebook::<f64>::from_seed(blob.seed, 40, 20).unwrap();
        assert_eq!(restored, decode(&blob.word, &cb, params.k).unwrap());
        assert!(compress(&y, 0.0, &params, 1).is_err());
    }
}
