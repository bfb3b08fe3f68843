//! Deterministic side of the code: the two-threshold output function, the
//! perceptron decoder, Hamming distortion and the compressed container.
//!
//! Container layout (integers little-endian):
//!
//! | bytes   | content                                        |
//! |---------|------------------------------------------------|
//! | 0..4    | magic `PLC1`                                   |
//! | 4       | format version (1)                             |
//! | 5..13   | codebook seed, `u64`                           |
//! | 13..21  | source length M, `u64`                         |
//! | 21..29  | compressed length N, `u64`                     |
//! | 29..37  | threshold k, IEEE-754 binary64                 |
//! | 37..    | `ceil(N/8)` payload bytes, MSB-first, 1 ⇔ +1   |
//!
//! Padding bits in the final payload byte are zero.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::model::{BinarySeq, Codebook};
use crate::scalar::Scalar;

pub const MAGIC: [u8; 4] = *b"PLC1";
pub const FORMAT_VERSION: u8 = 1;
pub const HEADER_LEN: usize = 37;

/// Two-threshold output: +1 iff `|u| < k`, so `|u| = k` gives -1.
#[inline]
pub fn output_fk<T: Scalar>(u: T, k: T) -> i8 {
    if u.abs() < k {
        1
    } else {
        -1
    }
}

/// Normalized projections `(x^mu . s) / sqrt(N)` for every codebook row.
pub fn projections<T: Scalar>(s: &BinarySeq, codebook: &Codebook<T>) -> Result<Vec<T>> {
    if s.len() != codebook.cols() {
        return Err(Error::DimensionMismatch {
            what: "codeword length vs codebook columns",
            expected: codebook.cols(),
            actual: s.len(),
        });
    }
    let scale = T::of(codebook.cols() as f64).sqrt();
    let bits = s.as_slice();
    Ok((0..codebook.rows())
        .map(|mu| {
            let dot = codebook
                .row(mu)
                .iter()
                .zip(bits)
                .fold(
                    T::zero(),
                    |acc, (&x, &b)| if b > 0 { acc + x } else { acc - x },
                );
            dot / scale
        })
        .collect())
}

/// Representative sequence for codeword `s`.
pub fn decode<T: Scalar>(s: &BinarySeq, codebook: &Codebook<T>, k: T) -> Result<BinarySeq> {
    let u = projections(s, codebook)?;
    Ok(BinarySeq::from_trusted(
        u.into_iter().map(|u| output_fk(u, k)).collect(),
    ))
}

/// Number of positions where the two sequences disagree.
pub fn hamming_distortion(y: &BinarySeq, y_hat: &BinarySeq) -> Result<usize> {
    if y.len() != y_hat.len() {
        return Err(Error::DimensionMismatch {
            what: "sequence lengths for distortion",
            expected: y.len(),
            actual: y_hat.len(),
        });
    }
    Ok(y.as_slice()
        .iter()
        .zip(y_hat.as_slice())
        .filter(|(a, b)| a != b)
        .count())
}

/// Parsed container contents.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedBlob {
    pub seed: u64,
    pub m: u64,
    pub n: u64,
    pub k: f64,
    pub word: BinarySeq,
}

impl CompressedBlob {
    /// Coding rate N/M recorded in the header.
    pub fn rate(&self) -> f64 {
        self.n as f64 / self.m as f64
    }

    /// Regenerates the codebook and decodes the payload.
    pub fn decode<T: Scalar>(&self) -> Result<BinarySeq> {
        let codebook = Codebook::<T>::from_seed(self.seed, self.m as usize, self.n as usize)?;
        decode(&self.word, &codebook, T::of(self.k))
    }

    /// Serialized form.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + payload_len(self.n as usize));
        self.write_to(&mut out)
            .expect("writing into a Vec cannot fail");
        out
    }

    /// Streams the container into `w`, reporting the byte offset of any failure.
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<u64> {
        let mut header = [0u8; HEADER_LEN];
        header[0..4].copy_from_slice(&MAGIC);
        header[4] = FORMAT_VERSION;
        header[5..13].copy_from_slice(&self.seed.to_le_bytes());
        header[13..21].copy_from_slice(&self.m.to_le_bytes());
        header[21..29].copy_from_slice(&self.n.to_le_bytes());
        header[29..37].copy_from_slice(&self.k.to_le_bytes());
        let payload = pack_bits(&self.word);

        let mut position = 0u64;
        for chunk in [&header[..], &payload[..]] {
            write_all_tracked(w, chunk, &mut position)?;
        }
        w.flush().map_err(|source| Error::Io { position, source })?;
        Ok(position)
    }
}

fn write_all_tracked<W: Write>(w: &mut W, mut buf: &[u8], position: &mut u64) -> Result<()> {
    while !buf.is_empty() {
        match w.write(buf) {
            Ok(0) => {
                return Err(Error::Io {
                    position: *position,
                    source: io::Error::new(io::ErrorKind::WriteZero, "writer accepted no bytes"),
                })
            }
            Ok(n) => {
                *position += n as u64;
                buf = &buf[n..];
            }
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(source) => {
                return Err(Error::Io {
                    position: *position,
                    source,
                })
            }
        }
    }
    Ok(())
}

fn payload_len(n: usize) -> usize {
    n.div_ceil(8)
}

fn pack_bits(word: &BinarySeq) -> Vec<u8> {
    let mut out = vec![0u8; payload_len(word.len())];
    for (i, &v) in word.as_slice().iter().enumerate() {
        if v > 0 {
            out[i / 8] |= 0x80 >> (i % 8);
        }
    }
    out
}

/// Builds the container for codeword `s` under `codebook` and threshold `k`.
pub fn pack_blob<T: Scalar>(
    s: &BinarySeq,
    codebook: &Codebook<T>,
    k: f64,
) -> Result<(CompressedBlob, Vec<u8>)> {
    if s.len() != codebook.cols() {
        return Err(Error::DimensionMismatch {
            what: "codeword length vs codebook columns",
            expected: codebook.cols(),
            actual: s.len(),
        });
    }
    let blob = CompressedBlob {
        seed: codebook.seed(),
        m: codebook.rows() as u64,
        n: codebook.cols() as u64,
        k,
        word: s.clone(),
    };
    let bytes = blob.to_bytes();
    Ok((blob, bytes))
}

/// Parses a container produced by [`pack_blob`].
pub fn unpack_blob(bytes: &[u8]) -> Result<CompressedBlob> {
    if bytes.len() < 5 {
        if bytes.len() >= 4 && bytes[0..4] != MAGIC {
            return Err(Error::BadMagic {
                found: bytes[0..4].try_into().unwrap(),
            });
        }
        return Err(Error::TruncatedHeader {
            expected: HEADER_LEN,
            actual: bytes.len(),
        });
    }
    let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
    if magic != MAGIC {
        return Err(Error::BadMagic { found: magic });
    }
    if bytes[4] != FORMAT_VERSION {
        return Err(Error::UnsupportedVersion(bytes[4]));
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::TruncatedHeader {
            expected: HEADER_LEN,
            actual: bytes.len(),
        });
    }
    let u64_at = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
    let seed = u64_at(5);
    let m = u64_at(13);
    let n = u64_at(21);
    let k = f64::from_le_bytes(bytes[29..37].try_into().unwrap());
    if m == 0 || n == 0 {
        return Err(Error::DimensionMismatch {
            what: "container dimensions (must be positive)",
            expected: 1,
            actual: 0,
        });
    }

    let payload = &bytes[HEADER_LEN..];
    let needed = n.div_ceil(8);
    if (payload.len() as u64) < needed {
        return Err(Error::TruncatedPayload {
            expected_bits: n,
            actual_bits: payload.len() as u64 * 8,
        });
    }
    if payload.len() as u64 > needed {
        return Err(Error::TrailingData {
            extra: (payload.len() as u64 - needed) as usize,
        });
    }
    let n = n as usize;
    if !n.is_multiple_of(8) {
        let last = payload[n / 8];
        if last & (0xff >> (n % 8)) != 0 {
            return Err(Error::NonzeroPadding { byte: last });
        }
    }
    let word = (0..n)
        .map(|i| {
            if payload[i / 8] & (0x80 >> (i % 8)) != 0 {
                1
            } else {
                -1
            }
        })
        .collect();
    Ok(CompressedBlob {
        seed,
        m,
        n: n as u64,
        k,
        word: BinarySeq::from_trusted(word),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[i8]) -> BinarySeq {
        BinarySeq::new(v.to_vec()).unwrap()
    }

    #[test]
    fn output_function() {
        assert_eq!(output_fk(0.5, 1.0), 1);
        assert_eq!(output_fk(-0.5, 1.0), 1);
        assert_eq!(output_fk(1.5, 1.0), -1);
        assert_eq!(output_fk(1.0, 1.0), -1);
        assert_eq!(output_fk(-1.0_f32, 1.0), -1);
        assert_eq!(output_fk(0.0, 0.0), -1);
    }

    #[test]
    fn single_component_decode() {
        // first draw of the stream for this seed, checked below
        let cb = Codebook::<f64>::from_seed(11, 1, 1).unwrap();
        let x = cb.entries()[0];
        let expected = if x.abs() < 1.0 { 1 } else { -1 };
        assert_eq!(
            decode(&seq(&[1]), &cb, 1.0).unwrap().as_slice(),
            &[expected]
        );
    }

    #[test]
    fn decode_matches_scalar_products() {
        let cb = Codebook::<f64>::from_seed(2024, 4, 8).unwrap();
        let s = seq(&[1, -1, -1, 1, 1, 1, -1, 1]);
        let out = decode(&s, &cb, 0.7).unwrap();
        for mu in 0..4 {
            let mut dot = 0.0;
            for i in 0..8 {
                dot += cb.row(mu)[i] * s.get(i) as f64;
            }
            let u = dot / 8f64.sqrt();
            assert_eq!(out.get(mu), if u.abs() < 0.7 { 1 } else { -1 });
        }
        assert_eq!(decode(&-&s, &cb, 0.7).unwrap(), out);
    }

    #[test]
    fn decode_checks_dimensions() {
        let cb = Codebook::<f64>::from_seed(1, 3, 4).unwrap();
        assert!(matches!(
            decode(&seq(&[1, 1, 1]), &cb, 1.0),
            Err(Error::DimensionMismatch {
                expected: 4,
                actual: 3,
                ..
            })
        ));
    }

    #[test]
    fn distortion_counts() {
        let a = seq(&[1, -1, 1]);
        assert_eq!(hamming_distortion(&a, &a).unwrap(), 0);
        assert_eq!(hamming_distortion(&a, &seq(&[1, 1, 1])).unwrap(), 1);
        assert_eq!(hamming_distortion(&a, &-&a).unwrap(), 3);
        assert!(hamming_distortion(&a, &seq(&[1, 1])).is_err());
    }

    #[test]
    fn payload_bit_mapping() {
        let cb8 = Codebook::<f64>::from_seed(1, 2, 8).unwrap();
        let (_, bytes) = pack_blob(&BinarySeq::filled(8, 1).unwrap(), &cb8, 0.5).unwrap();
        assert_eq!(&bytes[HEADER_LEN..], &[0xff]);

        let cb3 = Codebook::<f64>::from_seed(1, 2, 3).unwrap();
        let (_, bytes) = pack_blob(&seq(&[1, -1, 1]), &cb3, 0.5).unwrap();
        assert_eq!(&bytes[HEADER_LEN..], &[0b1010_0000]);
        assert_eq!(&bytes[0..4], b"PLC1");
        assert_eq!(bytes[4], 1);
        assert_eq!(&bytes[5..13], &1u64.to_le_bytes());
        assert_eq!(&bytes[13..21], &2u64.to_le_bytes());
        assert_eq!(&bytes[21..29], &3u64.to_le_bytes());
        assert_eq!(&bytes[29..37], &0.5f64.to_le_bytes());
    }

    #[test]
    fn unpack_round_trip() {
        let cb = Codebook::<f64>::from_seed(99, 7, 11).unwrap();
        let s = seq(&[1, -1, -1, 1, 1, -1, 1, -1, -1, -1, 1]);
        let (blob, bytes) = pack_blob(&s, &cb, 0.674).unwrap();
        let back = unpack_blob(&bytes).unwrap();
        assert_eq!(back, blob);
        assert_eq!(back.rate(), 11.0 / 7.0);
        assert_eq!(
            back.decode::<f64>().unwrap(),
            decode(&s, &cb, 0.674).unwrap()
        );
    }

    #[test]
    fn unpack_errors() {
        let cb = Codebook::<f64>::from_seed(5, 4, 12).unwrap();
        let (_, bytes) = pack_blob(&BinarySeq::filled(12, 1).unwrap(), &cb, 1.0).unwrap();

        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(unpack_blob(&bad), Err(Error::BadMagic { .. })));

        let mut bad = bytes.clone();
        bad[4] = 2;
        assert!(matches!(
            unpack_blob(&bad),
            Err(Error::UnsupportedVersion(2))
        ));

        assert!(matches!(
            unpack_blob(&bytes[..20]),
            Err(Error::TruncatedHeader {
                expected: 37,
                actual: 20
            })
        ));

        assert!(matches!(
            unpack_blob(&bytes[..bytes.len() - 1]),
            Err(Error::TruncatedPayload {
                expected_bits: 12,
                actual_bits: 8
            })
        ));

        let mut bad = bytes.clone();
        *bad.last_mut().unwrap() |= 0x01;
        assert!(matches!(
            unpack_blob(&bad),
            Err(Error::NonzeroPadding { .. })
        ));

        let mut bad = bytes.clone();
        bad.push(0);
        assert!(matches!(
            unpack_blob(&bad),
            Err(Error::TrailingData { extra: 1 })
        ));
    }

    struct FailAfter(usize);

    impl Write for FailAfter {
        fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
            if self.0 == 0 {
                return Err(io::Error::other("disk full"));
            }
            let n = buf.len().min(self.0);
            self.0 -= n;
            Ok(n)
        }

        fn flush(&mut self) -> io::Result<()> {
            Ok(())
        }
    }

    #[test]
    fn write_errors_carry_position() {
        let cb = Codebook::<f64>::from_seed(5, 4, 12).unwrap();
        let (blob, _) = pack_blob(&BinarySeq::filled(12, 1).unwrap(), &cb, 1.0).unwrap();
        match blob.write_to(&mut FailAfter(30)) {
            Err(Error::Io { position, .. }) => assert_eq!(position, 30),
            other => panic!("unexpected {other:?}"),
        }
    }
}
