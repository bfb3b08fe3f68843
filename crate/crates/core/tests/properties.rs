use plc_core::codec::{decode, hamming_distortion, pack_blob, unpack_blob};
use plc_core::mathutil::{binary_entropy, gaussian_tail, inv_binary_entropy};
use plc_core::reference::{default_threshold, rdf, rdf_inverse};
use plc_core::{BinarySeq, Codebook};
use proptest::prelude::*;

fn word(len: usize) -> impl Strategy<Value = BinarySeq> {
    prop::collection::vec(prop::bool::ANY, len).prop_map(|b| BinarySeq::from_bits(&b).unwrap())
}

proptest! {
    #[test]
    fn gaussian_tail_reflects(x in -30.0f64..30.0) {
        let s = gaussian_tail(x).unwrap() + gaussian_tail(-x).unwrap();
        prop_assert!((s - 1.0).abs() < 1e-14);
    }

    #[test]
    fn entropy_round_trip(q in 0.0f64..=0.5) {
        let back = inv_binary_entropy(binary_entropy(q).unwrap()).unwrap();
        prop_assert!((back - q).abs() < 1e-10, "{q} -> {back}");
    }

    #[test]
    fn rdf_symmetric_in_p(p in 0.01f64..0.99, d in 0.0f64..0.5) {
        prop_assert!((rdf(p, d).unwrap() - rdf(1.0 - p, d).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn rdf_inverse_round_trip(p in 0.02f64..0.98, frac in 0.01f64..0.99) {
        let r = frac * binary_entropy(p).unwrap();
        let d = rdf_inverse(p, r).unwrap();
        prop_assert!((rdf(p, d).unwrap() - r).abs() < 1e-9);
    }

    #[test]
    fn default_threshold_increasing(p in 0.01f64..0.98, step in 1e-4f64..0.01) {
        prop_assert!(default_threshold(p + step).unwrap() > default_threshold(p).unwrap());
    }

    #[test]
    fn decode_is_even(seed in any::<u64>(), m in 1usize..40, n in 1usize..20, k in 0.0f64..2.0) {
        let cb = Codebook::<f64>::from_seed(seed, m, n).unwrap();
        let s = BinarySeq::from_bits(&(0..n).map(|i| (seed >> (i % 64)) & 1 == 1).collect::<Vec<_>>()).unwrap();
        prop_assert_eq!(decode(&s, &cb, k).unwrap(), decode(&-&s, &cb, k).unwrap());
    }

    #[test]
    fn distortion_invariant_under_joint_negation(pair in (1usize..64).prop_flat_map(|l| (word(l), word(l)))) {
        let (a, b) = pair;
        prop_assert_eq!(hamming_distortion(&a, &b).unwrap(), hamming_distortion(&-&a, &-&b).unwrap());
        prop_assert_eq!(hamming_distortion(&a, &-&b).unwrap(), a.len() - hamming_distortion(&a, &b).unwrap());
    }

    #[test]
    fn container_round_trip(seed in any::<u64>(), m in 1usize..200, s in (1usize..100).prop_flat_map(word), k in 0.0f64..4.0) {
        let cb = Codebook::<f64>::from_seed(seed, m, s.len()).unwrap();
        let (blob, bytes) = pack_blob(&s, &cb, k).unwrap();
        prop_assert_eq!(bytes.len(), 37 + s.len().div_ceil(8));
        let back = unpack_blob(&bytes).unwrap();
        prop_assert_eq!(back.rate(), s.len() as f64 / m as f64);
        prop_assert_eq!(back.to_bytes(), bytes);
        prop_assert_eq!(&back, &blob);
    }
}
