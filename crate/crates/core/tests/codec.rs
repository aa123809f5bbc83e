use chirpim_core::codec::{
    binomial, decode, encode, psk, rank_combination, spectral_efficiency, tradeoff_table,
    unrank_combination, ImFrame, PayloadLayout,
};
use chirpim_core::Error;
use proptest::prelude::*;

fn bits_of(value: u64, width: usize) -> Vec<bool> {
    (0..width).rev().map(|i| (value >> i) & 1 == 1).collect()
}

/// Every `l`-subset of `0..m`, ascending, listed in colex order by brute force.
fn colex_subsets(m: usize, l: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = (0u32..1 << m)
        .filter(|mask| mask.count_ones() as usize == l)
        .map(|mask| (0..m).filter(|i| mask >> i & 1 == 1).collect())
        .collect();
    all.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    all
}

#[test]
fn unrank_is_colex_order() {
    for m in 2..=10 {
        for l in 1..m {
            let oracle = colex_subsets(m, l);
            assert_eq!(oracle.len() as u128, binomial(m, l));
            for (r, subset) in oracle.iter().enumerate() {
                assert_eq!(&unrank_combination(r as u128, m, l).unwrap(), subset);
                assert_eq!(rank_combination(subset, m).unwrap(), r as u128);
            }
            assert!(unrank_combination(oracle.len() as u128, m, l).is_err());
        }
    }
}

#[test]
fn rank_examples() {
    assert_eq!(unrank_combination(0, 384, 2).unwrap(), vec![0, 1]);
    assert_eq!(rank_combination(&[0, 1], 384).unwrap(), 0);
    assert_eq!(rank_combination(&[1, 2], 384).unwrap(), 2);
    assert!(rank_combination(&[2, 2], 8).is_err());
    assert!(rank_combination(&[3, 1], 8).is_err());
    assert!(rank_combination(&[1, 8], 8).is_err());
}

#[test]
fn exhaustive_round_trip() {
    for (m, l) in [(8, 2), (8, 3), (10, 4)] {
        for h in [2, 4] {
            let layout = PayloadLayout::new(m, h, l).unwrap();
            let s = layout.total_bits();
            let mut seen = std::collections::HashSet::new();
            for v in 0..1u64 << s {
                let bits = bits_of(v, s);
                let frame = encode(&bits, &layout).unwrap();
                assert_eq!(decode(&frame, &layout).unwrap(), bits);
                assert!(seen.insert(frame));
            }
            // decode then encode is the identity on the image.
            for frame in &seen {
                assert_eq!(
                    &encode(&decode(frame, &layout).unwrap(), &layout).unwrap(),
                    frame
                );
            }
        }
    }
}

#[test]
fn payload_sizes() {
    assert_eq!(PayloadLayout::new(384, 4, 2).unwrap().total_bits(), 20);
    assert_eq!(PayloadLayout::new(384, 4, 4).unwrap().total_bits(), 37);
    assert_eq!(PayloadLayout::new(384, 4, 1).unwrap().total_bits(), 10);
    for l in 1..=11 {
        let layout = PayloadLayout::new(384, 4, l).unwrap();
        let exact = (binomial(384, l) * 4u128.pow(l as u32)).ilog2() as usize;
        assert_eq!(layout.total_bits(), exact);
    }
    assert!(PayloadLayout::new(384, 3, 2).is_err());
    assert!(PayloadLayout::new(4, 4, 4).is_err());
}

#[test]
fn zero_payload() {
    let layout = PayloadLayout::new(384, 4, 2).unwrap();
    let frame = encode(&[false; 20], &layout).unwrap();
    assert_eq!(frame.indices(), &[0, 1]);
    assert_eq!(frame.phases(), &[0, 0]);
    assert!(frame.symbols().all(|s| (s - psk(0, 4)).norm() < 1e-15));
    assert_eq!(decode(&frame, &layout).unwrap(), vec![false; 20]);
}

#[test]
fn out_of_codebook_rank_clamps() {
    let layout = PayloadLayout::new(384, 4, 2).unwrap();
    let top = binomial(384, 2) - 1;
    assert_eq!(top, 73_535);
    let frame = ImFrame::new(384, 4, unrank_combination(top, 384, 2).unwrap(), vec![1, 2]).unwrap();
    let bits = decode(&frame, &layout).unwrap();
    let rank = bits[4..].iter().fold(0u32, |acc, &b| acc << 1 | b as u32);
    assert_eq!(rank, 65_535);
    assert_eq!(&bits[..4], &[false, true, true, false]);
}

#[test]
fn tradeoff_rows() {
    let rows = tradeoff_table(384, 4, 1..=11).unwrap();
    assert_eq!(rows.len(), 11);
    assert_eq!(rows[1].bits, 20);
    assert!((rows[1].spectral_efficiency - 20.0 / 384.0).abs() < 1e-15);
    assert!((rows[1].max_pmepr_db - 3.0103).abs() < 1e-4);
    assert_eq!(rows[3].bits, 37);
    assert!((rows[3].max_pmepr_db - 6.0206).abs() < 1e-4);
    assert!(rows.windows(2).all(|w| w[1].bits > w[0].bits));
    assert!(tradeoff_table(384, 4, 0..=3).is_err());
    assert!(tradeoff_table(384, 4, 1..=12).is_err());
    let layout = PayloadLayout::new(384, 4, 1).unwrap();
    assert_eq!(spectral_efficiency(&layout), 10.0 / 384.0);
}

#[test]
fn wrong_bit_count() {
    let layout = PayloadLayout::new(384, 4, 2).unwrap();
    assert_eq!(
        encode(&[true; 19], &layout).unwrap_err(),
        Error::BitLength {
            got: 19,
            expected: 20
        }
    );
}

fn layout() -> impl Strategy<Value = PayloadLayout> {
    prop_oneof![
        (2usize..64, 1usize..8, 0u32..4).prop_filter_map("C(M,l) within 2^24", |(m, l, e)| {
            (l < m && binomial(m, l) <= 1 << 24).then(|| PayloadLayout::new(m, 1 << e, l).unwrap())
        }),
        (1usize..=11, 0u32..4).prop_map(|(l, e)| PayloadLayout::new(384, 1 << e, l).unwrap()),
    ]
}

proptest! {
    #[test]
    fn random_round_trip(layout in layout(), seed in any::<u128>()) {
        let s = layout.total_bits();
        let bits: Vec<bool> = (0..s).map(|i| (seed.rotate_left(i as u32 * 7) >> (i % 128)) & 1 == 1).collect();
        let frame = encode(&bits, &layout).unwrap();
        prop_assert_eq!(frame.indices().len(), layout.l());
        prop_assert!(frame.indices().windows(2).all(|w| w[0] < w[1]));
        prop_assert!(frame.symbols().all(|s| (s.norm() - 1.0).abs() < 1e-12));
        prop_assert_eq!(decode(&frame, &layout).unwrap(), bits);
    }

    #[test]
    fn unrank_increases_in_colex(m in 3usize..40, l in 1usize..6, r in any::<u64>()) {
        prop_assume!(l < m);
        let total = binomial(m, l);
        prop_assume!(total >= 2);
        let r = r as u128 % (total - 1);
        let a = unrank_combination(r, m, l).unwrap();
        let b = unrank_combination(r + 1, m, l).unwrap();
        prop_assert!(a.iter().rev().lt(b.iter().rev()));
    }
}
