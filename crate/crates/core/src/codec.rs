//! Bits ⇄ index-modulated frames.
//!
//! A frame activates `l` of `M` positions, each carrying an `H`-PSK symbol
//! `e^{j2πk/H}`. The first `l·log2 H` bits of a payload pick the PSK phases
//! (natural binary, MSB first, the i-th symbol going to the i-th smallest
//! index); the remaining `⌊log2 C(M,l)⌋` bits, read as an unsigned integer,
//! pick the index set through the combinatorial number system
//! `r = C(c_l, l) + … + C(c_1, 1)`, `c_l > … > c_1`.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::RangeInclusive;

use num_complex::Complex64;

use crate::{Error, Result};

/// Range of active-index counts covered by the PMEPR/SE trade-off table.
pub const TRADEOFF_L_RANGE: RangeInclusive<usize> = 1..=11;

/// Exact `C(n, k)`; zero when `k > n`. Panics on `u128` overflow, which
/// cannot happen for the layouts accepted by [`PayloadLayout::new`].
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128).expect("binomial overflow") / (i as u128 + 1);
    }
    acc
}

fn checked_binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// The `rank`-th `l`-subset of `0..m` in colexicographic order, ascending.
pub fn unrank_combination(rank: u128, m: usize, l: usize) -> Result<Vec<usize>> {
    let total = checked_binomial(m, l).ok_or(Error::BadLayout("C(M, l) overflows 128 bits"))?;
    if rank >= total {
        return Err(Error::RankOutOfRange { rank, m, l });
    }
    let mut out = alloc::vec![0usize; l];
    let mut rest = rank;
    let mut ceiling = m;
    for i in (1..=l).rev() {
        let mut c = ceiling - 1;
        loop {
            let b = binomial(c, i);
            if b <= rest {
                rest -= b;
                break;
            }
            c -= 1;
        }
        out[i - 1] = c;
        ceiling = c;
    }
    Ok(out)
}

/// Inverse of [`unrank_combination`]. `indices` must be strictly increasing
/// and below `m`.
pub fn rank_combination(indices: &[usize], m: usize) -> Result<u128> {
    validate_indices(indices, m)?;
    Ok(indices
        .iter()
        .enumerate()
        .map(|(i, &c)| binomial(c, i + 1))
        .sum())
}

fn validate_indices(indices: &[usize], m: usize) -> Result<()> {
    if indices.is_empty() {
        return Err(Error::BadIndices("no active index"));
    }
    if indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadIndices("indices must be strictly increasing"));
    }
    if *indices.last().unwrap() >= m {
        return Err(Error::BadIndices("index out of range"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PayloadLayout {
    m: usize,
    h: usize,
    l: usize,
    index_bits: u32,
    psk_bits: u32,
}

impl PayloadLayout {
    /// `h` must be a power of two and `1 <= l < m`.
    pub fn new(m: usize, h: usize, l: usize) -> Result<Self> {
        if !h.is_power_of_two() {
            return Err(Error::BadLayout("PSK order must be a power of two"));
        }
        if l == 0 || l >= m {
            return Err(Error::BadLayout("need 1 <= l < M"));
        }
        let combos =
            checked_binomial(m, l).ok_or(Error::BadLayout("C(M, l) overflows 128 bits"))?;
        let index_bits = 127 - combos.leading_zeros();
        let psk_bits = l as u32 * h.trailing_zeros();
        Ok(PayloadLayout {
            m,
            h,
            l,
            index_bits,
            psk_bits,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// `⌊log2 C(M, l)⌋`.
    pub fn index_bits(&self) -> u32 {
        self.index_bits
    }

    /// `l·log2 H`.
    pub fn psk_bits(&self) -> u32 {
        self.psk_bits
    }

    /// `S`, bits per frame.
    pub fn total_bits(&self) -> usize {
        (self.index_bits + self.psk_bits) as usize
    }

    /// Largest usable rank: the codebook is `0 .. 2^index_bits`.
    pub fn max_rank(&self) -> u128 {
        (1u128 << self.index_bits) - 1
    }

    fn bits_per_symbol(&self) -> u32 {
        self.h.trailing_zeros()
    }
}

/// `l` active positions out of `m`, each with a PSK phase index `< h`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ImFrame {
    m: usize,
    h: usize,
    indices: Vec<usize>,
    phases: Vec<usize>,
}

impl ImFrame {
    pub fn new(m: usize, h: usize, indices: Vec<usize>, phases: Vec<usize>) -> Result<Self> {
        validate_indices(&indices, m)?;
        if phases.len() != indices.len() {
            return Err(Error::BadIndices("one phase per active index"));
        }
        if phases.iter().any(|&p| p >= h) {
            return Err(Error::BadIndices("phase index out of range"));
        }
        Ok(ImFrame {
            m,
            h,
            indices,
            phases,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn l(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// PSK phase indices `k` of `e^{j2πk/H}`, aligned with [`Self::indices`].
    pub fn phases(&self) -> &[usize] {
        &self.phases
    }

    pub fn symbols(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.phases.iter().map(move |&k| psk(k, self.h))
    }

    /// Dense length-`m` symbol vector, zero at inactive positions.
    pub fn dense(&self) -> Vec<Complex64> {
        let mut d = alloc::vec![Complex64::new(0.0, 0.0); self.m];
        for (&i, s) in self.indices.iter().zip(self.symbols()) {
            d[i] = s;
        }
        d
    }
}

/// `e^{j2πk/h}`.
pub fn psk(k: usize, h: usize) -> Complex64 {
    let angle = 2.0 * PI * k as f64 / h as f64;
    Complex64::new(libm::cos(angle), libm::sin(angle))
}

pub fn encode(bits: &[bool], layout: &PayloadLayout) -> Result<ImFrame> {
    if bits.len() != layout.total_bits() {
        return Err(Error::BitLength {
            got: bits.len(),
            expected: layout.total_bits(),
        });
    }
    let (psk_part, index_part) = bits.split_at(layout.psk_bits as usize);
    let per = layout.bits_per_symbol() as usize;
    let phases: Vec<usize> = if per == 0 {
        alloc::vec![0; layout.l]
    } else {
        psk_part.chunks(per).map(|c| to_int(c) as usize).collect()
    };
    let rank = to_int(index_part);
    let indices = unrank_combination(rank, layout.m, layout.l)?;
    ImFrame::new(layout.m, layout.h, indices, phases)
}

/// Inverse of [`encode`]. A detected index set whose rank lies outside the
/// codebook is mapped to the largest valid rank.
pub fn decode(frame: &ImFrame, layout: &PayloadLayout) -> Result<Vec<bool>> {
    if frame.m != layout.m || frame.h != layout.h || frame.l() != layout.l {
        return Err(Error::BadLayout("frame does not match layout"));
    }
    let rank = rank_combination(&frame.indices, frame.m)?.min(layout.max_rank());
    let per = layout.bits_per_symbol() as usize;
    let mut bits = Vec::with_capacity(layout.total_bits());
    for &p in &frame.phases {
        push_bits(&mut bits, p as u128, per);
    }
    push_bits(&mut bits, rank, layout.index_bits as usize);
    Ok(bits)
}

fn to_int(bits: &[bool]) -> u128 {
    bits.iter().fold(0u128, |acc, &b| (acc << 1) | b as u128)
}

fn push_bits(out: &mut Vec<bool>, value: u128, width: usize) {
    for i in (0..width).rev() {
        out.push((value >> i) & 1 == 1);
    }
}

/// `ρ = S / M` bit/s/Hz.
pub fn spectral_efficiency(layout: &PayloadLayout) -> f64 {
    layout.total_bits() as f64 / layout.m as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffRow {
    pub l: usize,
    pub bits: usize,
    pub spectral_efficiency: f64,
    /// `10·log10(l)`: `l` unit-modulus chirps sum to at most `l²` peak power
    /// against an average of `l`.
    pub max_pmepr_db: f64,
}

/// One row per `l` in `l_range`, which must lie within [`TRADEOFF_L_RANGE`].
pub fn tradeoff_table(
    m: usize,
    h: usize,
    l_range: RangeInclusive<usize>,
) -> Result<Vec<TradeoffRow>> {
    if l_range.is_empty()
        || !TRADEOFF_L_RANGE.contains(l_range.start())
        || !TRADEOFF_L_RANGE.contains(l_range.end())
    {
        return Err(Error::BadLayout("l must lie in 1..=11"));
    }
    l_range
        .map(|l| {
            let layout = PayloadLayout::new(m, h, l)?;
            Ok(TradeoffRow {
                l,
                bits: layout.total_bits(),
                spectral_efficiency: spectral_efficiency(&layout),
                max_pmepr_db: 10.0 * libm::log10(l as f64),
            })
        })
        .collect()
}
