//! DFT-spread OFDM transmitter and receiver for chirp-based index modulation,
//! with the OFDM-IM and unshaped DFT-s-OFDM-IM baselines.
//!
//! Transmit chain for spread waveforms:
//!
//! ```text
//! d (M, sparse) -> M-DFT -> × G_k -> subcarriers k = L_d..L_u of an N grid
//!               -> N-IDFT -> × c -> prepend CP
//! ```
//!
//! Subcarrier `k` sits on FFT bin `k mod N` and takes DFT output `k mod M`.
//! The scale `c` is fixed per modem so that the ensemble-average body power is
//! one: `c² · l · Σ|G_k|² = 1`. Frames of a chirp waveform are not
//! unimodular complementary sequences, so individual frames fluctuate around
//! that average; OFDM-IM and flat DFT-s-OFDM-IM frames hit it exactly.
//!
//! The receiver strips the CP, transforms, equalizes every occupied bin with
//! a single-tap MMSE filter on the combined response `E_k = H_k G_k` and
//! de-spreads with an M-point IDFT. [`ml_detect`] then picks the `l` best
//! (index, phase) pairs.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::chirp::{default_band, FdssSequence};
use crate::codec::ImFrame;
use crate::fft::Fft;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Time-domain frame: `n_cp` cyclic-prefix samples followed by `N` body
/// samples at rate `N/Ts`.
#[derive(Debug, Clone, PartialEq)]
pub struct TxFrame {
    samples: Vec<Complex64>,
    cp_len: usize,
}

impl TxFrame {
    pub fn from_parts(samples: Vec<Complex64>, cp_len: usize) -> Result<Self> {
        if cp_len >= samples.len() {
            return Err(Error::BadLength {
                got: samples.len(),
                expected: cp_len + 1,
            });
        }
        Ok(TxFrame { samples, cp_len })
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn cp_len(&self) -> usize {
        self.cp_len
    }

    pub fn body(&self) -> &[Complex64] {
        &self.samples[self.cp_len..]
    }

    pub fn cp(&self) -> &[Complex64] {
        &self.samples[..self.cp_len]
    }

    pub fn mean_body_power(&self) -> f64 {
        let body = self.body();
        body.iter().map(|s| s.norm_sqr()).sum::<f64>() / body.len() as f64
    }
}

/// Equalized, de-spread symbols `ȳ_i`, one per chirp position.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftSymbols {
    pub y: Vec<Complex64>,
    /// Residual MMSE error variance per de-spread symbol.
    pub noise_var_est: f64,
}

/// Occupied-band bins of an OFDM-IM receiver and the channel seen by each.
#[derive(Debug, Clone, PartialEq)]
pub struct OfdmBins {
    pub y: Vec<Complex64>,
    pub channel: Vec<Complex64>,
}

#[derive(Debug, Clone)]
enum Shaping {
    /// DFT spreading followed by FDSS (all ones for plain DFT-s-OFDM).
    Spread(FdssSequence),
    /// Symbols placed directly on the band starting at `ld`.
    Direct { ld: i64 },
}

/// Transceiver for one waveform, band and active-index count. Immutable once
/// built, so a single instance can serve many threads.
#[derive(Debug, Clone)]
pub struct Modem {
    shaping: Shaping,
    m: usize,
    n: usize,
    n_cp: usize,
    l: usize,
    scale: f64,
    fft_m: Fft,
    fft_n: Fft,
}

impl Modem {
    /// Chirp index modulation: DFT-s-OFDM with the chirp's FDSS.
    pub fn chirp(fdss: FdssSequence, n: usize, n_cp: usize, l: usize) -> Result<Self> {
        let m = fdss.len();
        Self::build(Shaping::Spread(fdss), m, n, n_cp, l)
    }

    /// DFT-s-OFDM-IM: DFT spreading without shaping.
    pub fn dft_spread(m: usize, n: usize, n_cp: usize, l: usize) -> Result<Self> {
        Self::build(Shaping::Spread(FdssSequence::flat(m)?), m, n, n_cp, l)
    }

    /// OFDM-IM: symbols directly on the `m` centred subcarriers.
    pub fn ofdm(m: usize, n: usize, n_cp: usize, l: usize) -> Result<Self> {
        let (ld, _) = default_band(m)?;
        Self::build(Shaping::Direct { ld }, m, n, n_cp, l)
    }

    fn build(shaping: Shaping, m: usize, n: usize, n_cp: usize, l: usize) -> Result<Self> {
        if n < m {
            return Err(Error::GridTooSmall { n, m });
        }
        if l == 0 || l >= m {
            return Err(Error::BadLayout("need 1 <= l < M"));
        }
        let mut modem = Modem {
            shaping,
            m,
            n,
            n_cp,
            l,
            scale: 1.0,
            fft_m: Fft::new(m),
            fft_n: Fft::new(n),
        };
        let p = modem.nominal_power();
        if !(p > 0.0) {
            return Err(Error::ZeroSequence);
        }
        modem.scale = 1.0 / libm::sqrt(p);
        Ok(modem)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cp_len(&self) -> usize {
        self.n_cp
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn is_spread(&self) -> bool {
        matches!(self.shaping, Shaping::Spread(_))
    }

    /// FDSS weights for spread waveforms.
    pub fn fdss(&self) -> Option<&FdssSequence> {
        match &self.shaping {
            Shaping::Spread(f) => Some(f),
            Shaping::Direct { .. } => None,
        }
    }

    fn ld(&self) -> i64 {
        match &self.shaping {
            Shaping::Spread(f) => f.ld(),
            Shaping::Direct { ld } => *ld,
        }
    }

    /// Expected `Σ|X_k|²` of the occupied band over uniformly random frames:
    /// `l·Σ|G_k|²` for spread waveforms, `l` for OFDM-IM.
    pub fn nominal_power(&self) -> f64 {
        match &self.shaping {
            Shaping::Spread(f) => self.l as f64 * f.power(),
            Shaping::Direct { .. } => self.l as f64,
        }
    }

    /// Subcarrier values `X_k`, `k = L_d..=L_u`, before power scaling. The
    /// OFDM envelope of this sequence is the (unscaled) transmitted signal.
    pub fn occupied_band(&self, frame: &ImFrame) -> Result<Vec<Complex64>> {
        if frame.m() != self.m {
            return Err(Error::BadLength {
                got: frame.m(),
                expected: self.m,
            });
        }
        let dense = frame.dense();
        Ok(match &self.shaping {
            Shaping::Spread(fdss) => {
                let mut spread = dense;
                self.fft_m.forward(&mut spread);
                let m = self.m as i64;
                fdss.iter()
                    .map(|(k, g)| g * spread[k.rem_euclid(m) as usize])
                    .collect()
            }
            Shaping::Direct { .. } => dense,
        })
    }

    pub fn tx(&self, frame: &ImFrame) -> Result<TxFrame> {
        let band = self.occupied_band(frame)?;
        let mut grid = vec![ZERO; self.n];
        let n = self.n as i64;
        let ld = self.ld();
        for (i, x) in band.into_iter().enumerate() {
            grid[(ld + i as i64).rem_euclid(n) as usize] = x * self.scale;
        }
        self.fft_n.inverse(&mut grid);
        let mut samples = Vec::with_capacity(self.n + self.n_cp);
        samples.extend_from_slice(&grid[self.n - self.n_cp..]);
        samples.extend_from_slice(&grid);
        Ok(TxFrame {
            samples,
            cp_len: self.n_cp,
        })
    }

    /// Occupied bins after CP removal and N-point FFT, normalised so a
    /// noiseless identity channel returns the transmitted `X_k` (spread) or
    /// `d_i` (OFDM-IM). Also returns the channel at those bins and the noise
    /// variance per normalised bin.
    fn demodulate(
        &self,
        received: &TxFrame,
        chan_freq: &[Complex64],
        noise_var: f64,
    ) -> Result<(Vec<Complex64>, Vec<Complex64>, f64)> {
        if !(noise_var >= 0.0) {
            return Err(Error::NegativeVariance(noise_var));
        }
        if received.samples.len() != self.n + self.n_cp {
            return Err(Error::BadLength {
                got: received.samples.len(),
                expected: self.n + self.n_cp,
            });
        }
        if chan_freq.len() != self.n {
            return Err(Error::BadLength {
                got: chan_freq.len(),
                expected: self.n,
            });
        }
        let mut grid = received.samples[self.n_cp..].to_vec();
        self.fft_n.forward(&mut grid);
        let norm = 1.0 / (self.n as f64 * self.scale);
        let n = self.n as i64;
        let ld = self.ld();
        let (bins, chan) = (0..self.m)
            .map(|i| {
                let bin = (ld + i as i64).rem_euclid(n) as usize;
                (grid[bin] * norm, chan_freq[bin])
            })
            .unzip();
        let bin_noise = noise_var * norm * norm * self.n as f64;
        Ok((bins, chan, bin_noise))
    }

    /// Single-tap MMSE equalization on `E_k = H_k G_k` followed by M-point
    /// de-spreading. The regulariser is the per-bin noise over the expected
    /// per-bin power `l` of the spread symbols.
    pub fn rx(
        &self,
        received: &TxFrame,
        chan_freq: &[Complex64],
        noise_var: f64,
    ) -> Result<SoftSymbols> {
        let fdss = match &self.shaping {
            Shaping::Spread(f) => f,
            Shaping::Direct { .. } => return Err(Error::BadLayout("rx needs a spread waveform")),
        };
        let (bins, chan, bin_noise) = self.demodulate(received, chan_freq, noise_var)?;
        let signal_power = self.l as f64;
        let reg = bin_noise / signal_power;
        let m = self.m as i64;
        let mut spread = vec![ZERO; self.m];
        let mut mse = 0.0;
        for (((k, g), y), h) in fdss.iter().zip(&bins).zip(&chan) {
            let e = h * g;
            let denom = e.norm_sqr() + reg;
            let slot = k.rem_euclid(m) as usize;
            if denom > 0.0 {
                spread[slot] = e.conj() * y / denom;
                mse += signal_power * reg / denom;
            } else {
                mse += signal_power;
            }
        }
        self.fft_m.inverse(&mut spread);
        let inv_m = 1.0 / self.m as f64;
        for v in spread.iter_mut() {
            *v *= inv_m;
        }
        Ok(SoftSymbols {
            y: spread,
            noise_var_est: mse * inv_m * inv_m,
        })
    }

    /// OFDM-IM receiver front end: occupied bins and channel, no equalization.
    pub fn rx_ofdm_im(
        &self,
        received: &TxFrame,
        chan_freq: &[Complex64],
        noise_var: f64,
    ) -> Result<OfdmBins> {
        if self.is_spread() {
            return Err(Error::BadLayout("rx_ofdm_im needs an OFDM waveform"));
        }
        let (y, channel, _) = self.demodulate(received, chan_freq, noise_var)?;
        Ok(OfdmBins { y, channel })
    }

    /// Full receiver for either waveform family.
    pub fn receive(
        &self,
        received: &TxFrame,
        chan_freq: &[Complex64],
        noise_var: f64,
        h: usize,
    ) -> Result<ImFrame> {
        if self.is_spread() {
            let soft = self.rx(received, chan_freq, noise_var)?;
            ml_detect(&soft.y, h, self.l)
        } else {
            let bins = self.rx_ofdm_im(received, chan_freq, noise_var)?;
            detect_ofdm_im(&bins.y, &bins.channel, h, self.l)
        }
    }
}

/// Transmit with plain OFDM-IM on an `N`-point grid.
pub fn tx_ofdm_im(frame: &ImFrame, n: usize, n_cp: usize) -> Result<TxFrame> {
    Modem::ofdm(frame.m(), n, n_cp, frame.l())?.tx(frame)
}

/// Transmit with DFT-s-OFDM-IM (no FDSS).
pub fn tx_dfts_im(frame: &ImFrame, n: usize, n_cp: usize) -> Result<TxFrame> {
    Modem::dft_spread(frame.m(), n, n_cp, frame.l())?.tx(frame)
}

fn psk_table(h: usize) -> Vec<Complex64> {
    (0..h)
        .map(|k| {
            let a = -2.0 * PI * k as f64 / h as f64;
            Complex64::new(libm::cos(a), libm::sin(a))
        })
        .collect()
}

/// Per-position best phase and score under `metric(i, rotation)`; ties go to
/// the smaller phase index. Then the `l` best positions, ties to the smaller
/// position.
fn select_top<F>(m: usize, h: usize, l: usize, metric: F) -> Result<ImFrame>
where
    F: Fn(usize, Complex64) -> f64,
{
    if h == 0 {
        return Err(Error::BadLayout("PSK order must be positive"));
    }
    if l == 0 || l >= m {
        return Err(Error::BadLayout("need 1 <= l < M"));
    }
    let rot = psk_table(h);
    let mut best: Vec<(f64, usize)> = Vec::with_capacity(m);
    for i in 0..m {
        let mut top = (f64::NEG_INFINITY, 0);
        for (k, r) in rot.iter().enumerate() {
            let t = metric(i, *r);
            if t > top.0 {
                top = (t, k);
            }
        }
        best.push(top);
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| best[b].0.total_cmp(&best[a].0).then(a.cmp(&b)));
    let mut chosen: Vec<usize> = order[..l].to_vec();
    chosen.sort_unstable();
    let phases = chosen.iter().map(|&i| best[i].1).collect();
    ImFrame::new(m, h, chosen, phases)
}

/// Maximum-likelihood index/phase detector on de-spread symbols: scores
/// `T(i,k) = Re{ȳ_i e^{-j2πk/H}}`, keeps each position's best phase and
/// returns the `l` highest-scoring positions. The objective is separable over
/// distinct positions, so this is the exact maximiser.
pub fn ml_detect(y: &[Complex64], h: usize, l: usize) -> Result<ImFrame> {
    select_top(y.len(), h, l, |i, r| (y[i] * r).re)
}

/// OFDM-IM maximum-likelihood detector:
/// `T(i,k) = 2 Re{y_i H_i^* e^{-j2πk/H}} - |H_i|²`.
pub fn detect_ofdm_im(
    y: &[Complex64],
    channel: &[Complex64],
    h: usize,
    l: usize,
) -> Result<ImFrame> {
    if y.len() != channel.len() {
        return Err(Error::LengthMismatch(y.len(), channel.len()));
    }
    select_top(y.len(), h, l, |i, r| {
        2.0 * (y[i] * channel[i].conj() * r).re - channel[i].norm_sqr()
    })
}
