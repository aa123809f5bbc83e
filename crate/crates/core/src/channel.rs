//! AWGN and tapped-delay-line Rayleigh block fading.
//!
//! Power bookkeeping assumes unit mean body power per sample (see
//! [`crate::modem`]), so `SNR = 1/σ²` and `Eb/N0 = SNR · N / S` for a body of
//! `N` samples carrying `S` bits.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::fft::Fft;
use crate::modem::TxFrame;
use crate::{Error, Result};

/// Adds circularly-symmetric complex Gaussian noise of variance `noise_var`
/// per sample (`noise_var/2` on each of I and Q).
pub fn awgn<R: Rng + ?Sized>(samples: &mut [Complex64], noise_var: f64, rng: &mut R) -> Result<()> {
    if !(noise_var >= 0.0) {
        return Err(Error::NegativeVariance(noise_var));
    }
    if noise_var == 0.0 {
        return Ok(());
    }
    let sd = libm::sqrt(noise_var / 2.0);
    for s in samples.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *s += Complex64::new(re * sd, im * sd);
    }
    Ok(())
}

/// Power-delay profile: tap delays in seconds, powers in dB.
#[derive(Debug, Clone, PartialEq)]
pub struct TdlProfile {
    name: String,
    delays: Vec<f64>,
    powers_db: Vec<f64>,
}

/// Extended Vehicular A delays (ns) and relative powers (dB).
const EVA_DELAYS_NS: [f64; 9] = [
    0.0, 30.0, 150.0, 310.0, 370.0, 710.0, 1090.0, 1730.0, 2510.0,
];
const EVA_POWERS_DB: [f64; 9] = [0.0, -1.5, -1.4, -3.6, -0.6, -9.1, -7.0, -12.0, -16.9];

impl TdlProfile {
    pub fn new(name: impl Into<String>, delays: Vec<f64>, powers_db: Vec<f64>) -> Result<Self> {
        if delays.is_empty() {
            return Err(Error::BadProfile("no taps"));
        }
        if delays.len() != powers_db.len() {
            return Err(Error::BadProfile("delays and powers differ in length"));
        }
        if delays.iter().chain(&powers_db).any(|v| !v.is_finite()) {
            return Err(Error::BadProfile("non-finite entry"));
        }
        if delays[0] < 0.0 || delays.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::BadProfile(
                "delays must be non-negative and ascending",
            ));
        }
        Ok(TdlProfile {
            name: name.into(),
            delays,
            powers_db,
        })
    }

    pub fn eva() -> Self {
        TdlProfile {
            name: String::from("EVA"),
            delays: EVA_DELAYS_NS.iter().map(|ns| ns * 1e-9).collect(),
            powers_db: EVA_POWERS_DB.to_vec(),
        }
    }

    /// Single tap at zero delay: flat Rayleigh fading.
    pub fn flat() -> Self {
        TdlProfile {
            name: String::from("flat"),
            delays: vec![0.0],
            powers_db: vec![0.0],
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn delays(&self) -> &[f64] {
        &self.delays
    }

    pub fn powers_db(&self) -> &[f64] {
        &self.powers_db
    }

    /// Linear tap powers scaled to sum to one.
    pub fn normalized_powers(&self) -> Vec<f64> {
        let lin: Vec<f64> = self
            .powers_db
            .iter()
            .map(|p| libm::pow(10.0, p / 10.0))
            .collect();
        let total: f64 = lin.iter().sum();
        lin.into_iter().map(|p| p / total).collect()
    }

    pub fn max_delay(&self) -> f64 {
        *self.delays.last().unwrap()
    }

    pub fn rms_delay_spread(&self) -> f64 {
        let p = self.normalized_powers();
        let mean: f64 = p.iter().zip(&self.delays).map(|(w, d)| w * d).sum();
        let second: f64 = p.iter().zip(&self.delays).map(|(w, d)| w * d * d).sum();
        libm::sqrt((second - mean * mean).max(0.0))
    }

    /// Tap positions in samples, rounded to the nearest sample.
    pub fn tap_positions(&self, sample_rate: f64) -> Vec<usize> {
        self.delays
            .iter()
            .map(|d| libm::round(d * sample_rate) as usize)
            .collect()
    }

    /// Channel memory in samples at `sample_rate`.
    pub fn memory(&self, sample_rate: f64) -> usize {
        libm::round(self.max_delay() * sample_rate) as usize
    }

    /// Drops taps beyond `max_delay` seconds. Remaining powers keep their
    /// relative values and are renormalised on use.
    pub fn truncated(&self, max_delay: f64) -> Result<Self> {
        let keep: Vec<usize> = (0..self.delays.len())
            .filter(|&i| self.delays[i] <= max_delay)
            .collect();
        TdlProfile::new(
            self.name.clone(),
            keep.iter().map(|&i| self.delays[i]).collect(),
            keep.iter().map(|&i| self.powers_db[i]).collect(),
        )
    }
}

/// One block-fading draw: sample-spaced FIR taps and their `N`-point
/// frequency response `H_k = Σ_l h_l e^{-j2πkl/N}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    taps: Vec<Complex64>,
    freq_response: Vec<Complex64>,
}

impl ChannelRealization {
    pub fn from_taps(taps: Vec<Complex64>, n: usize) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::BadProfile("no taps"));
        }
        if taps.len() > n {
            return Err(Error::BadProfile("channel longer than FFT size"));
        }
        let mut freq_response = vec![Complex64::new(0.0, 0.0); n];
        freq_response[..taps.len()].copy_from_slice(&taps);
        Fft::new(n).forward(&mut freq_response);
        Ok(ChannelRealization {
            taps,
            freq_response,
        })
    }

    pub fn identity(n: usize) -> Self {
        ChannelRealization {
            taps: vec![Complex64::new(1.0, 0.0)],
            freq_response: vec![Complex64::new(1.0, 0.0); n],
        }
    }

    pub fn taps(&self) -> &[Complex64] {
        &self.taps
    }

    pub fn freq_response(&self) -> &[Complex64] {
        &self.freq_response
    }

    /// Delay of the last tap, in samples.
    pub fn memory(&self) -> usize {
        self.taps.len() - 1
    }
}

/// Draws one realization: each tap i.i.d. `CN(0, p_i)` with normalised
/// profile power `p_i`, placed at its rounded sample delay. Taps rounding to
/// the same sample add.
pub fn draw_tdl<R: Rng + ?Sized>(
    profile: &TdlProfile,
    sample_rate: f64,
    n: usize,
    rng: &mut R,
) -> Result<ChannelRealization> {
    let positions = profile.tap_positions(sample_rate);
    let len = positions.iter().max().unwrap() + 1;
    let mut taps = vec![Complex64::new(0.0, 0.0); len];
    for (pos, p) in positions.into_iter().zip(profile.normalized_powers()) {
        let sd = libm::sqrt(p / 2.0);
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        taps[pos] += Complex64::new(re * sd, im * sd);
    }
    ChannelRealization::from_taps(taps, n)
}

/// Linear convolution of the frame (CP included) with the taps, truncated to
/// the frame length. With `memory() <= cp_len` the body sees a circular
/// convolution, i.e. per-bin multiplication by the frequency response.
pub fn apply(realization: &ChannelRealization, tx: &TxFrame) -> TxFrame {
    let x = tx.samples();
    let mut out = vec![Complex64::new(0.0, 0.0); x.len()];
    for (l, h) in realization.taps.iter().enumerate() {
        if *h == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (o, s) in out[l.min(x.len())..].iter_mut().zip(x) {
            *o += h * s;
        }
    }
    TxFrame::from_parts(out, tx.cp_len()).expect("length preserved")
}

pub fn snr_to_noisevar(snr_db: f64) -> f64 {
    libm::pow(10.0, -snr_db / 10.0)
}

/// Noise variance per sample for a target `Eb/N0`, with `bits` per frame and
/// `n` body samples of unit power.
pub fn ebn0_to_noisevar(ebn0_db: f64, bits: usize, n: usize) -> f64 {
    snr_to_noisevar(snr_from_ebn0(ebn0_db, bits, n))
}

/// `Eb/N0 (dB) = SNR (dB) + 10·log10(N / S)`.
pub fn ebn0_from_snr(snr_db: f64, bits: usize, n: usize) -> f64 {
    snr_db + 10.0 * libm::log10(n as f64 / bits as f64)
}

pub fn snr_from_ebn0(ebn0_db: f64, bits: usize, n: usize) -> f64 {
    ebn0_db - 10.0 * libm::log10(n as f64 / bits as f64)
}
