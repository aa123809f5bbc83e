//! Signal-processing core for wideband index modulation with circularly-shifted
//! chirps.
//!
//! Everything in this crate is a pure function of its inputs and builds
//! without `std` (an allocator is required). The pieces are:
//!
//! - [`special`]: Fresnel integrals and integer-order Bessel functions.
//! - [`chirp`]: Fourier coefficients of linear and sinusoidal chirps, used as
//!   frequency-domain spectral shaping (FDSS), and occupied bandwidth.
//! - [`sequences`]: aperiodic autocorrelation, Golay complementary pair checks,
//!   chirp-based complementary pair synthesis and PMEPR.
//! - [`codec`]: bits to (active indices, PSK symbols) via the combinatorial
//!   number system.
//! - [`modem`]: DFT-spread OFDM transmitter/receiver with single-tap MMSE
//!   equalization and the maximum-likelihood index detector, plus OFDM-IM and
//!   plain DFT-s-OFDM-IM baselines.
//! - [`channel`]: AWGN, tapped-delay-line Rayleigh block fading and SNR
//!   bookkeeping.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod channel;
pub mod chirp;
pub mod codec;
mod error;
pub mod fft;
pub mod modem;
pub mod sequences;
pub mod special;

pub use error::{Error, Result};
pub use num_complex::Complex64;
