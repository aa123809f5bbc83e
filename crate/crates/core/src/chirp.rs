//! Fourier series of band-limited unit-modulus chirps.
//!
//! A chirp `e^{jφ(t)}` of duration `Ts` is described by its kind and the
//! deviation parameter `D`: the instantaneous frequency stays within
//! `±D/(2Ts)` Hz, so the Fourier coefficients `G_k` are concentrated on
//! `|k| <= D/2`. The coefficients double as the FDSS weights of the
//! DFT-spread OFDM transmitter in [`crate::modem`].
//!
//! Phases are written in normalised time `τ = t/Ts ∈ [0, 1)`:
//!
//! ```text
//! linear:      φ(τ) = πD (τ - 1/2)²         f(t) = D/(2Ts) (2t/Ts - 1)
//! sinusoidal:  φ(τ) = (D/2) sin(2πτ)        f(t) = D/(2Ts) cos(2πt/Ts)
//! ```

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::special::{bessel_j_orders, fresnel};
use crate::{Error, Result};

/// Smallest sample count accepted by [`numeric_coeff`].
pub const MIN_NUMERIC_SAMPLES: usize = 16;

/// Extra coefficients evaluated on each side of `±D/2` when measuring the
/// occupied bandwidth of a chirp.
const OCB_GRID_MARGIN: i64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChirpKind {
    Linear,
    Sinusoidal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChirpSpec {
    kind: ChirpKind,
    deviation: f64,
    symbol_duration: f64,
}

impl ChirpSpec {
    pub fn new(kind: ChirpKind, deviation: f64, symbol_duration: f64) -> Result<Self> {
        if !deviation.is_finite() || deviation <= 0.0 {
            return Err(Error::BadDeviation(deviation));
        }
        if !symbol_duration.is_finite() || symbol_duration <= 0.0 {
            return Err(Error::NonFinite("symbol duration"));
        }
        Ok(ChirpSpec {
            kind,
            deviation,
            symbol_duration,
        })
    }

    pub fn kind(&self) -> ChirpKind {
        self.kind
    }

    /// `D`, in cycles per symbol.
    pub fn deviation(&self) -> f64 {
        self.deviation
    }

    pub fn symbol_duration(&self) -> f64 {
        self.symbol_duration
    }

    /// Phase at normalised time `tau` (radians).
    pub fn phase(&self, tau: f64) -> f64 {
        chirp_phase(self.kind, self.deviation, tau)
    }

    /// Instantaneous frequency in Hz at time `t` seconds into the symbol.
    pub fn instantaneous_frequency(&self, t: f64) -> f64 {
        let tau = t / self.symbol_duration;
        let peak = self.deviation / (2.0 * self.symbol_duration);
        match self.kind {
            ChirpKind::Linear => peak * (2.0 * tau - 1.0),
            ChirpKind::Sinusoidal => peak * libm::cos(2.0 * PI * tau),
        }
    }

    /// Closed-form Fourier coefficient `G_k`.
    pub fn coeff(&self, k: i64) -> Complex64 {
        match self.kind {
            ChirpKind::Linear => linear_coeff_unchecked(k, self.deviation),
            ChirpKind::Sinusoidal => {
                let order = k.unsigned_abs() as usize;
                let j =
                    bessel_j_orders(order, self.deviation / 2.0).expect("finite argument")[order];
                let odd = k < 0 && order % 2 == 1;
                Complex64::new(if odd { -j } else { j }, 0.0)
            }
        }
    }

    /// `M_ocb`: the number of subcarriers holding `fraction` of the chirp's
    /// power, measured on a grid reaching 64 coefficients past `±D/2`.
    pub fn occupied_bandwidth(&self, fraction: f64) -> Result<usize> {
        let half = libm::ceil(self.deviation / 2.0) as i64 + OCB_GRID_MARGIN;
        let wide = fdss_unchecked(self, -half, half);
        ocb(&wide, fraction)
    }
}

fn chirp_phase(kind: ChirpKind, deviation: f64, tau: f64) -> f64 {
    match kind {
        ChirpKind::Linear => {
            let u = tau - 0.5;
            PI * deviation * u * u
        }
        ChirpKind::Sinusoidal => 0.5 * deviation * libm::sin(2.0 * PI * tau),
    }
}

/// `G_k` of the linear chirp:
/// `γ_k (C(α_k) + C(β_k) + j S(α_k) + j S(β_k))`.
pub fn linear_chirp_coeff(k: i64, deviation: f64) -> Result<Complex64> {
    if !deviation.is_finite() || deviation <= 0.0 {
        return Err(Error::BadDeviation(deviation));
    }
    Ok(linear_coeff_unchecked(k, deviation))
}

fn linear_coeff_unchecked(k: i64, deviation: f64) -> Complex64 {
    // The classic expression is written for the phase curvature in radians
    // per symbol; D counts cycles, hence the 2π.
    let curvature = 2.0 * PI * deviation;
    let two_pi_k = 2.0 * PI * k as f64;
    let root = libm::sqrt(PI * curvature);
    let alpha = (curvature / 2.0 + two_pi_k) / root;
    let beta = (curvature / 2.0 - two_pi_k) / root;
    let (ca, sa) = fresnel(alpha).expect("finite argument");
    let (cb, sb) = fresnel(beta).expect("finite argument");
    let angle = -(two_pi_k * two_pi_k) / (2.0 * curvature);
    let parity = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let gamma =
        Complex64::new(libm::cos(angle), libm::sin(angle)) * (parity * libm::sqrt(PI / curvature));
    gamma * Complex64::new(ca + cb, sa + sb)
}

/// `G_k = J_k(D/2)` of the sinusoidal chirp.
pub fn sinusoidal_chirp_coeff(k: i64, deviation: f64) -> Result<f64> {
    if !deviation.is_finite() || deviation <= 0.0 {
        return Err(Error::BadDeviation(deviation));
    }
    crate::special::bessel_j(k, deviation / 2.0)
}

/// Discrete approximation of the `k`-th Fourier coefficient of `e^{jφ(τ)}`
/// from `samples` equispaced points over one period:
/// `(1/P) Σ_p e^{jφ(p/P)} e^{-j2πkp/P}`.
///
/// `phase` takes normalised time in `[0, 1)`. Aliasing is the caller's
/// responsibility beyond the enforced floor of [`MIN_NUMERIC_SAMPLES`] and
/// `P > 2|k|`; [`numeric_chirp_coeff`] adds the `16·D` floor for chirps.
pub fn numeric_coeff<F>(phase: F, k: i64, samples: usize) -> Result<Complex64>
where
    F: Fn(f64) -> f64,
{
    let floor = MIN_NUMERIC_SAMPLES.max(2 * k.unsigned_abs() as usize + 1);
    if samples < floor {
        return Err(Error::Oversampling {
            got: samples,
            min: floor,
        });
    }
    let p = samples as f64;
    let k_mod = k.rem_euclid(samples as i64) as u128;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..samples {
        let tau = i as f64 / p;
        // exact integer reduction of k·i mod P keeps the kernel angle small
        let wrapped = (k_mod * i as u128 % samples as u128) as f64;
        let angle = phase(tau) - 2.0 * PI * wrapped / p;
        acc += Complex64::new(libm::cos(angle), libm::sin(angle));
    }
    Ok(acc / p)
}

/// [`numeric_coeff`] for a chirp, requiring at least `16·D` samples.
pub fn numeric_chirp_coeff(spec: &ChirpSpec, k: i64, samples: usize) -> Result<Complex64> {
    let floor = (16.0 * libm::ceil(spec.deviation)) as usize;
    if samples < floor {
        return Err(Error::Oversampling {
            got: samples,
            min: floor,
        });
    }
    let (kind, deviation) = (spec.kind, spec.deviation);
    numeric_coeff(|tau| chirp_phase(kind, deviation, tau), k, samples)
}

/// FDSS weights `G_k` for `k = L_d ..= L_u`.
#[derive(Debug, Clone, PartialEq)]
pub struct FdssSequence {
    ld: i64,
    coeffs: Vec<Complex64>,
}

impl FdssSequence {
    /// Wraps explicit coefficients for `k = ld, ld+1, ...`.
    pub fn from_coeffs(ld: i64, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Empty);
        }
        let lu = ld + coeffs.len() as i64 - 1;
        if ld >= 0 || lu <= 0 {
            return Err(Error::BadBand { ld, lu });
        }
        if coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::NonFinite("FDSS coefficient"));
        }
        Ok(FdssSequence { ld, coeffs })
    }

    /// All-ones shaping over the default band of width `m`; this is plain
    /// DFT-s-OFDM.
    pub fn flat(m: usize) -> Result<Self> {
        let (ld, _) = default_band(m)?;
        Self::from_coeffs(ld, alloc::vec![Complex64::new(1.0, 0.0); m])
    }

    pub fn ld(&self) -> i64 {
        self.ld
    }

    pub fn lu(&self) -> i64 {
        self.ld + self.coeffs.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficients in ascending `k`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `G_k`, zero outside the band.
    pub fn get(&self, k: i64) -> Complex64 {
        let i = k - self.ld;
        if i < 0 || i >= self.coeffs.len() as i64 {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[i as usize]
        }
    }

    /// `(k, G_k)` pairs in ascending `k`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &g)| (self.ld + i as i64, g))
    }

    /// `Σ |G_k|²`.
    pub fn power(&self) -> f64 {
        self.coeffs.iter().map(|g| g.norm_sqr()).sum()
    }
}

/// `(L_d, L_u)` for a band of `m` subcarriers: `L_u = ⌊m/2⌋`,
/// `L_d = L_u - m + 1` (so `m = 24` gives `-11..=12`).
pub fn default_band(m: usize) -> Result<(i64, i64)> {
    if m < 2 {
        return Err(Error::BadBand {
            ld: 0,
            lu: m as i64 - 1,
        });
    }
    let lu = (m / 2) as i64;
    Ok((lu - m as i64 + 1, lu))
}

/// Reported by [`make_fdss`] when the band is narrower than the chirp's 99%
/// occupied bandwidth. The sequence is still usable, just truncated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Truncation {
    pub occupied: usize,
    pub available: usize,
}

impl core::fmt::Display for Truncation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "band of {} subcarriers truncates a chirp occupying {} (99% power)",
            self.available, self.occupied
        )
    }
}

/// Fills `G_k`, `k = ld ..= lu`, from the closed form for `spec.kind()`.
pub fn make_fdss(spec: &ChirpSpec, ld: i64, lu: i64) -> Result<(FdssSequence, Option<Truncation>)> {
    if ld >= 0 || lu <= 0 {
        return Err(Error::BadBand { ld, lu });
    }
    let fdss = fdss_unchecked(spec, ld, lu);
    let occupied = spec.occupied_bandwidth(0.99)?;
    let available = fdss.len();
    let warning = (available < occupied).then_some(Truncation {
        occupied,
        available,
    });
    Ok((fdss, warning))
}

fn fdss_unchecked(spec: &ChirpSpec, ld: i64, lu: i64) -> FdssSequence {
    let coeffs = match spec.kind {
        ChirpKind::Linear => (ld..=lu)
            .map(|k| linear_coeff_unchecked(k, spec.deviation))
            .collect(),
        ChirpKind::Sinusoidal => {
            let top = ld.unsigned_abs().max(lu.unsigned_abs()) as usize;
            let j = bessel_j_orders(top, spec.deviation / 2.0).expect("finite argument");
            (ld..=lu)
                .map(|k| {
                    let v = j[k.unsigned_abs() as usize];
                    let odd_negative = k < 0 && k % 2 != 0;
                    Complex64::new(if odd_negative { -v } else { v }, 0.0)
                })
                .collect()
        }
    };
    FdssSequence { ld, coeffs }
}

/// Occupied bandwidth in subcarriers: starting from the coefficient nearest
/// the power centroid, grow a contiguous window one coefficient at a time
/// toward the stronger neighbour (ties go to the lower side) until it holds
/// `fraction` of `Σ|G_k|²`.
pub fn ocb(fdss: &FdssSequence, fraction: f64) -> Result<usize> {
    if fdss.is_empty() {
        return Err(Error::Empty);
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::BadFraction(fraction));
    }
    let power: Vec<f64> = fdss.coeffs.iter().map(|g| g.norm_sqr()).collect();
    let total: f64 = power.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroSequence);
    }
    let centroid = power
        .iter()
        .enumerate()
        .map(|(i, p)| i as f64 * p)
        .sum::<f64>()
        / total;
    let centre = (libm::round(centroid) as usize).min(power.len() - 1);
    let target = fraction * total * (1.0 - 1e-12);
    let (mut lo, mut hi) = (centre, centre);
    let mut held = power[centre];
    while held < target {
        let below = lo.checked_sub(1).map(|i| power[i]);
        let above = power.get(hi + 1).copied();
        match (below, above) {
            (None, None) => break,
            (Some(b), Some(a)) if a > b => {
                hi += 1;
                held += a;
            }
            (Some(b), _) => {
                lo -= 1;
                held += b;
            }
            (None, Some(a)) => {
                hi += 1;
                held += a;
            }
        }
    }
    Ok(hi - lo + 1)
}
