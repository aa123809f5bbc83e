//! Complementary sequences built from chirp spectra, and the envelope of the
//! OFDM symbol `p_a(z) = Σ a_i z^i`, `z = e^{j2πt/Ts}`, that carries them.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::chirp::FdssSequence;
use crate::codec::binomial;
use crate::fft::Fft;
use crate::{Error, Result};

/// Oversampling used when none is specified.
pub const DEFAULT_OVERSAMPLING: usize = 8;
/// Smallest oversampling accepted for PMEPR measurements.
pub const MIN_PMEPR_OVERSAMPLING: usize = 4;
/// GCP tolerance for pairs derived from truncated chirp spectra.
pub const CHIRP_GCP_TOLERANCE: f64 = 1e-2;
/// GCP tolerance for pairs that are complementary in exact arithmetic.
pub const EXACT_GCP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSequence(Vec<Complex64>);

impl ComplexSequence {
    pub fn new(elems: Vec<Complex64>) -> Result<Self> {
        if elems.is_empty() {
            return Err(Error::Empty);
        }
        if elems.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite("sequence element"));
        }
        Ok(ComplexSequence(elems))
    }

    /// FDSS coefficients re-indexed from `k = L_d..` to `0..M`. APAC and
    /// envelope magnitude are invariant under that shift.
    pub fn from_fdss(fdss: &FdssSequence) -> Self {
        ComplexSequence(fdss.coeffs().to_vec())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.0
    }

    /// `ρ_a(0) = Σ|a_i|²`.
    pub fn energy(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `p_a(e^{j2πq/Q})` for `q = 0..Q`, `Q = oversampling · len`.
    pub fn evaluate(&self, oversampling: usize) -> Vec<Complex64> {
        Envelope::new(self.len(), oversampling).evaluate(&self.0)
    }
}

/// Reusable plan for oversampled envelope evaluation of length-`len`
/// sequences. Cheaper than [`ComplexSequence::evaluate`] in loops.
#[derive(Debug, Clone)]
pub struct Envelope {
    len: usize,
    plan: Fft,
}

impl Envelope {
    pub fn new(len: usize, oversampling: usize) -> Self {
        assert!(len > 0 && oversampling > 0);
        Envelope {
            len,
            plan: Fft::new(len * oversampling),
        }
    }

    pub fn points(&self) -> usize {
        self.plan.len()
    }

    pub fn evaluate(&self, seq: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(seq.len(), self.len, "sequence length does not match plan");
        let mut buf = vec![Complex64::new(0.0, 0.0); self.plan.len()];
        buf[..seq.len()].copy_from_slice(seq);
        self.plan.inverse(&mut buf);
        buf
    }

    /// `|p_a|²` on the grid.
    pub fn power(&self, seq: &[Complex64]) -> Vec<f64> {
        self.evaluate(seq)
            .into_iter()
            .map(|v| v.norm_sqr())
            .collect()
    }

    /// `max |p_a|² / reference` in dB.
    pub fn pmepr_db(&self, seq: &[Complex64], reference: f64) -> f64 {
        let peak = self.power(seq).into_iter().fold(0.0, f64::max);
        10.0 * libm::log10(peak / reference)
    }
}

/// `ρ_a(k) = Σ_i a_{i+k} a_i^*`, defined for `|k| < M`.
pub fn apac(a: &ComplexSequence, lag: i64) -> Result<Complex64> {
    let m = a.len();
    if lag.unsigned_abs() as usize >= m {
        return Err(Error::LagOutOfRange { lag, len: m });
    }
    let s = &a.0;
    let shift = lag.unsigned_abs() as usize;
    let sum: Complex64 = (0..m - shift).map(|i| s[i + shift] * s[i].conj()).sum();
    Ok(if lag >= 0 { sum } else { sum.conj() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GcpVerdict {
    pub is_gcp: bool,
    /// `max_{k≠0} |ρ_a(k)+ρ_b(k)| / (ρ_a(0)+ρ_b(0))`.
    pub max_residual: f64,
    /// Same maximum without normalisation.
    pub max_raw_residual: f64,
    /// `ρ_a(0)+ρ_b(0)`, the bound on either envelope's peak power.
    pub peak_bound: f64,
    /// `max_t ||p_a|²+|p_b|² - peak_bound| / peak_bound` on an oversampled
    /// unit-circle grid.
    pub spectral_ripple: f64,
}

/// Tests whether `(a, b)` is a Golay complementary pair: lag residuals must
/// stay within `tol`. The unit-circle ripple is reported alongside; it is
/// bounded below by the lag residual and above by `2(M-1)` times it.
pub fn is_gcp(a: &ComplexSequence, b: &ComplexSequence, tol: f64) -> Result<GcpVerdict> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let m = a.len() as i64;
    let peak_bound = a.energy() + b.energy();
    if peak_bound <= 0.0 {
        return Err(Error::ZeroSequence);
    }
    let mut raw = 0.0f64;
    for k in 1..m {
        let r = apac(a, k)? + apac(b, k)?;
        raw = raw.max(r.norm());
    }
    let env = Envelope::new(a.len(), DEFAULT_OVERSAMPLING);
    let pa = env.power(&a.0);
    let pb = env.power(&b.0);
    let ripple = pa
        .iter()
        .zip(&pb)
        .map(|(x, y)| (x + y - peak_bound).abs())
        .fold(0.0, f64::max)
        / peak_bound;
    let max_residual = raw / peak_bound;
    Ok(GcpVerdict {
        is_gcp: max_residual <= tol,
        max_residual,
        max_raw_residual: raw,
        peak_bound,
        spectral_ripple: ripple,
    })
}

fn check_unimodular(c: Complex64, name: &'static str) -> Result<()> {
    if (c.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::NotUnimodular(name));
    }
    Ok(())
}

/// Fourier coefficients of `c_m·chirp(t - τ_m) ± c_n·chirp(t - τ_n)` over the
/// FDSS band. Shifts are fractions of the symbol duration.
///
/// Equal shifts are accepted: the pair degenerates to `(2·chirp, 0)` when
/// `c_m = c_n`.
pub fn synth_cs_pair(
    fdss: &FdssSequence,
    shift_m: f64,
    shift_n: f64,
    c_m: Complex64,
    c_n: Complex64,
) -> Result<(ComplexSequence, ComplexSequence)> {
    if fdss.is_empty() {
        return Err(Error::Empty);
    }
    if !shift_m.is_finite() || !shift_n.is_finite() {
        return Err(Error::NonFinite("shift"));
    }
    check_unimodular(c_m, "c_m")?;
    check_unimodular(c_n, "c_n")?;
    let (a, b): (Vec<_>, Vec<_>) = fdss
        .iter()
        .map(|(k, g)| {
            let rot = |shift: f64| {
                let angle = -2.0 * PI * k as f64 * shift;
                Complex64::new(libm::cos(angle), libm::sin(angle))
            };
            let x = c_m * g * rot(shift_m);
            let y = c_n * g * rot(shift_n);
            (x + y, x - y)
        })
        .unzip();
    Ok((ComplexSequence(a), ComplexSequence(b)))
}

/// Peak instantaneous power `max_t |p_a|²` on an `oversampling·M` grid.
pub fn peak_power(a: &ComplexSequence, oversampling: usize) -> Result<f64> {
    if oversampling < MIN_PMEPR_OVERSAMPLING {
        return Err(Error::Oversampling {
            got: oversampling,
            min: MIN_PMEPR_OVERSAMPLING,
        });
    }
    Ok(Envelope::new(a.len(), oversampling)
        .power(&a.0)
        .into_iter()
        .fold(0.0, f64::max))
}

/// PMEPR in dB with the mean taken as the time average of the envelope,
/// which equals `ρ_a(0)`.
pub fn pmepr(a: &ComplexSequence, oversampling: usize) -> Result<f64> {
    pmepr_with_reference(a, oversampling, a.energy())
}

/// PMEPR in dB against an externally supplied average power, e.g. the
/// ensemble-average power of a modulation scheme.
pub fn pmepr_with_reference(
    a: &ComplexSequence,
    oversampling: usize,
    mean_power: f64,
) -> Result<f64> {
    if a.energy() <= 0.0 {
        return Err(Error::ZeroSequence);
    }
    if !(mean_power > 0.0) || !mean_power.is_finite() {
        return Err(Error::NonFinite("reference power"));
    }
    let peak = peak_power(a, oversampling)?;
    Ok(10.0 * libm::log10(peak / mean_power))
}

/// Number of distinct complementary sequences of length `m` from pairs of
/// distinct chirps with `h`-PSK coefficients: `C(m, 2)·h²`.
pub fn count_cs(m: usize, h: usize) -> Result<u128> {
    if m < 2 {
        return Err(Error::BadLayout("need at least two chirps"));
    }
    if h < 1 {
        return Err(Error::BadLayout("PSK order must be positive"));
    }
    Ok(binomial(m, 2) * (h as u128) * (h as u128))
}
