//! Planned complex FFTs of arbitrary length.
//!
//! Power-of-two sizes use an iterative radix-2 kernel; every other size goes
//! through Bluestein's chirp-z identity on top of a power-of-two plan. Both
//! directions are unnormalised:
//! `forward: X_k = Σ x_n e^{-j2πkn/N}`, `inverse: x_n = Σ X_k e^{+j2πkn/N}`.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

fn unit(angle: f64) -> Complex64 {
    Complex64::new(libm::cos(angle), libm::sin(angle))
}

#[derive(Debug, Clone)]
pub struct Fft {
    len: usize,
    kernel: Kernel,
}

#[derive(Debug, Clone)]
enum Kernel {
    Trivial,
    Radix2 { twiddles: Vec<Complex64> },
    Bluestein(Box<Bluestein>),
}

#[derive(Debug, Clone)]
struct Bluestein {
    inner: Fft,
    /// e^{-jπn²/N}
    chirp: Vec<Complex64>,
    /// Forward transform of the conjugate chirp, wrapped onto the inner size.
    kernel_spectrum: Vec<Complex64>,
}

impl Fft {
    pub fn new(len: usize) -> Self {
        assert!(len > 0, "FFT length must be positive");
        let kernel = if len == 1 {
            Kernel::Trivial
        } else if len.is_power_of_two() {
            let twiddles = (0..len / 2)
                .map(|k| unit(-2.0 * PI * k as f64 / len as f64))
                .collect();
            Kernel::Radix2 { twiddles }
        } else {
            Kernel::Bluestein(Box::new(Bluestein::new(len)))
        };
        Fft { len, kernel }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn forward(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.len, "buffer length does not match plan");
        match &self.kernel {
            Kernel::Trivial => {}
            Kernel::Radix2 { twiddles } => radix2(buf, twiddles),
            Kernel::Bluestein(b) => b.process(buf),
        }
    }

    pub fn inverse(&self, buf: &mut [Complex64]) {
        for v in buf.iter_mut() {
            *v = v.conj();
        }
        self.forward(buf);
        for v in buf.iter_mut() {
            *v = v.conj();
        }
    }
}

fn radix2(buf: &mut [Complex64], twiddles: &[Complex64]) {
    let n = buf.len();
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
    let mut half = 1;
    while half < n {
        let stride = n / (2 * half);
        for start in (0..n).step_by(2 * half) {
            for k in 0..half {
                let w = twiddles[k * stride];
                let a = buf[start + k];
                let b = buf[start + k + half] * w;
                buf[start + k] = a + b;
                buf[start + k + half] = a - b;
            }
        }
        half *= 2;
    }
}

impl Bluestein {
    fn new(len: usize) -> Self {
        let inner_len = (2 * len - 1).next_power_of_two();
        let inner = Fft::new(inner_len);
        // n² mod 2N keeps the angle small so the chirp stays accurate for large n.
        let modulus = 2 * len as u128;
        let chirp: Vec<Complex64> = (0..len)
            .map(|n| {
                let sq = (n as u128 * n as u128) % modulus;
                unit(-PI * sq as f64 / len as f64)
            })
            .collect();
        let mut kernel_spectrum = vec![Complex64::new(0.0, 0.0); inner_len];
        kernel_spectrum[0] = chirp[0].conj();
        for n in 1..len {
            let c = chirp[n].conj();
            kernel_spectrum[n] = c;
            kernel_spectrum[inner_len - n] = c;
        }
        inner.forward(&mut kernel_spectrum);
        Bluestein {
            inner,
            chirp,
            kernel_spectrum,
        }
    }

    fn process(&self, buf: &mut [Complex64]) {
        let m = self.inner.len();
        let mut work = vec![Complex64::new(0.0, 0.0); m];
        for ((w, x), c) in work.iter_mut().zip(buf.iter()).zip(&self.chirp) {
            *w = x * c;
        }
        self.inner.forward(&mut work);
        for (w, k) in work.iter_mut().zip(&self.kernel_spectrum) {
            *w *= k;
        }
        self.inner.inverse(&mut work);
        let scale = 1.0 / m as f64;
        for ((out, w), c) in buf.iter_mut().zip(&work).zip(&self.chirp) {
            *out = w * c * scale;
        }
    }
}
