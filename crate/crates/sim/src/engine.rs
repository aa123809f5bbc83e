//! Monte Carlo engine: error-rate sweeps and PMEPR distributions.
//!
//! Every frame owns three random streams derived from the master seed,
//! `ChaCha8(seed)` with stream id `point << 44 | trial << 4 | tag`
//! (tag 0 payload bits, 1 channel draw, 2 noise). Frames run in batches of
//! `batch_frames`; counters are reduced in trial order and the stopping rule
//! is evaluated after each batch, so results do not depend on the number of
//! worker threads.

use std::time::Instant;

use chirpim_core::channel::{
    apply, awgn, draw_tdl, ebn0_from_snr, snr_from_ebn0, snr_to_noisevar, TdlProfile,
};
use chirpim_core::codec::{decode, encode, PayloadLayout};
use chirpim_core::modem::Modem;
use chirpim_core::sequences::{ComplexSequence, Envelope};
use chirpim_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Axis, LinkConfig};
use crate::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamTag {
    Bits = 0,
    Channel = 1,
    Noise = 2,
}

/// Independent generator for one (point, trial, purpose).
pub fn stream(master_seed: u64, point: u64, trial: u64, tag: StreamTag) -> ChaCha8Rng {
    assert!(
        point < 1 << 20 && trial < 1 << 40,
        "stream index out of range"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(point << 44 | trial << 4 | tag as u64);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub snr_db: f64,
    pub ebn0_db: f64,
    pub frames: u64,
    pub bits: u64,
    pub frame_errors: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub bler: f64,
    /// Measured mean body power of the transmitted frames.
    pub mean_body_power: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_seconds: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    frames: u64,
    frame_errors: u64,
    bit_errors: u64,
    power: f64,
}

impl Tally {
    fn add(&mut self, o: Tally) {
        self.frames += o.frames;
        self.frame_errors += o.frame_errors;
        self.bit_errors += o.bit_errors;
        self.power += o.power;
    }
}

/// A validated configuration with its transceiver and channel model.
pub struct Link {
    pub config: LinkConfig,
    pub layout: PayloadLayout,
    pub modem: Modem,
    pub profile: Option<TdlProfile>,
    flat: Vec<Complex64>,
}

impl Link {
    pub fn new(config: &LinkConfig) -> Result<Self, SimError> {
        let modem = config.build_modem()?;
        let layout = config.layout()?;
        let profile = config.tdl_profile()?;
        if let Some(p) = &profile {
            let memory = p.memory(config.sample_rate());
            if memory > config.n_cp {
                log::warn!(
                    "channel memory {memory} samples exceeds the {}-sample cyclic prefix; inter-symbol interference is simulated",
                    config.n_cp
                );
            }
        }
        Ok(Link {
            config: config.clone(),
            layout,
            modem,
            profile,
            flat: vec![Complex64::new(1.0, 0.0); config.n],
        })
    }

    pub fn bits_per_frame(&self) -> usize {
        self.layout.total_bits()
    }

    /// `(snr_db, ebn0_db)` for a grid value under the configured axis.
    pub fn operating_point(&self, value: f64, axis: Axis) -> (f64, f64) {
        let (s, n) = (self.bits_per_frame(), self.config.n);
        match axis {
            Axis::Snr => (value, ebn0_from_snr(value, s, n)),
            Axis::Ebn0 => (snr_from_ebn0(value, s, n), value),
        }
    }

    pub fn random_bits(&self, rng: &mut ChaCha8Rng) -> Vec<bool> {
        (0..self.bits_per_frame())
            .map(|_| rng.random::<bool>())
            .collect()
    }

    fn run_frame(&self, point: u64, trial: u64, noise_var: f64) -> Result<Tally, SimError> {
        let seed = self.config.master_seed;
        let bits = self.random_bits(&mut stream(seed, point, trial, StreamTag::Bits));
        let frame = encode(&bits, &self.layout)?;
        let tx = self.modem.tx(&frame)?;
        let power = tx.mean_body_power();
        let (mut rx, response) = match &self.profile {
            Some(p) => {
                let mut rng = stream(seed, point, trial, StreamTag::Channel);
                let chan = draw_tdl(p, self.config.sample_rate(), self.config.n, &mut rng)?;
                (apply(&chan, &tx), chan.freq_response().to_vec())
            }
            None => (tx, self.flat.clone()),
        };
        awgn(
            rx.samples_mut(),
            noise_var,
            &mut stream(seed, point, trial, StreamTag::Noise),
        )?;
        let detected = self
            .modem
            .receive(&rx, &response, noise_var, self.config.h)?;
        let out = decode(&detected, &self.layout)?;
        let bit_errors = out.iter().zip(&bits).filter(|(a, b)| a != b).count() as u64;
        Ok(Tally {
            frames: 1,
            frame_errors: (bit_errors > 0) as u64,
            bit_errors,
            power,
        })
    }

    /// Simulates one grid point until `target_errors` frame errors or
    /// `max_frames` frames.
    pub fn run_point(&self, point: u64, value: f64, axis: Axis) -> Result<CurvePoint, SimError> {
        let start = Instant::now();
        let (snr_db, ebn0_db) = self.operating_point(value, axis);
        let noise_var = snr_to_noisevar(snr_db);
        let cfg = &self.config;
        let mut total = Tally::default();
        let mut next = 0u64;
        while next < cfg.max_frames && total.frame_errors < cfg.target_errors {
            let end = (next + cfg.batch_frames).min(cfg.max_frames);
            let results: Vec<Result<Tally, SimError>> = (next..end)
                .into_par_iter()
                .map(|trial| self.run_frame(point, trial, noise_var))
                .collect();
            for r in results {
                total.add(r?);
            }
            next = end;
        }
        let bits = total.frames * self.bits_per_frame() as u64;
        let ratio = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        Ok(CurvePoint {
            snr_db,
            ebn0_db,
            frames: total.frames,
            bits,
            frame_errors: total.frame_errors,
            bit_errors: total.bit_errors,
            ber: ratio(total.bit_errors, bits),
            bler: ratio(total.frame_errors, total.frames),
            mean_body_power: if total.frames == 0 {
                0.0
            } else {
                total.power / total.frames as f64
            },
            wall_seconds: Some(start.elapsed().as_secs_f64()),
        })
    }
}

/// Runs the configured grid on a pool of `workers` threads (0 = all cores).
pub fn run_ber(config: &LinkConfig, workers: usize) -> Result<Vec<CurvePoint>, SimError> {
    let link = Link::new(config)?;
    let axis = config.axis.unwrap_or(Axis::Snr);
    with_pool(workers, || {
        config
            .snr_grid_db
            .iter()
            .enumerate()
            .map(|(i, &v)| link.run_point(i as u64, v, axis))
            .collect::<Result<Vec<_>, _>>()
    })?
}

pub fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T, SimError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| SimError::Validation(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ccdf {
    /// Per-frame PMEPR in dB, ascending.
    pub samples: Vec<f64>,
}

impl Ccdf {
    pub fn max(&self) -> f64 {
        *self.samples.last().unwrap_or(&f64::NAN)
    }

    pub fn median(&self) -> f64 {
        let n = self.samples.len();
        if n == 0 {
            return f64::NAN;
        }
        if n % 2 == 1 {
            self.samples[n / 2]
        } else {
            0.5 * (self.samples[n / 2 - 1] + self.samples[n / 2])
        }
    }

    /// `P(PMEPR > x)` at each distinct sample value.
    pub fn table(&self) -> Vec<(f64, f64)> {
        let n = self.samples.len() as f64;
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (i, &x) in self.samples.iter().enumerate() {
            let above = (self.samples.len() - 1 - i) as f64 / n;
            match out.last_mut() {
                Some(last) if last.0 == x => last.1 = above,
                _ => out.push((x, above)),
            }
        }
        out
    }
}

/// PMEPR of one frame's occupied-band sequence against the scheme's
/// ensemble-average power.
pub fn frame_pmepr(link: &Link, env: &Envelope, bits: &[bool]) -> Result<f64, SimError> {
    let frame = encode(bits, &link.layout)?;
    let band = link.modem.occupied_band(&frame)?;
    let seq = ComplexSequence::new(band)?;
    Ok(env.pmepr_db(seq.as_slice(), link.modem.nominal_power()))
}

/// Empirical PMEPR distribution over `frames` random frames (stream point 0).
pub fn run_pmepr(
    config: &LinkConfig,
    frames: u64,
    oversampling: usize,
    workers: usize,
) -> Result<Ccdf, SimError> {
    if frames == 0 {
        return Err(SimError::Validation("need at least one frame".into()));
    }
    let mut cfg = config.clone();
    cfg.oversampling = oversampling;
    let link = Link::new(&cfg)?;
    let env = Envelope::new(cfg.m, oversampling);
    let mut samples = with_pool(workers, || {
        (0..frames)
            .into_par_iter()
            .map(|t| {
                let bits = link.random_bits(&mut stream(cfg.master_seed, 0, t, StreamTag::Bits));
                frame_pmepr(&link, &env, &bits)
            })
            .collect::<Result<Vec<f64>, SimError>>()
    })??;
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(SimError::Numerical("non-finite PMEPR".into()));
    }
    samples.sort_by(f64::total_cmp);
    Ok(Ccdf { samples })
}

/// `|s(t)|²` over one symbol relative to the ensemble-average power, on an
/// `oversampling·M` grid, for the frame carrying `bits`.
pub fn temporal(link: &Link, bits: &[bool], oversampling: usize) -> Result<Vec<f64>, SimError> {
    let frame = encode(bits, &link.layout)?;
    let band = link.modem.occupied_band(&frame)?;
    let nominal = link.modem.nominal_power();
    Ok(Envelope::new(band.len(), oversampling)
        .power(&band)
        .into_iter()
        .map(|p| p / nominal)
        .collect())
}
