//! Experiment description and its validation.
//!
//! A [`LinkConfig`] is read from JSON; every field has a default, unknown
//! keys are rejected. Command-line flags override file values, and the
//! master seed resolves as `--seed` > `SIM_SEED` > file > default.

use std::fmt;

use chirpim_core::channel::TdlProfile;
use chirpim_core::chirp::{default_band, make_fdss, ChirpKind, ChirpSpec};
use chirpim_core::codec::PayloadLayout;
use chirpim_core::modem::Modem;
use serde::{Deserialize, Serialize};

use crate::SimError;

pub const SEED_ENV: &str = "SIM_SEED";
pub const DEFAULT_SEED: u64 = 1;
/// Fraction of spectral power defining the occupied bandwidth.
pub const OCB_FRACTION: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "ChirpIM-Sinusoidal", alias = "chirp-im-sinusoidal")]
    ChirpImSinusoidal,
    #[serde(rename = "ChirpIM-Linear", alias = "chirp-im-linear")]
    ChirpImLinear,
    #[serde(rename = "DftsOfdmIM", alias = "dfts-ofdm-im")]
    DftsOfdmIm,
    #[serde(rename = "OfdmIM", alias = "ofdm-im")]
    OfdmIm,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::ChirpImLinear,
        Scheme::ChirpImSinusoidal,
        Scheme::DftsOfdmIm,
        Scheme::OfdmIm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::ChirpImSinusoidal => "ChirpIM-Sinusoidal",
            Scheme::ChirpImLinear => "ChirpIM-Linear",
            Scheme::DftsOfdmIm => "DftsOfdmIM",
            Scheme::OfdmIm => "OfdmIM",
        }
    }

    pub fn chirp_kind(self) -> Option<ChirpKind> {
        match self {
            Scheme::ChirpImSinusoidal => Some(ChirpKind::Sinusoidal),
            Scheme::ChirpImLinear => Some(ChirpKind::Linear),
            _ => None,
        }
    }

    /// Accepts the display name or its kebab-case alias, case-insensitively.
    pub fn parse(s: &str) -> Option<Scheme> {
        let norm = |x: &str| x.replace('-', "").to_ascii_lowercase();
        Scheme::ALL.into_iter().find(|x| norm(x.name()) == norm(s))
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Tapped-delay-line profile: a named standard one or explicit taps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TdlConfig {
    /// `"eva"` or `"flat"`; ignored when explicit taps are given.
    #[serde(default)]
    pub profile: Option<String>,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub delays_ns: Option<Vec<f64>>,
    #[serde(default)]
    pub powers_db: Option<Vec<f64>>,
    /// Drop taps later than the cyclic prefix.
    #[serde(default)]
    pub truncate_to_cp: bool,
}

impl TdlConfig {
    pub fn eva() -> Self {
        TdlConfig {
            profile: Some("eva".into()),
            name: None,
            delays_ns: None,
            powers_db: None,
            truncate_to_cp: false,
        }
    }

    pub fn to_profile(&self, cp_seconds: f64) -> Result<TdlProfile, SimError> {
        let base = match (&self.delays_ns, &self.powers_db) {
            (Some(d), Some(p)) => TdlProfile::new(
                self.name.clone().unwrap_or_else(|| "custom".into()),
                d.iter().map(|ns| ns * 1e-9).collect(),
                p.clone(),
            )
            .map_err(|e| SimError::Validation(format!("channel: {e}")))?,
            (None, None) => match self.profile.as_deref().unwrap_or("eva") {
                "eva" | "EVA" => TdlProfile::eva(),
                "flat" => TdlProfile::flat(),
                other => {
                    return Err(SimError::Validation(format!(
                        "channel: unknown profile `{other}`"
                    )))
                }
            },
            _ => {
                return Err(SimError::Validation(
                    "channel: delays_ns and powers_db must be given together".into(),
                ))
            }
        };
        if self.truncate_to_cp {
            base.truncated(cp_seconds * (1.0 + 1e-9))
                .map_err(|e| SimError::Validation(format!("channel: {e}")))
        } else {
            Ok(base)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelConfig {
    Awgn,
    Tdl(TdlConfig),
}

impl ChannelConfig {
    pub fn label(&self) -> String {
        match self {
            ChannelConfig::Awgn => "AWGN".into(),
            ChannelConfig::Tdl(t) => {
                let base = t
                    .name
                    .clone()
                    .or_else(|| t.delays_ns.as_ref().map(|_| "custom".into()))
                    .or_else(|| t.profile.as_ref().map(|p| p.to_uppercase()))
                    .unwrap_or_else(|| "EVA".into());
                if t.truncate_to_cp {
                    format!("{base}-truncated")
                } else {
                    base
                }
            }
        }
    }
}

/// Quantity on the x axis of an error-rate sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// Per-sample SNR of the unit-power body.
    Snr,
    /// Energy per bit over the body, `Eb/N0 = SNR·N/S`.
    Ebn0,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkConfig {
    pub scheme: Scheme,
    /// Subcarriers in the occupied band (chirp positions).
    pub m: usize,
    /// FFT size.
    pub n: usize,
    /// Cyclic-prefix length in samples.
    pub n_cp: usize,
    /// PSK order.
    pub h: usize,
    /// Active indices per frame.
    pub l: usize,
    /// Chirp deviation in cycles per symbol.
    pub deviation: f64,
    /// Symbol duration in seconds.
    pub ts: f64,
    pub channel: ChannelConfig,
    pub axis: Option<Axis>,
    pub snr_grid_db: Vec<f64>,
    pub max_frames: u64,
    pub target_errors: u64,
    /// Frames per scheduling batch; the stopping rule is checked between
    /// batches, so results depend on this but not on the worker count.
    pub batch_frames: u64,
    pub master_seed: u64,
    pub pmepr_frames: u64,
    pub oversampling: usize,
}

impl Default for LinkConfig {
    fn default() -> Self {
        LinkConfig {
            scheme: Scheme::ChirpImLinear,
            m: 384,
            n: 512,
            n_cp: 72,
            h: 4,
            l: 2,
            deviation: 300.0,
            ts: 16.67e-6,
            channel: ChannelConfig::Awgn,
            axis: None,
            snr_grid_db: vec![2.0, 3.0, 4.0, 5.0],
            max_frames: 100_000,
            target_errors: 200,
            batch_frames: 500,
            master_seed: DEFAULT_SEED,
            pmepr_frames: 10_000,
            oversampling: 8,
        }
    }
}

impl LinkConfig {
    pub fn from_json(text: &str) -> Result<Self, SimError> {
        serde_json::from_str(text).map_err(|e| SimError::Validation(format!("config: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serialises")
    }

    pub fn sample_rate(&self) -> f64 {
        self.n as f64 / self.ts
    }

    pub fn cp_seconds(&self) -> f64 {
        self.n_cp as f64 / self.sample_rate()
    }

    pub fn layout(&self) -> Result<PayloadLayout, SimError> {
        PayloadLayout::new(self.m, self.h, self.l)
            .map_err(|e| SimError::Validation(format!("layout: {e}")))
    }

    /// Checks every invariant and builds the transceiver.
    pub fn build_modem(&self) -> Result<Modem, SimError> {
        let bad = |msg: String| Err(SimError::Validation(msg));
        self.layout()?;
        if self.n < self.m {
            return bad(format!("n = {} must be at least m = {}", self.n, self.m));
        }
        if self.n_cp >= self.n {
            return bad(format!("n_cp = {} must be below n = {}", self.n_cp, self.n));
        }
        if !(self.ts > 0.0) || !self.ts.is_finite() {
            return bad("ts must be positive".into());
        }
        if self.batch_frames == 0 {
            return bad("batch_frames must be positive".into());
        }
        if self.oversampling < chirpim_core::sequences::MIN_PMEPR_OVERSAMPLING {
            return bad(format!(
                "oversampling must be at least {}",
                chirpim_core::sequences::MIN_PMEPR_OVERSAMPLING
            ));
        }
        if self.snr_grid_db.iter().any(|s| !s.is_finite()) {
            return bad("snr grid must be finite".into());
        }
        let v = |e: chirpim_core::Error| SimError::Validation(e.to_string());
        let modem = match self.scheme.chirp_kind() {
            Some(kind) => {
                let spec = ChirpSpec::new(kind, self.deviation, self.ts).map_err(v)?;
                let ocb = spec.occupied_bandwidth(OCB_FRACTION).map_err(v)?;
                if self.m < ocb {
                    return bad(format!(
                        "m = {} is below the chirp's occupied bandwidth {ocb} (deviation {})",
                        self.m, self.deviation
                    ));
                }
                let (ld, lu) = default_band(self.m).map_err(v)?;
                let (fdss, _) = make_fdss(&spec, ld, lu).map_err(v)?;
                Modem::chirp(fdss, self.n, self.n_cp, self.l).map_err(v)?
            }
            None if self.scheme == Scheme::DftsOfdmIm => {
                Modem::dft_spread(self.m, self.n, self.n_cp, self.l).map_err(v)?
            }
            None => Modem::ofdm(self.m, self.n, self.n_cp, self.l).map_err(v)?,
        };
        if let ChannelConfig::Tdl(t) = &self.channel {
            t.to_profile(self.cp_seconds())?;
        }
        Ok(modem)
    }

    pub fn tdl_profile(&self) -> Result<Option<TdlProfile>, SimError> {
        match &self.channel {
            ChannelConfig::Awgn => Ok(None),
            ChannelConfig::Tdl(t) => t.to_profile(self.cp_seconds()).map(Some),
        }
    }
}

/// `--seed` beats `SIM_SEED`, which beats the config file value.
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>, file: u64) -> Result<u64, SimError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Some(text) = env {
        return text.trim().parse().map_err(|_| {
            SimError::Validation(format!("{SEED_ENV} is not an unsigned integer: `{text}`"))
        });
    }
    Ok(file)
}
