//! Command-line verbs. Every verb writes CSV to stdout (or `--output`),
//! preceded by `#` comment lines that echo the inputs.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use chirpim_core::chirp::{default_band, make_fdss, ocb, ChirpKind, ChirpSpec};
use chirpim_core::codec::{tradeoff_table, TRADEOFF_L_RANGE};
use chirpim_core::sequences::{apac, is_gcp, synth_cs_pair};
use chirpim_core::Complex64;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::config::{
    resolve_seed, Axis, ChannelConfig, LinkConfig, Scheme, TdlConfig, OCB_FRACTION, SEED_ENV,
};
use crate::engine::{run_ber, run_pmepr, stream, temporal, Link, StreamTag};
use crate::report::{curve_json, write_ccdf, write_curve, write_rows, Header};
use crate::SimError;

#[derive(Debug, Parser)]
#[command(
    name = "chirpim",
    version,
    about = "Chirp-based index modulation link simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fourier coefficients G_k of a chirp over the occupied band.
    Fdss(FdssArgs),
    /// Complementary-pair check of two shifted chirps, with per-lag APAC.
    GcpCheck(GcpArgs),
    /// Spectral efficiency and PMEPR bound against the number of active indices.
    Tradeoff(TradeoffArgs),
    /// Instantaneous power of one frame for every scheme.
    Temporal(TemporalArgs),
    /// Empirical PMEPR distribution (CCDF).
    Pmepr(PmeprArgs),
    /// Error-rate sweep, x axis Eb/N0 unless the config says otherwise.
    Ber(RunArgs),
    /// Error-rate sweep, x axis SNR unless the config says otherwise.
    Bler(RunArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ChirpArg {
    Linear,
    Sinusoidal,
}

impl From<ChirpArg> for ChirpKind {
    fn from(c: ChirpArg) -> Self {
        match c {
            ChirpArg::Linear => ChirpKind::Linear,
            ChirpArg::Sinusoidal => ChirpKind::Sinusoidal,
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write CSV here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Omit the timestamp comment so repeated runs are byte-identical.
    #[arg(long)]
    pub no_header_time: bool,
}

#[derive(Debug, Args)]
pub struct FdssArgs {
    #[arg(long, value_enum)]
    pub chirp: ChirpArg,
    /// Deviation in cycles per symbol.
    #[arg(long = "D")]
    pub d: f64,
    /// Band size in subcarriers.
    #[arg(long = "M")]
    pub m: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct GcpArgs {
    #[arg(long, value_enum, default_value = "sinusoidal")]
    pub chirp: ChirpArg,
    #[arg(long = "D", default_value_t = 12.0)]
    pub d: f64,
    #[arg(long = "M", default_value_t = 24)]
    pub m: usize,
    /// First shift as a fraction of the symbol duration.
    #[arg(long, default_value_t = 0.0)]
    pub shift_m: f64,
    /// Second shift as a fraction of the symbol duration [default: 1/M].
    #[arg(long)]
    pub shift_n: Option<f64>,
    /// Phase of c_m in degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub cm: f64,
    /// Phase of c_n in degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub cn: f64,
    /// Normalised lag-residual tolerance.
    #[arg(long, default_value_t = chirpim_core::sequences::CHIRP_GCP_TOLERANCE)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TradeoffArgs {
    #[arg(long = "M", default_value_t = 384)]
    pub m: usize,
    #[arg(long = "H", default_value_t = 4)]
    pub h: usize,
    /// Inclusive range `a..b` (or `a..=b`).
    #[arg(long, default_value = "1..11")]
    pub l_range: String,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// JSON experiment file; flags below override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master seed; overrides SIM_SEED and the config file.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads, 0 for one per core. Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[arg(long)]
    pub scheme: Option<String>,
    #[arg(long)]
    pub l: Option<usize>,
    #[arg(long = "D")]
    pub d: Option<f64>,
    /// `awgn`, `eva` or `eva-truncated`.
    #[arg(long)]
    pub channel: Option<String>,
    /// Comma-separated grid in dB.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub grid: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub axis: Option<AxisArg>,
    #[arg(long)]
    pub max_frames: Option<u64>,
    #[arg(long)]
    pub target_errors: Option<u64>,
    /// Also write a JSON mirror with the full config echo.
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PmeprArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    pub frames: Option<u64>,
    #[arg(long)]
    pub oversampling: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TemporalArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    pub oversampling: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AxisArg {
    Snr,
    Ebn0,
}

impl RunArgs {
    /// File, then flags, then seed precedence.
    pub fn resolve(&self, env_seed: Option<&str>) -> Result<LinkConfig, SimError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| SimError::Validation(format!("{}: {e}", path.display())))?;
                LinkConfig::from_json(&text)
                    .map_err(|e| SimError::Validation(format!("{}: {e}", path.display())))?
            }
            None => LinkConfig::default(),
        };
        if let Some(s) = &self.scheme {
            cfg.scheme = Scheme::parse(s)
                .ok_or_else(|| SimError::Validation(format!("unknown scheme `{s}`")))?;
        }
        if let Some(l) = self.l {
            cfg.l = l;
        }
        if let Some(d) = self.d {
            cfg.deviation = d;
        }
        if let Some(c) = &self.channel {
            cfg.channel = match c.as_str() {
                "awgn" => ChannelConfig::Awgn,
                "eva" => ChannelConfig::Tdl(TdlConfig::eva()),
                "eva-truncated" => ChannelConfig::Tdl(TdlConfig {
                    truncate_to_cp: true,
                    ..TdlConfig::eva()
                }),
                other => return Err(SimError::Validation(format!("unknown channel `{other}`"))),
            };
        }
        if let Some(g) = &self.grid {
            cfg.snr_grid_db = g.clone();
        }
        if let Some(a) = self.axis {
            cfg.axis = Some(match a {
                AxisArg::Snr => Axis::Snr,
                AxisArg::Ebn0 => Axis::Ebn0,
            });
        }
        if let Some(v) = self.max_frames {
            cfg.max_frames = v;
        }
        if let Some(v) = self.target_errors {
            cfg.target_errors = v;
        }
        cfg.master_seed = resolve_seed(self.seed, env_seed, cfg.master_seed)?;
        cfg.build_modem()?;
        Ok(cfg)
    }
}

fn header(tool: &str, out: &OutputArgs) -> Header {
    let mut h = Header::new(tool);
    h.with_time = !out.no_header_time;
    h
}

fn emit(
    out: &OutputArgs,
    stdout: &mut dyn Write,
    body: impl FnOnce(&mut dyn Write) -> Result<(), SimError>,
) -> Result<(), SimError> {
    match &out.output {
        Some(path) => {
            let mut f = std::io::BufWriter::new(fs::File::create(path)?);
            body(&mut f)?;
            f.flush()?;
            Ok(())
        }
        None => body(stdout),
    }
}

pub fn parse_l_range(text: &str) -> Result<std::ops::RangeInclusive<usize>, SimError> {
    let bad = || SimError::Validation(format!("bad l range `{text}`, expected a..b"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<(), SimError> {
    let env_seed = std::env::var(SEED_ENV).ok();
    let env_seed = env_seed.as_deref();
    match cli.command {
        Command::Fdss(a) => fdss(a, stdout),
        Command::GcpCheck(a) => gcp_check(a, stdout),
        Command::Tradeoff(a) => tradeoff(a, stdout),
        Command::Temporal(a) => temporal_verb(a, env_seed, stdout),
        Command::Pmepr(a) => pmepr(a, env_seed, stdout),
        Command::Ber(a) => curve("ber", a, Axis::Ebn0, env_seed, stdout),
        Command::Bler(a) => curve("bler", a, Axis::Snr, env_seed, stdout),
    }
}

#[derive(Serialize)]
struct FdssRow {
    k: i64,
    re: f64,
    im: f64,
}

fn fdss(a: FdssArgs, stdout: &mut dyn Write) -> Result<(), SimError> {
    let v = |e: chirpim_core::Error| SimError::Validation(e.to_string());
    if (a.m as f64) < a.d {
        return Err(SimError::Validation(format!(
            "M = {} must not be below D = {}",
            a.m, a.d
        )));
    }
    let spec = ChirpSpec::new(a.chirp.into(), a.d, 1.0).map_err(v)?;
    let (ld, lu) = default_band(a.m).map_err(v)?;
    let (g, warn) = make_fdss(&spec, ld, lu).map_err(v)?;
    if let Some(w) = &warn {
        log::warn!("{w}");
    }
    let mut h = header("fdss", &a.out);
    h.push("chirp", format!("{:?}", a.chirp).to_lowercase());
    h.push("D", a.d);
    h.push("band", format!("{ld}..={lu}"));
    h.push(
        "ocb_99_wide_grid",
        spec.occupied_bandwidth(OCB_FRACTION).map_err(v)?,
    );
    h.push("ocb_99_in_band", ocb(&g, OCB_FRACTION).map_err(v)?);
    h.push("power", g.power());
    let rows: Vec<FdssRow> = g
        .iter()
        .map(|(k, c)| FdssRow {
            k,
            re: c.re,
            im: c.im,
        })
        .collect();
    emit(&a.out, stdout, |w| write_rows(w, &h, &rows))
}

#[derive(Serialize)]
struct LagRow {
    lag: usize,
    abs_rho_a: f64,
    abs_rho_b: f64,
    abs_sum: f64,
    normalized_sum: f64,
}

fn gcp_check(a: GcpArgs, stdout: &mut dyn Write) -> Result<(), SimError> {
    let v = |e: chirpim_core::Error| SimError::Validation(e.to_string());
    let shift_n = a.shift_n.unwrap_or(1.0 / a.m as f64);
    if (a.shift_m - shift_n).abs() < 1e-12 {
        return Err(SimError::Validation(
            "shift-m and shift-n must differ".into(),
        ));
    }
    let spec = ChirpSpec::new(a.chirp.into(), a.d, 1.0).map_err(v)?;
    let (ld, lu) = default_band(a.m).map_err(v)?;
    let (g, warn) = make_fdss(&spec, ld, lu).map_err(v)?;
    if let Some(w) = &warn {
        log::warn!("{w}");
    }
    let unit = |deg: f64| Complex64::from_polar(1.0, deg.to_radians());
    let (sa, sb) = synth_cs_pair(&g, a.shift_m, shift_n, unit(a.cm), unit(a.cn)).map_err(v)?;
    let verdict = is_gcp(&sa, &sb, a.tol).map_err(v)?;
    let mut h = header("gcp-check", &a.out);
    h.push("chirp", format!("{:?}", a.chirp).to_lowercase());
    h.push("D", a.d);
    h.push("M", a.m);
    h.push("shifts", format!("{} {}", a.shift_m, shift_n));
    h.push("is_gcp", verdict.is_gcp);
    h.push("tolerance", a.tol);
    h.push("max_residual", verdict.max_residual);
    h.push("max_raw_residual", verdict.max_raw_residual);
    h.push("peak_bound", verdict.peak_bound);
    h.push("spectral_ripple", verdict.spectral_ripple);
    let mut rows = Vec::with_capacity(a.m);
    for lag in 0..a.m {
        let ra = apac(&sa, lag as i64).map_err(v)?;
        let rb = apac(&sb, lag as i64).map_err(v)?;
        rows.push(LagRow {
            lag,
            abs_rho_a: ra.norm(),
            abs_rho_b: rb.norm(),
            abs_sum: (ra + rb).norm(),
            normalized_sum: (ra + rb).norm() / verdict.peak_bound,
        });
    }
    emit(&a.out, stdout, |w| write_rows(w, &h, &rows))
}

#[derive(Serialize)]
struct TradeoffCsv {
    l: usize,
    #[serde(rename = "S")]
    s: usize,
    rho: f64,
    #[serde(rename = "max_pmepr_dB")]
    max_pmepr_db: f64,
}

fn tradeoff(a: TradeoffArgs, stdout: &mut dyn Write) -> Result<(), SimError> {
    let range = parse_l_range(&a.l_range)?;
    let rows = tradeoff_table(a.m, a.h, range).map_err(|e| {
        SimError::Validation(format!(
            "{e} (supported l: {}..={})",
            TRADEOFF_L_RANGE.start(),
            TRADEOFF_L_RANGE.end()
        ))
    })?;
    let rows: Vec<TradeoffCsv> = rows
        .into_iter()
        .map(|r| TradeoffCsv {
            l: r.l,
            s: r.bits,
            rho: r.spectral_efficiency,
            max_pmepr_db: r.max_pmepr_db,
        })
        .collect();
    let mut h = header("tradeoff", &a.out);
    h.push("M", a.m);
    h.push("H", a.h);
    emit(&a.out, stdout, |w| write_rows(w, &h, &rows))
}

fn temporal_verb(
    a: TemporalArgs,
    env_seed: Option<&str>,
    stdout: &mut dyn Write,
) -> Result<(), SimError> {
    let cfg = a.run.resolve(env_seed)?;
    let os = a.oversampling.unwrap_or(cfg.oversampling);
    let mut columns = Vec::new();
    let mut bits = None;
    for scheme in Scheme::ALL {
        let link = Link::new(&LinkConfig {
            scheme,
            ..cfg.clone()
        })?;
        let b = bits.get_or_insert_with(|| {
            link.random_bits(&mut stream(cfg.master_seed, 0, 0, StreamTag::Bits))
        });
        columns.push((scheme.name(), temporal(&link, b, os)?));
    }
    let mut h = header("temporal", &a.run.out).with_config(&cfg);
    h.push("oversampling", os);
    h.push(
        "normalisation",
        "power relative to the scheme's ensemble average",
    );
    emit(&a.run.out, stdout, |w| {
        h.write(w)?;
        let mut csv = csv::Writer::from_writer(w);
        let mut head = vec!["t_over_ts".to_string()];
        head.extend(columns.iter().map(|(n, _)| n.to_string()));
        csv.write_record(&head).map_err(csv_io)?;
        let points = columns[0].1.len();
        for i in 0..points {
            let mut rec = vec![(i as f64 / points as f64).to_string()];
            rec.extend(columns.iter().map(|(_, c)| c[i].to_string()));
            csv.write_record(&rec).map_err(csv_io)?;
        }
        csv.flush()?;
        Ok(())
    })
}

fn csv_io(e: csv::Error) -> SimError {
    SimError::Io(std::io::Error::other(e))
}

fn pmepr(a: PmeprArgs, env_seed: Option<&str>, stdout: &mut dyn Write) -> Result<(), SimError> {
    let cfg = a.run.resolve(env_seed)?;
    let frames = a.frames.unwrap_or(cfg.pmepr_frames);
    let os = a.oversampling.unwrap_or(cfg.oversampling);
    let ccdf = run_pmepr(&cfg, frames, os, a.run.workers)?;
    let mut h = header("pmepr", &a.run.out).with_config(&cfg);
    h.push("frames", frames);
    h.push("oversampling", os);
    h.push("max_pmepr_dB", ccdf.max());
    h.push("median_pmepr_dB", ccdf.median());
    emit(&a.run.out, stdout, |w| write_ccdf(w, &h, &ccdf))
}

fn curve(
    tool: &str,
    a: RunArgs,
    default_axis: Axis,
    env_seed: Option<&str>,
    stdout: &mut dyn Write,
) -> Result<(), SimError> {
    let mut cfg = a.resolve(env_seed)?;
    cfg.axis.get_or_insert(default_axis);
    let points = run_ber(&cfg, a.workers)?;
    let bits = cfg.layout()?.total_bits();
    let mut h = header(tool, &a.out).with_config(&cfg);
    h.push("bits_per_frame", bits);
    h.push(
        "ebn0_definition",
        format!(
            "Eb/N0 = SNR + 10*log10(N/S) = SNR + {:.6} dB (unit-power body, CP excluded)",
            10.0 * (cfg.n as f64 / bits as f64).log10()
        ),
    );
    if let Some(path) = &a.json {
        fs::write(path, curve_json(&cfg, &points))?;
    }
    emit(&a.out, stdout, |w| write_curve(w, &h, &cfg, &points))
}
