//! CSV and JSON artifacts. CSV bodies are a pure function of the inputs; the
//! only run-dependent content (a timestamp) sits in a `#` comment line that
//! can be suppressed.

use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::config::LinkConfig;
use crate::engine::{Ccdf, CurvePoint};
use crate::SimError;

pub const CURVE_COLUMNS: [&str; 11] = [
    "scheme",
    "channel",
    "l",
    "snr_dB",
    "ebn0_dB",
    "frames",
    "bits",
    "frame_errors",
    "bit_errors",
    "bler",
    "ber",
];

/// Version string in `git describe` style; a build can pin it through
/// `CHIRPIM_VERSION`.
pub fn version() -> String {
    option_env!("CHIRPIM_VERSION")
        .map(str::to_owned)
        .unwrap_or_else(|| format!("v{}", env!("CARGO_PKG_VERSION")))
}

#[derive(Debug, Clone)]
pub struct Header {
    pub lines: Vec<(String, String)>,
    pub with_time: bool,
}

impl Header {
    pub fn new(tool: &str) -> Self {
        Header {
            lines: vec![("tool".into(), format!("chirpim {tool} {}", version()))],
            with_time: true,
        }
    }

    pub fn with_config(mut self, cfg: &LinkConfig) -> Self {
        self.push("master_seed", cfg.master_seed);
        self.push("config", cfg.to_json());
        self
    }

    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.lines.push((key.into(), value.to_string()));
    }

    pub fn write(&self, out: &mut dyn Write) -> std::io::Result<()> {
        for (k, v) in &self.lines {
            writeln!(out, "# {k}: {v}")?;
        }
        if self.with_time {
            let secs = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            writeln!(out, "# generated_unix: {secs}")?;
        }
        Ok(())
    }
}

/// One CSV row of an error-rate curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub scheme: String,
    pub channel: String,
    pub l: usize,
    #[serde(rename = "snr_dB")]
    pub snr_db: f64,
    #[serde(rename = "ebn0_dB")]
    pub ebn0_db: f64,
    pub frames: u64,
    pub bits: u64,
    pub frame_errors: u64,
    pub bit_errors: u64,
    pub bler: f64,
    pub ber: f64,
}

impl CurveRow {
    pub fn new(cfg: &LinkConfig, p: &CurvePoint) -> Self {
        CurveRow {
            scheme: cfg.scheme.name().into(),
            channel: cfg.channel.label(),
            l: cfg.l,
            snr_db: p.snr_db,
            ebn0_db: p.ebn0_db,
            frames: p.frames,
            bits: p.bits,
            frame_errors: p.frame_errors,
            bit_errors: p.bit_errors,
            bler: p.bler,
            ber: p.ber,
        }
    }
}

fn csv_err(e: csv::Error) -> SimError {
    SimError::Io(std::io::Error::other(e))
}

pub fn write_rows<T: Serialize>(
    out: &mut dyn Write,
    header: &Header,
    rows: &[T],
) -> Result<(), SimError> {
    header.write(out)?;
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_curve(
    out: &mut dyn Write,
    header: &Header,
    cfg: &LinkConfig,
    points: &[CurvePoint],
) -> Result<(), SimError> {
    let rows: Vec<CurveRow> = points.iter().map(|p| CurveRow::new(cfg, p)).collect();
    write_rows(out, header, &rows)
}

/// Reads rows back, skipping `#` comment lines.
pub fn read_curve(text: &str) -> Result<Vec<CurveRow>, SimError> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = r.headers().map_err(csv_err)?.clone();
    if headers.iter().ne(CURVE_COLUMNS) {
        return Err(SimError::Validation(format!(
            "unexpected columns: {headers:?}"
        )));
    }
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

#[derive(Serialize)]
struct CurveJson<'a> {
    version: String,
    master_seed: u64,
    config: &'a LinkConfig,
    points: &'a [CurvePoint],
}

pub fn curve_json(cfg: &LinkConfig, points: &[CurvePoint]) -> String {
    serde_json::to_string_pretty(&CurveJson {
        version: version(),
        master_seed: cfg.master_seed,
        config: cfg,
        points,
    })
    .expect("curve serialises")
}

#[derive(Serialize)]
struct CcdfRow {
    #[serde(rename = "pmepr_dB")]
    pmepr_db: f64,
    ccdf: f64,
}

pub fn write_ccdf(out: &mut dyn Write, header: &Header, ccdf: &Ccdf) -> Result<(), SimError> {
    let rows: Vec<CcdfRow> = ccdf
        .table()
        .into_iter()
        .map(|(pmepr_db, ccdf)| CcdfRow { pmepr_db, ccdf })
        .collect();
    write_rows(out, header, &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point() -> CurvePoint {
        CurvePoint {
            snr_db: -10.0,
            ebn0_db: 4.082_399_653_118_496,
            frames: 1000,
            bits: 20_000,
            frame_errors: 3,
            bit_errors: 5,
            ber: 2.5e-4,
            bler: 3e-3,
            mean_body_power: 1.0,
            wall_seconds: Some(0.1),
        }
    }

    #[test]
    fn csv_round_trip() {
        let cfg = LinkConfig::default();
        let mut h = Header::new("ber").with_config(&cfg);
        h.with_time = false;
        let mut buf = Vec::new();
        write_curve(&mut buf, &h, &cfg, &[point()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("# master_seed: 1"));
        assert!(text.contains(&version()));
        assert!(!text.contains("generated_unix"));
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body[0], CURVE_COLUMNS.join(","));
        let rows = read_curve(&text).unwrap();
        assert_eq!(rows, vec![CurveRow::new(&cfg, &point())]);
    }

    #[test]
    fn timestamp_only_in_comment() {
        let h = Header::new("x");
        let mut buf = Vec::new();
        h.write(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().all(|l| l.starts_with("# ")));
        assert!(text.contains("generated_unix"));
    }

    #[test]
    fn json_mirror_echoes_config() {
        let cfg = LinkConfig::default();
        let v: serde_json::Value = serde_json::from_str(&curve_json(&cfg, &[point()])).unwrap();
        assert_eq!(v["master_seed"], 1);
        assert_eq!(v["config"]["m"], 384);
        assert_eq!(v["points"][0]["frame_errors"], 3);
    }
}
