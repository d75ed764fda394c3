//! On-disk formats.
//!
//! Binary time series (little-endian):
//!
//! | offset | size | field                                   |
//! |--------|------|-----------------------------------------|
//! | 0      | 8    | magic `PLNKNOIS`                        |
//! | 8      | 4    | format version (u32, currently 1)       |
//! | 12     | 4    | units tag (u32, 1 = meters)             |
//! | 16     | 8    | sample rate, Hz (f64)                   |
//! | 24     | 8    | sample count (u64)                      |
//! | 32     | 8    | seed (u64)                              |
//! | 40     | 8    | start time, s (f64)                     |
//! | 48     | 8    | metadata length in bytes (u64)          |
//! | 56     | 8    | reserved, zero                          |
//! | 64     | m    | metadata, UTF-8 JSON                    |
//! | 64 + m | 8 n  | samples (f64)                           |
//!
//! Text tables are CSV preceded by `# key: value` metadata lines.

use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::synthesis::TimeSeries;

pub const MAGIC: &[u8; 8] = b"PLNKNOIS";
pub const FORMAT_VERSION: u32 = 1;
pub const UNITS_METERS: u32 = 1;
pub const HEADER_LEN: usize = 64;

/// Generating command, seed and configuration embedded in every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
}

impl Provenance {
    pub fn new(command: &str, seed: Option<u64>, config: serde_json::Value) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed,
            config,
        }
    }

    fn preamble(&self) -> Result<Vec<(String, String)>> {
        Ok(vec![
            ("tool".into(), self.tool.clone()),
            ("version".into(), self.version.clone()),
            ("command".into(), self.command.clone()),
            (
                "seed".into(),
                self.seed.map(|s| s.to_string()).unwrap_or_else(|| "none".into()),
            ),
            ("config".into(), serde_json::to_string(&self.config)?),
        ])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesFormat {
    Binary,
    Csv,
}

pub fn write_series_binary<W: Write>(mut w: W, ts: &TimeSeries, prov: &Provenance) -> Result<()> {
    let meta = serde_json::to_vec(prov)?;
    let mut header = Vec::with_capacity(HEADER_LEN);
    header.extend_from_slice(MAGIC);
    header.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    header.extend_from_slice(&UNITS_METERS.to_le_bytes());
    header.extend_from_slice(&ts.sample_rate.to_le_bytes());
    header.extend_from_slice(&(ts.len() as u64).to_le_bytes());
    header.extend_from_slice(&prov.seed.unwrap_or(0).to_le_bytes());
    header.extend_from_slice(&ts.start_time.to_le_bytes());
    header.extend_from_slice(&(meta.len() as u64).to_le_bytes());
    header.extend_from_slice(&[0u8; 8]);
    debug_assert_eq!(header.len(), HEADER_LEN);
    w.write_all(&header)?;
    w.write_all(&meta)?;
    let mut body = Vec::with_capacity(8 * ts.len());
    for v in &ts.values {
        body.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&body)?;
    w.flush()?;
    Ok(())
}

pub fn read_series_binary<R: Read>(mut r: R) -> Result<(TimeSeries, Provenance)> {
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header)?;
    if &header[0..8] != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(header[o..o + 4].try_into().unwrap());
    let u64_at = |o: usize| u64::from_le_bytes(header[o..o + 8].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(header[o..o + 8].try_into().unwrap());
    if u32_at(8) != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported version {}", u32_at(8))));
    }
    if u32_at(12) != UNITS_METERS {
        return Err(Error::Format(format!("unknown units tag {}", u32_at(12))));
    }
    let sample_rate = f64_at(16);
    let n = u64_at(24) as usize;
    let start_time = f64_at(40);
    let mut meta = vec![0u8; u64_at(48) as usize];
    r.read_exact(&mut meta)?;
    let prov: Provenance = serde_json::from_slice(&meta)?;
    let mut body = vec![0u8; 8 * n];
    r.read_exact(&mut body)?;
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((TimeSeries::new(sample_rate, start_time, values)?, prov))
}

fn write_preamble<W: Write>(w: &mut W, lines: &[(String, String)]) -> Result<()> {
    for (k, v) in lines {
        writeln!(w, "# {k}: {v}")?;
    }
    Ok(())
}

pub fn write_series_csv<W: Write>(mut w: W, ts: &TimeSeries, prov: &Provenance) -> Result<()> {
    let mut lines = vec![
        ("format".to_string(), format!("timeseries v{FORMAT_VERSION}")),
        ("units".to_string(), "m".to_string()),
        ("sample_rate_hz".to_string(), format!("{:e}", ts.sample_rate)),
        ("start_time_s".to_string(), format!("{:e}", ts.start_time)),
    ];
    lines.extend(prov.preamble()?);
    write_preamble(&mut w, &lines)?;
    writeln!(w, "time_s,displacement_m")?;
    let dt = ts.dt();
    for (i, v) in ts.values.iter().enumerate() {
        writeln!(w, "{:e},{:e}", ts.start_time + i as f64 * dt, v)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the CSV written by [`write_series_csv`].
pub fn read_series_csv<R: BufRead>(r: R) -> Result<TimeSeries> {
    let mut sample_rate = None;
    let mut start_time = 0.0;
    let mut values = Vec::new();
    let mut seen_header = false;
    for line in r.lines() {
        let line = line?;
        if let Some(meta) = line.strip_prefix("# ") {
            if let Some((k, v)) = meta.split_once(": ") {
                let parse = |v: &str| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Format(format!("{k}: {e}")))
                };
                match k {
                    "sample_rate_hz" => sample_rate = Some(parse(v)?),
                    "start_time_s" => start_time = parse(v)?,
                    _ => {}
                }
            }
            continue;
        }
        if !seen_header {
            seen_header = true;
            continue;
        }
        let (_, v) = line
            .split_once(',')
            .ok_or_else(|| Error::Format(format!("malformed row: {line}")))?;
        values.push(
            v.trim()
                .parse::<f64>()
                .map_err(|e| Error::Format(format!("row {}: {e}", values.len())))?,
        );
    }
    let sample_rate = sample_rate.ok_or_else(|| Error::Format("missing sample_rate_hz".into()))?;
    TimeSeries::new(sample_rate, start_time, values)
}

/// CSV table with metadata preamble. Values print in shortest round-trip form.
pub fn write_table<W: Write>(
    mut w: W,
    prov: &Provenance,
    extra: &[(String, String)],
    columns: &[&str],
    rows: &[Vec<f64>],
) -> Result<()> {
    let mut lines = prov.preamble()?;
    lines.extend_from_slice(extra);
    write_preamble(&mut w, &lines)?;
    writeln!(w, "{}", columns.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()?;
    Ok(())
}
