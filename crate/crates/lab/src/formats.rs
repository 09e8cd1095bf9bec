//! On-disk formats: a little-endian binary container for grid functions, JSON
//! envelopes and CSV tables.

use std::fs;
use std::io::Write;
use std::path::Path;

use besov_core::{Axis, Grid, GridFunction, Measure};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{LabError, Result};

const MAGIC: &[u8; 4] = b"BGF1";

/// Encodes a grid function:
/// `"BGF1" | dim: u8 | measure: u8 (0 Lebesgue, 1 Gaussian) | 2 zero bytes |
/// per axis (lo: f64, hi: f64, n: u64) | samples: f64...`, all little-endian.
pub fn encode_grid_function(f: &GridFunction) -> Vec<u8> {
    let grid = f.grid();
    let mut out = Vec::with_capacity(8 + 24 * grid.dim() + 8 * grid.len());
    out.extend_from_slice(MAGIC);
    out.push(grid.dim() as u8);
    out.push(match f.measure() {
        Measure::Lebesgue => 0,
        Measure::Gaussian => 1,
    });
    out.extend_from_slice(&[0, 0]);
    for ax in grid.axes() {
        out.extend_from_slice(&ax.lo.to_le_bytes());
        out.extend_from_slice(&ax.hi.to_le_bytes());
        out.extend_from_slice(&(ax.n as u64).to_le_bytes());
    }
    for v in f.samples() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_grid_function(bytes: &[u8], path: &Path) -> Result<GridFunction> {
    let bad = |reason: &str| LabError::Format { path: path.to_path_buf(), reason: reason.to_string() };
    if bytes.len() < 8 || &bytes[..4] != MAGIC {
        return Err(bad("missing BGF1 header"));
    }
    let dim = bytes[4] as usize;
    let measure = match bytes[5] {
        0 => Measure::Lebesgue,
        1 => Measure::Gaussian,
        _ => return Err(bad("unknown measure tag")),
    };
    let mut words = bytes[8..].chunks_exact(8);
    let mut word = || -> Result<[u8; 8]> {
        let w = words.next().ok_or_else(|| bad("truncated"))?;
        Ok(w.try_into().expect("eight bytes"))
    };
    let mut axes = Vec::with_capacity(dim);
    for _ in 0..dim {
        let lo = f64::from_le_bytes(word()?);
        let hi = f64::from_le_bytes(word()?);
        let n = u64::from_le_bytes(word()?) as usize;
        axes.push(Axis::new(lo, hi, n)?);
    }
    let grid = Grid::new(axes)?;
    let mut samples = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        samples.push(f64::from_le_bytes(word()?));
    }
    if words.next().is_some() || !words.remainder().is_empty() {
        return Err(bad("trailing bytes"));
    }
    Ok(GridFunction::new(grid, measure, samples)?)
}

pub fn write_grid_function(path: &Path, f: &GridFunction) -> Result<()> {
    write_bytes(path, &encode_grid_function(f))
}

/// Reads a grid function file; a missing file is reported with its expected path.
pub fn read_grid_function(path: &Path) -> Result<GridFunction> {
    let bytes = fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => LabError::MissingInput { path: path.to_path_buf() },
        _ => LabError::io(path, e),
    })?;
    decode_grid_function(&bytes, path)
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| LabError::io(parent, e))?;
    }
    let mut file = fs::File::create(path).map_err(|e| LabError::io(path, e))?;
    file.write_all(bytes).map_err(|e| LabError::io(path, e))
}

/// Every JSON artifact carries the tool, version and the echoed configuration.
#[derive(Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub config: &'a RunConfig,
    #[serde(flatten)]
    pub payload: T,
}

pub fn write_json<T: Serialize>(path: &Path, config: &RunConfig, payload: T) -> Result<()> {
    let env = Envelope {
        tool: crate::TOOL,
        version: crate::VERSION,
        subcommand: config.subcommand.name(),
        config,
        payload,
    };
    let mut text = serde_json::to_string_pretty(&env)?;
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

/// Writes a CSV table. The first line is a `#`-comment naming the tool, version and seed.
pub fn write_csv(path: &Path, config: &RunConfig, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut buf = format!("# {} {} seed={}\n", crate::TOOL, crate::VERSION, config.seed).into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(header)?;
        for row in rows {
            w.write_record(row.iter().map(|v| format!("{v:e}")))?;
        }
        w.flush().map_err(|e| LabError::io(path, e))?;
    }
    write_bytes(path, &buf)
}

/// Grid coordinates and values, one row per node.
pub fn grid_function_rows(f: &GridFunction) -> (Vec<&'static str>, Vec<Vec<f64>>) {
    let grid = f.grid();
    let header = if grid.dim() == 1 { vec!["x", "value"] } else { vec!["x", "y", "value"] };
    let rows = (0..grid.len())
        .map(|i| {
            let x = grid.point(i);
            let mut r: Vec<f64> = x[..grid.dim()].to_vec();
            r.push(f.samples()[i]);
            r
        })
        .collect();
    (header, rows)
}

/// File-name stem for a function label: characters outside `[A-Za-z0-9._-]` become `_`.
pub fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') { c } else { '_' })
        .collect()
}
