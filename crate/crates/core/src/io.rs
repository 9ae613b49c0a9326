//! Time-series CSV and binary checkpoints.
//!
//! Checkpoint layout (all little-endian):
//!
//! | bytes | content |
//! |-------|---------|
//! | 8     | magic `ECONVCKP` |
//! | 4     | format version (u32) |
//! | 4     | n (u32) |
//! | 8     | half period L (f64) |
//! | 8     | time t (f64) |
//! | 16 n^2 x 3 | interleaved re/im of q, u1, u2 coefficients (f64) |

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use crate::diagnostics::TimeSeriesRecord;
use crate::error::{Error, Result};
use crate::model::SimState;
use crate::spectral::{Grid, SpectralScalar, SpectralVector};

pub const SERIES_HEADER: &str = "t,l2q2,l2u2,l4q4,h1q2,h1u2,h2q2,h2u2,w14u,moment,mean_q,diffq2,diffu2,shell_low_q,shell_high_q,probe_zeta_max,probe_v_max";

pub const SERIES_COLUMNS: [&str; 17] = [
    "t",
    "l2q2",
    "l2u2",
    "l4q4",
    "h1q2",
    "h1u2",
    "h2q2",
    "h2u2",
    "w14u",
    "moment",
    "mean_q",
    "diffq2",
    "diffu2",
    "shell_low_q",
    "shell_high_q",
    "probe_zeta_max",
    "probe_v_max",
];

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"ECONVCKP";
pub const CHECKPOINT_VERSION: u32 = 1;

pub fn record_values(r: &TimeSeriesRecord) -> [f64; 17] {
    [
        r.t,
        r.l2q2,
        r.l2u2,
        r.l4q4,
        r.h1q2,
        r.h1u2,
        r.h2q2,
        r.h2u2,
        r.w14u,
        r.moment,
        r.mean_q,
        r.diffq2,
        r.diffu2,
        r.shell_low_q,
        r.shell_high_q,
        r.probe_zeta_max,
        r.probe_v_max,
    ]
}

fn record_from_values(v: &[f64; 17]) -> TimeSeriesRecord {
    TimeSeriesRecord {
        t: v[0],
        l2q2: v[1],
        l2u2: v[2],
        l4q4: v[3],
        h1q2: v[4],
        h1u2: v[5],
        h2q2: v[6],
        h2u2: v[7],
        w14u: v[8],
        moment: v[9],
        mean_q: v[10],
        diffq2: v[11],
        diffu2: v[12],
        shell_low_q: v[13],
        shell_high_q: v[14],
        probe_zeta_max: v[15],
        probe_v_max: v[16],
    }
}

/// Write records as CSV with 17 significant digits per value.
pub fn write_series<W: Write>(records: &[TimeSeriesRecord], mut out: W) -> Result<()> {
    writeln!(out, "{SERIES_HEADER}")?;
    for r in records {
        let row: Vec<String> = record_values(r).iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn emit_series(records: &[TimeSeriesRecord], path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_series(records, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn parse_series<R: BufRead>(input: R) -> Result<Vec<TimeSeriesRecord>> {
    let bad = |message: String| Error::Format {
        what: "series CSV",
        message,
    };
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| bad("empty file".into()))??;
    if header.trim_end() != SERIES_HEADER {
        return Err(bad(format!("unexpected header `{header}`")));
    }
    let mut out = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut vals = [0.0; 17];
        let mut count = 0;
        for (i, field) in line.split(',').enumerate() {
            if i >= 17 {
                return Err(bad(format!("line {}: too many fields", lineno + 2)));
            }
            vals[i] = field
                .trim()
                .parse()
                .map_err(|e| bad(format!("line {}: {e}", lineno + 2)))?;
            count += 1;
        }
        if count != 17 {
            return Err(bad(format!("line {}: expected 17 fields, got {count}", lineno + 2)));
        }
        out.push(record_from_values(&vals));
    }
    Ok(out)
}

pub fn read_series(path: &Path) -> Result<Vec<TimeSeriesRecord>> {
    if !path.exists() {
        return Err(Error::MissingInput(path.display().to_string()));
    }
    parse_series(BufReader::new(File::open(path)?))
}

pub fn write_checkpoint<W: Write>(state: &SimState, mut out: W) -> Result<()> {
    let grid = state.grid();
    out.write_all(CHECKPOINT_MAGIC)?;
    out.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    out.write_all(&(grid.n() as u32).to_le_bytes())?;
    out.write_all(&grid.half_period().to_le_bytes())?;
    out.write_all(&state.t.to_le_bytes())?;
    let fields = [&state.q_hat, &state.u_hat.components[0], &state.u_hat.components[1]];
    for f in fields {
        for c in f.coeffs() {
            out.write_all(&c.re.to_le_bytes())?;
            out.write_all(&c.im.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn save_checkpoint(state: &SimState, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_checkpoint(state, &mut w)?;
    w.flush()?;
    Ok(())
}

fn read_array<const N: usize, R: Read>(input: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    input.read_exact(&mut buf)?;
    Ok(buf)
}

/// Read a checkpoint. A grid with matching `n` and `L` may be supplied to
/// share its transform plans.
pub fn read_checkpoint<R: Read>(mut input: R, grid: Option<Arc<Grid>>) -> Result<SimState> {
    let bad = |message: String| Error::Format {
        what: "checkpoint",
        message,
    };
    let magic: [u8; 8] = read_array(&mut input)?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(bad("bad magic".into()));
    }
    let version = u32::from_le_bytes(read_array(&mut input)?);
    if version != CHECKPOINT_VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let n = u32::from_le_bytes(read_array(&mut input)?) as usize;
    let half_period = f64::from_le_bytes(read_array(&mut input)?);
    let t = f64::from_le_bytes(read_array(&mut input)?);
    let grid = match grid {
        Some(g) if g.n() == n && g.half_period() == half_period => g,
        Some(_) => return Err(Error::GridMismatch),
        None => Grid::new(n, half_period)?,
    };
    let mut read_field = || -> Result<SpectralScalar> {
        let mut coeffs = Vec::with_capacity(n * n);
        for _ in 0..n * n {
            let re = f64::from_le_bytes(read_array(&mut input)?);
            let im = f64::from_le_bytes(read_array(&mut input)?);
            coeffs.push(Complex64::new(re, im));
        }
        SpectralScalar::from_coeffs(grid.clone(), coeffs)
    };
    let q = read_field()?;
    let u1 = read_field()?;
    let u2 = read_field()?;
    SimState::new(t, q, SpectralVector::new(u1, u2)?)
}

pub fn load_checkpoint(path: &Path, grid: Option<Arc<Grid>>) -> Result<SimState> {
    if !path.exists() {
        return Err(Error::MissingInput(path.display().to_string()));
    }
    read_checkpoint(BufReader::new(File::open(path)?), grid)
}
