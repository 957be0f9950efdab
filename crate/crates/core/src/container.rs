//! Binary container: magic, u32 LE header length, JSON header, LE payload.
//!
//! Payload is row-major complex samples; the slowest axis of a space-time
//! field is time.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::trial::TrialFunction;

const MAGIC: &[u8; 8] = b"FRACEXT\0";
pub const CONVENTION: &str = "paper-2pi-inverse";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dtype {
    Complex64,
    Complex128,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub kind: String,
    pub d: usize,
    pub xi_max: f64,
    pub m: usize,
    pub convention: String,
    pub dtype: Dtype,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
}

pub fn write_samples<W: Write>(
    mut w: W,
    header: &Header,
    values: &[Complex64],
) -> Result<()> {
    let json = serde_json::to_vec(header)?;
    w.write_all(MAGIC)?;
    w.write_all(&(json.len() as u32).to_le_bytes())?;
    w.write_all(&json)?;
    let mut buf = Vec::with_capacity(values.len() * 16);
    for z in values {
        match header.dtype {
            Dtype::Complex64 => {
                buf.extend_from_slice(&(z.re as f32).to_le_bytes());
                buf.extend_from_slice(&(z.im as f32).to_le_bytes());
            }
            Dtype::Complex128 => {
                buf.extend_from_slice(&z.re.to_le_bytes());
                buf.extend_from_slice(&z.im.to_le_bytes());
            }
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_samples<R: Read>(mut r: R) -> Result<(Header, Vec<Complex64>)> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)
        .map_err(|_| Error::Format("truncated container".into()))?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let mut len = [0u8; 4];
    r.read_exact(&mut len)
        .map_err(|_| Error::Format("truncated header length".into()))?;
    let len = u32::from_le_bytes(len) as usize;
    let mut json = vec![0u8; len];
    r.read_exact(&mut json)
        .map_err(|_| Error::Format("truncated header".into()))?;
    let header: Header = serde_json::from_slice(&json)?;
    if header.convention != CONVENTION {
        return Err(Error::Format(format!(
            "unknown convention `{}`",
            header.convention
        )));
    }
    let grid = FrequencyGrid::new(header.d, header.xi_max, header.m)
        .map_err(|e| Error::Format(e.to_string()))?;
    let slices = header.times.as_ref().map_or(1, |t| t.len());
    let count = grid.len() * slices;
    let mut payload = Vec::new();
    r.read_to_end(&mut payload)?;
    let width = match header.dtype {
        Dtype::Complex64 => 8,
        Dtype::Complex128 => 16,
    };
    if payload.len() != count * width {
        return Err(Error::Format(format!(
            "payload has {} bytes, expected {}",
            payload.len(),
            count * width
        )));
    }
    let values = payload
        .chunks_exact(width)
        .map(|c| match header.dtype {
            Dtype::Complex64 => Complex64::new(
                f32::from_le_bytes(c[0..4].try_into().unwrap()) as f64,
                f32::from_le_bytes(c[4..8].try_into().unwrap()) as f64,
            ),
            Dtype::Complex128 => Complex64::new(
                f64::from_le_bytes(c[0..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..16].try_into().unwrap()),
            ),
        })
        .collect();
    Ok((header, values))
}

pub fn trial_header(grid: &FrequencyGrid, dtype: Dtype) -> Header {
    Header {
        kind: "trial".into(),
        d: grid.d,
        xi_max: grid.xi_max,
        m: grid.m,
        convention: CONVENTION.into(),
        dtype,
        times: None,
    }
}

pub fn write_trial<W: Write>(w: W, f: &TrialFunction, dtype: Dtype) -> Result<()> {
    write_samples(w, &trial_header(f.grid(), dtype), f.values())
}

pub fn read_trial<R: Read>(r: R) -> Result<TrialFunction> {
    let (header, values) = read_samples(r)?;
    if header.times.is_some() {
        return Err(Error::Format("container holds a space-time field".into()));
    }
    let grid = FrequencyGrid::new(header.d, header.xi_max, header.m)?;
    TrialFunction::new(grid, values).map_err(|e| Error::Format(e.to_string()))
}

/// Reads a trial function and checks its dimension.
pub fn read_trial_expecting<R: Read>(r: R, d: usize) -> Result<TrialFunction> {
    let f = read_trial(r)?;
    if f.grid().d != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: f.grid().d,
        });
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trial::make_gaussian;

    #[test]
    fn round_trip_both_dtypes() {
        let g = FrequencyGrid::new(2, 8.0, 32).unwrap();
        let f = make_gaussian(g, &[1.0, -1.0], 1.5).unwrap();
        for (dtype, tol) in [(Dtype::Complex64, 1e-6), (Dtype::Complex128, 0.0)] {
            let mut buf = Vec::new();
            write_trial(&mut buf, &f, dtype).unwrap();
            let back = read_trial(&buf[..]).unwrap();
            assert_eq!(back.grid(), f.grid());
            for (a, b) in back.values().iter().zip(f.values()) {
                assert!((a - b).norm() <= tol);
            }
        }
    }

    #[test]
    fn rejects_garbage_and_wrong_dimension() {
        assert!(matches!(read_trial(&b"nonsense"[..]), Err(Error::Format(_))));
        let g = FrequencyGrid::new(1, 8.0, 64).unwrap();
        let f = make_gaussian(g, &[0.0], 1.5).unwrap();
        let mut buf = Vec::new();
        write_trial(&mut buf, &f, Dtype::Complex64).unwrap();
        assert!(matches!(
            read_trial_expecting(&buf[..], 2),
            Err(Error::DimensionMismatch { .. })
        ));
        buf.pop();
        assert!(matches!(read_trial(&buf[..]), Err(Error::Format(_))));
    }
}
