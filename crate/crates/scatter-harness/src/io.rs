//! Result serialization and the sample-file formats.
//!
//! Results go out as CSV (`grid,quantity,empirical,stderr,theory`, theory
//! blank when absent) or as JSON with a metadata envelope. Sample files
//! are little-endian binary with a 16-byte header (8-byte magic, u32 `m`,
//! u32 `K`) followed by `K*m` interleaved `(re, im)` f64 pairs, one sample
//! per row; a plain CSV alternative with `re,im` column pairs is detected
//! by the absent magic.

use crate::experiments::ExperimentResult;
use crate::{HarnessError, Result};
use scatter::numkit::ComplexVector;
use std::io::{Read, Write};
use std::path::Path;

/// Magic prefix of the binary sample format.
pub const SAMPLE_MAGIC: &[u8; 8] = b"SCATSAM1";

/// Render rows as CSV. Floats use the shortest round-trip form, so a given
/// result always renders to identical bytes.
pub fn result_to_csv(result: &ExperimentResult) -> String {
    let mut out = String::from("grid,quantity,empirical,stderr,theory\n");
    for row in &result.rows {
        let theory = row.theory.map(format_float).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            format_float(row.grid),
            row.quantity,
            format_float(row.empirical),
            format_float(row.stderr),
            theory
        ));
    }
    out
}

/// Render rows plus the metadata envelope as pretty JSON.
pub fn result_to_json(result: &ExperimentResult) -> Result<String> {
    serde_json::to_string_pretty(result)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| HarnessError::Format(format!("json encoding failed: {e}")))
}

fn format_float(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        // Keep integers readable (grid values, zero theory).
        format!("{v:.1}")
    } else {
        format!("{v}")
    }
}

/// Write samples in the binary format.
pub fn write_samples_binary(path: &Path, samples: &[ComplexVector]) -> Result<()> {
    if samples.is_empty() {
        return Err(HarnessError::Config("refusing to write an empty sample file".into()));
    }
    let m = samples[0].dim();
    let mut buf: Vec<u8> = Vec::with_capacity(16 + samples.len() * m * 16);
    buf.extend_from_slice(SAMPLE_MAGIC);
    buf.extend_from_slice(&(m as u32).to_le_bytes());
    buf.extend_from_slice(&(samples.len() as u32).to_le_bytes());
    for s in samples {
        for c in s.as_slice() {
            buf.extend_from_slice(&c.re.to_le_bytes());
            buf.extend_from_slice(&c.im.to_le_bytes());
        }
    }
    std::fs::File::create(path)?.write_all(&buf)?;
    Ok(())
}

/// Write samples as CSV with `re{j},im{j}` column pairs.
pub fn write_samples_csv(path: &Path, samples: &[ComplexVector]) -> Result<()> {
    if samples.is_empty() {
        return Err(HarnessError::Config("refusing to write an empty sample file".into()));
    }
    let m = samples[0].dim();
    let mut out = String::new();
    let header: Vec<String> = (0..m).flat_map(|j| [format!("re{j}"), format!("im{j}")]).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for s in samples {
        let fields: Vec<String> = s.as_slice().iter().flat_map(|c| [format!("{}", c.re), format!("{}", c.im)]).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Read a sample file, auto-detecting binary (by magic) versus CSV.
pub fn read_samples(path: &Path) -> Result<Vec<ComplexVector>> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() >= 8 && &bytes[..8] == SAMPLE_MAGIC {
        read_samples_binary(&bytes)
    } else {
        read_samples_csv(&bytes)
    }
}

fn read_samples_binary(bytes: &[u8]) -> Result<Vec<ComplexVector>> {
    if bytes.len() < 16 {
        return Err(HarnessError::Format("binary sample file shorter than its header".into()));
    }
    let m = u32::from_le_bytes(bytes[8..12].try_into().expect("slice of 4")) as usize;
    let k = u32::from_le_bytes(bytes[12..16].try_into().expect("slice of 4")) as usize;
    if m == 0 || k == 0 {
        return Err(HarnessError::Format(format!("binary header declares m={m}, K={k}")));
    }
    let expected = 16 + k * m * 16;
    if bytes.len() != expected {
        return Err(HarnessError::Format(format!(
            "binary sample file has {} bytes, expected {expected} for m={m}, K={k}",
            bytes.len()
        )));
    }
    let mut samples = Vec::with_capacity(k);
    let mut off = 16;
    for _ in 0..k {
        let mut entries = Vec::with_capacity(m);
        for _ in 0..m {
            let re = f64::from_le_bytes(bytes[off..off + 8].try_into().expect("slice of 8"));
            let im = f64::from_le_bytes(bytes[off + 8..off + 16].try_into().expect("slice of 8"));
            entries.push(num_complex::Complex64::new(re, im));
            off += 16;
        }
        samples.push(ComplexVector::from_vec(entries));
    }
    Ok(samples)
}

fn read_samples_csv(bytes: &[u8]) -> Result<Vec<ComplexVector>> {
    let text = std::str::from_utf8(bytes)
        .map_err(|_| HarnessError::Format("sample file is neither binary (no magic) nor UTF-8 CSV".into()))?;
    let mut samples = Vec::new();
    let mut dim = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        // Skip a header row of column names.
        if lineno == 0 && line.chars().any(|c| c.is_ascii_alphabetic()) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if !fields.len().is_multiple_of(2) {
            return Err(HarnessError::Format(format!(
                "CSV line {} has {} fields; need re,im pairs",
                lineno + 1,
                fields.len()
            )));
        }
        let mut entries = Vec::with_capacity(fields.len() / 2);
        for pair in fields.chunks(2) {
            let re: f64 = pair[0]
                .trim()
                .parse()
                .map_err(|_| HarnessError::Format(format!("bad float {:?} on line {}", pair[0], lineno + 1)))?;
            let im: f64 = pair[1]
                .trim()
                .parse()
                .map_err(|_| HarnessError::Format(format!("bad float {:?} on line {}", pair[1], lineno + 1)))?;
            entries.push(num_complex::Complex64::new(re, im));
        }
        match dim {
            None => dim = Some(entries.len()),
            Some(d) if d != entries.len() => {
                return Err(HarnessError::Format(format!(
                    "CSV line {} has dimension {}, expected {d}",
                    lineno + 1,
                    entries.len()
                )))
            }
            _ => {}
        }
        samples.push(ComplexVector::from_vec(entries));
    }
    if samples.is_empty() {
        return Err(HarnessError::Format("sample file contains no samples".into()));
    }
    Ok(samples)
}
