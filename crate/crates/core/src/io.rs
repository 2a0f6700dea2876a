//! Loop CSV files with a JSON header line, report tables and chain tables.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so files
//! read back bit-identically and never depend on the locale.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::applications::BoundChain;
use crate::error::{QgError, Result};
use crate::geometry::{Loop, LoopSummary};
use crate::inequalities::{strong_qii, weak_qii};
use crate::scalar::Real;
use crate::state::StateVector;

/// First line of a loop file, after `# `.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopHeader {
    /// Hilbert-space dimension.
    pub m: usize,
    pub n: usize,
    pub generator: String,
    #[serde(default)]
    pub parameters: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl LoopHeader {
    pub fn new(lp: &Loop<impl Real>, generator: &str, parameters: serde_json::Value, seed: Option<u64>) -> Self {
        LoopHeader { m: lp.dim(), n: lp.len(), generator: generator.into(), parameters, seed }
    }
}

pub fn write_loop_csv<T: Real, W: Write>(mut w: W, lp: &Loop<T>, header: &LoopHeader) -> Result<()> {
    writeln!(w, "# {}", serde_json::to_string(header)?)?;
    let mut out = csv::Writer::from_writer(w);
    let mut cols = vec!["index".to_string()];
    for i in 0..lp.dim() {
        cols.push(format!("re{i}"));
        cols.push(format!("im{i}"));
    }
    out.write_record(&cols)?;
    for (j, s) in lp.states().iter().enumerate() {
        let mut row = vec![j.to_string()];
        for a in s.amplitudes() {
            row.push(a.re.as_f64().to_string());
            row.push(a.im.as_f64().to_string());
        }
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_loop_csv<T: Real, R: Read>(r: R) -> Result<(LoopHeader, Loop<T>)> {
    let mut reader = BufReader::new(r);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    let json = first
        .trim_end()
        .strip_prefix('#')
        .ok_or_else(|| QgError::Parse("loop file must start with a `# {json}` header line".into()))?;
    let header: LoopHeader = serde_json::from_str(json.trim())?;
    let mut rdr = csv::Reader::from_reader(reader);
    let width = 1 + 2 * header.m;
    let mut states = Vec::with_capacity(header.n);
    for (j, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != width {
            return Err(QgError::Parse(format!("row {j}: expected {width} columns, found {}", rec.len())));
        }
        let vals = rec
            .iter()
            .skip(1)
            .map(|s| s.trim().parse::<f64>().map_err(|e| QgError::Parse(format!("row {j}: {s:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let amps = vals.chunks(2).map(|p| Complex::new(T::lit(p[0]), T::lit(p[1]))).collect();
        states.push(StateVector::from_normalized(amps)?);
    }
    if states.len() != header.n {
        return Err(QgError::Parse(format!("header says n = {}, file has {} rows", header.n, states.len())));
    }
    Ok((header, Loop::new(states)?))
}

pub fn save_loop<T: Real>(path: &Path, lp: &Loop<T>, header: &LoopHeader) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_loop_csv(&mut w, lp, header)?;
    w.flush()?;
    Ok(())
}

pub fn load_loop<T: Real>(path: &Path) -> Result<(LoopHeader, Loop<T>)> {
    read_loop_csv(File::open(path)?)
}

/// One row of a margins table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopRecord {
    pub generator: String,
    pub params: String,
    pub d_fs: f64,
    pub gamma_b: f64,
    pub strong_margin: f64,
    pub weak_margin: f64,
    pub weak_magnitude_margin: f64,
    pub tol: f64,
}

impl LoopRecord {
    pub fn from_summary<T: Real>(generator: &str, params: &str, s: &LoopSummary<T>) -> Self {
        let strong = strong_qii(s);
        let weak = weak_qii(s);
        LoopRecord {
            generator: generator.into(),
            params: params.into(),
            d_fs: s.d_fs.as_f64(),
            gamma_b: s.gamma_b.as_f64(),
            strong_margin: strong.margin,
            weak_margin: weak.margin,
            weak_magnitude_margin: weak.magnitude_margin.unwrap_or(weak.margin),
            tol: weak.tol,
        }
    }
}

pub fn write_records_csv<W: Write>(w: W, records: &[LoopRecord]) -> Result<()> {
    write_rows_csv(w, records)
}

pub fn write_chain_csv<W: Write>(w: W, chain: &BoundChain) -> Result<()> {
    write_rows_csv(w, &chain.entries)
}

pub fn write_rows_csv<W: Write, S: Serialize>(w: W, rows: &[S]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::summarize;
    use crate::loops::{bloch_circle, fourier_loop, FourierLoopSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn loop_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let spec = FourierLoopSpec::<f64>::random(3, 2, 64, 1.0, &mut rng);
        let lp = fourier_loop(&spec).unwrap();
        let header = LoopHeader::new(&lp, "fourier", serde_json::json!({"k": 2}), Some(4));
        let mut buf = Vec::new();
        write_loop_csv(&mut buf, &lp, &header).unwrap();
        let (h, back) = read_loop_csv::<f64, _>(buf.as_slice()).unwrap();
        assert_eq!(h, header);
        assert_eq!(back.states(), lp.states());
    }

    #[test]
    fn malformed_loop_files() {
        assert!(read_loop_csv::<f64, _>("index,re0\n".as_bytes()).is_err());
        let bad = "# {\"m\":2,\"n\":3,\"generator\":\"x\"}\nindex,re0,im0,re1,im1\n0,1,0,0,0\n";
        assert!(matches!(read_loop_csv::<f64, _>(bad.as_bytes()), Err(QgError::Parse(_))));
    }

    #[test]
    fn record_table() {
        let s = summarize(&bloch_circle(1.0f64, 128).unwrap());
        let rec = LoopRecord::from_summary("circle", "theta=1", &s);
        let mut buf = Vec::new();
        write_records_csv(&mut buf, std::slice::from_ref(&rec)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("generator,params,d_fs,gamma_b,strong_margin"));
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let back: LoopRecord = rdr.deserialize().next().unwrap().unwrap();
        assert_eq!(back, rec);
    }
}
