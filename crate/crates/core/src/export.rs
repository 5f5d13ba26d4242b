//! CSV and JSON serialization with stable output: sorted object keys and
//! shortest round-trip float formatting.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::euclid::LatticeFunction;
use crate::linalg::SparseMatrix;
use crate::scalar::{format_q, parse_q, Q};

#[derive(Debug, Error)]
pub enum ExportError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, ExportError>;

/// Pretty JSON with keys in sorted order.
pub fn to_sorted_json<T: Serialize>(value: &T) -> Result<String> {
    // serde_json's map is ordered by key unless `preserve_order` is enabled
    let v = serde_json::to_value(value)?;
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    File::create(path)?.write_all(text.as_bytes())?;
    Ok(())
}

pub fn read_json(path: &Path) -> Result<serde_json::Value> {
    let mut s = String::new();
    File::open(path)?.read_to_string(&mut s)?;
    Ok(serde_json::from_str(&s)?)
}

/// Lattice function as `m,n,value` rows.
pub fn write_lattice_csv<W: Write, S>(w: W, f: &LatticeFunction<S>, fmt: impl Fn(&S) -> String) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["m", "n", "value"])?;
    for ((m, n), v) in &f.values {
        wr.write_record([m.to_string(), n.to_string(), fmt(v)])?;
    }
    wr.flush()?;
    Ok(())
}

fn read_lattice_csv<R: Read, S>(r: R, parse: impl Fn(&str) -> Option<S>) -> Result<LatticeFunction<S>> {
    let mut rd = csv::Reader::from_reader(r);
    let mut out = LatticeFunction::default();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let field = |j: usize| rec.get(j).ok_or(ExportError::Parse { line, msg: "missing field".into() });
        let int = |s: &str| s.trim().parse::<i64>().map_err(|e| ExportError::Parse { line, msg: e.to_string() });
        let m = int(field(0)?)?;
        let n = int(field(1)?)?;
        let v = parse(field(2)?.trim()).ok_or(ExportError::Parse { line, msg: format!("bad value {:?}", field(2)) })?;
        out.values.insert((m, n), v);
    }
    Ok(out)
}

pub fn read_lattice_csv_exact<R: Read>(r: R) -> Result<LatticeFunction<Q>> {
    read_lattice_csv(r, |s| parse_q(s).ok())
}

pub fn read_lattice_csv_f64<R: Read>(r: R) -> Result<LatticeFunction<f64>> {
    read_lattice_csv(r, |s| s.parse().ok())
}

pub fn write_lattice_exact<W: Write>(w: W, f: &LatticeFunction<Q>) -> Result<()> {
    write_lattice_csv(w, f, format_q)
}

pub fn write_lattice_f64<W: Write>(w: W, f: &LatticeFunction<f64>) -> Result<()> {
    write_lattice_csv(w, f, |x| x.to_string())
}

/// Sparse matrix as `row,col,value` triplets.
pub fn write_triplets<W: Write>(w: W, a: &SparseMatrix<Q>) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["row", "col", "value"])?;
    for (i, j, v) in a.triplets() {
        wr.write_record([i.to_string(), j.to_string(), format_q(v)])?;
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q_frac;

    #[test]
    fn lattice_csv_round_trips() {
        let f: LatticeFunction<f64> = [((0, 0), 1.0 / 3.0), ((-2, 5), -1e-17), ((3, 1), 12345.678)].into_iter().collect();
        let mut buf = Vec::new();
        write_lattice_f64(&mut buf, &f).unwrap();
        assert_eq!(read_lattice_csv_f64(&buf[..]).unwrap(), f);
        let g: LatticeFunction<Q> = [((1, 2), q_frac(-3, 7)), ((0, 0), q_frac(4, 1))].into_iter().collect();
        let mut buf = Vec::new();
        write_lattice_exact(&mut buf, &g).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().contains("-3/7"));
        assert_eq!(read_lattice_csv_exact(&buf[..]).unwrap(), g);
        assert!(matches!(read_lattice_csv_exact("m,n,value\n1,x,2\n".as_bytes()), Err(ExportError::Parse { line: 2, .. })));
    }

    #[test]
    fn json_keys_sorted() {
        #[derive(Serialize)]
        struct S {
            zeta: u8,
            alpha: u8,
        }
        let s = to_sorted_json(&S { zeta: 1, alpha: 2 }).unwrap();
        assert!(s.find("alpha").unwrap() < s.find("zeta").unwrap());
    }
}
