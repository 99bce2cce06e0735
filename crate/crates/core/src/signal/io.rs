//! Grid-function serialization.
//!
//! Binary layout (version 1, little-endian):
//!
//! | bytes | content                  |
//! |-------|--------------------------|
//! | 4     | magic `DYGF`             |
//! | 4     | version, `u32`           |
//! | 3     | `n`, `m`, `L`, one byte each |
//! | 1     | reserved, zero           |
//! | 8     | cell count, `u64`        |
//! | 8·N   | values, `f64`, row-major |
//!
//! CSV layout (version 1): a comment line `# dyadic-lab grid-function v1 n=.. m=.. L=..`
//! followed by one record per first-factor cell holding the values along the
//! second factor.

use std::io::{BufRead, BufReader, Read, Write};

use crate::dyadic::Mesh;
use crate::error::{Error, Result};

use super::function::GridFunction;

const MAGIC: &[u8; 4] = b"DYGF";
pub const FORMAT_VERSION: u32 = 1;

pub fn write_binary<W: Write>(f: &GridFunction, mut w: W) -> Result<()> {
    let m = f.mesh();
    w.write_all(MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&[m.n(), m.m(), m.level(), 0])?;
    w.write_all(&(m.len() as u64).to_le_bytes())?;
    for v in f.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> Result<GridFunction> {
    let mut head = [0u8; 20];
    r.read_exact(&mut head)?;
    if &head[..4] != MAGIC {
        return Err(Error::Parse("not a grid-function file".into()));
    }
    let version = u32::from_le_bytes(head[4..8].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(Error::Parse(format!("unsupported format version {version}")));
    }
    let mesh = Mesh::new(head[8], head[9], head[10])?;
    let count = u64::from_le_bytes(head[12..20].try_into().unwrap());
    if count != mesh.len() as u64 {
        return Err(Error::Parse(format!("header announces {count} cells, mesh has {}", mesh.len())));
    }
    let mut buf = vec![0u8; 8 * mesh.len()];
    r.read_exact(&mut buf)?;
    let values = buf.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    GridFunction::from_values(mesh, values)
}

pub fn write_csv<W: Write>(f: &GridFunction, mut w: W) -> Result<()> {
    let m = f.mesh();
    writeln!(w, "# dyadic-lab grid-function v{FORMAT_VERSION} n={} m={} L={}", m.n(), m.m(), m.level())?;
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    for x1 in 0..m.rows() {
        out.write_record(f.row(x1).iter().map(|v| format!("{v:?}")))?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(r: R) -> Result<GridFunction> {
    let mut r = BufReader::new(r);
    let mut first = String::new();
    r.read_line(&mut first)?;
    let mesh = parse_header(first.trim())?;
    let mut rd = csv::ReaderBuilder::new().has_headers(false).comment(Some(b'#')).from_reader(r);
    let mut values = Vec::with_capacity(mesh.len());
    for rec in rd.records() {
        let rec = rec?;
        if rec.len() != mesh.cols() {
            return Err(Error::Parse(format!("row of length {}, expected {}", rec.len(), mesh.cols())));
        }
        for field in rec.iter() {
            values.push(field.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{field:?}: {e}")))?);
        }
    }
    GridFunction::from_values(mesh, values)
}

fn parse_header(line: &str) -> Result<Mesh> {
    let bad = || Error::Parse(format!("bad header {line:?}"));
    let rest = line.strip_prefix("# dyadic-lab grid-function").ok_or_else(bad)?;
    let mut it = rest.split_whitespace();
    let version = it.next().and_then(|v| v.strip_prefix('v')).ok_or_else(bad)?;
    if version.parse::<u32>().map_err(|_| bad())? != FORMAT_VERSION {
        return Err(Error::Parse(format!("unsupported format version {version}")));
    }
    let mut dims = [None; 3];
    for kv in it {
        let (k, v) = kv.split_once('=').ok_or_else(bad)?;
        let v: u8 = v.parse().map_err(|_| bad())?;
        match k {
            "n" => dims[0] = Some(v),
            "m" => dims[1] = Some(v),
            "L" => dims[2] = Some(v),
            _ => return Err(bad()),
        }
    }
    match dims {
        [Some(n), Some(m), Some(l)] => Mesh::new(n, m, l),
        _ => Err(bad()),
    }
}
