//! Point clouds as CSV or as the `AFPC1` binary format, and box-count
//! tables as CSV.
//!
//! Binary layout, little-endian: the magic `AFPC1`, a source tag byte, the
//! projection angle and the resolution as `f64`, the point count as `u64`,
//! then `x, y` pairs of `f64`.

use std::io::{Read, Write};

use super::boxdim::BoxDimEstimate;
use super::cloud::{CloudSource, PointCloud};
use crate::error::{Error, Result};
use crate::fmt_g;

pub const MAGIC: &[u8; 5] = b"AFPC1";

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

pub fn write_csv<W: Write>(cloud: &PointCloud, mut w: W) -> Result<()> {
    writeln!(w, "# resolution={} source={}", fmt_g(cloud.resolution), cloud.source).map_err(io_err)?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["x", "y"]).map_err(io_err)?;
    for p in &cloud.points {
        out.write_record([fmt_g(p[0]), fmt_g(p[1])]).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

/// Reads `x,y` rows. A leading `# resolution=… source=…` comment is
/// honoured; without one the cloud is `Imported` with resolution 0.
pub fn read_csv<R: Read>(mut r: R) -> Result<PointCloud> {
    let mut text = String::new();
    r.read_to_string(&mut text).map_err(io_err)?;
    let mut resolution = 0.0;
    let mut source = CloudSource::Imported;
    if let Some(first) = text.lines().next().and_then(|l| l.strip_prefix('#')) {
        for field in first.split_whitespace() {
            match field.split_once('=') {
                Some(("resolution", v)) => {
                    resolution = v
                        .parse()
                        .map_err(|_| Error::invalid("geometry", format!("bad resolution {v:?} on line 1")))?
                }
                Some(("source", v)) => source = v.parse()?,
                _ => {}
            }
        }
    }
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut points = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(io_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 2 {
            return Err(Error::invalid("geometry", format!("line {line}: expected two columns")));
        }
        let mut p = [0.0; 2];
        for (k, field) in rec.iter().enumerate() {
            p[k] = field
                .parse()
                .map_err(|_| Error::invalid("geometry", format!("line {line}: bad number {field:?}")))?;
        }
        points.push(p);
    }
    Ok(PointCloud::new(points, resolution, source))
}

fn source_tag(s: &CloudSource) -> (u8, f64) {
    match s {
        CloudSource::X => (0, 0.0),
        CloudSource::Xprime => (1, 0.0),
        CloudSource::XdoublePrime => (2, 0.0),
        CloudSource::Condensation => (3, 0.0),
        CloudSource::Projection { angle } => (4, *angle),
        CloudSource::Imported => (5, 0.0),
    }
}

pub fn write_binary<W: Write>(cloud: &PointCloud, mut w: W) -> Result<()> {
    let (tag, angle) = source_tag(&cloud.source);
    let mut buf = Vec::with_capacity(30 + 16 * cloud.len());
    buf.extend_from_slice(MAGIC);
    buf.push(tag);
    buf.extend_from_slice(&angle.to_le_bytes());
    buf.extend_from_slice(&cloud.resolution.to_le_bytes());
    buf.extend_from_slice(&(cloud.len() as u64).to_le_bytes());
    for p in &cloud.points {
        buf.extend_from_slice(&p[0].to_le_bytes());
        buf.extend_from_slice(&p[1].to_le_bytes());
    }
    w.write_all(&buf).map_err(io_err)
}

pub fn read_binary<R: Read>(mut r: R) -> Result<PointCloud> {
    let mut buf = Vec::new();
    r.read_to_end(&mut buf).map_err(io_err)?;
    let bad = |what: &str| Error::invalid("geometry", format!("not an AFPC1 cloud: {what}"));
    if buf.len() < 30 || &buf[..5] != MAGIC {
        return Err(bad("missing header"));
    }
    let f = |at: usize| f64::from_le_bytes(buf[at..at + 8].try_into().expect("8 bytes"));
    let angle = f(6);
    let resolution = f(14);
    let count = u64::from_le_bytes(buf[22..30].try_into().expect("8 bytes")) as usize;
    let source = match buf[5] {
        0 => CloudSource::X,
        1 => CloudSource::Xprime,
        2 => CloudSource::XdoublePrime,
        3 => CloudSource::Condensation,
        4 => CloudSource::Projection { angle },
        5 => CloudSource::Imported,
        t => return Err(bad(&format!("unknown source tag {t}"))),
    };
    if buf.len() != 30 + 16 * count {
        return Err(bad(&format!("expected {count} points, found {} bytes of data", buf.len() - 30)));
    }
    let points = (0..count).map(|i| [f(30 + 16 * i), f(38 + 16 * i)]).collect();
    Ok(PointCloud::new(points, resolution, source))
}

/// Rows `scale,count,offsetId`.
pub fn write_box_counts_csv<W: Write>(est: &BoxDimEstimate, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["scale", "count", "offsetId"]).map_err(io_err)?;
    for r in &est.rows {
        out.write_record([fmt_g(r.scale), r.count.to_string(), r.offset_id.to_string()])
            .map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}
