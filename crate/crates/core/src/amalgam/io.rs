//! Binary field files and norm CSV output.

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::amalgam::field::GridField;
use crate::amalgam::grid::GridSpec;
use crate::amalgam::norms::NormSpec;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"AMLG";
pub const VERSION: u32 = 1;

/// Header: magic, version u32, d u32, m u32, cells per axis (d × u64),
/// h f64, origin (d × i64); then component-major f64 samples, all little-endian.
pub fn write_field<W: Write>(mut w: W, f: &GridField) -> Result<()> {
    let spec = f.spec();
    w.write_all(MAGIC)?;
    w.write_u32::<LittleEndian>(VERSION)?;
    w.write_u32::<LittleEndian>(spec.d() as u32)?;
    w.write_u32::<LittleEndian>(f.components() as u32)?;
    for &c in spec.cells_per_axis() {
        w.write_u64::<LittleEndian>(c as u64)?;
    }
    w.write_f64::<LittleEndian>(spec.h())?;
    for &o in spec.origin() {
        w.write_i64::<LittleEndian>(o)?;
    }
    for &v in f.data() {
        w.write_f64::<LittleEndian>(v)?;
    }
    Ok(())
}

pub fn read_field<R: Read>(mut r: R) -> Result<GridField> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("missing AMLG magic".into()));
    }
    let version = r.read_u32::<LittleEndian>()?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let d = r.read_u32::<LittleEndian>()? as usize;
    let m = r.read_u32::<LittleEndian>()? as usize;
    if !(1..=3).contains(&d) || m == 0 {
        return Err(Error::Format(format!("bad header d={d} m={m}")));
    }
    let mut cells = Vec::with_capacity(d);
    for _ in 0..d {
        cells.push(r.read_u64::<LittleEndian>()? as usize);
    }
    let h = r.read_f64::<LittleEndian>()?;
    let mut origin = Vec::with_capacity(d);
    for _ in 0..d {
        origin.push(r.read_i64::<LittleEndian>()?);
    }
    let spec = GridSpec::new(d, &cells, h, &origin)?;
    let mut data = vec![0.0; m * spec.len()];
    r.read_f64_into::<LittleEndian>(&mut data)?;
    GridField::new(spec, m, data)
}

/// One row per `(time, value)` under a header naming the norm.
pub fn write_norm_csv<W: Write>(w: W, spec: &NormSpec, rows: &[(f64, f64)]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["t", &spec.to_string()])?;
    for (t, v) in rows {
        out.write_record([t.to_string(), v.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgam::exponent::Exponent;

    #[test]
    fn binary_round_trip() {
        let g = GridSpec::new(2, &[4, 6], 0.5, &[-1, 2]).unwrap();
        let f = GridField::from_fn(g, 3, |x, o| {
            o[0] = x[0];
            o[1] = x[1] * x[0];
            o[2] = -1.25;
        });
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        assert_eq!(&buf[..4], b"AMLG");
        assert_eq!(read_field(buf.as_slice()).unwrap(), f);
    }

    #[test]
    fn rejects_bad_magic() {
        let buf = b"XXXX\x01\x00\x00\x00".to_vec();
        assert!(matches!(read_field(buf.as_slice()), Err(Error::Format(_))));
    }

    #[test]
    fn csv_header_names_the_norm() {
        let mut buf = Vec::new();
        let spec = NormSpec::Epq {
            p: Exponent::of(2.0),
            q: Exponent::INF,
        };
        write_norm_csv(&mut buf, &spec, &[(0.5, 1.0), (1.0, 0.25)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "t,E^2_inf");
        assert_eq!(text.lines().count(), 3);
    }
}
