//! JSON system specs and CSV signal files.
//!
//! Signals are written as `t,re,im` (scalar) or `t,re0,im0,re1,im1,…`
//! (vector) with 17 significant digits, so doubles round-trip exactly.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::signal::Signal;
use crate::system::{validate_spec, SpectralSystem, SpectralSystemSpec};

/// Relative tolerance on the spacing of time stamps read from CSV.
pub const GRID_REL_TOL: f64 = 1e-9;

pub fn parse_spec(json: &str) -> Result<SpectralSystem> {
    let spec: SpectralSystemSpec = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(validate_spec(&spec)?)
}

pub fn read_spec(path: impl AsRef<Path>) -> Result<SpectralSystem> {
    let mut s = String::new();
    File::open(path.as_ref())?.read_to_string(&mut s)?;
    parse_spec(&s)
}

pub fn spec_to_json(sys: &SpectralSystem) -> String {
    serde_json::to_string_pretty(&sys.to_spec()).expect("spec serialises")
}

pub fn write_spec(sys: &SpectralSystem, path: impl AsRef<Path>) -> Result<()> {
    let mut f = BufWriter::new(File::create(path.as_ref())?);
    writeln!(f, "{}", spec_to_json(sys))?;
    f.flush()?;
    Ok(())
}

/// Shortest fixed-width rendering that round-trips a double.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_err(e: csv::Error) -> Error {
    if e.is_io_error() {
        Error::Io(e.to_string())
    } else {
        Error::Parse(e.to_string())
    }
}

/// Writes a header and numeric rows.
pub fn write_table<W: Write>(w: W, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header).map_err(csv_err)?;
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::LengthMismatch {
                what: "table row",
                expected: header.len(),
                found: row.len(),
            });
        }
        out.write_record(row.iter().map(|x| fmt_f64(*x))).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

fn signal_header(width: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    if width == 1 {
        h.extend(["re".to_string(), "im".to_string()]);
    } else {
        for i in 0..width {
            h.extend([format!("re{i}"), format!("im{i}")]);
        }
    }
    h
}

pub fn write_signal_csv<W: Write>(w: W, sig: &Signal) -> Result<()> {
    let header = signal_header(sig.width());
    let refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = (0..sig.len()).map(|k| {
        let mut row = vec![sig.time(k)];
        for z in sig.row(k) {
            row.extend([z.re, z.im]);
        }
        row
    });
    write_table(w, &refs, rows)
}

pub fn save_signal_csv(sig: &Signal, path: impl AsRef<Path>) -> Result<()> {
    write_signal_csv(BufWriter::new(File::create(path.as_ref())?), sig)
}

/// Reads a signal written by [`write_signal_csv`]. The grid must start at 0
/// and be uniform; `dt` is taken from the time column unless there is only
/// one row, in which case `dt_hint` is required.
pub fn read_signal_csv<R: Read>(r: R, dt_hint: Option<f64>) -> Result<Signal> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let header = rdr.headers().map_err(csv_err)?.clone();
    let cols = header.len();
    if cols < 3 || cols % 2 == 0 || &header[0] != "t" {
        return Err(Error::Parse(format!(
            "expected header `t,re,im` (or `t,re0,im0,…`), found `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let width = (cols - 1) / 2;
    let mut times = Vec::new();
    let mut flat = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let nums = rec
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse(format!("row {}: {e}", line + 2)))?;
        if nums.len() != cols {
            return Err(Error::Parse(format!(
                "row {} has {} fields, expected {cols}",
                line + 2,
                nums.len()
            )));
        }
        times.push(nums[0]);
        for i in 0..width {
            flat.push(Complex64::new(nums[1 + 2 * i], nums[2 + 2 * i]));
        }
    }
    let dt = match (times.len(), dt_hint) {
        (0, Some(dt)) | (1, Some(dt)) => dt,
        (0 | 1, None) => return Err(Error::InvalidSignal("need at least two rows or an explicit dt".into())),
        _ => times[1] - times[0],
    };
    if !times.is_empty() && times[0].abs() > GRID_REL_TOL * dt {
        return Err(Error::InvalidSignal(format!(
            "grid must start at t = 0, found {}",
            times[0]
        )));
    }
    for (k, t) in times.iter().enumerate() {
        if (t - k as f64 * dt).abs() > GRID_REL_TOL * dt * (1.0 + k as f64) {
            return Err(Error::InvalidSignal(format!(
                "non-uniform grid at row {}: t = {t}",
                k + 2
            )));
        }
    }
    Signal::new_vector(dt, width, flat)
}

pub fn load_signal_csv(path: impl AsRef<Path>, dt_hint: Option<f64>) -> Result<Signal> {
    read_signal_csv(BufReader::new(File::open(path.as_ref())?), dt_hint)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::TailModel;

    #[test]
    fn spec_schema_round_trip() {
        let json = r#"{"eigenvalues":[{"re":-1.0,"im":0.0},{"re":-2.0,"im":0.5}],"b":[{"re":1.0,"im":0.0},{"re":1.0,"im":0.0}],"c":[{"re":1.0,"im":0.0},{"re":-1.0,"im":0.0}],"feedthrough":{"re":0.25,"im":0.0},"tail":{"kind":"none"}}"#;
        let sys = parse_spec(json).unwrap();
        assert_eq!(sys.len(), 2);
        assert_eq!(sys.abscissa(), -1.0);
        assert_eq!(sys.tail(), &TailModel::None);
        assert_eq!(parse_spec(&spec_to_json(&sys)).unwrap().to_spec(), sys.to_spec());
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(matches!(parse_spec("{"), Err(Error::Parse(_))));
        let bad = r#"{"eigenvalues":[{"re":-1.0,"im":0.0}],"b":[],"c":[{"re":1.0,"im":0.0}]}"#;
        assert!(matches!(parse_spec(bad), Err(Error::Validation(_))));
    }

    #[test]
    fn signal_round_trips_bit_exactly() {
        let sig = Signal::from_fn(0.1, 50, |t| Complex64::new((t * 3.3).sin() / 7.0, -t.exp() * 1e-7)).unwrap();
        let mut buf = Vec::new();
        write_signal_csv(&mut buf, &sig).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,re,im\n"));
        let back = read_signal_csv(buf.as_slice(), None).unwrap();
        assert_eq!(back.samples(), sig.samples());
        assert_eq!(back.dt(), sig.dt());
    }

    #[test]
    fn vector_signal_round_trip() {
        let flat: Vec<Complex64> = (0..12).map(|i| Complex64::new(i as f64, -(i as f64))).collect();
        let sig = Signal::new_vector(0.5, 3, flat).unwrap();
        let mut buf = Vec::new();
        write_signal_csv(&mut buf, &sig).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("t,re0,im0,re1,im1,re2,im2\n"));
        assert_eq!(read_signal_csv(buf.as_slice(), None).unwrap(), sig);
    }

    #[test]
    fn signal_grid_checks() {
        let uneven = "t,re,im\n0,1,0\n0.1,1,0\n0.25,1,0\n";
        assert!(matches!(
            read_signal_csv(uneven.as_bytes(), None),
            Err(Error::InvalidSignal(_))
        ));
        let offset = "t,re,im\n1,1,0\n1.1,1,0\n";
        assert!(read_signal_csv(offset.as_bytes(), None).is_err());
        let single = "t,re,im\n0,2,0\n";
        assert!(read_signal_csv(single.as_bytes(), None).is_err());
        assert_eq!(read_signal_csv(single.as_bytes(), Some(0.5)).unwrap().len(), 1);
        assert!(matches!(
            read_signal_csv("x,y\n1,2\n".as_bytes(), None),
            Err(Error::Parse(_))
        ));
    }
}
