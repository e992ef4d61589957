//! IQ sample files: CSV with header `index,re,im`, one row per sample.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::signal::ComplexSignal;

const HEADER: [&str; 3] = ["index", "re", "im"];

pub fn read_iq_from<R: Read>(reader: R) -> Result<ComplexSignal> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.iter().map(str::trim).ne(HEADER) {
        return Err(Error::Parse { line: 1, msg: format!("expected header `index,re,im`, found `{}`", header.iter().collect::<Vec<_>>().join(",")) });
    }
    let mut samples = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 3 {
            return Err(Error::Parse { line, msg: format!("expected 3 fields, found {}", record.len()) });
        }
        let field = |i: usize| record[i].trim();
        let index: usize = field(0).parse().map_err(|_| Error::Parse { line, msg: format!("bad index `{}`", field(0)) })?;
        if index != samples.len() {
            return Err(Error::Parse { line, msg: format!("index {index} out of sequence, expected {}", samples.len()) });
        }
        let parse = |i: usize, name: &str| -> Result<f64> {
            field(i).parse().map_err(|_| Error::Parse { line, msg: format!("bad {name} value `{}`", field(i)) })
        };
        samples.push(Complex64::new(parse(1, "re")?, parse(2, "im")?));
    }
    ComplexSignal::new(samples)
}

pub fn read_iq(path: &Path) -> Result<ComplexSignal> {
    read_iq_from(BufReader::new(File::open(path)?))
}

/// Writes shortest round-trip decimal values with LF line endings.
pub fn write_iq_to<W: Write>(mut writer: W, signal: &ComplexSignal) -> Result<()> {
    writeln!(writer, "{}", HEADER.join(","))?;
    for (i, s) in signal.samples().iter().enumerate() {
        writeln!(writer, "{i},{},{}", s.re, s.im)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_iq(path: &Path, signal: &ComplexSignal) -> Result<()> {
    write_iq_to(BufWriter::new(File::create(path)?), signal)
}
