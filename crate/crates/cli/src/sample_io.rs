//! Plain-text sample files: one value per line, `#` comment lines.

use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use gi0_core::Sample;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SampleFileError {
    #[error("line {line}: cannot parse {text:?} as a number")]
    Parse { line: usize, text: String },
    #[error("line {line}: value {value} is not finite and > 0")]
    Value { line: usize, value: f64 },
    #[error("file contains no values")]
    Empty,
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Writes header comments followed by each value with 17 significant digits.
pub fn write_sample<W: Write>(mut out: W, sample: &Sample, header: &[(String, String)]) -> io::Result<()> {
    let mut buf = String::with_capacity(24 * sample.len() + 64 * header.len());
    for (k, v) in header {
        let _ = writeln!(buf, "# {k}: {v}");
    }
    for v in sample.values() {
        let _ = writeln!(buf, "{v:.16e}");
    }
    out.write_all(buf.as_bytes())?;
    out.flush()
}

pub fn read_sample<R: BufRead>(input: R) -> Result<Sample, SampleFileError> {
    let mut values = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let value: f64 = text
            .parse()
            .map_err(|_| SampleFileError::Parse { line: i + 1, text: text.to_owned() })?;
        if !(value.is_finite() && value > 0.0) {
            return Err(SampleFileError::Value { line: i + 1, value });
        }
        values.push(value);
    }
    if values.is_empty() {
        return Err(SampleFileError::Empty);
    }
    Ok(Sample::new(values).expect("values were validated"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let s = Sample::new(vec![0.1, 1.0 / 3.0, 1e-300, 123456.789, f64::MAX]).unwrap();
        let mut buf = Vec::new();
        write_sample(&mut buf, &s, &[("seed".into(), "7".into())]).unwrap();
        let back = read_sample(buf.as_slice()).unwrap();
        assert_eq!(back.values(), s.values());
    }

    #[test]
    fn reports_line_numbers() {
        let err = read_sample("# h\n1.0\nabc\n".as_bytes()).unwrap_err();
        assert!(matches!(err, SampleFileError::Parse { line: 3, .. }));
        let err = read_sample("1.0\n-2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, SampleFileError::Value { line: 2, .. }));
        assert!(matches!(read_sample("# only\n\n".as_bytes()), Err(SampleFileError::Empty)));
    }
}
