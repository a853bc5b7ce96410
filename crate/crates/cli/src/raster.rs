//! Single-band rasters.
//!
//! The binary form is a JSON sidecar plus a headerless little-endian `f32`
//! payload in row-major order; NaN marks nodata. A whitespace-separated text
//! matrix (one image row per line) is accepted as input too.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("{path}: invalid sidecar: {source}")]
    Sidecar { path: PathBuf, source: serde_json::Error },
    #[error("{path}: unsupported dtype {dtype:?} (expected \"f32le\")")]
    Dtype { path: PathBuf, dtype: String },
    #[error("{path}: byte offset {offset}: payload ends early, expected {expected} bytes")]
    ShortPayload { path: PathBuf, offset: usize, expected: usize },
    #[error("{path}: byte offset {offset}: {expected} bytes expected, payload continues")]
    LongPayload { path: PathBuf, offset: usize, expected: usize },
    #[error("{path}: byte offset {offset}: cannot parse {token:?} as a number")]
    Token { path: PathBuf, offset: usize, token: String },
    #[error("{path}: byte offset {offset}: row {row} has {found} values, expected {expected}")]
    Ragged { path: PathBuf, offset: usize, row: usize, found: usize, expected: usize },
    #[error("{path}: byte offset {offset}: negative pixel value {value}")]
    Negative { path: PathBuf, offset: usize, value: f64 },
    #[error("{path}: raster has no pixels")]
    Empty { path: PathBuf },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    /// Row-major, NaN for nodata.
    pub pixels: Vec<f32>,
}

impl Raster {
    pub fn new(width: usize, height: usize, pixels: Vec<f32>) -> Self {
        assert_eq!(width * height, pixels.len(), "pixel count must equal width * height");
        Self { width, height, pixels }
    }

    pub fn get(&self, row: usize, col: usize) -> f32 {
        self.pixels[row * self.width + col]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub width: usize,
    pub height: usize,
    pub dtype: String,
    pub nodata: String,
    /// Payload file, relative to the sidecar's directory.
    pub payload: String,
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> RasterError + '_ {
    move |source| RasterError::Io { path: path.to_owned(), source }
}

/// Writes `<stem>.json` and the payload `<stem>.f32` next to it.
pub fn write_raster(sidecar_path: &Path, raster: &Raster) -> Result<(), RasterError> {
    let payload_path = sidecar_path.with_extension("f32");
    let payload_name = payload_path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "payload.f32".into());
    let sidecar = Sidecar {
        width: raster.width,
        height: raster.height,
        dtype: "f32le".into(),
        nodata: "NaN".into(),
        payload: payload_name,
    };
    let mut bytes = Vec::with_capacity(raster.pixels.len() * 4);
    for p in &raster.pixels {
        bytes.extend_from_slice(&p.to_le_bytes());
    }
    fs::write(&payload_path, bytes).map_err(io_err(&payload_path))?;
    let mut json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    json.push('\n');
    fs::write(sidecar_path, json).map_err(io_err(sidecar_path))
}

/// Reads a sidecar raster (`.json`) or a text matrix (any other extension).
pub fn read_raster(path: &Path) -> Result<Raster, RasterError> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        read_sidecar(path)
    } else {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        parse_text_matrix(path, &text)
    }
}

fn read_sidecar(path: &Path) -> Result<Raster, RasterError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let sidecar: Sidecar =
        serde_json::from_str(&text).map_err(|source| RasterError::Sidecar { path: path.to_owned(), source })?;
    if sidecar.dtype != "f32le" {
        return Err(RasterError::Dtype { path: path.to_owned(), dtype: sidecar.dtype });
    }
    let payload_path = path.parent().unwrap_or(Path::new(".")).join(&sidecar.payload);
    let bytes = fs::read(&payload_path).map_err(io_err(&payload_path))?;
    let expected = sidecar.width * sidecar.height * 4;
    if expected == 0 {
        return Err(RasterError::Empty { path: path.to_owned() });
    }
    if bytes.len() < expected {
        return Err(RasterError::ShortPayload { path: payload_path, offset: bytes.len(), expected });
    }
    if bytes.len() > expected {
        return Err(RasterError::LongPayload { path: payload_path, offset: expected, expected });
    }
    let pixels = bytes.chunks_exact(4).map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]])).collect();
    Ok(Raster::new(sidecar.width, sidecar.height, pixels))
}

/// Parses rows of whitespace-separated numbers; `nan` marks nodata.
pub fn parse_text_matrix(path: &Path, text: &str) -> Result<Raster, RasterError> {
    let mut pixels = Vec::new();
    let mut width = None;
    let mut height = 0;
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let line_start = offset;
        offset += line.len();
        let content = line.trim_end();
        if content.trim().is_empty() || content.trim_start().starts_with('#') {
            continue;
        }
        let mut count = 0;
        let base = content.as_ptr() as usize;
        for token in content.split_whitespace() {
            let at = line_start + (token.as_ptr() as usize - base);
            let value: f64 = token
                .parse()
                .map_err(|_| RasterError::Token { path: path.to_owned(), offset: at, token: token.to_owned() })?;
            if value < 0.0 {
                return Err(RasterError::Negative { path: path.to_owned(), offset: at, value });
            }
            pixels.push(value as f32);
            count += 1;
        }
        match width {
            None => width = Some(count),
            Some(w) if w != count => {
                return Err(RasterError::Ragged {
                    path: path.to_owned(),
                    offset: line_start,
                    row: height + 1,
                    found: count,
                    expected: w,
                })
            }
            _ => {}
        }
        height += 1;
    }
    match width {
        Some(w) if w > 0 => Ok(Raster::new(w, height, pixels)),
        _ => Err(RasterError::Empty { path: path.to_owned() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_matrix_diagnostics() {
        let p = Path::new("m.txt");
        let r = parse_text_matrix(p, "1 2 3\n4 5 6\n").unwrap();
        assert_eq!((r.width, r.height), (3, 2));
        assert_eq!(r.get(1, 2), 6.0);
        match parse_text_matrix(p, "1 2 3\n4 x 6\n") {
            Err(RasterError::Token { offset, .. }) => assert_eq!(offset, 8),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_text_matrix(p, "1 2\n3\n"), Err(RasterError::Ragged { offset: 4, row: 2, .. })));
        assert!(matches!(parse_text_matrix(p, "1 -2\n"), Err(RasterError::Negative { offset: 2, .. })));
        assert!(matches!(parse_text_matrix(p, "\n# c\n"), Err(RasterError::Empty { .. })));
        let r = parse_text_matrix(p, "nan 1\n").unwrap();
        assert!(r.get(0, 0).is_nan());
    }
}
