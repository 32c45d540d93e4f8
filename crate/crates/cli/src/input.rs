//! Frame readers and writers: headerless CSV point clouds and PGM images.

use std::fs;
use std::path::{Path, PathBuf};

use tdacp::{PointCloud, ScalarGrid};

use crate::CliError;

/// Frames in `path`: the file itself, or every file in the directory with
/// extension `ext`, ordered by file name.
pub fn list_frames(path: &Path, ext: &str) -> Result<Vec<PathBuf>, CliError> {
    let meta = fs::metadata(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    if meta.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(path)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x.eq_ignore_ascii_case(ext)))
        .collect();
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    if files.is_empty() {
        return Err(CliError::data(format!(
            "{}: no .{ext} files found",
            path.display()
        )));
    }
    Ok(files)
}

pub fn parse_csv_points(text: &str) -> Result<PointCloud, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| e.to_string())?;
        let line = record.position().map_or(0, |p| p.line());
        let row: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        rows.push(row.map_err(|e| format!("line {line}: {e}"))?);
    }
    PointCloud::new(rows).map_err(|e| e.to_string())
}

struct Tokens<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn skip_space(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn next(&mut self) -> Option<&'a [u8]> {
        self.skip_space();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn number(&mut self, what: &str) -> Result<usize, String> {
        let tok = self.next().ok_or_else(|| format!("missing {what}"))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| format!("bad {what}"))
    }
}

/// Parses a P2 (ASCII) or P5 (binary, big-endian when `maxval > 255`) image.
pub fn parse_pgm(bytes: &[u8]) -> Result<ScalarGrid, String> {
    let mut tok = Tokens { bytes, pos: 0 };
    let magic = tok.next().ok_or("empty file")?;
    let binary = match magic {
        b"P2" => false,
        b"P5" => true,
        _ => return Err("not a P2/P5 PGM file".into()),
    };
    let cols = tok.number("width")?;
    let rows = tok.number("height")?;
    let maxval = tok.number("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(format!("maxval {maxval} out of range"));
    }
    let n = rows * cols;
    let mut values = Vec::with_capacity(n);
    if binary {
        // exactly one whitespace byte separates the header from the raster
        let start = tok.pos + 1;
        let width = if maxval > 255 { 2 } else { 1 };
        let raster = bytes
            .get(start..start + n * width)
            .ok_or("truncated raster")?;
        if width == 1 {
            values.extend(raster.iter().map(|&b| b as f64));
        } else {
            values.extend(raster.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]]) as f64));
        }
    } else {
        for _ in 0..n {
            let v = tok.number("pixel")?;
            values.push(v as f64);
        }
    }
    if values.iter().any(|&v| v > maxval as f64) {
        return Err("pixel exceeds maxval".into());
    }
    ScalarGrid::new(rows, cols, values).map_err(|e| e.to_string())
}

/// Binary 16-bit PGM.
pub fn write_pgm16(rows: usize, cols: usize, pixels: &[u16]) -> Vec<u8> {
    let mut out = format!("P5\n{cols} {rows}\n65535\n").into_bytes();
    for p in pixels {
        out.extend_from_slice(&p.to_be_bytes());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ascii_pgm_with_comments() {
        let g = parse_pgm(b"P2\n# a row\n4 1\n# max\n3\n0 3 1 2\n").unwrap();
        assert_eq!((g.rows(), g.cols()), (1, 4));
        assert_eq!(g.values(), &[0.0, 3.0, 1.0, 2.0]);
    }

    #[test]
    fn binary_pgm_both_depths() {
        let g = parse_pgm(b"P5 2 1 255\n\x07\xff").unwrap();
        assert_eq!(g.values(), &[7.0, 255.0]);
        let bytes = write_pgm16(2, 2, &[0, 1, 256, 65535]);
        let g = parse_pgm(&bytes).unwrap();
        assert_eq!((g.rows(), g.cols()), (2, 2));
        assert_eq!(g.values(), &[0.0, 1.0, 256.0, 65535.0]);
    }

    #[test]
    fn bad_pgm() {
        assert!(parse_pgm(b"P6 1 1 255\n\x00").is_err());
        assert!(parse_pgm(b"P5 2 2 255\n\x00").is_err());
        assert!(parse_pgm(b"P2 2 1 70000\n1 2").is_err());
        assert!(parse_pgm(b"P2 2 1 3\n1 9").is_err());
        assert!(parse_pgm(b"P2 2 2 3\n1 2 3").is_err());
    }

    #[test]
    fn csv_points() {
        let c = parse_csv_points("0,0\n1.5, 2\n\n").unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.point(1), &[1.5, 2.0]);
        assert!(parse_csv_points("0,0\n1\n").is_err());
        assert!(parse_csv_points("x,1\n").is_err());
        assert!(parse_csv_points("").is_err());
    }
}
