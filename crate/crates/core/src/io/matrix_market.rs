//! Matrix Market text format (coordinate and array storage).

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, ZERO};
use crate::structures::Pattern;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MmFormat {
    Coordinate,
    Array,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MmField {
    Real,
    Complex,
    Integer,
    Pattern,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MmSymmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MatrixMarketHeader {
    pub format: MmFormat,
    pub field: MmField,
    pub symmetry: MmSymmetry,
}

/// Parsed file: dense matrix plus the stored-position pattern (explicit
/// zeros included, symmetric mirrors expanded).
#[derive(Clone, Debug)]
pub struct MatrixMarketData {
    pub header: MatrixMarketHeader,
    pub rows: usize,
    pub cols: usize,
    /// Number of entries stored in the file.
    pub stored_entries: usize,
    pub matrix: ComplexMatrix,
    pub pattern: Vec<(usize, usize)>,
}

impl MatrixMarketData {
    pub fn square_pattern(&self) -> Result<Pattern> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "pattern of a {}x{} matrix used as a structure",
                self.rows, self.cols
            )));
        }
        Pattern::new(self.rows, self.pattern.clone())
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(line: &str, lineno: usize) -> Result<MatrixMarketHeader> {
    let toks: Vec<String> = line.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if toks.len() != 5 || toks[0] != "%%matrixmarket" {
        return Err(parse_err(lineno, "expected '%%MatrixMarket matrix <format> <field> <symmetry>'"));
    }
    if toks[1] != "matrix" {
        return Err(parse_err(lineno, format!("unsupported object '{}'", toks[1])));
    }
    let format = match toks[2].as_str() {
        "coordinate" => MmFormat::Coordinate,
        "array" => MmFormat::Array,
        other => return Err(parse_err(lineno, format!("unknown format '{other}'"))),
    };
    let field = match toks[3].as_str() {
        "real" | "double" => MmField::Real,
        "complex" => MmField::Complex,
        "integer" => MmField::Integer,
        "pattern" => MmField::Pattern,
        other => return Err(parse_err(lineno, format!("unknown field '{other}'"))),
    };
    let symmetry = match toks[4].as_str() {
        "general" => MmSymmetry::General,
        "symmetric" => MmSymmetry::Symmetric,
        "skew-symmetric" => MmSymmetry::SkewSymmetric,
        "hermitian" => MmSymmetry::Hermitian,
        other => return Err(parse_err(lineno, format!("unknown symmetry '{other}'"))),
    };
    if format == MmFormat::Array && field == MmField::Pattern {
        return Err(parse_err(lineno, "array format cannot have a pattern field"));
    }
    Ok(MatrixMarketHeader { format, field, symmetry })
}

fn parse_f64(tok: Option<&str>, lineno: usize, what: &str) -> Result<f64> {
    let tok = tok.ok_or_else(|| parse_err(lineno, format!("missing {what}")))?;
    let v: f64 = tok
        .parse()
        .map_err(|_| parse_err(lineno, format!("invalid {what} '{tok}'")))?;
    if !v.is_finite() {
        return Err(parse_err(lineno, format!("non-finite {what} '{tok}'")));
    }
    Ok(v)
}

fn parse_index(tok: Option<&str>, lineno: usize, bound: usize, what: &str) -> Result<usize> {
    let tok = tok.ok_or_else(|| parse_err(lineno, format!("missing {what}")))?;
    let v: usize = tok
        .parse()
        .map_err(|_| parse_err(lineno, format!("invalid {what} '{tok}'")))?;
    if v == 0 || v > bound {
        return Err(parse_err(lineno, format!("{what} {v} outside 1..={bound}")));
    }
    Ok(v - 1)
}

fn parse_value(toks: &mut std::str::SplitWhitespace<'_>, field: MmField, lineno: usize) -> Result<C64> {
    Ok(match field {
        MmField::Real | MmField::Integer => C64::new(parse_f64(toks.next(), lineno, "value")?, 0.0),
        MmField::Complex => {
            let re = parse_f64(toks.next(), lineno, "real part")?;
            let im = parse_f64(toks.next(), lineno, "imaginary part")?;
            C64::new(re, im)
        }
        MmField::Pattern => ZERO,
    })
}

struct Builder {
    matrix: ComplexMatrix,
    positions: Vec<(usize, usize)>,
    symmetry: MmSymmetry,
}

impl Builder {
    fn put(&mut self, i: usize, j: usize, v: C64, lineno: usize) -> Result<()> {
        self.matrix[(i, j)] += v;
        self.positions.push((i, j));
        if i != j {
            let mirror = match self.symmetry {
                MmSymmetry::General => None,
                MmSymmetry::Symmetric => Some(v),
                MmSymmetry::SkewSymmetric => Some(-v),
                MmSymmetry::Hermitian => Some(v.conj()),
            };
            if let Some(m) = mirror {
                if j > i {
                    return Err(parse_err(lineno, "entry above the diagonal in a symmetric-storage file"));
                }
                self.matrix[(j, i)] += m;
                self.positions.push((j, i));
            }
        } else if self.symmetry == MmSymmetry::SkewSymmetric {
            return Err(parse_err(lineno, "diagonal entry in a skew-symmetric file"));
        }
        Ok(())
    }
}

/// Reads a Matrix Market stream. Pattern-only files parse with zero values.
pub fn parse_matrix_market<R: Read>(reader: R) -> Result<MatrixMarketData> {
    let mut lines = BufReader::new(reader).lines().enumerate().map(|(i, l)| (i + 1, l));
    let (lineno, first) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let header = parse_header(&first?, lineno)?;

    let mut size_line = None;
    for (lineno, line) in lines.by_ref() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        size_line = Some((lineno, line));
        break;
    }
    let (size_no, size_line) = size_line.ok_or_else(|| parse_err(lineno + 1, "missing size line"))?;
    let mut toks = size_line.split_whitespace();
    let rows = parse_index(toks.next(), size_no, usize::MAX, "row count")? + 1;
    let cols = parse_index(toks.next(), size_no, usize::MAX, "column count")? + 1;
    let declared = match header.format {
        MmFormat::Coordinate => {
            let tok = toks.next().ok_or_else(|| parse_err(size_no, "missing entry count"))?;
            Some(tok.parse::<usize>().map_err(|_| parse_err(size_no, format!("invalid entry count '{tok}'")))?)
        }
        MmFormat::Array => None,
    };
    if toks.next().is_some() {
        return Err(parse_err(size_no, "trailing tokens on the size line"));
    }
    if header.symmetry != MmSymmetry::General && rows != cols {
        return Err(parse_err(size_no, "symmetric storage requires a square matrix"));
    }
    if header.symmetry == MmSymmetry::Hermitian && header.field != MmField::Complex {
        return Err(parse_err(size_no, "hermitian symmetry requires a complex field"));
    }

    let mut b = Builder {
        matrix: ComplexMatrix::zeros(rows, cols),
        positions: Vec::new(),
        symmetry: header.symmetry,
    };

    // Array storage is column-major; symmetric kinds store the lower triangle.
    let array_slots: Vec<(usize, usize)> = if header.format == MmFormat::Array {
        let mut slots = Vec::new();
        for j in 0..cols {
            let start = match header.symmetry {
                MmSymmetry::General => 0,
                MmSymmetry::SkewSymmetric => j + 1,
                _ => j,
            };
            for i in start..rows {
                slots.push((i, j));
            }
        }
        slots
    } else {
        Vec::new()
    };

    let mut count = 0usize;
    let mut last_line = size_no;
    for (lineno, line) in lines {
        let line = line?;
        last_line = lineno;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let mut toks = t.split_whitespace();
        match header.format {
            MmFormat::Coordinate => {
                if Some(count) == declared {
                    return Err(parse_err(lineno, format!("more entries than the declared {}", count)));
                }
                let i = parse_index(toks.next(), lineno, rows, "row index")?;
                let j = parse_index(toks.next(), lineno, cols, "column index")?;
                let v = parse_value(&mut toks, header.field, lineno)?;
                b.put(i, j, v, lineno)?;
            }
            MmFormat::Array => {
                let &(i, j) = array_slots
                    .get(count)
                    .ok_or_else(|| parse_err(lineno, "more values than the array holds"))?;
                let v = parse_value(&mut toks, header.field, lineno)?;
                b.put(i, j, v, lineno)?;
            }
        }
        if toks.next().is_some() {
            return Err(parse_err(lineno, "trailing tokens"));
        }
        count += 1;
    }
    let expected = declared.unwrap_or(array_slots.len());
    if count != expected {
        return Err(parse_err(
            last_line,
            format!("found {count} entries, header declares {expected}"),
        ));
    }
    let mut pattern = b.positions;
    pattern.sort_unstable();
    pattern.dedup();
    Ok(MatrixMarketData {
        header,
        rows,
        cols,
        stored_entries: count,
        matrix: b.matrix,
        pattern,
    })
}

/// Reads a file whose values are needed; pattern-only files are rejected.
pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<MatrixMarketData> {
    let data = parse_matrix_market(fs::File::open(path)?)?;
    if data.header.field == MmField::Pattern {
        return Err(Error::UnsupportedField("pattern file used where matrix values are required".into()));
    }
    Ok(data)
}

/// Reads only the stored-position pattern (any field).
pub fn read_matrix_market_pattern(path: impl AsRef<Path>) -> Result<MatrixMarketData> {
    parse_matrix_market(fs::File::open(path)?)
}

/// Coordinate, general storage of every nonzero entry with 17 significant
/// digits. The field is `real` when all imaginary parts vanish.
pub fn format_matrix_market(m: &ComplexMatrix, comment: Option<&str>) -> String {
    let real = m.is_real();
    let nz = m.nonzero_pattern();
    let mut s = String::new();
    let _ = writeln!(
        s,
        "%%MatrixMarket matrix coordinate {} general",
        if real { "real" } else { "complex" }
    );
    if let Some(c) = comment {
        for line in c.lines() {
            let _ = writeln!(s, "% {line}");
        }
    }
    let _ = writeln!(s, "{} {} {}", m.rows(), m.cols(), nz.len());
    for (i, j) in nz {
        let z = m[(i, j)];
        if real {
            let _ = writeln!(s, "{} {} {:.16e}", i + 1, j + 1, z.re);
        } else {
            let _ = writeln!(s, "{} {} {:.16e} {:.16e}", i + 1, j + 1, z.re, z.im);
        }
    }
    s
}

pub fn write_matrix_market(path: impl AsRef<Path>, m: &ComplexMatrix, comment: Option<&str>) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(format_matrix_market(m, comment).as_bytes())?;
    Ok(())
}

/// Pattern list: one 1-based `i j` pair per line; `#` and `%` start comments.
pub fn parse_pattern_list<R: Read>(reader: R, n: usize) -> Result<Pattern> {
    let mut entries = Vec::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with('%') {
            continue;
        }
        let mut toks = t.split_whitespace();
        let i = parse_index(toks.next(), lineno, n, "row index")?;
        let j = parse_index(toks.next(), lineno, n, "column index")?;
        if toks.next().is_some() {
            return Err(parse_err(lineno, "expected exactly two indices"));
        }
        entries.push((i, j));
    }
    Pattern::new(n, entries)
}

pub fn read_pattern_list(path: impl AsRef<Path>, n: usize) -> Result<Pattern> {
    parse_pattern_list(fs::File::open(path)?, n)
}
