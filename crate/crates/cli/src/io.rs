//! Matrix ingestion: MatrixMarket (array or coordinate) and headerless CSV.

use std::fs;
use std::path::Path;

use lowrank_core::{Complex64, MatrixC64, MatrixF64};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Largest accepted dimension.
pub const MAX_DIM: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Mtx,
    Csv,
}

impl Format {
    /// `.csv` means CSV, anything else MatrixMarket.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Mtx,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Input {
    Real(MatrixF64),
    Complex(MatrixC64),
}

impl Input {
    pub fn shape(&self) -> (usize, usize) {
        match self {
            Input::Real(a) => a.shape(),
            Input::Complex(a) => a.shape(),
        }
    }
}

/// What the report records about an input file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub format: Format,
    pub rows: usize,
    pub cols: usize,
    pub complex: bool,
    /// SHA-256 of the file bytes, lowercase hex.
    pub sha256: String,
}

pub struct Loaded {
    pub matrix: Input,
    pub digest: InputDigest,
}

pub fn load(path: &Path, format: Option<Format>) -> Result<Loaded, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    let format = format.unwrap_or_else(|| Format::from_path(path));
    let text = std::str::from_utf8(&bytes).map_err(|_| CliError::parse(path, 0, "file is not UTF-8"))?;
    let matrix = match format {
        Format::Mtx => parse_mtx(text).map_err(lift(path))?,
        Format::Csv => Input::Real(parse_csv(text).map_err(lift(path))?),
    };
    let (rows, cols) = matrix.shape();
    let sha256 = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
    Ok(Loaded {
        digest: InputDigest {
            path: path.display().to_string(),
            format,
            rows,
            cols,
            complex: matches!(matrix, Input::Complex(_)),
            sha256,
        },
        matrix,
    })
}

#[derive(Debug)]
pub enum ParseError {
    /// Line number and message.
    At(usize, String),
    TooLarge(String),
}

impl From<(usize, String)> for ParseError {
    fn from((line, msg): (usize, String)) -> Self {
        ParseError::At(line, msg)
    }
}

type ParseResult<T> = Result<T, ParseError>;

fn at<T>(line: usize, msg: impl Into<String>) -> ParseResult<T> {
    Err(ParseError::At(line, msg.into()))
}

fn lift(path: &Path) -> impl Fn(ParseError) -> CliError + '_ {
    move |e| match e {
        ParseError::At(line, msg) => CliError::parse(path, line, msg),
        ParseError::TooLarge(msg) => CliError::Core(lowrank_core::Error::TooLarge(msg)),
    }
}

fn check_dims(rows: usize, cols: usize, line: usize) -> ParseResult<()> {
    if rows == 0 || cols == 0 {
        return at(line, format!("empty matrix {rows}x{cols}"));
    }
    if rows > MAX_DIM || cols > MAX_DIM {
        return Err(ParseError::TooLarge(format!("{rows}x{cols} exceeds {MAX_DIM}x{MAX_DIM}")));
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq)]
enum Field {
    Real,
    Complex,
    Pattern,
}

#[derive(Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
    Skew,
    Hermitian,
}

fn number(tok: Option<&str>, line: usize) -> ParseResult<f64> {
    let tok = tok.ok_or((line, "missing value".to_string()))?;
    let x: f64 = tok.parse().map_err(|_| (line, format!("bad number {tok:?}")))?;
    if !x.is_finite() {
        return at(line, format!("non-finite value {tok:?}"));
    }
    Ok(x)
}

fn index(tok: Option<&str>, bound: usize, line: usize) -> ParseResult<usize> {
    let tok = tok.ok_or((line, "missing index".to_string()))?;
    let i: usize = tok.parse().map_err(|_| (line, format!("bad index {tok:?}")))?;
    if i == 0 || i > bound {
        return at(line, format!("index {i} outside 1..={bound}"));
    }
    Ok(i - 1)
}

pub fn parse_mtx(text: &str) -> ParseResult<Input> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or((1, "empty file".to_string()))?;
    let h: Vec<String> = header.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if h.len() != 5 || h[0] != "%%matrixmarket" || h[1] != "matrix" {
        return at(1, "expected '%%MatrixMarket matrix <layout> <field> <symmetry>'");
    }
    let dense = match h[2].as_str() {
        "array" => true,
        "coordinate" => false,
        other => return at(1, format!("unknown layout {other:?}")),
    };
    let field = match h[3].as_str() {
        "real" | "integer" | "double" => Field::Real,
        "complex" => Field::Complex,
        "pattern" if !dense => Field::Pattern,
        other => return at(1, format!("unsupported field {other:?}")),
    };
    let sym = match h[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::Skew,
        "hermitian" if field == Field::Complex => Symmetry::Hermitian,
        other => return at(1, format!("unsupported symmetry {other:?}")),
    };

    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (sline, size) = body.next().ok_or((1, "missing size line".to_string()))?;
    let mut toks = size.split_whitespace();
    let rows = index_count(toks.next(), sline)?;
    let cols = index_count(toks.next(), sline)?;
    check_dims(rows, cols, sline)?;
    if sym != Symmetry::General && rows != cols {
        return at(sline, "symmetric storage needs a square matrix");
    }
    let nnz = if dense { None } else { Some(index_count(toks.next(), sline)?) };

    let mut data = vec![Complex64::new(0.0, 0.0); rows * cols];
    let value = |toks: &mut std::str::SplitWhitespace, line: usize| -> ParseResult<Complex64> {
        Ok(match field {
            Field::Real => Complex64::new(number(toks.next(), line)?, 0.0),
            Field::Complex => Complex64::new(number(toks.next(), line)?, number(toks.next(), line)?),
            Field::Pattern => Complex64::new(1.0, 0.0),
        })
    };
    let put = |i: usize, j: usize, x: Complex64, data: &mut Vec<Complex64>| {
        data[i + j * rows] = x;
        if i != j {
            let mirror = match sym {
                Symmetry::General => return,
                Symmetry::Symmetric => x,
                Symmetry::Skew => -x,
                Symmetry::Hermitian => x.conj(),
            };
            data[j + i * rows] = mirror;
        }
    };

    let mut count = 0usize;
    let mut last = sline;
    if dense {
        // column major; symmetric storage lists the lower triangle only
        let mut slots = Vec::new();
        for j in 0..cols {
            let start = match sym {
                Symmetry::General => 0,
                Symmetry::Skew => j + 1,
                _ => j,
            };
            slots.extend((start..rows).map(|i| (i, j)));
        }
        for (line, l) in body {
            last = line;
            let mut toks = l.split_whitespace();
            let x = value(&mut toks, line)?;
            if toks.next().is_some() {
                return at(line, "trailing tokens");
            }
            let &(i, j) = slots.get(count).ok_or((line, "more entries than the size line allows".to_string()))?;
            put(i, j, x, &mut data);
            count += 1;
        }
        if count != slots.len() {
            return at(last, format!("expected {} entries, found {count}", slots.len()));
        }
    } else {
        let nnz = nnz.unwrap_or(0);
        for (line, l) in body {
            last = line;
            let mut toks = l.split_whitespace();
            let i = index(toks.next(), rows, line)?;
            let j = index(toks.next(), cols, line)?;
            if sym != Symmetry::General && i < j {
                return at(line, "symmetric storage lists the lower triangle only");
            }
            if sym == Symmetry::Skew && i == j {
                return at(line, "skew-symmetric storage has no diagonal");
            }
            let x = value(&mut toks, line)?;
            if toks.next().is_some() {
                return at(line, "trailing tokens");
            }
            put(i, j, x, &mut data);
            count += 1;
            if count > nnz {
                return at(line, format!("more than the declared {nnz} entries"));
            }
        }
        if count != nnz {
            return at(last, format!("expected {nnz} entries, found {count}"));
        }
    }

    let build = |e: lowrank_core::Error| ParseError::At(last, e.to_string());
    if field == Field::Complex {
        MatrixC64::from_col_major(rows, cols, data).map(Input::Complex).map_err(build)
    } else {
        let re = data.iter().map(|z| z.re).collect();
        MatrixF64::from_col_major(rows, cols, re).map(Input::Real).map_err(build)
    }
}

fn index_count(tok: Option<&str>, line: usize) -> ParseResult<usize> {
    let tok = tok.ok_or((line, "incomplete size line".to_string()))?;
    tok.parse().map_err(|_| ParseError::At(line, format!("bad size {tok:?}")))
}

/// One row per record, no header.
pub fn parse_csv(text: &str) -> ParseResult<MatrixF64> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            (line, e.to_string())
        })?;
        let line = rec.position().map_or(rows.len() + 1, |p| p.line() as usize);
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        let row = rec.iter().map(|t| number(Some(t), line)).collect::<ParseResult<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return at(line, format!("row has {} values, expected {}", row.len(), first.len()));
            }
        }
        if row.len() > MAX_DIM || rows.len() >= MAX_DIM {
            return Err(ParseError::TooLarge(format!("more than {MAX_DIM} rows or columns")));
        }
        rows.push(row);
    }
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    check_dims(m, n, 1)?;
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    MatrixF64::from_row_major(m, n, &flat).map_err(|e| ParseError::At(1, e.to_string()))
}

/// Writes a real matrix as a MatrixMarket array.
pub fn write_mtx(a: &MatrixF64) -> String {
    let mut s = format!("%%MatrixMarket matrix array real general\n{} {}\n", a.rows(), a.cols());
    for x in a.as_slice() {
        s += &format!("{x:e}\n");
    }
    s
}
