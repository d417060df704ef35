//! Plain-text system files.
//!
//! Layout: line 1 holds the dimension `n`; the next `n` lines hold the `n`
//! whitespace-separated coefficients of each matrix row; the following line
//! holds the `n` constant terms; an optional final line holds `n` initial
//! guess values (all zeros when omitted). Blank lines are ignored.

use super::{DenseMatrix, DenseVector, LinalgError};
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SystemFileError {
    #[error("failed to read system file: {0}")]
    Io(#[from] std::io::Error),
    #[error("missing dimension line")]
    MissingDimension,
    #[error("invalid dimension {0:?}")]
    InvalidDimension(String),
    #[error("line {line}: expected {expected} values, got {got}")]
    WrongValueCount { line: usize, expected: usize, got: usize },
    #[error("line {line}: cannot parse {token:?} as a number")]
    BadNumber { line: usize, token: String },
    #[error("expected {expected} data lines after the dimension, got {got}")]
    TooFewLines { expected: usize, got: usize },
    #[error("unexpected trailing line {0}")]
    TrailingData(usize),
    #[error(transparent)]
    Invalid(#[from] LinalgError),
}

/// The raw parts of a system file; tolerance and iteration limit are
/// run-time configuration, not file content.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSystem {
    pub a: DenseMatrix,
    pub b: DenseVector,
    pub x0: Option<DenseVector>,
}

pub fn parse_system(text: &str) -> Result<ParsedSystem, SystemFileError> {
    // Keep original line numbers for diagnostics while skipping blanks.
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();

    let (_, dim_line) = lines.first().ok_or(SystemFileError::MissingDimension)?;
    let n: usize = dim_line
        .parse()
        .map_err(|_| SystemFileError::InvalidDimension(dim_line.to_string()))?;
    if n == 0 {
        return Err(SystemFileError::InvalidDimension(dim_line.to_string()));
    }

    let data = &lines[1..];
    if data.len() < n + 1 {
        return Err(SystemFileError::TooFewLines { expected: n + 1, got: data.len() });
    }
    if data.len() > n + 2 {
        return Err(SystemFileError::TrailingData(data[n + 2].0));
    }

    let parse_row = |(line_no, line): (usize, &str)| -> Result<Vec<f64>, SystemFileError> {
        let mut row = Vec::with_capacity(n);
        for token in line.split_whitespace() {
            let v: f64 = token
                .parse()
                .map_err(|_| SystemFileError::BadNumber { line: line_no, token: token.to_string() })?;
            row.push(v);
        }
        if row.len() != n {
            return Err(SystemFileError::WrongValueCount { line: line_no, expected: n, got: row.len() });
        }
        Ok(row)
    };

    let mut entries = Vec::with_capacity(n * n);
    for &row_line in &data[..n] {
        entries.extend(parse_row(row_line)?);
    }
    let a = DenseMatrix::new(n, n, entries)?;
    let b = DenseVector::new(parse_row(data[n])?)?;
    let x0 = match data.get(n + 1) {
        Some(&line) => Some(DenseVector::new(parse_row(line)?)?),
        None => None,
    };
    Ok(ParsedSystem { a, b, x0 })
}

pub fn load_system(path: &Path) -> Result<ParsedSystem, SystemFileError> {
    parse_system(&std::fs::read_to_string(path)?)
}

/// Renders a system in the file layout; numbers round-trip exactly.
pub fn format_system(a: &DenseMatrix, b: &DenseVector, x0: Option<&DenseVector>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", a.n_rows());
    let render = |out: &mut String, row: &[f64]| {
        let mut first = true;
        for v in row {
            if !first {
                out.push(' ');
            }
            let _ = write!(out, "{v:?}");
            first = false;
        }
        out.push('\n');
    };
    for i in 0..a.n_rows() {
        render(&mut out, a.row(i));
    }
    render(&mut out, b.as_slice());
    if let Some(x0) = x0 {
        render(&mut out, x0.as_slice());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_basic_file() {
        let text = "2\n2 1\n1 3\n3 4\n";
        let parsed = parse_system(text).unwrap();
        assert_eq!(parsed.a.row(0), &[2.0, 1.0]);
        assert_eq!(parsed.b.as_slice(), &[3.0, 4.0]);
        assert!(parsed.x0.is_none());
    }

    #[test]
    fn parses_optional_initial_guess() {
        let text = "2\n2 1\n1 3\n3 4\n0.5 0.5\n";
        let parsed = parse_system(text).unwrap();
        assert_eq!(parsed.x0.unwrap().as_slice(), &[0.5, 0.5]);
    }

    #[test]
    fn reports_bad_token_with_line() {
        let text = "2\n2 1\n1 oops\n3 4\n";
        match parse_system(text) {
            Err(SystemFileError::BadNumber { line, token }) => {
                assert_eq!(line, 3);
                assert_eq!(token, "oops");
            }
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn reports_short_rows_and_missing_lines() {
        assert!(matches!(
            parse_system("2\n2 1\n1\n3 4\n"),
            Err(SystemFileError::WrongValueCount { expected: 2, got: 1, .. })
        ));
        assert!(matches!(
            parse_system("2\n2 1\n1 3\n"),
            Err(SystemFileError::TooFewLines { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn format_round_trips_exactly() {
        let a = DenseMatrix::new(2, 2, vec![2.0, 1.0 / 3.0, -1.5e-7, 3.0]).unwrap();
        let b = DenseVector::new(vec![0.1, -4.0]).unwrap();
        let x0 = DenseVector::new(vec![1e-300, 2.0]).unwrap();
        let text = format_system(&a, &b, Some(&x0));
        let parsed = parse_system(&text).unwrap();
        assert_eq!(parsed.a, a);
        assert_eq!(parsed.b, b);
        assert_eq!(parsed.x0.unwrap(), x0);
    }
}
