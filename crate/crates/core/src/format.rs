//! Sequence file formats.
//!
//! * b-file: one `index value` pair per line, as used by the OEIS. Blank
//!   lines and lines starting with `#` are ignored on input.
//! * CSV: header `n,value`, then one row per term.
//! * JSON: `{"start": n0, "values": [..]}`.
//!
//! Indices must be consecutive. Values are nonnegative integers of any size.

use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigUint;
use thiserror::Error;

use crate::bigjson::parse_uint;
use crate::metafib::Sequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SequenceFormat {
    #[default]
    Bfile,
    Csv,
    Json,
}

impl FromStr for SequenceFormat {
    type Err = FormatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bfile" => Ok(SequenceFormat::Bfile),
            "csv" => Ok(SequenceFormat::Csv),
            "json" => Ok(SequenceFormat::Json),
            other => Err(FormatError::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("unknown sequence format {0:?} (expected bfile, csv or json)")]
    UnknownFormat(String),
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("line {line}: index {got} does not follow {prev}")]
    NonConsecutive { line: usize, prev: i64, got: i64 },
    #[error("CSV header must be \"n,value\"")]
    CsvHeader,
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn line_err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Line {
        line,
        message: message.into(),
    }
}

/// Accumulates `(index, value)` rows into a [`Sequence`].
struct Builder {
    seq: Option<Sequence>,
}

impl Builder {
    fn new() -> Self {
        Builder { seq: None }
    }

    fn push(&mut self, line: usize, index: i64, value: BigUint) -> Result<(), FormatError> {
        match &mut self.seq {
            None => {
                self.seq = Some(Sequence {
                    start: index,
                    values: vec![value],
                })
            }
            Some(seq) => {
                let prev = seq.start + (seq.values.len() as i64 - 1);
                if prev.checked_add(1) != Some(index) {
                    return Err(FormatError::NonConsecutive {
                        line,
                        prev,
                        got: index,
                    });
                }
                seq.values.push(value);
            }
        }
        Ok(())
    }

    fn finish(self) -> Sequence {
        self.seq.unwrap_or(Sequence {
            start: 0,
            values: Vec::new(),
        })
    }
}

fn parse_index(line: usize, s: &str) -> Result<i64, FormatError> {
    s.parse::<i64>()
        .map_err(|_| line_err(line, format!("invalid index {s:?}")))
}

fn parse_value(line: usize, s: &str) -> Result<BigUint, FormatError> {
    parse_uint(s).ok_or_else(|| line_err(line, format!("invalid nonnegative value {s:?}")))
}

pub fn parse_bfile(text: &str) -> Result<Sequence, FormatError> {
    let mut b = Builder::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (Some(index), Some(value), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(line_err(line, "expected exactly two fields: index value"));
        };
        b.push(line, parse_index(line, index)?, parse_value(line, value)?)?;
    }
    Ok(b.finish())
}

pub fn parse_csv(text: &str) -> Result<Sequence, FormatError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers()?;
    if headers.len() != 2 || &headers[0] != "n" || &headers[1] != "value" {
        return Err(FormatError::CsvHeader);
    }
    let mut b = Builder::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != 2 {
            return Err(line_err(line, "expected two columns"));
        }
        b.push(line, parse_index(line, &record[0])?, parse_value(line, &record[1])?)?;
    }
    Ok(b.finish())
}

pub fn parse_json(text: &str) -> Result<Sequence, FormatError> {
    let seq: Sequence = serde_json::from_str(text)?;
    let last = i64::try_from(seq.values.len().saturating_sub(1))
        .ok()
        .and_then(|n| seq.start.checked_add(n));
    if last.is_none() {
        return Err(line_err(1, "index range does not fit in 64 bits"));
    }
    Ok(seq)
}

/// Picks the parser from the content: JSON if it starts with `{`, CSV if the
/// first meaningful line is the `n,value` header, b-file otherwise.
pub fn parse_sequence(text: &str) -> Result<Sequence, FormatError> {
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'));
    match first {
        Some(l) if l.starts_with('{') => parse_json(text),
        Some(l) if l.replace(' ', "") == "n,value" => parse_csv(text),
        _ => parse_bfile(text),
    }
}

pub fn parse_as(format: SequenceFormat, text: &str) -> Result<Sequence, FormatError> {
    match format {
        SequenceFormat::Bfile => parse_bfile(text),
        SequenceFormat::Csv => parse_csv(text),
        SequenceFormat::Json => parse_json(text),
    }
}

pub fn write_bfile(seq: &Sequence) -> String {
    let mut out = String::new();
    for (n, v) in seq.indexed() {
        writeln!(out, "{n} {v}").expect("writing to a String");
    }
    out
}

pub fn write_csv(seq: &Sequence) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "value"]).expect("in-memory write");
    for (n, v) in seq.indexed() {
        w.write_record([n.to_string(), v.to_string()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII output")
}

pub fn write_json(seq: &Sequence) -> String {
    let mut s = serde_json::to_string(seq).expect("sequence serializes");
    s.push('\n');
    s
}

pub fn write_as(format: SequenceFormat, seq: &Sequence) -> String {
    match format {
        SequenceFormat::Bfile => write_bfile(seq),
        SequenceFormat::Csv => write_csv(seq),
        SequenceFormat::Json => write_json(seq),
    }
}
