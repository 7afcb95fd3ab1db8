//! Plain-text dataset format.
//!
//! ```text
//! LDL 1
//! n q c
//! labels name1 … namec        (optional)
//! f1 … fq | d1 … dc           (n rows)
//! ```
//!
//! Values are written with 17 significant digits, so parse(serialize(ds))
//! reproduces every f64 bit-for-bit.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::data::{FeatureVector, LabelDistribution, LdlDataset};
use crate::error::{LdlError, Result};

pub(crate) const MAGIC: &str = "LDL";
pub(crate) const VERSION: &str = "1";

/// Read a dataset file, validating every distribution.
pub fn read_dataset(path: impl AsRef<Path>) -> Result<LdlDataset> {
    let path = path.as_ref();
    let file = File::open(path)?;
    let mut lines = LineReader::new(BufReader::new(file), path.display().to_string());
    let dataset = parse_dataset(&mut lines)?;
    Ok(dataset)
}

/// Write a dataset file (see module docs for the format).
pub fn write_dataset(dataset: &LdlDataset, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path.as_ref())?;
    let mut out = BufWriter::new(file);
    serialize_dataset(dataset, &mut out)?;
    out.flush()?;
    Ok(())
}

pub(crate) fn serialize_dataset(dataset: &LdlDataset, out: &mut impl Write) -> Result<()> {
    writeln!(out, "{MAGIC} {VERSION}")?;
    writeln!(out, "{} {} {}", dataset.n(), dataset.q(), dataset.c())?;
    if let Some(names) = dataset.label_names() {
        write!(out, "labels")?;
        for name in names {
            write!(out, " {name}")?;
        }
        writeln!(out)?;
    }
    for (x, d) in dataset.iter() {
        let mut first = true;
        for &v in x.values() {
            if !first {
                write!(out, " ")?;
            }
            write!(out, "{v:.17e}")?;
            first = false;
        }
        write!(out, " |")?;
        for &v in d.degrees() {
            write!(out, " {v:.17e}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Line source that tracks position for error reporting.
pub(crate) struct LineReader<R> {
    inner: R,
    pub path: String,
    pub line: usize,
}

impl<R: BufRead> LineReader<R> {
    pub fn new(inner: R, path: String) -> Self {
        Self {
            inner,
            path,
            line: 0,
        }
    }

    pub fn error(&self, message: impl Into<String>) -> LdlError {
        LdlError::ParseError {
            path: self.path.clone(),
            line: self.line,
            message: message.into(),
        }
    }

    /// Next line, trimmed; `None` at end of input.
    pub fn next_line(&mut self) -> Result<Option<String>> {
        let mut buf = String::new();
        let read = self.inner.read_line(&mut buf)?;
        if read == 0 {
            return Ok(None);
        }
        self.line += 1;
        Ok(Some(buf.trim_end().to_string()))
    }

    pub fn expect_line(&mut self, what: &str) -> Result<String> {
        match self.next_line()? {
            Some(line) => Ok(line),
            None => Err(self.error(format!("unexpected end of file, expected {what}"))),
        }
    }
}

pub(crate) fn parse_usize<R: BufRead>(reader: &LineReader<R>, token: &str, what: &str) -> Result<usize> {
    token
        .parse()
        .map_err(|_| reader.error(format!("invalid {what}: `{token}`")))
}

pub(crate) fn parse_f64<R: BufRead>(reader: &LineReader<R>, token: &str, what: &str) -> Result<f64> {
    token
        .parse()
        .map_err(|_| reader.error(format!("invalid {what}: `{token}`")))
}

/// Parse a dataset block starting at the `LDL 1` header line.
pub(crate) fn parse_dataset<R: BufRead>(reader: &mut LineReader<R>) -> Result<LdlDataset> {
    let header = reader.expect_line("header")?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some(MAGIC) {
        return Err(reader.error("missing `LDL` magic"));
    }
    match parts.next() {
        Some(VERSION) => {}
        Some(other) => {
            return Err(LdlError::VersionMismatch {
                found: other.to_string(),
                expected: VERSION.to_string(),
            })
        }
        None => return Err(reader.error("missing format version")),
    }

    let dims = reader.expect_line("dimensions")?;
    let tokens: Vec<&str> = dims.split_whitespace().collect();
    if tokens.len() != 3 {
        return Err(reader.error(format!("expected `n q c`, got `{dims}`")));
    }
    let n = parse_usize(reader, tokens[0], "example count")?;
    let q = parse_usize(reader, tokens[1], "feature count")?;
    let c = parse_usize(reader, tokens[2], "label count")?;

    let mut first_row: Option<String> = None;
    let mut label_names = None;
    let line = reader.expect_line("label names or first example")?;
    if let Some(rest) = line.strip_prefix("labels ") {
        let names: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
        if names.len() != c {
            return Err(reader.error(format!("{} label names for {c} labels", names.len())));
        }
        label_names = Some(names);
    } else {
        first_row = Some(line);
    }

    let mut features = Vec::with_capacity(n);
    let mut targets = Vec::with_capacity(n);
    for example in 0..n {
        let row = match first_row.take() {
            Some(row) => row,
            None => reader.expect_line("example row")?,
        };
        let (left, right) = row.split_once('|').ok_or_else(|| {
            reader.error("example row is missing the `|` feature/degree separator")
        })?;
        let feature_values = left
            .split_whitespace()
            .map(|t| parse_f64(reader, t, "feature value"))
            .collect::<Result<Vec<f64>>>()?;
        if feature_values.len() != q {
            return Err(reader.error(format!(
                "expected {q} feature values, got {}",
                feature_values.len()
            )));
        }
        let degrees = right
            .split_whitespace()
            .map(|t| parse_f64(reader, t, "description degree"))
            .collect::<Result<Vec<f64>>>()?;
        if degrees.len() != c {
            return Err(reader.error(format!("expected {c} degrees, got {}", degrees.len())));
        }
        features.push(FeatureVector::new(feature_values).map_err(|e| {
            LdlError::InvariantViolation {
                example,
                constraint: e.to_string(),
            }
        })?);
        targets.push(
            LabelDistribution::new(degrees).map_err(|e| LdlError::InvariantViolation {
                example,
                constraint: e.to_string(),
            })?,
        );
    }
    LdlDataset::new(features, targets, label_names)
}
