//! Row-per-record CSV.
//!
//! ```text
//! # fs=360            optional, must be the first line
//! x1,x2,x3,label      header, present only when a label column is named
//! 0.1,0.2,0.3,normal  one record per row
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use super::Signal;
use crate::error::{Error, Result};

const FS_PREFIX: &str = "# fs=";

/// Load one [`Signal`] per row.
///
/// The sampling rate comes from `fs` or, when that is `None`, from the
/// `# fs=` header line. When both are present they must agree. Records are
/// named `<file stem>:r<row>` with a zero-padded, 1-based row number.
pub fn load_csv(
    path: impl AsRef<Path>,
    fs: Option<f64>,
    label_column: Option<&str>,
) -> Result<Vec<Signal>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;

    let (declared_fs, body) = match text.split_once('\n') {
        Some((first, rest)) if first.trim_start().starts_with(FS_PREFIX) => {
            (Some(parse_fs_line(first)?), rest)
        }
        None if text.trim_start().starts_with(FS_PREFIX) => (Some(parse_fs_line(&text)?), ""),
        _ => (None, text.as_str()),
    };
    let fs = match (fs, declared_fs) {
        (Some(a), Some(b)) if (a - b).abs() > 1e-9 * a.abs().max(1.0) => {
            return Err(Error::Config(format!(
                "{}: file declares fs={b} but {a} was requested",
                path.display()
            )))
        }
        (Some(a), _) => a,
        (None, Some(b)) => b,
        (None, None) => {
            return Err(Error::Config(format!(
                "{}: no sampling rate given and no `# fs=` header",
                path.display()
            )))
        }
    };

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };

    let mut records = reader.records();
    let label_idx = match label_column {
        None => None,
        Some(name) => {
            let header = records
                .next()
                .transpose()
                .map_err(csv_err)?
                .ok_or_else(|| Error::MissingColumn(name.to_string()))?;
            Some(
                header
                    .iter()
                    .position(|h| h == name)
                    .ok_or_else(|| Error::MissingColumn(name.to_string()))?,
            )
        }
    };

    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut out = Vec::new();
    for (i, rec) in records.enumerate() {
        let rec = rec.map_err(csv_err)?;
        let row = i + 1;
        let mut samples = Vec::with_capacity(rec.len());
        let mut label = None;
        for (j, cell) in rec.iter().enumerate() {
            if Some(j) == label_idx {
                if !cell.is_empty() {
                    label = Some(cell.to_string());
                }
                continue;
            }
            if cell.is_empty() && j + 1 == rec.len() && !samples.is_empty() {
                // tolerate a trailing comma
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| Error::NonNumericCell {
                row,
                col: j + 1,
                value: cell.to_string(),
            })?;
            if !v.is_finite() {
                return Err(Error::NonNumericCell {
                    row,
                    col: j + 1,
                    value: cell.to_string(),
                });
            }
            samples.push(v);
        }
        if samples.is_empty() {
            return Err(Error::EmptyRow { row });
        }
        out.push(Signal::with_meta(
            samples,
            fs,
            format!("{stem}:r{row:05}"),
            label,
        )?);
    }
    Ok(out)
}

fn parse_fs_line(line: &str) -> Result<f64> {
    let v = line.trim().trim_start_matches(FS_PREFIX).trim();
    match v.parse::<f64>() {
        Ok(fs) if fs.is_finite() && fs > 0.0 => Ok(fs),
        _ => Err(Error::Config(format!("bad sampling-rate header {line:?}"))),
    }
}

/// Write signals in the same format [`load_csv`] reads. All signals must
/// share one sampling rate. When any signal carries a label, a header row is
/// written with the label in a final `label` column; this requires equal
/// record lengths.
pub fn write_csv(path: impl AsRef<Path>, signals: &[Signal]) -> Result<()> {
    let path = path.as_ref();
    let first = signals.first().ok_or(Error::EmptyInput)?;
    if signals.iter().any(|s| s.fs() != first.fs()) {
        return Err(Error::InvalidParameter(
            "signals written to one file must share a sampling rate".into(),
        ));
    }
    let labelled = signals.iter().any(|s| s.label().is_some());
    if labelled && signals.iter().any(|s| s.len() != first.len()) {
        return Err(Error::InvalidParameter(
            "labelled records must have equal lengths".into(),
        ));
    }

    let mut buf = Vec::new();
    writeln!(buf, "{FS_PREFIX}{}", first.fs()).expect("write to Vec");
    {
        let mut w = csv::WriterBuilder::new()
            .flexible(true)
            .from_writer(&mut buf);
        let io_err = |e: csv::Error| Error::Csv {
            path: path.to_path_buf(),
            source: e,
        };
        if labelled {
            let mut header: Vec<String> = (1..=first.len()).map(|i| format!("x{i}")).collect();
            header.push("label".into());
            w.write_record(&header).map_err(io_err)?;
        }
        for s in signals {
            let mut row: Vec<String> = s.samples().iter().map(|v| v.to_string()).collect();
            if labelled {
                row.push(s.label().unwrap_or("").to_string());
            }
            w.write_record(&row).map_err(io_err)?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
    }
    crate::fsutil::write_atomic(path, &buf)
}
