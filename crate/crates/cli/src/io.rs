//! CSV ingestion and emission.
//!
//! Samples are a single `value` column; records are `time,value`.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use record_mle_core::RecordSequence;

use crate::error::CliError;

fn open(path: &Path) -> Result<csv::Reader<File>, CliError> {
    let file = File::open(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    Ok(csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file))
}

fn parse_cell<T: std::str::FromStr>(cell: &str, row: usize, column: &str) -> Result<T, CliError> {
    cell.parse::<T>().map_err(|_| {
        CliError::Input(format!("row {row}: `{cell}` in column `{column}` is not a valid number"))
    })
}

fn parse_value(cell: &str, row: usize, column: &str) -> Result<f64, CliError> {
    let v: f64 = parse_cell(cell, row, column)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Input(format!("row {row}: `{cell}` in column `{column}` is not finite")))
    }
}

fn headers<R: Read>(reader: &mut csv::Reader<R>, path: &Path) -> Result<Vec<String>, CliError> {
    Ok(reader
        .headers()
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
        .iter()
        .map(str::to_owned)
        .collect())
}

/// Rows are numbered from 1, not counting the header.
fn rows<'a, R: Read>(
    reader: &'a mut csv::Reader<R>,
    path: &Path,
) -> impl Iterator<Item = Result<(usize, csv::StringRecord), CliError>> + 'a {
    let path = path.display().to_string();
    reader.records().enumerate().map(move |(i, r)| {
        r.map(|rec| (i + 1, rec))
            .map_err(|e| CliError::Input(format!("{path}: row {}: {e}", i + 1)))
    })
}

/// All values of one named column.
pub fn read_column(path: &Path, column: &str) -> Result<Vec<f64>, CliError> {
    let mut reader = open(path)?;
    let names = headers(&mut reader, path)?;
    let idx = names.iter().position(|h| h == column).ok_or_else(|| {
        CliError::Input(format!(
            "{} has no column `{column}` (columns: {})",
            path.display(),
            names.join(", ")
        ))
    })?;
    let mut out = Vec::new();
    for row in rows(&mut reader, path) {
        let (n, rec) = row?;
        let cell = rec.get(idx).unwrap_or("");
        out.push(parse_value(cell, n, column)?);
    }
    if out.is_empty() {
        return Err(CliError::Input(format!("{} has no data rows", path.display())));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub enum EstimationInput {
    Sample(Vec<f64>),
    Records(RecordSequence),
}

/// Reads a sample (`value`) or a records file (`time,value`), chosen by
/// the header.
pub fn read_estimation_input(path: &Path) -> Result<EstimationInput, CliError> {
    let mut reader = open(path)?;
    let names = headers(&mut reader, path)?;
    match names.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["value"] => read_column(path, "value").map(EstimationInput::Sample),
        ["time", "value"] => {
            let (mut times, mut values) = (Vec::new(), Vec::new());
            for row in rows(&mut reader, path) {
                let (n, rec) = row?;
                times.push(parse_cell::<usize>(rec.get(0).unwrap_or(""), n, "time")?);
                values.push(parse_value(rec.get(1).unwrap_or(""), n, "value")?);
            }
            RecordSequence::new(values, times, None)
                .map(EstimationInput::Records)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
        }
        other => Err(CliError::Input(format!(
            "{}: expected header `value` or `time,value`, found `{}`",
            path.display(),
            other.join(",")
        ))),
    }
}

pub fn write_records<W: Write>(rec: &RecordSequence, out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::Io(e.into());
    w.write_record(["time", "value"]).map_err(io)?;
    for (t, v) in rec.raw_times().iter().zip(rec.values()) {
        w.write_record([t.to_string(), v.to_string()]).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn reads_named_column() {
        let f = file("id,x\n1,5\n2, 3\n3,4\n");
        assert_eq!(read_column(f.path(), "x").unwrap(), vec![5.0, 3.0, 4.0]);
    }

    #[test]
    fn names_the_bad_row() {
        let f = file("x\n1\n2\nabc\n");
        let err = read_column(f.path(), "x").unwrap_err().to_string();
        assert!(err.contains("row 3") && err.contains("abc"), "{err}");
        let f = file("x\n1\nNaN\n");
        assert!(read_column(f.path(), "x").unwrap_err().to_string().contains("row 2"));
    }

    #[test]
    fn missing_inputs() {
        let f = file("x\n1\n");
        let err = read_column(f.path(), "y").unwrap_err().to_string();
        assert!(err.contains("no column `y`"), "{err}");
        assert!(read_column(Path::new("/definitely/not/here.csv"), "x").is_err());
        let empty = file("x\n");
        assert!(read_column(empty.path(), "x").is_err());
    }

    #[test]
    fn detects_input_kind() {
        let s = file("value\n0.5\n0.25\n");
        assert_eq!(read_estimation_input(s.path()).unwrap(), EstimationInput::Sample(vec![0.5, 0.25]));
        let r = file("time,value\n1,0.9\n3,0.5\n");
        match read_estimation_input(r.path()).unwrap() {
            EstimationInput::Records(rec) => {
                assert_eq!(rec.values(), &[0.9, 0.5]);
                assert_eq!(rec.times().unwrap(), &[1, 3]);
            }
            other => panic!("{other:?}"),
        }
        let bad = file("time,value\n1,0.5\n2,0.9\n");
        assert!(read_estimation_input(bad.path()).is_err());
        let other = file("a,b\n1,2\n");
        assert!(read_estimation_input(other.path()).is_err());
    }

    #[test]
    fn records_csv_round_trips() {
        let rec = RecordSequence::new(vec![5.0, 3.0, 2.0, 1.0], vec![1, 2, 4, 6], Some(6)).unwrap();
        let mut buf = Vec::new();
        write_records(&rec, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "time,value\n1,5\n2,3\n4,2\n6,1\n");
        let f = file(std::str::from_utf8(&buf).unwrap());
        match read_estimation_input(f.path()).unwrap() {
            EstimationInput::Records(back) => assert_eq!(back.values(), rec.values()),
            other => panic!("{other:?}"),
        }
    }
}
