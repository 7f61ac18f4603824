//! Reading and writing counts, tables and density matrices.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::state::{DensityDocument, DensityMatrix4};
use crate::tomography::CountRecord;

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse(format!("{other:?}")),
    }
}

/// Reads a `label,count[,duration]` CSV. Lines starting with `#` are skipped.
pub fn read_counts(reader: impl Read) -> Result<Vec<CountRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(reader);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    for required in ["label", "count"] {
        if !headers.iter().any(|h| h == required) {
            return Err(Error::Parse(format!(
                "counts file lacks a `{required}` column"
            )));
        }
    }
    let mut out = Vec::new();
    for (line, row) in rdr.deserialize::<CountRecord>().enumerate() {
        out.push(row.map_err(|e| Error::Parse(format!("counts row {}: {e}", line + 1)))?);
    }
    if out.is_empty() {
        return Err(Error::Parse("counts file has no records".into()));
    }
    Ok(out)
}

/// Writes counts as `label,count` with an optional leading `#` comment.
pub fn write_counts(
    mut writer: impl Write,
    records: &[CountRecord],
    comment: Option<&str>,
) -> Result<()> {
    if let Some(c) = comment {
        writeln!(writer, "# {c}")?;
    }
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["label", "count"]).map_err(csv_error)?;
    for r in records {
        w.write_record([r.label.as_str(), &r.count.to_string()])
            .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a numeric table with a header row and optional `#` comment.
pub fn write_table(
    mut writer: impl Write,
    comment: Option<&str>,
    headers: &[&str],
    rows: &[Vec<f64>],
) -> Result<()> {
    if let Some(c) = comment {
        writeln!(writer, "# {c}")?;
    }
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(headers).map_err(csv_error)?;
    for row in rows {
        if row.len() != headers.len() {
            return Err(Error::domain("table row width differs from header"));
        }
        w.write_record(row.iter().map(|v| v.to_string()))
            .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn density_to_json(rho: &DensityMatrix4) -> String {
    serde_json::to_string_pretty(&rho.to_document()).expect("density document serialises")
}

pub fn density_from_json(text: &str) -> Result<DensityMatrix4> {
    let doc: DensityDocument =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    DensityMatrix4::from_document(&doc)
}
