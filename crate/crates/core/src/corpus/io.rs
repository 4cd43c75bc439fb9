use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use thiserror::Error;

use super::record::AppRecord;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("failed to read dataset: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {}{message}", field.as_ref().map(|f| format!("field `{f}`: ")).unwrap_or_default())]
    Malformed {
        line: usize,
        field: Option<String>,
        message: String,
    },
    #[error("line {line}: duplicate app_id {app_id:?} (first seen on line {first_line})")]
    DuplicateId {
        app_id: String,
        line: usize,
        first_line: usize,
    },
}

const REQUIRED_FIELDS: [&str; 10] = [
    "app_id",
    "name",
    "developer_name",
    "developer_email_domain",
    "description",
    "permissions",
    "download_count",
    "rating",
    "size_mb",
    "days_since_update",
];

/// Reads a JSON-lines dataset. Blank lines are skipped; line numbers are
/// 1-based and count blank lines.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<Vec<AppRecord>, DatasetError> {
    let file = File::open(path)?;
    parse_dataset(BufReader::new(file))
}

pub fn parse_dataset(reader: impl BufRead) -> Result<Vec<AppRecord>, DatasetError> {
    let mut records = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = parse_line(&line, line_no)?;
        if let Some(&first_line) = seen.get(&record.app_id) {
            return Err(DatasetError::DuplicateId {
                app_id: record.app_id,
                line: line_no,
                first_line,
            });
        }
        seen.insert(record.app_id.clone(), line_no);
        records.push(record);
    }
    Ok(records)
}

fn parse_line(line: &str, line_no: usize) -> Result<AppRecord, DatasetError> {
    let malformed = |field: Option<&str>, message: String| DatasetError::Malformed {
        line: line_no,
        field: field.map(str::to_owned),
        message,
    };
    let value: serde_json::Value = serde_json::from_str(line).map_err(|e| malformed(None, e.to_string()))?;
    let object = value
        .as_object()
        .ok_or_else(|| malformed(None, "expected a JSON object".into()))?;
    if let Some(missing) = REQUIRED_FIELDS.iter().find(|f| !object.contains_key(**f)) {
        return Err(malformed(Some(missing), "missing required field".into()));
    }
    let record: AppRecord = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        malformed(Some(&path), e.into_inner().to_string())
    })?;
    record
        .validate()
        .map_err(|(field, message)| malformed(Some(field), message))?;
    Ok(record)
}

/// Writes records as JSON lines, one per line, in order.
pub fn write_dataset(path: impl AsRef<Path>, records: &[AppRecord]) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for record in records {
        serde_json::to_writer(&mut out, record)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}
