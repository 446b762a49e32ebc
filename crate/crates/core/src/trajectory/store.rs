use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use super::{validate_trajectory, Trajectory, Violation};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("io error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {source}")]
    Parse { path: PathBuf, line: usize, source: serde_json::Error },
    #[error("validation failed: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    ValidationFailed(Vec<Violation>),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io { path: path.to_path_buf(), source }
}

/// One JSON document per line, no trailing whitespace.
pub fn to_jsonl_line<T: Serialize>(value: &T) -> String {
    let mut line = serde_json::to_string(value).expect("in-memory values always serialize");
    line.push('\n');
    line
}

/// Read every non-blank line of a JSON Lines file.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, StoreError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|source| StoreError::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            source,
        })?;
        out.push(value);
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(path: &Path, values: &[T]) -> Result<(), StoreError> {
    let mut buf = String::new();
    for v in values {
        buf.push_str(&to_jsonl_line(v));
    }
    std::fs::write(path, buf).map_err(io_err(path))
}

/// Append-only trajectory file. Ids are assigned on append and strictly
/// increase; identical content appended twice gets two ids.
#[derive(Debug)]
pub struct JsonlStore {
    path: PathBuf,
    next_id: Mutex<u64>,
}

impl JsonlStore {
    /// Open (creating if needed) and resume id assignment after the largest stored id.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let path = path.into();
        if !path.exists() {
            File::create(&path).map_err(io_err(&path))?;
        }
        let existing: Vec<Trajectory> = read_jsonl(&path)?;
        let next_id = existing.iter().filter_map(|t| t.id).max().map_or(1, |m| m + 1);
        Ok(JsonlStore { path, next_id: Mutex::new(next_id) })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, trajectory: &Trajectory) -> Result<u64, StoreError> {
        let violations = validate_trajectory(trajectory);
        if !violations.is_empty() {
            return Err(StoreError::ValidationFailed(violations));
        }
        let mut next = self.next_id.lock().unwrap();
        let id = *next;
        let mut record = trajectory.clone();
        record.id = Some(id);
        let line = to_jsonl_line(&record);
        let mut file = OpenOptions::new().append(true).open(&self.path).map_err(io_err(&self.path))?;
        file.write_all(line.as_bytes()).map_err(io_err(&self.path))?;
        file.sync_data().map_err(io_err(&self.path))?;
        *next += 1;
        Ok(id)
    }

    pub fn load(&self) -> Result<Vec<Trajectory>, StoreError> {
        read_jsonl(&self.path)
    }
}
