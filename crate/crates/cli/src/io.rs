//! File plumbing: error reports, atomic writes and dotted-path overrides.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Map, Value};

pub const EXIT_INVALID: i32 = 2;
pub const EXIT_QUBIT_CAP: i32 = 3;

/// A failure reported as JSON on stderr with a matching exit code.
#[derive(Debug)]
pub struct CliError {
    pub kind: String,
    pub message: String,
    pub path: Option<PathBuf>,
    pub code: i32,
}

impl CliError {
    pub fn new(kind: &str, message: impl Into<String>) -> Self {
        Self {
            kind: kind.to_string(),
            message: message.into(),
            path: None,
            code: EXIT_INVALID,
        }
    }

    pub fn at(mut self, path: &Path) -> Self {
        self.path.get_or_insert_with(|| path.to_path_buf());
        self
    }

    pub fn to_json(&self) -> Value {
        json!({
            "error": {
                "kind": self.kind,
                "message": self.message,
                "path": self.path.as_ref().map(|p| p.display().to_string()),
            }
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl From<falqon_core::Error> for CliError {
    fn from(e: falqon_core::Error) -> Self {
        let code = match e.kind() {
            "qubit_cap" => EXIT_QUBIT_CAP,
            _ => EXIT_INVALID,
        };
        Self {
            kind: e.kind().to_string(),
            message: e.to_string(),
            path: None,
            code,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::new("io", e.to_string()).at(path))
}

pub fn read_value(path: &Path) -> CliResult<Value> {
    serde_json::from_str(&read_text(path)?)
        .map_err(|e| CliError::new("input", e.to_string()).at(path))
}

pub fn from_value<T: DeserializeOwned>(v: Value, path: &Path) -> CliResult<T> {
    serde_json::from_value(v).map_err(|e| CliError::new("input", e.to_string()).at(path))
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io_err = |e: std::io::Error| CliError::new("io", e.to_string()).at(path);
    fs::create_dir_all(dir).map_err(io_err)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

pub fn to_pretty<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("output serializes");
    s.push('\n');
    s.into_bytes()
}

/// A set of files built in memory and written only once all are ready.
#[derive(Default)]
pub struct Outputs {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Outputs {
    pub fn add(&mut self, rel: impl Into<PathBuf>, contents: impl Into<Vec<u8>>) {
        self.files.push((rel.into(), contents.into()));
    }

    pub fn json<T: Serialize>(&mut self, rel: impl Into<PathBuf>, v: &T) {
        self.add(rel, to_pretty(v));
    }

    pub fn write_under(self, dir: &Path) -> CliResult<Vec<PathBuf>> {
        let mut written = Vec::with_capacity(self.files.len());
        for (rel, contents) in self.files {
            let path = dir.join(rel);
            write_atomic(&path, &contents)?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Prints to stdout, or writes atomically when a path is given.
pub fn emit<T: Serialize>(v: &T, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(p) => write_atomic(p, &to_pretty(v)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(&to_pretty(v))
                .map_err(|e| CliError::new("io", e.to_string()))
        }
    }
}

/// Applies `a.b.c=value` overrides; values parse as JSON, falling back to a string.
pub fn apply_overrides(target: &mut Value, overrides: &[String]) -> CliResult<()> {
    for item in overrides {
        let (key, raw) = item.split_once('=').ok_or_else(|| {
            CliError::new("config", format!("override `{item}` is not key=value"))
        })?;
        if key.is_empty() || key.split('.').any(str::is_empty) {
            return Err(CliError::new(
                "config",
                format!("override key `{key}` is malformed"),
            ));
        }
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let mut node = &mut *target;
        let mut parts = key.split('.').peekable();
        while let Some(part) = parts.next() {
            if !node.is_object() {
                return Err(CliError::new(
                    "config",
                    format!("override `{key}` descends into a non-object"),
                ));
            }
            let map: &mut Map<String, Value> = node.as_object_mut().expect("checked object");
            if parts.peek().is_none() {
                map.insert(part.to_string(), value);
                break;
            }
            node = map
                .entry(part.to_string())
                .or_insert_with(|| Value::Object(Map::new()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_nest_and_parse() {
        let mut v = json!({"dt": 0.1, "observable": {"variant": "deflation"}});
        apply_overrides(
            &mut v,
            &[
                "dt=0.05".into(),
                "observable.gamma=[4.0]".into(),
                "law.law=bang_bang".into(),
            ],
        )
        .unwrap();
        assert_eq!(v["dt"], json!(0.05));
        assert_eq!(v["observable"]["gamma"], json!([4.0]));
        assert_eq!(v["law"]["law"], json!("bang_bang"));
    }

    #[test]
    fn malformed_overrides_are_rejected() {
        let mut v = json!({"dt": 0.1});
        assert!(apply_overrides(&mut v, &["dt".into()]).is_err());
        assert!(apply_overrides(&mut v, &["a..b=1".into()]).is_err());
        assert!(apply_overrides(&mut v, &["dt.x=1".into()]).is_err());
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/out.json");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
        assert_eq!(fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
