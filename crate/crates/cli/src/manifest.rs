//! Dataset manifests: CSV files listing `sample_id,writer_id,path[,tags]`.
//!
//! Paths are resolved against the manifest's directory. Tags are
//! `;`-separated free strings such as `language=greek`.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("cannot read manifest {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: line {line}: {message}")]
    Row {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("{path}: {message}")]
    Header { path: PathBuf, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestRow {
    pub sample_id: String,
    pub writer_id: String,
    /// Resolved against the manifest directory.
    pub path: PathBuf,
    pub tags: Vec<String>,
    /// 1-based line in the manifest file.
    pub line: u64,
}

impl ManifestRow {
    pub fn has_tag(&self, tag: &str) -> bool {
        self.tags.iter().any(|t| t == tag)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manifest {
    pub source: PathBuf,
    pub rows: Vec<ManifestRow>,
}

impl Manifest {
    /// Rows carrying `tag`; `None` keeps everything.
    pub fn filtered(&self, tag: Option<&str>) -> Manifest {
        Manifest {
            source: self.source.clone(),
            rows: self
                .rows
                .iter()
                .filter(|r| tag.is_none_or(|t| r.has_tag(t)))
                .cloned()
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

const COLUMNS: [&str; 4] = ["sample_id", "writer_id", "path", "tags"];

pub fn parse_tags(field: &str) -> Vec<String> {
    field
        .split(';')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// Reads and validates a manifest. Every referenced file must exist.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<Manifest, ManifestError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ManifestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new("")).to_path_buf();
    parse_manifest(&text, path, &base, true)
}

/// Parses manifest text. `base` anchors relative paths; `check_files`
/// controls whether missing files are errors.
pub fn parse_manifest(
    text: &str,
    source: &Path,
    base: &Path,
    check_files: bool,
) -> Result<Manifest, ManifestError> {
    let row_err = |line: u64, message: String| ManifestError::Row {
        path: source.to_path_buf(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| ManifestError::Header {
        path: source.to_path_buf(),
        message: e.to_string(),
    })?;
    let names: Vec<&str> = header.iter().collect();
    if !(names == COLUMNS[..3] || names == COLUMNS) {
        return Err(ManifestError::Header {
            path: source.to_path_buf(),
            message: format!(
                "header must be sample_id,writer_id,path[,tags], found {:?}",
                names.join(",")
            ),
        });
    }
    let width = names.len();

    let mut rows = Vec::new();
    let mut seen: HashMap<String, u64> = HashMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            row_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width {
            return Err(row_err(
                line,
                format!("expected {width} fields, found {}", record.len()),
            ));
        }
        let (sample_id, writer_id, rel) = (&record[0], &record[1], &record[2]);
        for (name, value) in [("sample_id", sample_id), ("writer_id", writer_id), ("path", rel)] {
            if value.is_empty() {
                return Err(row_err(line, format!("empty {name}")));
            }
        }
        if let Some(first) = seen.insert(sample_id.to_string(), line) {
            return Err(row_err(
                line,
                format!("duplicate sample_id {sample_id:?} (first on line {first})"),
            ));
        }
        let resolved = base.join(rel);
        if check_files && !resolved.is_file() {
            return Err(row_err(
                line,
                format!("file not found: {}", resolved.display()),
            ));
        }
        rows.push(ManifestRow {
            sample_id: sample_id.to_string(),
            writer_id: writer_id.to_string(),
            path: resolved,
            tags: if width == 4 { parse_tags(&record[3]) } else { Vec::new() },
            line,
        });
    }
    Ok(Manifest {
        source: source.to_path_buf(),
        rows,
    })
}

/// Writes a manifest with paths relative to `dir` where possible.
pub fn write_manifest(path: impl AsRef<Path>, rows: &[ManifestRow]) -> std::io::Result<()> {
    let path = path.as_ref();
    let dir = path.parent().unwrap_or(Path::new(""));
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(COLUMNS)?;
    for r in rows {
        let rel = r.path.strip_prefix(dir).unwrap_or(&r.path);
        w.write_record([
            r.sample_id.as_str(),
            r.writer_id.as_str(),
            &rel.to_string_lossy(),
            &r.tags.join(";"),
        ])?;
    }
    w.flush()
}
