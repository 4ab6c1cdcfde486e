use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes `bytes` to `path` through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| CliError::internal(format!("cannot create {}: {e}", dir.display())))?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("artifact");
    let tmp = dir.join(format!(".{name}.tmp"));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    result.map_err(|e| CliError::internal(format!("cannot write {}: {e}", path.display())))
}

pub fn read_to_string(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))
}

/// Serializes rows with a header into CSV text (LF line endings).
pub fn csv_text<T: serde::Serialize>(rows: &[T]) -> CliResult<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::internal(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::internal(e.to_string()))
}

pub fn pretty_json<T: serde::Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Collects artifacts written into an output directory, remembering their
/// checksums in write order.
pub struct ArtifactDir {
    root: PathBuf,
    pub written: Vec<(String, String)>,
}

impl ArtifactDir {
    pub fn new(root: impl Into<PathBuf>) -> CliResult<Self> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| CliError::config(format!("cannot create {}: {e}", root.display())))?;
        Ok(Self { root, written: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, relative: &str, contents: &str) -> CliResult<()> {
        write_atomic(&self.root.join(relative), contents.as_bytes())?;
        self.written.push((relative.to_string(), sha256_hex(contents.as_bytes())));
        Ok(())
    }
}
