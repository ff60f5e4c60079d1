//! Atomic result writing: every file goes to a temporary sibling first and is
//! renamed into place only once all outputs are complete.

use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::config::Format;
use crate::error::CliError;
use crate::table::ResultTable;

/// Sidecar that carries the metadata of a CSV table.
pub fn metadata_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".meta.json");
    path.with_file_name(name)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

fn staged(path: &Path, bytes: &[u8]) -> Result<NamedTempFile, CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut file = NamedTempFile::new_in(dir).map_err(io_err(path))?;
    file.write_all(bytes).map_err(io_err(path))?;
    file.as_file().sync_all().map_err(io_err(path))?;
    Ok(file)
}

/// Writes to `path`, or to stdout when no path is given. CSV output to a
/// file also writes the metadata sidecar.
pub fn write_table(table: &ResultTable, format: Format, path: Option<&Path>) -> Result<(), CliError> {
    let body = match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    let Some(path) = path else {
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        return lock.write_all(&body).and_then(|_| lock.flush()).map_err(io_err(Path::new("<stdout>")));
    };
    let mut files = vec![(path.to_path_buf(), staged(path, &body)?)];
    if format == Format::Csv {
        let meta = metadata_path(path);
        let staged_meta = staged(&meta, &table.metadata_json())?;
        files.push((meta, staged_meta));
    }
    for (target, file) in files {
        file.persist(&target).map_err(|e| CliError::Io { path: target.clone(), source: e.error })?;
    }
    Ok(())
}
