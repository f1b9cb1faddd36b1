//! Atomic file output: write to a temporary file in the target directory,
//! then rename over the destination.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tempfile::NamedTempFile;

use crate::CliError;

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let dest = dir.join(name);
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| io_error(dir, e))?;
    tmp.write_all(bytes).map_err(|e| io_error(&dest, e))?;
    tmp.as_file().sync_all().map_err(|e| io_error(&dest, e))?;
    tmp.persist(&dest).map_err(|e| io_error(&dest, e.error))?;
    Ok(dest)
}

pub fn write_json<T: Serialize>(
    dir: &Path,
    name: &str,
    value: &T,
    pretty: bool,
) -> Result<PathBuf, CliError> {
    let mut text = if pretty {
        serde_json::to_string_pretty(value)
    } else {
        serde_json::to_string(value)
    }
    .map_err(|e| io_error(&dir.join(name), e))?;
    text.push('\n');
    write_atomic(dir, name, text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replaces_existing_file_and_leaves_no_temporaries() {
        let dir = tempfile::tempdir().unwrap();
        write_atomic(dir.path(), "a.txt", b"first").unwrap();
        let path = write_atomic(dir.path(), "a.txt", b"second").unwrap();
        assert_eq!(std::fs::read_to_string(path).unwrap(), "second");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn json_floats_round_trip_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let x = [0.1 + 0.2, std::f64::consts::PI, 1e-300];
        let path = write_json(dir.path(), "x.json", &x, false).unwrap();
        let back: [f64; 3] = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(back, x);
    }
}
