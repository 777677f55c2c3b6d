//! Plain-text path files: one line per column, each line the sorted
//! comma-separated row indices sampled in that column. Lines starting
//! with `#` are comments and are ignored on read, so files are
//! human-diffable and safe to annotate.

use std::fmt::Write as _;
use std::path::Path as FsPath;

use crate::error::{Error, Result};
use crate::grid::{Path, StageAction};

/// Writes a path file with a descriptive comment header.
pub fn save_path_file(path: &Path, file: &FsPath) -> Result<()> {
    let mut out = String::new();
    writeln!(out, "# transect path n={} k={}", path.len(), path.k()).expect("string write");
    for action in path.actions() {
        let line: Vec<String> = action.rows().iter().map(|r| r.to_string()).collect();
        writeln!(out, "{}", line.join(",")).expect("string write");
    }
    std::fs::write(file, out)?;
    Ok(())
}

/// Reads a path file written by [`save_path_file`] (or by hand).
pub fn load_path_file(file: &FsPath) -> Result<Path> {
    let text = std::fs::read_to_string(file)?;
    load_path_str(&text)
}

pub(crate) fn load_path_str(text: &str) -> Result<Path> {
    let mut actions = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut rows = Vec::new();
        for (col0, token) in line.split(',').enumerate() {
            let row = token.trim().parse::<u32>().map_err(|e| Error::Parse {
                line: idx + 1,
                col: col0 + 1,
                msg: format!("bad row index `{}`: {e}", token.trim()),
            })?;
            rows.push(row);
        }
        actions.push(StageAction::from_rows(rows).map_err(|e| Error::Parse {
            line: idx + 1,
            col: 1,
            msg: e.to_string(),
        })?);
    }
    if actions.is_empty() {
        return Err(Error::Parse {
            line: 1,
            col: 1,
            msg: "path file has no data lines".into(),
        });
    }
    Path::new(actions)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_file_round_trips() {
        let path = Path::new(vec![
            StageAction::from_rows(vec![1, 3]).unwrap(),
            StageAction::from_rows(vec![2, 5]).unwrap(),
            StageAction::from_rows(vec![1, 2]).unwrap(),
        ])
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("plan.path");
        save_path_file(&path, &file).unwrap();
        let loaded = load_path_file(&file).unwrap();
        assert_eq!(loaded, path);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# a comment\n\n1,2\n# another\n2,3\n";
        let path = load_path_str(text).unwrap();
        assert_eq!(path.len(), 2);
        assert_eq!(path.actions()[1].rows(), &[2, 3]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match load_path_str("1,2\n1,x\n") {
            Err(Error::Parse { line, col, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(col, 2);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(load_path_str("# only comments\n").is_err());
        assert!(load_path_str("1,2\n3\n").is_err()); // mixed arity
    }
}
