//! CSV and JSON output.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

/// Serializes `rows` with a header row; `None` fields become empty cells.
pub fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)
            .map_err(|e| Error::Config(format!("csv: {e}")))?;
    }
    w.into_inner()
        .map_err(|e| Error::Config(format!("csv: {e}")))
}

/// `out.csv` → `out.summary.json`.
pub fn summary_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("summary.json")
}

/// With a path, a CSV table goes to `path` and the JSON report next to it;
/// a report without a table goes to `path` itself. Without a path the JSON
/// report is written to `stdout`.
pub fn emit(
    report: &serde_json::Value,
    csv: Option<&[u8]>,
    path: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<Vec<PathBuf>> {
    let json = serde_json::to_string_pretty(report)? + "\n";
    match (path, csv) {
        (Some(p), Some(bytes)) => {
            std::fs::write(p, bytes)?;
            let sp = summary_path(p);
            std::fs::write(&sp, json)?;
            Ok(vec![p.to_path_buf(), sp])
        }
        (Some(p), None) => {
            std::fs::write(p, json)?;
            Ok(vec![p.to_path_buf()])
        }
        (None, _) => {
            stdout.write_all(json.as_bytes())?;
            Ok(Vec::new())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        a: usize,
        b: Option<f64>,
        c: bool,
    }

    #[test]
    fn optional_fields_are_empty() {
        let bytes = csv_bytes(&[
            Row {
                a: 1,
                b: None,
                c: true,
            },
            Row {
                a: 2,
                b: Some(0.25),
                c: false,
            },
        ])
        .unwrap();
        assert_eq!(
            String::from_utf8(bytes).unwrap(),
            "a,b,c\n1,,true\n2,0.25,false\n"
        );
    }

    #[test]
    fn summary_sits_next_to_csv() {
        assert_eq!(
            summary_path(Path::new("runs/out.csv")),
            PathBuf::from("runs/out.summary.json")
        );
    }
}
