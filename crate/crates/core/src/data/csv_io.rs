//! CSV ingestion: a header row, numeric feature columns and optionally one
//! integer label column.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use super::Dataset;
use crate::error::{Error, Result};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Reads a dataset. Labels (from `label_column`, if given) are remapped to
/// contiguous ids in increasing order of their original value, which are
/// kept in [`Dataset::label_values`].
///
/// Row numbers in errors are 1-based file lines, the header being line 1.
pub fn load_csv(path: impl AsRef<Path>, label_column: Option<&str>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(io_err(path))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(file);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: "missing header row".into(),
        });
    }
    let label_idx = match label_column {
        None => None,
        Some(name) => Some(header.iter().position(|h| h == name).ok_or_else(|| Error::Format {
            path: path.to_path_buf(),
            message: format!("no column named {name:?}"),
        })?),
    };

    let mut features = Vec::new();
    let mut raw_labels = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        let row = r + 2;
        if record.len() != header.len() {
            return Err(Error::RaggedRow {
                path: path.to_path_buf(),
                row,
                expected: header.len(),
                found: record.len(),
            });
        }
        let mut x = Vec::with_capacity(header.len());
        for (c, cell) in record.iter().enumerate() {
            let cell = cell.trim();
            let bad = || Error::NonNumeric {
                path: path.to_path_buf(),
                row,
                column: header[c].clone(),
                value: cell.to_owned(),
            };
            if Some(c) == label_idx {
                raw_labels.push(cell.parse::<i64>().map_err(|_| bad())?);
            } else {
                x.push(cell.parse::<f64>().map_err(|_| bad())?);
            }
        }
        features.push(x);
    }

    let (labels, label_values) = if label_idx.is_some() {
        let ids: BTreeMap<i64, usize> = raw_labels
            .iter()
            .copied()
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .enumerate()
            .map(|(id, v)| (v, id))
            .collect();
        let labels = raw_labels.iter().map(|v| ids[v]).collect();
        (Some(labels), Some(ids.into_keys().collect()))
    } else {
        (None, None)
    };
    let mut d = Dataset::new(features, labels)?;
    d.label_values = label_values;
    Ok(d)
}

/// Writes `x0, x1, ..., label`. Floats use the shortest decimal form that
/// parses back to the same value (at most 17 significant digits).
pub fn save_csv(path: impl AsRef<Path>, data: &Dataset) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    let mut header: Vec<String> = (0..data.dim()).map(|d| format!("x{d}")).collect();
    if data.labels.is_some() {
        header.push("label".into());
    }
    out.push_str(&header.join(","));
    out.push('\n');
    for (i, row) in data.features.iter().enumerate() {
        let mut cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        if let Some(labels) = &data.labels {
            let id = labels[i];
            let value = data.label_values.as_ref().map_or(id as i64, |vals| vals[id]);
            cells.push(value.to_string());
        }
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    let mut file = File::create(path).map_err(io_err(path))?;
    file.write_all(out.as_bytes()).map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> std::path::PathBuf {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn loads_and_remaps_labels() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "a.csv", "x,y,label\n1.5,2,7\n0,-1e-3,3\n4,5,7\n");
        let d = load_csv(&p, Some("label")).unwrap();
        assert_eq!(d.features, vec![vec![1.5, 2.0], vec![0.0, -1e-3], vec![4.0, 5.0]]);
        assert_eq!(d.labels, Some(vec![1, 0, 1]));
        assert_eq!(d.label_values, Some(vec![3, 7]));
        assert_eq!(d.class_counts, vec![1, 2]);

        let plain = load_csv(&p, None).unwrap();
        assert_eq!(plain.dim(), 3);
        assert!(plain.labels.is_none());
    }

    #[test]
    fn distinct_errors() {
        let dir = tempfile::tempdir().unwrap();
        let ragged = write(&dir, "r.csv", "x,y\n1,2\n3\n");
        assert!(matches!(load_csv(&ragged, None), Err(Error::RaggedRow { row: 3, .. })));
        let text = write(&dir, "t.csv", "x,y\n1,abc\n");
        match load_csv(&text, None) {
            Err(Error::NonNumeric { row, column, .. }) => {
                assert_eq!(row, 2);
                assert_eq!(column, "y");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(load_csv(dir.path().join("none.csv"), None), Err(Error::Io { .. })));
        let p = write(&dir, "l.csv", "x,y\n1,2\n");
        assert!(matches!(load_csv(&p, Some("label")), Err(Error::Format { .. })));
    }

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let d = Dataset::new(
            vec![vec![0.1 + 0.2, -1.0 / 3.0], vec![1e-300, 6.02214076e23]],
            Some(vec![1, 0]),
        )
        .unwrap();
        let p = dir.path().join("d.csv");
        save_csv(&p, &d).unwrap();
        let back = load_csv(&p, Some("label")).unwrap();
        assert_eq!(back.features, d.features);
        assert_eq!(back.labels, d.labels);
    }
}
