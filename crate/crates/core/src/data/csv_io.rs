//! Feature CSV (`id,label,f0,...`), label CSV (`id,label`) and probability
//! CSV (`id,p_malignant`). Rows are numbered from 1, not counting the header.

use std::path::Path;

use csv::{ReaderBuilder, StringRecord, Terminator, WriterBuilder};

use super::dataset::{DataError, LabeledDataset};
use crate::fsutil::write_atomic;

fn read_file(path: &Path) -> Result<Vec<u8>, DataError> {
    std::fs::read(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn records(bytes: &[u8]) -> csv::StringRecordsIntoIter<&[u8]> {
    ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(bytes)
        .into_records()
}

fn next_record(
    iter: &mut csv::StringRecordsIntoIter<&[u8]>,
    row: usize,
) -> Result<Option<StringRecord>, DataError> {
    match iter.next() {
        None => Ok(None),
        Some(Ok(r)) => Ok(Some(r)),
        Some(Err(e)) => Err(DataError::Csv {
            row,
            message: e.to_string(),
        }),
    }
}

fn parse_label(field: &str, row: usize, id: &str) -> Result<u8, DataError> {
    match field {
        "0" => Ok(0),
        "1" => Ok(1),
        other => Err(DataError::Label {
            row,
            id: id.to_string(),
            value: other.to_string(),
        }),
    }
}

fn parse_value(field: &str, row: usize, id: &str, column: &str) -> Result<f64, DataError> {
    let v: f64 = field.trim().parse().map_err(|_| DataError::NonNumeric {
        row,
        id: id.to_string(),
        column: column.to_string(),
        value: field.to_string(),
    })?;
    if !v.is_finite() {
        return Err(DataError::NonFinite {
            row,
            id: id.to_string(),
            column: column.to_string(),
        });
    }
    Ok(v)
}

fn check_width(record: &StringRecord, expected: usize, row: usize) -> Result<(), DataError> {
    if record.len() != expected {
        return Err(DataError::Ragged {
            row,
            id: record.get(0).unwrap_or_default().to_string(),
            expected,
            found: record.len(),
        });
    }
    Ok(())
}

fn feature_header_width(header: &StringRecord) -> Result<usize, DataError> {
    if header.len() < 3 || &header[0] != "id" || &header[1] != "label" {
        return Err(DataError::Header(
            "expected `id,label,f0,...,f{D-1}`".to_string(),
        ));
    }
    for (j, name) in header.iter().skip(2).enumerate() {
        if name != format!("f{j}") {
            return Err(DataError::Header(format!(
                "column {} is {name:?}, expected \"f{j}\"",
                j + 3
            )));
        }
    }
    Ok(header.len() - 2)
}

/// Parses a Feature CSV held in memory.
pub fn parse_feature_csv(bytes: &[u8]) -> Result<LabeledDataset, DataError> {
    let mut iter = records(bytes);
    let header = next_record(&mut iter, 0)?.ok_or(DataError::Empty)?;
    let n_features = feature_header_width(&header)?;

    let mut ids = Vec::new();
    let mut labels = Vec::new();
    let mut features = Vec::new();
    let mut row = 0;
    while let Some(record) = next_record(&mut iter, row + 1)? {
        row += 1;
        check_width(&record, n_features + 2, row)?;
        let id = &record[0];
        labels.push(parse_label(&record[1], row, id)?);
        for (j, field) in record.iter().skip(2).enumerate() {
            features.push(parse_value(field, row, id, &header[j + 2])?);
        }
        ids.push(id.to_string());
    }
    LabeledDataset::new(ids, labels, features, n_features)
}

pub fn load_feature_matrix(path: &Path) -> Result<LabeledDataset, DataError> {
    parse_feature_csv(&read_file(path)?)
}

fn csv_writer(out: &mut Vec<u8>) -> csv::Writer<&mut Vec<u8>> {
    WriterBuilder::new()
        .terminator(Terminator::Any(b'\n'))
        .from_writer(out)
}

fn finish(writer: csv::Writer<&mut Vec<u8>>) -> Result<(), DataError> {
    writer
        .into_inner()
        .map(|_| ())
        .map_err(|e| DataError::Invalid(e.to_string()))
}

fn csv_err(e: csv::Error) -> DataError {
    DataError::Invalid(e.to_string())
}

/// Serializes `ds` as a Feature CSV. Floats use the shortest representation
/// that parses back to the same value.
pub fn write_feature_csv(ds: &LabeledDataset) -> Result<Vec<u8>, DataError> {
    let mut out = Vec::new();
    let mut w = csv_writer(&mut out);
    let mut header = vec!["id".to_string(), "label".to_string()];
    header.extend((0..ds.n_features()).map(|j| format!("f{j}")));
    w.write_record(&header).map_err(csv_err)?;
    for i in 0..ds.n_rows() {
        let mut rec = vec![ds.ids()[i].clone(), ds.labels()[i].to_string()];
        rec.extend(ds.row(i).iter().map(|v| format!("{v:?}")));
        w.write_record(&rec).map_err(csv_err)?;
    }
    finish(w)?;
    Ok(out)
}

pub fn save_feature_matrix(ds: &LabeledDataset, path: &Path) -> Result<(), DataError> {
    let bytes = write_feature_csv(ds)?;
    write_atomic(path, &bytes).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses either a two-column `id,label` file or a full Feature CSV, returning
/// ids and labels.
pub fn parse_labels(bytes: &[u8]) -> Result<(Vec<String>, Vec<u8>), DataError> {
    let mut iter = records(bytes);
    let header = next_record(&mut iter, 0)?.ok_or(DataError::Empty)?;
    if header.len() != 2 || &header[0] != "id" || &header[1] != "label" {
        let ds = parse_feature_csv(bytes)?;
        return Ok((ds.ids().to_vec(), ds.labels().to_vec()));
    }
    let mut ids = Vec::new();
    let mut labels = Vec::new();
    let mut row = 0;
    while let Some(record) = next_record(&mut iter, row + 1)? {
        row += 1;
        check_width(&record, 2, row)?;
        labels.push(parse_label(&record[1], row, &record[0])?);
        ids.push(record[0].to_string());
    }
    if ids.is_empty() {
        return Err(DataError::Empty);
    }
    Ok((ids, labels))
}

pub fn load_labels(path: &Path) -> Result<(Vec<String>, Vec<u8>), DataError> {
    parse_labels(&read_file(path)?)
}

/// Parses a probability CSV with header `id,p_malignant`.
pub fn parse_probabilities(bytes: &[u8]) -> Result<(Vec<String>, Vec<f64>), DataError> {
    let mut iter = records(bytes);
    let header = next_record(&mut iter, 0)?.ok_or(DataError::Empty)?;
    if header.len() != 2 || &header[0] != "id" || &header[1] != "p_malignant" {
        return Err(DataError::Header("expected `id,p_malignant`".to_string()));
    }
    let mut ids = Vec::new();
    let mut probs = Vec::new();
    let mut row = 0;
    while let Some(record) = next_record(&mut iter, row + 1)? {
        row += 1;
        check_width(&record, 2, row)?;
        let p = parse_value(&record[1], row, &record[0], "p_malignant")?;
        if !(0.0..=1.0).contains(&p) {
            return Err(DataError::Probability {
                row,
                id: record[0].to_string(),
            });
        }
        ids.push(record[0].to_string());
        probs.push(p);
    }
    if ids.is_empty() {
        return Err(DataError::Empty);
    }
    Ok((ids, probs))
}

pub fn load_probabilities(path: &Path) -> Result<(Vec<String>, Vec<f64>), DataError> {
    parse_probabilities(&read_file(path)?)
}

pub fn write_probabilities(ids: &[String], probs: &[f64]) -> Result<Vec<u8>, DataError> {
    if ids.len() != probs.len() {
        return Err(DataError::Invalid(format!(
            "{} ids but {} probabilities",
            ids.len(),
            probs.len()
        )));
    }
    let mut out = Vec::new();
    let mut w = csv_writer(&mut out);
    w.write_record(["id", "p_malignant"]).map_err(csv_err)?;
    for (id, p) in ids.iter().zip(probs) {
        w.write_record([id.as_str(), &format!("{p:?}")])
            .map_err(csv_err)?;
    }
    finish(w)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_two_row_file() {
        let ds = parse_feature_csv(b"id,label,f0,f1\na,0,1.0,2.0\nb,1,3.0,4.0\n").unwrap();
        assert_eq!(ds.n_rows(), 2);
        assert_eq!(ds.n_features(), 2);
        assert_eq!(ds.labels(), [0, 1]);
        assert_eq!(ds.row(1), [3.0, 4.0]);
    }

    #[test]
    fn label_error_names_row() {
        let bytes = b"id,label,f0,f1\na,0,1.0,2.0\nb,1,3.0,4.0\nc,2,1.0,2.0\n";
        let err = parse_feature_csv(bytes).unwrap_err();
        assert!(
            err.to_string().starts_with("label outside {0,1} at row 3"),
            "{err}"
        );
    }

    #[test]
    fn nan_error_names_row_and_column() {
        let err = parse_feature_csv(b"id,label,f0,f1\na,0,NaN,2.0\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("\"a\"") && msg.contains("column f0"), "{msg}");
        let err = parse_feature_csv(b"id,label,f0\na,0,inf\n").unwrap_err();
        assert!(matches!(err, DataError::NonFinite { .. }));
    }

    #[test]
    fn other_malformations() {
        assert!(matches!(
            parse_feature_csv(b"id,label,x0\na,0,1\n"),
            Err(DataError::Header(_))
        ));
        assert!(matches!(
            parse_feature_csv(b"id,label\na,0\n"),
            Err(DataError::Header(_))
        ));
        assert!(matches!(
            parse_feature_csv(b"id,label,f0,f1\na,0,1\n"),
            Err(DataError::Ragged { row: 1, .. })
        ));
        assert!(matches!(
            parse_feature_csv(b"id,label,f0\na,0,abc\n"),
            Err(DataError::NonNumeric { .. })
        ));
        assert!(matches!(
            parse_feature_csv(b"id,label,f0\n"),
            Err(DataError::Empty)
        ));
        assert!(matches!(parse_feature_csv(b""), Err(DataError::Empty)));
        assert!(load_feature_matrix(Path::new("/nonexistent/x.csv")).is_err());
    }

    #[test]
    fn labels_from_either_layout() {
        let (ids, labels) = parse_labels(b"id,label\nx,1\ny,0\n").unwrap();
        assert_eq!(ids, ["x", "y"]);
        assert_eq!(labels, [1, 0]);
        let (_, labels) = parse_labels(b"id,label,f0\nx,1,0.5\n").unwrap();
        assert_eq!(labels, [1]);
    }

    #[test]
    fn probability_round_trip() {
        let ids = vec!["a".to_string(), "b".to_string()];
        let probs = vec![0.6, 1.0 / 3.0];
        let bytes = write_probabilities(&ids, &probs).unwrap();
        assert!(bytes.starts_with(b"id,p_malignant\na,0.6\n"));
        assert_eq!(parse_probabilities(&bytes).unwrap(), (ids, probs));
        assert!(matches!(
            parse_probabilities(b"id,p_malignant\na,1.5\n"),
            Err(DataError::Probability { .. })
        ));
    }
}
