//! CSV matrix files.
//!
//! One object per line, comma-separated decimals. An optional first line of
//! column labels and an optional first column of row labels are recognized
//! by failing to parse as numbers. Values are written in the shortest
//! decimal form that round-trips to the same binary64.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct CsvMatrix {
    pub header: Option<Vec<String>>,
    pub row_labels: Option<Vec<String>>,
    pub values: DMatrix<f64>,
}

impl CsvMatrix {
    /// Labels for the columns, without the corner cell above row labels.
    pub fn column_labels(&self) -> Option<Vec<String>> {
        let header = self.header.as_ref()?;
        let skip = usize::from(self.row_labels.is_some() && header.len() == self.values.ncols() + 1);
        let labels = header[skip..].to_vec();
        (labels.len() == self.values.ncols()).then_some(labels)
    }
}

fn parse_number(field: &str) -> Option<f64> {
    field.trim().parse::<f64>().ok()
}

/// Parses CSV text. Errors are domain errors labelled with `origin`.
pub fn parse_matrix<R: Read>(reader: R, origin: &str) -> Result<CsvMatrix, CliError> {
    let bad = |msg: String| CliError::Domain(format!("{origin}: {msg}"));
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);

    let mut header = None;
    let mut labels: Vec<String> = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labelled: Option<bool> = None;
    let mut width: Option<usize> = None;

    for (line, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => CliError::Io {
                path: origin.to_string(),
                source: io::Error::other(e.to_string()),
            },
            _ => bad(e.to_string()),
        })?;
        let fields: Vec<&str> = record.iter().collect();
        if fields.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        let parsed: Vec<Option<f64>> = fields.iter().map(|f| parse_number(f)).collect();
        let tail_numeric = parsed.iter().skip(1).all(Option::is_some);
        let has_label = parsed[0].is_none() && tail_numeric;
        if rows.is_empty() && header.is_none() && !(parsed.iter().all(Option::is_some) || has_label) {
            header = Some(fields.iter().map(|f| f.trim().to_string()).collect());
            continue;
        }
        match labelled {
            None => labelled = Some(has_label),
            Some(prev) if prev != has_label => {
                return Err(bad(format!(
                    "line {}: row labels must be present on every row or none",
                    line + 1
                )))
            }
            _ => {}
        }
        let start = usize::from(has_label);
        let mut row = Vec::with_capacity(fields.len() - start);
        for (col, value) in parsed.iter().enumerate().skip(start) {
            match value {
                Some(v) if v.is_finite() => row.push(*v),
                _ => {
                    return Err(bad(format!(
                        "line {}, field {}: {:?} is not a finite number",
                        line + 1,
                        col + 1,
                        fields[col]
                    )))
                }
            }
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(bad(format!(
                    "line {}: {} values, expected {w}",
                    line + 1,
                    row.len()
                )))
            }
            _ => {}
        }
        if has_label {
            labels.push(fields[0].trim().to_string());
        }
        rows.push(row);
    }

    let n = rows.len();
    let t = width.unwrap_or(0);
    if n == 0 || t == 0 {
        return Err(bad("no numeric rows".into()));
    }
    let values = DMatrix::from_fn(n, t, |i, j| rows[i][j]);
    Ok(CsvMatrix {
        header,
        row_labels: (labelled == Some(true)).then_some(labels),
        values,
    })
}

pub fn read_matrix(path: &Path) -> Result<CsvMatrix, CliError> {
    let file = File::open(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_matrix(io::BufReader::new(file), &path.display().to_string())
}

/// Writes a square matrix, with labels as header and first column when given.
pub fn write_matrix<W: Write>(
    out: W,
    values: &DMatrix<f64>,
    labels: Option<&[String]>,
) -> csv::Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    if let Some(labels) = labels {
        let mut head = vec![String::new()];
        head.extend(labels.iter().cloned());
        wtr.write_record(&head)?;
    }
    for i in 0..values.nrows() {
        let mut rec: Vec<String> = Vec::with_capacity(values.ncols() + 1);
        if let Some(labels) = labels {
            rec.push(labels[i].clone());
        }
        rec.extend(values.row(i).iter().map(|v| v.to_string()));
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_numeric() {
        let m = parse_matrix("1,2,3\n4,5,6.5\n".as_bytes(), "x").unwrap();
        assert_eq!(m.values, DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.5]));
        assert!(m.header.is_none() && m.row_labels.is_none());
    }

    #[test]
    fn header_and_labels() {
        let text = "id,f1,f2\na,1,2\nb,3,4\n";
        let m = parse_matrix(text.as_bytes(), "x").unwrap();
        assert_eq!(m.row_labels, Some(vec!["a".into(), "b".into()]));
        assert_eq!(m.column_labels(), Some(vec!["f1".into(), "f2".into()]));
        assert_eq!(m.values.shape(), (2, 2));
    }

    #[test]
    fn ragged_and_non_numeric_rejected() {
        assert!(parse_matrix("1,2\n3\n".as_bytes(), "x").is_err());
        assert!(parse_matrix("1,2\n3,x\n".as_bytes(), "x").is_err());
        assert!(parse_matrix("1,2\n3,inf\n".as_bytes(), "x").is_err());
        assert!(parse_matrix("a,b\n".as_bytes(), "x").is_err());
        assert!(parse_matrix("a,1\n2,3\n".as_bytes(), "x").is_err());
    }

    #[test]
    fn write_then_read_is_exact() {
        let values = DMatrix::from_row_slice(2, 2, &[1.0, 0.1 + 0.2, 0.1 + 0.2, 1.0]);
        let labels = vec!["x".to_string(), "y".to_string()];
        let mut buf = Vec::new();
        write_matrix(&mut buf, &values, Some(&labels)).unwrap();
        let back = parse_matrix(buf.as_slice(), "x").unwrap();
        assert_eq!(back.values, values);
        assert_eq!(back.row_labels.as_deref(), Some(&labels[..]));
    }
}
