//! Generic numeric CSV: a header row of feature names, one row per event,
//! and an integer class label in the last column.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::{Dataset, FeatureId};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub fn read_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv_from(file)
}

pub fn read_csv_from<R: Read>(reader: R) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.len() < 2 {
        return Err(Error::Parse {
            line: 1,
            message: "expected at least one feature column and a label column".into(),
        });
    }
    let n_features = header.len() - 1;
    let names: Vec<String> = header.iter().take(n_features).map(str::to_owned).collect();

    let mut data = Vec::new();
    let mut labels = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        for tok in record.iter().take(n_features) {
            let v: f64 = tok.trim().parse().map_err(|_| Error::Parse {
                line,
                message: format!("not a number: `{tok}`"),
            })?;
            data.push(v);
        }
        let tok = record[n_features].trim();
        let label: u8 = tok.parse().map_err(|_| Error::Parse {
            line,
            message: format!("label is not a class id: `{tok}`"),
        })?;
        labels.push(label);
    }
    let features = Matrix::new(labels.len(), n_features, data)?;
    let ids = (1..=n_features).map(FeatureId).collect();
    Dataset::new(features, labels, ids, names)
}

pub fn write_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv_to(dataset, file)
}

pub fn write_csv_to<W: Write>(dataset: &Dataset, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = dataset.feature_names().iter().map(String::as_str).collect();
    header.push("label");
    wtr.write_record(&header)?;
    let mut fields = Vec::with_capacity(header.len());
    for (row, label) in dataset.features().iter_rows().zip(dataset.labels()) {
        fields.clear();
        fields.extend(row.iter().map(f64::to_string));
        fields.push(label.to_string());
        wtr.write_record(&fields)?;
    }
    wtr.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}
