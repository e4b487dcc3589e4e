use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use super::prepare::RawDataset;
use crate::error::{Error, Result};

/// Reads a dataset with header `x0,...,x{d-1}[,label]`.
pub fn read_csv_dataset(path: impl AsRef<Path>) -> Result<RawDataset> {
    read_csv_from(fs::File::open(path)?)
}

pub(crate) fn read_csv_from<R: Read>(reader: R) -> Result<RawDataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr.headers()?.clone();
    let has_label = header.iter().last() == Some("label");
    let d = header.len() - usize::from(has_label);
    if d == 0 {
        return Err(Error::Format("no coordinate columns".into()));
    }
    for (j, name) in header.iter().take(d).enumerate() {
        if name != format!("x{j}") {
            return Err(Error::Format(format!(
                "column {j} is named `{name}`, expected `x{j}`"
            )));
        }
    }

    let mut values = Vec::new();
    let mut labels = has_label.then(Vec::new);
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != header.len() {
            return Err(Error::Format(format!(
                "row {} has {} fields, expected {}",
                line + 1,
                record.len(),
                header.len()
            )));
        }
        for field in record.iter().take(d) {
            let v: f64 = field.trim().parse().map_err(|_| {
                Error::Format(format!("row {}: `{field}` is not a number", line + 1))
            })?;
            values.push(v);
        }
        if let Some(l) = labels.as_mut() {
            let field = &record[d];
            l.push(field.trim().parse().map_err(|_| {
                Error::Format(format!("row {}: `{field}` is not a label", line + 1))
            })?);
        }
    }
    RawDataset::new(values, d, labels)
}

/// Writes the header and one row per point; numbers use the shortest
/// representation that round-trips.
pub fn write_csv_dataset<W: Write>(writer: W, raw: &RawDataset) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    let mut header: Vec<String> = (0..raw.dim()).map(|j| format!("x{j}")).collect();
    if raw.labels().is_some() {
        header.push("label".into());
    }
    w.write_record(&header)?;
    let mut row = Vec::with_capacity(header.len());
    for i in 0..raw.len() {
        row.clear();
        row.extend(raw.row(i).iter().map(|v| v.to_string()));
        if let Some(l) = raw.labels() {
            row.push(l[i].to_string());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// One weight per line; blank lines are ignored.
pub fn read_weights(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    fs::read_to_string(path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim()
                .parse()
                .map_err(|_| Error::Format(format!("weights line {}: `{l}` is not a number", i + 1)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_with_labels() {
        let raw = RawDataset::new(vec![0.0, 0.1, 255.0, 1e-300], 2, Some(vec![3, 7])).unwrap();
        let mut buf = Vec::new();
        write_csv_dataset(&mut buf, &raw).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x0,x1,label\n0,0.1,3\n"));
        assert_eq!(read_csv_from(&buf[..]).unwrap(), raw);
    }

    #[test]
    fn header_only() {
        let raw = read_csv_from(&b"x0,x1,label\n"[..]).unwrap();
        assert!(raw.is_empty());
        assert_eq!(raw.dim(), 2);
    }

    #[test]
    fn rejects_bad_header_and_fields() {
        assert!(matches!(read_csv_from(&b"a,b\n1,2\n"[..]).unwrap_err(), Error::Format(_)));
        assert!(matches!(read_csv_from(&b"x0,x1\n1,zz\n"[..]).unwrap_err(), Error::Format(_)));
        assert!(read_csv_from(&b"x0,x1\n1\n"[..]).is_err());
    }
}
