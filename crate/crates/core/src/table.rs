//! Two-column numeric CSV input shared by tabulated modulations and spectra.

use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

/// Reads `(x, y)` rows. `#` lines are comments and a non-numeric first row is
/// taken as a header.
pub fn read_two_column<R: Read>(reader: R) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != 2 {
            return Err(Error::Table(format!("row {} has {} columns, expected 2", i + 1, record.len())));
        }
        let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
        match parsed {
            (Ok(x), Ok(y)) if x.is_finite() && y.is_finite() => rows.push((x, y)),
            _ if i == 0 => continue,
            _ => return Err(Error::Table(format!("row {} is not numeric: {:?}", i + 1, record))),
        }
    }
    if rows.len() < 2 {
        return Err(Error::Table("need at least two rows".into()));
    }
    Ok(rows)
}

pub fn read_two_column_file(path: impl AsRef<Path>) -> Result<Vec<(f64, f64)>> {
    read_two_column(std::fs::File::open(path)?)
}
