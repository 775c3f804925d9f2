use std::fs::File;
use std::io::Write;
use std::path::Path;

use super::{Matrix, Real, Vector};
use crate::error::{Error, Result};

fn read_records(path: &Path) -> Result<Vec<Vec<f64>>> {
    let file = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(file);
    let mut rows = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let row = rec
            .iter()
            .map(|f| {
                f.parse::<f64>().map_err(|_| {
                    Error::Parse(format!("{}:{}: bad number {f:?}", path.display(), line + 1))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// Reads a headerless numeric CSV, one matrix row per line.
pub fn read_matrix_csv<T: Real>(path: impl AsRef<Path>) -> Result<Matrix<T>> {
    let path = path.as_ref();
    let rows = read_records(path)?;
    let rows: Vec<Vec<T>> = rows
        .into_iter()
        .map(|r| r.into_iter().map(T::lit).collect())
        .collect();
    Matrix::from_rows(&rows).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Reads a vector stored as a single column (a single row is also accepted).
pub fn read_vector_csv<T: Real>(path: impl AsRef<Path>) -> Result<Vector<T>> {
    let path = path.as_ref();
    let rows = read_records(path)?;
    let values: Vec<f64> = if rows.iter().all(|r| r.len() == 1) {
        rows.into_iter().map(|r| r[0]).collect()
    } else if rows.len() == 1 {
        rows.into_iter().next().unwrap_or_default()
    } else {
        return Err(Error::Parse(format!(
            "{}: expected a single column",
            path.display()
        )));
    };
    Vector::new(values.into_iter().map(T::lit).collect())
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

pub fn write_matrix_csv<T: Real>(path: impl AsRef<Path>, m: &Matrix<T>) -> Result<()> {
    let mut f = File::create(path.as_ref())?;
    for i in 0..m.rows() {
        let line: Vec<String> = m.row(i).iter().map(|x| fmt_f64(x.to_f64_lossy())).collect();
        writeln!(f, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn write_vector_csv<T: Real>(path: impl AsRef<Path>, v: &[T]) -> Result<()> {
    let mut f = File::create(path.as_ref())?;
    for x in v {
        writeln!(f, "{}", fmt_f64(x.to_f64_lossy()))?;
    }
    Ok(())
}
