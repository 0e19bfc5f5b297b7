use super::Matrix;
use crate::error::{Error, Result};

/// Parses the matrix CSV format: one row per line, comma-separated decimal
/// literals, no header. Surrounding whitespace on each field is ignored and
/// trailing blank lines are allowed.
pub fn parse_matrix_csv(text: &str) -> Result<Matrix> {
    let lines: Vec<&str> = text.lines().collect();
    let last = lines
        .iter()
        .rposition(|l| !l.trim().is_empty())
        .ok_or(Error::Parse {
            line: 1,
            column: 1,
            message: "empty matrix file".into(),
        })?;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(last + 1);
    for (i, line) in lines[..=last].iter().enumerate() {
        let mut row = Vec::new();
        for (j, field) in line.split(',').enumerate() {
            let field = field.trim();
            let value: f64 = field.parse().map_err(|_| Error::Parse {
                line: i + 1,
                column: j + 1,
                message: format!("not a decimal literal: {field:?}"),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    line: i + 1,
                    column: j + 1,
                    message: format!("non-finite value {field:?}"),
                });
            }
            row.push(value);
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    line: i + 1,
                    column: row.len().min(first.len()) + 1,
                    message: format!("expected {} fields, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    Matrix::from_rows(&rows)
}

/// Writes a matrix in the CSV format using shortest round-trip literals.
pub fn write_matrix_csv(m: &Matrix) -> String {
    let mut out = String::new();
    for r in 0..m.rows() {
        let fields: Vec<String> = m.row(r).iter().map(|x| format!("{x}")).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}
