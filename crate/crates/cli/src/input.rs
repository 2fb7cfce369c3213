//! Reading samples from disk. Non-numeric cells are hard errors.

use std::path::Path;

use crate::error::CliError;

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn number(text: &str, path: &Path, line: usize) -> Result<f64, CliError> {
    text.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Input(format!("{}:{line}: '{text}' is not a finite number", path.display())))
}

/// One group per file; values separated by whitespace and/or commas.
pub fn single_column(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = read(path)?;
    let mut values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        for token in line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
        {
            values.push(number(token, path, idx + 1)?);
        }
    }
    if values.is_empty() {
        return Err(CliError::Input(format!("{} holds no values", path.display())));
    }
    Ok(values)
}

fn column_index(headers: &csv::StringRecord, selector: &str, path: &Path) -> Result<usize, CliError> {
    if let Some(pos) = headers.iter().position(|h| h == selector) {
        return Ok(pos);
    }
    match selector.parse::<usize>() {
        Ok(k) if (1..=headers.len()).contains(&k) => Ok(k - 1),
        _ => Err(CliError::Input(format!(
            "{}: no column '{selector}' (columns: {})",
            path.display(),
            headers.iter().collect::<Vec<_>>().join(", ")
        ))),
    }
}

/// Two columns of a comma-separated file with a header row. Empty cells
/// are allowed so the groups may differ in size.
pub fn two_columns(path: &Path, training: &str, test: &str) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let text = read(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
        .clone();
    let (ix, iy) = (
        column_index(&headers, training, path)?,
        column_index(&headers, test, path)?,
    );
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let line = row + 2;
        for (index, dest) in [(ix, &mut xs), (iy, &mut ys)] {
            match record.get(index) {
                Some(cell) if !cell.is_empty() => dest.push(number(cell, path, line)?),
                _ => {}
            }
        }
    }
    Ok((xs, ys))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn temp(name: &str, body: &str) -> std::path::PathBuf {
        let path = std::env::temp_dir().join(format!("maxprec-input-{}-{name}", std::process::id()));
        std::fs::write(&path, body).unwrap();
        path
    }

    #[test]
    fn mixed_delimiters() {
        let p = temp("mixed", "1.5, 2\n3\t4 ,5\n\n");
        assert_eq!(single_column(&p).unwrap(), vec![1.5, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn non_numeric_is_rejected() {
        let p = temp("bad", "1\n2\nthree\n");
        assert!(matches!(single_column(&p), Err(CliError::Input(_))));
        let p = temp("nan", "1\nNaN\n");
        assert!(single_column(&p).is_err());
    }

    #[test]
    fn columns_by_name_or_index() {
        let p = temp("cols", "a,b\n1,2\n3,\n5,6\n");
        assert_eq!(
            two_columns(&p, "a", "b").unwrap(),
            (vec![1.0, 3.0, 5.0], vec![2.0, 6.0])
        );
        assert_eq!(
            two_columns(&p, "2", "1").unwrap(),
            (vec![2.0, 6.0], vec![1.0, 3.0, 5.0])
        );
        assert!(two_columns(&p, "c", "a").is_err());
        let p = temp("cols-bad", "a,b\n1,x\n");
        assert!(two_columns(&p, "a", "b").is_err());
    }
}
