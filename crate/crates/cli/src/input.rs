//! Two-column `level,value` CSV ingestion.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use ordshrink_core::Layout;

use crate::CliError;

/// Parses `level,value` rows. A first line reading exactly `level,value` is
/// taken as a header; blank lines are ignored.
pub fn read_layout<R: Read>(reader: R) -> Result<Layout, CliError> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows = Vec::new();
    for (index, record) in csv.records().enumerate() {
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Malformed(e.to_string()),
        })?;
        let line = record.position().map_or(index as u64 + 1, |p| p.line());
        if index == 0 && record.len() == 2 && &record[0] == "level" && &record[1] == "value" {
            continue;
        }
        if record.len() != 2 {
            return Err(CliError::Malformed(format!(
                "line {line}: expected 2 fields, found {}",
                record.len()
            )));
        }
        let parse = |field: &str, name: &str| {
            field.parse::<f64>().map_err(|_| {
                CliError::Malformed(format!("line {line}: {name} {field:?} is not a number"))
            })
        };
        rows.push((parse(&record[0], "level")?, parse(&record[1], "value")?));
    }
    Ok(Layout::from_rows(&rows)?)
}

pub fn read_layout_path(path: &Path) -> Result<Layout, CliError> {
    let file = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    read_layout(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_crlf() {
        let layout = read_layout("level,value\r\n1,2.5\r\n2,3\r\n1,3.5\r\n".as_bytes()).unwrap();
        assert_eq!(layout.levels(), &[1.0, 2.0]);
        assert_eq!(layout.groups()[0], vec![2.5, 3.5]);
    }

    #[test]
    fn headerless_with_blank_lines() {
        let layout = read_layout("0.5, 1\n\n1.5,2\n".as_bytes()).unwrap();
        assert_eq!(layout.p(), 2);
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(matches!(
            read_layout("1,2,3\n2,3\n".as_bytes()),
            Err(CliError::Malformed(_))
        ));
        assert!(matches!(
            read_layout("1,abc\n2,3\n".as_bytes()),
            Err(CliError::Malformed(_))
        ));
        assert!(matches!(
            read_layout("1,NaN\n2,3\n".as_bytes()),
            Err(CliError::Malformed(_))
        ));
        // A header anywhere but the first line is data, and not numeric.
        assert!(matches!(
            read_layout("1,2\nlevel,value\n".as_bytes()),
            Err(CliError::Malformed(_))
        ));
    }

    #[test]
    fn single_level_is_degenerate() {
        assert!(matches!(
            read_layout("1,1.0\n".as_bytes()),
            Err(CliError::Degenerate(_))
        ));
    }
}
