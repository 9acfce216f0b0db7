//! Whitespace-separated data tables with `#` comments and `#! key = value`
//! directives.

use crate::error::{Error, Result};

pub(crate) struct RawTable {
    pub source_name: String,
    pub directives: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<RawRow>,
}

pub(crate) struct RawRow {
    pub line: usize,
    pub cells: Vec<String>,
}

impl RawTable {
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut directives = Vec::new();
        let mut header: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if let Some(rest) = trimmed.strip_prefix("#!") {
                let (key, value) = rest.split_once('=').ok_or_else(|| Error::Parse {
                    source_name: source_name.to_owned(),
                    line,
                    field: "directive".into(),
                    message: "expected `#! key = value`".into(),
                })?;
                directives.push((key.trim().to_owned(), value.trim().to_owned()));
                continue;
            }
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let cells: Vec<String> = trimmed.split_whitespace().map(str::to_owned).collect();
            match &header {
                None => header = Some(cells),
                Some(h) => {
                    if cells.len() != h.len() {
                        return Err(Error::Parse {
                            source_name: source_name.to_owned(),
                            line,
                            field: h.get(cells.len().min(h.len().saturating_sub(1))).cloned().unwrap_or_default(),
                            message: format!("expected {} columns, found {}", h.len(), cells.len()),
                        });
                    }
                    rows.push(RawRow { line, cells });
                }
            }
        }
        let header = header.ok_or_else(|| Error::Parse {
            source_name: source_name.to_owned(),
            line: text.lines().count().max(1),
            field: "header".into(),
            message: "no header row".into(),
        })?;
        Ok(RawTable { source_name: source_name.to_owned(), directives, header, rows })
    }

    pub fn directive(&self, key: &str) -> Option<&str> {
        self.directives.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn require_column(&self, name: &str) -> Result<usize> {
        self.column(name).ok_or_else(|| Error::Parse {
            source_name: self.source_name.clone(),
            line: 1,
            field: name.to_owned(),
            message: "column missing from header".into(),
        })
    }

    fn error(&self, row: &RawRow, col: usize, message: String) -> Error {
        Error::Parse {
            source_name: self.source_name.clone(),
            line: row.line,
            field: self.header[col].clone(),
            message,
        }
    }

    /// A number, or `None` for the `na` marker.
    pub fn optional_f64(&self, row: &RawRow, col: usize) -> Result<Option<f64>> {
        let cell = &row.cells[col];
        if cell.eq_ignore_ascii_case("na") {
            return Ok(None);
        }
        let value: f64 = cell
            .parse()
            .map_err(|_| self.error(row, col, format!("`{cell}` is not a number")))?;
        if !value.is_finite() {
            return Err(self.error(row, col, format!("`{cell}` is not finite")));
        }
        Ok(Some(value))
    }

    pub fn f64(&self, row: &RawRow, col: usize) -> Result<f64> {
        self.optional_f64(row, col)?
            .ok_or_else(|| self.error(row, col, "value required".into()))
    }

    pub fn u32(&self, row: &RawRow, col: usize) -> Result<u32> {
        let cell = &row.cells[col];
        cell.parse()
            .map_err(|_| self.error(row, col, format!("`{cell}` is not a non-negative integer")))
    }
}

/// Shortest representation that parses back to the same bits.
pub(crate) fn format_value(value: Option<f64>) -> String {
    match value {
        None => "na".to_owned(),
        Some(x) => format!("{x:e}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directives_header_and_rows() {
        let text = "# comment\n#! provenance = test 1\na b\n1 2\n\n3 na\n";
        let t = RawTable::parse(text, "mem").unwrap();
        assert_eq!(t.directive("provenance"), Some("test 1"));
        assert_eq!(t.header, vec!["a", "b"]);
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.optional_f64(&t.rows[1], 1).unwrap(), None);
        assert_eq!(t.f64(&t.rows[0], 1).unwrap(), 2.0);
    }

    #[test]
    fn errors_name_line_and_field() {
        let t = RawTable::parse("a b\n1 x\n", "mem").unwrap();
        match t.f64(&t.rows[0], 1) {
            Err(Error::Parse { line, field, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(field, "b");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(RawTable::parse("a b\n1\n", "mem"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn exponent_format_round_trips() {
        for x in [0.1, -0.3836419, 42.1635e6, 1e-300, f64::MIN_POSITIVE, 3.0] {
            let s = format_value(Some(x));
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }
}
