//! Comment-headed CSV shared by every tabular format.
//!
//! ```text
//! # toolkit: vsi-tools 0.1.0
//! # config_sha256: 3f2a…
//! # seed: 7
//! freq_mhz,contrast
//! 20.0,0.00012
//! ```
//!
//! Numbers are written with the shortest representation that parses back to
//! the same `f64`, so write → read → write is byte-identical.

use std::fmt::Display;

use super::{FormatError, Provenance};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Header {
    pub entries: Vec<(String, String)>,
}

impl Header {
    pub fn new(prov: &Provenance) -> Self {
        Self {
            entries: vec![
                ("toolkit".into(), prov.toolkit.clone()),
                ("config_sha256".into(), prov.config_sha256.clone()),
                ("seed".into(), prov.seed.to_string()),
            ],
        }
    }

    pub fn with(mut self, key: &str, value: impl Display) -> Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Provenance fields, when all three are present.
    pub fn provenance(&self) -> Option<Provenance> {
        Some(Provenance {
            toolkit: self.get("toolkit")?.to_string(),
            config_sha256: self.get("config_sha256")?.to_string(),
            seed: self.get("seed")?.parse().ok()?,
        })
    }

    fn write(&self, out: &mut String) {
        for (k, v) in &self.entries {
            out.push_str("# ");
            out.push_str(k);
            out.push_str(": ");
            out.push_str(v);
            out.push('\n');
        }
    }
}

/// Shortest round-trip text for `v`.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Free text made safe for a CSV cell.
pub fn cell(text: &str) -> String {
    text.replace([',', '\n', '\r'], ";")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    /// 1-based line number in the source text.
    pub line: usize,
    pub fields: Vec<String>,
}

impl Row {
    pub fn f64(&self, col: usize, name: &str) -> Result<f64, FormatError> {
        parse_f64(&self.fields[col], self.line, name)
    }

    pub fn opt_f64(&self, col: usize, name: &str) -> Result<Option<f64>, FormatError> {
        if self.fields[col].trim().is_empty() {
            Ok(None)
        } else {
            self.f64(col, name).map(Some)
        }
    }

    pub fn str(&self, col: usize) -> &str {
        self.fields[col].trim()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Header,
    pub rows: Vec<Row>,
}

pub fn parse_f64(text: &str, line: usize, column: &str) -> Result<f64, FormatError> {
    text.trim().parse().map_err(|_| FormatError::Parse {
        line,
        message: format!("column `{column}`: `{}` is not a number", text.trim()),
    })
}

/// Reads a table whose column line must equal `columns`.
pub fn read_table(text: &str, columns: &[&str]) -> Result<Table, FormatError> {
    let mut header = Header::default();
    let mut seen_columns = false;
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim_end_matches('\r');
        if l.trim().is_empty() {
            continue;
        }
        if let Some(c) = l.strip_prefix('#') {
            if !seen_columns {
                let c = c.strip_prefix(' ').unwrap_or(c);
                match c.split_once(": ") {
                    Some((k, v)) => header.entries.push((k.to_string(), v.to_string())),
                    None => header.entries.push((c.trim_end_matches(':').to_string(), String::new())),
                }
            }
            continue;
        }
        if !seen_columns {
            let got: Vec<&str> = l.split(',').map(str::trim).collect();
            if got != columns {
                return Err(FormatError::Parse {
                    line,
                    message: format!("expected column header `{}`, found `{l}`", columns.join(",")),
                });
            }
            seen_columns = true;
            continue;
        }
        let fields: Vec<String> = l.split(',').map(str::to_string).collect();
        if fields.len() != columns.len() {
            return Err(FormatError::Parse {
                line,
                message: format!("expected {} fields, found {}", columns.len(), fields.len()),
            });
        }
        rows.push(Row { line, fields });
    }
    if !seen_columns {
        return Err(FormatError::Parse {
            line: text.lines().count().max(1),
            message: format!("missing column header `{}`", columns.join(",")),
        });
    }
    Ok(Table { header, rows })
}

pub fn write_table<I>(header: &Header, columns: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut out = String::new();
    header.write(&mut out);
    out.push_str(&columns.join(","));
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shortest_repr_round_trips() {
        for v in [0.0, -0.0, 1.0, 0.1, 1e-300, 5e15, 2.0f64.sqrt(), f64::MAX, -3.25e-7] {
            let t = num(v);
            assert_eq!(t.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{t}");
        }
    }

    #[test]
    fn header_and_rows() {
        let text = "# toolkit: x\n# seed: 3\na,b\n1,2\n\n3,4\n";
        let t = read_table(text, &["a", "b"]).unwrap();
        assert_eq!(t.header.get("seed"), Some("3"));
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.rows[1].line, 6);
        assert_eq!(write_table(&t.header, &["a", "b"], t.rows.iter().map(|r| r.fields.clone())), "# toolkit: x\n# seed: 3\na,b\n1,2\n3,4\n");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = read_table("a,b\n1,2\n1\n", &["a", "b"]).unwrap_err();
        assert!(matches!(err, FormatError::Parse { line: 3, .. }));
        let err = read_table("a,c\n", &["a", "b"]).unwrap_err();
        assert!(matches!(err, FormatError::Parse { line: 1, .. }));
        let t = read_table("a,b\n1,x\n", &["a", "b"]).unwrap();
        assert!(matches!(t.rows[0].f64(1, "b"), Err(FormatError::Parse { line: 2, .. })));
    }
}
