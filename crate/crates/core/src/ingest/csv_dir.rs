//! Per-table CSV loading. Dialect: comma separator, `"` quoting with `""`
//! escapes, UTF-8, mandatory header. A fully empty unquoted cell is null;
//! `""` is the empty string.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{DataInstance, RelationalSchema, Row, Value};

/// Result of loading a directory: the instance plus warnings for tables
/// without a file.
#[derive(Debug, Clone, Default)]
pub struct LoadedData {
    pub instance: DataInstance,
    pub warnings: Vec<String>,
}

pub fn load_csv_dir(dir: &Path, schema: &RelationalSchema) -> Result<LoadedData> {
    let mut out = LoadedData::default();
    for t in &schema.tables {
        let path = dir.join(format!("{}.csv", t.name));
        if !path.is_file() {
            out.warnings
                .push(format!("no data file for table `{}`; treated as data-absent", t.name));
            continue;
        }
        let text = fs::read_to_string(&path).map_err(|e| Error::io(path.display(), e))?;
        let rows = parse_csv_table(&text, &t.name, &t.attr_names())?;
        out.instance.insert(t.name.clone(), rows);
    }
    Ok(out)
}

/// Parses one table's CSV text and permutes its columns into `attrs` order.
pub fn parse_csv_table(text: &str, table: &str, attrs: &[String]) -> Result<Vec<Row>> {
    let mut records = parse_records(text).map_err(|(line, reason)| Error::SyntaxError {
        line,
        token: format!("{table}.csv: {reason}"),
    })?;
    if records.is_empty() {
        return Err(Error::HeaderMismatch {
            table: table.into(),
            missing: attrs.to_vec(),
            extra: Vec::new(),
        });
    }
    let header: Vec<String> = records
        .remove(0)
        .into_iter()
        .map(|c| c.unwrap_or_default().trim().to_string())
        .collect();
    let have: BTreeSet<&str> = header.iter().map(String::as_str).collect();
    let want: BTreeSet<&str> = attrs.iter().map(String::as_str).collect();
    if have != want || have.len() != header.len() {
        return Err(Error::HeaderMismatch {
            table: table.into(),
            missing: want.difference(&have).map(|s| s.to_string()).collect(),
            extra: header
                .iter()
                .filter(|h| !want.contains(h.as_str()))
                .cloned()
                .collect(),
        });
    }
    let perm: Vec<usize> = attrs
        .iter()
        .map(|a| header.iter().position(|h| h == a).expect("header checked"))
        .collect();
    records
        .into_iter()
        .enumerate()
        .map(|(i, rec)| {
            if rec.len() != header.len() {
                return Err(Error::SyntaxError {
                    line: i + 2,
                    token: format!("{table}.csv: expected {} cells, found {}", header.len(), rec.len()),
                });
            }
            Ok(perm.iter().map(|&j| rec[j].clone()).collect())
        })
        .collect()
}

/// Splits CSV text into records of cells; `None` marks an empty unquoted
/// cell. Blank lines are skipped.
fn parse_records(text: &str) -> std::result::Result<Vec<Vec<Value>>, (usize, String)> {
    let mut records = Vec::new();
    let mut record: Vec<Value> = Vec::new();
    let mut cell = String::new();
    let mut quoted = false;
    let mut in_quotes = false;
    let mut line = 1;
    let mut chars = text.trim_start_matches('\u{feff}').chars().peekable();
    let mut line_has_content = false;

    let finish_cell = |record: &mut Vec<Value>, cell: &mut String, quoted: &mut bool| {
        let v = if cell.is_empty() && !*quoted {
            None
        } else {
            Some(std::mem::take(cell))
        };
        record.push(v);
        *quoted = false;
    };

    while let Some(c) = chars.next() {
        if in_quotes {
            match c {
                '"' if chars.peek() == Some(&'"') => {
                    chars.next();
                    cell.push('"');
                }
                '"' => in_quotes = false,
                '\n' => {
                    line += 1;
                    cell.push(c);
                }
                _ => cell.push(c),
            }
            continue;
        }
        match c {
            '"' => {
                if !cell.is_empty() || quoted {
                    return Err((line, "quote inside unquoted cell".into()));
                }
                quoted = true;
                in_quotes = true;
                line_has_content = true;
            }
            ',' => {
                finish_cell(&mut record, &mut cell, &mut quoted);
                line_has_content = true;
            }
            '\r' if chars.peek() == Some(&'\n') => {}
            '\n' => {
                if line_has_content {
                    finish_cell(&mut record, &mut cell, &mut quoted);
                    records.push(std::mem::take(&mut record));
                }
                line_has_content = false;
                line += 1;
            }
            _ => {
                if quoted {
                    return Err((line, "text after closing quote".into()));
                }
                cell.push(c);
                line_has_content = true;
            }
        }
    }
    if in_quotes {
        return Err((line, "unterminated quoted cell".into()));
    }
    if line_has_content {
        finish_cell(&mut record, &mut cell, &mut quoted);
        records.push(record);
    }
    Ok(records)
}
