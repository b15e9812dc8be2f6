//! `CREATE TABLE` subset: column definitions with `NOT NULL`, `NULL`,
//! `PRIMARY KEY`, `UNIQUE`, `DEFAULT <literal>` and inline `REFERENCES`;
//! table constraints `PRIMARY KEY (..)`, `UNIQUE (..)` and
//! `FOREIGN KEY (..) REFERENCES t [(..)]`, optionally named with
//! `CONSTRAINT name`.

use super::lexer::{tokenize, Cursor, Tok};
use crate::error::{Error, Result};
use crate::model::{Attribute, AttributeSet, ForeignKey, RelationalSchema, Table};

/// A reference whose target list may be implicit (the target's PK).
struct PendingFk {
    table: String,
    source: Vec<String>,
    target_table: String,
    target: Option<Vec<String>>,
}

pub fn parse_ddl(text: &str) -> Result<RelationalSchema> {
    let toks = tokenize(text)?;
    let mut cur = Cursor::new(&toks);
    let mut schema = RelationalSchema::new("schema");
    let mut pending = Vec::new();
    while !cur.at_end() {
        if cur.eat_sym(';') {
            continue;
        }
        let (table, fks) = parse_create(&mut cur)?;
        if schema.table(&table.name).is_some() {
            return Err(Error::InvalidSchema(format!("duplicate table `{}`", table.name)));
        }
        schema.tables.push(table);
        pending.extend(fks);
    }
    for fk in pending {
        let target = match fk.target {
            Some(t) => t,
            None => schema
                .table(&fk.target_table)
                .and_then(|t| t.primary_key.clone())
                .map(|pk| pk.0)
                .ok_or_else(|| {
                    Error::DanglingReference(format!(
                        "{}({}) references `{}` which has no primary key",
                        fk.table,
                        fk.source.join(", "),
                        fk.target_table
                    ))
                })?,
        };
        let t = schema.table_mut(&fk.table).expect("table was just parsed");
        t.foreign_keys.push(ForeignKey::new(
            AttributeSet(fk.source),
            fk.target_table,
            AttributeSet(target),
        ));
    }
    schema.validate()?;
    Ok(schema)
}

fn parse_create(cur: &mut Cursor<'_>) -> Result<(Table, Vec<PendingFk>)> {
    cur.expect_kw("CREATE")?;
    cur.expect_kw("TABLE")?;
    if cur.eat_kw("IF") {
        cur.expect_kw("NOT")?;
        cur.expect_kw("EXISTS")?;
    }
    let mut name = cur.ident()?;
    // schema-qualified names keep only the table part
    while cur.eat_sym('.') {
        name = cur.ident()?;
    }
    let mut table = Table::new(name.clone());
    let mut fks = Vec::new();
    let mut pk_cols: Vec<String> = Vec::new();
    cur.expect_sym('(')?;
    loop {
        if cur.eat_kw("CONSTRAINT") {
            cur.ident()?;
        }
        if cur.eat_kw("PRIMARY") {
            cur.expect_kw("KEY")?;
            if table.primary_key.is_some() {
                return Err(cur.error());
            }
            table.primary_key = Some(AttributeSet(cur.ident_list()?));
        } else if cur.eat_kw("UNIQUE") {
            cur.eat_kw("KEY");
            table.unique_keys.push(AttributeSet(cur.ident_list()?));
        } else if cur.eat_kw("FOREIGN") {
            cur.expect_kw("KEY")?;
            let source = cur.ident_list()?;
            let (target_table, target) = parse_references(cur)?;
            fks.push(PendingFk {
                table: name.clone(),
                source,
                target_table,
                target,
            });
        } else {
            let col = cur.ident()?;
            let mut nullable = true;
            skip_type(cur)?;
            loop {
                if cur.eat_kw("NOT") {
                    cur.expect_kw("NULL")?;
                    nullable = false;
                } else if cur.eat_kw("NULL") {
                } else if cur.eat_kw("PRIMARY") {
                    cur.expect_kw("KEY")?;
                    pk_cols.push(col.clone());
                } else if cur.eat_kw("UNIQUE") {
                    table.unique_keys.push(AttributeSet::new([col.clone()]));
                } else if cur.eat_kw("DEFAULT") {
                    match cur.advance().map(|t| &t.tok) {
                        Some(Tok::Str(_) | Tok::Num(_) | Tok::Ident { .. }) => {}
                        _ => return Err(cur.error()),
                    }
                } else if cur.peek().is_some_and(|t| t.is_kw("REFERENCES")) {
                    let (target_table, target) = parse_references(cur)?;
                    fks.push(PendingFk {
                        table: name.clone(),
                        source: vec![col.clone()],
                        target_table,
                        target,
                    });
                } else {
                    break;
                }
            }
            table.attributes.push(Attribute::new(col, nullable));
        }
        if cur.eat_sym(',') {
            continue;
        }
        cur.expect_sym(')')?;
        break;
    }
    if !pk_cols.is_empty() {
        if table.primary_key.is_some() {
            return Err(Error::InvalidSchema(format!("table `{name}` declares two primary keys")));
        }
        table.primary_key = Some(AttributeSet(pk_cols));
    }
    if let Some(pk) = &table.primary_key {
        for a in table.attributes.iter_mut().filter(|a| pk.contains(&a.name)) {
            a.nullable = false;
        }
    }
    if !cur.eat_sym(';') && !cur.at_end() {
        return Err(cur.error());
    }
    Ok((table, fks))
}

fn parse_references(cur: &mut Cursor<'_>) -> Result<(String, Option<Vec<String>>)> {
    cur.expect_kw("REFERENCES")?;
    let mut t = cur.ident()?;
    while cur.eat_sym('.') {
        t = cur.ident()?;
    }
    let cols = if cur.peek().is_some_and(|t| t.is_sym('(')) {
        Some(cur.ident_list()?)
    } else {
        None
    };
    Ok((t, cols))
}

const CONSTRAINT_WORDS: [&str; 7] = ["NOT", "NULL", "PRIMARY", "UNIQUE", "DEFAULT", "REFERENCES", "CONSTRAINT"];

/// Skips a type name such as `VARCHAR(20)` or `DOUBLE PRECISION`.
fn skip_type(cur: &mut Cursor<'_>) -> Result<()> {
    while let Some(t) = cur.peek() {
        if CONSTRAINT_WORDS.iter().any(|w| t.is_kw(w)) {
            break;
        }
        match &t.tok {
            Tok::Ident { .. } => {
                cur.advance();
            }
            Tok::Sym('(') => {
                cur.advance();
                let mut depth = 1;
                while depth > 0 {
                    match cur.advance().map(|t| &t.tok) {
                        Some(Tok::Sym('(')) => depth += 1,
                        Some(Tok::Sym(')')) => depth -= 1,
                        Some(_) => {}
                        None => return Err(cur.error()),
                    }
                }
            }
            _ => break,
        }
    }
    Ok(())
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

fn quote_list(set: &AttributeSet) -> String {
    set.iter().map(|a| quote(a)).collect::<Vec<_>>().join(", ")
}

/// Emits DDL that parses back to the same tables. Inclusion dependencies and
/// views have no DDL form and are omitted.
pub fn emit_ddl(schema: &RelationalSchema) -> String {
    let mut out = String::new();
    for t in &schema.tables {
        out.push_str(&format!("CREATE TABLE {} (\n", quote(&t.name)));
        let mut lines: Vec<String> = t
            .attributes
            .iter()
            .map(|a| {
                let null = if a.nullable { "" } else { " NOT NULL" };
                format!("  {} TEXT{null}", quote(&a.name))
            })
            .collect();
        if let Some(pk) = &t.primary_key {
            lines.push(format!("  PRIMARY KEY ({})", quote_list(pk)));
        }
        for u in &t.unique_keys {
            lines.push(format!("  UNIQUE ({})", quote_list(u)));
        }
        for fk in &t.foreign_keys {
            lines.push(format!(
                "  FOREIGN KEY ({}) REFERENCES {} ({})",
                quote_list(&fk.source),
                quote(&fk.target_table),
                quote_list(&fk.target)
            ));
        }
        out.push_str(&lines.join(",\n"));
        out.push_str("\n);\n");
    }
    out
}
