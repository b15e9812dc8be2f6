//! SELECT subset used in mapping sources:
//!
//! ```text
//! SELECT [DISTINCT] item, … FROM rel [[AS] a] {, rel | [INNER] JOIN rel ON cond {AND cond}}
//!   [WHERE cond {AND cond}] [;]
//! item := * | rel.* | col [[AS] alias] | 'const' [AS] alias
//! cond := operand = operand,  operand := col | 'const' | number
//! ```
//!
//! Anything else is reported as unsupported and kept as an opaque source.

use std::collections::BTreeMap;

use super::lexer::{tokenize, Cursor, Tok, Token};
use crate::error::{Error, Result};
use crate::model::{ColRef, Condition, ProjExpr, ProjItem, RelationalSchema, SourceQuery};

enum Operand {
    Col(ColRef),
    Const(String),
}

struct Parser<'a> {
    cur: Cursor<'a>,
    /// Table alias → relation name.
    aliases: BTreeMap<String, String>,
}

/// Parses `sql`; `Err` carries the reason it falls outside the subset.
pub fn parse_select(sql: &str) -> std::result::Result<SourceQuery, String> {
    let toks = tokenize(sql).map_err(|e| e.to_string())?;
    let mut p = Parser {
        cur: Cursor::new(&toks),
        aliases: BTreeMap::new(),
    };
    p.query().map_err(|e| e.to_string())
}

/// Parses `sql`, degrading to an opaque source outside the subset.
pub fn parse_source(sql: &str) -> SourceQuery {
    parse_select(sql).unwrap_or_else(|_| SourceQuery::Opaque(sql.trim().to_string()))
}

impl Parser<'_> {
    fn query(&mut self) -> Result<SourceQuery> {
        self.cur.expect_kw("SELECT")?;
        self.cur.eat_kw("DISTINCT");
        let raw_items = self.items()?;
        self.cur.expect_kw("FROM")?;
        let mut tree = self.table_ref()?;
        loop {
            if self.cur.eat_sym(',') {
                let right = self.table_ref()?;
                tree = tree.join(right, Vec::new());
            } else if self.cur.peek().is_some_and(|t| t.is_kw("JOIN") || t.is_kw("INNER")) {
                self.cur.eat_kw("INNER");
                self.cur.expect_kw("JOIN")?;
                let right = self.table_ref()?;
                self.cur.expect_kw("ON")?;
                let conds = self.conditions()?;
                let mut on = Vec::new();
                let mut rest = Vec::new();
                for c in conds {
                    match c {
                        Condition::ColEq(a, b) => on.push((a, b)),
                        other => rest.push(other),
                    }
                }
                tree = tree.join(right, on);
                if !rest.is_empty() {
                    tree = tree.select(rest);
                }
            } else {
                break;
            }
        }
        if self.cur.eat_kw("WHERE") {
            let conds = self.conditions()?;
            tree = tree.select(conds);
        }
        self.cur.eat_sym(';');
        if !self.cur.at_end() {
            return Err(self.cur.error());
        }
        Ok(match self.resolve_items(raw_items) {
            Some(items) => tree.project(items),
            None => tree,
        })
    }

    /// `None` for a bare `*`.
    fn items(&mut self) -> Result<Option<Vec<ProjItem>>> {
        if self.cur.eat_sym('*') {
            return Ok(None);
        }
        let mut items = vec![self.item()?];
        while self.cur.eat_sym(',') {
            items.push(self.item()?);
        }
        Ok(Some(items))
    }

    fn item(&mut self) -> Result<ProjItem> {
        let expr = match self.cur.peek().map(|t| &t.tok) {
            Some(Tok::Str(s)) | Some(Tok::Num(s)) => {
                let s = s.clone();
                self.cur.advance();
                ProjExpr::Const(s)
            }
            Some(Tok::Ident { .. }) => {
                let first = self.cur.ident()?;
                if self.cur.eat_sym('.') {
                    if self.cur.eat_sym('*') {
                        ProjExpr::AllOf(first)
                    } else {
                        ProjExpr::Column(ColRef::qualified(first, self.cur.ident()?))
                    }
                } else {
                    ProjExpr::Column(ColRef::bare(first))
                }
            }
            _ => return Err(self.cur.error()),
        };
        let bare_alias = |t: &Token| matches!(t.tok, Tok::Ident { .. }) && !t.is_kw("FROM");
        let alias = if self.cur.eat_kw("AS") || self.cur.peek().is_some_and(bare_alias) {
            Some(self.cur.ident()?)
        } else {
            None
        };
        Ok(match (expr, alias) {
            (ProjExpr::Column(c), None) => ProjItem::column(c),
            (ProjExpr::Column(c), Some(a)) => ProjItem::aliased(c, a),
            (ProjExpr::Const(v), Some(a)) => ProjItem::constant(v, a),
            (ProjExpr::Const(_), None) => return Err(self.cur.error()),
            (ProjExpr::AllOf(r), None) => ProjItem {
                expr: ProjExpr::AllOf(r),
                alias: String::new(),
            },
            (ProjExpr::AllOf(_), Some(_)) => return Err(self.cur.error()),
        })
    }

    fn table_ref(&mut self) -> Result<SourceQuery> {
        if self.cur.peek().is_some_and(|t| t.is_sym('(')) {
            return Err(self.cur.error());
        }
        let mut name = self.cur.ident()?;
        while self.cur.eat_sym('.') {
            name = self.cur.ident()?;
        }
        let bare_alias = |t: &Token| {
            matches!(t.tok, Tok::Ident { .. })
                && !["WHERE", "JOIN", "INNER", "ON", "LEFT", "RIGHT", "FULL", "CROSS", "NATURAL", "OUTER", "GROUP", "ORDER", "UNION", "LIMIT"]
                    .iter()
                    .any(|k| t.is_kw(k))
        };
        let alias = if self.cur.eat_kw("AS") || self.cur.peek().is_some_and(bare_alias) {
            Some(self.cur.ident()?)
        } else {
            None
        };
        if let Some(a) = alias {
            if self.aliases.insert(a, name.clone()).is_some() {
                return Err(self.cur.error());
            }
        }
        Ok(SourceQuery::Base(name))
    }

    fn conditions(&mut self) -> Result<Vec<Condition>> {
        let mut out = vec![self.condition()?];
        while self.cur.eat_kw("AND") {
            out.push(self.condition()?);
        }
        Ok(out)
    }

    fn condition(&mut self) -> Result<Condition> {
        let a = self.operand()?;
        self.cur.expect_sym('=')?;
        let b = self.operand()?;
        Ok(match (a, b) {
            (Operand::Col(x), Operand::Col(y)) => Condition::ColEq(self.unalias(x), self.unalias(y)),
            (Operand::Col(x), Operand::Const(v)) | (Operand::Const(v), Operand::Col(x)) => {
                Condition::ColConst(self.unalias(x), v)
            }
            (Operand::Const(_), Operand::Const(_)) => return Err(self.cur.error()),
        })
    }

    fn operand(&mut self) -> Result<Operand> {
        match self.cur.peek().map(|t| &t.tok) {
            Some(Tok::Str(s)) | Some(Tok::Num(s)) => {
                let s = s.clone();
                self.cur.advance();
                Ok(Operand::Const(s))
            }
            Some(Tok::Ident { .. }) => {
                let first = self.cur.ident()?;
                if self.cur.eat_sym('.') {
                    Ok(Operand::Col(ColRef::qualified(first, self.cur.ident()?)))
                } else {
                    Ok(Operand::Col(ColRef::bare(first)))
                }
            }
            _ => Err(self.cur.error()),
        }
    }

    fn unalias(&self, c: ColRef) -> ColRef {
        match &c.relation {
            Some(r) => match self.aliases.get(r) {
                Some(t) => ColRef::qualified(t.clone(), c.name),
                None => c,
            },
            None => c,
        }
    }

    fn resolve_items(&self, items: Option<Vec<ProjItem>>) -> Option<Vec<ProjItem>> {
        items.map(|v| {
            v.into_iter()
                .map(|i| match i.expr {
                    ProjExpr::Column(c) => ProjItem {
                        expr: ProjExpr::Column(self.unalias(c)),
                        alias: i.alias,
                    },
                    ProjExpr::AllOf(r) => ProjItem {
                        expr: ProjExpr::AllOf(self.aliases.get(&r).cloned().unwrap_or(r)),
                        alias: i.alias,
                    },
                    e => ProjItem { expr: e, alias: i.alias },
                })
                .collect()
        })
    }
}

/// Qualifies bare column references of multi-relation queries using the
/// schema. `Err` names the first relation the schema lacks.
pub fn qualify_columns(q: &SourceQuery, schema: &RelationalSchema) -> std::result::Result<SourceQuery, String> {
    let rels = q.relations();
    if let Some(r) = rels.iter().find(|r| !schema.has_relation(r)) {
        return Err(r.clone());
    }
    if rels.len() < 2 {
        return Ok(q.clone());
    }
    let cols: Vec<(String, Vec<String>)> = rels
        .iter()
        .map(|r| (r.clone(), schema.columns_of(r).unwrap_or_default()))
        .collect();
    Ok(q.map_columns(&|c: &ColRef| {
        if c.relation.is_some() {
            return c.clone();
        }
        let owners: Vec<&String> = cols
            .iter()
            .filter(|(_, cs)| cs.contains(&c.name))
            .map(|(r, _)| r)
            .collect();
        match owners.as_slice() {
            [only] => ColRef::qualified((*only).clone(), c.name.clone()),
            _ => c.clone(),
        }
    }))
}

fn q(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

fn lit(s: &str) -> String {
    format!("'{}'", s.replace('\'', "''"))
}

fn col(c: &ColRef) -> String {
    match &c.relation {
        Some(r) => format!("{}.{}", q(r), q(&c.name)),
        None => q(&c.name),
    }
}

/// Renders `query` as SQL in the supported subset. Queries already shaped as
/// projection over selection over joins keep their column order; others are
/// rendered from their normal form. Join conditions stay in `JOIN … ON`, so
/// the text parses back to the same tree.
pub fn render_sql(query: &SourceQuery) -> Result<String> {
    if let SourceQuery::Opaque(s) = query {
        return Ok(s.clone());
    }
    let norm = crate::model::normalize_query(query)?;
    let shaped = if is_flat_shape(query) { query } else { &norm };
    let (items, rest) = match shaped {
        SourceQuery::Project { items, input } => (Some(items.as_slice()), input.as_ref()),
        other => (None, other),
    };
    let mut conds: Vec<String> = Vec::new();
    let rest = match rest {
        SourceQuery::Select { conditions, input } => {
            for c in conditions {
                conds.push(cond_sql(c));
            }
            input.as_ref()
        }
        other => other,
    };
    let from = from_sql(rest)?;
    let select = match items {
        None => "*".to_string(),
        Some(items) => items
            .iter()
            .map(|i| match &i.expr {
                ProjExpr::Column(c) if c.name == i.alias => col(c),
                ProjExpr::Column(c) => format!("{} AS {}", col(c), q(&i.alias)),
                ProjExpr::Const(v) => format!("{} AS {}", lit(v), q(&i.alias)),
                ProjExpr::AllOf(r) => format!("{}.*", q(r)),
            })
            .collect::<Vec<_>>()
            .join(", "),
    };
    let mut sql = format!("SELECT {select} FROM {from}");
    if !conds.is_empty() {
        sql.push_str(" WHERE ");
        sql.push_str(&conds.join(" AND "));
    }
    Ok(sql)
}

fn is_flat_shape(q: &SourceQuery) -> bool {
    fn joins(q: &SourceQuery) -> bool {
        match q {
            SourceQuery::Base(_) => true,
            SourceQuery::Join { left, right, .. } => joins(left) && matches!(**right, SourceQuery::Base(_)),
            _ => false,
        }
    }
    let q = match q {
        SourceQuery::Project { input, .. } => input.as_ref(),
        other => other,
    };
    let q = match q {
        SourceQuery::Select { input, .. } => input.as_ref(),
        other => other,
    };
    joins(q)
}

fn cond_sql(c: &Condition) -> String {
    match c {
        Condition::ColEq(a, b) => format!("{} = {}", col(a), col(b)),
        Condition::ColConst(a, v) => format!("{} = {}", col(a), lit(v)),
    }
}

/// Left-deep joins of base relations: `a, b` without conditions,
/// `a JOIN b ON …` with.
fn from_sql(query: &SourceQuery) -> Result<String> {
    match query {
        SourceQuery::Base(n) => Ok(q(n)),
        SourceQuery::Join { left, right, on } => {
            let (l, r) = (from_sql(left)?, from_sql(right)?);
            if on.is_empty() {
                return Ok(format!("{l}, {r}"));
            }
            let on: Vec<String> = on.iter().map(|(a, b)| format!("{} = {}", col(a), col(b))).collect();
            Ok(format!("{l} JOIN {r} ON {}", on.join(" AND ")))
        }
        other => Err(Error::MalformedQuery(format!("unexpected operator in normal form: {other}"))),
    }
}
