//! Direct evaluation of source queries over a data instance. Used for view
//! materialization, profiling of cascaded views, and semantic checks.

use std::collections::BTreeSet;

use super::data::{DataInstance, Row, Value};
use super::query::{ColRef, Condition, ProjExpr, SourceQuery};
use super::schema::RelationalSchema;
use crate::error::{Error, Result};

/// Evaluated relation: qualified column names plus rows (bag semantics).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub columns: Vec<(Option<String>, String)>,
    pub rows: Vec<Row>,
}

impl Relation {
    pub fn column_names(&self) -> Vec<String> {
        self.columns.iter().map(|(_, n)| n.clone()).collect()
    }

    fn index_of(&self, col: &ColRef) -> Result<usize> {
        let hits: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .filter(|(_, (rel, name))| {
                name == &col.name
                    && match (&col.relation, rel) {
                        (Some(q), Some(r)) => q == r,
                        (Some(_), None) => false,
                        (None, _) => true,
                    }
            })
            .map(|(i, _)| i)
            .collect();
        match hits.as_slice() {
            [i] => Ok(*i),
            [] => Err(Error::MalformedQuery(format!("unknown column `{col}`"))),
            _ => Err(Error::MalformedQuery(format!("ambiguous column `{col}`"))),
        }
    }

    /// Rows as a set of name-keyed tuples, independent of column order.
    pub fn as_set(&self) -> BTreeSet<Vec<(String, Value)>> {
        self.rows
            .iter()
            .map(|r| {
                let mut t: Vec<(String, Value)> = self
                    .columns
                    .iter()
                    .zip(r)
                    .map(|((_, n), v)| (n.clone(), v.clone()))
                    .collect();
                t.sort();
                t
            })
            .collect()
    }

    /// Values of the named columns for every row.
    pub fn project_names(&self, names: &[String]) -> Result<Vec<Row>> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| self.index_of(&ColRef::bare(n.clone())))
            .collect::<Result<_>>()?;
        Ok(self
            .rows
            .iter()
            .map(|r| idx.iter().map(|&i| r[i].clone()).collect())
            .collect())
    }
}

/// Evaluates `q`. Tables without data evaluate to empty relations; views are
/// expanded recursively from their definitions.
pub fn evaluate(q: &SourceQuery, schema: &RelationalSchema, data: &DataInstance) -> Result<Relation> {
    eval_depth(q, schema, data, 0)
}

fn eval_depth(
    q: &SourceQuery,
    schema: &RelationalSchema,
    data: &DataInstance,
    depth: usize,
) -> Result<Relation> {
    if depth > 64 {
        return Err(Error::MalformedQuery("view nesting too deep".into()));
    }
    match q {
        SourceQuery::Opaque(s) => Err(Error::MalformedQuery(format!("cannot evaluate opaque source {s}"))),
        SourceQuery::Base(name) => {
            if let Some(t) = schema.table(name) {
                Ok(Relation {
                    columns: t
                        .attributes
                        .iter()
                        .map(|a| (Some(name.clone()), a.name.clone()))
                        .collect(),
                    rows: data.rows(name).map(<[Row]>::to_vec).unwrap_or_default(),
                })
            } else if let Some(v) = schema.view(name) {
                let inner = eval_depth(&v.expr, schema, data, depth + 1)?;
                let mut rows = inner.project_names(&v.columns)?;
                dedup(&mut rows);
                Ok(Relation {
                    columns: v
                        .columns
                        .iter()
                        .map(|c| (Some(name.clone()), c.clone()))
                        .collect(),
                    rows,
                })
            } else {
                Err(Error::MalformedQuery(format!("unknown relation `{name}`")))
            }
        }
        SourceQuery::Select { conditions, input } => {
            let rel = eval_depth(input, schema, data, depth)?;
            let checks: Vec<(usize, Check)> = conditions
                .iter()
                .map(|c| match c {
                    Condition::ColEq(a, b) => Ok((rel.index_of(a)?, Check::Col(rel.index_of(b)?))),
                    Condition::ColConst(a, v) => Ok((rel.index_of(a)?, Check::Const(v.clone()))),
                })
                .collect::<Result<_>>()?;
            let rows = rel
                .rows
                .iter()
                .filter(|r| checks.iter().all(|(i, c)| c.holds(r, *i)))
                .cloned()
                .collect();
            Ok(Relation {
                columns: rel.columns,
                rows,
            })
        }
        SourceQuery::Join { left, right, on } => {
            let l = eval_depth(left, schema, data, depth)?;
            let r = eval_depth(right, schema, data, depth)?;
            let mut columns = l.columns.clone();
            columns.extend(r.columns.iter().cloned());
            let joined = Relation {
                columns,
                rows: Vec::new(),
            };
            let pairs: Vec<(usize, usize)> = on
                .iter()
                .map(|(a, b)| Ok((joined.index_of(a)?, joined.index_of(b)?)))
                .collect::<Result<_>>()?;
            let mut rows = Vec::new();
            for lr in &l.rows {
                for rr in &r.rows {
                    let mut row = lr.clone();
                    row.extend(rr.iter().cloned());
                    if pairs
                        .iter()
                        .all(|&(i, j)| row[i].is_some() && row[i] == row[j])
                    {
                        rows.push(row);
                    }
                }
            }
            Ok(Relation {
                columns: joined.columns,
                rows,
            })
        }
        SourceQuery::Project { items, input } => {
            let rel = eval_depth(input, schema, data, depth)?;
            let mut columns = Vec::new();
            let mut pickers: Vec<Pick> = Vec::new();
            for item in items {
                match &item.expr {
                    ProjExpr::Column(c) => {
                        let i = rel.index_of(c)?;
                        columns.push((rel.columns[i].0.clone(), item.alias.clone()));
                        pickers.push(Pick::Index(i));
                    }
                    ProjExpr::Const(v) => {
                        columns.push((None, item.alias.clone()));
                        pickers.push(Pick::Const(v.clone()));
                    }
                    ProjExpr::AllOf(r) => {
                        for (i, c) in rel.columns.iter().enumerate() {
                            if c.0.as_deref() == Some(r.as_str()) {
                                columns.push(c.clone());
                                pickers.push(Pick::Index(i));
                            }
                        }
                    }
                }
            }
            let rows = rel
                .rows
                .iter()
                .map(|r| {
                    pickers
                        .iter()
                        .map(|p| match p {
                            Pick::Index(i) => r[*i].clone(),
                            Pick::Const(v) => Some(v.clone()),
                        })
                        .collect()
                })
                .collect();
            Ok(Relation { columns, rows })
        }
    }
}

enum Check {
    Col(usize),
    Const(String),
}

impl Check {
    fn holds(&self, row: &Row, i: usize) -> bool {
        match (self, &row[i]) {
            (_, None) => false,
            (Check::Col(j), Some(v)) => row[*j].as_deref() == Some(v.as_str()),
            (Check::Const(c), Some(v)) => v == c,
        }
    }
}

enum Pick {
    Index(usize),
    Const(String),
}

pub(crate) fn dedup(rows: &mut Vec<Row>) {
    let mut seen = BTreeSet::new();
    rows.retain(|r| seen.insert(r.clone()));
}
