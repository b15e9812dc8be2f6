//! Conjunctive source queries in a restricted relational algebra and their
//! normal form.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column reference, optionally qualified by its relation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ColRef {
    pub relation: Option<String>,
    pub name: String,
}

impl ColRef {
    pub fn bare(name: impl Into<String>) -> Self {
        ColRef {
            relation: None,
            name: name.into(),
        }
    }

    pub fn qualified(relation: impl Into<String>, name: impl Into<String>) -> Self {
        ColRef {
            relation: Some(relation.into()),
            name: name.into(),
        }
    }

    fn unqualified(&self) -> ColRef {
        ColRef::bare(self.name.clone())
    }
}

impl fmt::Display for ColRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.relation {
            Some(r) => write!(f, "{r}.{}", self.name),
            None => write!(f, "{}", self.name),
        }
    }
}

/// Expression allowed in a projection list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProjExpr {
    Column(ColRef),
    Const(String),
    /// Every column of one relation (`"t".*`).
    AllOf(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProjItem {
    pub expr: ProjExpr,
    /// Output name. Ignored for [`ProjExpr::AllOf`].
    pub alias: String,
}

impl ProjItem {
    pub fn column(col: ColRef) -> Self {
        let alias = col.name.clone();
        ProjItem {
            expr: ProjExpr::Column(col),
            alias,
        }
    }

    pub fn aliased(col: ColRef, alias: impl Into<String>) -> Self {
        ProjItem {
            expr: ProjExpr::Column(col),
            alias: alias.into(),
        }
    }

    pub fn constant(value: impl Into<String>, alias: impl Into<String>) -> Self {
        ProjItem {
            expr: ProjExpr::Const(value.into()),
            alias: alias.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Condition {
    ColEq(ColRef, ColRef),
    ColConst(ColRef, String),
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::ColEq(a, b) => write!(f, "{a}={b}"),
            Condition::ColConst(a, c) => write!(f, "{a}='{c}'"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SourceQuery {
    Base(String),
    Project {
        items: Vec<ProjItem>,
        input: Box<SourceQuery>,
    },
    Select {
        conditions: Vec<Condition>,
        input: Box<SourceQuery>,
    },
    Join {
        left: Box<SourceQuery>,
        right: Box<SourceQuery>,
        on: Vec<(ColRef, ColRef)>,
    },
    /// SQL outside the supported subset, kept verbatim.
    Opaque(String),
}

impl SourceQuery {
    pub fn base(name: impl Into<String>) -> Self {
        SourceQuery::Base(name.into())
    }

    pub fn project(self, items: Vec<ProjItem>) -> Self {
        SourceQuery::Project {
            items,
            input: Box::new(self),
        }
    }

    pub fn select(self, conditions: Vec<Condition>) -> Self {
        SourceQuery::Select {
            conditions,
            input: Box::new(self),
        }
    }

    pub fn join(self, right: SourceQuery, on: Vec<(ColRef, ColRef)>) -> Self {
        SourceQuery::Join {
            left: Box::new(self),
            right: Box::new(right),
            on,
        }
    }

    pub fn is_opaque(&self) -> bool {
        matches!(self, SourceQuery::Opaque(_))
    }

    /// Base relations in left-to-right order.
    pub fn relations(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_relations(&mut out);
        out
    }

    fn collect_relations(&self, out: &mut Vec<String>) {
        match self {
            SourceQuery::Base(n) => out.push(n.clone()),
            SourceQuery::Project { input, .. } | SourceQuery::Select { input, .. } => {
                input.collect_relations(out)
            }
            SourceQuery::Join { left, right, .. } => {
                left.collect_relations(out);
                right.collect_relations(out);
            }
            SourceQuery::Opaque(_) => {}
        }
    }

    /// Outermost projection list, if any.
    pub fn projection(&self) -> Option<&[ProjItem]> {
        match self {
            SourceQuery::Project { items, .. } => Some(items),
            _ => None,
        }
    }

    /// Rewrites every column reference.
    pub fn map_columns(&self, f: &impl Fn(&ColRef) -> ColRef) -> SourceQuery {
        match self {
            SourceQuery::Base(n) => SourceQuery::Base(n.clone()),
            SourceQuery::Opaque(s) => SourceQuery::Opaque(s.clone()),
            SourceQuery::Project { items, input } => SourceQuery::Project {
                items: items
                    .iter()
                    .map(|i| ProjItem {
                        expr: match &i.expr {
                            ProjExpr::Column(c) => ProjExpr::Column(f(c)),
                            e => e.clone(),
                        },
                        alias: i.alias.clone(),
                    })
                    .collect(),
                input: Box::new(input.map_columns(f)),
            },
            SourceQuery::Select { conditions, input } => SourceQuery::Select {
                conditions: conditions
                    .iter()
                    .map(|c| match c {
                        Condition::ColEq(a, b) => Condition::ColEq(f(a), f(b)),
                        Condition::ColConst(a, v) => Condition::ColConst(f(a), v.clone()),
                    })
                    .collect(),
                input: Box::new(input.map_columns(f)),
            },
            SourceQuery::Join { left, right, on } => SourceQuery::Join {
                left: Box::new(left.map_columns(f)),
                right: Box::new(right.map_columns(f)),
                on: on.iter().map(|(a, b)| (f(a), f(b))).collect(),
            },
        }
    }
}

impl fmt::Display for SourceQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceQuery::Base(n) => write!(f, "{n}"),
            SourceQuery::Opaque(s) => write!(f, "OPAQUE[{s}]"),
            SourceQuery::Project { items, input } => {
                let list: Vec<String> = items
                    .iter()
                    .map(|i| match &i.expr {
                        ProjExpr::Column(c) if c.name == i.alias => c.to_string(),
                        ProjExpr::Column(c) => format!("{c}→{}", i.alias),
                        ProjExpr::Const(v) => format!("'{v}'→{}", i.alias),
                        ProjExpr::AllOf(r) => format!("{r}.*"),
                    })
                    .collect();
                write!(f, "π[{}]({input})", list.join(","))
            }
            SourceQuery::Select { conditions, input } => {
                let list: Vec<String> = conditions.iter().map(ToString::to_string).collect();
                write!(f, "σ[{}]({input})", list.join(" ∧ "))
            }
            SourceQuery::Join { left, right, on } => {
                let list: Vec<String> = on.iter().map(|(a, b)| format!("{a}={b}")).collect();
                write!(f, "({left} ⋈[{}] {right})", list.join(","))
            }
        }
    }
}

/// Resolved value of an output column.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Scalar {
    Column(ColRef),
    Const(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum OutItem {
    Named { alias: String, value: Scalar },
    AllOf(String),
}

/// Flattened conjunctive query: a set of relations, a set of equality
/// conjuncts, and an optional output list.
#[derive(Debug, Clone)]
struct Flat {
    relations: Vec<String>,
    conditions: BTreeSet<Condition>,
    output: Option<Vec<OutItem>>,
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedQuery(msg.into())
}

fn resolve(col: &ColRef, flat: &Flat) -> Result<Scalar> {
    let Some(out) = &flat.output else {
        return Ok(Scalar::Column(col.clone()));
    };
    if col.relation.is_none() {
        if let Some(OutItem::Named { value, .. }) = out
            .iter()
            .find(|o| matches!(o, OutItem::Named { alias, .. } if *alias == col.name))
        {
            return Ok(value.clone());
        }
    }
    let visible = out.iter().any(|o| match o {
        OutItem::AllOf(r) => col.relation.as_ref().is_none_or(|q| q == r),
        OutItem::Named { .. } => false,
    });
    let qualified_hit = col.relation.as_ref().is_some_and(|r| {
        out.iter().any(|o| {
            matches!(o, OutItem::Named { value: Scalar::Column(c), alias }
                if c.name == col.name && alias == &col.name
                    && c.relation.as_ref().is_none_or(|cr| cr == r))
        })
    });
    if visible || qualified_hit {
        Ok(Scalar::Column(col.clone()))
    } else {
        Err(malformed(format!("column `{col}` is not visible")))
    }
}

fn make_condition(a: Scalar, b: Scalar) -> Result<Option<Condition>> {
    Ok(match (a, b) {
        (Scalar::Column(x), Scalar::Column(y)) => {
            if x == y {
                None
            } else if x < y {
                Some(Condition::ColEq(x, y))
            } else {
                Some(Condition::ColEq(y, x))
            }
        }
        (Scalar::Column(x), Scalar::Const(c)) | (Scalar::Const(c), Scalar::Column(x)) => {
            Some(Condition::ColConst(x, c))
        }
        (Scalar::Const(c), Scalar::Const(d)) => {
            if c == d {
                None
            } else {
                return Err(malformed(format!("contradictory selection '{c}'='{d}'")));
            }
        }
    })
}

fn flatten(q: &SourceQuery) -> Result<Flat> {
    match q {
        SourceQuery::Base(n) => Ok(Flat {
            relations: vec![n.clone()],
            conditions: BTreeSet::new(),
            output: None,
        }),
        SourceQuery::Opaque(_) => Err(malformed("opaque source outside the conjunctive subset")),
        SourceQuery::Select { conditions, input } => {
            let mut flat = flatten(input)?;
            for c in conditions {
                let (a, b) = match c {
                    Condition::ColEq(a, b) => (resolve(a, &flat)?, resolve(b, &flat)?),
                    Condition::ColConst(a, v) => (resolve(a, &flat)?, Scalar::Const(v.clone())),
                };
                if let Some(cond) = make_condition(a, b)? {
                    flat.conditions.insert(cond);
                }
            }
            Ok(flat)
        }
        SourceQuery::Project { items, input } => {
            let flat = flatten(input)?;
            let mut aliases = BTreeSet::new();
            let mut out = Vec::with_capacity(items.len());
            for item in items {
                match &item.expr {
                    ProjExpr::AllOf(r) => {
                        if !flat.relations.contains(r) {
                            return Err(malformed(format!("`{r}.*` names no input relation")));
                        }
                        out.push(OutItem::AllOf(r.clone()));
                    }
                    expr => {
                        if !aliases.insert(item.alias.clone()) {
                            return Err(malformed(format!("duplicate output alias `{}`", item.alias)));
                        }
                        let value = match expr {
                            ProjExpr::Column(c) => resolve(c, &flat)?,
                            ProjExpr::Const(v) => Scalar::Const(v.clone()),
                            ProjExpr::AllOf(_) => unreachable!(),
                        };
                        out.push(OutItem::Named {
                            alias: item.alias.clone(),
                            value,
                        });
                    }
                }
            }
            Ok(Flat {
                relations: flat.relations,
                conditions: flat.conditions,
                output: Some(out),
            })
        }
        SourceQuery::Join { left, right, on } => {
            let l = flatten(left)?;
            let r = flatten(right)?;
            if let Some(dup) = l.relations.iter().find(|x| r.relations.contains(x)) {
                return Err(malformed(format!("self-join on `{dup}` is not supported")));
            }
            let side = |c: &ColRef| -> Result<Scalar> {
                let in_left = c
                    .relation
                    .as_ref()
                    .map(|q| l.relations.contains(q));
                match in_left {
                    Some(true) => resolve(c, &l),
                    Some(false) => resolve(c, &r),
                    None => match (resolve(c, &l), resolve(c, &r)) {
                        (Ok(a), Err(_)) => Ok(a),
                        (Err(_), Ok(b)) => Ok(b),
                        (Ok(a), Ok(b)) if a == b => Ok(a),
                        (Ok(_), Ok(_)) => Err(malformed(format!("ambiguous join column `{c}`"))),
                        (Err(e), Err(_)) => Err(e),
                    },
                }
            };
            let mut conditions = l.conditions.clone();
            conditions.extend(r.conditions.iter().cloned());
            for (a, b) in on {
                if let Some(cond) = make_condition(side(a)?, side(b)?)? {
                    conditions.insert(cond);
                }
            }
            let star = |f: &Flat| -> Vec<OutItem> {
                f.output.clone().unwrap_or_else(|| {
                    f.relations.iter().cloned().map(OutItem::AllOf).collect()
                })
            };
            let output = if l.output.is_none() && r.output.is_none() {
                None
            } else {
                let mut out = star(&l);
                out.extend(star(&r));
                let mut seen = BTreeSet::new();
                for o in &out {
                    if let OutItem::Named { alias, .. } = o {
                        if !seen.insert(alias.clone()) {
                            return Err(malformed(format!("duplicate output alias `{alias}`")));
                        }
                    }
                }
                Some(out)
            };
            let mut relations = l.relations;
            relations.extend(r.relations);
            Ok(Flat {
                relations,
                conditions,
                output,
            })
        }
    }
}

fn rebuild(mut flat: Flat) -> SourceQuery {
    flat.relations.sort();
    let single = flat.relations.len() == 1;
    let strip = |c: &ColRef| if single { c.unqualified() } else { c.clone() };
    let mut remaining: Vec<Condition> = flat
        .conditions
        .iter()
        .map(|c| match c {
            Condition::ColEq(a, b) => {
                let (a, b) = (strip(a), strip(b));
                if a <= b {
                    Condition::ColEq(a, b)
                } else {
                    Condition::ColEq(b, a)
                }
            }
            Condition::ColConst(a, v) => Condition::ColConst(strip(a), v.clone()),
        })
        .filter(|c| !matches!(c, Condition::ColEq(a, b) if a == b))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let mut rels = flat.relations.iter();
    let first = rels.next().expect("flattened query has a relation");
    let mut tree = SourceQuery::Base(first.clone());
    let mut placed: BTreeSet<&str> = BTreeSet::from([first.as_str()]);
    for rel in rels {
        placed.insert(rel.as_str());
        let mut on = Vec::new();
        remaining.retain(|c| match c {
            Condition::ColEq(a, b) => {
                let (Some(ra), Some(rb)) = (&a.relation, &b.relation) else {
                    return true;
                };
                let placeable = placed.contains(ra.as_str())
                    && placed.contains(rb.as_str())
                    && (ra == rel || rb == rel);
                if placeable {
                    on.push((a.clone(), b.clone()));
                }
                !placeable
            }
            Condition::ColConst(..) => true,
        });
        tree = tree.join(SourceQuery::Base(rel.clone()), on);
    }
    if !remaining.is_empty() {
        tree = tree.select(remaining);
    }
    if let Some(out) = flat.output {
        let mut items: Vec<ProjItem> = out
            .into_iter()
            .map(|o| match o {
                OutItem::AllOf(r) => ProjItem {
                    alias: String::new(),
                    expr: ProjExpr::AllOf(r),
                },
                OutItem::Named { alias, value } => ProjItem {
                    expr: match value {
                        Scalar::Column(c) => ProjExpr::Column(strip(&c)),
                        Scalar::Const(v) => ProjExpr::Const(v),
                    },
                    alias,
                },
            })
            .collect();
        items.sort_by_key(sort_key);
        items.dedup();
        tree = tree.project(items);
    }
    tree
}

fn sort_key(item: &ProjItem) -> String {
    match &item.expr {
        ProjExpr::AllOf(r) => format!("{r}.*"),
        _ => item.alias.clone(),
    }
}

/// Normal form of a conjunctive source query: selections below a single
/// outermost projection, joins left-deep in relation-name order, conjuncts
/// sorted, output columns ordered by alias. Idempotent.
pub fn normalize_query(q: &SourceQuery) -> Result<SourceQuery> {
    Ok(rebuild(flatten(q)?))
}
