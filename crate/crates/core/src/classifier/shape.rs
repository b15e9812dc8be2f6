//! Abstract shape of a mapping assertion: the relational core of its source
//! plus its target atoms with templates reduced to the source columns they
//! draw from. Predicates, template text and prefixes are ignored, so two
//! assertions that differ only by vocabulary have the same shape.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{
    normalize_query, AtomKind, ColRef, Condition, IriTemplate, MappingAssertion, ObjectTerm, ProjExpr, RelationalSchema,
    SourceQuery, TargetAtom,
};

/// Where a template placeholder or data value comes from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Origin {
    Col(String, String),
    Const(String),
    Unresolved(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Obj {
    Iri(Vec<Origin>),
    Value(Origin),
    /// Literal template other than a single placeholder.
    Lit(Vec<Origin>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbsAtom {
    pub kind: AtomKind,
    pub subject: Vec<Origin>,
    pub object: Option<Obj>,
}

/// Relations, column equalities (as equivalence classes) and constant
/// selections of a conjunctive source.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Core {
    pub relations: BTreeSet<String>,
    pub equalities: BTreeSet<BTreeSet<(String, String)>>,
    pub selections: BTreeSet<((String, String), String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Shape {
    pub core: Core,
    pub atoms: BTreeSet<AbsAtom>,
}

impl Shape {
    /// Same source core and every atom of `self` appears in `other`.
    pub fn within(&self, other: &Shape) -> bool {
        self.core == other.core && self.atoms.is_subset(&other.atoms)
    }

    /// Columns of `table` that data atoms take their values from.
    pub fn data_columns(&self, table: &str) -> BTreeSet<String> {
        self.atoms
            .iter()
            .filter(|a| a.kind == AtomKind::DataProperty)
            .filter_map(|a| match &a.object {
                Some(Obj::Value(Origin::Col(r, c))) if r == table => Some(c.clone()),
                _ => None,
            })
            .collect()
    }
}

struct Resolver {
    single: Option<String>,
    aliases: BTreeMap<String, Origin>,
    canon: BTreeMap<(String, String), (String, String)>,
}

impl Resolver {
    fn column(&self, c: &ColRef, schema: &RelationalSchema, rels: &BTreeSet<String>) -> Origin {
        let rel = c.relation.clone().or_else(|| self.single.clone()).or_else(|| {
            let owners: Vec<&String> = rels
                .iter()
                .filter(|r| schema.columns_of(r).is_some_and(|cs| cs.contains(&c.name)))
                .collect();
            (owners.len() == 1).then(|| owners[0].clone())
        });
        match rel {
            Some(r) => {
                let key = (r, c.name.clone());
                let (r, n) = self.canon.get(&key).cloned().unwrap_or(key);
                Origin::Col(r, n)
            }
            None => Origin::Unresolved(c.name.clone()),
        }
    }

    fn alias(&self, name: &str) -> Origin {
        self.aliases.get(name).cloned().unwrap_or_else(|| Origin::Unresolved(name.to_string()))
    }
}

fn collect(q: &SourceQuery, conds: &mut Vec<Condition>, proj: &mut Option<Vec<crate::model::ProjItem>>) {
    match q {
        SourceQuery::Base(_) | SourceQuery::Opaque(_) => {}
        SourceQuery::Project { items, input } => {
            *proj = Some(items.clone());
            collect(input, conds, proj);
        }
        SourceQuery::Select { conditions, input } => {
            conds.extend(conditions.iter().cloned());
            collect(input, conds, proj);
        }
        SourceQuery::Join { left, right, on } => {
            conds.extend(on.iter().map(|(a, b)| Condition::ColEq(a.clone(), b.clone())));
            collect(left, conds, proj);
            collect(right, conds, proj);
        }
    }
}

/// Shape of `a`, or `None` when its source is opaque or not conjunctive.
pub fn shape_of(a: &MappingAssertion, schema: &RelationalSchema) -> Option<Shape> {
    if a.source.is_opaque() {
        return None;
    }
    let q = normalize_query(&a.source).ok()?;
    let rels: BTreeSet<String> = q.relations().into_iter().collect();
    let mut conds = Vec::new();
    let mut proj = None;
    collect(&q, &mut conds, &mut proj);

    let mut r = Resolver {
        single: (rels.len() == 1).then(|| rels.iter().next().cloned()).flatten(),
        aliases: BTreeMap::new(),
        canon: BTreeMap::new(),
    };

    // Column equalities as equivalence classes; each member maps to the
    // smallest one.
    let mut classes: Vec<BTreeSet<(String, String)>> = Vec::new();
    for c in &conds {
        if let Condition::ColEq(x, y) = c {
            let (Origin::Col(xr, xn), Origin::Col(yr, yn)) = (r.column(x, schema, &rels), r.column(y, schema, &rels)) else {
                continue;
            };
            let (x, y) = ((xr, xn), (yr, yn));
            let ix = classes.iter().position(|s| s.contains(&x));
            let iy = classes.iter().position(|s| s.contains(&y));
            match (ix, iy) {
                (Some(i), Some(j)) if i != j => {
                    let merged = classes.remove(i.max(j));
                    classes[i.min(j)].extend(merged);
                }
                (Some(_), Some(_)) => {}
                (Some(i), None) => {
                    classes[i].insert(y);
                }
                (None, Some(j)) => {
                    classes[j].insert(x);
                }
                (None, None) => classes.push([x, y].into()),
            }
        }
    }
    for class in &classes {
        let rep = class.iter().next().cloned().expect("non-empty class");
        for m in class {
            r.canon.insert(m.clone(), rep.clone());
        }
    }

    let mut core = Core {
        relations: rels.clone(),
        equalities: classes.into_iter().collect(),
        selections: BTreeSet::new(),
    };
    for c in &conds {
        if let Condition::ColConst(x, v) = c {
            let key = match r.column(x, schema, &rels) {
                Origin::Col(a, b) => (a, b),
                other => (String::new(), format!("{other:?}")),
            };
            core.selections.insert((key, v.clone()));
        }
    }

    match &proj {
        Some(items) => {
            for it in items {
                match &it.expr {
                    ProjExpr::Column(c) => {
                        let o = r.column(c, schema, &rels);
                        r.aliases.insert(it.alias.clone(), o);
                    }
                    ProjExpr::Const(v) => {
                        r.aliases.insert(it.alias.clone(), Origin::Const(v.clone()));
                    }
                    ProjExpr::AllOf(rel) => {
                        for c in schema.columns_of(rel).unwrap_or_default() {
                            let o = r.column(&ColRef::qualified(rel.clone(), c.clone()), schema, &rels);
                            r.aliases.insert(c, o);
                        }
                    }
                }
            }
        }
        None => {
            for rel in &rels {
                for c in schema.columns_of(rel).unwrap_or_default() {
                    let o = r.column(&ColRef::qualified(rel.clone(), c.clone()), schema, &rels);
                    r.aliases.entry(c).or_insert(o);
                }
            }
        }
    }

    // Placeholder order is part of the template text, so it is ignored too.
    let template = |t: &IriTemplate| -> Vec<Origin> {
        let mut o: Vec<Origin> = t.placeholders().iter().map(|p| r.alias(p)).collect();
        o.sort();
        o
    };
    let atoms = a
        .targets
        .iter()
        .map(|t: &TargetAtom| AbsAtom {
            kind: t.kind,
            subject: template(&t.subject),
            object: t.object.as_ref().map(|o| match o {
                ObjectTerm::Iri(i) => Obj::Iri(template(i)),
                ObjectTerm::Column(c) => Obj::Value(r.alias(c)),
                ObjectTerm::Literal(l) => {
                    let ph = l.placeholders();
                    if ph.len() == 1 && l.body() == format!("{{{}}}", ph[0]) {
                        Obj::Value(r.alias(ph[0]))
                    } else {
                        Obj::Lit(ph.iter().map(|p| r.alias(p)).collect())
                    }
                }
            }),
        })
        .collect();
    Some(Shape { core, atoms })
}
