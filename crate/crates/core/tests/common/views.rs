//! Naive evaluation of emitted views, to check that they respect their keys
//! and that one-to-many splits lose nothing.

use std::collections::{BTreeMap, BTreeSet};

use vkg_patterns::engine::{detect_all, DetectOptions, DetectionResult};
use vkg_patterns::model::{
    AttributeSet, ColRef, Condition, DataInstance, PatternKind, ProjExpr, RelationalSchema, SourceQuery, Value,
};

use super::fixtures::Fixture;

/// A row as (relation qualifier, column) → value.
type Tuple = Vec<((Option<String>, String), Value)>;

fn lookup<'a>(t: &'a Tuple, c: &ColRef) -> Result<&'a Value, String> {
    let hits: Vec<&Value> = t
        .iter()
        .filter(|((q, n), _)| n == &c.name && (c.relation.is_none() || c.relation == *q))
        .map(|(_, v)| v)
        .collect();
    match hits.as_slice() {
        [v] => Ok(*v),
        _ => Err(format!("column {c:?} resolves to {} cells", hits.len())),
    }
}

/// Set semantics throughout: every relation is a set of tuples.
pub fn eval(q: &SourceQuery, schema: &RelationalSchema, data: &DataInstance) -> Result<BTreeSet<Tuple>, String> {
    match q {
        SourceQuery::Opaque(s) => Err(format!("opaque view body {s}")),
        SourceQuery::Base(name) => {
            if let Some(t) = schema.table(name) {
                let names = t.attr_names();
                Ok(data
                    .rows(name)
                    .unwrap_or_default()
                    .iter()
                    .map(|r| names.iter().cloned().map(|n| (Some(name.clone()), n)).zip(r.iter().cloned()).collect())
                    .collect())
            } else if let Some(v) = schema.view(name) {
                eval(&v.expr, schema, data)?
                    .iter()
                    .map(|t| {
                        v.columns
                            .iter()
                            .map(|c| Ok(((Some(name.clone()), c.clone()), lookup(t, &ColRef::bare(c.clone()))?.clone())))
                            .collect()
                    })
                    .collect()
            } else {
                Err(format!("unknown relation {name}"))
            }
        }
        SourceQuery::Project { items, input } => eval(input, schema, data)?
            .iter()
            .map(|t| {
                let mut out = Tuple::new();
                for it in items {
                    match &it.expr {
                        ProjExpr::Column(c) => out.push(((None, it.alias.clone()), lookup(t, c)?.clone())),
                        ProjExpr::Const(v) => out.push(((None, it.alias.clone()), Some(v.clone()))),
                        ProjExpr::AllOf(rel) => {
                            out.extend(t.iter().filter(|((q, _), _)| q.as_deref() == Some(rel)).cloned())
                        }
                    }
                }
                Ok(out)
            })
            .collect(),
        SourceQuery::Select { conditions, input } => {
            let mut out = BTreeSet::new();
            for t in eval(input, schema, data)? {
                let mut keep = true;
                for c in conditions {
                    keep &= match c {
                        Condition::ColEq(a, b) => {
                            let (x, y) = (lookup(&t, a)?, lookup(&t, b)?);
                            x.is_some() && x == y
                        }
                        Condition::ColConst(a, v) => lookup(&t, a)?.as_deref() == Some(v.as_str()),
                    };
                }
                if keep {
                    out.insert(t);
                }
            }
            Ok(out)
        }
        SourceQuery::Join { left, right, on } => {
            let (l, r) = (eval(left, schema, data)?, eval(right, schema, data)?);
            let mut out = BTreeSet::new();
            for a in &l {
                for b in &r {
                    let t: Tuple = a.iter().chain(b).cloned().collect();
                    let mut keep = true;
                    for (x, y) in on {
                        let (x, y) = (lookup(&t, x)?, lookup(&t, y)?);
                        keep &= x.is_some() && x == y;
                    }
                    if keep {
                        out.insert(t);
                    }
                }
            }
            Ok(out)
        }
    }
}

fn by_name(t: &Tuple) -> BTreeMap<String, Value> {
    t.iter().map(|((_, n), v)| (n.clone(), v.clone())).collect()
}

fn satisfies_key(rows: &BTreeSet<Tuple>, key: &AttributeSet) -> bool {
    let mut seen = BTreeSet::new();
    rows.iter().all(|t| {
        let m = by_name(t);
        let k: Vec<Value> = key.iter().map(|a| m.get(a).cloned().flatten()).collect();
        k.iter().all(Option::is_some) && seen.insert(k)
    })
}

fn natural_join(a: &[BTreeMap<String, Value>], b: &[BTreeMap<String, Value>], on: &AttributeSet) -> Vec<BTreeMap<String, Value>> {
    let mut out = Vec::new();
    for x in a {
        for y in b {
            if on.iter().all(|c| x.get(c).cloned().flatten().is_some() && x.get(c) == y.get(c)) {
                let mut t = x.clone();
                t.extend(y.clone());
                out.push(t);
            }
        }
    }
    out
}

/// Checks every emitted view against its keys and every one-to-many split
/// for losslessness. Returns how many views and splits were checked.
pub fn check_views(r: &DetectionResult, schema: &RelationalSchema, data: &DataInstance) -> Result<(usize, usize), String> {
    let derived = &r.derived_schema;
    let (mut checked, mut splits) = (0, 0);
    for v in &derived.views {
        let rows = eval(&SourceQuery::Base(v.name.clone()), derived, data)?;
        for key in v.primary_key.iter().chain(&v.declared_keys) {
            if !satisfies_key(&rows, key) {
                return Err(format!("view {} violates key {key:?}", v.name));
            }
        }
        checked += 1;
    }
    for inst in r.instances.iter().filter(|i| i.kind == PatternKind::DR1Nm) {
        let [ve, vr, vf] = inst.emitted_views.as_slice() else {
            return Err(format!("{} emits {} views", inst.application_key(), inst.emitted_views.len()));
        };
        let rel = |name: &str| -> Result<Vec<BTreeMap<String, Value>>, String> {
            Ok(eval(&SourceQuery::Base(name.to_string()), derived, data)?.iter().map(by_name).collect())
        };
        let b = |role: &str| inst.binding(role).cloned().unwrap_or_default();
        let joined = natural_join(&natural_join(&rel(&ve.name)?, &rel(&vr.name)?, &b("K_E")), &rel(&vf.name)?, &b("K_F"));
        let cols: BTreeSet<String> = ["K_E", "A_E", "K_F", "A_F"].iter().flat_map(|r| b(r).0).collect();
        let restrict = |m: &BTreeMap<String, Value>| -> BTreeMap<String, Value> {
            m.iter().filter(|(k, _)| cols.contains(*k)).map(|(k, v)| (k.clone(), v.clone())).collect()
        };
        let got: BTreeSet<_> = joined.iter().map(restrict).collect();
        let want: BTreeSet<_> = eval(&SourceQuery::Base(inst.main_table.clone()), schema, data)?
            .iter()
            .map(|t| restrict(&by_name(t)))
            .collect();
        if got != want {
            return Err(format!("{} does not reconstruct {}", inst.application_key(), inst.main_table));
        }
        splits += 1;
    }
    Ok((checked, splits))
}

/// View soundness over every data-bearing fixture, in both detection modes.
pub fn check_fixture_views(fixtures: &[Fixture]) -> Result<(usize, usize), String> {
    let mut total = (0, 0);
    for f in fixtures {
        let Some(data) = f.data() else { continue };
        let schema = f.schema();
        for enumerate in [false, true] {
            let r = detect_all(&schema, Some(&data), &f.hints(), DetectOptions { enumerate, ..DetectOptions::default() })
                .map_err(|e| format!("{}: {e}", f.kind))?;
            let (v, s) = check_views(&r, &schema, &data).map_err(|e| format!("{}: {e}", f.kind))?;
            total = (total.0 + v, total.1 + s);
        }
    }
    Ok(total)
}
