//! Exact discovery of keys, functional dependencies, inclusion
//! dependencies, partitions and optional participation.

mod fds;
mod inds;
mod keys;
mod partitions;
mod participation;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use fds::discover_fds;
pub use inds::{discover_constant_inds, discover_inds};
pub use keys::discover_keys;
pub use participation::{participation, Participation};
pub use partitions::discover_partitions;

use crate::model::{
    evaluate, AttributeSet, DataInstance, FunctionalDependency, InclusionDependency, PartitionSpec, RelationalSchema,
    Row,
};

/// Rows of one table or view with their column names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationData {
    pub name: String,
    pub attrs: Vec<String>,
    pub rows: Vec<Row>,
    pub pk: Option<AttributeSet>,
}

impl RelationData {
    pub fn index(&self, attr: &str) -> Option<usize> {
        self.attrs.iter().position(|a| a == attr)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    #[serde(rename = "maxKeyArity")]
    pub max_key_arity: usize,
    #[serde(rename = "maxFdLhs")]
    pub max_fd_lhs: usize,
    #[serde(rename = "maxIndArity")]
    pub max_ind_arity: usize,
    #[serde(rename = "maxPartitionValues")]
    pub max_partition_values: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_key_arity: 3,
            max_fd_lhs: 2,
            max_ind_arity: 2,
            max_partition_values: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DiscoveredKey {
    pub table: String,
    pub attrs: AttributeSet,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DiscoveredConstraints {
    /// Minimal keys other than the declared primary key.
    pub keys: Vec<DiscoveredKey>,
    pub fds: Vec<FunctionalDependency>,
    /// Plain inclusions not already declared as foreign keys.
    pub inds: Vec<InclusionDependency>,
    /// Inclusions completed by a constant.
    #[serde(rename = "constantInds")]
    pub constant_inds: Vec<InclusionDependency>,
    pub partitions: Vec<PartitionSpec>,
    #[serde(rename = "optionalParticipations")]
    pub optional_participations: Vec<Participation>,
}

impl DiscoveredConstraints {
    pub fn keys_of<'a>(&'a self, table: &'a str) -> impl Iterator<Item = &'a AttributeSet> + 'a {
        self.keys.iter().filter(move |k| k.table == table).map(|k| &k.attrs)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("constraints serialize");
        s.push('\n');
        s
    }
}

/// Relations with data, in schema order: tables first, then views whose
/// inputs have data.
pub fn relations_with_data(schema: &RelationalSchema, data: &DataInstance, views: bool) -> Vec<RelationData> {
    let mut out: Vec<RelationData> = schema
        .tables
        .iter()
        .filter_map(|t| {
            Some(RelationData {
                name: t.name.clone(),
                attrs: t.attr_names(),
                rows: data.rows(&t.name)?.to_vec(),
                pk: t.primary_key.clone(),
            })
        })
        .collect();
    if views {
        for v in &schema.views {
            if !v.expr.relations().iter().all(|r| data.has_data(r) || schema.view(r).is_some()) {
                continue;
            }
            if let Ok(rel) = evaluate(&crate::model::SourceQuery::Base(v.name.clone()), schema, data) {
                out.push(RelationData {
                    name: v.name.clone(),
                    attrs: v.columns.clone(),
                    rows: rel.rows,
                    pk: v.primary_key.clone(),
                });
            }
        }
    }
    out
}

/// Profiles every relation with data. `candidates` adds multi-attribute
/// partition candidates per relation.
pub fn profile(
    schema: &RelationalSchema,
    relations: &[RelationData],
    bounds: Bounds,
    candidates: &BTreeMap<String, Vec<AttributeSet>>,
) -> DiscoveredConstraints {
    let mut c = DiscoveredConstraints::default();
    for r in relations {
        for k in discover_keys(&r.rows, &r.attrs, bounds.max_key_arity) {
            if r.pk.as_ref().is_some_and(|pk| pk.same_set(&k)) {
                continue;
            }
            c.keys.push(DiscoveredKey {
                table: r.name.clone(),
                attrs: k,
            });
        }
        c.fds
            .extend(discover_fds(&r.name, &r.rows, &r.attrs, r.pk.as_ref(), bounds.max_fd_lhs));
        let extra = candidates.get(&r.name).map(Vec::as_slice).unwrap_or(&[]);
        c.partitions
            .extend(discover_partitions(r, extra, bounds.max_partition_values));
    }
    let declared = declared_references(schema);
    c.inds = discover_inds(relations, bounds.max_ind_arity)
        .into_iter()
        .filter(|d| {
            !declared.iter().any(|(s, src, t, tgt)| {
                *s == d.source_table && *t == d.target_table && same_pairs(src, tgt, &d.source_attrs(), &d.target)
            })
        })
        .collect();
    let keys_of = |r: &RelationData| -> Vec<AttributeSet> {
        let mut ks: Vec<AttributeSet> = Vec::new();
        if let Some(t) = schema.table(&r.name) {
            ks.extend(t.primary_key.iter().cloned());
            ks.extend(t.unique_keys.iter().cloned());
        } else if let Some(v) = schema.view(&r.name) {
            ks.extend(v.primary_key.iter().cloned());
            ks.extend(v.declared_keys.iter().cloned());
        }
        // The arity bound limits the search, not what the schema declares.
        for k in c.keys_of(&r.name).filter(|k| k.len() <= bounds.max_key_arity) {
            if !ks.iter().any(|x| x.same_set(k)) {
                ks.push(k.clone());
            }
        }
        ks
    };
    c.constant_inds = discover_constant_inds(relations, &keys_of);
    let by_name: BTreeMap<&str, &RelationData> = relations.iter().map(|r| (r.name.as_str(), r)).collect();
    let mut refs: Vec<(String, AttributeSet, String, AttributeSet)> = declared;
    refs.extend(
        c.inds
            .iter()
            .map(|d| (d.source_table.clone(), d.source_attrs(), d.target_table.clone(), d.target.clone())),
    );
    for (s, src, t, tgt) in refs {
        if s == t {
            continue;
        }
        let (Some(rs), Some(rt)) = (by_name.get(s.as_str()), by_name.get(t.as_str())) else {
            continue;
        };
        if let Some(p) = participation(rs, &src, rt, &tgt) {
            c.optional_participations.push(p);
        }
    }
    c
}

fn declared_references(schema: &RelationalSchema) -> Vec<(String, AttributeSet, String, AttributeSet)> {
    let mut out = Vec::new();
    for t in &schema.tables {
        for fk in &t.foreign_keys {
            out.push((t.name.clone(), fk.source.clone(), fk.target_table.clone(), fk.target.clone()));
        }
    }
    for v in &schema.views {
        for fk in &v.foreign_keys {
            out.push((v.name.clone(), fk.source.clone(), fk.target_table.clone(), fk.target.clone()));
        }
    }
    out
}

/// Whether two aligned reference pairs denote the same column mapping.
fn same_pairs(a_src: &AttributeSet, a_tgt: &AttributeSet, b_src: &AttributeSet, b_tgt: &AttributeSet) -> bool {
    let mut a: Vec<(&String, &String)> = a_src.iter().zip(a_tgt.iter()).collect();
    let mut b: Vec<(&String, &String)> = b_src.iter().zip(b_tgt.iter()).collect();
    a.sort();
    b.sort();
    a == b
}
