//! Per-relation facts the detectors work from: declared constraints plus the
//! discovered ones that survive filtering.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{AttributeSet, ForeignKey, InclusionDependency, RelationalSchema};
use crate::profiler::DiscoveredConstraints;

#[derive(Debug, Clone)]
pub(crate) struct RelInfo {
    pub name: String,
    pub attrs: Vec<String>,
    pub pk: Option<AttributeSet>,
    pub pk_declared: bool,
    /// Keys other than the primary key, flagged when declared.
    pub keys: Vec<(AttributeSet, bool)>,
    /// At most one reference per source attribute set; declared first.
    pub fks: Vec<ForeignKey>,
    pub const_inds: Vec<InclusionDependency>,
    pub rows: Option<usize>,
    pub is_view: bool,
    pub entity_class: Option<String>,
    pub lineage: BTreeSet<String>,
    /// The view borrows another relation's identity (its rows are a subset
    /// of that relation's objects).
    pub borrowed_identity: bool,
}

impl RelInfo {
    /// Identifier: the primary key, else the smallest discovered key
    /// (ties broken by attribute names). The flag tells whether it is
    /// declared.
    pub fn identifier(&self) -> Option<(AttributeSet, bool)> {
        if let Some(pk) = &self.pk {
            return Some((pk.clone(), self.pk_declared));
        }
        self.keys
            .iter()
            .min_by_key(|(k, _)| (k.len(), k.sorted()))
            .map(|(k, d)| (k.clone(), *d))
    }

    pub fn is_key(&self, attrs: &AttributeSet) -> bool {
        self.pk.as_ref().is_some_and(|p| p.same_set(attrs)) || self.keys.iter().any(|(k, _)| k.same_set(attrs))
    }

    pub fn is_declared_key(&self, attrs: &AttributeSet) -> bool {
        self.pk.as_ref().is_some_and(|p| self.pk_declared && p.same_set(attrs))
            || self.keys.iter().any(|(k, d)| *d && k.same_set(attrs))
    }

    pub fn is_identity(&self, attrs: &AttributeSet) -> bool {
        self.identifier().is_some_and(|(k, _)| k.same_set(attrs))
    }

    pub fn has_data(&self) -> bool {
        self.rows.is_some_and(|n| n > 0)
    }

    /// Position of the first attribute of `attrs` in the relation.
    pub fn first_pos(&self, attrs: &AttributeSet) -> usize {
        attrs
            .iter()
            .filter_map(|a| self.attrs.iter().position(|x| x == a))
            .min()
            .unwrap_or(usize::MAX)
    }

    pub fn rest(&self, remove: &[&AttributeSet]) -> AttributeSet {
        self.attrs
            .iter()
            .filter(|a| !remove.iter().any(|r| r.contains(a)))
            .cloned()
            .collect()
    }
}

/// Base tables a relation is computed from, including itself.
pub(crate) fn lineage(schema: &RelationalSchema, name: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut todo = vec![name.to_string()];
    while let Some(n) = todo.pop() {
        if !out.insert(n.clone()) {
            continue;
        }
        if let Some(v) = schema.view(&n) {
            todo.extend(v.expr.relations());
        }
    }
    out
}

/// Facts for every table and every cascading view of `schema`.
pub(crate) fn build_infos(
    schema: &RelationalSchema,
    constraints: Option<&DiscoveredConstraints>,
    row_counts: &BTreeMap<String, usize>,
) -> BTreeMap<String, RelInfo> {
    let mut infos: BTreeMap<String, RelInfo> = BTreeMap::new();
    for t in &schema.tables {
        infos.insert(
            t.name.clone(),
            RelInfo {
                name: t.name.clone(),
                attrs: t.attr_names(),
                pk: t.primary_key.clone(),
                pk_declared: true,
                keys: t.unique_keys.iter().map(|k| (k.clone(), true)).collect(),
                fks: t.foreign_keys.clone(),
                const_inds: t.inclusion_deps.iter().filter(|d| d.has_constant()).cloned().collect(),
                rows: row_counts.get(&t.name).copied(),
                is_view: false,
                entity_class: None,
                lineage: lineage(schema, &t.name),
                borrowed_identity: false,
            },
        );
    }
    for v in schema.views.iter().filter(|v| v.cascade) {
        infos.insert(
            v.name.clone(),
            RelInfo {
                name: v.name.clone(),
                attrs: v.columns.clone(),
                pk: v.primary_key.clone(),
                pk_declared: !v.discovered,
                keys: v.declared_keys.iter().map(|k| (k.clone(), !v.discovered)).collect(),
                fks: v.foreign_keys.clone(),
                const_inds: Vec::new(),
                rows: row_counts.get(&v.name).copied(),
                is_view: true,
                entity_class: v.entity_class.clone(),
                lineage: lineage(schema, &v.name),
                borrowed_identity: v.template_owner.as_deref().is_some_and(|o| o != v.name),
            },
        );
    }
    let Some(c) = constraints else {
        return infos;
    };
    for k in &c.keys {
        if let Some(info) = infos.get_mut(&k.table) {
            if !info.is_key(&k.attrs) {
                info.keys.push((k.attrs.clone(), false));
            }
        }
    }
    let related = |a: &RelInfo, b: &RelInfo| a.lineage.contains(&b.name) || b.lineage.contains(&a.name);
    let mut discovered: BTreeMap<String, Vec<ForeignKey>> = BTreeMap::new();
    for d in c.inds.iter().filter(|d| !d.has_constant()) {
        let (Some(src), Some(tgt)) = (infos.get(&d.source_table), infos.get(&d.target_table)) else {
            continue;
        };
        let source = d.source_attrs();
        if src.name != tgt.name && related(src, tgt) {
            continue;
        }
        // Only identifiers and declared keys are reference targets; a
        // column that happens to be unique in a relationship table is not.
        let target_ok = tgt.is_identity(&d.target) || tgt.is_declared_key(&d.target);
        if !target_ok || src.fks.iter().any(|f| f.declared && f.source.same_set(&source)) {
            continue;
        }
        discovered
            .entry(src.name.clone())
            .or_default()
            .push(ForeignKey::new(source, d.target_table.clone(), d.target.clone()).discovered());
    }
    for (name, mut cands) in discovered {
        // One reference per source set: the most specific target (fewest
        // rows), then the first by name.
        cands.sort_by_key(|f| {
            (
                f.source.sorted(),
                infos.get(&f.target_table).and_then(|t| t.rows).unwrap_or(usize::MAX),
                f.target_table.clone(),
                f.target.clone(),
            )
        });
        cands.dedup_by(|b, a| a.source.same_set(&b.source));
        let info = infos.get_mut(&name).expect("source relation exists");
        for f in cands {
            if !info.fks.iter().any(|g| g.source.same_set(&f.source)) {
                info.fks.push(f);
            }
        }
    }
    let fk_sources: BTreeMap<String, Vec<AttributeSet>> = infos
        .iter()
        .map(|(n, i)| (n.clone(), i.fks.iter().filter(|f| f.declared).map(|f| f.source.clone()).collect()))
        .collect();
    for d in &c.constant_inds {
        let (Some(src), Some(tgt)) = (infos.get(&d.source_table), infos.get(&d.target_table)) else {
            continue;
        };
        if related(src, tgt) {
            continue;
        }
        // A constant sitting in a reference column of the parent means the
        // parent is a relationship, not a typed entity.
        let const_in_fk = d.constants().any(|(attr, _)| {
            fk_sources
                .get(&d.target_table)
                .is_some_and(|s| s.iter().any(|k| k.contains(attr)))
        });
        if const_in_fk {
            continue;
        }
        let info = infos.get_mut(&d.source_table).expect("source relation exists");
        if !info.const_inds.contains(d) {
            info.const_inds.push(d.clone());
        }
    }
    infos
}
