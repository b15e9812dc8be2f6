//! IRI identities of relations: which class a row populates and which
//! template builds its IRI.

use std::collections::BTreeMap;

use crate::engine::{class_of, HintsDocument};
use crate::error::{Error, Result};
use crate::model::{roles, AttributeSet, ForeignKey, InclusionDependency, PatternInstance, PatternKind, RelationalSchema};
use crate::naming::{local_name, template_path};

/// One template position: a column of the relation or a fixed value that
/// the source projects under `alias`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Slot {
    Col(String),
    Const { alias: String, value: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Identity {
    pub class: String,
    /// Lowercased root class: subclasses share their root's IRIs.
    pub path: String,
    pub slots: Vec<Slot>,
}

impl Identity {
    pub fn columns(&self) -> AttributeSet {
        self.slots
            .iter()
            .filter_map(|s| match s {
                Slot::Col(c) => Some(c.clone()),
                Slot::Const { .. } => None,
            })
            .collect()
    }
}

pub struct Vocabulary<'a> {
    pub schema: &'a RelationalSchema,
    pub instances: &'a [PatternInstance],
    pub hints: &'a HintsDocument,
    /// Prefix for generated names and templates, e.g. `:`.
    pub prefix: String,
}

impl<'a> Vocabulary<'a> {
    pub fn new(schema: &'a RelationalSchema, instances: &'a [PatternInstance], hints: &'a HintsDocument) -> Self {
        Vocabulary {
            schema,
            instances,
            hints,
            prefix: ":".into(),
        }
    }

    pub fn name(&self, local: &str) -> String {
        format!("{}{}", self.prefix, local_name(local))
    }

    pub fn class_local(&self, rel: &str) -> String {
        local_name(&class_of(self.hints, rel, self.schema.view(rel).and_then(|v| v.entity_class.as_deref())))
    }

    pub fn class(&self, rel: &str) -> String {
        self.name(&self.class_local(rel))
    }

    pub fn fk(&self, rel: &str, source: &AttributeSet, target_table: &str) -> Result<ForeignKey> {
        let fks: &[ForeignKey] = match (self.schema.table(rel), self.schema.view(rel)) {
            (Some(t), _) => &t.foreign_keys,
            (None, Some(v)) => &v.foreign_keys,
            _ => &[],
        };
        fks.iter()
            .find(|f| f.source.same_set(source) && f.target_table == target_table)
            .map(|f| {
                // Reorder to follow `source`.
                let pairs: BTreeMap<&str, &str> = f.source.iter().map(String::as_str).zip(f.target.iter().map(String::as_str)).collect();
                ForeignKey {
                    source: source.clone(),
                    target: source.iter().map(|s| pairs[s.as_str()].to_string()).collect(),
                    ..f.clone()
                }
            })
            .ok_or_else(|| Error::DanglingReference(format!("{rel}{source} -> {target_table}")))
    }

    fn constant_ind(&self, rel: &str, inst: &PatternInstance) -> Result<InclusionDependency> {
        let parent = inst.tables.get("E").map(String::as_str).unwrap_or_default();
        let kf = inst.binding(roles::K_F);
        self.schema
            .table(rel)
            .and_then(|t| {
                t.inclusion_deps.iter().find(|d| {
                    d.has_constant()
                        && d.target_table == parent
                        && kf.is_none_or(|k| d.source_attrs().same_set(k))
                        && d.constants().all(|(a, c)| inst.constants.get(a).map(String::as_str) == Some(c))
                })
            })
            .cloned()
            .ok_or_else(|| Error::DanglingReference(format!("constant inclusion {rel} -> {parent}")))
    }

    fn own_key(&self, rel: &str) -> AttributeSet {
        if let Some(k) = self
            .instances
            .iter()
            .find(|i| i.main_table == rel && matches!(i.kind, PatternKind::SE | PatternKind::DE))
            .and_then(|i| i.binding(roles::K))
        {
            return k.clone();
        }
        if let Some(t) = self.schema.table(rel) {
            return t
                .primary_key
                .clone()
                .or_else(|| t.unique_keys.first().cloned())
                .unwrap_or_else(|| t.attr_names().into_iter().collect());
        }
        if let Some(v) = self.schema.view(rel) {
            return v
                .primary_key
                .clone()
                .or_else(|| v.declared_keys.first().cloned())
                .unwrap_or_else(|| v.columns.iter().cloned().collect());
        }
        AttributeSet::empty()
    }

    pub fn identity(&self, rel: &str) -> Result<Identity> {
        self.identity_depth(rel, 0)
    }

    fn identity_depth(&self, rel: &str, depth: usize) -> Result<Identity> {
        if depth > 16 {
            return Err(Error::InvalidSchema(format!("hierarchy through `{rel}` is cyclic")));
        }
        let class = self.class_local(rel);
        let parent_inst = self.instances.iter().find(|i| {
            i.main_table == rel
                && matches!(
                    i.kind,
                    PatternKind::SH | PatternKind::DH | PatternKind::SHa | PatternKind::DHa | PatternKind::SHaa | PatternKind::DHaa
                )
        });
        if let Some(inst) = parent_inst {
            let parent = inst.tables.get("E").cloned().unwrap_or_default();
            let p = self.identity_depth(&parent, depth + 1)?;
            let slots = match inst.kind {
                PatternKind::SH | PatternKind::DH | PatternKind::SHa | PatternKind::DHa => {
                    let role = if matches!(inst.kind, PatternKind::SH | PatternKind::DH) { roles::K_FE } else { roles::U_F };
                    let src = inst.binding(role).cloned().unwrap_or_default();
                    let fk = self.fk(rel, &src, &parent)?;
                    if fk.target.same_set(&p.columns()) && p.slots.iter().all(|s| matches!(s, Slot::Col(_))) {
                        map_slots(&p.slots, &fk.target, &fk.source)
                    } else {
                        // Reference to a non-identifier of the parent: the
                        // parent template is applied to the referencing
                        // attributes directly.
                        fk.source.iter().map(|c| Slot::Col(c.clone())).collect()
                    }
                }
                _ => {
                    let ind = self.constant_ind(rel, inst)?;
                    let cols = self.schema.columns_of(rel).unwrap_or_default();
                    p.slots
                        .iter()
                        .map(|s| match s {
                            Slot::Col(c) => match inst.constants.get(c) {
                                Some(v) => {
                                    let alias = if cols.contains(c) { format!("{c}_const") } else { c.clone() };
                                    Slot::Const { alias, value: v.clone() }
                                }
                                None => {
                                    let j = ind.target.iter().position(|t| t == c).unwrap_or(0);
                                    Slot::Col(ind.source_projection[j].as_attr().unwrap_or_default().to_string())
                                }
                            },
                            other => other.clone(),
                        })
                        .collect()
                }
            };
            return Ok(Identity { class, path: p.path, slots });
        }
        if let Some(v) = self.schema.view(rel) {
            if let Some(owner) = v.template_owner.as_deref().filter(|o| *o != rel) {
                let p = self.identity_depth(owner, depth + 1)?;
                return Ok(Identity { class, path: p.path, slots: p.slots });
            }
        }
        let slots = self.own_key(rel).iter().map(|c| Slot::Col(c.clone())).collect();
        Ok(Identity {
            path: template_path(&class),
            class,
            slots,
        })
    }
}

/// Renames `Col` slots through the correspondence `from[i] → to[i]`.
pub fn map_slots(slots: &[Slot], from: &AttributeSet, to: &AttributeSet) -> Vec<Slot> {
    slots
        .iter()
        .map(|s| match s {
            Slot::Col(c) => match from.iter().position(|f| f == c) {
                Some(i) => Slot::Col(to.0[i].clone()),
                None => s.clone(),
            },
            other => other.clone(),
        })
        .collect()
}
