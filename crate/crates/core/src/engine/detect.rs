//! Per-relation detectors.

use std::collections::{BTreeMap, BTreeSet};

use super::hints::HintsDocument;
use super::relinfo::RelInfo;
use crate::model::{
    roles, AttributeSet, ColRef, Condition, ForeignKey, Modifier, PatternInstance, PatternKind, ProjItem,
    Provenance, SourceQuery, ViewDef,
};
use crate::naming::{camel_case, ident_fragment};
use crate::profiler::{DiscoveredConstraints, RelationData};

pub(crate) struct Detector<'a> {
    pub infos: &'a BTreeMap<String, RelInfo>,
    pub constraints: Option<&'a DiscoveredConstraints>,
    pub data: &'a BTreeMap<String, RelationData>,
    pub hints: &'a HintsDocument,
    /// Emit every candidate instead of one resolved reading (classifier).
    pub enumerate: bool,
    /// Names already taken by tables and views.
    pub taken: &'a BTreeSet<String>,
}

#[derive(Default)]
pub(crate) struct Outcome {
    pub instances: Vec<PatternInstance>,
    pub log: Vec<String>,
}

impl Outcome {
    fn note(&mut self, rel: &str, msg: impl AsRef<str>) {
        self.log.push(format!("{rel}: {}", msg.as_ref()));
    }
}

#[derive(Clone)]
struct Role {
    fk: ForeignKey,
    aligned: bool,
}

enum Shape {
    Binary { key: AttributeSet, key_declared: bool, roles: Vec<Role> },
    Reified { key: AttributeSet, key_declared: bool, roles: Vec<Role>, attrs: AttributeSet },
}

fn provenance(declared: bool) -> Provenance {
    if declared {
        Provenance::Declared
    } else {
        Provenance::Discovered
    }
}

fn kind(base: PatternKind, declared: bool) -> PatternKind {
    base.with_provenance(provenance(declared))
}

fn union(sets: &[&AttributeSet]) -> AttributeSet {
    let mut out: Vec<String> = Vec::new();
    for s in sets {
        for a in s.iter() {
            if !out.contains(a) {
                out.push(a.clone());
            }
        }
    }
    AttributeSet(out)
}

fn project_bare(table: &str, cols: &[String]) -> SourceQuery {
    SourceQuery::base(table).project(cols.iter().map(|c| ProjItem::column(ColRef::bare(c.clone()))).collect())
}

/// Class name of a relation: hinted label, the view's class, or the
/// camel-cased name.
pub fn class_of(hints: &HintsDocument, rel: &str, entity_class: Option<&str>) -> String {
    hints
        .entity_labels
        .get(rel)
        .cloned()
        .or_else(|| entity_class.map(str::to_string))
        .unwrap_or_else(|| camel_case(rel))
}

impl<'a> Detector<'a> {
    fn info(&self, name: &str) -> Option<&'a RelInfo> {
        self.infos.get(name)
    }

    fn class(&self, rel: &str) -> String {
        class_of(self.hints, rel, self.info(rel).and_then(|i| i.entity_class.as_deref()))
    }

    fn fresh(&self, base: String, used: &mut BTreeSet<String>) -> String {
        let mut name = base.clone();
        let mut i = 2;
        while self.taken.contains(&name) || used.contains(&name) {
            name = format!("{base}_{i}");
            i += 1;
        }
        used.insert(name.clone());
        name
    }

    fn emit(&self, out: &mut Outcome, inst: PatternInstance) -> bool {
        if self.hints.suppressed(inst.kind, &inst.main_table) {
            out.note(&inst.main_table, format!("{} suppressed by hint", inst.kind));
            return false;
        }
        out.note(&inst.main_table, format!("{} matched {}", inst.kind, describe(&inst)));
        out.instances.push(inst);
        true
    }

    /// All detectors over one relation.
    pub fn detect(&self, rel: &RelInfo, used: &mut BTreeSet<String>) -> Outcome {
        let mut out = Outcome::default();
        let ident = rel.identifier();
        if let Some(shape) = self.relationship_shape(rel, &mut out) {
            self.emit_relationship(rel, shape, &mut out, used);
            return out;
        }
        let hierarchy = match &ident {
            Some((k, d)) if !rel.borrowed_identity => self.hierarchy(rel, k, *d, &mut out),
            _ => Vec::new(),
        };
        let Some((ident, ident_declared)) = ident else {
            out.note(&rel.name, "no primary key and no discovered key; no entity pattern");
            return out;
        };
        let is_child = !hierarchy.is_empty();
        let aligned_fk = hierarchy
            .iter()
            .find(|h| matches!(h.kind, PatternKind::SHa | PatternKind::DHa))
            .and_then(|h| h.binding(roles::U_F).cloned());
        for h in hierarchy {
            self.emit(&mut out, h);
        }

        // Merged references.
        for fk in &rel.fks {
            if !fk.source.is_disjoint(&ident) {
                continue;
            }
            if aligned_fk.as_ref().is_some_and(|u| u.same_set(&fk.source)) {
                continue;
            }
            let Some(tgt) = self.info(&fk.target_table) else { continue };
            let aligned = !tgt.is_identity(&fk.target);
            if aligned && fk.target_table == rel.name {
                out.note(&rel.name, format!("reference {} targets a non-identifier of the table itself; skipped", fk.source));
                continue;
            }
            let mut inst = PatternInstance::new(kind(PatternKind::SRm, fk.declared && ident_declared), &rel.name, provenance(fk.declared && ident_declared))
                .bind(roles::K_E, ident.clone())
                .bind(roles::K_EF, fk.source.clone())
                .table("E", &rel.name)
                .table("F", &fk.target_table);
            if aligned {
                inst.modifiers.insert(Modifier::IdentifierAlignment);
            }
            self.emit(&mut out, inst);
        }

        // Data-driven splits of denormalized tables.
        let mut moved = AttributeSet::empty();
        for inst in self.denormalized(rel, &ident, &mut out, used) {
            if self.emit(&mut out, inst.clone()) {
                moved = union(&[&moved, &inst.bindings[roles::K_F], &inst.bindings[roles::A_F]]);
            }
        }

        if !is_child {
            if self.enumerate {
                moved = AttributeSet::empty();
            }
            let a = rel.rest(&[&ident, &moved]);
            let k = kind(PatternKind::SE, ident_declared);
            let inst = PatternInstance::new(k, &rel.name, provenance(ident_declared))
                .bind(roles::K, ident.clone())
                .bind(roles::A, a);
            self.emit(&mut out, inst);
        }

        for inst in self.clustering(rel, Some(&ident), None, &mut out, used) {
            self.emit(&mut out, inst);
        }
        out
    }

    fn relationship_shape(&self, rel: &RelInfo, out: &mut Outcome) -> Option<Shape> {
        let (key, key_declared) = rel.identifier()?;
        let mut fks: Vec<&ForeignKey> = rel.fks.iter().filter(|f| self.info(&f.target_table).is_some()).collect();
        fks.sort_by_key(|f| rel.first_pos(&f.source));
        let role = |f: &ForeignKey| -> Option<Role> {
            let tgt = self.info(&f.target_table)?;
            let aligned = !tgt.is_identity(&f.target);
            if aligned && f.target_table == rel.name {
                return None;
            }
            Some(Role { fk: f.clone(), aligned })
        };
        if fks.len() == 2 && fks[0].source.is_disjoint(&fks[1].source) {
            let all = union(&[&fks[0].source, &fks[1].source]);
            let covers = all.same_set(&AttributeSet(rel.attrs.clone()));
            if covers && (key.same_set(&all) || key.same_set(&fks[0].source) || key.same_set(&fks[1].source)) {
                let roles: Option<Vec<Role>> = fks.iter().map(|f| role(f)).collect();
                match roles {
                    Some(roles) => return Some(Shape::Binary { key, key_declared, roles }),
                    None => out.note(&rel.name, "binary relationship needs a self-join alignment; skipped"),
                }
            }
        }
        let identifying: Vec<&ForeignKey> = fks.iter().copied().filter(|f| f.source.is_subset_of(&key)).collect();
        let disjoint = identifying
            .iter()
            .enumerate()
            .all(|(i, f)| identifying[i + 1..].iter().all(|g| f.source.is_disjoint(&g.source)));
        let covered: Vec<&AttributeSet> = identifying.iter().map(|f| &f.source).collect();
        if identifying.len() < 2 || !disjoint || !union(&covered).same_set(&key) {
            return None;
        }
        let mut members: Vec<&ForeignKey> = identifying.clone();
        for f in fks.iter().copied().filter(|f| f.source.is_disjoint(&key)) {
            if members.iter().all(|g| g.source.is_disjoint(&f.source)) {
                members.push(f);
            }
        }
        members.sort_by_key(|f| rel.first_pos(&f.source));
        let sources: Vec<&AttributeSet> = members.iter().map(|f| &f.source).collect();
        let attrs = rel.rest(&sources);
        if members.len() < 3 && attrs.is_empty() {
            return None;
        }
        let roles: Option<Vec<Role>> = members.iter().map(|f| role(f)).collect();
        match roles {
            Some(roles) => Some(Shape::Reified { key, key_declared, roles, attrs }),
            None => {
                out.note(&rel.name, "reified relationship needs a self-join alignment; skipped");
                None
            }
        }
    }

    fn emit_relationship(&self, rel: &RelInfo, shape: Shape, out: &mut Outcome, used: &mut BTreeSet<String>) {
        match shape {
            Shape::Binary { key, key_declared, roles } => {
                let declared = key_declared && roles.iter().all(|r| r.fk.declared);
                let aligned = roles.iter().any(|r| r.aligned);
                let base = if aligned { PatternKind::SRa } else { PatternKind::SR };
                let mut inst = PatternInstance::new(kind(base, declared), &rel.name, provenance(declared));
                for (i, r) in roles.iter().enumerate() {
                    inst = inst
                        .bind(roles::participant(i), r.fk.source.clone())
                        .table(roles::participant_letter(i).to_string(), &r.fk.target_table);
                    if key.same_set(&r.fk.source) && roles.len() == 2 {
                        inst.details.insert(format!("card.{}", roles::participant(i)), "(_,1)".into());
                    }
                }
                if aligned {
                    inst.modifiers.insert(Modifier::IdentifierAlignment);
                }
                let dh01 = if aligned { Vec::new() } else { self.optional_participation(rel, &roles, used) };
                let mut replaced = false;
                for d in dh01 {
                    replaced |= self.emit(out, d);
                }
                if !replaced || self.enumerate {
                    self.emit(out, inst);
                }
                for c in self.clustering(rel, None, Some(&roles), out, used) {
                    self.emit(out, c);
                }
            }
            Shape::Reified { key, key_declared, roles, attrs } => {
                let declared = key_declared && roles.iter().all(|r| r.fk.declared);
                let mut inst = PatternInstance::new(kind(PatternKind::SRR, declared), &rel.name, provenance(declared))
                    .bind(roles::K_R, key)
                    .bind(roles::A_R, attrs);
                for (i, r) in roles.iter().enumerate() {
                    inst = inst
                        .bind(roles::participant(i), r.fk.source.clone())
                        .table(roles::participant_letter(i).to_string(), &r.fk.target_table);
                }
                if roles.iter().any(|r| r.aligned) {
                    inst.modifiers.insert(Modifier::IdentifierAlignment);
                }
                self.emit(out, inst);
            }
        }
    }

    fn hierarchy(&self, rel: &RelInfo, ident: &AttributeSet, ident_declared: bool, out: &mut Outcome) -> Vec<PatternInstance> {
        let mut found = Vec::new();
        for fk in rel.fks.iter().filter(|f| f.source.same_set(ident) && f.target_table != rel.name) {
            let Some(tgt) = self.info(&fk.target_table) else { continue };
            if !tgt.is_identity(&fk.target) {
                continue;
            }
            let declared = fk.declared && ident_declared;
            found.push(
                PatternInstance::new(kind(PatternKind::SH, declared), &rel.name, provenance(declared))
                    .bind(roles::K_FE, fk.source.clone())
                    .bind(roles::A_F, rel.rest(&[ident]))
                    .table("E", &fk.target_table)
                    .table("F", &rel.name),
            );
        }
        if !found.is_empty() {
            return found;
        }
        for fk in rel.fks.iter().filter(|f| f.target_table != rel.name) {
            let Some(tgt) = self.info(&fk.target_table) else { continue };
            if !tgt.is_key(&fk.target) || !rel.is_declared_key(&fk.source) {
                continue;
            }
            let source_is_id = fk.source.same_set(ident);
            let target_is_id = tgt.is_identity(&fk.target);
            let subcase = match (source_is_id, target_is_id) {
                (true, true) => continue,
                (false, true) => 1,
                (true, false) => 2,
                (false, false) => 3,
            };
            let declared = fk.declared && tgt.is_declared_key(&fk.target) && ident_declared;
            let mut inst = PatternInstance::new(kind(PatternKind::SHa, declared), &rel.name, provenance(declared))
                .bind(roles::K_F, ident.clone())
                .bind(roles::U_F, fk.source.clone())
                .bind(roles::A_F, rel.rest(&[ident, &fk.source]))
                .table("E", &fk.target_table)
                .table("F", &rel.name);
            inst.modifiers.insert(Modifier::IdentifierAlignment);
            inst.details.insert("subcase".into(), subcase.to_string());
            inst.emitted_views.push(ViewDef {
                name: format!("v_{}_aligned", rel.name),
                expr: project_bare(&rel.name, &rel.attrs),
                columns: rel.attrs.clone(),
                primary_key: Some(fk.source.clone()),
                declared_keys: vec![ident.clone()],
                foreign_keys: vec![ForeignKey { declared, ..fk.clone() }],
                discovered: !declared,
                cascade: false,
                entity_class: Some(self.class(&rel.name)),
                template_owner: Some(fk.target_table.clone()),
            });
            return vec![inst];
        }
        let mut inds: Vec<_> = rel.const_inds.iter().filter(|d| d.source_attrs().same_set(ident)).collect();
        inds.sort_by_key(|d| (!d.declared, d.target_table.clone(), d.source_projection.clone()));
        if !self.enumerate {
            inds.truncate(1);
        }
        for d in inds {
            if self.info(&d.target_table).and_then(|t| t.identifier()).is_none() {
                out.note(&rel.name, format!("constant inclusion into `{}` has no parent identifier", d.target_table));
                continue;
            }
            let declared = d.declared && ident_declared;
            let mut inst = PatternInstance::new(kind(PatternKind::SHaa, declared), &rel.name, provenance(declared))
                .bind(roles::K_F, d.source_attrs())
                .bind(roles::A_F, rel.rest(&[ident]))
                .table("E", &d.target_table)
                .table("F", &rel.name);
            inst.constants = d.constants().map(|(a, c)| (a.to_string(), c.to_string())).collect();
            inst.modifiers.insert(Modifier::ConstantAlignment);
            found.push(inst);
        }
        found
    }

    fn fds_of(&self, rel: &str) -> Vec<(AttributeSet, AttributeSet)> {
        self.constraints
            .map(|c| {
                c.fds
                    .iter()
                    .filter(|f| f.table == rel)
                    .map(|f| (f.determinant.clone(), f.dependent.clone()))
                    .collect()
            })
            .unwrap_or_default()
    }

    fn null_free(&self, rel: &str, attrs: &AttributeSet) -> bool {
        let Some(d) = self.data.get(rel) else { return false };
        let idx: Vec<usize> = attrs.iter().filter_map(|a| d.index(a)).collect();
        idx.len() == attrs.len() && d.rows.iter().all(|r| idx.iter().all(|&i| r[i].is_some()))
    }

    /// Common hinted owner of every attribute in `attrs`.
    fn owner_of(&self, rel: &str, attrs: &AttributeSet) -> Option<String> {
        let owners: BTreeSet<&str> = attrs.iter().filter_map(|a| self.hints.owner(rel, a)).collect();
        (owners.len() == 1 && attrs.iter().all(|a| self.hints.owner(rel, a).is_some()))
            .then(|| owners.into_iter().next().unwrap_or_default().to_string())
    }

    fn denormalized(&self, rel: &RelInfo, ident: &AttributeSet, out: &mut Outcome, used: &mut BTreeSet<String>) -> Vec<PatternInstance> {
        if !rel.has_data() {
            return Vec::new();
        }
        let fds = self.fds_of(&rel.name);
        let closure = |x: &AttributeSet| -> AttributeSet {
            let mut set: Vec<String> = x.0.clone();
            loop {
                let before = set.len();
                for (lhs, rhs) in &fds {
                    if lhs.iter().all(|a| set.contains(a)) {
                        for a in rhs.iter() {
                            if !set.contains(a) {
                                set.push(a.clone());
                            }
                        }
                    }
                }
                if set.len() == before {
                    break;
                }
            }
            AttributeSet(set)
        };
        // Candidate determinants with their full closures.
        let mut groups: Vec<(AttributeSet, AttributeSet)> = Vec::new();
        for (x, _) in &fds {
            if x.is_empty() || rel.is_key(x) || x.same_set(ident) || !self.null_free(&rel.name, x) {
                continue;
            }
            let full = closure(x);
            if ident.is_subset_of(&full) {
                continue;
            }
            groups.push((x.clone(), full));
        }
        groups.sort_by_key(|(x, _)| (x.len(), x.sorted()));
        let mut kept: Vec<(AttributeSet, AttributeSet)> = Vec::new();
        for (x, full) in groups {
            if kept.iter().any(|(_, f)| f.same_set(&full)) {
                continue;
            }
            kept.push((x, full));
        }
        let maximal: Vec<(AttributeSet, AttributeSet)> = kept
            .iter()
            .filter(|(x, full)| {
                !kept
                    .iter()
                    .any(|(y, fy)| !fy.same_set(full) && x.is_subset_of(fy) && !y.is_subset_of(full))
            })
            .cloned()
            .collect();
        let mut splits: Vec<(AttributeSet, Vec<String>, Option<String>)> = maximal
            .iter()
            .map(|(x, full)| {
                let af = full.iter().filter(|a| !x.contains(a) && !ident.contains(a)).cloned().collect();
                (x.clone(), af, self.owner_of(&rel.name, x))
            })
            .collect();
        // Attributes claimed by several determinants stay with the entity
        // unless a hint names exactly one claimant.
        let claims: BTreeMap<String, Vec<usize>> = splits.iter().enumerate().fold(BTreeMap::new(), |mut m, (i, (_, af, _))| {
            for a in af {
                m.entry(a.clone()).or_insert_with(Vec::new).push(i);
            }
            m
        });
        for (a, who) in claims.iter().filter(|(_, w)| w.len() > 1) {
            let hinted = self.hints.owner(&rel.name, a);
            let winners: Vec<usize> = who
                .iter()
                .copied()
                .filter(|&i| hinted.is_some() && splits[i].2.as_deref() == hinted)
                .collect();
            for &i in who {
                if winners.len() != 1 || winners[0] != i {
                    splits[i].1.retain(|b| b != a);
                }
            }
            if winners.len() != 1 {
                out.note(&rel.name, format!("attribute {a} is determined by several candidates; kept with the entity"));
            }
        }
        let mut found = Vec::new();
        for (x, af, owner) in splits {
            if af.is_empty() {
                out.note(&rel.name, format!("dependency on {x} leaves nothing to move; no DR1Nm"));
                continue;
            }
            let class = owner.unwrap_or_else(|| default_class_for(&x));
            found.push(self.split_instance(PatternKind::DR1Nm, rel, ident, &x, AttributeSet(af), class, used));
        }
        // One-to-one merges: an additional key owned by another concept.
        for (k, _) in &rel.keys {
            if !k.is_disjoint(ident) || !self.null_free(&rel.name, k) {
                continue;
            }
            let owner = self.owner_of(&rel.name, k);
            if owner.is_none() && !self.enumerate {
                out.note(&rel.name, format!("key {k} has no ownership hint; no DR11m"));
                continue;
            }
            let af: AttributeSet = rel
                .attrs
                .iter()
                .filter(|a| !k.contains(a) && !ident.contains(a))
                .filter(|a| owner.is_some() && self.hints.owner(&rel.name, a) == owner.as_deref())
                .cloned()
                .collect();
            let class = owner.unwrap_or_else(|| default_class_for(k));
            found.push(self.split_instance(PatternKind::DR11m, rel, ident, k, af, class, used));
        }
        found
    }

    #[allow(clippy::too_many_arguments)]
    fn split_instance(
        &self,
        kind: PatternKind,
        rel: &RelInfo,
        ident: &AttributeSet,
        kf: &AttributeSet,
        af: AttributeSet,
        class: String,
        used: &mut BTreeSet<String>,
    ) -> PatternInstance {
        let ae = rel.rest(&[ident, kf, &af]);
        let stem = format!("v_{}_{}", rel.name, kf.0.join("_"));
        let vf = self.fresh(stem.clone(), used);
        let ve = self.fresh(format!("{stem}_e"), used);
        let vr = self.fresh(format!("{stem}_r"), used);
        let class = self.hints.entity_labels.get(&vf).cloned().unwrap_or(class);
        let cols = |sets: &[&AttributeSet]| union(sets).0;
        let view = |name: &str, columns: Vec<String>, pk: &AttributeSet, cascade: bool| ViewDef {
            name: name.to_string(),
            expr: project_bare(&rel.name, &columns),
            columns,
            primary_key: Some(pk.clone()),
            declared_keys: Vec::new(),
            foreign_keys: Vec::new(),
            discovered: true,
            cascade,
            entity_class: None,
            template_owner: None,
        };
        let v_e = view(&ve, cols(&[ident, &ae]), ident, false);
        let mut v_r = view(&vr, cols(&[ident, kf]), ident, false);
        v_r.foreign_keys = vec![
            ForeignKey::new(ident.clone(), &ve, ident.clone()).discovered(),
            ForeignKey::new(kf.clone(), &vf, kf.clone()).discovered(),
        ];
        let mut v_f = view(&vf, cols(&[kf, &af]), kf, true);
        v_f.entity_class = Some(class);
        v_f.template_owner = Some(vf.clone());
        let mut inst = PatternInstance::new(kind, &rel.name, Provenance::Discovered)
            .bind(roles::K_E, ident.clone())
            .bind(roles::A_E, ae)
            .bind(roles::K_F, kf.clone())
            .bind(roles::A_F, af)
            .table("E", &rel.name)
            .table("F", &vf);
        inst.emitted_views = vec![v_e, v_r, v_f];
        inst
    }

    fn optional_participation(&self, rel: &RelInfo, roles_: &[Role], used: &mut BTreeSet<String>) -> Vec<PatternInstance> {
        let Some(c) = self.constraints else { return Vec::new() };
        let mut found = Vec::new();
        for (i, r) in roles_.iter().enumerate() {
            let optional = c.optional_participations.iter().any(|p| {
                p.rel_table == rel.name && p.target_table == r.fk.target_table && p.role.same_set(&r.fk.source)
            });
            let Some(e) = self.info(&r.fk.target_table) else { continue };
            if !optional || e.is_view && e.entity_class.is_none() {
                continue;
            }
            let other = &roles_[1 - i];
            let ke = r.fk.target.clone();
            let ae = e.rest(&[&ke]);
            let view_name = self.fresh(format!("v_{}_{}", e.name, rel.name), used);
            let class = self
                .hints
                .entity_labels
                .get(&view_name)
                .cloned()
                .unwrap_or_else(|| format!("{}_{}", self.class(&e.name), self.class(&rel.name)));
            let on = r
                .fk
                .source
                .iter()
                .zip(ke.iter())
                .map(|(s, t)| (ColRef::qualified(&rel.name, s), ColRef::qualified(&e.name, t)))
                .collect();
            let columns = union(&[&ke, &ae]).0;
            let expr = SourceQuery::base(&rel.name)
                .join(SourceQuery::base(&e.name), on)
                .project(columns.iter().map(|c| ProjItem::column(ColRef::qualified(&e.name, c))).collect());
            let mut inst = PatternInstance::new(PatternKind::DH01, &rel.name, Provenance::Discovered)
                .bind("K_RE", r.fk.source.clone())
                .bind("K_RF", other.fk.source.clone())
                .bind(roles::K_E, ke.clone())
                .bind(roles::A_E, ae)
                .table("E", &e.name)
                .table("F", &other.fk.target_table)
                .table("R", &view_name);
            inst.emitted_views.push(ViewDef {
                name: view_name,
                expr,
                columns,
                primary_key: Some(ke),
                declared_keys: Vec::new(),
                foreign_keys: Vec::new(),
                discovered: true,
                cascade: true,
                entity_class: Some(class),
                template_owner: Some(e.name.clone()),
            });
            found.push(inst);
            if !self.enumerate {
                break;
            }
        }
        found
    }

    /// Clustering over entity tables (`ident`) or binary relationships
    /// (`roles_`).
    fn clustering(
        &self,
        rel: &RelInfo,
        ident: Option<&AttributeSet>,
        roles_: Option<&[Role]>,
        out: &mut Outcome,
        used: &mut BTreeSet<String>,
    ) -> Vec<PatternInstance> {
        let Some(c) = self.constraints else { return Vec::new() };
        let partitions: Vec<_> = c.partitions.iter().filter(|p| p.table == rel.name).collect();
        if partitions.is_empty() {
            return Vec::new();
        }
        let class = self.class(&rel.name);
        let matches_rel = |t: &str| t == rel.name || rel.entity_class.as_deref() == Some(t) || t == class && rel.is_view;
        let mut requests: Vec<(AttributeSet, PatternKind, Option<&super::hints::ClusterCandidate>)> = Vec::new();
        for cand in self.hints.cluster_candidates.iter().filter(|c| matches_rel(&c.table)) {
            let flavor = cand.flavor.unwrap_or(if roles_.is_some() {
                PatternKind::CR2O
            } else if cand.invention.is_some() {
                PatternKind::CE2D
            } else if cand.template.is_some() {
                PatternKind::CE2O
            } else {
                PatternKind::CE2C
            });
            requests.push((cand.attrs.clone(), flavor, Some(cand)));
        }
        if self.enumerate {
            for p in &partitions {
                let flavors: &[PatternKind] = if roles_.is_some() {
                    &[PatternKind::CR2O]
                } else {
                    &[PatternKind::CE2C, PatternKind::CE2D, PatternKind::CE2O]
                };
                for &f in flavors {
                    if !requests.iter().any(|(b, k, _)| b.same_set(&p.attrs) && *k == f) {
                        requests.push((p.attrs.clone(), f, None));
                    }
                }
            }
        }
        let mut found = Vec::new();
        for (b, flavor, cand) in requests {
            let Some(p) = partitions.iter().find(|p| p.attrs.same_set(&b)) else {
                out.note(&rel.name, format!("{b} does not partition the rows; no clustering"));
                continue;
            };
            let relationship = flavor == PatternKind::CR2O;
            if relationship != roles_.is_some() {
                out.note(&rel.name, format!("{flavor} does not fit this table"));
                continue;
            }
            let mut inst = PatternInstance::new(flavor, &rel.name, Provenance::Discovered).bind(roles::B, p.attrs.clone());
            match (ident, roles_) {
                (Some(k), _) => inst = inst.bind(roles::K, k.clone()),
                (None, Some(rs)) => {
                    for (i, r) in rs.iter().enumerate() {
                        inst = inst
                            .bind(roles::participant(i), r.fk.source.clone())
                            .table(roles::participant_letter(i).to_string(), &r.fk.target_table);
                    }
                }
                (None, None) => continue,
            }
            inst.partition = Some((*p).clone());
            if let Some(cand) = cand {
                if let Some(prop) = &cand.property {
                    inst.details.insert("property".into(), prop.clone());
                }
                if let Some(t) = &cand.template {
                    inst.details.insert("template".into(), t.clone());
                }
                if flavor == PatternKind::CE2D {
                    inst.invention = cand.invention_rule();
                }
            }
            if flavor == PatternKind::CE2D {
                inst.modifiers.insert(Modifier::ValueInvention);
            }
            let stem = format!("v_{}_{}", rel.name, p.attrs.0.join("_"));
            for (i, v) in p.values.iter().enumerate() {
                let name = self.fresh(format!("{stem}_{}", ident_fragment(&v.join("_"))), used);
                let _ = i;
                let conditions = p
                    .attrs
                    .iter()
                    .zip(v)
                    .map(|(a, x)| Condition::ColConst(ColRef::bare(a.clone()), x.clone()))
                    .collect();
                inst.emitted_views.push(ViewDef {
                    name,
                    expr: SourceQuery::base(&rel.name).select(conditions),
                    columns: rel.attrs.clone(),
                    primary_key: rel.pk.clone(),
                    declared_keys: Vec::new(),
                    foreign_keys: Vec::new(),
                    discovered: true,
                    cascade: false,
                    entity_class: None,
                    template_owner: Some(rel.name.clone()),
                });
            }
            found.push(inst);
        }
        found
    }
}

/// `course_id` → `Course`; other determinants are camel-cased whole.
pub(crate) fn default_class_for(k: &AttributeSet) -> String {
    let joined = k.0.join("_");
    let lower = joined.to_lowercase();
    let stem = ["_id", "_code", "_key", "_no"]
        .iter()
        .find(|s| lower.ends_with(*s) && lower.len() > s.len())
        .map(|s| &joined[..joined.len() - s.len()])
        .unwrap_or(&joined);
    camel_case(stem)
}

pub(crate) fn describe(inst: &PatternInstance) -> String {
    let mut parts: Vec<String> = inst.bindings.iter().map(|(r, a)| format!("{r}={a}")).collect();
    parts.extend(inst.tables.iter().map(|(r, t)| format!("{r}:{t}")));
    parts.extend(inst.constants.iter().map(|(a, c)| format!("{a}='{c}'")));
    if let Some(p) = &inst.partition {
        parts.push(format!("{} values", p.values.len()));
    }
    parts.join(" ")
}
