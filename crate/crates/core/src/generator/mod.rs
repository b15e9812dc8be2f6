//! Mapping assertions and ontology axioms for pattern instances, plus the
//! output writers.

mod emit;
mod identity;

use std::collections::{BTreeMap, BTreeSet};

pub use emit::{emit_conceptual_summary, emit_obda_file, emit_ontology, emit_r2rml, emit_views_sql, summarize, OutputSet};
pub use identity::{map_slots, Identity, Slot, Vocabulary};

use crate::engine::DetectionResult;
use crate::error::{Error, Result};
use crate::model::{
    roles, AttributeSet, ColRef, Condition, ForeignKey, IriTemplate, LiteralTemplate, MappingAssertion, OntologyAxiom,
    PatternInstance, PatternKind, ProjItem, Segment, SourceQuery, TargetAtom,
};
use crate::naming::{ident_fragment, local_name, template_path};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Generated {
    pub assertions: Vec<MappingAssertion>,
    pub axioms: Vec<OntologyAxiom>,
}

enum Item {
    Col { table: String, col: String, alias: String },
    Const { value: String, alias: String },
}

/// A column as (relation, name).
type Col = (String, String);

/// Collects the columns a mapping needs and the joins that alignment adds.
struct SourceBuilder {
    main: String,
    joins: Vec<(String, Vec<(Col, Col)>)>,
    conditions: Vec<(String, String, String)>,
    items: Vec<Item>,
}

impl SourceBuilder {
    fn new(main: &str) -> Self {
        SourceBuilder {
            main: main.to_string(),
            joins: Vec::new(),
            conditions: Vec::new(),
            items: Vec::new(),
        }
    }

    fn taken(&self, alias: &str) -> bool {
        self.items.iter().any(|i| match i {
            Item::Col { alias: a, .. } | Item::Const { alias: a, .. } => a == alias,
        })
    }

    fn col(&mut self, table: &str, col: &str) -> String {
        for i in &self.items {
            if let Item::Col { table: t, col: c, alias } = i {
                if t == table && c == col {
                    return alias.clone();
                }
            }
        }
        let mut alias = col.to_string();
        if self.taken(&alias) {
            alias = format!("{table}_{col}");
        }
        let stem = alias.clone();
        let mut n = 2;
        while self.taken(&alias) {
            alias = format!("{stem}_{n}");
            n += 1;
        }
        self.items.push(Item::Col {
            table: table.into(),
            col: col.into(),
            alias: alias.clone(),
        });
        alias
    }

    fn constant(&mut self, value: &str, alias: &str) -> String {
        let exists = self
            .items
            .iter()
            .any(|i| matches!(i, Item::Const { value: v, alias: a } if v == value && a == alias));
        if !exists {
            self.items.push(Item::Const {
                value: value.into(),
                alias: alias.into(),
            });
        }
        alias.to_string()
    }

    fn join(&mut self, from: &str, table: &str, pairs: Vec<(String, String)>) {
        if self.joins.iter().any(|(t, _)| t == table) {
            return;
        }
        let on = pairs
            .into_iter()
            .map(|(a, b)| ((from.to_string(), a), (table.to_string(), b)))
            .collect();
        self.joins.push((table.into(), on));
    }

    fn select(&mut self, table: &str, col: &str, value: &str) {
        self.conditions.push((table.into(), col.into(), value.into()));
    }

    fn build(&self) -> SourceQuery {
        let qualified = !self.joins.is_empty();
        let cr = |t: &str, c: &str| {
            if qualified {
                ColRef::qualified(t, c)
            } else {
                ColRef::bare(c)
            }
        };
        let mut q = SourceQuery::base(&self.main);
        for (t, on) in &self.joins {
            q = q.join(
                SourceQuery::base(t),
                on.iter().map(|((t1, c1), (t2, c2))| (cr(t1, c1), cr(t2, c2))).collect(),
            );
        }
        if !self.conditions.is_empty() {
            q = q.select(
                self.conditions
                    .iter()
                    .map(|(t, c, v)| Condition::ColConst(cr(t, c), v.clone()))
                    .collect(),
            );
        }
        q.project(
            self.items
                .iter()
                .map(|i| match i {
                    Item::Col { table, col, alias } if alias == col => ProjItem::column(cr(table, col)),
                    Item::Col { table, col, alias } => ProjItem::aliased(cr(table, col), alias.clone()),
                    Item::Const { value, alias } => ProjItem::constant(value.clone(), alias.clone()),
                })
                .collect(),
        )
    }
}

struct Gen<'v, 'a> {
    v: &'v Vocabulary<'a>,
    inst: &'v PatternInstance,
    out: Generated,
}

impl Gen<'_, '_> {
    fn template(&self, path: &str, placeholders: Vec<String>, owner: &str) -> Result<IriTemplate> {
        let mut segs = vec![Segment::Literal(format!("{path}/"))];
        for (i, p) in placeholders.into_iter().enumerate() {
            if i > 0 {
                segs.push(Segment::Literal("/".into()));
            }
            segs.push(Segment::Placeholder(p));
        }
        IriTemplate::new(self.v.prefix.clone(), segs, owner)
    }

    /// Template for the rows of `table` itself.
    fn own(&self, sb: &mut SourceBuilder, table: &str) -> Result<IriTemplate> {
        let id = self.v.identity(table)?;
        let ph = id
            .slots
            .iter()
            .map(|s| match s {
                Slot::Col(c) => sb.col(table, c),
                Slot::Const { alias, value } => sb.constant(value, alias),
            })
            .collect();
        self.template(&id.path, ph, table)
    }

    /// Template for the rows `fk` points at, joining the target when the
    /// reference does not carry its identifier.
    fn refer(&self, sb: &mut SourceBuilder, from: &str, fk: &ForeignKey) -> Result<IriTemplate> {
        let id = self.v.identity(&fk.target_table)?;
        let direct = id.columns().iter().all(|c| fk.target.contains(c));
        if !direct {
            if fk.target_table == from {
                return Err(Error::MalformedQuery(format!(
                    "reference {from}{} needs a self-join to align identifiers",
                    fk.source
                )));
            }
            sb.join(
                from,
                &fk.target_table,
                fk.source.iter().cloned().zip(fk.target.iter().cloned()).collect(),
            );
        }
        let ph = id
            .slots
            .iter()
            .map(|s| match s {
                Slot::Col(c) if direct => {
                    let i = fk.target.iter().position(|t| t == c).expect("direct reference covers identifier");
                    sb.col(from, &fk.source.0[i])
                }
                Slot::Col(c) => sb.col(&fk.target_table, c),
                Slot::Const { alias, value } => sb.constant(value, alias),
            })
            .collect();
        self.template(&id.path, ph, &fk.target_table)
    }

    fn binding(&self, role: &str) -> Result<&AttributeSet> {
        self.inst.binding(role).ok_or_else(|| Error::IncompleteBindings {
            kind: self.inst.kind.to_string(),
            role: role.to_string(),
        })
    }

    fn table(&self, role: &str) -> Result<&str> {
        self.inst.tables.get(role).map(String::as_str).ok_or_else(|| Error::IncompleteBindings {
            kind: self.inst.kind.to_string(),
            role: role.to_string(),
        })
    }

    fn push(&mut self, sb: &SourceBuilder, targets: Vec<TargetAtom>) {
        let n = self.out.assertions.len() + 1;
        self.out.assertions.push(MappingAssertion {
            id: format!("{}_{}_{n}", self.inst.kind, local_name(&self.inst.main_table)),
            source: sb.build(),
            targets,
        });
    }

    fn data_props(&mut self, sb: &mut SourceBuilder, table: &str, subj: &IriTemplate, class: &str, attrs: &[&AttributeSet]) -> Vec<TargetAtom> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for a in attrs.iter().flat_map(|s| s.iter()) {
            if !seen.insert(a.clone()) {
                continue;
            }
            let d = self.v.name(a);
            out.push(TargetAtom::data_column(&d, subj.clone(), sb.col(table, a)));
            self.out.axioms.push(OntologyAxiom::DataDomain(d, class.to_string()));
        }
        out
    }

    /// Subject and object templates of a binary relationship's roles.
    fn roles(&self, sb: &mut SourceBuilder) -> Result<(IriTemplate, IriTemplate)> {
        let main = &self.inst.main_table;
        let fe = self.v.fk(main, self.binding("K_RE")?, self.table("E")?)?;
        let ff = self.v.fk(main, self.binding("K_RF")?, self.table("F")?)?;
        Ok((self.refer(sb, main, &fe)?, self.refer(sb, main, &ff)?))
    }

    fn relationship_property(&self) -> String {
        self.v.name(self.inst.details.get("property").unwrap_or(&self.inst.main_table))
    }

    fn run(&mut self) -> Result<()> {
        use PatternKind::*;
        if let Some(role) = self.inst.missing_role() {
            return Err(Error::IncompleteBindings {
                kind: self.inst.kind.to_string(),
                role,
            });
        }
        let main = self.inst.main_table.clone();
        let v = self.v;
        match self.inst.kind {
            SE | DE => {
                let mut sb = SourceBuilder::new(&main);
                let subj = self.own(&mut sb, &main)?;
                let class = v.class(&main);
                let mut targets = vec![TargetAtom::class(&class, subj.clone())];
                let (k, a) = (self.binding(roles::K)?.clone(), self.binding(roles::A)?.clone());
                targets.extend(self.data_props(&mut sb, &main, &subj, &class, &[&k, &a]));
                self.push(&sb, targets);
            }
            SR | DR | SRa | DRa => {
                let mut sb = SourceBuilder::new(&main);
                let (s, o) = self.roles(&mut sb)?;
                let p = self.relationship_property();
                self.out.axioms.push(OntologyAxiom::Domain(p.clone(), v.class(self.table("E")?)));
                self.out.axioms.push(OntologyAxiom::Range(p.clone(), v.class(self.table("F")?)));
                self.push(&sb, vec![TargetAtom::object_property(p, s, o)]);
            }
            SRm | DRm => {
                let mut sb = SourceBuilder::new(&main);
                let subj = self.own(&mut sb, &main)?;
                let fk = v.fk(&main, self.binding(roles::K_EF)?, self.table("F")?)?;
                let obj = self.refer(&mut sb, &main, &fk)?;
                let p = v.name(&format!("{}_ref", fk.source.0.join("_")));
                self.out.axioms.push(OntologyAxiom::Domain(p.clone(), v.class(&main)));
                self.out.axioms.push(OntologyAxiom::Range(p.clone(), v.class(&fk.target_table)));
                self.push(&sb, vec![TargetAtom::object_property(p, subj, obj)]);
            }
            SRR | DRR => {
                let mut sb = SourceBuilder::new(&main);
                let subj = self.own(&mut sb, &main)?;
                let class = v.class(&main);
                let mut targets = vec![TargetAtom::class(&class, subj.clone())];
                let (k, a) = (self.binding(roles::K_R)?.clone(), self.binding(roles::A_R)?.clone());
                targets.extend(self.data_props(&mut sb, &main, &subj, &class, &[&k, &a]));
                let mut i = 0;
                while let Some(src) = self.inst.binding(&roles::participant(i)).cloned() {
                    let letter = roles::participant_letter(i).to_string();
                    let fk = v.fk(&main, &src, self.table(&letter)?)?;
                    let obj = self.refer(&mut sb, &main, &fk)?;
                    let p = v.name(&format!("{main}_{}", src.0.join("_")));
                    self.out.axioms.push(OntologyAxiom::Domain(p.clone(), class.clone()));
                    self.out.axioms.push(OntologyAxiom::Range(p.clone(), v.class(&fk.target_table)));
                    targets.push(TargetAtom::object_property(p, subj.clone(), obj));
                    i += 1;
                }
                self.push(&sb, targets);
            }
            SH | DH | SHa | DHa | SHaa | DHaa => {
                let mut sb = SourceBuilder::new(&main);
                let subj = self.own(&mut sb, &main)?;
                let class = v.class(&main);
                self.out.axioms.push(OntologyAxiom::SubClass(class.clone(), v.class(self.table("E")?)));
                let mut targets = vec![TargetAtom::class(&class, subj.clone())];
                let af = self.binding(roles::A_F)?.clone();
                let kf = match self.inst.kind {
                    SHa | DHa => self.binding(roles::K_F)?.clone(),
                    _ => AttributeSet::empty(),
                };
                targets.extend(self.data_props(&mut sb, &main, &subj, &class, &[&kf, &af]));
                self.push(&sb, targets);
            }
            DR1Nm | DR11m => {
                let mut sb = SourceBuilder::new(&main);
                let subj = self.own(&mut sb, &main)?;
                let vf = self.table("F")?.to_string();
                let id = v.identity(&vf)?;
                let ph = id
                    .slots
                    .iter()
                    .map(|s| match s {
                        Slot::Col(c) => sb.col(&main, c),
                        Slot::Const { alias, value } => sb.constant(value, alias),
                    })
                    .collect();
                let obj = self.template(&id.path, ph, &vf)?;
                let cf = v.class(&vf);
                let mut targets = vec![TargetAtom::class(&cf, obj.clone())];
                let (kf, af) = (self.binding(roles::K_F)?.clone(), self.binding(roles::A_F)?.clone());
                targets.extend(self.data_props(&mut sb, &main, &obj, &cf, &[&kf, &af]));
                let p = v.name(&format!("{}_ref", kf.0.join("_")));
                self.out.axioms.push(OntologyAxiom::Domain(p.clone(), v.class(&main)));
                self.out.axioms.push(OntologyAxiom::Range(p.clone(), cf.clone()));
                targets.push(TargetAtom::object_property(p, subj, obj));
                self.push(&sb, targets);
            }
            DH01 => {
                let mut sb = SourceBuilder::new(&main);
                let (s, o) = self.roles(&mut sb)?;
                let p = self.relationship_property();
                self.push(&sb, vec![TargetAtom::object_property(&p, s, o)]);

                let e = self.table("E")?.to_string();
                let cer = v.class(self.table("R")?);
                let kre = self.binding("K_RE")?.clone();
                let fe = v.fk(&main, &kre, &e)?;
                let mut sb = SourceBuilder::new(&main);
                sb.join(&main, &e, fe.source.iter().cloned().zip(fe.target.iter().cloned()).collect());
                let subj = self.refer(&mut sb, &main, &fe)?;
                let mut targets = vec![TargetAtom::class(&cer, subj.clone())];
                for (s, t) in fe.source.iter().zip(fe.target.iter()) {
                    targets.push(TargetAtom::data_column(v.name(t), subj.clone(), sb.col(&main, s)));
                }
                for a in self.binding(roles::A_E)?.clone().iter() {
                    targets.push(TargetAtom::data_column(v.name(a), subj.clone(), sb.col(&e, a)));
                }
                self.out.axioms.push(OntologyAxiom::SubClass(cer.clone(), v.class(&e)));
                self.out.axioms.push(OntologyAxiom::Domain(p.clone(), cer));
                self.out.axioms.push(OntologyAxiom::Range(p, v.class(self.table("F")?)));
                self.push(&sb, targets);
            }
            CE2C | CE2D | CE2O | CR2O => self.clusters(&main)?,
        }
        Ok(())
    }

    fn clusters(&mut self, main: &str) -> Result<()> {
        use PatternKind::*;
        let v = self.v;
        let b = self.binding(roles::B)?.clone();
        let part = self.inst.partition.clone().ok_or_else(|| Error::IncompleteBindings {
            kind: self.inst.kind.to_string(),
            role: "partition".into(),
        })?;
        let class_local = v.class_local(main);
        let prop = self
            .inst
            .details
            .get("property")
            .cloned()
            .unwrap_or_else(|| format!("has_{}", b.0.join("_")));
        for (i, value) in part.values.iter().enumerate() {
            let mut sb = SourceBuilder::new(main);
            for (a, x) in b.iter().zip(value) {
                sb.select(main, a, x);
            }
            let frag = ident_fragment(&value.join("_"));
            match self.inst.kind {
                CE2C => {
                    let subj = self.own(&mut sb, main)?;
                    let label = self
                        .inst
                        .emitted_views
                        .get(i)
                        .and_then(|view| v.hints.entity_labels.get(&view.name).cloned())
                        .unwrap_or_else(|| format!("{class_local}_{frag}"));
                    let sub = v.name(&label);
                    self.out.axioms.push(OntologyAxiom::SubClass(sub.clone(), v.class(main)));
                    self.push(&sb, vec![TargetAtom::class(sub, subj)]);
                }
                CE2D => {
                    let subj = self.own(&mut sb, main)?;
                    let text = self
                        .inst
                        .invention
                        .as_ref()
                        .and_then(|r| r.apply(value).map(str::to_string))
                        .unwrap_or_else(|| value.join(" "));
                    let mut lit = LiteralTemplate::constant(text);
                    lit.invention = self.inst.invention.clone();
                    let d = v.name(&prop);
                    self.out.axioms.push(OntologyAxiom::DataDomain(d.clone(), v.class(main)));
                    self.push(&sb, vec![TargetAtom::data_literal(d, subj, lit)]);
                }
                CE2O => {
                    let subj = self.own(&mut sb, main)?;
                    let obj = match self.inst.details.get("template") {
                        Some(t) => {
                            let mut t = IriTemplate::parse(t, main).map_err(Error::MalformedQuery)?;
                            for seg in &mut t.segments {
                                if let Segment::Placeholder(p) = seg {
                                    *p = sb.col(main, p);
                                }
                            }
                            t
                        }
                        None => {
                            let ph = b.iter().map(|a| sb.col(main, a)).collect();
                            self.template(&template_path(&b.0.join("_")), ph, main)?
                        }
                    };
                    let p = v.name(&prop);
                    self.out.axioms.push(OntologyAxiom::Domain(p.clone(), v.class(main)));
                    self.push(&sb, vec![TargetAtom::object_property(p, subj, obj)]);
                }
                _ => {
                    let (s, o) = self.roles(&mut sb)?;
                    let parent = self.relationship_property();
                    let p = format!("{parent}_{frag}");
                    self.out.axioms.push(OntologyAxiom::SubObjectProperty(p.clone(), parent));
                    self.push(&sb, vec![TargetAtom::object_property(p, s, o)]);
                }
            }
        }
        Ok(())
    }
}

/// Mapping assertions and axioms for one instance.
pub fn generate(inst: &PatternInstance, vocab: &Vocabulary<'_>) -> Result<Generated> {
    let mut g = Gen {
        v: vocab,
        inst,
        out: Generated::default(),
    };
    g.run()?;
    let mut axioms: Vec<OntologyAxiom> = g.out.axioms.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    axioms.retain(OntologyAxiom::is_well_formed);
    Ok(Generated {
        assertions: g.out.assertions,
        axioms,
    })
}

/// Generates every detected instance in order. Mapping ids are numbered per
/// kind and main table; axioms are deduplicated and sorted.
pub fn generate_all(result: &DetectionResult, vocab: &Vocabulary<'_>) -> Result<Generated> {
    let mut counters: BTreeMap<(PatternKind, String), usize> = BTreeMap::new();
    let mut assertions = Vec::new();
    let mut axioms = BTreeSet::new();
    for inst in &result.instances {
        let g = generate(inst, vocab)?;
        for mut a in g.assertions {
            let n = counters.entry((inst.kind, inst.main_table.clone())).or_insert(0);
            *n += 1;
            a.id = format!("{}_{}_{n}", inst.kind, local_name(&inst.main_table));
            assertions.push(a);
        }
        axioms.extend(g.axioms);
    }
    Ok(Generated {
        assertions,
        axioms: axioms.into_iter().collect(),
    })
}
