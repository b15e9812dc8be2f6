//! Writers for the generated artefacts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{generate_all, Vocabulary};
use crate::engine::{DetectionResult, HintsDocument};
use crate::error::{Error, Result};
use crate::ingest::{emit_obda, render_sql};
use crate::model::report::{EntitySummary, Participant, RelationshipSummary};
use crate::model::{
    roles, AtomKind, ConceptualSummary, IriTemplate, MappingAssertion, ObjectTerm, OntologyAxiom, PatternKind,
    RelationalSchema, Segment,
};
use crate::naming::ident_fragment;

pub fn emit_obda_file(assertions: &[MappingAssertion], prefixes: &BTreeMap<String, String>) -> Result<String> {
    emit_obda(assertions, prefixes)
}

fn turtle_string(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn prefix_lines(prefixes: &BTreeMap<String, String>, extra: &[(&str, &str)]) -> String {
    let mut out = String::new();
    for (p, iri) in prefixes {
        let _ = writeln!(out, "@prefix {p}: <{iri}> .");
    }
    for (p, iri) in extra {
        if !prefixes.contains_key(*p) {
            let _ = writeln!(out, "@prefix {p}: <{iri}> .");
        }
    }
    out
}

const RR: &str = "http://www.w3.org/ns/r2rml#";
const OWL: &str = "http://www.w3.org/2002/07/owl#";
const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";

fn term_map(t: &IriTemplate, prefixes: &BTreeMap<String, String>) -> String {
    format!("rr:template {}", turtle_string(&t.expanded(prefixes)))
}

/// R2RML rendering: one TriplesMap per subject template of each assertion,
/// named after the mapping id (`<#id>`, or `<#id_2>`… for further subjects).
pub fn emit_r2rml(assertions: &[MappingAssertion], prefixes: &BTreeMap<String, String>) -> Result<String> {
    let mut out = prefix_lines(prefixes, &[("rr", RR)]);
    for a in assertions {
        let sql = render_sql(&a.source)?;
        let mut groups: Vec<(&IriTemplate, Vec<_>)> = Vec::new();
        for t in &a.targets {
            match groups.iter_mut().find(|(s, _)| **s == t.subject) {
                Some((_, v)) => v.push(t),
                None => groups.push((&t.subject, vec![t])),
            }
        }
        for (i, (subject, atoms)) in groups.iter().enumerate() {
            let name = if i == 0 { a.id.clone() } else { format!("{}_{}", a.id, i + 1) };
            let _ = writeln!(out, "\n<#{name}> a rr:TriplesMap ;");
            let _ = writeln!(out, "    rr:logicalTable [ rr:sqlQuery {} ] ;", turtle_string(&sql));
            let classes: Vec<&str> = atoms
                .iter()
                .filter(|t| t.kind == AtomKind::Class)
                .map(|t| t.predicate.as_str())
                .collect();
            let mut subj = format!("    rr:subjectMap [ {}", term_map(subject, prefixes));
            for c in &classes {
                let _ = write!(subj, " ; rr:class {c}");
            }
            subj.push_str(" ]");
            let poms: Vec<String> = atoms
                .iter()
                .filter_map(|t| {
                    let obj = match t.object.as_ref()? {
                        ObjectTerm::Iri(o) => term_map(o, prefixes),
                        ObjectTerm::Column(c) => format!("rr:column {}", turtle_string(c)),
                        ObjectTerm::Literal(l) => {
                            let mut s = match l.segments.as_slice() {
                                [Segment::Placeholder(p)] => format!("rr:column {}", turtle_string(p)),
                                segs if segs.iter().all(|s| matches!(s, Segment::Literal(_))) => {
                                    format!("rr:constant {}", turtle_string(&l.body()))
                                }
                                _ => format!("rr:template {} ; rr:termType rr:Literal", turtle_string(&l.body())),
                            };
                            if let Some(tag) = &l.language {
                                let _ = write!(s, " ; rr:language {}", turtle_string(tag));
                            }
                            s
                        }
                    };
                    Some(format!("    rr:predicateObjectMap [ rr:predicate {} ; rr:objectMap [ {obj} ] ]", t.predicate))
                })
                .collect();
            out.push_str(&subj);
            for p in poms {
                out.push_str(" ;\n");
                out.push_str(&p);
            }
            out.push_str(" .\n");
        }
    }
    Ok(out)
}

/// OWL 2 QL ontology in Turtle: declarations, then axioms, both sorted.
pub fn emit_ontology(axioms: &[OntologyAxiom], prefixes: &BTreeMap<String, String>) -> String {
    let mut classes = BTreeSet::new();
    let mut objects = BTreeSet::new();
    let mut datas = BTreeSet::new();
    let mut lines = BTreeSet::new();
    for ax in axioms {
        let (a, b) = ax.operands();
        let (pred, s, o) = match ax {
            OntologyAxiom::SubClass(..) => {
                classes.extend([a, b]);
                ("rdfs:subClassOf", a, b)
            }
            OntologyAxiom::Domain(..) => {
                objects.insert(a);
                classes.insert(b);
                ("rdfs:domain", a, b)
            }
            OntologyAxiom::Range(..) => {
                objects.insert(a);
                classes.insert(b);
                ("rdfs:range", a, b)
            }
            OntologyAxiom::DataDomain(..) => {
                datas.insert(a);
                classes.insert(b);
                ("rdfs:domain", a, b)
            }
            OntologyAxiom::SubObjectProperty(..) => {
                objects.extend([a, b]);
                ("rdfs:subPropertyOf", a, b)
            }
        };
        lines.insert(format!("{s} {pred} {o} ."));
    }
    let mut out = prefix_lines(prefixes, &[("owl", OWL), ("rdfs", RDFS)]);
    out.push('\n');
    for c in classes {
        let _ = writeln!(out, "{c} a owl:Class .");
    }
    for p in objects {
        let _ = writeln!(out, "{p} a owl:ObjectProperty .");
    }
    for d in datas {
        let _ = writeln!(out, "{d} a owl:DatatypeProperty .");
    }
    out.push('\n');
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}

/// `CREATE VIEW` statements for every emitted view.
pub fn emit_views_sql(schema: &RelationalSchema) -> Result<String> {
    let mut out = String::new();
    for v in &schema.views {
        let sql = render_sql(&v.expr)?;
        let sql = match sql.strip_prefix("SELECT ") {
            Some(rest) if !rest.starts_with("DISTINCT") => format!("SELECT DISTINCT {rest}"),
            _ => sql,
        };
        let _ = writeln!(out, "CREATE VIEW \"{}\" AS {sql};", v.name.replace('"', "\"\""));
    }
    Ok(out)
}

fn attrs(sets: &[Option<&crate::model::AttributeSet>]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for a in sets.iter().flatten().flat_map(|s| s.iter()) {
        if !out.contains(a) {
            out.push(a.clone());
        }
    }
    out
}

/// Entities, relationships and ISA links implied by the detected instances.
pub fn summarize(result: &DetectionResult, vocab: &Vocabulary<'_>) -> ConceptualSummary {
    use PatternKind::*;
    let mut s = ConceptualSummary::default();
    let part = |role: &str, table: &str, card: &str| Participant {
        role: role.to_string(),
        entity: vocab.class_local(table),
        cardinality: card.to_string(),
    };
    for inst in &result.instances {
        let main = inst.main_table.as_str();
        let b = |r: &str| inst.binding(r);
        let t = |r: &str| inst.tables.get(r).map(String::as_str).unwrap_or_default();
        let card = |r: &str| inst.details.get(&format!("card.{r}")).cloned().unwrap_or_else(|| "(_,N)".into());
        match inst.kind {
            SE | DE => {
                s.entities.insert(EntitySummary {
                    name: vocab.class_local(main),
                    attributes: attrs(&[b(roles::K), b(roles::A)]),
                    identifier: attrs(&[b(roles::K)]),
                    source: main.into(),
                });
            }
            SH | DH | SHa | DHa | SHaa | DHaa => {
                let id = vocab.identity(main).map(|i| i.columns().0).unwrap_or_default();
                s.entities.insert(EntitySummary {
                    name: vocab.class_local(main),
                    attributes: attrs(&[b(roles::K_FE), b(roles::U_F), b(roles::K_F), b(roles::A_F)]),
                    identifier: id,
                    source: main.into(),
                });
                s.isa_links.insert((vocab.class_local(main), vocab.class_local(t("E"))));
            }
            SR | DR | SRa | DRa => {
                s.relationships.insert(RelationshipSummary {
                    name: inst.details.get("property").cloned().unwrap_or_else(|| main.into()),
                    participants: vec![part("K_RE", t("E"), &card("K_RE")), part("K_RF", t("F"), &card("K_RF"))],
                    attributes: Vec::new(),
                    reified: false,
                    source: main.into(),
                });
            }
            SRm | DRm => {
                s.relationships.insert(RelationshipSummary {
                    name: format!("{}_ref", b(roles::K_EF).map(|k| k.0.join("_")).unwrap_or_default()),
                    participants: vec![part(roles::K_E, t("E"), "(_,1)"), part(roles::K_EF, t("F"), "(_,N)")],
                    attributes: Vec::new(),
                    reified: false,
                    source: main.into(),
                });
            }
            SRR | DRR => {
                let mut participants = Vec::new();
                let mut i = 0;
                while inst.binding(&roles::participant(i)).is_some() {
                    let letter = roles::participant_letter(i).to_string();
                    participants.push(part(&roles::participant(i), t(&letter), "(_,N)"));
                    i += 1;
                }
                s.relationships.insert(RelationshipSummary {
                    name: vocab.class_local(main),
                    participants,
                    attributes: attrs(&[b(roles::A_R)]),
                    reified: true,
                    source: main.into(),
                });
            }
            DR1Nm | DR11m => {
                let f = t("F");
                s.entities.insert(EntitySummary {
                    name: vocab.class_local(f),
                    attributes: attrs(&[b(roles::K_F), b(roles::A_F)]),
                    identifier: attrs(&[b(roles::K_F)]),
                    source: main.into(),
                });
                let fcard = if inst.kind == DR11m { "(_,1)" } else { "(_,N)" };
                s.relationships.insert(RelationshipSummary {
                    name: format!("{}_ref", b(roles::K_F).map(|k| k.0.join("_")).unwrap_or_default()),
                    participants: vec![part(roles::K_E, main, "(_,1)"), part(roles::K_F, f, fcard)],
                    attributes: Vec::new(),
                    reified: false,
                    source: main.into(),
                });
            }
            DH01 => {
                let sub = vocab.class_local(t("R"));
                s.isa_links.insert((sub.clone(), vocab.class_local(t("E"))));
                s.relationships.insert(RelationshipSummary {
                    name: main.into(),
                    participants: vec![
                        Participant {
                            role: "K_RE".into(),
                            entity: sub,
                            cardinality: "(1,N)".into(),
                        },
                        part("K_RF", t("F"), "(_,N)"),
                    ],
                    attributes: Vec::new(),
                    reified: false,
                    source: main.into(),
                });
            }
            CE2C => {
                if let Some(p) = &inst.partition {
                    let parent = vocab.class_local(main);
                    for (i, v) in p.values.iter().enumerate() {
                        let label = inst
                            .emitted_views
                            .get(i)
                            .and_then(|view| vocab.hints.entity_labels.get(&view.name).cloned())
                            .unwrap_or_else(|| format!("{parent}_{}", ident_fragment(&v.join("_"))));
                        s.isa_links.insert((label, parent.clone()));
                    }
                }
            }
            CE2D | CE2O | CR2O => {}
        }
    }
    s
}

pub fn emit_conceptual_summary(s: &ConceptualSummary) -> String {
    let mut out = String::new();
    for e in &s.entities {
        let attrs: Vec<String> = e
            .attributes
            .iter()
            .map(|a| if e.identifier.contains(a) { format!("{a}*") } else { a.clone() })
            .collect();
        let _ = writeln!(out, "entity {} ({}) from {}", e.name, attrs.join(", "), e.source);
    }
    for r in &s.relationships {
        let parts: Vec<String> = r.participants.iter().map(|p| format!("{} {}", p.entity, p.cardinality)).collect();
        let head = if r.reified { "reified relationship" } else { "relationship" };
        let attrs = if r.attributes.is_empty() { String::new() } else { format!(" [{}]", r.attributes.join(", ")) };
        let _ = writeln!(out, "{head} {}{attrs}: {} from {}", r.name, parts.join(" -- "), r.source);
    }
    for (sub, sup) in &s.isa_links {
        let _ = writeln!(out, "isa {sub} -> {sup}");
    }
    out
}

/// Every artefact `bootstrap` writes.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputSet {
    pub obda: String,
    pub r2rml: String,
    pub ontology: String,
    pub conceptual: String,
    pub views_sql: String,
    pub log: String,
}

impl OutputSet {
    pub fn build(result: &DetectionResult, hints: &HintsDocument, base_iri: &str) -> Result<Self> {
        let vocab = Vocabulary::new(&result.derived_schema, &result.instances, hints);
        let generated = generate_all(result, &vocab)?;
        let prefixes: BTreeMap<String, String> = [(String::new(), base_iri.to_string())].into();
        let mut log = result.log.join("\n");
        log.push('\n');
        Ok(OutputSet {
            obda: emit_obda_file(&generated.assertions, &prefixes)?,
            r2rml: emit_r2rml(&generated.assertions, &prefixes)?,
            ontology: emit_ontology(&generated.axioms, &prefixes),
            conceptual: emit_conceptual_summary(&summarize(result, &vocab)),
            views_sql: emit_views_sql(&result.derived_schema)?,
            log,
        })
    }

    /// Writes `<name>.obda`, `<name>.r2rml.ttl`, `<name>.ontology.ttl`,
    /// `<name>.conceptual.txt`, `<name>.views.sql` and `<name>.log`.
    pub fn write(&self, dir: &Path, name: &str) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display(), e))?;
        let files = [
            ("obda", &self.obda),
            ("r2rml.ttl", &self.r2rml),
            ("ontology.ttl", &self.ontology),
            ("conceptual.txt", &self.conceptual),
            ("views.sql", &self.views_sql),
            ("log", &self.log),
        ];
        let mut out = Vec::new();
        for (ext, body) in files {
            let path = dir.join(format!("{name}.{ext}"));
            std::fs::write(&path, body).map_err(|e| Error::io(path.display(), e))?;
            out.push(path);
        }
        Ok(out)
    }
}
