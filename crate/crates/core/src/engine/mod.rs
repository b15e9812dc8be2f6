//! Pattern detection over a schema, optional data and optional hints, with
//! cascading over the views that patterns emit.

mod detect;
pub mod hints;
mod relinfo;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

pub use detect::class_of;
pub use hints::{ClusterCandidate, HintsDocument, Suppression};

use crate::error::{Error, Result};
use crate::model::{evaluate, AttributeSet, DataInstance, PatternInstance, RelationalSchema, SourceQuery};
use crate::profiler::{profile, Bounds, DiscoveredConstraints, RelationData};
use detect::Detector;
use relinfo::build_infos;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetectOptions {
    pub max_rounds: usize,
    pub bounds: Bounds,
    /// Report every candidate reading instead of resolving overlaps. Used
    /// when classifying existing mappings.
    pub enumerate: bool,
}

impl Default for DetectOptions {
    fn default() -> Self {
        DetectOptions {
            max_rounds: 4,
            bounds: Bounds::default(),
            enumerate: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionResult {
    pub instances: Vec<PatternInstance>,
    #[serde(rename = "derivedSchema")]
    pub derived_schema: RelationalSchema,
    pub log: Vec<String>,
    /// Constraints profiled in the last round, when data was given.
    #[serde(skip)]
    pub constraints: Option<DiscoveredConstraints>,
}

impl DetectionResult {
    pub fn kinds(&self) -> Vec<crate::model::PatternKind> {
        self.instances.iter().map(|i| i.kind).collect()
    }
}

/// Tables with data plus every cascading view, evaluated.
fn relation_data(schema: &RelationalSchema, data: &DataInstance) -> Vec<RelationData> {
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
    for v in schema.views.iter().filter(|v| v.cascade) {
        if let Ok(rel) = evaluate(&SourceQuery::base(&v.name), schema, data) {
            out.push(RelationData {
                name: v.name.clone(),
                attrs: v.columns.clone(),
                rows: rel.rows,
                pk: v.primary_key.clone(),
            });
        }
    }
    out
}

fn partition_candidates(schema: &RelationalSchema, hints: &HintsDocument) -> BTreeMap<String, Vec<AttributeSet>> {
    let mut out: BTreeMap<String, Vec<AttributeSet>> = BTreeMap::new();
    for c in hints.cluster_candidates.iter().filter(|c| c.attrs.len() > 1) {
        let mut names: Vec<String> = Vec::new();
        if schema.has_relation(&c.table) {
            names.push(c.table.clone());
        }
        names.extend(
            schema
                .views
                .iter()
                .filter(|v| v.entity_class.as_deref() == Some(c.table.as_str()))
                .map(|v| v.name.clone()),
        );
        for n in names {
            out.entry(n).or_default().push(c.attrs.clone());
        }
    }
    out
}

/// Copies the discovered references an instance relies on into the working
/// schema so that generation can resolve them.
fn record_references(working: &mut RelationalSchema, info: &relinfo::RelInfo, inst: &PatternInstance) {
    for fk in info.fks.iter().filter(|f| !f.declared) {
        if !inst.bindings.values().any(|b| b.same_set(&fk.source)) {
            continue;
        }
        if let Some(t) = working.table_mut(&info.name) {
            if !t.foreign_keys.contains(fk) {
                t.foreign_keys.push(fk.clone());
            }
        } else if let Some(v) = working.views.iter_mut().find(|v| v.name == info.name) {
            if !v.foreign_keys.contains(fk) {
                v.foreign_keys.push(fk.clone());
            }
        }
    }
    if inst.constants.is_empty() {
        return;
    }
    for d in info.const_inds.iter().filter(|d| !d.declared) {
        let same = d.target_table == inst.tables.get("E").map(String::as_str).unwrap_or_default()
            && d.constants().all(|(a, c)| inst.constants.get(a).map(String::as_str) == Some(c));
        if same {
            if let Some(t) = working.table_mut(&info.name) {
                if !t.inclusion_deps.contains(d) {
                    t.inclusion_deps.push(d.clone());
                }
            }
        }
    }
}

/// Runs every detector over every table, adds the emitted views to the
/// working schema and re-runs detection over new cascading views until no
/// new ones appear.
pub fn detect_all(
    schema: &RelationalSchema,
    data: Option<&DataInstance>,
    hints: &HintsDocument,
    options: DetectOptions,
) -> Result<DetectionResult> {
    schema.validate()?;
    hints.validate(schema)?;
    let data = data.filter(|d| !d.is_empty());
    let mut working = schema.clone();
    let mut pending: Vec<String> = schema.tables.iter().map(|t| t.name.clone()).collect();
    let mut instances: Vec<PatternInstance> = Vec::new();
    let mut log = Vec::new();
    let mut last_constraints = None;
    let mut round = 0;
    while !pending.is_empty() {
        round += 1;
        if round > options.max_rounds {
            return Err(Error::FixpointOverflow(options.max_rounds));
        }
        let rels = data.map(|d| relation_data(&working, d)).unwrap_or_default();
        let constraints = data.map(|_| profile(&working, &rels, options.bounds, &partition_candidates(&working, hints)));
        let row_counts: BTreeMap<String, usize> = rels.iter().map(|r| (r.name.clone(), r.rows.len())).collect();
        let by_name: BTreeMap<String, RelationData> = rels.into_iter().map(|r| (r.name.clone(), r)).collect();
        let infos = build_infos(&working, constraints.as_ref(), &row_counts);
        let taken: BTreeSet<String> = working
            .tables
            .iter()
            .map(|t| t.name.clone())
            .chain(working.views.iter().map(|v| v.name.clone()))
            .collect();
        let detector = Detector {
            infos: &infos,
            constraints: constraints.as_ref(),
            data: &by_name,
            hints,
            enumerate: options.enumerate,
            taken: &taken,
        };
        let mut used = BTreeSet::new();
        let mut next = Vec::new();
        for name in &pending {
            let Some(info) = infos.get(name) else { continue };
            let outcome = detector.detect(info, &mut used);
            log.extend(outcome.log.into_iter().map(|l| format!("round {round} {l}")));
            for inst in outcome.instances {
                record_references(&mut working, info, &inst);
                for v in &inst.emitted_views {
                    if working.has_relation(&v.name) {
                        continue;
                    }
                    if v.cascade {
                        next.push(v.name.clone());
                    }
                    working.views.push(v.clone());
                }
                instances.push(inst);
            }
        }
        last_constraints = constraints;
        pending = next;
    }
    instances.sort_by(|a, b| {
        (&a.main_table, a.kind.label(), a.application_key()).cmp(&(&b.main_table, b.kind.label(), b.application_key()))
    });
    Ok(DetectionResult {
        instances,
        derived_schema: working,
        log,
        constraints: last_constraints,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{parse_csv_table, parse_ddl};
    use crate::model::PatternKind::{self, *};

    fn kinds_of(r: &DetectionResult) -> Vec<(String, PatternKind)> {
        r.instances.iter().map(|i| (i.main_table.clone(), i.kind)).collect()
    }

    fn run(ddl: &str, csv: &[(&str, &str)], hints: &str) -> DetectionResult {
        let schema = parse_ddl(ddl).unwrap();
        let mut data = DataInstance::new();
        for (t, text) in csv {
            let table = schema.table(t).unwrap();
            data.insert(*t, parse_csv_table(text, t, &table.attr_names()).unwrap());
        }
        let hints = if hints.is_empty() { HintsDocument::default() } else { HintsDocument::parse(hints).unwrap() };
        detect_all(&schema, (!csv.is_empty()).then_some(&data), &hints, DetectOptions::default()).unwrap()
    }

    #[test]
    fn single_entity() {
        let r = run("CREATE TABLE person_info (ssn TEXT PRIMARY KEY, name TEXT);", &[], "");
        assert_eq!(kinds_of(&r), vec![("person_info".into(), SE)]);
        assert_eq!(r.instances[0].binding("A").unwrap().0, vec!["name"]);
    }

    #[test]
    fn extra_attributes_make_a_reified_relationship() {
        let r = run(
            "CREATE TABLE s (id TEXT PRIMARY KEY); CREATE TABLE c (id TEXT PRIMARY KEY);
             CREATE TABLE takes (s TEXT REFERENCES s, c TEXT REFERENCES c, grade TEXT, PRIMARY KEY (s, c));",
            &[],
            "",
        );
        assert!(kinds_of(&r).contains(&("takes".into(), SRR)));
        assert!(!kinds_of(&r).iter().any(|(_, k)| *k == SR));
    }

    #[test]
    fn denormalized_table_cascades() {
        let r = run(
            "CREATE TABLE students (id TEXT PRIMARY KEY, name TEXT, course_id TEXT, course_name TEXT);",
            &[(
                "students",
                "id,name,course_id,course_name\ns1,Ann,c1,Logic\ns2,Bob,c1,Logic\ns3,Cid,c2,Databases\ns4,Dan,c2,Databases\n",
            )],
            "",
        );
        let kinds = kinds_of(&r);
        assert!(kinds.contains(&("students".into(), DR1Nm)), "{kinds:?}\n{:#?}", r.log);
        assert!(kinds.contains(&("students".into(), SE)));
        assert!(kinds.contains(&("v_students_course_id".into(), DE)), "{kinds:?}");
        let view = r.derived_schema.view("v_students_course_id").unwrap();
        assert_eq!(view.entity_class.as_deref(), Some("Course"));
        let se = r.instances.iter().find(|i| i.kind == SE).unwrap();
        assert_eq!(se.binding("A").unwrap().0, vec!["name"]);
    }

    #[test]
    fn suppressed_kinds_are_dropped() {
        let r = run(
            "CREATE TABLE person_info (ssn TEXT PRIMARY KEY, name TEXT);",
            &[],
            r#"{"suppress": [{"kind": "SE", "table": "person_info"}]}"#,
        );
        assert!(r.instances.is_empty());
        assert!(r.log.iter().any(|l| l.contains("suppressed")));
    }

    #[test]
    fn detection_is_deterministic() {
        let ddl = "CREATE TABLE students (id TEXT PRIMARY KEY, name TEXT, course_id TEXT, course_name TEXT);";
        let csv = [("students", "id,name,course_id,course_name\ns1,Ann,c1,Logic\ns2,Bob,c1,Logic\ns3,Cid,c2,DB\n")];
        assert_eq!(run(ddl, &csv, ""), run(ddl, &csv, ""));
    }
}
