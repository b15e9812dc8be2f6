//! Classification of existing mapping assertions into catalog pattern
//! applications, and coverage reports over the result.

mod report;
mod shape;

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

pub use report::{build_report, format_csv, format_json, format_text};
pub use shape::{shape_of, Shape};

use crate::engine::{detect_all, DetectOptions, DetectionResult, HintsDocument};
use crate::error::{Error, Result};
use crate::generator::{generate, Vocabulary};
use crate::ingest::{qualify_columns, ObdaDocument};
use crate::model::{roles, AttributeSet, CoverageReport, DataInstance, PatternInstance, PatternKind, RelationalSchema};

/// What one assertion was classified as.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Assignment {
    Matched {
        instance: Box<PatternInstance>,
        /// Other kinds that also explain the assertion.
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        secondary: Vec<PatternKind>,
    },
    Unknown {
        reason: String,
        /// Unknown assertions with the same group count as one
        /// application.
        group: String,
    },
}

impl Assignment {
    pub fn kind(&self) -> Option<PatternKind> {
        match self {
            Assignment::Matched { instance, .. } => Some(instance.kind),
            Assignment::Unknown { .. } => None,
        }
    }

    pub fn instance(&self) -> Option<&PatternInstance> {
        match self {
            Assignment::Matched { instance, .. } => Some(instance),
            Assignment::Unknown { .. } => None,
        }
    }

    /// Key under which assertions count as one application.
    pub fn application_key(&self) -> String {
        match self {
            Assignment::Matched { instance, .. } => instance.application_key(),
            Assignment::Unknown { group, .. } => format!("UNKNOWN|{group}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    /// Per mapping id.
    pub assignments: BTreeMap<String, Assignment>,
    pub report: CoverageReport,
    #[serde(skip)]
    pub log: Vec<String>,
}

struct Candidate {
    instance: PatternInstance,
    shapes: Vec<Shape>,
    /// Every generated assertion has an exact counterpart in the document.
    complete: bool,
}

/// Rank of a candidate for one assertion: lower is better.
type Rank = (bool, bool, u8, bool, usize);

fn rank(c: &Candidate, exact: bool, index: usize) -> Rank {
    (!exact, !c.complete, c.instance.kind.specificity(), !c.instance.kind.is_schema_driven(), index)
}

/// A candidate instance with the assertions it generates.
type Generated = Vec<(PatternInstance, Vec<crate::model::MappingAssertion>)>;

/// Instances that may explain existing mappings: every reading the detector
/// can make of the schema and data.
fn candidates(
    schema: &RelationalSchema,
    data: Option<&DataInstance>,
    hints: &HintsDocument,
    options: DetectOptions,
    log: &mut Vec<String>,
) -> Result<(DetectionResult, Generated)> {
    let base = detect_all(schema, data, hints, DetectOptions { enumerate: false, ..options })?;
    let all = detect_all(schema, data, hints, DetectOptions { enumerate: true, ..options })?;
    let mut derived = all.derived_schema.clone();
    for v in &base.derived_schema.views {
        if derived.view(&v.name).is_none() {
            derived.views.push(v.clone());
        }
    }
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for inst in base.instances.iter().chain(&all.instances) {
        if !seen.insert(inst.application_key()) {
            continue;
        }
        // The candidate's own reading decides identities on its table.
        let mut ctx = vec![inst.clone()];
        ctx.extend(base.instances.iter().cloned());
        let vocab = Vocabulary::new(&derived, &ctx, hints);
        match generate(inst, &vocab) {
            Ok(g) => out.push((inst.clone(), g.assertions)),
            Err(e) => log.push(format!("candidate {} skipped: {e}", inst.application_key())),
        }
    }
    let result = DetectionResult {
        derived_schema: derived,
        ..all
    };
    Ok((result, out))
}

/// Assigns every assertion of `doc` to the catalog application that
/// explains it, or to UNKNOWN.
pub fn classify(
    doc: &ObdaDocument,
    schema: &RelationalSchema,
    data: Option<&DataInstance>,
    hints: &HintsDocument,
    options: DetectOptions,
) -> Result<Classification> {
    let mut log = Vec::new();
    let (result, generated) = candidates(schema, data, hints, options, &mut log)?;
    let derived = &result.derived_schema;

    for a in &doc.assertions {
        if a.source.is_opaque() {
            continue;
        }
        if let Err(table) = qualify_columns(&a.source, derived) {
            return Err(Error::SchemaMismatch {
                assertion: a.id.clone(),
                table,
            });
        }
    }

    let doc_shapes: Vec<Option<Shape>> = doc.assertions.iter().map(|a| shape_of(a, derived)).collect();
    let present: HashSet<&Shape> = doc_shapes.iter().flatten().collect();
    let cands: Vec<Candidate> = generated
        .into_iter()
        .map(|(instance, assertions)| {
            let shapes: Vec<Shape> = assertions.iter().filter_map(|a| shape_of(a, derived)).collect();
            let complete = !shapes.is_empty() && shapes.iter().all(|s| present.contains(s));
            Candidate {
                instance,
                shapes,
                complete,
            }
        })
        .collect();

    let mut assignments = BTreeMap::new();
    let mut refine: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (ai, (a, shape)) in doc.assertions.iter().zip(&doc_shapes).enumerate() {
        let Some(shape) = shape else {
            let reason = doc
                .unsupported
                .get(&a.id)
                .cloned()
                .unwrap_or_else(|| "source outside the supported SQL subset".to_string());
            log.push(format!("{}: UNKNOWN ({reason})", a.id));
            assignments.insert(
                a.id.clone(),
                Assignment::Unknown {
                    reason,
                    group: a.id.clone(),
                },
            );
            continue;
        };
        let mut matches: Vec<(Rank, usize)> = cands
            .iter()
            .enumerate()
            .filter_map(|(ci, c)| {
                let exact = c.shapes.iter().any(|s| s == shape);
                (exact || c.shapes.iter().any(|s| shape.within(s))).then(|| (rank(c, exact, ci), ci))
            })
            .collect();
        matches.sort();
        let Some(&(best_rank, best)) = matches.first() else {
            let group = shape.core.relations.iter().cloned().collect::<Vec<_>>().join(",");
            log.push(format!("{}: UNKNOWN (no catalog pattern matches)", a.id));
            assignments.insert(
                a.id.clone(),
                Assignment::Unknown {
                    reason: "no catalog pattern matches".to_string(),
                    group,
                },
            );
            continue;
        };
        let inst = &cands[best].instance;
        if let Some(&(r, other)) = matches.get(1) {
            let tied = r.0 == best_rank.0 && r.1 == best_rank.1 && r.2 == best_rank.2;
            if tied && cands[other].instance.kind != inst.kind {
                log.push(format!(
                    "{}: tie between {} and {}, took {}",
                    a.id, inst.kind, cands[other].instance.kind, inst.kind
                ));
            }
        }
        let secondary: Vec<PatternKind> = matches
            .iter()
            .map(|&(_, ci)| cands[ci].instance.kind)
            .filter(|k| *k != inst.kind)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        log.push(if secondary.is_empty() {
            format!("{}: {}", a.id, inst.kind)
        } else {
            let s: Vec<&str> = secondary.iter().map(|k| k.label()).collect();
            format!("{}: {} (also {})", a.id, inst.kind, s.join(", "))
        });
        if matches!(inst.kind, PatternKind::SE | PatternKind::DE) {
            refine.entry(inst.application_key()).or_default().push(ai);
        }
        assignments.insert(
            a.id.clone(),
            Assignment::Matched {
                instance: Box::new(inst.clone()),
                secondary,
            },
        );
    }

    // An entity application's attributes are the ones its assertions map.
    for members in refine.values() {
        let first = &doc.assertions[members[0]].id;
        let Some(inst) = assignments[first].instance() else {
            continue;
        };
        let used: BTreeSet<String> = members
            .iter()
            .filter_map(|&i| doc_shapes[i].as_ref())
            .flat_map(|s| s.data_columns(&inst.main_table))
            .collect();
        let a = inst.binding(roles::A).cloned().unwrap_or_default();
        let kept = AttributeSet(a.iter().filter(|c| used.contains(*c)).cloned().collect());
        for &i in members {
            if let Some(Assignment::Matched { instance, .. }) = assignments.get_mut(&doc.assertions[i].id) {
                instance.bindings.insert(roles::A.to_string(), kept.clone());
            }
        }
    }

    let report = build_report(&assignments);
    Ok(Classification {
        assignments,
        report,
        log,
    })
}
