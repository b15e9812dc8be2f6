#![allow(dead_code)]

pub mod cli;
pub mod examples;
pub mod expected;
pub mod fixtures;
pub mod oracles;
pub mod report;
pub mod views;

use vkg_patterns::engine::{detect_all, DetectOptions, DetectionResult};
use vkg_patterns::generator::{generate, Generated, Vocabulary};
use vkg_patterns::model::PatternInstance;

#[allow(unused_imports)]
pub use fixtures::{fixtures, Fixture};

pub fn detect(f: &Fixture) -> DetectionResult {
    detect_all(&f.schema(), f.data().as_ref(), &f.hints(), DetectOptions::default()).expect("fixture detects")
}

/// The first instance of the fixture's own kind, generated.
pub fn generate_kind(f: &Fixture, r: &DetectionResult) -> Option<(PatternInstance, Generated)> {
    let hints = f.hints();
    let vocab = Vocabulary::new(&r.derived_schema, &r.instances, &hints);
    let inst = r.instances.iter().find(|i| i.kind == f.kind)?;
    Some((inst.clone(), generate(inst, &vocab).expect("fixture generates")))
}

use std::collections::BTreeMap;

use vkg_patterns::classifier::{classify, Assignment};
use vkg_patterns::ingest::{emit_obda, parse_obda, parse_select, qualify_columns};
use vkg_patterns::model::{axiom_set_equal, normalize_query, MappingAssertion, RelationalSchema, SourceQuery};

fn normal(q: &SourceQuery, schema: &RelationalSchema) -> Result<SourceQuery, String> {
    let q = qualify_columns(q, schema).map_err(|t| format!("unknown relation {t}"))?;
    normalize_query(&q).map_err(|e| e.to_string())
}

/// Generated sources and axioms of the fixture's own kind against the
/// catalog row.
pub fn catalog_check(f: &Fixture) -> Result<(), String> {
    let r = detect(f);
    let (_, g) = generate_kind(f, &r).ok_or_else(|| format!("{} not detected", f.kind))?;
    let exp = expected::expected(f.kind);
    let schema = &r.derived_schema;
    let mut got: Vec<SourceQuery> = g.assertions.iter().map(|a| normal(&a.source, schema)).collect::<Result<_, _>>()?;
    let mut want: Vec<SourceQuery> = exp
        .sources
        .iter()
        .map(|s| normal(&parse_select(s).map_err(|e| format!("{s}: {e}"))?, schema))
        .collect::<Result<_, _>>()?;
    let key = |q: &SourceQuery| format!("{q:?}");
    got.sort_by_key(key);
    want.sort_by_key(key);
    if got != want {
        return Err(format!("{}: sources differ\n got {got:?}\nwant {want:?}", f.kind));
    }
    if !axiom_set_equal(&g.axioms, &exp.axioms) {
        return Err(format!("{}: axioms differ\n got {:?}\nwant {:?}", f.kind, g.axioms, exp.axioms));
    }
    Ok(())
}

/// Every assertion bootstrapped from the fixture, tagged with the instance
/// it came from.
pub fn bootstrap_assertions(f: &Fixture, r: &DetectionResult) -> Vec<(MappingAssertion, PatternInstance)> {
    let hints = f.hints();
    let vocab = Vocabulary::new(&r.derived_schema, &r.instances, &hints);
    let mut out = Vec::new();
    for (i, inst) in r.instances.iter().enumerate() {
        let g = generate(inst, &vocab).expect("fixture generates");
        for (j, mut a) in g.assertions.into_iter().enumerate() {
            a.id = format!("m{i}_{j}");
            out.push((a, inst.clone()));
        }
    }
    out
}

pub fn prefixes() -> BTreeMap<String, String> {
    [(String::new(), "http://example.org/".to_string())].into()
}

/// Classifies the fixture's emitted OBDA file and compares kind, main table
/// and bindings with the originating instances. Returns the number of
/// assertions checked.
pub fn round_trip_check(f: &Fixture) -> Result<usize, String> {
    let r = detect(f);
    let tagged = bootstrap_assertions(f, &r);
    let assertions: Vec<MappingAssertion> = tagged.iter().map(|(a, _)| a.clone()).collect();
    let text = emit_obda(&assertions, &prefixes()).map_err(|e| e.to_string())?;
    let doc = parse_obda(&text).map_err(|e| e.to_string())?;
    let c = classify(&doc, &f.schema(), f.data().as_ref(), &f.hints(), DetectOptions::default())
        .map_err(|e| e.to_string())?;
    for (a, origin) in &tagged {
        match c.assignments.get(&a.id) {
            Some(Assignment::Matched { instance, .. })
                if instance.kind == origin.kind
                    && instance.main_table == origin.main_table
                    && instance.bindings == origin.bindings => {}
            other => {
                return Err(format!(
                    "{}: {} came from {} but was classified as {:?}",
                    f.kind,
                    a.id,
                    origin.application_key(),
                    other.map(Assignment::application_key)
                ))
            }
        }
    }
    Ok(tagged.len())
}
