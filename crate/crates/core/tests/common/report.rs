//! Coverage arithmetic on a corpus of known composition.

use std::collections::BTreeMap;

use vkg_patterns::classifier::{build_report, format_text, Assignment};
use vkg_patterns::model::{Counts, PatternInstance, PatternKind, Provenance};

fn matched(kind: PatternKind, table: &str) -> Assignment {
    Assignment::Matched {
        instance: Box::new(PatternInstance::new(kind, table, Provenance::Declared)),
        secondary: vec![],
    }
}

/// Three SE applications over seven assertions, two DRm applications over
/// two, one UNKNOWN over one.
pub fn synthetic_corpus() -> BTreeMap<String, Assignment> {
    let mut a = BTreeMap::new();
    for (i, table) in ["a", "a", "a", "b", "b", "c", "c"].iter().enumerate() {
        a.insert(format!("se{i}"), matched(PatternKind::SE, table));
    }
    a.insert("drm0".into(), matched(PatternKind::DRm, "d"));
    a.insert("drm1".into(), matched(PatternKind::DRm, "e"));
    a.insert(
        "opaque".into(),
        Assignment::Unknown {
            reason: "outside the supported SQL subset".into(),
            group: "opaque".into(),
        },
    );
    a
}

pub fn check_report_arithmetic() -> Result<String, String> {
    let r = build_report(&synthetic_corpus());
    let pairs = [
        ("SE", r.row(PatternKind::SE), (3, 7)),
        ("DRm", r.row(PatternKind::DRm), (2, 2)),
        ("UNKNOWN", r.unknown, (1, 1)),
        ("Total", r.totals, (6, 10)),
    ];
    for (label, got, (apps, maps)) in pairs {
        if got != (Counts { applications: apps, mappings: maps }) {
            return Err(format!("{label}: got {got:?}, want ({apps}, {maps})"));
        }
    }
    let others: usize = r
        .rows
        .iter()
        .filter(|row| !matches!(row.kind, PatternKind::SE | PatternKind::DRm))
        .map(|row| row.counts.applications + row.counts.mappings)
        .sum();
    if others != 0 {
        return Err(format!("{others} counts leaked into other kinds"));
    }
    let s = r.shares;
    if (s.total() - 100.0).abs() > 0.1 {
        return Err(format!("shares sum to {}", s.total()));
    }
    let line = "schema-driven 50.0%  data-driven 33.3%  unknown 16.7%";
    if !format_text(&r).contains(line) {
        return Err(format!("shares line missing from\n{}", format_text(&r)));
    }
    Ok(line.to_string())
}
