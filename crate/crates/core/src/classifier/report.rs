use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::Assignment;
use crate::error::{Error, Result};
use crate::model::report::{round1, ReportRow};
use crate::model::{CoverageReport, Counts, PatternKind, Shares};

/// Per-kind application and mapping counts, totals and shares.
/// Applications are distinct grouping keys; mappings are assertions.
pub fn build_report(assignments: &BTreeMap<String, Assignment>) -> CoverageReport {
    let mut apps: BTreeMap<Option<PatternKind>, BTreeSet<String>> = BTreeMap::new();
    let mut maps: BTreeMap<Option<PatternKind>, usize> = BTreeMap::new();
    for a in assignments.values() {
        apps.entry(a.kind()).or_default().insert(a.application_key());
        *maps.entry(a.kind()).or_default() += 1;
    }
    let counts = |k: Option<PatternKind>| Counts {
        applications: apps.get(&k).map_or(0, BTreeSet::len),
        mappings: maps.get(&k).copied().unwrap_or(0),
    };
    let rows: Vec<ReportRow> = PatternKind::ALL
        .iter()
        .map(|&k| ReportRow {
            kind: k,
            counts: counts(Some(k)),
        })
        .collect();
    let unknown = counts(None);
    let totals = Counts {
        applications: rows.iter().map(|r| r.counts.applications).sum::<usize>() + unknown.applications,
        mappings: assignments.len(),
    };
    let schema: usize = rows
        .iter()
        .filter(|r| r.kind.is_schema_driven())
        .map(|r| r.counts.applications)
        .sum();
    let data = totals.applications - schema - unknown.applications;
    let shares = shares(schema, data, unknown.applications);
    CoverageReport {
        rows,
        unknown,
        totals,
        shares,
    }
}

/// Percentages at one decimal that add up to exactly 100.0 (largest
/// remainder on tenths), or all zero for an empty corpus.
fn shares(schema: usize, data: usize, unknown: usize) -> Shares {
    let total = schema + data + unknown;
    if total == 0 {
        return Shares::default();
    }
    let parts = [schema, data, unknown];
    let exact: Vec<f64> = parts.iter().map(|&n| n as f64 * 1000.0 / total as f64).collect();
    let mut tenths: Vec<u64> = exact.iter().map(|x| x.floor() as u64).collect();
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())).then(a.cmp(&b)));
    let missing = 1000 - tenths.iter().sum::<u64>();
    for &i in order.iter().take(missing as usize) {
        tenths[i] += 1;
    }
    let pct = |t: u64| round1(t as f64 / 10.0);
    Shares {
        schema_driven: pct(tenths[0]),
        data_driven: pct(tenths[1]),
        unknown: pct(tenths[2]),
    }
}

/// Aligned table: one row per catalog kind in catalog order, then UNKNOWN,
/// totals and the shares line.
pub fn format_text(r: &CoverageReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<8} {:>12} {:>9}", "Pattern", "Applications", "Mappings");
    let line = |out: &mut String, label: &str, c: Counts| {
        let _ = writeln!(out, "{label:<8} {:>12} {:>9}", c.applications, c.mappings);
    };
    for row in &r.rows {
        line(&mut out, row.kind.label(), row.counts);
    }
    line(&mut out, "UNKNOWN", r.unknown);
    line(&mut out, "Total", r.totals);
    let _ = writeln!(
        out,
        "schema-driven {:.1}%  data-driven {:.1}%  unknown {:.1}%",
        r.shares.schema_driven, r.shares.data_driven, r.shares.unknown
    );
    out
}

pub fn format_json(r: &CoverageReport) -> Result<String> {
    let text = serde_json::to_string_pretty(r).map_err(|e| Error::Serialization(e.to_string()))?;
    Ok(text + "\n")
}

pub fn format_csv(r: &CoverageReport) -> Result<String> {
    let ser = |e: csv::Error| Error::Serialization(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["pattern", "applications", "mappings"]).map_err(ser)?;
    let rows = r
        .rows
        .iter()
        .map(|row| (row.kind.label(), row.counts))
        .chain([("UNKNOWN", r.unknown), ("Total", r.totals)]);
    for (label, c) in rows {
        w.write_record([label.to_string(), c.applications.to_string(), c.mappings.to_string()]).map_err(ser)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Serialization(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
