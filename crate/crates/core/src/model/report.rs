use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::pattern::PatternKind;

/// Textual conceptual schema recovered from detected instances.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptualSummary {
    pub entities: BTreeSet<EntitySummary>,
    pub relationships: BTreeSet<RelationshipSummary>,
    #[serde(rename = "isaLinks")]
    pub isa_links: BTreeSet<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EntitySummary {
    pub name: String,
    pub attributes: Vec<String>,
    pub identifier: Vec<String>,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Participant {
    pub role: String,
    pub entity: String,
    /// `(_,N)` or `(_,1)`.
    pub cardinality: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RelationshipSummary {
    pub name: String,
    pub participants: Vec<Participant>,
    pub attributes: Vec<String>,
    pub reified: bool,
    pub source: String,
}

impl ConceptualSummary {
    pub fn is_empty(&self) -> bool {
        self.entities.is_empty() && self.relationships.is_empty() && self.isa_links.is_empty()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub applications: usize,
    pub mappings: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub kind: PatternKind,
    #[serde(flatten)]
    pub counts: Counts,
}

/// Shares over applications, in percent, rounded to one decimal.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Shares {
    #[serde(rename = "schemaDriven")]
    pub schema_driven: f64,
    #[serde(rename = "dataDriven")]
    pub data_driven: f64,
    pub unknown: f64,
}

impl Shares {
    pub fn total(&self) -> f64 {
        self.schema_driven + self.data_driven + self.unknown
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    /// One row per catalog kind, in catalog order.
    pub rows: Vec<ReportRow>,
    pub unknown: Counts,
    pub totals: Counts,
    pub shares: Shares,
}

impl CoverageReport {
    pub fn row(&self, kind: PatternKind) -> Counts {
        self.rows
            .iter()
            .find(|r| r.kind == kind)
            .map(|r| r.counts)
            .unwrap_or_default()
    }
}

/// Rounds to one decimal place.
pub fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}
