//! Domain-knowledge hints:
//!
//! ```json
//! { "entityLabels": {"university": "University", "v_university_rector_ssn": "Rector"},
//!   "attributeOwnership": {"university": {"rector_ssn": "Rector", "rector_name": "Rector"}},
//!   "clusterCandidates": [{"table": "people", "attrs": ["gender"], "flavor": "CE2D",
//!                          "property": "hasGender", "invention": {"F": "Female", "M": "Male"}}],
//!   "suppress": [{"kind": "SRm", "table": "client"}] }
//! ```
//!
//! Invention keys for multi-attribute partitions join the values with `|`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AttributeSet, PatternKind, RelationalSchema, ValueInventionRule};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HintsDocument {
    #[serde(rename = "entityLabels", default)]
    pub entity_labels: BTreeMap<String, String>,
    #[serde(rename = "attributeOwnership", default)]
    pub attribute_ownership: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(rename = "clusterCandidates", default)]
    pub cluster_candidates: Vec<ClusterCandidate>,
    #[serde(default)]
    pub suppress: Vec<Suppression>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterCandidate {
    /// Table, view, or the class label of a view.
    pub table: String,
    pub attrs: AttributeSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flavor: Option<PatternKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub property: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invention: Option<BTreeMap<String, String>>,
    /// Object IRI template for CE2O, e.g. `:gender/{gender}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template: Option<String>,
}

impl ClusterCandidate {
    pub fn invention_rule(&self) -> Option<ValueInventionRule> {
        self.invention.as_ref().map(|m| ValueInventionRule {
            name: self.property.clone().unwrap_or_else(|| "xi".into()),
            mapping: m
                .iter()
                .map(|(k, v)| (k.split('|').map(str::to_string).collect(), v.clone()))
                .collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Suppression {
    pub kind: PatternKind,
    pub table: String,
}

impl HintsDocument {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Hints(e.to_string()))
    }

    /// Owner hinted for `table.attr`.
    pub fn owner(&self, table: &str, attr: &str) -> Option<&str> {
        self.attribute_ownership
            .get(table)
            .and_then(|m| m.get(attr))
            .map(String::as_str)
    }

    pub fn suppressed(&self, kind: PatternKind, table: &str) -> bool {
        self.suppress.iter().any(|s| s.kind == kind && s.table == table)
    }

    /// Referenced tables and attributes must exist. Labels and cluster
    /// candidates may also name views, which only exist after detection, so
    /// unknown names there are accepted.
    pub fn validate(&self, schema: &RelationalSchema) -> Result<()> {
        for (table, attrs) in &self.attribute_ownership {
            let t = schema
                .table(table)
                .ok_or_else(|| Error::Hints(format!("attributeOwnership names unknown table `{table}`")))?;
            if let Some(a) = attrs.keys().find(|a| !t.has_attr(a)) {
                return Err(Error::Hints(format!("attributeOwnership names unknown attribute `{table}.{a}`")));
            }
        }
        for c in &self.cluster_candidates {
            if c.attrs.is_empty() {
                return Err(Error::Hints(format!("cluster candidate on `{}` has no attributes", c.table)));
            }
            if let Some(t) = schema.table(&c.table) {
                if let Some(a) = c.attrs.iter().find(|a| !t.has_attr(a)) {
                    return Err(Error::Hints(format!("cluster candidate names unknown attribute `{}.{a}`", c.table)));
                }
            }
            if let Some(f) = c.flavor {
                if !matches!(f, PatternKind::CE2C | PatternKind::CE2D | PatternKind::CE2O | PatternKind::CR2O) {
                    return Err(Error::Hints(format!("`{f}` is not a clustering flavor")));
                }
            }
        }
        for s in &self.suppress {
            if !schema.has_relation(&s.table) && !s.table.starts_with("v_") {
                return Err(Error::Hints(format!("suppress names unknown table `{}`", s.table)));
            }
        }
        Ok(())
    }
}
