use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::RelationData;
use crate::model::AttributeSet;

/// A reference from `rel_table` whose distinct values cover a strict,
/// non-empty subset of the referenced relation's rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Participation {
    #[serde(rename = "relTable")]
    pub rel_table: String,
    pub role: AttributeSet,
    #[serde(rename = "targetTable")]
    pub target_table: String,
    pub target: AttributeSet,
    pub coverage: f64,
}

/// Checks one reference `rel.role → target.target_attrs`.
pub fn participation(rel: &RelationData, role: &AttributeSet, target: &RelationData, target_attrs: &AttributeSet) -> Option<Participation> {
    let idx: Vec<usize> = role.iter().map(|a| rel.index(a)).collect::<Option<_>>()?;
    let distinct: HashSet<Vec<&str>> = rel
        .rows
        .iter()
        .filter_map(|r| idx.iter().map(|&i| r[i].as_deref()).collect::<Option<Vec<_>>>())
        .collect();
    let d = distinct.len();
    let n = target.rows.len();
    (d > 0 && d < n).then(|| Participation {
        rel_table: rel.name.clone(),
        role: role.clone(),
        target_table: target.name.clone(),
        target: target_attrs.clone(),
        coverage: d as f64 / n as f64,
    })
}
