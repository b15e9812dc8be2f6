use std::collections::HashSet;

use super::RelationData;
use crate::model::{AttributeSet, PartitionSpec};

/// Partitions over every single attribute plus the given multi-attribute
/// candidates: no nulls, between 2 and `max_values` distinct tuples, values
/// in first-occurrence order.
pub fn discover_partitions(rel: &RelationData, candidates: &[AttributeSet], max_values: usize) -> Vec<PartitionSpec> {
    let mut sets: Vec<AttributeSet> = rel.attrs.iter().map(|a| AttributeSet::new([a.clone()])).collect();
    for c in candidates {
        if !sets.iter().any(|s| s == c) && c.iter().all(|a| rel.index(a).is_some()) {
            sets.push(c.clone());
        }
    }
    sets.into_iter()
        .filter_map(|b| {
            let idx: Vec<usize> = b.iter().filter_map(|a| rel.index(a)).collect();
            let mut seen = HashSet::new();
            let mut values = Vec::new();
            for r in &rel.rows {
                let tuple: Vec<String> = idx.iter().map(|&i| r[i].clone()).collect::<Option<_>>()?;
                if seen.insert(tuple.clone()) {
                    values.push(tuple);
                    if values.len() > max_values {
                        return None;
                    }
                }
            }
            (values.len() >= 2).then(|| PartitionSpec::enumerated(rel.name.clone(), b, values))
        })
        .collect()
}
