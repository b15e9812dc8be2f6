use std::collections::HashSet;

use itertools::Itertools;

use crate::model::{AttributeSet, Row};

/// Minimal attribute sets of size ≤ `max_arity` whose projection is
/// null-free and duplicate-free. Attributes inside a key follow column
/// order; keys are listed by arity, then column positions. An empty row set
/// yields no keys.
pub fn discover_keys(rows: &[Row], attrs: &[String], max_arity: usize) -> Vec<AttributeSet> {
    if rows.is_empty() {
        return Vec::new();
    }
    let mut found: Vec<Vec<usize>> = Vec::new();
    for k in 1..=max_arity.min(attrs.len()) {
        for combo in (0..attrs.len()).combinations(k) {
            if found.iter().any(|f| f.iter().all(|i| combo.contains(i))) {
                continue;
            }
            if is_unique(rows, &combo) {
                found.push(combo);
            }
        }
    }
    found
        .into_iter()
        .map(|c| c.into_iter().map(|i| attrs[i].clone()).collect())
        .collect()
}

pub(crate) fn is_unique(rows: &[Row], cols: &[usize]) -> bool {
    let mut seen = HashSet::with_capacity(rows.len());
    for r in rows {
        let mut key = Vec::with_capacity(cols.len());
        for &c in cols {
            match &r[c] {
                Some(v) => key.push(v.as_str()),
                None => return false,
            }
        }
        if !seen.insert(key) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::row_of;

    fn names(a: &[&str]) -> Vec<String> {
        a.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn duplicates_force_the_key() {
        let rows = vec![row_of(&["1", "a"]), row_of(&["2", "a"])];
        assert_eq!(discover_keys(&rows, &names(&["id", "x"]), 3), vec![AttributeSet::new(["id"])]);
    }

    #[test]
    fn nulls_veto_keys() {
        let rows = vec![row_of(&["1", ""]), row_of(&["2", "b"])];
        assert_eq!(discover_keys(&rows, &names(&["id", "x"]), 3), vec![AttributeSet::new(["id"])]);
    }

    #[test]
    fn empty_table_has_no_keys() {
        assert!(discover_keys(&[], &names(&["id"]), 3).is_empty());
    }

    #[test]
    fn composite_key_is_minimal() {
        let rows = vec![
            row_of(&["1", "a", "x"]),
            row_of(&["1", "b", "x"]),
            row_of(&["2", "a", "y"]),
        ];
        let keys = discover_keys(&rows, &names(&["p", "q", "r"]), 3);
        assert_eq!(keys, vec![AttributeSet::new(["p", "q"]), AttributeSet::new(["q", "r"])]);
    }
}
