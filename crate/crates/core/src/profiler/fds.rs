use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;

use crate::model::{AttributeSet, FunctionalDependency, Row, Value};

/// Minimal exact FDs `X → A` with `|X| ≤ max_lhs`, skipping determinants
/// that contain the primary key. Nulls compare equal to each other. The empty
/// determinant is allowed and marks a constant column. Dependents are grouped
/// per determinant. An empty row set yields nothing.
pub fn discover_fds(
    table: &str,
    rows: &[Row],
    attrs: &[String],
    pk: Option<&AttributeSet>,
    max_lhs: usize,
) -> Vec<FunctionalDependency> {
    if rows.is_empty() {
        return Vec::new();
    }
    let pk_idx: Option<Vec<usize>> = pk.map(|k| {
        k.iter()
            .filter_map(|a| attrs.iter().position(|x| x == a))
            .collect()
    });
    let contains_pk = |x: &[usize]| pk_idx.as_ref().is_some_and(|p| !p.is_empty() && p.iter().all(|i| x.contains(i)));
    // holds[(X, A)] for every determinant tried so far
    let mut holds: BTreeMap<(Vec<usize>, usize), bool> = BTreeMap::new();
    let mut out = Vec::new();
    for k in 0..=max_lhs.min(attrs.len()) {
        for x in (0..attrs.len()).combinations(k) {
            if contains_pk(&x) {
                continue;
            }
            let dependents = determined(rows, &x, attrs.len());
            let mut minimal = Vec::new();
            for a in (0..attrs.len()).filter(|a| !x.contains(a)) {
                let h = dependents[a];
                holds.insert((x.clone(), a), h);
                if !h {
                    continue;
                }
                let implied = (0..x.len()).any(|drop| {
                    (0..x.len())
                        .filter(|&j| j != drop)
                        .map(|j| x[j])
                        .collect::<Vec<_>>()
                        .into_iter()
                        .powerset()
                        .any(|y| holds.get(&(y, a)).copied().unwrap_or(false))
                });
                if !implied {
                    minimal.push(a);
                }
            }
            if !minimal.is_empty() {
                out.push(FunctionalDependency {
                    table: table.to_string(),
                    determinant: x.iter().map(|&i| attrs[i].clone()).collect(),
                    dependent: minimal.iter().map(|&i| attrs[i].clone()).collect(),
                });
            }
        }
    }
    out
}

/// `result[a]` tells whether the columns `x` determine column `a`.
fn determined(rows: &[Row], x: &[usize], width: usize) -> Vec<bool> {
    let mut first: HashMap<Vec<&Value>, usize> = HashMap::new();
    let mut ok = vec![true; width];
    for (ri, r) in rows.iter().enumerate() {
        let key: Vec<&Value> = x.iter().map(|&i| &r[i]).collect();
        let rep = *first.entry(key).or_insert(ri);
        if rep != ri {
            let other = &rows[rep];
            for a in 0..width {
                if ok[a] && other[a] != r[a] {
                    ok[a] = false;
                }
            }
        }
    }
    ok
}
