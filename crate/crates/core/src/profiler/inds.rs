use std::collections::{BTreeSet, HashSet};

use itertools::Itertools;

use super::keys::is_unique;
use super::RelationData;
use crate::model::{AttributeSet, InclusionDependency, ProjTerm};

/// Inclusion dependencies `π_X(S) ⊆ π_Y(T)` with `|X| ≤ max_arity` between
/// relations with data, where `π_Y(T)` is null-free and duplicate-free (so
/// the reference lands on a key), source rows with a null in `X` are
/// ignored, at least one source row remains, and `S ≠ T` or `X ∩ Y = ∅`.
/// `X` is listed in column order and `Y` aligned to it.
pub fn discover_inds(relations: &[RelationData], max_arity: usize) -> Vec<InclusionDependency> {
    let mut out = Vec::new();
    for s in relations {
        for k in 1..=max_arity.min(s.attrs.len()) {
            for x in (0..s.attrs.len()).combinations(k) {
                let src = projection(s, &x);
                if src.is_empty() {
                    continue;
                }
                for t in relations {
                    if t.rows.is_empty() || t.attrs.len() < k {
                        continue;
                    }
                    for y in (0..t.attrs.len()).permutations(k) {
                        if s.name == t.name && y.iter().any(|i| x.contains(i)) {
                            continue;
                        }
                        if !is_unique(&t.rows, &y) {
                            continue;
                        }
                        let tgt = projection(t, &y);
                        if src.is_subset(&tgt) {
                            out.push(InclusionDependency {
                                source_table: s.name.clone(),
                                source_projection: x.iter().map(|&i| ProjTerm::Attr(s.attrs[i].clone())).collect(),
                                target_table: t.name.clone(),
                                target: y.iter().map(|&i| t.attrs[i].clone()).collect(),
                                declared: false,
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

/// Null-free distinct projections.
fn projection<'a>(r: &'a RelationData, cols: &[usize]) -> HashSet<Vec<&'a str>> {
    r.rows
        .iter()
        .filter_map(|row| cols.iter().map(|&c| row[c].as_deref()).collect::<Option<Vec<_>>>())
        .collect()
}

/// Constant-completed inclusions `π_{c, K}(F) ⊆ π_{P}(E)`: for a key `K` of a
/// child `F` and a key `P` of another relation `E` with `|P| = |K| + 1`, one
/// position of `P` is fixed to a constant `c` and the rest is matched to `K`
/// by some bijection. Every constant that completes the inclusion is
/// reported.
pub fn discover_constant_inds(
    relations: &[RelationData],
    keys_of: &dyn Fn(&RelationData) -> Vec<AttributeSet>,
) -> Vec<InclusionDependency> {
    let mut out = BTreeSet::new();
    for f in relations.iter().filter(|r| !r.rows.is_empty()) {
        for kf in keys_of(f) {
            let kf_idx: Vec<usize> = kf.iter().filter_map(|a| f.index(a)).collect();
            let src = projection(f, &kf_idx);
            if src.is_empty() {
                continue;
            }
            for e in relations.iter().filter(|r| r.name != f.name && !r.rows.is_empty()) {
                for pe in keys_of(e).into_iter().filter(|p| p.len() == kf.len() + 1) {
                    let pe_idx: Vec<usize> = pe.iter().filter_map(|a| e.index(a)).collect();
                    for (j, &cpos) in pe_idx.iter().enumerate() {
                        let rest: Vec<usize> = pe_idx.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, &c)| c).collect();
                        let constants: BTreeSet<&str> = e.rows.iter().filter_map(|r| r[cpos].as_deref()).collect();
                        for perm in rest.iter().copied().permutations(rest.len()) {
                            for c in &constants {
                                let tgt: HashSet<Vec<&str>> = e
                                    .rows
                                    .iter()
                                    .filter(|r| r[cpos].as_deref() == Some(c))
                                    .filter_map(|r| perm.iter().map(|&p| r[p].as_deref()).collect::<Option<Vec<_>>>())
                                    .collect();
                                if src.is_subset(&tgt) {
                                    let mut projection = vec![ProjTerm::Const((*c).to_string())];
                                    projection.extend(kf.iter().map(|a| ProjTerm::Attr(a.clone())));
                                    let mut target = vec![e.attrs[cpos].clone()];
                                    target.extend(perm.iter().map(|&p| e.attrs[p].clone()));
                                    out.insert(InclusionDependency {
                                        source_table: f.name.clone(),
                                        source_projection: projection,
                                        target_table: e.name.clone(),
                                        target: AttributeSet(target),
                                        declared: false,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out.into_iter().collect()
}
