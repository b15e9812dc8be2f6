//! Exhaustive reference implementations of key, FD and IND discovery, and
//! random instances to compare the profiler against.

use std::collections::{BTreeMap, BTreeSet};

use rand::rngs::StdRng;
use rand::Rng;
use vkg_patterns::model::{AttributeSet, Row, Value};
use vkg_patterns::profiler::{discover_fds, discover_inds, discover_keys, RelationData};

/// Column positions of a bitmask, ascending.
fn members(mask: u32, width: usize) -> Vec<usize> {
    (0..width).filter(|i| mask & (1 << i) != 0).collect()
}

fn is_proper_subset(a: u32, b: u32) -> bool {
    a != b && a & b == a
}

fn tuple(r: &Row, cols: &[usize]) -> Vec<Value> {
    cols.iter().map(|&c| r[c].clone()).collect()
}

fn unique_and_total(rows: &[Row], cols: &[usize]) -> bool {
    let mut seen = BTreeSet::new();
    rows.iter().all(|r| {
        let t = tuple(r, cols);
        t.iter().all(Option::is_some) && seen.insert(t)
    })
}

fn fd_holds(rows: &[Row], x: &[usize], a: usize) -> bool {
    let mut image: BTreeMap<Vec<Value>, &Value> = BTreeMap::new();
    rows.iter().all(|r| *image.entry(tuple(r, x)).or_insert(&r[a]) == &r[a])
}

/// Every minimal unique, null-free column set up to `max` columns.
pub fn brute_keys(rows: &[Row], width: usize, max: usize) -> BTreeSet<Vec<usize>> {
    if rows.is_empty() {
        return BTreeSet::new();
    }
    let unique: Vec<u32> = (1u32..1 << width)
        .filter(|m| m.count_ones() as usize <= max && unique_and_total(rows, &members(*m, width)))
        .collect();
    unique
        .iter()
        .filter(|&&m| !unique.iter().any(|&s| is_proper_subset(s, m)))
        .map(|&m| members(m, width))
        .collect()
}

/// Every `(X, A)` with `X → A`, `A ∉ X`, `|X| ≤ max`, `X` not covering the
/// primary key and no proper subset of `X` determining `A`.
pub fn brute_fds(rows: &[Row], width: usize, pk: Option<u32>, max: usize) -> BTreeSet<(Vec<usize>, usize)> {
    let mut out = BTreeSet::new();
    if rows.is_empty() {
        return out;
    }
    for x in 0u32..1 << width {
        if x.count_ones() as usize > max || pk.is_some_and(|p| p != 0 && x & p == p) {
            continue;
        }
        let xs = members(x, width);
        for a in (0..width).filter(|a| x & (1 << a) == 0) {
            if !fd_holds(rows, &xs, a) {
                continue;
            }
            let smaller = (0u32..x).any(|y| is_proper_subset(y, x) && fd_holds(rows, &members(y, width), a));
            if !smaller {
                out.insert((xs.clone(), a));
            }
        }
    }
    out
}

/// `(source, X, target, Y)` for every inclusion of the null-free
/// projection `X` of `source` into a null-free, duplicate-free projection
/// `Y` of a non-empty `target`.
pub type Ind = (String, Vec<String>, String, Vec<String>);

fn sequences(width: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for s in sequences(width, k - 1) {
        for i in (0..width).filter(|i| !s.contains(i)) {
            let mut t = s.clone();
            t.push(i);
            out.push(t);
        }
    }
    out
}

pub fn brute_inds(rels: &[RelationData], max: usize) -> BTreeSet<Ind> {
    let mut out = BTreeSet::new();
    for s in rels {
        let w = s.attrs.len();
        for x in 1u32..1 << w {
            let xs = members(x, w);
            if xs.len() > max {
                continue;
            }
            let src: BTreeSet<Vec<Value>> =
                s.rows.iter().map(|r| tuple(r, &xs)).filter(|t| t.iter().all(Option::is_some)).collect();
            if src.is_empty() {
                continue;
            }
            for t in rels.iter().filter(|t| !t.rows.is_empty()) {
                for ys in sequences(t.attrs.len(), xs.len()) {
                    if s.name == t.name && ys.iter().any(|y| xs.contains(y)) {
                        continue;
                    }
                    if !unique_and_total(&t.rows, &ys) {
                        continue;
                    }
                    let tgt: BTreeSet<Vec<Value>> = t.rows.iter().map(|r| tuple(r, &ys)).collect();
                    if src.is_subset(&tgt) {
                        let names = |r: &RelationData, c: &[usize]| c.iter().map(|&i| r.attrs[i].clone()).collect();
                        out.insert((s.name.clone(), names(s, &xs), t.name.clone(), names(t, &ys)));
                    }
                }
            }
        }
    }
    out
}

/// A relation of up to `max_cols` columns and `max_rows` rows whose columns
/// draw from domains of mixed size, so keys, dependencies and duplicates
/// all occur.
pub fn random_relation(rng: &mut StdRng, name: &str, max_cols: usize, max_rows: usize) -> RelationData {
    let width = rng.gen_range(1..=max_cols);
    let height = rng.gen_range(0..=max_rows);
    let domains: Vec<usize> = (0..width)
        .map(|_| match rng.gen_range(0..4) {
            0 => 1,
            1 => 3,
            2 => 8,
            _ => 2 * height.max(1),
        })
        .collect();
    let nulls = rng.gen_bool(0.3);
    let mut rows: Vec<Row> = (0..height)
        .map(|_| {
            domains
                .iter()
                .map(|&d| (!(nulls && rng.gen_bool(0.05))).then(|| rng.gen_range(0..d).to_string()))
                .collect()
        })
        .collect();
    // Copy a column now and then so dependencies between columns hold.
    if width > 1 && rng.gen_bool(0.5) {
        let (a, b) = (rng.gen_range(0..width), rng.gen_range(0..width));
        for r in &mut rows {
            r[b] = r[a].clone();
        }
    }
    RelationData {
        name: name.to_string(),
        attrs: (0..width).map(|i| format!("{name}{i}")).collect(),
        rows,
        pk: None,
    }
}

fn positions(attrs: &[String], set: &AttributeSet) -> Vec<usize> {
    set.iter().map(|a| attrs.iter().position(|x| x == a).expect("known column")).collect()
}

pub fn check_keys(r: &RelationData, max: usize) -> Result<(), String> {
    let got: BTreeSet<Vec<usize>> = discover_keys(&r.rows, &r.attrs, max).iter().map(|k| positions(&r.attrs, k)).collect();
    let want = brute_keys(&r.rows, r.attrs.len(), max);
    (got == want).then_some(()).ok_or_else(|| format!("keys of {:?}: got {got:?}, want {want:?}", r.rows))
}

pub fn check_fds(r: &RelationData, pk: Option<&AttributeSet>, max: usize) -> Result<(), String> {
    let got: BTreeSet<(Vec<usize>, usize)> = discover_fds(&r.name, &r.rows, &r.attrs, pk, max)
        .iter()
        .flat_map(|f| {
            let x = positions(&r.attrs, &f.determinant);
            positions(&r.attrs, &f.dependent).into_iter().map(move |a| (x.clone(), a))
        })
        .collect();
    let mask = pk.map(|k| positions(&r.attrs, k).iter().fold(0u32, |m, &i| m | 1 << i));
    let want = brute_fds(&r.rows, r.attrs.len(), mask, max);
    (got == want).then_some(()).ok_or_else(|| {
        let extra: Vec<_> = got.difference(&want).collect();
        let missing: Vec<_> = want.difference(&got).collect();
        format!("fds of {:?} (pk {pk:?}): extra {extra:?}, missing {missing:?}", r.rows)
    })
}

pub fn check_inds(rels: &[RelationData], max: usize) -> Result<(), String> {
    let got: BTreeSet<Ind> = discover_inds(rels, max)
        .into_iter()
        .map(|d| {
            let x = d.source_attrs().0;
            (d.source_table, x, d.target_table, d.target.0)
        })
        .collect();
    let want = brute_inds(rels, max);
    (got == want).then_some(()).ok_or_else(|| {
        let extra: Vec<_> = got.difference(&want).collect();
        let missing: Vec<_> = want.difference(&got).collect();
        format!("inds: extra {extra:?}, missing {missing:?}")
    })
}

/// Runs all three comparisons on `n` seeded instances of at most 8 columns
/// and 200 rows. Returns how many instances were checked.
pub fn run_discovery_oracles(seed: u64, n: usize) -> Result<usize, String> {
    use rand::SeedableRng;
    let mut rng = StdRng::seed_from_u64(seed);
    for i in 0..n {
        let r = random_relation(&mut rng, "t", 8, 200);
        check_keys(&r, 3).map_err(|e| format!("instance {i}: {e}"))?;
        let pk = discover_keys(&r.rows, &r.attrs, 2).into_iter().next().filter(|_| rng.gen_bool(0.5));
        check_fds(&r, pk.as_ref(), 2).map_err(|e| format!("instance {i}: {e}"))?;
        let rels: Vec<RelationData> = ["a", "b", "c"]
            .iter()
            .take(rng.gen_range(1..=3))
            .map(|n| random_relation(&mut rng, n, 4, 40))
            .collect();
        check_inds(&rels, 2).map_err(|e| format!("instance {i}: {e}"))?;
    }
    Ok(n)
}
