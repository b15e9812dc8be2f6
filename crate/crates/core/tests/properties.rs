use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use vkg_patterns::ingest::{emit_ddl, emit_obda, parse_ddl, parse_obda, parse_select};
use vkg_patterns::model::{normalize_query, IriTemplate, Value};

/// Columns `c0..c{n}` per table, a primary key over a prefix of them, and
/// optionally a unique column and a reference to the previous table.
fn ddl() -> impl Strategy<Value = String> {
    prop::collection::vec((1usize..5, 0usize..3, any::<bool>(), any::<bool>(), 0usize..3), 1..4).prop_map(|tables| {
        let mut out = String::new();
        let mut prev_pk: Option<(String, usize)> = None;
        for (i, (width, pk_len, unique, refer, ty)) in tables.into_iter().enumerate() {
            let name = format!("t{i}");
            let ty = ["TEXT", "INT", "VARCHAR(20)"][ty];
            let pk_len = pk_len.min(width);
            let mut lines: Vec<String> = (0..width)
                .map(|c| {
                    let nn = if c == width - 1 && width > 1 { " NOT NULL" } else { "" };
                    format!("c{c} {ty}{nn}")
                })
                .collect();
            if pk_len > 0 {
                let cols: Vec<String> = (0..pk_len).map(|c| format!("c{c}")).collect();
                lines.push(format!("PRIMARY KEY ({})", cols.join(", ")));
            }
            if unique && width > pk_len {
                lines.push(format!("UNIQUE (c{})", width - 1));
            }
            if let Some((target, n)) = prev_pk.as_ref().filter(|(_, n)| refer && *n <= width) {
                let cols: Vec<String> = (0..*n).map(|c| format!("c{c}")).collect();
                lines.push(format!("FOREIGN KEY ({}) REFERENCES {target}", cols.join(", ")));
            }
            out.push_str(&format!("CREATE TABLE {name} ({});\n", lines.join(", ")));
            prev_pk = (pk_len > 0).then_some((name, pk_len));
        }
        out
    })
}

/// Conjunctive SELECTs over `r(a, b, c)` and `s(a, d)`.
fn select() -> impl Strategy<Value = String> {
    let cols = prop::sample::subsequence(vec!["r.a", "r.b", "r.c", "s.d"], 1..4);
    (cols, any::<bool>(), prop::option::of(("[a-z]{1,3}", 0usize..2)), any::<bool>()).prop_map(|(cols, join, filter, alias)| {
        let cols: Vec<&str> = cols.into_iter().filter(|c| join || !c.starts_with("s.")).collect();
        let items: Vec<String> = if cols.is_empty() { vec!["r.a".into()] } else { cols.iter().map(|c| c.to_string()).collect() };
        let items: Vec<String> = items
            .iter()
            .enumerate()
            .map(|(i, c)| if alias { format!("{c} AS x{i}") } else { c.clone() })
            .collect();
        let mut sql = format!("SELECT {} FROM r", items.join(", "));
        if join {
            sql.push_str(" JOIN s ON r.a = s.a");
        }
        if let Some((v, col)) = filter {
            sql.push_str(&format!(" WHERE r.{} = '{v}'", ["b", "c"][col]));
        }
        sql
    })
}

/// Sources that return `ssn`, `name` and `other`, so any target fits.
fn person_source() -> impl Strategy<Value = String> {
    (any::<bool>(), prop::option::of("[a-z]{1,3}")).prop_map(|(join, filter)| {
        let mut sql = if join {
            "SELECT person.ssn, person.name, knows.other FROM person JOIN knows ON person.ssn = knows.ssn".to_string()
        } else {
            "SELECT ssn, name, other FROM person".to_string()
        };
        if let Some(v) = filter {
            sql.push_str(&format!(" WHERE name = '{v}'"));
        }
        sql
    })
}

fn obda() -> impl Strategy<Value = String> {
    let block = (
        prop::sample::select(vec![
            ":person/{ssn} a :Person .",
            ":person/{ssn} :name {name} .",
            ":person/{ssn} :name {name}@en ; a :Person .",
            ":person/{ssn} :knows :person/{other} .",
            "<http://x.org/{ssn}/{other}> a :Pair .",
            "ex:p/{ssn} ex:label \"Mr {name}\" .",
        ]),
        person_source(),
    );
    prop::collection::btree_map("[a-z][a-z0-9]{0,5}", block, 1..5).prop_map(|blocks| {
        let mut s = String::from("[PrefixDeclaration]\n:\thttp://example.org/\nex:\thttp://ex.org/v#\n\n[MappingDeclaration] @collection [[\n");
        for (id, (target, sql)) in blocks {
            s.push_str(&format!("mappingId\t{id}\ntarget\t\t{target}\nsource\t\t{sql}\n\n"));
        }
        s.push_str("]]\n");
        s
    })
}

proptest! {
    #[test]
    fn normalization_is_idempotent(sql in select()) {
        let q = parse_select(&sql).unwrap();
        let once = normalize_query(&q).unwrap();
        prop_assert_eq!(normalize_query(&once).unwrap(), once);
    }

    #[test]
    fn ddl_round_trips(text in ddl()) {
        let schema = parse_ddl(&text).unwrap();
        let again = parse_ddl(&emit_ddl(&schema)).unwrap();
        prop_assert_eq!(&schema.tables, &again.tables);
        prop_assert_eq!(emit_ddl(&again), emit_ddl(&schema));
    }

    #[test]
    fn obda_round_trips(text in obda()) {
        let doc = parse_obda(&text).unwrap();
        let emitted = emit_obda(&doc.assertions, &doc.prefixes).unwrap();
        let again = parse_obda(&emitted).unwrap();
        prop_assert_eq!(&doc.assertions, &again.assertions);
        prop_assert_eq!(&doc.prefixes, &again.prefixes);
        prop_assert_eq!(emit_obda(&again.assertions, &again.prefixes).unwrap(), emitted);
    }

    /// With a separator between placeholders, distinct value tuples render
    /// distinct IRIs, whatever characters the values contain.
    #[test]
    fn templates_render_injectively(
        rows in prop::collection::btree_set(("\\PC{0,6}", "\\PC{0,6}"), 1..20),
        sep in prop::sample::select(vec!["/", "/x/", "#"]),
    ) {
        let t = IriTemplate::parse(&format!(":t/{{a}}{sep}{{b}}"), "T").unwrap();
        let rendered: BTreeSet<String> = rows
            .iter()
            .filter(|(a, b)| !a.is_empty() && !b.is_empty())
            .map(|(a, b)| {
                let row: BTreeMap<&str, Value> = [("a", Some(a.clone())), ("b", Some(b.clone()))].into();
                t.render(|p| row.get(p).cloned()).unwrap()
            })
            .collect();
        let distinct = rows.iter().filter(|(a, b)| !a.is_empty() && !b.is_empty()).count();
        prop_assert_eq!(rendered.len(), distinct);
    }
}
