//! Ontop-style mapping files:
//!
//! ```text
//! [PrefixDeclaration]
//! :       http://example.org/
//!
//! [MappingDeclaration] @collection [[
//! mappingId   mPerson
//! target      :person/{ssn} a :Person ; :name {name} .
//! source      SELECT "ssn", "name" FROM "person_info"
//! ]]
//! ```

use std::collections::BTreeMap;

use super::sql::{parse_select, render_sql};
use crate::error::{Error, Result};
use crate::model::{
    AtomKind, IriTemplate, LiteralTemplate, MappingAssertion, ObjectTerm, Segment, SourceQuery, TargetAtom,
};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ObdaDocument {
    pub prefixes: BTreeMap<String, String>,
    pub assertions: Vec<MappingAssertion>,
    /// Source SQL text per mapping id, as written.
    pub raw_sources: BTreeMap<String, String>,
    /// Why a source was kept opaque, per mapping id.
    pub unsupported: BTreeMap<String, String>,
}

fn syntax(block: &str, reason: impl Into<String>) -> Error {
    Error::ObdaSyntax {
        block: block.to_string(),
        reason: reason.into(),
    }
}

#[derive(PartialEq)]
enum Section {
    None,
    Prefixes,
    Mappings,
}

pub fn parse_obda(text: &str) -> Result<ObdaDocument> {
    let mut doc = ObdaDocument::default();
    let mut section = Section::None;
    let mut blocks: Vec<Vec<(String, String)>> = Vec::new();
    let mut current: Vec<(String, String)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.starts_with("[PrefixDeclaration]") {
            section = Section::Prefixes;
            continue;
        }
        if line.starts_with("[MappingDeclaration]") {
            section = Section::Mappings;
            continue;
        }
        match section {
            Section::None => {
                if !line.is_empty() {
                    return Err(syntax(&format!("line {}", lineno + 1), "content outside any section"));
                }
            }
            Section::Prefixes => {
                if line.is_empty() {
                    continue;
                }
                let mut parts = line.split_whitespace();
                let (Some(p), Some(iri), None) = (parts.next(), parts.next(), parts.next()) else {
                    return Err(syntax(&format!("line {}", lineno + 1), "bad prefix declaration"));
                };
                let Some(name) = p.strip_suffix(':') else {
                    return Err(syntax(&format!("line {}", lineno + 1), "prefix must end with `:`"));
                };
                let iri = iri.trim_start_matches('<').trim_end_matches('>');
                doc.prefixes.insert(name.to_string(), iri.to_string());
            }
            Section::Mappings => {
                if line.is_empty() || line == "]]" {
                    if !current.is_empty() {
                        blocks.push(std::mem::take(&mut current));
                    }
                    continue;
                }
                let (key, rest) = match line.split_once(char::is_whitespace) {
                    Some((k, r)) => (k, r.trim()),
                    None => (line, ""),
                };
                match key {
                    "mappingId" => {
                        if !current.is_empty() {
                            blocks.push(std::mem::take(&mut current));
                        }
                        current.push((key.to_string(), rest.to_string()));
                    }
                    "target" | "source" => current.push((key.to_string(), rest.to_string())),
                    _ => match current.last_mut() {
                        Some((_, v)) => {
                            v.push(' ');
                            v.push_str(line);
                        }
                        None => return Err(syntax(&format!("line {}", lineno + 1), format!("unexpected `{line}`"))),
                    },
                }
            }
        }
    }
    if !current.is_empty() {
        blocks.push(current);
    }
    for block in blocks {
        let get = |k: &str| block.iter().find(|(key, _)| key == k).map(|(_, v)| v.clone());
        let id = get("mappingId").ok_or_else(|| syntax("?", "block without mappingId"))?;
        if doc.raw_sources.contains_key(&id) {
            return Err(syntax(&id, "duplicate mappingId"));
        }
        let target = get("target").ok_or_else(|| syntax(&id, "missing target"))?;
        let source_text = get("source").ok_or_else(|| syntax(&id, "missing source"))?;
        let targets = parse_target(&target).map_err(|r| syntax(&id, r))?;
        for t in &targets {
            check_prefixes(t, &doc.prefixes).map_err(|r| syntax(&id, r))?;
        }
        let source = match parse_select(&source_text) {
            Ok(q) => q,
            Err(reason) => {
                doc.unsupported.insert(id.clone(), reason);
                SourceQuery::Opaque(source_text.trim().to_string())
            }
        };
        doc.raw_sources.insert(id.clone(), source_text);
        let assertion = MappingAssertion { id, source, targets };
        assertion.validate(None).or_else(|e| match e {
            // coverage needs the schema when sources use `*`
            Error::MalformedQuery(m) if m.starts_with("cannot determine") => Ok(()),
            e => Err(e),
        })?;
        doc.assertions.push(assertion);
    }
    Ok(doc)
}

fn check_prefixes(t: &TargetAtom, prefixes: &BTreeMap<String, String>) -> std::result::Result<(), String> {
    let mut used = vec![t.predicate.split_once(':').map(|(p, _)| p.to_string())];
    let base = |tpl: &IriTemplate| (!tpl.is_absolute()).then(|| tpl.base.trim_end_matches(':').to_string());
    used.push(base(&t.subject));
    if let Some(ObjectTerm::Iri(o)) = &t.object {
        used.push(base(o));
    }
    match used.into_iter().flatten().find(|p| !prefixes.contains_key(p)) {
        Some(p) => Err(format!("undeclared prefix `{p}:`")),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TTok {
    Term(String),
    Literal { body: String, tag: Option<String> },
    Sym(char),
}

fn lex_target(s: &str) -> std::result::Result<Vec<TTok>, String> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == ';' || c == ',' {
            out.push(TTok::Sym(c));
            i += 1;
        } else if c == '.' && chars.get(i + 1).is_none_or(|n| n.is_whitespace()) {
            out.push(TTok::Sym('.'));
            i += 1;
        } else if c == '"' {
            let mut body = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err("unterminated literal".into()),
                    Some('\\') => {
                        let e = chars.get(i + 1).ok_or("dangling escape")?;
                        body.push(match e {
                            'n' => '\n',
                            't' => '\t',
                            'r' => '\r',
                            other => *other,
                        });
                        i += 2;
                    }
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some(&ch) => {
                        body.push(ch);
                        i += 1;
                    }
                }
            }
            let tag = read_suffix(&chars, &mut i)?;
            out.push(TTok::Literal { body, tag });
        } else {
            let mut term = String::new();
            let mut depth = 0;
            let mut angle = false;
            while i < chars.len() {
                let ch = chars[i];
                match ch {
                    '{' => depth += 1,
                    '}' => depth -= 1,
                    '<' if depth == 0 => angle = true,
                    '>' if depth == 0 => angle = false,
                    _ => {}
                }
                if depth == 0 && !angle && (ch.is_whitespace() || ch == ';' || ch == ',') {
                    break;
                }
                if depth == 0 && !angle && ch == '@' || depth == 0 && !angle && ch == '^' {
                    break;
                }
                term.push(ch);
                i += 1;
            }
            let mut trailing_dot = false;
            if term.ends_with('.') && !term.ends_with("}.") || term.ends_with("}.") {
                term.pop();
                trailing_dot = true;
            }
            if term.is_empty() {
                return Err(format!("unexpected `{}`", chars[i]));
            }
            let tag = read_suffix(&chars, &mut i)?;
            match tag {
                Some(t) => out.push(TTok::Literal {
                    body: format!("\u{0}{term}"),
                    tag: Some(t),
                }),
                None => out.push(TTok::Term(term)),
            }
            if trailing_dot {
                out.push(TTok::Sym('.'));
            }
        }
    }
    Ok(out)
}

/// Reads `@tag` (returned) or `^^datatype` (dropped) after a term.
fn read_suffix(chars: &[char], i: &mut usize) -> std::result::Result<Option<String>, String> {
    if chars.get(*i) == Some(&'@') {
        *i += 1;
        let start = *i;
        while *i < chars.len() && (chars[*i].is_alphanumeric() || chars[*i] == '-') {
            *i += 1;
        }
        if *i == start {
            return Err("empty language tag".into());
        }
        return Ok(Some(chars[start..*i].iter().collect()));
    }
    if chars.get(*i) == Some(&'^') && chars.get(*i + 1) == Some(&'^') {
        *i += 2;
        while *i < chars.len() && !chars[*i].is_whitespace() && chars[*i] != ';' && chars[*i] != ',' {
            *i += 1;
        }
        if *i > 0 && chars[*i - 1] == '.' && chars.get(*i).is_none_or(|c| c.is_whitespace()) {
            *i -= 1;
        }
    }
    Ok(None)
}

enum Obj {
    Iri(IriTemplate),
    Column(String),
    Literal(LiteralTemplate),
}

fn parse_iri(term: &str) -> std::result::Result<IriTemplate, String> {
    IriTemplate::parse(term, "")
}

fn parse_object(tok: &TTok) -> std::result::Result<Obj, String> {
    match tok {
        TTok::Literal { body, tag } => {
            if let Some(term) = body.strip_prefix('\u{0}') {
                // unquoted `{col}@tag`
                let segments = crate::model::template::parse_segments(term)?;
                return Ok(Obj::Literal(LiteralTemplate {
                    segments,
                    language: tag.clone(),
                    invention: None,
                }));
            }
            let mut segments = crate::model::template::parse_segments(body)?;
            if segments.is_empty() {
                segments.push(Segment::Literal(String::new()));
            }
            Ok(Obj::Literal(LiteralTemplate {
                segments,
                language: tag.clone(),
                invention: None,
            }))
        }
        TTok::Term(t) => {
            if t.starts_with('{') && t.ends_with('}') && t[1..t.len() - 1].find(['{', '}']).is_none() {
                Ok(Obj::Column(crate::model::normalize_ident(&t[1..t.len() - 1])))
            } else {
                parse_iri(t).map(Obj::Iri)
            }
        }
        TTok::Sym(c) => Err(format!("unexpected `{c}`")),
    }
}

/// Parses the triples of a target line into atoms.
pub fn parse_target(text: &str) -> std::result::Result<Vec<TargetAtom>, String> {
    let toks = lex_target(text)?;
    let mut atoms = Vec::new();
    let mut i = 0;
    while i < toks.len() {
        let TTok::Term(subj) = &toks[i] else {
            return Err("subject must be an IRI template".into());
        };
        let subject = parse_iri(subj)?;
        i += 1;
        loop {
            let Some(TTok::Term(pred)) = toks.get(i) else {
                return Err("missing predicate".into());
            };
            i += 1;
            loop {
                let obj = toks.get(i).ok_or("missing object")?;
                i += 1;
                if pred == "a" {
                    let TTok::Term(class) = obj else {
                        return Err("class must be a name".into());
                    };
                    atoms.push(TargetAtom::class(class.clone(), subject.clone()));
                } else {
                    atoms.push(match parse_object(obj)? {
                        Obj::Iri(o) => TargetAtom::object_property(pred.clone(), subject.clone(), o),
                        Obj::Column(c) => TargetAtom::data_column(pred.clone(), subject.clone(), c),
                        Obj::Literal(l) => TargetAtom::data_literal(pred.clone(), subject.clone(), l),
                    });
                }
                if toks.get(i) == Some(&TTok::Sym(',')) {
                    i += 1;
                } else {
                    break;
                }
            }
            match toks.get(i) {
                Some(TTok::Sym(';')) => {
                    i += 1;
                    // tolerate `;` right before `.`
                    if toks.get(i) == Some(&TTok::Sym('.')) {
                        i += 1;
                        break;
                    }
                }
                Some(TTok::Sym('.')) => {
                    i += 1;
                    break;
                }
                None => break,
                Some(other) => return Err(format!("unexpected {other:?}")),
            }
        }
    }
    if atoms.is_empty() {
        return Err("empty target".into());
    }
    Ok(atoms)
}

fn object_text(o: &ObjectTerm) -> String {
    match o {
        ObjectTerm::Iri(t) => t.text(),
        ObjectTerm::Column(c) => format!("{{{c}}}"),
        ObjectTerm::Literal(l) => {
            let single_col = matches!(l.segments.as_slice(), [Segment::Placeholder(_)]);
            match (&l.language, single_col) {
                (Some(tag), true) => format!("{}@{tag}", l.body()),
                (tag, _) => {
                    let mut s = format!("\"{}\"", crate::model::template::escape_literal(&l.body()));
                    if let Some(tag) = tag {
                        s.push('@');
                        s.push_str(tag);
                    }
                    s
                }
            }
        }
    }
}

/// Target line: atoms grouped by subject in order of first appearance.
pub fn target_text(targets: &[TargetAtom]) -> String {
    let mut subjects: Vec<&IriTemplate> = Vec::new();
    for t in targets {
        if !subjects.contains(&&t.subject) {
            subjects.push(&t.subject);
        }
    }
    subjects
        .iter()
        .map(|s| {
            let pos: Vec<String> = targets
                .iter()
                .filter(|t| &t.subject == *s)
                .map(|t| match t.kind {
                    AtomKind::Class => format!("a {}", t.predicate),
                    _ => format!("{} {}", t.predicate, object_text(t.object.as_ref().expect("validated atom"))),
                })
                .collect();
            format!("{} {} .", s.text(), pos.join(" ; "))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Byte-deterministic OBDA document.
pub fn emit_obda(assertions: &[MappingAssertion], prefixes: &BTreeMap<String, String>) -> Result<String> {
    let mut out = String::from("[PrefixDeclaration]\n");
    for (p, iri) in prefixes {
        out.push_str(&format!("{p}:\t{iri}\n"));
    }
    out.push_str("\n[MappingDeclaration] @collection [[\n");
    for (i, a) in assertions.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&format!("mappingId\t{}\n", a.id));
        out.push_str(&format!("target\t\t{}\n", target_text(&a.targets)));
        out.push_str(&format!("source\t\t{}\n", render_sql(&a.source)?));
    }
    out.push_str("]]\n");
    Ok(out)
}
