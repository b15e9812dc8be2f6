//! IRI and literal templates in the `{placeholder}` convention shared by
//! Ontop mapping files and R2RML.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use super::data::Value;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Segment {
    Literal(String),
    Placeholder(String),
}

fn segments_text(segments: &[Segment]) -> String {
    let mut s = String::new();
    for seg in segments {
        match seg {
            Segment::Literal(l) => s.push_str(l),
            Segment::Placeholder(p) => {
                let _ = write!(s, "{{{p}}}");
            }
        }
    }
    s
}

/// Splits `a{x}b{y}` into segments. Braces cannot nest.
pub fn parse_segments(text: &str) -> std::result::Result<Vec<Segment>, String> {
    let mut out = Vec::new();
    let mut lit = String::new();
    let mut chars = text.chars();
    while let Some(c) = chars.next() {
        match c {
            '{' => {
                if !lit.is_empty() {
                    out.push(Segment::Literal(std::mem::take(&mut lit)));
                }
                let mut name = String::new();
                loop {
                    match chars.next() {
                        Some('}') => break,
                        Some('{') | None => return Err(format!("unbalanced braces in `{text}`")),
                        Some(ch) => name.push(ch),
                    }
                }
                let name = super::schema::normalize_ident(&name);
                if name.is_empty() {
                    return Err(format!("empty placeholder in `{text}`"));
                }
                out.push(Segment::Placeholder(name));
            }
            '}' => return Err(format!("unbalanced braces in `{text}`")),
            _ => lit.push(c),
        }
    }
    if !lit.is_empty() {
        out.push(Segment::Literal(lit));
    }
    Ok(out)
}

fn placeholders_of(segments: &[Segment]) -> Vec<&str> {
    segments
        .iter()
        .filter_map(|s| match s {
            Segment::Placeholder(p) => Some(p.as_str()),
            Segment::Literal(_) => None,
        })
        .collect()
}

/// Percent-encodes the characters that would let a value forge template
/// structure: `/ # ? { } %` and whitespace.
pub fn escape_iri_value(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for c in value.chars() {
        if matches!(c, '/' | '#' | '?' | '{' | '}' | '%') || c.is_whitespace() {
            let mut buf = [0u8; 4];
            for b in c.encode_utf8(&mut buf).bytes() {
                let _ = write!(out, "%{b:02X}");
            }
        } else {
            out.push(c);
        }
    }
    out
}

/// IRI template. `base` is a prefix such as `:` or `npd:`; an empty base
/// marks an absolute IRI written in angle brackets. Equality ignores `owner`,
/// which the text form does not carry.
#[derive(Debug, Clone, Eq, Serialize, Deserialize)]
pub struct IriTemplate {
    pub base: String,
    pub segments: Vec<Segment>,
    /// Conceptual element (class or relation) the template identifies.
    pub owner: String,
}

impl PartialEq for IriTemplate {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.segments == other.segments
    }
}

impl std::hash::Hash for IriTemplate {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.base.hash(state);
        self.segments.hash(state);
    }
}

impl PartialOrd for IriTemplate {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for IriTemplate {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (&self.base, &self.segments).cmp(&(&other.base, &other.segments))
    }
}

impl IriTemplate {
    pub fn new(base: impl Into<String>, segments: Vec<Segment>, owner: impl Into<String>) -> Result<Self> {
        let t = IriTemplate {
            base: base.into(),
            segments,
            owner: owner.into(),
        };
        t.validate()?;
        Ok(t)
    }

    /// Parses `prefix:local/{x}` or `<http://…/{x}>`.
    pub fn parse(text: &str, owner: impl Into<String>) -> std::result::Result<Self, String> {
        let text = text.trim();
        let (base, body) = if let Some(inner) = text.strip_prefix('<') {
            let inner = inner
                .strip_suffix('>')
                .ok_or_else(|| format!("unterminated IRI `{text}`"))?;
            (String::new(), inner)
        } else {
            let colon = text
                .find(':')
                .ok_or_else(|| format!("template `{text}` has no prefix"))?;
            let prefix = &text[..colon];
            if !prefix.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '-') {
                return Err(format!("bad prefix in `{text}`"));
            }
            (text[..=colon].to_string(), &text[colon + 1..])
        };
        let t = IriTemplate {
            base,
            segments: parse_segments(body)?,
            owner: owner.into(),
        };
        t.validate().map_err(|e| e.to_string())?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let ph = placeholders_of(&self.segments);
        if ph.is_empty() {
            return Err(Error::MalformedQuery(format!(
                "template `{}` has no placeholder",
                self.text()
            )));
        }
        let mut sorted = ph.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != ph.len() {
            return Err(Error::MalformedQuery(format!(
                "template `{}` repeats a placeholder",
                self.text()
            )));
        }
        Ok(())
    }

    pub fn placeholders(&self) -> Vec<&str> {
        placeholders_of(&self.segments)
    }

    pub fn is_absolute(&self) -> bool {
        self.base.is_empty()
    }

    /// Text form used in mapping files.
    pub fn text(&self) -> String {
        let body = segments_text(&self.segments);
        if self.is_absolute() {
            format!("<{body}>")
        } else {
            format!("{}{body}", self.base)
        }
    }

    /// Template body with the prefix expanded, for R2RML.
    pub fn expanded(&self, prefixes: &BTreeMap<String, String>) -> String {
        let body = segments_text(&self.segments);
        if self.is_absolute() {
            return body;
        }
        let name = self.base.trim_end_matches(':');
        match prefixes.get(name) {
            Some(iri) => format!("{iri}{body}"),
            None => format!("{}{body}", self.base),
        }
    }

    /// Renders one IRI; values are percent-escaped.
    pub fn render(&self, get: impl Fn(&str) -> Option<Value>) -> Result<String> {
        let mut out = self.base.clone();
        for seg in &self.segments {
            match seg {
                Segment::Literal(l) => out.push_str(l),
                Segment::Placeholder(p) => match get(p).flatten() {
                    Some(v) => out.push_str(&escape_iri_value(&v)),
                    None => return Err(Error::NullInIdentifier(p.clone())),
                },
            }
        }
        Ok(if self.is_absolute() { format!("<{out}>") } else { out })
    }
}

impl fmt::Display for IriTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

/// Finite map from source value tuples to literal text (value invention).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ValueInventionRule {
    pub name: String,
    /// Pairs of (source value tuple, literal text).
    pub mapping: Vec<(Vec<String>, String)>,
}

impl ValueInventionRule {
    pub fn apply(&self, values: &[String]) -> Option<&str> {
        self.mapping
            .iter()
            .find(|(k, _)| k.as_slice() == values)
            .map(|(_, v)| v.as_str())
    }
}

/// Literal template with optional language tag. Equality ignores the
/// invention rule, which mapping files do not carry.
#[derive(Debug, Clone, Eq, Serialize, Deserialize)]
pub struct LiteralTemplate {
    pub segments: Vec<Segment>,
    pub language: Option<String>,
    pub invention: Option<ValueInventionRule>,
}

impl PartialEq for LiteralTemplate {
    fn eq(&self, other: &Self) -> bool {
        self.segments == other.segments && self.language == other.language
    }
}

impl std::hash::Hash for LiteralTemplate {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.segments.hash(state);
        self.language.hash(state);
    }
}

impl PartialOrd for LiteralTemplate {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LiteralTemplate {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (&self.segments, &self.language).cmp(&(&other.segments, &other.language))
    }
}

impl LiteralTemplate {
    pub fn constant(text: impl Into<String>) -> Self {
        LiteralTemplate {
            segments: vec![Segment::Literal(text.into())],
            language: None,
            invention: None,
        }
    }

    pub fn column(name: impl Into<String>, language: Option<String>) -> Self {
        LiteralTemplate {
            segments: vec![Segment::Placeholder(name.into())],
            language,
            invention: None,
        }
    }

    pub fn placeholders(&self) -> Vec<&str> {
        placeholders_of(&self.segments)
    }

    pub fn body(&self) -> String {
        segments_text(&self.segments)
    }

    /// Renders an RDF literal such as `"Bozen"@it`.
    pub fn render(&self, get: impl Fn(&str) -> Option<Value>) -> Result<String> {
        let mut text = String::new();
        for seg in &self.segments {
            match seg {
                Segment::Literal(l) => text.push_str(l),
                Segment::Placeholder(p) => match get(p).flatten() {
                    Some(v) => text.push_str(&v),
                    None => return Err(Error::NullInIdentifier(p.clone())),
                },
            }
        }
        let mut out = format!("\"{}\"", escape_literal(&text));
        if let Some(tag) = &self.language {
            out.push('@');
            out.push_str(tag);
        }
        Ok(out)
    }
}

pub fn escape_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            _ => out.push(c),
        }
    }
    out
}

/// Either kind of template, for [`render_template`].
#[derive(Debug, Clone, Copy)]
pub enum TemplateRef<'a> {
    Iri(&'a IriTemplate),
    Literal(&'a LiteralTemplate),
}

pub fn render_template(t: TemplateRef<'_>, row: &BTreeMap<String, Value>) -> Result<String> {
    let get = |p: &str| row.get(p).cloned();
    match t {
        TemplateRef::Iri(t) => t.render(get),
        TemplateRef::Literal(t) => t.render(get),
    }
}
