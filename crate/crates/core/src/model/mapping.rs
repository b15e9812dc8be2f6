use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::query::{ProjExpr, SourceQuery};
use super::schema::RelationalSchema;
use super::template::{IriTemplate, LiteralTemplate};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum AtomKind {
    Class,
    ObjectProperty,
    DataProperty,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ObjectTerm {
    Iri(IriTemplate),
    Literal(LiteralTemplate),
    /// Bare answer variable, `{col}` in Ontop syntax.
    Column(String),
}

/// `C(t)`, `p(t1, t2)` or `d(t1, t2)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TargetAtom {
    pub kind: AtomKind,
    /// Prefixed name, e.g. `:Person`.
    pub predicate: String,
    pub subject: IriTemplate,
    pub object: Option<ObjectTerm>,
}

impl TargetAtom {
    pub fn class(predicate: impl Into<String>, subject: IriTemplate) -> Self {
        TargetAtom {
            kind: AtomKind::Class,
            predicate: predicate.into(),
            subject,
            object: None,
        }
    }

    pub fn object_property(predicate: impl Into<String>, subject: IriTemplate, object: IriTemplate) -> Self {
        TargetAtom {
            kind: AtomKind::ObjectProperty,
            predicate: predicate.into(),
            subject,
            object: Some(ObjectTerm::Iri(object)),
        }
    }

    pub fn data_column(predicate: impl Into<String>, subject: IriTemplate, column: impl Into<String>) -> Self {
        TargetAtom {
            kind: AtomKind::DataProperty,
            predicate: predicate.into(),
            subject,
            object: Some(ObjectTerm::Column(column.into())),
        }
    }

    pub fn data_literal(predicate: impl Into<String>, subject: IriTemplate, literal: LiteralTemplate) -> Self {
        TargetAtom {
            kind: AtomKind::DataProperty,
            predicate: predicate.into(),
            subject,
            object: Some(ObjectTerm::Literal(literal)),
        }
    }

    /// Every answer variable the atom mentions.
    pub fn variables(&self) -> Vec<&str> {
        let mut v = self.subject.placeholders();
        match &self.object {
            Some(ObjectTerm::Iri(t)) => v.extend(t.placeholders()),
            Some(ObjectTerm::Literal(l)) => v.extend(l.placeholders()),
            Some(ObjectTerm::Column(c)) => v.push(c),
            None => {}
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        let ok = matches!(
            (self.kind, &self.object),
            (AtomKind::Class, None)
                | (AtomKind::ObjectProperty, Some(ObjectTerm::Iri(_)))
                | (AtomKind::DataProperty, Some(ObjectTerm::Literal(_) | ObjectTerm::Column(_)))
        );
        if ok {
            Ok(())
        } else {
            Err(Error::MalformedQuery(format!(
                "target atom {} has an object of the wrong kind",
                self.predicate
            )))
        }
    }
}

impl fmt::Display for TargetAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.object {
            None => write!(f, "{}({})", self.predicate, self.subject),
            Some(ObjectTerm::Iri(o)) => write!(f, "{}({}, {o})", self.predicate, self.subject),
            Some(ObjectTerm::Column(c)) => write!(f, "{}({}, {{{c}}})", self.predicate, self.subject),
            Some(ObjectTerm::Literal(l)) => {
                write!(f, "{}({}, \"{}\"", self.predicate, self.subject, l.body())?;
                if let Some(tag) = &l.language {
                    write!(f, "@{tag}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingAssertion {
    pub id: String,
    pub source: SourceQuery,
    pub targets: Vec<TargetAtom>,
}

/// Output column names of `q`, when they can be determined.
pub fn output_columns(q: &SourceQuery, schema: Option<&RelationalSchema>) -> Option<Vec<String>> {
    match q {
        SourceQuery::Project { items, input } => {
            let mut out = Vec::new();
            for i in items {
                match &i.expr {
                    ProjExpr::AllOf(r) => out.extend(schema?.columns_of(r)?),
                    _ => out.push(i.alias.clone()),
                }
            }
            let _ = input;
            Some(out)
        }
        SourceQuery::Select { input, .. } => output_columns(input, schema),
        SourceQuery::Join { left, right, .. } => {
            let mut l = output_columns(left, schema)?;
            l.extend(output_columns(right, schema)?);
            Some(l)
        }
        SourceQuery::Base(n) => schema?.columns_of(n),
        SourceQuery::Opaque(_) => None,
    }
}

impl MappingAssertion {
    /// Checks non-empty targets, atom shapes, and that every template
    /// variable is an output column of the source. Opaque sources skip the
    /// coverage check.
    pub fn validate(&self, schema: Option<&RelationalSchema>) -> Result<()> {
        if self.targets.is_empty() {
            return Err(Error::MalformedQuery(format!("mapping `{}` has no target", self.id)));
        }
        for t in &self.targets {
            t.validate()?;
        }
        if self.source.is_opaque() {
            return Ok(());
        }
        let Some(cols) = output_columns(&self.source, schema) else {
            return Err(Error::MalformedQuery(format!(
                "cannot determine output columns of mapping `{}`",
                self.id
            )));
        };
        let cols: BTreeSet<&str> = cols.iter().map(String::as_str).collect();
        for t in &self.targets {
            if let Some(v) = t.variables().into_iter().find(|v| !cols.contains(v)) {
                return Err(Error::MalformedQuery(format!(
                    "mapping `{}` uses `{v}` which its source does not return",
                    self.id
                )));
            }
        }
        Ok(())
    }
}
