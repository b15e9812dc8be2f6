use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::query::SourceQuery;
use crate::error::{Error, Result};

/// Strips SQL identifier quoting. Matching stays case-sensitive.
pub fn normalize_ident(raw: &str) -> String {
    let s = raw.trim();
    if s.len() >= 2 {
        let bytes = s.as_bytes();
        let (open, close) = (bytes[0], bytes[s.len() - 1]);
        if (open == b'"' && close == b'"') || (open == b'`' && close == b'`') {
            let quote = open as char;
            let doubled: String = [quote, quote].iter().collect();
            return s[1..s.len() - 1].replace(&doubled, &quote.to_string());
        }
        if open == b'[' && close == b']' {
            return s[1..s.len() - 1].to_string();
        }
    }
    s.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub nullable: bool,
}

impl Attribute {
    pub fn new(name: impl Into<String>, nullable: bool) -> Self {
        Attribute {
            name: name.into(),
            nullable,
        }
    }
}

/// Ordered list of attribute names. Order matters for key/foreign-key
/// correspondence: position i of a source matches position i of its target.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AttributeSet(pub Vec<String>);

impl AttributeSet {
    pub fn new<I, S>(attrs: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        AttributeSet(attrs.into_iter().map(Into::into).collect())
    }

    pub fn empty() -> Self {
        AttributeSet(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, String> {
        self.0.iter()
    }

    pub fn contains(&self, attr: &str) -> bool {
        self.0.iter().any(|a| a == attr)
    }

    pub fn as_set(&self) -> BTreeSet<&str> {
        self.0.iter().map(String::as_str).collect()
    }

    /// Set equality, ignoring order.
    pub fn same_set(&self, other: &AttributeSet) -> bool {
        self.len() == other.len() && self.as_set() == other.as_set()
    }

    pub fn is_subset_of(&self, other: &AttributeSet) -> bool {
        self.0.iter().all(|a| other.contains(a))
    }

    pub fn is_disjoint(&self, other: &AttributeSet) -> bool {
        !self.0.iter().any(|a| other.contains(a))
    }

    /// Copy with attributes in lexicographic order.
    pub fn sorted(&self) -> AttributeSet {
        let mut v = self.0.clone();
        v.sort();
        AttributeSet(v)
    }

    pub fn has_duplicates(&self) -> bool {
        let mut seen = HashSet::new();
        !self.0.iter().all(|a| seen.insert(a))
    }
}

impl fmt::Display for AttributeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.join(","))
    }
}

impl<S: Into<String>> FromIterator<S> for AttributeSet {
    fn from_iter<T: IntoIterator<Item = S>>(iter: T) -> Self {
        AttributeSet::new(iter)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ForeignKey {
    pub source: AttributeSet,
    #[serde(rename = "targetTable")]
    pub target_table: String,
    pub target: AttributeSet,
    /// `false` marks a reference discovered in the data.
    #[serde(default = "default_true")]
    pub declared: bool,
}

fn default_true() -> bool {
    true
}

impl ForeignKey {
    pub fn new(source: AttributeSet, target_table: impl Into<String>, target: AttributeSet) -> Self {
        ForeignKey {
            source,
            target_table: target_table.into(),
            target,
            declared: true,
        }
    }

    pub fn discovered(mut self) -> Self {
        self.declared = false;
        self
    }
}

/// One position of an inclusion-dependency source projection.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProjTerm {
    Attr(String),
    Const(String),
}

impl ProjTerm {
    pub fn as_attr(&self) -> Option<&str> {
        match self {
            ProjTerm::Attr(a) => Some(a),
            ProjTerm::Const(_) => None,
        }
    }
}

impl fmt::Display for ProjTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjTerm::Attr(a) => write!(f, "{a}"),
            ProjTerm::Const(c) => write!(f, "'{c}'"),
        }
    }
}

/// `π_{sourceProjection}(sourceTable) ⊆ π_{target}(targetTable)`, where the
/// source projection may contain constants.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InclusionDependency {
    #[serde(rename = "sourceTable")]
    pub source_table: String,
    #[serde(rename = "sourceProjection")]
    pub source_projection: Vec<ProjTerm>,
    #[serde(rename = "targetTable")]
    pub target_table: String,
    pub target: AttributeSet,
    #[serde(default = "default_true")]
    pub declared: bool,
}

impl InclusionDependency {
    pub fn constants(&self) -> impl Iterator<Item = (&str, &str)> {
        self.source_projection
            .iter()
            .zip(self.target.iter())
            .filter_map(|(s, t)| match s {
                ProjTerm::Const(c) => Some((t.as_str(), c.as_str())),
                ProjTerm::Attr(_) => None,
            })
    }

    pub fn source_attrs(&self) -> AttributeSet {
        self.source_projection
            .iter()
            .filter_map(|p| p.as_attr().map(str::to_string))
            .collect()
    }

    pub fn has_constant(&self) -> bool {
        self.source_projection
            .iter()
            .any(|p| matches!(p, ProjTerm::Const(_)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FunctionalDependency {
    pub table: String,
    /// May be empty: `∅ → c` records a constant column.
    pub determinant: AttributeSet,
    pub dependent: AttributeSet,
}

impl fmt::Display for FunctionalDependency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} -> {}",
            self.table, self.determinant, self.dependent
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub attributes: Vec<Attribute>,
    #[serde(rename = "primaryKey")]
    pub primary_key: Option<AttributeSet>,
    #[serde(rename = "uniqueKeys")]
    pub unique_keys: Vec<AttributeSet>,
    #[serde(rename = "foreignKeys")]
    pub foreign_keys: Vec<ForeignKey>,
    #[serde(rename = "inclusionDeps")]
    pub inclusion_deps: Vec<InclusionDependency>,
}

impl Table {
    pub fn new(name: impl Into<String>) -> Self {
        Table {
            name: name.into(),
            attributes: Vec::new(),
            primary_key: None,
            unique_keys: Vec::new(),
            foreign_keys: Vec::new(),
            inclusion_deps: Vec::new(),
        }
    }

    pub fn attr_names(&self) -> Vec<String> {
        self.attributes.iter().map(|a| a.name.clone()).collect()
    }

    pub fn has_attr(&self, name: &str) -> bool {
        self.attributes.iter().any(|a| a.name == name)
    }

    pub fn attr_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    /// Checks the per-table invariants.
    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for a in &self.attributes {
            if !seen.insert(a.name.as_str()) {
                return Err(Error::InvalidSchema(format!(
                    "duplicate attribute `{}` in table `{}`",
                    a.name, self.name
                )));
            }
        }
        let owned = |set: &AttributeSet, what: &str| -> Result<()> {
            if set.has_duplicates() {
                return Err(Error::InvalidSchema(format!(
                    "{what} {set} of `{}` repeats an attribute",
                    self.name
                )));
            }
            match set.iter().find(|a| !self.has_attr(a)) {
                Some(a) => Err(Error::InvalidSchema(format!(
                    "{what} of `{}` mentions unknown attribute `{a}`",
                    self.name
                ))),
                None => Ok(()),
            }
        };
        if let Some(pk) = &self.primary_key {
            if pk.is_empty() {
                return Err(Error::InvalidSchema(format!(
                    "empty primary key in `{}`",
                    self.name
                )));
            }
            owned(pk, "primary key")?;
        }
        for (i, uk) in self.unique_keys.iter().enumerate() {
            owned(uk, "unique key")?;
            if uk.is_empty() {
                return Err(Error::InvalidSchema(format!(
                    "empty unique key in `{}`",
                    self.name
                )));
            }
            if self.primary_key.as_ref().is_some_and(|pk| pk.same_set(uk)) {
                return Err(Error::InvalidSchema(format!(
                    "unique key {uk} of `{}` repeats the primary key",
                    self.name
                )));
            }
            if self.unique_keys[..i].iter().any(|o| o.same_set(uk)) {
                return Err(Error::InvalidSchema(format!(
                    "duplicate unique key {uk} in `{}`",
                    self.name
                )));
            }
        }
        for fk in &self.foreign_keys {
            owned(&fk.source, "foreign key")?;
        }
        for ind in &self.inclusion_deps {
            for a in ind.source_projection.iter().filter_map(ProjTerm::as_attr) {
                if !self.has_attr(a) {
                    return Err(Error::InvalidSchema(format!(
                        "inclusion dependency of `{}` mentions unknown attribute `{a}`",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_key(&self, set: &AttributeSet) -> bool {
        self.primary_key.as_ref().is_some_and(|pk| pk.same_set(set))
            || self.unique_keys.iter().any(|u| u.same_set(set))
    }
}

/// Accessory view produced by a pattern application.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViewDef {
    pub name: String,
    pub expr: SourceQuery,
    pub columns: Vec<String>,
    #[serde(rename = "primaryKey")]
    pub primary_key: Option<AttributeSet>,
    #[serde(rename = "declaredKeys")]
    pub declared_keys: Vec<AttributeSet>,
    #[serde(rename = "foreignKeys")]
    pub foreign_keys: Vec<ForeignKey>,
    /// Keys come from constraints discovered in the data.
    pub discovered: bool,
    /// Whether the view takes part in later detection rounds as a main table.
    pub cascade: bool,
    /// Class the view's rows populate, when the emitting pattern fixes it.
    #[serde(rename = "entityClass")]
    pub entity_class: Option<String>,
    /// Relation whose IRI template identifies the view's rows.
    #[serde(rename = "templateOwner")]
    pub template_owner: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationalSchema {
    pub name: String,
    pub tables: Vec<Table>,
    pub views: Vec<ViewDef>,
}

impl RelationalSchema {
    pub fn new(name: impl Into<String>) -> Self {
        RelationalSchema {
            name: name.into(),
            tables: Vec::new(),
            views: Vec::new(),
        }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn table_mut(&mut self, name: &str) -> Option<&mut Table> {
        self.tables.iter_mut().find(|t| t.name == name)
    }

    pub fn view(&self, name: &str) -> Option<&ViewDef> {
        self.views.iter().find(|v| v.name == name)
    }

    pub fn has_relation(&self, name: &str) -> bool {
        self.table(name).is_some() || self.view(name).is_some()
    }

    /// Column names of a table or view.
    pub fn columns_of(&self, name: &str) -> Option<Vec<String>> {
        self.table(name)
            .map(Table::attr_names)
            .or_else(|| self.view(name).map(|v| v.columns.clone()))
    }

    /// Checks every schema invariant: unique names, per-table invariants,
    /// references resolving to existing relations with equal arity, and views
    /// referring only to earlier relations.
    pub fn validate(&self) -> Result<()> {
        let mut names = HashSet::new();
        for t in &self.tables {
            if !names.insert(t.name.as_str()) {
                return Err(Error::InvalidSchema(format!("duplicate table `{}`", t.name)));
            }
            t.validate()?;
        }
        for t in &self.tables {
            for fk in &t.foreign_keys {
                self.check_reference(&t.name, &fk.source, &fk.target_table, &fk.target)?;
            }
            for ind in &t.inclusion_deps {
                if ind.source_table != t.name {
                    return Err(Error::InvalidSchema(format!(
                        "inclusion dependency stored on `{}` names source `{}`",
                        t.name, ind.source_table
                    )));
                }
                if ind.source_projection.len() != ind.target.len() {
                    return Err(Error::DanglingReference(format!(
                        "inclusion dependency {} -> {}{}: arity mismatch",
                        t.name, ind.target_table, ind.target
                    )));
                }
                let target = self.columns_of(&ind.target_table).ok_or_else(|| {
                    Error::DanglingReference(format!(
                        "inclusion dependency {} -> unknown table `{}`",
                        t.name, ind.target_table
                    ))
                })?;
                if let Some(a) = ind.target.iter().find(|a| !target.contains(a)) {
                    return Err(Error::DanglingReference(format!(
                        "inclusion dependency {} -> {}.{a}: unknown attribute",
                        t.name, ind.target_table
                    )));
                }
            }
        }
        let mut seen: HashSet<&str> = self.tables.iter().map(|t| t.name.as_str()).collect();
        for v in &self.views {
            if !seen.insert(v.name.as_str()) {
                return Err(Error::InvalidSchema(format!(
                    "view `{}` clashes with an existing relation",
                    v.name
                )));
            }
            for r in v.expr.relations() {
                if r == v.name || !self.has_relation(&r) {
                    return Err(Error::DanglingReference(format!(
                        "view `{}` references unknown relation `{r}`",
                        v.name
                    )));
                }
            }
            for fk in &v.foreign_keys {
                self.check_reference(&v.name, &fk.source, &fk.target_table, &fk.target)?;
            }
        }
        Ok(())
    }

    fn check_reference(
        &self,
        from: &str,
        source: &AttributeSet,
        target_table: &str,
        target: &AttributeSet,
    ) -> Result<()> {
        let describe = || format!("{from}{source} -> {target_table}{target}");
        if source.len() != target.len() || source.is_empty() {
            return Err(Error::DanglingReference(format!("{}: arity mismatch", describe())));
        }
        let cols = self
            .columns_of(target_table)
            .ok_or_else(|| Error::DanglingReference(format!("{}: unknown table", describe())))?;
        if target.iter().any(|a| !cols.contains(a)) {
            return Err(Error::DanglingReference(format!(
                "{}: unknown target attribute",
                describe()
            )));
        }
        Ok(())
    }
}
