//! JSON schema document:
//!
//! ```json
//! { "name": "uni",
//!   "tables": [ { "name": "student",
//!                 "attributes": [{"name": "id", "nullable": false}, {"name": "course_id"}],
//!                 "primaryKey": ["id"],
//!                 "uniqueKeys": [["matr"]],
//!                 "foreignKeys": [{"source": ["course_id"], "targetTable": "course", "target": ["id"]}],
//!                 "inclusionDeps": [{"source": [{"const": "G"}, "id"], "targetTable": "people", "target": ["role", "id"]}] } ] }
//! ```
//!
//! Attributes may also be given as bare strings (nullable unless part of the
//! primary key).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    Attribute, AttributeSet, ForeignKey, InclusionDependency, ProjTerm, RelationalSchema, Table,
};

#[derive(Serialize, Deserialize)]
struct Doc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    tables: Vec<DocTable>,
}

#[derive(Serialize, Deserialize)]
struct DocTable {
    name: String,
    attributes: Vec<DocAttr>,
    #[serde(rename = "primaryKey", default, skip_serializing_if = "Option::is_none")]
    primary_key: Option<Vec<String>>,
    #[serde(rename = "uniqueKeys", default, skip_serializing_if = "Vec::is_empty")]
    unique_keys: Vec<Vec<String>>,
    #[serde(rename = "foreignKeys", default, skip_serializing_if = "Vec::is_empty")]
    foreign_keys: Vec<DocFk>,
    #[serde(rename = "inclusionDeps", default, skip_serializing_if = "Vec::is_empty")]
    inclusion_deps: Vec<DocInd>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum DocAttr {
    Full {
        name: String,
        #[serde(default)]
        nullable: Option<bool>,
    },
    Bare(String),
}

#[derive(Serialize, Deserialize)]
struct DocFk {
    source: Vec<String>,
    #[serde(rename = "targetTable")]
    target_table: String,
    target: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum DocTerm {
    Attr(String),
    Const { #[serde(rename = "const")] value: String },
}

#[derive(Serialize, Deserialize)]
struct DocInd {
    source: Vec<DocTerm>,
    #[serde(rename = "targetTable")]
    target_table: String,
    target: Vec<String>,
}

pub fn parse_schema_doc(text: &str) -> Result<RelationalSchema> {
    let doc: Doc = serde_json::from_str(text).map_err(|e| Error::SchemaDocError {
        path: format!("line {} column {}", e.line(), e.column()),
        reason: e.to_string(),
    })?;
    let mut schema = RelationalSchema::new(doc.name.unwrap_or_else(|| "schema".into()));
    for (i, dt) in doc.tables.into_iter().enumerate() {
        let path = |field: &str| format!("tables[{i}]{field}");
        if dt.name.is_empty() {
            return Err(Error::SchemaDocError {
                path: path(".name"),
                reason: "empty table name".into(),
            });
        }
        let pk = dt.primary_key.map(AttributeSet);
        let mut t = Table::new(dt.name.clone());
        for a in dt.attributes {
            let (name, nullable) = match a {
                DocAttr::Full { name, nullable } => (name, nullable),
                DocAttr::Bare(name) => (name, None),
            };
            let in_pk = pk.as_ref().is_some_and(|k| k.contains(&name));
            if in_pk && nullable == Some(true) {
                return Err(Error::SchemaDocError {
                    path: path(&format!(".attributes.{name}")),
                    reason: "primary-key attribute declared nullable".into(),
                });
            }
            t.attributes.push(Attribute::new(name, nullable.unwrap_or(!in_pk)));
        }
        t.primary_key = pk;
        t.unique_keys = dt.unique_keys.into_iter().map(AttributeSet).collect();
        t.foreign_keys = dt
            .foreign_keys
            .into_iter()
            .map(|f| ForeignKey::new(AttributeSet(f.source), f.target_table, AttributeSet(f.target)))
            .collect();
        t.inclusion_deps = dt
            .inclusion_deps
            .into_iter()
            .map(|d| InclusionDependency {
                source_table: dt.name.clone(),
                source_projection: d
                    .source
                    .into_iter()
                    .map(|s| match s {
                        DocTerm::Attr(a) => ProjTerm::Attr(a),
                        DocTerm::Const { value } => ProjTerm::Const(value),
                    })
                    .collect(),
                target_table: d.target_table,
                target: AttributeSet(d.target),
                declared: true,
            })
            .collect();
        schema.tables.push(t);
    }
    schema.validate()?;
    Ok(schema)
}

/// Canonical document for `schema`'s tables; views are not part of it.
pub fn emit_schema_doc(schema: &RelationalSchema) -> String {
    let doc = Doc {
        name: Some(schema.name.clone()),
        tables: schema
            .tables
            .iter()
            .map(|t| DocTable {
                name: t.name.clone(),
                attributes: t
                    .attributes
                    .iter()
                    .map(|a| DocAttr::Full {
                        name: a.name.clone(),
                        nullable: Some(a.nullable),
                    })
                    .collect(),
                primary_key: t.primary_key.as_ref().map(|k| k.0.clone()),
                unique_keys: t.unique_keys.iter().map(|k| k.0.clone()).collect(),
                foreign_keys: t
                    .foreign_keys
                    .iter()
                    .filter(|f| f.declared)
                    .map(|f| DocFk {
                        source: f.source.0.clone(),
                        target_table: f.target_table.clone(),
                        target: f.target.0.clone(),
                    })
                    .collect(),
                inclusion_deps: t
                    .inclusion_deps
                    .iter()
                    .filter(|d| d.declared)
                    .map(|d| DocInd {
                        source: d
                            .source_projection
                            .iter()
                            .map(|p| match p {
                                ProjTerm::Attr(a) => DocTerm::Attr(a.clone()),
                                ProjTerm::Const(c) => DocTerm::Const { value: c.clone() },
                            })
                            .collect(),
                        target_table: d.target_table.clone(),
                        target: d.target.0.clone(),
                    })
                    .collect(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("schema document serializes");
    s.push('\n');
    s
}

/// Parses either format: a document starting with `{` is JSON, anything else
/// is DDL.
pub fn parse_schema_auto(text: &str) -> Result<RelationalSchema> {
    if text.trim_start().starts_with('{') {
        parse_schema_doc(text)
    } else {
        super::ddl::parse_ddl(text)
    }
}
