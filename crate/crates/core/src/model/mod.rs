pub mod axiom;
pub mod data;
pub mod eval;
pub mod mapping;
pub mod pattern;
pub mod query;
pub mod report;
pub mod schema;
pub mod template;

pub use axiom::{axiom_set_equal, OntologyAxiom};
pub use data::{row_of, DataInstance, Row, Value};
pub use eval::{evaluate, Relation};
pub use mapping::{output_columns, AtomKind, MappingAssertion, ObjectTerm, TargetAtom};
pub use pattern::{roles, Modifier, PartitionSpec, PatternInstance, PatternKind, Provenance};
pub use query::{normalize_query, ColRef, Condition, ProjExpr, ProjItem, SourceQuery};
pub use report::{ConceptualSummary, CoverageReport, Counts, Shares};
pub use schema::{
    normalize_ident, Attribute, AttributeSet, ForeignKey, FunctionalDependency, InclusionDependency,
    ProjTerm, RelationalSchema, Table, ViewDef,
};
pub use template::{
    escape_iri_value, render_template, IriTemplate, LiteralTemplate, Segment, TemplateRef, ValueInventionRule,
};
