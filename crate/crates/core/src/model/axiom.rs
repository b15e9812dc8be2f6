use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// DL-Lite_R axiom as emitted by the catalog. `Domain(p, C)` encodes
/// `∃p ⊑ C`, `Range(p, C)` encodes `∃p⁻ ⊑ C`, `DataDomain(d, C)` encodes
/// `∃d ⊑ C`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "operands", rename_all = "camelCase")]
pub enum OntologyAxiom {
    SubClass(String, String),
    Domain(String, String),
    Range(String, String),
    DataDomain(String, String),
    SubObjectProperty(String, String),
}

impl OntologyAxiom {
    pub fn operands(&self) -> (&str, &str) {
        match self {
            OntologyAxiom::SubClass(a, b)
            | OntologyAxiom::Domain(a, b)
            | OntologyAxiom::Range(a, b)
            | OntologyAxiom::DataDomain(a, b)
            | OntologyAxiom::SubObjectProperty(a, b) => (a, b),
        }
    }

    pub fn is_well_formed(&self) -> bool {
        let (a, b) = self.operands();
        !a.is_empty() && !b.is_empty()
    }
}

impl fmt::Display for OntologyAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OntologyAxiom::SubClass(a, b) => write!(f, "{a} ⊑ {b}"),
            OntologyAxiom::Domain(p, c) => write!(f, "∃{p} ⊑ {c}"),
            OntologyAxiom::Range(p, c) => write!(f, "∃{p}⁻ ⊑ {c}"),
            OntologyAxiom::DataDomain(d, c) => write!(f, "∃{d} ⊑ {c}"),
            OntologyAxiom::SubObjectProperty(a, b) => write!(f, "{a} ⊑ {b}"),
        }
    }
}

/// Set equality after canonical ordering; duplicates are ignored.
pub fn axiom_set_equal<'a, A, B>(a: A, b: B) -> bool
where
    A: IntoIterator<Item = &'a OntologyAxiom>,
    B: IntoIterator<Item = &'a OntologyAxiom>,
{
    let a: BTreeSet<&OntologyAxiom> = a.into_iter().collect();
    let b: BTreeSet<&OntologyAxiom> = b.into_iter().collect();
    a == b
}
