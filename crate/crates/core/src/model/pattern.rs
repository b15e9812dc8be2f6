use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::schema::{AttributeSet, ViewDef};
use super::template::ValueInventionRule;

/// The mapping-pattern catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum PatternKind {
    SE,
    SR,
    SRa,
    SRm,
    SRR,
    SH,
    SHa,
    SHaa,
    DE,
    DR,
    DRa,
    DRm,
    DRR,
    DH,
    DHa,
    DHaa,
    DR1Nm,
    DR11m,
    DH01,
    CE2C,
    CE2D,
    CE2O,
    CR2O,
}

impl PatternKind {
    /// Catalog order, used for reports.
    pub const ALL: [PatternKind; 23] = [
        PatternKind::SE,
        PatternKind::SR,
        PatternKind::SRa,
        PatternKind::SRm,
        PatternKind::SRR,
        PatternKind::SH,
        PatternKind::SHa,
        PatternKind::SHaa,
        PatternKind::DE,
        PatternKind::DR,
        PatternKind::DRa,
        PatternKind::DRm,
        PatternKind::DRR,
        PatternKind::DH,
        PatternKind::DHa,
        PatternKind::DHaa,
        PatternKind::DR1Nm,
        PatternKind::DR11m,
        PatternKind::DH01,
        PatternKind::CE2C,
        PatternKind::CE2D,
        PatternKind::CE2O,
        PatternKind::CR2O,
    ];

    pub fn label(self) -> &'static str {
        match self {
            PatternKind::SE => "SE",
            PatternKind::SR => "SR",
            PatternKind::SRa => "SRa",
            PatternKind::SRm => "SRm",
            PatternKind::SRR => "SRR",
            PatternKind::SH => "SH",
            PatternKind::SHa => "SHa",
            PatternKind::SHaa => "SHaa",
            PatternKind::DE => "DE",
            PatternKind::DR => "DR",
            PatternKind::DRa => "DRa",
            PatternKind::DRm => "DRm",
            PatternKind::DRR => "DRR",
            PatternKind::DH => "DH",
            PatternKind::DHa => "DHa",
            PatternKind::DHaa => "DHaa",
            PatternKind::DR1Nm => "DR1Nm",
            PatternKind::DR11m => "DR11m",
            PatternKind::DH01 => "DH01",
            PatternKind::CE2C => "CE2C",
            PatternKind::CE2D => "CE2D",
            PatternKind::CE2O => "CE2O",
            PatternKind::CR2O => "CR2O",
        }
    }

    pub fn is_schema_driven(self) -> bool {
        self.label().starts_with('S')
    }

    /// Data-driven counterpart of a schema-driven kind, and vice versa.
    pub fn counterpart(self) -> Option<PatternKind> {
        use PatternKind::*;
        Some(match self {
            SE => DE,
            SR => DR,
            SRa => DRa,
            SRm => DRm,
            SRR => DRR,
            SH => DH,
            SHa => DHa,
            SHaa => DHaa,
            DE => SE,
            DR => SR,
            DRa => SRa,
            DRm => SRm,
            DRR => SRR,
            DH => SH,
            DHa => SHa,
            DHaa => SHaa,
            _ => return None,
        })
    }

    /// Picks the schema- or data-driven member of a paired family.
    pub fn with_provenance(self, provenance: Provenance) -> PatternKind {
        match (provenance, self.counterpart()) {
            (Provenance::Declared, Some(c)) if !self.is_schema_driven() => c,
            (Provenance::Discovered, Some(c)) if self.is_schema_driven() => c,
            _ => self,
        }
    }

    /// Specificity rank: lower wins when several kinds explain the same
    /// mapping assertion.
    pub fn specificity(self) -> u8 {
        use PatternKind::*;
        match self {
            DH01 => 0,
            SRR | DRR => 1,
            SRa | DRa => 2,
            CR2O => 3,
            SR | DR => 4,
            SHaa | DHaa => 5,
            SHa | DHa => 6,
            SH | DH => 7,
            DR1Nm => 8,
            DR11m => 9,
            CE2C | CE2D | CE2O => 10,
            SRm | DRm => 11,
            SE | DE => 12,
        }
    }
}

impl fmt::Display for PatternKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for PatternKind {
    type Err = String;

    /// Accepts every catalog label plus the aliases `DH0N` and `D11Rm`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "DH0N" => return Ok(PatternKind::DH01),
            "D11Rm" => return Ok(PatternKind::DR11m),
            _ => {}
        }
        PatternKind::ALL
            .iter()
            .copied()
            .find(|k| k.label() == s)
            .ok_or_else(|| format!("unknown pattern kind `{s}`"))
    }
}

impl From<PatternKind> for String {
    fn from(k: PatternKind) -> String {
        k.label().to_string()
    }
}

impl TryFrom<String> for PatternKind {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Declared,
    Discovered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Modifier {
    IdentifierAlignment,
    ValueInvention,
    ConstantAlignment,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum DerivationKind {
    EnumeratedValues,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DerivationRule {
    pub kind: DerivationKind,
    pub description: String,
}

/// `partition_D(B, E)`: the values of `attrs` split the rows of `table` into
/// disjoint clusters, one per value tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PartitionSpec {
    pub table: String,
    pub attrs: AttributeSet,
    pub values: Vec<Vec<String>>,
    pub rule: DerivationRule,
}

impl PartitionSpec {
    pub fn enumerated(table: impl Into<String>, attrs: AttributeSet, values: Vec<Vec<String>>) -> Self {
        let description = format!("{} ∈ {{{}}}", attrs, values.iter().map(|v| v.join("|")).collect::<Vec<_>>().join(", "));
        PartitionSpec {
            table: table.into(),
            attrs,
            values,
            rule: DerivationRule {
                kind: DerivationKind::EnumeratedValues,
                description,
            },
        }
    }
}

/// Role names used in instance bindings.
pub mod roles {
    pub const K: &str = "K";
    pub const A: &str = "A";
    pub const K_E: &str = "K_E";
    pub const A_E: &str = "A_E";
    pub const K_F: &str = "K_F";
    pub const U_F: &str = "U_F";
    pub const A_F: &str = "A_F";
    pub const K_FE: &str = "K_FE";
    pub const K_EF: &str = "K_EF";
    pub const K_R: &str = "K_R";
    pub const A_R: &str = "A_R";
    pub const B: &str = "B";

    /// Role binding for participant `i` of a relationship (`K_RE`, `K_RF`, …).
    pub fn participant(i: usize) -> String {
        format!("K_R{}", participant_letter(i))
    }

    /// Attributes a participant's reference points at in the target table.
    pub fn participant_target(i: usize) -> String {
        format!("T_R{}", participant_letter(i))
    }

    /// Table role for participant `i`: `E`, `F`, `G`, …
    pub fn participant_letter(i: usize) -> char {
        (b'E' + i as u8) as char
    }
}

/// One application of a catalog pattern.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternInstance {
    pub kind: PatternKind,
    #[serde(rename = "mainTable")]
    pub main_table: String,
    /// Attribute sets per role (`K_E`, `U_F`, `K_RE`, …).
    pub bindings: BTreeMap<String, AttributeSet>,
    /// Related relations per table role (`E`, `F`, `G`, …).
    pub tables: BTreeMap<String, String>,
    pub provenance: Provenance,
    #[serde(rename = "emittedViews")]
    pub emitted_views: Vec<ViewDef>,
    pub modifiers: BTreeSet<Modifier>,
    /// Constant per aligned parent attribute (hierarchies with constants).
    pub constants: BTreeMap<String, String>,
    pub partition: Option<PartitionSpec>,
    pub invention: Option<ValueInventionRule>,
    /// Free-form facts: alignment sub-case, cardinalities, vocabulary
    /// overrides.
    pub details: BTreeMap<String, String>,
}

impl PatternInstance {
    pub fn new(kind: PatternKind, main_table: impl Into<String>, provenance: Provenance) -> Self {
        PatternInstance {
            kind,
            main_table: main_table.into(),
            bindings: BTreeMap::new(),
            tables: BTreeMap::new(),
            provenance,
            emitted_views: Vec::new(),
            modifiers: BTreeSet::new(),
            constants: BTreeMap::new(),
            partition: None,
            invention: None,
            details: BTreeMap::new(),
        }
    }

    pub fn bind(mut self, role: impl Into<String>, attrs: AttributeSet) -> Self {
        self.bindings.insert(role.into(), attrs);
        self
    }

    pub fn table(mut self, role: impl Into<String>, name: impl Into<String>) -> Self {
        self.tables.insert(role.into(), name.into());
        self
    }

    pub fn binding(&self, role: &str) -> Option<&AttributeSet> {
        self.bindings.get(role)
    }

    /// Grouping key for counting applications: kind, main table, bindings
    /// and the cluster values when present.
    pub fn application_key(&self) -> String {
        let mut key = format!("{}|{}", self.kind, self.main_table);
        for (role, attrs) in &self.bindings {
            key.push_str(&format!("|{role}={}", attrs.0.join(",")));
        }
        for (role, t) in &self.tables {
            key.push_str(&format!("|@{role}={t}"));
        }
        for (a, c) in &self.constants {
            key.push_str(&format!("|'{a}'={c}"));
        }
        key
    }

    /// Required roles per kind.
    pub fn required_roles(&self) -> Vec<String> {
        use PatternKind::*;
        let base: &[&str] = match self.kind {
            SE | DE => &[roles::K, roles::A],
            SR | DR | SRa | DRa => &["K_RE", "K_RF"],
            SRm | DRm => &[roles::K_E, roles::K_EF],
            SRR | DRR => &[roles::K_R, roles::A_R, "K_RE", "K_RF"],
            SH | DH => &[roles::K_FE, roles::A_F],
            SHa | DHa => &[roles::K_F, roles::U_F, roles::A_F],
            SHaa | DHaa => &[roles::K_F, roles::A_F],
            DR1Nm | DR11m => &[roles::K_E, roles::A_E, roles::K_F, roles::A_F],
            DH01 => &["K_RE", "K_RF", roles::K_E, roles::A_E],
            CE2C | CE2D | CE2O => &[roles::K, roles::B],
            CR2O => &["K_RE", "K_RF", roles::B],
        };
        base.iter().map(|s| s.to_string()).collect()
    }

    pub fn missing_role(&self) -> Option<String> {
        self.required_roles()
            .into_iter()
            .find(|r| !self.bindings.contains_key(r))
    }
}
