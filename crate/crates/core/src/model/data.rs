use std::collections::BTreeMap;

/// Cell value: text or SQL null.
pub type Value = Option<String>;
pub type Row = Vec<Value>;

/// Rows per table, aligned to the schema's attribute order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DataInstance {
    pub per_table: BTreeMap<String, Vec<Row>>,
}

impl DataInstance {
    pub fn new() -> Self {
        DataInstance::default()
    }

    pub fn insert(&mut self, table: impl Into<String>, rows: Vec<Row>) {
        self.per_table.insert(table.into(), rows);
    }

    pub fn rows(&self, table: &str) -> Option<&[Row]> {
        self.per_table.get(table).map(Vec::as_slice)
    }

    pub fn has_data(&self, table: &str) -> bool {
        self.per_table.contains_key(table)
    }

    pub fn row_counts(&self) -> BTreeMap<String, usize> {
        self.per_table
            .iter()
            .map(|(t, r)| (t.clone(), r.len()))
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.per_table.is_empty()
    }
}

/// Convenience for tests and fixtures: `row(&["a", "", "c"])` maps empty
/// strings to null.
pub fn row_of(cells: &[&str]) -> Row {
    cells
        .iter()
        .map(|c| if c.is_empty() { None } else { Some((*c).to_string()) })
        .collect()
}
