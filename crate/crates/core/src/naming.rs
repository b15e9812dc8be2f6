//! Vocabulary and identifier naming shared by detection and generation.

/// `person_info` → `PersonInfo`; `GraduateStudents` stays as is.
pub fn camel_case(s: &str) -> String {
    let mut out = String::new();
    for part in s.split(|c: char| !c.is_alphanumeric()).filter(|p| !p.is_empty()) {
        let mut chars = part.chars();
        if let Some(first) = chars.next() {
            out.extend(first.to_uppercase());
            out.push_str(chars.as_str());
        }
    }
    if out.is_empty() {
        out.push('X');
    }
    if out.starts_with(|c: char| c.is_ascii_digit()) {
        out.insert(0, 'C');
    }
    out
}

/// Turtle-safe local name: letters, digits, `_` and `-`; must not start
/// with a digit or `-`.
pub fn local_name(s: &str) -> String {
    let mut out: String = s
        .chars()
        .map(|c| if c.is_alphanumeric() || c == '_' || c == '-' { c } else { '_' })
        .collect();
    if out.is_empty() || out.starts_with(|c: char| c.is_ascii_digit() || c == '-') {
        out.insert(0, '_');
    }
    out
}

/// Path segment used in IRI templates for a class: lowercased local name.
pub fn template_path(class: &str) -> String {
    local_name(class).to_lowercase()
}

/// Identifier-safe fragment for view names built from values.
pub fn ident_fragment(s: &str) -> String {
    let out: String = s
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect();
    if out.is_empty() {
        "_".into()
    } else {
        out
    }
}
