use thiserror::Error;

/// Errors raised across ingestion, detection, generation and classification.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed query: {0}")]
    MalformedQuery(String),

    #[error("null value for placeholder `{0}` in identifier template")]
    NullInIdentifier(String),

    #[error("syntax error at line {line}: unexpected `{token}`")]
    SyntaxError { line: usize, token: String },

    #[error("dangling reference: {0}")]
    DanglingReference(String),

    #[error("invalid schema: {0}")]
    InvalidSchema(String),

    #[error("schema document error at {path}: {reason}")]
    SchemaDocError { path: String, reason: String },

    #[error("header mismatch in table `{table}`: missing {missing:?}, extra {extra:?}")]
    HeaderMismatch {
        table: String,
        missing: Vec<String>,
        extra: Vec<String>,
    },

    #[error("mapping `{block}`: {reason}")]
    ObdaSyntax { block: String, reason: String },

    #[error("incomplete bindings for {kind}: missing role {role}")]
    IncompleteBindings { kind: String, role: String },

    #[error("new views still appear after {0} detection rounds")]
    FixpointOverflow(usize),

    #[error("mapping `{assertion}` references unknown relation `{table}`")]
    SchemaMismatch { assertion: String, table: String },

    #[error("hints: {0}")]
    Hints(String),

    #[error("serialization: {0}")]
    Serialization(String),

    #[error("i/o error on {path}: {reason}")]
    Io { path: String, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn io(path: impl std::fmt::Display, err: impl std::fmt::Display) -> Self {
        Error::Io {
            path: path.to_string(),
            reason: err.to_string(),
        }
    }
}
