use thiserror::Error;

use crate::model::{EntityId, StatementId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid entity: {0}")]
    InvalidKind(String),
    #[error("key {0} is already taken")]
    DuplicateKey(EntityId),
    #[error("unknown entity {0}")]
    UnknownEntity(String),
    #[error("subject {0} is a literal")]
    InvalidSubjectKind(EntityId),
    #[error("unknown statement {0}")]
    UnknownStatement(StatementId),
    #[error("unknown user {0}")]
    UnknownUser(String),
    #[error("display name must not be empty")]
    InvalidName,
    #[error("unknown article {0}")]
    UnknownArticle(String),
    #[error("position {position} outside 0..={len}")]
    InvalidPosition { position: usize, len: usize },
    #[error("{0} is not a DEO class")]
    UnknownDeoType(String),
    #[error("dangling reference: {0}")]
    DanglingReference(String),
    #[error("unknown section {0}")]
    UnknownSection(String),
    #[error("property {0} listed twice")]
    DuplicateProperty(String),
    #[error("unknown comparison {0}")]
    UnknownComparison(String),
    #[error("unknown visualization {0}")]
    UnknownVisualization(String),
    #[error("cell ({contribution}, {property}) is not declared in comparison {comparison}")]
    UndeclaredRowOrColumn {
        comparison: String,
        contribution: String,
        property: String,
    },
    #[error("article {article} has no version {version}")]
    UnknownVersion { article: String, version: u64 },
    #[error("article {0} has no sections to publish")]
    EmptyArticle(String),
    #[error("{0}")]
    Validation(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("IRI {0} is outside every known base")]
    UnknownUriBase(String),
    #[error("corrupt log at line {line}: {message}")]
    CorruptLog { line: usize, message: String },
    #[error("corrupt version file {path}: {message}")]
    CorruptVersion { path: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors that name something absent from the store.
    pub fn is_not_found(&self) -> bool {
        matches!(
            self,
            Error::UnknownEntity(_)
                | Error::UnknownStatement(_)
                | Error::UnknownArticle(_)
                | Error::UnknownSection(_)
                | Error::UnknownComparison(_)
                | Error::UnknownVisualization(_)
                | Error::UnknownVersion { .. }
        )
    }

    pub fn is_io(&self) -> bool {
        matches!(
            self,
            Error::Io(_) | Error::CorruptLog { .. } | Error::CorruptVersion { .. }
        )
    }
}
