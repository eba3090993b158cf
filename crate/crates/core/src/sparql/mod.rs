//! The SPARQL fragment used by the review queries: `PREFIX` declarations,
//! `SELECT [DISTINCT]` and a basic graph pattern with `;` and `,`
//! abbreviations. Everything else is rejected by name.

mod exec;
mod parser;
mod results;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

pub use exec::{execute, SolutionTable};
pub use parser::parse_query;
pub use results::{to_csv, to_json};

use crate::uri::UriMapping;
use crate::view::GraphView;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SparqlError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        /// Character offset into the query text.
        position: usize,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported SPARQL feature: {0}")]
    UnsupportedFeature(String),
    #[error("undeclared prefix `{0}:`")]
    UnknownPrefix(String),
    #[error("projected variable ?{0} does not occur in the pattern")]
    UnboundProjection(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QueryTerm {
    Var(String),
    Iri(String),
    /// A prefixed name whose prefix was never declared.
    Prefixed {
        prefix: String,
        local: String,
    },
    /// `datatype` is an absolute IRI; `None` for a plain literal.
    Literal {
        value: String,
        datatype: Option<String>,
    },
}

impl QueryTerm {
    pub fn var(&self) -> Option<&str> {
        match self {
            QueryTerm::Var(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for QueryTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryTerm::Var(v) => write!(f, "?{v}"),
            QueryTerm::Iri(i) => write!(f, "<{i}>"),
            QueryTerm::Prefixed { prefix, local } => write!(f, "{prefix}:{local}"),
            QueryTerm::Literal { value, datatype: None } => write!(f, "{value:?}"),
            QueryTerm::Literal {
                value,
                datatype: Some(dt),
            } => write!(f, "{value:?}^^<{dt}>"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub subject: QueryTerm,
    pub predicate: QueryTerm,
    pub object: QueryTerm,
}

impl TriplePattern {
    pub fn terms(&self) -> [&QueryTerm; 3] {
        [&self.subject, &self.predicate, &self.object]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryPlan {
    pub prefixes: BTreeMap<String, String>,
    /// Prefixes used without a declaration, in order of use.
    pub undeclared: Vec<String>,
    pub projection: Vec<String>,
    pub distinct: bool,
    pub patterns: Vec<TriplePattern>,
}

impl QueryPlan {
    /// Variables in order of first appearance in the pattern.
    pub fn variables(&self) -> Vec<String> {
        let mut vars: Vec<String> = Vec::new();
        for p in &self.patterns {
            for v in p.terms().into_iter().filter_map(QueryTerm::var) {
                if !vars.iter().any(|x| x == v) {
                    vars.push(v.to_owned());
                }
            }
        }
        vars
    }
}

/// Parses and runs a query against a view.
pub fn query<V: GraphView + ?Sized>(text: &str, view: &V, uris: &UriMapping) -> Result<SolutionTable, SparqlError> {
    let plan = parse_query(text, uris)?;
    execute(&plan, view, uris)
}
