//! Living review articles stored as a provenance-bearing scholarly knowledge graph.

pub mod article;
pub mod error;
pub mod fixture;
pub mod html;
pub mod log;
pub mod markdown;
pub mod model;
pub mod rdf;
pub mod render;
pub mod repository;
pub mod sparql;
pub mod store;
pub mod uri;
pub mod versioning;
pub mod view;
pub mod vocab;

pub use error::{Error, Result};
pub use model::{Entity, EntityId, EntityKind, Literal, Provenance, Statement, StatementId, Term, TripleValue};
pub use store::{GraphStore, NewEntity, ObjectSpec};
