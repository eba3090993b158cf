//! The graph store and its published versions under one data directory.

use std::path::{Path, PathBuf};

use crate::article;
use crate::error::Result;
use crate::model::{EntityId, Provenance, Statement};
use crate::rdf::{self, ExportOptions, RdfFormat};
use crate::render::{self, RenderedArticle, VersionInfo};
use crate::store::GraphStore;
use crate::uri::UriMapping;
use crate::versioning::{PublishedVersion, VersionDiff, VersionRef, VersionStore, VersionSummary};

pub const LOG_FILE: &str = "graph.log";
pub const VERSIONS_DIR: &str = "versions";

/// What an RDF export covers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExportScope {
    Full,
    Article(EntityId),
    Version(EntityId, u64),
}

#[derive(Debug)]
pub struct Repository {
    pub store: GraphStore,
    pub versions: VersionStore,
    data_dir: Option<PathBuf>,
}

impl Repository {
    pub fn in_memory() -> Self {
        Self {
            store: GraphStore::in_memory(),
            versions: VersionStore::in_memory(),
            data_dir: None,
        }
    }

    /// Opens `<dir>/graph.log` and `<dir>/versions/`, creating both if needed.
    pub fn open(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            store: GraphStore::open(&dir.join(LOG_FILE))?,
            versions: VersionStore::open(&dir.join(VERSIONS_DIR))?,
            data_dir: Some(dir.to_owned()),
        })
    }

    pub fn data_dir(&self) -> Option<&Path> {
        self.data_dir.as_deref()
    }

    pub fn publish(&mut self, article: &EntityId, description: &str, prov: &Provenance) -> Result<PublishedVersion> {
        self.versions.publish(&self.store, article, description, prov)
    }

    pub fn list_versions(&self, article: &EntityId) -> Result<Vec<VersionSummary>> {
        self.versions.list(&self.store, article)
    }

    pub fn diff(&self, article: &EntityId, from: VersionRef, to: VersionRef) -> Result<VersionDiff> {
        self.versions.diff(&self.store, article, from, to)
    }

    /// Statements in `scope`, with context for article and version scopes.
    pub fn scope_statements(&self, scope: &ExportScope) -> Result<Vec<Statement>> {
        Ok(match scope {
            ExportScope::Full => self.store.all_statements().cloned().collect(),
            ExportScope::Article(id) => {
                let (mut statements, context) = article::article_scope(&self.store, id)?;
                statements.extend(context);
                statements
            }
            ExportScope::Version(id, n) => {
                let version = self.versions.get(id, *n)?;
                version.statements.iter().chain(&version.context).cloned().collect()
            }
        })
    }

    /// The article's statements and context at `target`.
    pub fn target_scope(&self, article: &EntityId, target: VersionRef) -> Result<(Vec<Statement>, Vec<Statement>)> {
        match target {
            VersionRef::Head => article::article_scope(&self.store, article),
            VersionRef::Version(n) => {
                let v = self.versions.get(article, n)?;
                Ok((v.statements.clone(), v.context.clone()))
            }
        }
    }

    pub fn render(&self, article: &EntityId, target: VersionRef) -> Result<RenderedArticle> {
        let (statements, context) = self.target_scope(article, target)?;
        let info = match target {
            VersionRef::Head => None,
            VersionRef::Version(n) => {
                let v = self.versions.get(article, n)?;
                Some(VersionInfo {
                    version: v.version,
                    timestamp: v.timestamp,
                    description: v.description.clone(),
                })
            }
        };
        render::render(
            &self.store,
            article,
            &statements,
            &context,
            &UriMapping::default(),
            info.as_ref(),
        )
    }

    pub fn acknowledgements(&self, article: &EntityId, target: VersionRef) -> Result<Vec<String>> {
        Ok(render::acknowledgements(&self.target_scope(article, target)?.0))
    }

    pub fn reading_time(&self, article: &EntityId) -> Result<usize> {
        let loaded = article::load_article(&self.store, article)?;
        Ok(render::minutes_for(render::word_count(&loaded.sections)))
    }

    pub fn export(&self, scope: &ExportScope, options: &ExportOptions) -> Result<String> {
        if let ExportScope::Version(id, n) = scope {
            // Published bytes are served as frozen, not re-serialized.
            if options.format == RdfFormat::NTriples && !options.provenance && options.uris == Default::default() {
                return Ok(self.versions.get(id, *n)?.ntriples.clone());
            }
        }
        let statements = self.scope_statements(scope)?;
        Ok(rdf::export_statements(&self.store, &statements, options))
    }
}
