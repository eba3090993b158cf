//! Mapping between internal entity ids and absolute IRIs.

use crate::model::{is_valid_key, EntityId, EntityKind};
use crate::vocab;

pub const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS_NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const XSD_NS: &str = "http://www.w3.org/2001/XMLSchema#";
pub const PROV_NS: &str = "http://www.w3.org/ns/prov#";
pub const DEO_NS: &str = "http://purl.org/spar/deo/";
pub const DOCO_NS: &str = "http://purl.org/spar/doco/";
pub const FABIO_NS: &str = "http://purl.org/spar/fabio/";

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";

/// Work class given to every review article on export.
pub const REVIEW_WORK_CLASS: &str = "http://purl.org/spar/fabio/ReviewArticle";
/// Structural class given to every section on export.
pub const SECTION_CLASS: &str = "http://purl.org/spar/doco/Section";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UriMapping {
    pub resource_base: String,
    pub predicate_base: String,
    pub class_base: String,
    pub statement_base: String,
    pub user_base: String,
}

impl Default for UriMapping {
    fn default() -> Self {
        Self {
            resource_base: "http://orkg.org/orkg/resource/".into(),
            predicate_base: "http://orkg.org/orkg/predicate/".into(),
            class_base: "http://orkg.org/orkg/class/".into(),
            statement_base: "http://orkg.org/orkg/statement/".into(),
            user_base: "http://orkg.org/orkg/user/".into(),
        }
    }
}

impl UriMapping {
    /// IRI of a non-literal entity; `None` for literals.
    pub fn iri(&self, id: &EntityId) -> Option<String> {
        let base = match id.kind {
            EntityKind::Literal => return None,
            EntityKind::Predicate if id.key == vocab::TYPE => return Some(RDF_TYPE.to_owned()),
            EntityKind::Class if vocab::is_deo_class(&id.key) => DEO_NS,
            EntityKind::Resource => &self.resource_base,
            EntityKind::Predicate => &self.predicate_base,
            EntityKind::Class => &self.class_base,
        };
        Some(format!("{base}{}", id.key))
    }

    /// Entities whose IRI lives in an external vocabulary.
    pub fn is_external(&self, id: &EntityId) -> bool {
        self.iri(id).is_some_and(|iri| {
            !iri.starts_with(&self.resource_base)
                && !iri.starts_with(&self.predicate_base)
                && !iri.starts_with(&self.class_base)
        })
    }

    /// Reverse of [`UriMapping::iri`]. Class-base IRIs of DEO terms are
    /// accepted as aliases.
    pub fn entity(&self, iri: &str) -> Option<EntityId> {
        if iri == RDF_TYPE {
            return Some(vocab::type_predicate());
        }
        if let Some(key) = iri.strip_prefix(DEO_NS) {
            return vocab::is_deo_class(key).then(|| EntityId::class(key));
        }
        let (kind, key) = if let Some(key) = iri.strip_prefix(&self.resource_base) {
            (EntityKind::Resource, key)
        } else if let Some(key) = iri.strip_prefix(&self.predicate_base) {
            (EntityKind::Predicate, key)
        } else {
            (EntityKind::Class, iri.strip_prefix(&self.class_base)?)
        };
        if !is_valid_key(key) || (kind == EntityKind::Predicate && key == vocab::TYPE) {
            return None;
        }
        Some(EntityId::new(kind, key))
    }

    /// `xsd:string` → full XSD IRI; absolute IRIs pass through.
    pub fn datatype_iri(&self, datatype: &str) -> String {
        for (prefix, ns) in [("xsd:", XSD_NS), ("rdf:", RDF_NS), ("rdfs:", RDFS_NS)] {
            if let Some(local) = datatype.strip_prefix(prefix) {
                return format!("{ns}{local}");
            }
        }
        datatype.to_owned()
    }

    pub fn datatype_from_iri(&self, iri: &str) -> String {
        for (prefix, ns) in [("xsd:", XSD_NS), ("rdf:", RDF_NS), ("rdfs:", RDFS_NS)] {
            if let Some(local) = iri.strip_prefix(ns) {
                return format!("{prefix}{local}");
            }
        }
        iri.to_owned()
    }

    /// Prefixes used for Turtle output and predeclared for queries.
    pub fn prefixes(&self) -> Vec<(&'static str, String)> {
        vec![
            ("orkgr", self.resource_base.clone()),
            ("orkgp", self.predicate_base.clone()),
            ("orkgc", self.class_base.clone()),
            ("rdf", RDF_NS.to_owned()),
            ("rdfs", RDFS_NS.to_owned()),
            ("xsd", XSD_NS.to_owned()),
            ("deo", DEO_NS.to_owned()),
            ("doco", DOCO_NS.to_owned()),
            ("fabio", FABIO_NS.to_owned()),
            ("prov", PROV_NS.to_owned()),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_every_kind() {
        let m = UriMapping::default();
        for id in [
            EntityId::resource("R278"),
            EntityId::predicate("P30"),
            EntityId::class("SmartReview"),
            EntityId::class("Introduction"),
            vocab::type_predicate(),
        ] {
            let iri = m.iri(&id).unwrap();
            assert_eq!(m.entity(&iri), Some(id));
        }
        assert_eq!(
            m.iri(&EntityId::class("Introduction")).unwrap(),
            "http://purl.org/spar/deo/Introduction"
        );
        assert_eq!(
            m.entity("http://orkg.org/orkg/class/Introduction"),
            Some(EntityId::class("Introduction"))
        );
        assert_eq!(m.iri(&EntityId::literal("L1")), None);
        assert_eq!(m.entity("http://example.org/x"), None);
        assert_eq!(m.entity("http://purl.org/spar/deo/NotAClass"), None);
        assert_eq!(m.entity("http://orkg.org/orkg/resource/bad key"), None);
    }

    #[test]
    fn datatypes() {
        let m = UriMapping::default();
        assert_eq!(m.datatype_iri("xsd:string"), "http://www.w3.org/2001/XMLSchema#string");
        assert_eq!(
            m.datatype_from_iri("http://www.w3.org/2001/XMLSchema#gYear"),
            "xsd:gYear"
        );
        assert_eq!(m.datatype_from_iri("http://example.org/dt"), "http://example.org/dt");
    }
}
