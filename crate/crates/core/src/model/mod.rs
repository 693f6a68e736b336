//! In-memory model: concepts, ontologies, databases, structures, queries.

pub mod concept;
pub mod kb;
pub mod query;
pub mod structure;

pub use concept::{Concept, ConceptKind, Role};
pub use kb::{ConceptInclusion, Database, LabeledKB, ModelError, Ontology, Signature, KB};
pub use query::{QAtom, CQ, UCQ};
pub use structure::{check_model, structure_of_database, Structure};
