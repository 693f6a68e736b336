//! Decision engine and separating-formula synthesizer for labeled ALCI
//! knowledge bases.
//!
//! Given an ontology, a database, and positive/negative example constants,
//! the engine decides weak (projective and non-projective) and strong
//! separability and produces verified separating formulas: unions of
//! conjunctive queries or ALCI concepts.

pub mod entailment;
pub mod graph;
pub mod limits;
pub mod model;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod reasoner;
pub mod separability;
pub mod symbols;
pub mod syntax;

pub use limits::{EngineError, Limits};
pub use model::{Concept, ConceptKind, Database, LabeledKB, Ontology, Role, KB};
pub use separability::{SeparabilityReport, Status, TaskKind};
