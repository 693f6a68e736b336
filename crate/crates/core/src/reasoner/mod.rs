//! Type-based reasoning: closures, realizable types, coherence,
//! satisfiability, instance checking, and completeness analysis.

mod closure;
mod complete;
mod sat;
mod types;

pub use closure::{Closure, Lit};
pub use complete::{is_alci_complete, is_alci_complete_idx, is_connected_type, is_strongly_incomplete};
pub use sat::{entails_concept, kb_satisfiable, realizable_types_at};
pub(crate) use sat::{candidates, fresh_name, table_realizable_at, table_satisfiable};
pub use types::{member, r_coherent, TypeBits, TypeTable};

use crate::limits::{EngineError, Limits};
use crate::model::kb::{Ontology, Signature, KB};

/// Closure + type table for a KB, guarded by the size limits: the raw
/// closure cap and the enumeration-width cap (the table visits 2^free
/// candidate types).
pub(crate) fn build_table(k: &KB, limits: &Limits) -> Result<TypeTable, EngineError> {
    let closure = Closure::of_kb(k);
    if closure.concept_count() > limits.max_closure {
        return Err(EngineError::ClosureTooLarge {
            size: closure.concept_count(),
            limit: limits.max_closure,
        });
    }
    if closure.free_pair_count() > limits.max_free_pairs {
        return Err(EngineError::TypeSpaceTooLarge {
            free: closure.free_pair_count(),
            limit: limits.max_free_pairs,
        });
    }
    Ok(TypeTable::new(closure))
}

/// All types realizable in some model of the ontology, over the closure of
/// the given signature.
pub fn realizable_types(o: &Ontology, sig: &Signature) -> Vec<TypeBits> {
    TypeTable::new(Closure::of(o, sig)).types().to_vec()
}
