//! Completeness of types: whether every element realizing a type can be
//! given a neighborhood that no concept of the language tells apart from
//! its alternatives. Incomplete types are where universally quantified
//! separators gain traction.

use std::collections::BTreeSet;

use super::closure::Closure;
use super::sat::table_realizable_at;
use super::types::{member, TypeBits, TypeTable};
use crate::model::concept::Role;
use crate::model::kb::{LabeledKB, ModelError};

/// A type demanding at least one neighbor: some ∃R.⊤ probe is in it.
pub fn is_connected_type(cl: &Closure, t: &TypeBits) -> bool {
    cl.top_exists.iter().any(|&p| t.get(p))
}

/// A defect witnesses incompleteness: an element of type `v`, entered from
/// an element of type `u` over `r`, that could satisfy all its s-demands
/// while avoiding successors of type `w` — so whether the (s, w)-successor
/// exists is not determined by K. The entering edge forces an s-successor
/// of type u itself when s is its inverse, which rules that combination
/// out.
fn defect(table: &TypeTable, u: usize, r: Role, v: usize, s: Role, w: usize) -> bool {
    if s == r.inv() && w == u {
        return false;
    }
    let vt = &table.types()[v];
    table.closure().exists.iter().all(|&(p, role, body)| {
        if role != s || !vt.get(p) {
            return true;
        }
        (0..table.len()).any(|x| {
            x != w && member(&table.types()[x], body) && table.coherent_idx(v, s, x)
        })
    })
}

/// Whether no defect is reachable from `t` through the coherence graph.
pub fn is_alci_complete_idx(table: &TypeTable, t: usize) -> bool {
    let roles = table.closure().roles().to_vec();
    let n = table.len();

    let mut reach = vec![false; n];
    reach[t] = true;
    let mut queue = vec![t];
    while let Some(u) = queue.pop() {
        for &role in &roles {
            for v in 0..n {
                if table.coherent_idx(u, role, v) && !reach[v] {
                    reach[v] = true;
                    queue.push(v);
                }
            }
        }
    }

    for u in (0..n).filter(|&u| reach[u]) {
        for &r in &roles {
            for v in (0..n).filter(|&v| table.coherent_idx(u, r, v)) {
                for &s in &roles {
                    for w in (0..n).filter(|&w| table.coherent_idx(v, s, w)) {
                        if defect(table, u, r, v, s, w) {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

pub fn is_alci_complete(table: &TypeTable, t: &TypeBits) -> bool {
    let idx = table.position(t).expect("completeness is asked of realizable types");
    is_alci_complete_idx(table, idx)
}

/// No negative example can realize a connected complete type. Under this
/// condition (and only then), concept separators reduce to the rooted
/// fragment.
pub fn is_strongly_incomplete(lk: &LabeledKB) -> Result<bool, ModelError> {
    let table = TypeTable::new(Closure::of_kb(&lk.kb));
    let mut types: BTreeSet<TypeBits> = BTreeSet::new();
    for &b in lk.negatives() {
        types.extend(table_realizable_at(&table, &lk.kb.database, b)?);
    }
    Ok(types
        .iter()
        .all(|t| !is_connected_type(table.closure(), t) || !is_alci_complete(&table, t)))
}
