//! Knowledge-base satisfiability and instance checking via the
//! constant-to-type assignment network.

use std::collections::{BTreeMap, BTreeSet};

use super::closure::Closure;
use super::types::{member, TypeBits, TypeTable};
use crate::model::concept::{Concept, Role};
use crate::model::kb::{ConceptInclusion, Database, ModelError, KB};
use crate::symbols::{ConceptName, Const};

/// Candidate realizable types per constant, narrowed by the unary atoms and
/// arc consistency along the binary atoms. `None` as soon as some constant
/// has no candidate left.
pub(crate) fn candidates(table: &TypeTable, db: &Database) -> Option<BTreeMap<Const, Vec<usize>>> {
    let all: Vec<usize> = (0..table.len()).collect();
    let mut cands: BTreeMap<Const, Vec<usize>> =
        db.constants().into_iter().map(|c| (c, all.clone())).collect();
    for &(name, c) in db.unary_atoms() {
        let lit = table
            .closure()
            .lit_of(Concept::atomic(name))
            .expect("closure covers database concept names");
        let set = cands.get_mut(&c).unwrap();
        set.retain(|&i| member(&table.types()[i], lit));
        if set.is_empty() {
            return None;
        }
    }
    // Arc consistency: drop candidates with no coherent partner across some
    // database edge, in either direction, until stable.
    loop {
        let mut changed = false;
        for &(name, c, d) in db.binary_atoms() {
            let role = Role::new(name);
            for (from, to, fwd) in [(c, d, true), (d, c, false)] {
                let partners = cands[&to].clone();
                let set = cands.get_mut(&from).unwrap();
                let before = set.len();
                set.retain(|&i| {
                    partners.iter().any(|&j| {
                        if fwd {
                            table.coherent_idx(i, role, j)
                        } else {
                            table.coherent_idx(j, role, i)
                        }
                    })
                });
                if set.is_empty() {
                    return None;
                }
                changed |= set.len() != before;
            }
        }
        if !changed {
            return Some(cands);
        }
    }
}

/// Whether types can be assigned to all constants, coherently along every
/// database edge, honoring `pins`. Realizable types plus coherent edges
/// glue into a model, so this is exactly satisfiability of (O, D) with the
/// pinned constants realizing the pinned types.
fn assignment_exists(table: &TypeTable, db: &Database, pins: &BTreeMap<Const, usize>) -> bool {
    if table.is_empty() {
        return false;
    }
    let Some(mut cands) = candidates(table, db) else {
        return false;
    };
    for (&c, &t) in pins {
        let Some(set) = cands.get_mut(&c) else { return false };
        set.retain(|&i| i == t);
        if set.is_empty() {
            return false;
        }
    }

    // Backtracking over the constants, most constrained first.
    let mut order: Vec<Const> = cands.keys().copied().collect();
    order.sort_by_key(|c| cands[c].len());
    let edges: Vec<(Role, Const, Const)> = db
        .binary_atoms()
        .map(|&(name, c, d)| (Role::new(name), c, d))
        .collect();
    let mut assigned: BTreeMap<Const, usize> = BTreeMap::new();
    search(table, &order, &edges, &cands, &mut assigned)
}

fn search(
    table: &TypeTable,
    order: &[Const],
    edges: &[(Role, Const, Const)],
    cands: &BTreeMap<Const, Vec<usize>>,
    assigned: &mut BTreeMap<Const, usize>,
) -> bool {
    let Some(&c) = order.get(assigned.len()) else {
        return true;
    };
    for &i in &cands[&c] {
        assigned.insert(c, i);
        // Edges between earlier constants were checked when the later
        // endpoint was placed; only edges touching c need a look.
        let ok = edges.iter().all(|&(role, from, to)| {
            if from != c && to != c {
                return true;
            }
            match (assigned.get(&from), assigned.get(&to)) {
                (Some(&fi), Some(&ti)) => table.coherent_idx(fi, role, ti),
                _ => true,
            }
        });
        if ok && search(table, order, edges, cands, assigned) {
            return true;
        }
        assigned.remove(&c);
    }
    false
}

/// Satisfiability of K: some model of O extends the database.
pub fn kb_satisfiable(k: &KB) -> bool {
    let table = TypeTable::new(Closure::of_kb(k));
    table_satisfiable(&table, &k.database)
}

pub(crate) fn table_satisfiable(table: &TypeTable, db: &Database) -> bool {
    if db.constants().is_empty() {
        // A model always has at least one element, so it needs at least one
        // realizable type.
        return !table.is_empty();
    }
    assignment_exists(table, db, &BTreeMap::new())
}

/// K ⊨ C(a): every model of K puts a into the extension of C. Decided as
/// unsatisfiability of K extended with a fresh name forced onto a and
/// axiomatized to exclude C.
pub fn entails_concept(k: &KB, c: Concept, a: Const) -> Result<bool, ModelError> {
    if !k.database.contains_constant(a) {
        return Err(ModelError::UnknownConstant(a.text()));
    }
    let x = fresh_name(k, c);
    let o = k.ontology.with_inclusion(ConceptInclusion {
        lhs: Concept::atomic(x),
        rhs: Concept::not(c),
    });
    let d = k.database.with_unary(x, a);
    Ok(!kb_satisfiable(&KB::new(o, d)))
}

pub(crate) fn fresh_name(k: &KB, c: Concept) -> ConceptName {
    let mut used: BTreeSet<String> =
        k.signature().concept_names.iter().map(|n| n.text()).collect();
    let mut names = BTreeSet::new();
    let mut roles = BTreeSet::new();
    c.collect_signature(&mut names, &mut roles);
    used.extend(names.iter().map(|n| n.text()));
    let mut i = 0usize;
    loop {
        let cand = if i == 0 { "_x".to_string() } else { format!("_x{i}") };
        if !used.contains(&cand) {
            return ConceptName::new(&cand);
        }
        i += 1;
    }
}

/// The types a constant can realize across all models of K: candidates at b
/// that extend to a full coherent assignment.
pub fn realizable_types_at(k: &KB, b: Const) -> Result<BTreeSet<TypeBits>, ModelError> {
    let table = TypeTable::new(Closure::of_kb(k));
    table_realizable_at(&table, &k.database, b)
}

pub(crate) fn table_realizable_at(
    table: &TypeTable,
    db: &Database,
    b: Const,
) -> Result<BTreeSet<TypeBits>, ModelError> {
    if !db.contains_constant(b) {
        return Err(ModelError::UnknownConstant(b.text()));
    }
    let Some(cands) = candidates(table, db) else {
        return Ok(BTreeSet::new());
    };
    let mut out = BTreeSet::new();
    for &i in &cands[&b] {
        let pins = BTreeMap::from([(b, i)]);
        if assignment_exists(table, db, &pins) {
            out.insert(table.types()[i].clone());
        }
    }
    Ok(out)
}
