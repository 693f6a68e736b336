//! Types over the closure, realizability by elimination, and role
//! coherence between types.

use std::collections::HashMap;

use super::closure::{Closure, Lit};
use crate::model::concept::{Concept, Role};
use crate::model::structure::Structure;

/// A type as a bit per closure pair: set means the representative is in,
/// clear means its complement is. "Exactly one of C, ¬C" is structural.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct TypeBits {
    words: Vec<u64>,
}

impl TypeBits {
    pub fn zeroed(pairs: usize) -> TypeBits {
        TypeBits { words: vec![0; pairs.div_ceil(64)] }
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        if v {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }
}

/// Whether the closure concept a literal denotes is a member of the type.
pub fn member(t: &TypeBits, lit: Lit) -> bool {
    t.get(lit.pair) == lit.positive
}

/// Syntactic coherence of an R-edge between two types, judged against the
/// ontology only: every ∃R.D of the closure realized behind the edge must
/// already be recorded in front of it, in both directions.
pub fn r_coherent(cl: &Closure, t1: &TypeBits, role: Role, t2: &TypeBits) -> bool {
    cl.exists.iter().all(|&(p, s, body)| {
        (s != role || !member(t2, body) || t1.get(p))
            && (s != role.inv() || !member(t1, body) || t2.get(p))
    })
}

/// All realizable types of an ontology over a signature, with the coherence
/// relation precomputed between them.
pub struct TypeTable {
    closure: Closure,
    types: Vec<TypeBits>,
    index: HashMap<TypeBits, usize>,
    /// coherent[role position][i][j], roles as in `closure.roles()`
    coherent: Vec<Vec<Vec<bool>>>,
}

impl TypeTable {
    pub fn new(closure: Closure) -> TypeTable {
        let candidates = enumerate_hintikka(&closure);
        let roles = closure.roles().to_vec();
        let mut coh: Vec<Vec<Vec<bool>>> = roles
            .iter()
            .map(|&r| {
                candidates
                    .iter()
                    .map(|t1| {
                        candidates.iter().map(|t2| r_coherent(&closure, t1, r, t2)).collect()
                    })
                    .collect()
            })
            .collect();

        // Eliminate types whose existential demands have no surviving
        // coherent witness; repeat to a fixpoint.
        let mut alive = vec![true; candidates.len()];
        loop {
            let mut changed = false;
            for (i, t) in candidates.iter().enumerate() {
                if !alive[i] {
                    continue;
                }
                let supported = closure.exists.iter().all(|&(p, role, body)| {
                    if !t.get(p) {
                        return true;
                    }
                    let ri = role_position(&roles, role);
                    (0..candidates.len())
                        .any(|j| alive[j] && member(&candidates[j], body) && coh[ri][i][j])
                });
                if !supported {
                    alive[i] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }

        let mut types: Vec<TypeBits> = candidates
            .iter()
            .zip(&alive)
            .filter(|(_, &a)| a)
            .map(|(t, _)| t.clone())
            .collect();
        types.sort();
        let keep: Vec<usize> = (0..candidates.len())
            .filter(|&i| alive[i])
            .map(|i| types.binary_search(&candidates[i]).unwrap())
            .collect();
        let survivors: Vec<usize> = (0..candidates.len()).filter(|&i| alive[i]).collect();
        for rows in &mut coh {
            let mut shrunk = vec![vec![false; types.len()]; types.len()];
            for (si, &i) in survivors.iter().enumerate() {
                for (sj, &j) in survivors.iter().enumerate() {
                    shrunk[keep[si]][keep[sj]] = rows[i][j];
                }
            }
            *rows = shrunk;
        }
        let index = types.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        TypeTable { closure, types, index, coherent: coh }
    }

    pub fn closure(&self) -> &Closure {
        &self.closure
    }

    pub fn types(&self) -> &[TypeBits] {
        &self.types
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn position(&self, t: &TypeBits) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn coherent_idx(&self, i: usize, role: Role, j: usize) -> bool {
        let ri = role_position(self.closure.roles(), role);
        self.coherent[ri][i][j]
    }

    /// The exact type an element of a structure realizes.
    pub fn type_of_element(&self, s: &Structure, e: u32) -> TypeBits {
        let mut t = TypeBits::zeroed(self.closure.pair_count());
        for p in 0..self.closure.pair_count() {
            t.set(p, s.satisfies_at(self.closure.rep(p), e));
        }
        t
    }

    /// ⊓t: the conjunction pinning every closure pair to its orientation in
    /// t. The bot pair is skipped — its orientation is fixed for all types.
    pub fn concept_of_type(&self, t: &TypeBits) -> Concept {
        let conjuncts: Vec<Concept> = (1..self.closure.pair_count())
            .map(|p| self.closure.concept_of(Lit { pair: p, positive: t.get(p) }))
            .collect();
        Concept::big_and(&conjuncts)
    }
}

fn role_position(roles: &[Role], role: Role) -> usize {
    roles.iter().position(|&r| r == role).expect("role drawn from the closure signature")
}

/// Every type over the closure: bot pair clear, conjunction bits determined
/// by their children, ontology axioms respected. Free bits are the atomic
/// and existential pairs.
fn enumerate_hintikka(cl: &Closure) -> Vec<TypeBits> {
    let pairs = cl.pair_count();
    let mut determined = vec![false; pairs];
    determined[0] = true;
    for &(p, _, _) in &cl.ands {
        determined[p] = true;
    }
    let free: Vec<usize> = (0..pairs).filter(|&p| !determined[p]).collect();
    assert!(free.len() < usize::BITS as usize, "closure too large to enumerate");

    let mut out = Vec::new();
    for combo in 0..(1usize << free.len()) {
        let mut t = TypeBits::zeroed(pairs);
        for (bit, &p) in free.iter().enumerate() {
            t.set(p, combo >> bit & 1 == 1);
        }
        // Children sit at smaller indices, so one ascending pass settles
        // nested conjunctions.
        for &(p, l, r) in &cl.ands {
            t.set(p, member(&t, l) && member(&t, r));
        }
        if cl.cis.iter().all(|&(l, r)| !member(&t, l) || member(&t, r)) {
            out.push(t);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::kb::{ConceptInclusion, Database, Ontology, Signature, KB};
    use crate::symbols::{ConceptName, Const, RoleName};
    use std::collections::BTreeSet;

    fn c(s: &str) -> Const {
        Const::new(s)
    }
    fn cn(s: &str) -> ConceptName {
        ConceptName::new(s)
    }
    fn rn(s: &str) -> RoleName {
        RoleName::new(s)
    }

    fn loops_kb() -> KB {
        let r = Role::new(rn("R"));
        let ci = ConceptInclusion {
            lhs: Concept::top(),
            rhs: Concept::and(
                Concept::exists(r, Concept::top()),
                Concept::exists(r.inv(), Concept::top()),
            ),
        };
        let db = Database::new([], [(rn("R"), c("a"), c("a")), (rn("R"), c("b"), c("c"))]);
        KB::new(Ontology::new(vec![ci]), db)
    }

    #[test]
    fn loops_kb_has_exactly_one_realizable_type() {
        let k = loops_kb();
        let table = TypeTable::new(Closure::of_kb(&k));
        assert_eq!(table.len(), 1);
        let t = &table.types()[0];
        let r = Role::new(rn("R"));
        for probe in [Concept::exists(r, Concept::top()), Concept::exists(r.inv(), Concept::top())]
        {
            let lit = table.closure().lit_of(probe).unwrap();
            assert!(member(t, lit));
        }
    }

    #[test]
    fn inconsistent_ontology_has_no_types() {
        let o = Ontology::new(vec![ConceptInclusion {
            lhs: Concept::top(),
            rhs: Concept::bot(),
        }]);
        let sig = Signature {
            concept_names: BTreeSet::from([cn("A")]),
            role_names: BTreeSet::from([rn("r")]),
        };
        let table = TypeTable::new(Closure::of(&o, &sig));
        assert!(table.is_empty());
    }

    #[test]
    fn empty_ontology_over_one_name_has_two_types() {
        let o = Ontology::empty();
        let sig = Signature {
            concept_names: BTreeSet::from([cn("A")]),
            role_names: BTreeSet::new(),
        };
        let table = TypeTable::new(Closure::of(&o, &sig));
        assert_eq!(table.len(), 2);
        let lit = table.closure().lit_of(Concept::atomic(cn("A"))).unwrap();
        let positives =
            table.types().iter().filter(|t| member(t, lit)).count();
        assert_eq!(positives, 1);
    }

    #[test]
    fn loop_type_is_self_coherent() {
        let k = loops_kb();
        let table = TypeTable::new(Closure::of_kb(&k));
        let r = Role::new(rn("R"));
        assert!(table.coherent_idx(0, r, 0));
        assert!(table.coherent_idx(0, r.inv(), 0));
    }

    #[test]
    fn missing_probe_blocks_coherence() {
        // Empty ontology, one role: a type without ∃r.⊤ tolerates no
        // outgoing r-edge at all.
        let o = Ontology::empty();
        let sig = Signature {
            concept_names: BTreeSet::new(),
            role_names: BTreeSet::from([rn("r")]),
        };
        let table = TypeTable::new(Closure::of(&o, &sig));
        assert_eq!(table.len(), 4);
        let r = Role::new(rn("r"));
        let probe = table.closure().lit_of(Concept::exists(r, Concept::top())).unwrap();
        for (i, t1) in table.types().iter().enumerate() {
            for j in 0..table.len() {
                if !member(t1, probe) {
                    assert!(!table.coherent_idx(i, r, j));
                }
            }
        }
    }

    #[test]
    fn coherence_is_symmetric_under_inversion() {
        let k = loops_kb();
        let table = TypeTable::new(Closure::of_kb(&k));
        let r = Role::new(rn("R"));
        for i in 0..table.len() {
            for j in 0..table.len() {
                assert_eq!(table.coherent_idx(i, r, j), table.coherent_idx(j, r.inv(), i));
            }
        }
    }

    #[test]
    fn elimination_prunes_unwitnessed_demands() {
        // A ⊑ ∃r.B and B ⊑ ⊥: every A-type demands an r-successor in B,
        // but no B-type survives, so no A-type does either.
        let r = Role::new(rn("r"));
        let o = Ontology::new(vec![
            ConceptInclusion {
                lhs: Concept::atomic(cn("A")),
                rhs: Concept::exists(r, Concept::atomic(cn("B"))),
            },
            ConceptInclusion { lhs: Concept::atomic(cn("B")), rhs: Concept::bot() },
        ]);
        let sig = Signature {
            concept_names: BTreeSet::from([cn("A"), cn("B")]),
            role_names: BTreeSet::from([rn("r")]),
        };
        let table = TypeTable::new(Closure::of(&o, &sig));
        let a = table.closure().lit_of(Concept::atomic(cn("A"))).unwrap();
        assert!(!table.types().is_empty());
        assert!(table.types().iter().all(|t| !member(t, a)));
    }

    #[test]
    fn type_of_element_matches_extension() {
        let k = loops_kb();
        let table = TypeTable::new(Closure::of_kb(&k));
        // One element with an R-loop realizes the single type.
        let s = Structure::new(1, [], [(rn("R"), 0, 0)], []);
        let t = table.type_of_element(&s, 0);
        assert_eq!(Some(&t), table.types().first());
    }

    #[test]
    fn concept_of_type_pins_the_type() {
        let o = Ontology::empty();
        let sig = Signature {
            concept_names: BTreeSet::from([cn("A"), cn("B")]),
            role_names: BTreeSet::new(),
        };
        let table = TypeTable::new(Closure::of(&o, &sig));
        assert_eq!(table.len(), 4);
        for t in table.types() {
            let pin = table.concept_of_type(t);
            // Of the four labelings of a single element, exactly the one
            // matching t satisfies ⊓t.
            for (la, lb) in [(false, false), (false, true), (true, false), (true, true)] {
                let mut unary = Vec::new();
                if la {
                    unary.push((cn("A"), 0));
                }
                if lb {
                    unary.push((cn("B"), 0));
                }
                let s = Structure::new(1, unary, [], []);
                let matches = table.type_of_element(&s, 0) == *t;
                assert_eq!(s.satisfies_at(pin, 0), matches);
            }
        }
    }
}
