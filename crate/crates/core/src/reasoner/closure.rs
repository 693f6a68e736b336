//! The closure of a knowledge base: every concept a type has to decide,
//! indexed as complement pairs.

use std::collections::HashMap;

use crate::model::concept::{Concept, ConceptKind, Role};
use crate::model::kb::{Ontology, Signature, KB};

/// Reference to a closure concept: a pair index plus an orientation.
/// `positive` selects the representative, `!positive` its complement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lit {
    pub pair: usize,
    pub positive: bool,
}

impl Lit {
    pub fn negated(self) -> Lit {
        Lit { pair: self.pair, positive: !self.positive }
    }
}

/// `cl(K)`, stored as complement pairs. Pair 0 is always (bot, top); the
/// designated name inside bot is never given a pair of its own. Every other
/// pair's representative is negation-free, so a pair index plus a bool
/// addresses each of the `2 * pair_count()` closure concepts exactly once.
///
/// Invariant: children of a conjunction or existential restriction sit at
/// strictly smaller pair indices than their parent.
pub struct Closure {
    reps: Vec<Concept>,
    index: HashMap<Concept, usize>,
    /// (pair of C ⊓ D, lit of C, lit of D)
    pub(crate) ands: Vec<(usize, Lit, Lit)>,
    /// (pair of ∃R.C, R, lit of C)
    pub(crate) exists: Vec<(usize, Role, Lit)>,
    /// ontology axioms as (lhs, rhs) literals
    pub(crate) cis: Vec<(Lit, Lit)>,
    /// pairs of the form ∃R.⊤, one per role direction of the signature
    pub(crate) top_exists: Vec<usize>,
    roles: Vec<Role>,
}

impl Closure {
    /// Closure of the ontology over an explicit signature: the axiom
    /// concepts, every concept name of the signature, and ∃R.⊤ for both
    /// directions of every role name, closed under subconcepts and single
    /// complement. Roles mentioned only by the ontology get probes too, so
    /// coherence is total on the existential pairs.
    pub fn of(o: &Ontology, sig: &Signature) -> Closure {
        let mut cl = Closure {
            reps: Vec::new(),
            index: HashMap::new(),
            ands: Vec::new(),
            exists: Vec::new(),
            cis: Vec::new(),
            top_exists: Vec::new(),
            roles: sig.union(&o.signature()).roles(),
        };
        let (bot, _) = cl.pair_for(Concept::bot());
        debug_assert_eq!(bot, 0);
        for &a in &sig.concept_names {
            cl.insert(Concept::atomic(a));
        }
        for role in cl.roles.clone() {
            let lit = cl.insert(Concept::exists(role, Concept::top()));
            cl.top_exists.push(lit.pair);
        }
        for ci in o.inclusions() {
            let lhs = cl.insert(ci.lhs);
            let rhs = cl.insert(ci.rhs);
            cl.cis.push((lhs, rhs));
        }
        cl
    }

    pub fn of_kb(k: &KB) -> Closure {
        Closure::of(&k.ontology, &k.signature())
    }

    fn insert(&mut self, c: Concept) -> Lit {
        if c.is_bot() {
            return Lit { pair: 0, positive: true };
        }
        if c.is_top() {
            return Lit { pair: 0, positive: false };
        }
        match c.kind() {
            ConceptKind::Not(inner) => self.insert(inner).negated(),
            ConceptKind::Atomic(_) => {
                let (pair, _) = self.pair_for(c);
                Lit { pair, positive: true }
            }
            ConceptKind::And(l, r) => {
                let ll = self.insert(l);
                let rl = self.insert(r);
                let (pair, new) = self.pair_for(c);
                if new {
                    self.ands.push((pair, ll, rl));
                }
                Lit { pair, positive: true }
            }
            ConceptKind::Exists(role, body) => {
                let bl = self.insert(body);
                let (pair, new) = self.pair_for(c);
                if new {
                    self.exists.push((pair, role, bl));
                }
                Lit { pair, positive: true }
            }
        }
    }

    fn pair_for(&mut self, rep: Concept) -> (usize, bool) {
        if let Some(&p) = self.index.get(&rep) {
            return (p, false);
        }
        let p = self.reps.len();
        self.reps.push(rep);
        self.index.insert(rep, p);
        (p, true)
    }

    pub fn pair_count(&self) -> usize {
        self.reps.len()
    }

    /// Number of closure concepts, complements included.
    pub fn concept_count(&self) -> usize {
        2 * self.reps.len()
    }

    /// Pairs whose polarity a type chooses freely. Bot (pair 0) and the
    /// conjunction pairs are determined by the rest, so the type enumeration
    /// only branches on the remainder.
    pub fn free_pair_count(&self) -> usize {
        self.reps.len() - 1 - self.ands.len()
    }

    pub fn rep(&self, pair: usize) -> Concept {
        self.reps[pair]
    }

    /// The concept a literal denotes (negative orientation wraps the
    /// representative in a complement; on pair 0 that collapses to top).
    pub fn concept_of(&self, lit: Lit) -> Concept {
        if lit.positive {
            self.reps[lit.pair]
        } else {
            Concept::not(self.reps[lit.pair])
        }
    }

    /// Locate an arbitrary concept in the closure. Complements are chased,
    /// so both members of every pair resolve.
    pub fn lit_of(&self, c: Concept) -> Option<Lit> {
        if c.is_bot() {
            return Some(Lit { pair: 0, positive: true });
        }
        if c.is_top() {
            return Some(Lit { pair: 0, positive: false });
        }
        if let ConceptKind::Not(inner) = c.kind() {
            return self.lit_of(inner).map(Lit::negated);
        }
        self.index.get(&c).map(|&pair| Lit { pair, positive: true })
    }

    pub fn contains(&self, c: Concept) -> bool {
        self.lit_of(c).is_some()
    }

    /// Both directions of every role name in the underlying signature.
    pub fn roles(&self) -> &[Role] {
        &self.roles
    }
}
