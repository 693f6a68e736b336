//! Hash-consed ALCI concepts.
//!
//! The concept grammar is `C, D ::= A | not C | C and D | exists R. C` with
//! `R` a role name or its inverse. `top`, `bot`, `or`, `implies`, and
//! `forall` are abbreviations expanded at construction time:
//! `bot = A* and not A*` for one designated concept name `A*` that the
//! concrete syntax cannot produce, `top = not bot`,
//! `C or D = not (not C and not D)`, `forall R. C = not exists R. not C`.
//!
//! Concepts are interned: a [`Concept`] is an index into a global node table,
//! so structural equality is pointer equality and closure sets can be bitsets
//! over indices.

use crate::symbols::{ConceptName, RoleName};
use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::sync::RwLock;

/// A role name or its inverse. `inv` is an involution.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Role {
    pub name: RoleName,
    pub inverted: bool,
}

impl Role {
    pub fn new(name: RoleName) -> Role {
        Role {
            name,
            inverted: false,
        }
    }

    pub fn inverse_of(name: RoleName) -> Role {
        Role {
            name,
            inverted: true,
        }
    }

    pub fn inv(self) -> Role {
        Role {
            name: self.name,
            inverted: !self.inverted,
        }
    }
}

/// One node of the concept AST. Obtained from a [`Concept`] via
/// [`Concept::kind`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum ConceptKind {
    Atomic(ConceptName),
    Not(Concept),
    And(Concept, Concept),
    Exists(Role, Concept),
}

/// An interned concept. Equality is structural (hash-consing).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Concept(u32);

struct ConceptStore {
    nodes: Vec<ConceptKind>,
    index: HashMap<ConceptKind, u32>,
}

static CONCEPTS: Lazy<RwLock<ConceptStore>> = Lazy::new(|| {
    RwLock::new(ConceptStore {
        nodes: Vec::new(),
        index: HashMap::new(),
    })
});

/// The designated concept name used to expand `bot`. The parser only accepts
/// identifiers over `[A-Za-z0-9_]`, so this name can never collide with user
/// input, never enters any signature, and is skipped by subconcept
/// decomposition (`top`/`bot` are atomic for closure purposes).
pub const DESIGNATED_BOT_NAME: &str = "A*";

fn intern(kind: ConceptKind) -> Concept {
    if let Some(&id) = CONCEPTS.read().unwrap().index.get(&kind) {
        return Concept(id);
    }
    let mut store = CONCEPTS.write().unwrap();
    if let Some(&id) = store.index.get(&kind) {
        return Concept(id);
    }
    let id = store.nodes.len() as u32;
    store.nodes.push(kind);
    store.index.insert(kind, id);
    Concept(id)
}

impl Concept {
    pub fn atomic(name: ConceptName) -> Concept {
        intern(ConceptKind::Atomic(name))
    }

    pub fn not(c: Concept) -> Concept {
        intern(ConceptKind::Not(c))
    }

    pub fn and(l: Concept, r: Concept) -> Concept {
        intern(ConceptKind::And(l, r))
    }

    pub fn exists(role: Role, body: Concept) -> Concept {
        intern(ConceptKind::Exists(role, body))
    }

    pub fn bot() -> Concept {
        let a = Concept::atomic(ConceptName::new(DESIGNATED_BOT_NAME));
        Concept::and(a, Concept::not(a))
    }

    pub fn top() -> Concept {
        Concept::not(Concept::bot())
    }

    pub fn or(l: Concept, r: Concept) -> Concept {
        Concept::not(Concept::and(Concept::not(l), Concept::not(r)))
    }

    pub fn implies(l: Concept, r: Concept) -> Concept {
        Concept::or(Concept::not(l), r)
    }

    pub fn forall(role: Role, body: Concept) -> Concept {
        Concept::not(Concept::exists(role, Concept::not(body)))
    }

    /// Conjunction of a list; empty list is `top`.
    pub fn big_and(items: &[Concept]) -> Concept {
        match items.split_first() {
            None => Concept::top(),
            Some((&first, rest)) => rest
                .iter()
                .fold(first, |acc, &c| Concept::and(acc, c)),
        }
    }

    /// Disjunction of a list; empty list is `bot`.
    pub fn big_or(items: &[Concept]) -> Concept {
        match items.split_first() {
            None => Concept::bot(),
            Some((&first, rest)) => rest.iter().fold(first, |acc, &c| Concept::or(acc, c)),
        }
    }

    pub fn kind(self) -> ConceptKind {
        CONCEPTS.read().unwrap().nodes[self.0 as usize]
    }

    pub fn is_top(self) -> bool {
        self == Concept::top()
    }

    pub fn is_bot(self) -> bool {
        self == Concept::bot()
    }

    fn is_designated(self) -> bool {
        self.is_top() || self.is_bot()
    }

    /// All subconcepts including `self`. `top` and `bot` are treated as
    /// atomic: their `A*` expansion is never decomposed, so the designated
    /// name stays out of closures and signatures.
    pub fn subconcepts(self) -> Vec<Concept> {
        let mut seen = Vec::new();
        let mut stack = vec![self];
        while let Some(c) = stack.pop() {
            if seen.contains(&c) {
                continue;
            }
            seen.push(c);
            if c.is_designated() {
                continue;
            }
            match c.kind() {
                ConceptKind::Atomic(_) => {}
                ConceptKind::Not(inner) => stack.push(inner),
                ConceptKind::And(l, r) => {
                    stack.push(l);
                    stack.push(r);
                }
                ConceptKind::Exists(_, body) => stack.push(body),
            }
        }
        seen
    }

    /// Collect signature symbols into the given sets, skipping the designated
    /// `top`/`bot` expansion.
    pub fn collect_signature(
        self,
        concept_names: &mut std::collections::BTreeSet<ConceptName>,
        role_names: &mut std::collections::BTreeSet<RoleName>,
    ) {
        for c in self.subconcepts() {
            if c.is_designated() {
                continue;
            }
            match c.kind() {
                ConceptKind::Atomic(a) => {
                    concept_names.insert(a);
                }
                ConceptKind::Exists(r, _) => {
                    role_names.insert(r.name);
                }
                _ => {}
            }
        }
    }

    /// Symbol count: predicate, role, and operator occurrences each count 1.
    /// The designated `top`/`bot` count 1 apiece.
    pub fn size(self) -> usize {
        if self.is_designated() {
            return 1;
        }
        match self.kind() {
            ConceptKind::Atomic(_) => 1,
            ConceptKind::Not(inner) => 1 + inner.size(),
            ConceptKind::And(l, r) => 1 + l.size() + r.size(),
            ConceptKind::Exists(_, body) => 2 + body.size(),
        }
    }

    /// First-order description of the standard translation C†(x), with the
    /// two variables x and y reused in alternation. Report-only output.
    pub fn to_fo_description(self) -> String {
        self.fo_desc("x", "y")
    }

    fn fo_desc(self, this: &str, next: &str) -> String {
        match self.kind() {
            ConceptKind::Atomic(a) => format!("{}({})", a, this),
            ConceptKind::Not(inner) => match inner.kind() {
                ConceptKind::And(_, _) => format!("¬({})", inner.fo_desc(this, next)),
                _ => format!("¬{}", inner.fo_desc(this, next)),
            },
            ConceptKind::And(l, r) => {
                format!("{} ∧ {}", l.fo_desc(this, next), r.fo_desc(this, next))
            }
            ConceptKind::Exists(role, body) => {
                let edge = if role.inverted {
                    format!("{}({},{})", role.name, next, this)
                } else {
                    format!("{}({},{})", role.name, this, next)
                };
                format!("∃{}({} ∧ {})", next, edge, body.fo_desc(next, this))
            }
        }
    }
}

impl std::fmt::Debug for Concept {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        // The readable form lives in syntax::printer; Debug shows it too.
        f.write_str(&crate::syntax::render_concept(*self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Concept {
        Concept::atomic(ConceptName::new("A"))
    }

    fn r() -> Role {
        Role::new(RoleName::new("r"))
    }

    #[test]
    fn inv_is_an_involution() {
        assert_eq!(r().inv().inv(), r());
        assert_ne!(r().inv(), r());
    }

    #[test]
    fn hash_consing_gives_structural_equality() {
        let c1 = Concept::and(a(), Concept::not(a()));
        let c2 = Concept::and(a(), Concept::not(a()));
        assert_eq!(c1, c2);
        assert_ne!(c1, Concept::and(Concept::not(a()), a()));
    }

    #[test]
    fn bot_expands_to_designated_contradiction() {
        match Concept::bot().kind() {
            ConceptKind::And(l, r) => {
                assert_eq!(l.kind(), ConceptKind::Atomic(ConceptName::new(DESIGNATED_BOT_NAME)));
                assert_eq!(r, Concept::not(l));
            }
            k => panic!("unexpected bot shape: {:?}", k),
        }
        assert_eq!(Concept::top(), Concept::not(Concept::bot()));
    }

    #[test]
    fn subconcepts_do_not_decompose_top_bot() {
        let c = Concept::exists(r(), Concept::top());
        let subs = c.subconcepts();
        assert!(subs.contains(&c));
        assert!(subs.contains(&Concept::top()));
        assert!(!subs.contains(&Concept::bot()));
        assert!(!subs
            .iter()
            .any(|s| s.kind() == ConceptKind::Atomic(ConceptName::new(DESIGNATED_BOT_NAME))));
    }

    #[test]
    fn signature_skips_designated_name() {
        let mut cn = std::collections::BTreeSet::new();
        let mut rn = std::collections::BTreeSet::new();
        Concept::exists(r(), Concept::top()).collect_signature(&mut cn, &mut rn);
        assert!(cn.is_empty());
        assert_eq!(rn.len(), 1);
    }

    #[test]
    fn fo_description_examples() {
        assert_eq!(a().to_fo_description(), "A(x)");
        let inv_exists = Concept::exists(Role::inverse_of(RoleName::new("R")), a());
        assert_eq!(inv_exists.to_fo_description(), "∃y(R(y,x) ∧ A(y))");
        assert_eq!(Concept::top().to_fo_description(), "¬(A*(x) ∧ ¬A*(x))");
    }

    #[test]
    fn fo_description_reuses_variables_in_alternation() {
        let rr = Role::new(RoleName::new("R"));
        let c = Concept::exists(rr, Concept::exists(rr, a()));
        assert_eq!(c.to_fo_description(), "∃y(R(x,y) ∧ ∃x(R(y,x) ∧ A(x)))");
    }

    #[test]
    fn size_counts_symbols() {
        // exists r. (A and not A): exists+r + and + A + not + A = 6
        let c = Concept::exists(r(), Concept::and(a(), Concept::not(a())));
        assert_eq!(c.size(), 6);
        assert_eq!(Concept::top().size(), 1);
    }
}
