//! Signatures, ontologies, databases, knowledge bases, labeled KBs.
//!
//! A KB is a pair K = (O, D) of a finite set of concept inclusions and a set
//! of ground unary/binary atoms, interpreted open-world and without the
//! unique name assumption. A labeled KB adds nonempty sets of positive and
//! negative example constants drawn from cons(D).

use crate::model::concept::{Concept, Role};
use crate::symbols::{ConceptName, Const, RoleName};
use std::collections::BTreeSet;

/// A set of unary and binary predicate symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub concept_names: BTreeSet<ConceptName>,
    pub role_names: BTreeSet<RoleName>,
}

impl Signature {
    pub fn union(&self, other: &Signature) -> Signature {
        Signature {
            concept_names: self
                .concept_names
                .union(&other.concept_names)
                .copied()
                .collect(),
            role_names: self.role_names.union(&other.role_names).copied().collect(),
        }
    }

    /// All roles over this signature: each role name and its inverse.
    pub fn roles(&self) -> Vec<Role> {
        let mut out = Vec::new();
        for &name in &self.role_names {
            out.push(Role::new(name));
            out.push(Role::inverse_of(name));
        }
        out
    }

    /// Unary and binary identifier sets must not overlap textually.
    pub fn is_wellformed(&self) -> bool {
        let unary: BTreeSet<String> = self.concept_names.iter().map(|c| c.text()).collect();
        self.role_names.iter().all(|r| !unary.contains(&r.text()))
    }
}

/// A concept inclusion C ⊑ D.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConceptInclusion {
    pub lhs: Concept,
    pub rhs: Concept,
}

/// A finite set of concept inclusions, kept in deterministic order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ontology {
    inclusions: Vec<ConceptInclusion>,
}

impl Ontology {
    pub fn new(mut inclusions: Vec<ConceptInclusion>) -> Ontology {
        inclusions.sort();
        inclusions.dedup();
        Ontology { inclusions }
    }

    pub fn empty() -> Ontology {
        Ontology::default()
    }

    pub fn inclusions(&self) -> &[ConceptInclusion] {
        &self.inclusions
    }

    pub fn is_empty(&self) -> bool {
        self.inclusions.is_empty()
    }

    pub fn with_inclusion(&self, ci: ConceptInclusion) -> Ontology {
        let mut v = self.inclusions.clone();
        v.push(ci);
        Ontology::new(v)
    }

    pub fn signature(&self) -> Signature {
        let mut sig = Signature::default();
        for ci in &self.inclusions {
            ci.lhs
                .collect_signature(&mut sig.concept_names, &mut sig.role_names);
            ci.rhs
                .collect_signature(&mut sig.concept_names, &mut sig.role_names);
        }
        sig
    }

    /// ||O||: total symbol count, names counting 1 each.
    pub fn size(&self) -> usize {
        self.inclusions
            .iter()
            .map(|ci| ci.lhs.size() + ci.rhs.size() + 1)
            .sum()
    }
}

/// A set of ground atoms A(c) and r(c, d). cons(D) is exactly the set of
/// constants occurring in atoms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Database {
    unary: BTreeSet<(ConceptName, Const)>,
    binary: BTreeSet<(RoleName, Const, Const)>,
}

impl Database {
    pub fn new(
        unary: impl IntoIterator<Item = (ConceptName, Const)>,
        binary: impl IntoIterator<Item = (RoleName, Const, Const)>,
    ) -> Database {
        Database {
            unary: unary.into_iter().collect(),
            binary: binary.into_iter().collect(),
        }
    }

    pub fn unary_atoms(&self) -> impl Iterator<Item = &(ConceptName, Const)> {
        self.unary.iter()
    }

    pub fn binary_atoms(&self) -> impl Iterator<Item = &(RoleName, Const, Const)> {
        self.binary.iter()
    }

    pub fn atom_count(&self) -> usize {
        self.unary.len() + self.binary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unary.is_empty() && self.binary.is_empty()
    }

    pub fn has_unary(&self, name: ConceptName, c: Const) -> bool {
        self.unary.contains(&(name, c))
    }

    pub fn has_binary(&self, name: RoleName, c: Const, d: Const) -> bool {
        self.binary.contains(&(name, c, d))
    }

    /// Constants appearing in atoms.
    pub fn constants(&self) -> BTreeSet<Const> {
        let mut out = BTreeSet::new();
        for &(_, c) in &self.unary {
            out.insert(c);
        }
        for &(_, c, d) in &self.binary {
            out.insert(c);
            out.insert(d);
        }
        out
    }

    pub fn contains_constant(&self, c: Const) -> bool {
        self.unary.iter().any(|&(_, x)| x == c)
            || self.binary.iter().any(|&(_, x, y)| x == c || y == c)
    }

    pub fn signature(&self) -> Signature {
        let mut sig = Signature::default();
        for &(a, _) in &self.unary {
            sig.concept_names.insert(a);
        }
        for &(r, _, _) in &self.binary {
            sig.role_names.insert(r);
        }
        sig
    }

    /// Concept names labelling a given constant.
    pub fn labels_of(&self, c: Const) -> BTreeSet<ConceptName> {
        self.unary
            .iter()
            .filter(|&&(_, x)| x == c)
            .map(|&(a, _)| a)
            .collect()
    }

    /// Successors of `c` under a role (inverse roles follow edges backwards).
    pub fn role_successors(&self, role: Role, c: Const) -> Vec<Const> {
        let mut out = Vec::new();
        for &(name, x, y) in &self.binary {
            if name != role.name {
                continue;
            }
            if !role.inverted && x == c {
                out.push(y);
            }
            if role.inverted && y == c {
                out.push(x);
            }
        }
        out
    }

    pub fn union(&self, other: &Database) -> Database {
        Database {
            unary: self.unary.union(&other.unary).copied().collect(),
            binary: self.binary.union(&other.binary).copied().collect(),
        }
    }

    pub fn with_unary(&self, name: ConceptName, c: Const) -> Database {
        let mut db = self.clone();
        db.unary.insert((name, c));
        db
    }
}

/// K = (O, D).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KB {
    pub ontology: Ontology,
    pub database: Database,
}

impl KB {
    pub fn new(ontology: Ontology, database: Database) -> KB {
        KB { ontology, database }
    }

    /// sig(K): symbols occurring in O or D.
    pub fn signature(&self) -> Signature {
        self.ontology.signature().union(&self.database.signature())
    }
}

/// Errors raised when building model values from unchecked parts.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("example constant `{0}` does not occur in the database")]
    UnknownConstant(String),
    #[error("{0} examples must be non-empty")]
    EmptyExamples(&'static str),
    #[error("point tuples have different lengths: {0} vs {1}")]
    PointArity(usize, usize),
    #[error("query disjunct is not rooted in its answer variable")]
    NonRootedQuery,
}

/// (K, P, N) with nonempty example sets P, N ⊆ cons(D).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledKB {
    pub kb: KB,
    positives: Vec<Const>,
    negatives: Vec<Const>,
}

impl LabeledKB {
    pub fn new(
        kb: KB,
        positives: impl IntoIterator<Item = Const>,
        negatives: impl IntoIterator<Item = Const>,
    ) -> Result<LabeledKB, ModelError> {
        let dedup = |it: Vec<Const>| {
            let set: BTreeSet<Const> = it.into_iter().collect();
            let mut v: Vec<Const> = set.into_iter().collect();
            v.sort_by_key(|c| c.text());
            v
        };
        let positives = dedup(positives.into_iter().collect());
        let negatives = dedup(negatives.into_iter().collect());
        if positives.is_empty() {
            return Err(ModelError::EmptyExamples("positive"));
        }
        if negatives.is_empty() {
            return Err(ModelError::EmptyExamples("negative"));
        }
        let cons = kb.database.constants();
        for &c in positives.iter().chain(negatives.iter()) {
            if !cons.contains(&c) {
                return Err(ModelError::UnknownConstant(c.text()));
            }
        }
        Ok(LabeledKB {
            kb,
            positives,
            negatives,
        })
    }

    /// Positive examples, sorted by constant text.
    pub fn positives(&self) -> &[Const] {
        &self.positives
    }

    /// Negative examples, sorted by constant text.
    pub fn negatives(&self) -> &[Const] {
        &self.negatives
    }
}
