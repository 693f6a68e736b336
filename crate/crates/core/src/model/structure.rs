//! Finite relational structures and model checking.
//!
//! A [`Structure`] interprets concept names as element sets, role names as
//! element-pair sets, and constants as elements. The constant map need not be
//! injective (no unique name assumption). Inverse role extensions are derived
//! by flipping pairs, never stored.

use crate::model::concept::{Concept, ConceptKind, Role};
use crate::model::kb::{Database, KB};
use crate::symbols::{ConceptName, Const, RoleName};
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// A finite structure with domain `{0, .., domain_size - 1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    domain_size: u32,
    unary: BTreeMap<ConceptName, BTreeSet<u32>>,
    binary: BTreeMap<RoleName, BTreeSet<(u32, u32)>>,
    constants: BTreeMap<Const, u32>,
    // Adjacency indexes, built once at construction.
    succ: HashMap<(RoleName, u32), Vec<u32>>,
    pred: HashMap<(RoleName, u32), Vec<u32>>,
}

impl Structure {
    pub fn new(
        domain_size: u32,
        unary: impl IntoIterator<Item = (ConceptName, u32)>,
        binary: impl IntoIterator<Item = (RoleName, u32, u32)>,
        constants: impl IntoIterator<Item = (Const, u32)>,
    ) -> Structure {
        let mut u: BTreeMap<ConceptName, BTreeSet<u32>> = BTreeMap::new();
        for (name, e) in unary {
            assert!(e < domain_size, "unary atom out of domain");
            u.entry(name).or_default().insert(e);
        }
        let mut b: BTreeMap<RoleName, BTreeSet<(u32, u32)>> = BTreeMap::new();
        for (name, d, e) in binary {
            assert!(d < domain_size && e < domain_size, "edge out of domain");
            b.entry(name).or_default().insert((d, e));
        }
        let constants: BTreeMap<Const, u32> = constants.into_iter().collect();
        for &e in constants.values() {
            assert!(e < domain_size, "constant mapped out of domain");
        }
        let mut succ: HashMap<(RoleName, u32), Vec<u32>> = HashMap::new();
        let mut pred: HashMap<(RoleName, u32), Vec<u32>> = HashMap::new();
        for (&name, pairs) in &b {
            for &(d, e) in pairs {
                succ.entry((name, d)).or_default().push(e);
                pred.entry((name, e)).or_default().push(d);
            }
        }
        Structure {
            domain_size,
            unary: u,
            binary: b,
            constants,
            succ,
            pred,
        }
    }

    pub fn domain_size(&self) -> u32 {
        self.domain_size
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.domain_size
    }

    pub fn has_unary(&self, name: ConceptName, e: u32) -> bool {
        self.unary.get(&name).is_some_and(|s| s.contains(&e))
    }

    pub fn unary_names(&self) -> impl Iterator<Item = &ConceptName> {
        self.unary.keys()
    }

    pub fn role_names(&self) -> impl Iterator<Item = &RoleName> {
        self.binary.keys()
    }

    pub fn has_edge(&self, role: Role, d: u32, e: u32) -> bool {
        let (d, e) = if role.inverted { (e, d) } else { (d, e) };
        self.binary
            .get(&role.name)
            .is_some_and(|s| s.contains(&(d, e)))
    }

    /// Successors of `e` under `role` (inverse roles walk edges backwards).
    pub fn successors(&self, role: Role, e: u32) -> &[u32] {
        let map = if role.inverted { &self.pred } else { &self.succ };
        map.get(&(role.name, e)).map_or(&[], |v| v.as_slice())
    }

    pub fn unary_atoms(&self) -> impl Iterator<Item = (ConceptName, u32)> + '_ {
        self.unary
            .iter()
            .flat_map(|(&name, set)| set.iter().map(move |&e| (name, e)))
    }

    pub fn edges(&self) -> impl Iterator<Item = (RoleName, u32, u32)> + '_ {
        self.binary
            .iter()
            .flat_map(|(&name, set)| set.iter().map(move |&(d, e)| (name, d, e)))
    }

    pub fn constant(&self, c: Const) -> Option<u32> {
        self.constants.get(&c).copied()
    }

    pub fn constant_map(&self) -> &BTreeMap<Const, u32> {
        &self.constants
    }

    /// Extension C^𝔄 as a membership vector indexed by element.
    pub fn extension(&self, c: Concept) -> Vec<bool> {
        let mut memo: HashMap<Concept, Vec<bool>> = HashMap::new();
        self.extension_memo(c, &mut memo)
    }

    fn extension_memo(&self, c: Concept, memo: &mut HashMap<Concept, Vec<bool>>) -> Vec<bool> {
        if let Some(v) = memo.get(&c) {
            return v.clone();
        }
        let n = self.domain_size as usize;
        let v = match c.kind() {
            ConceptKind::Atomic(name) => {
                let mut v = vec![false; n];
                if let Some(set) = self.unary.get(&name) {
                    for &e in set {
                        v[e as usize] = true;
                    }
                }
                v
            }
            ConceptKind::Not(inner) => {
                let mut v = self.extension_memo(inner, memo);
                for bit in v.iter_mut() {
                    *bit = !*bit;
                }
                v
            }
            ConceptKind::And(l, r) => {
                let lv = self.extension_memo(l, memo);
                let rv = self.extension_memo(r, memo);
                lv.iter().zip(rv.iter()).map(|(&a, &b)| a && b).collect()
            }
            ConceptKind::Exists(role, body) => {
                let bv = self.extension_memo(body, memo);
                (0..self.domain_size)
                    .map(|e| self.successors(role, e).iter().any(|&s| bv[s as usize]))
                    .collect()
            }
        };
        memo.insert(c, v.clone());
        v
    }

    pub fn satisfies_at(&self, c: Concept, e: u32) -> bool {
        self.extension(c)[e as usize]
    }
}

/// 𝔄_D: domain = cons(D), extensions read off the atoms, constant map the
/// identity.
pub fn structure_of_database(d: &Database) -> Structure {
    let cons: Vec<Const> = d.constants().into_iter().collect();
    let index: BTreeMap<Const, u32> = cons
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, i as u32))
        .collect();
    Structure::new(
        cons.len() as u32,
        d.unary_atoms().map(|&(a, c)| (a, index[&c])),
        d.binary_atoms().map(|&(r, c, e)| (r, index[&c], index[&e])),
        index.clone(),
    )
}

/// True iff every concept inclusion of K holds at every element and every
/// database atom holds under the constant map. Constants of D missing from
/// the map make the structure a non-model.
pub fn check_model(s: &Structure, k: &KB) -> bool {
    for ci in k.ontology.inclusions() {
        let lhs = s.extension(ci.lhs);
        let rhs = s.extension(ci.rhs);
        if lhs.iter().zip(rhs.iter()).any(|(&l, &r)| l && !r) {
            return false;
        }
    }
    for &(a, c) in k.database.unary_atoms() {
        match s.constant(c) {
            Some(e) if s.has_unary(a, e) => {}
            _ => return false,
        }
    }
    for &(r, c, d) in k.database.binary_atoms() {
        match (s.constant(c), s.constant(d)) {
            (Some(e1), Some(e2)) if s.has_edge(Role::new(r), e1, e2) => {}
            _ => return false,
        }
    }
    true
}
