//! Conjunctive queries with one answer variable, and their unions.

use crate::model::structure::Structure;
use crate::symbols::{ConceptName, RoleName, Var};
use std::collections::{BTreeMap, BTreeSet};

/// Query atom over variables. Binary atoms use role names only; inverse
/// roles are expressed by swapping the arguments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QAtom {
    Unary(ConceptName, Var),
    Binary(RoleName, Var, Var),
    Eq(Var, Var),
}

impl QAtom {
    pub fn vars(&self) -> Vec<Var> {
        match *self {
            QAtom::Unary(_, v) => vec![v],
            QAtom::Binary(_, v, w) | QAtom::Eq(v, w) => vec![v, w],
        }
    }
}

/// A conjunctive query q(x) with answer variable x; all other variables are
/// existentially quantified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CQ {
    pub answer: Var,
    pub atoms: BTreeSet<QAtom>,
}

impl CQ {
    pub fn new(answer: Var, atoms: impl IntoIterator<Item = QAtom>) -> CQ {
        CQ {
            answer,
            atoms: atoms.into_iter().collect(),
        }
    }

    /// All variables, answer variable included even if it occurs in no atom.
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut vs: BTreeSet<Var> = self.atoms.iter().flat_map(|a| a.vars()).collect();
        vs.insert(self.answer);
        vs
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn collect_signature(
        &self,
        concept_names: &mut BTreeSet<ConceptName>,
        role_names: &mut BTreeSet<RoleName>,
    ) {
        for atom in &self.atoms {
            match *atom {
                QAtom::Unary(a, _) => {
                    concept_names.insert(a);
                }
                QAtom::Binary(r, _, _) => {
                    role_names.insert(r);
                }
                QAtom::Eq(_, _) => {}
            }
        }
    }

    /// Every variable reaches the answer variable through shared atoms.
    pub fn is_rooted(&self) -> bool {
        let vars = self.vars();
        let mut reached: BTreeSet<Var> = BTreeSet::new();
        reached.insert(self.answer);
        loop {
            let before = reached.len();
            for atom in &self.atoms {
                let vs = atom.vars();
                if vs.iter().any(|v| reached.contains(v)) {
                    reached.extend(vs);
                }
            }
            if reached.len() == before {
                break;
            }
        }
        reached.len() == vars.len()
    }

    /// K ⊨ q(e) evaluation on a single structure: is there an assignment of
    /// the variables to elements, sending the answer variable to `e`, under
    /// which every atom holds?
    pub fn holds_at(&self, s: &Structure, e: u32) -> bool {
        // Collapse equality classes first, then backtrack over the rest.
        let vars: Vec<Var> = self.vars().into_iter().collect();
        let index: BTreeMap<Var, usize> = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut repr: Vec<usize> = (0..vars.len()).collect();
        fn find(repr: &mut Vec<usize>, i: usize) -> usize {
            if repr[i] != i {
                let root = find(repr, repr[i]);
                repr[i] = root;
            }
            repr[i]
        }
        for atom in &self.atoms {
            if let QAtom::Eq(v, w) = *atom {
                let (a, b) = (find(&mut repr, index[&v]), find(&mut repr, index[&w]));
                if a != b {
                    repr[a] = b;
                }
            }
        }
        let class: Vec<usize> = (0..vars.len()).map(|i| find(&mut repr, i)).collect();
        let classes: BTreeSet<usize> = class.iter().copied().collect();
        let order: Vec<usize> = classes.into_iter().collect();
        let slot: BTreeMap<usize, usize> =
            order.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let answer_slot = slot[&class[index[&self.answer]]];

        let mut assignment: Vec<Option<u32>> = vec![None; order.len()];
        assignment[answer_slot] = Some(e);
        let var_slot = |v: Var| slot[&class[index[&v]]];
        self.search(s, &mut assignment, &var_slot)
    }

    fn search(
        &self,
        s: &Structure,
        assignment: &mut Vec<Option<u32>>,
        var_slot: &impl Fn(Var) -> usize,
    ) -> bool {
        // Check all atoms whose variables are fully assigned.
        for atom in &self.atoms {
            let ok = match *atom {
                QAtom::Unary(a, v) => match assignment[var_slot(v)] {
                    Some(e) => s.has_unary(a, e),
                    None => true,
                },
                QAtom::Binary(r, v, w) => {
                    match (assignment[var_slot(v)], assignment[var_slot(w)]) {
                        (Some(d), Some(e)) => {
                            s.has_edge(crate::model::concept::Role::new(r), d, e)
                        }
                        _ => true,
                    }
                }
                QAtom::Eq(_, _) => true,
            };
            if !ok {
                return false;
            }
        }
        match assignment.iter().position(|a| a.is_none()) {
            None => true,
            Some(next) => {
                for e in s.elements() {
                    assignment[next] = Some(e);
                    if self.search(s, assignment, var_slot) {
                        assignment[next] = None;
                        return true;
                    }
                }
                assignment[next] = None;
                false
            }
        }
    }
}

/// A union of conjunctive queries sharing one answer variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UCQ {
    pub disjuncts: Vec<CQ>,
}

impl UCQ {
    pub fn new(disjuncts: Vec<CQ>) -> UCQ {
        assert!(!disjuncts.is_empty(), "a UCQ has at least one disjunct");
        let answer = disjuncts[0].answer;
        assert!(
            disjuncts.iter().all(|q| q.answer == answer),
            "disjuncts must share the answer variable"
        );
        UCQ { disjuncts }
    }

    pub fn answer(&self) -> Var {
        self.disjuncts[0].answer
    }

    pub fn collect_signature(
        &self,
        concept_names: &mut BTreeSet<ConceptName>,
        role_names: &mut BTreeSet<RoleName>,
    ) {
        for q in &self.disjuncts {
            q.collect_signature(concept_names, role_names);
        }
    }

    pub fn holds_at(&self, s: &Structure, e: u32) -> bool {
        self.disjuncts.iter().any(|q| q.holds_at(s, e))
    }

    /// Largest variable count over the disjuncts.
    pub fn max_vars(&self) -> usize {
        self.disjuncts.iter().map(|q| q.vars().len()).max().unwrap()
    }
}
