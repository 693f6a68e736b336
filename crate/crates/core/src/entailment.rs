//! Certain-answer entailment of rooted UCQs, decided by searching for
//! forest-shaped countermodels of bounded depth.
//!
//! A candidate countermodel is a coherent type assignment to the database
//! constants (the skeleton) plus a witness tree of depth ≤ m below every
//! constant, where m bounds the size of the query. `K ⊭ q(b)` iff some
//! candidate admits no homomorphism from any disjunct sending the answer
//! variable to `b`.
//!
//! Homomorphisms are decided compositionally. A disjunct splits into the
//! variables mapped onto constants and connected "pieces" left over; each
//! piece is a rooted query fragment that must embed into the witness tree of
//! the constant its seam atoms attach to. Inside a tree the same split
//! recurses: variables mapped onto the current node, then sub-pieces that
//! must embed below one child each. Since trees branch only downward and
//! pieces are connected, every homomorphism decomposes this way.
//!
//! Per node the search only needs to know which pieces embed below it — its
//! behavior, a set of piece ids. Witness choices compose monotonically, so
//! for each (type, satisfied demands, depth) the antichain of ⊆-minimal
//! achievable behaviors suffices, which keeps the tree search finite and
//! memoizable.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::rc::Rc;

use crate::limits::{Budget, EngineError, Limits};
use crate::model::concept::{Concept, ConceptKind, Role};
use crate::model::kb::{ModelError, KB};
use crate::model::query::{QAtom, CQ, UCQ};
use crate::model::structure::Structure;
use crate::reasoner::{
    build_table, candidates, entails_concept, member, table_satisfiable, Closure, Lit, TypeBits,
    TypeTable,
};
use crate::symbols::{ConceptName, Const, RoleName, Var};

/// Outcome of an entailment check, with the refuting countermodel when the
/// answer is negative.
#[derive(Clone, Debug)]
pub struct EntailOutcome {
    pub entailed: bool,
    pub countermodel: Option<ForestCountermodel>,
}

/// A depth-bounded forest countermodel: types on the database constants and
/// a witness tree hanging off each constant. The root of each tree repeats
/// the constant's type; depth-m nodes are leaves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForestCountermodel {
    pub skeleton: BTreeMap<Const, TypeBits>,
    pub trees: BTreeMap<Const, WitnessTree>,
    pub depth_bound: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessTree {
    pub type_bits: TypeBits,
    pub children: Vec<(Role, WitnessTree)>,
}

impl WitnessTree {
    pub fn node_count(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(|(_, t)| t.node_count())
            .sum::<usize>()
    }
}

impl ForestCountermodel {
    /// Total nodes, each constant counted once.
    pub fn node_count(&self) -> usize {
        self.skeleton.len()
            + self
                .trees
                .values()
                .map(|t| t.node_count() - 1)
                .sum::<usize>()
    }

    /// The countermodel as a finite structure: skeleton, trees, and one
    /// extra node per type needed to discharge the existential demands of
    /// the depth-m frontier. Every edge is coherence-valid and every demand
    /// has a witness, so the result satisfies K. Query images can never
    /// reach the extra nodes: that would take a path of more edges than any
    /// disjunct has atoms.
    pub fn completed_structure(&self, k: &KB) -> Structure {
        let table = TypeTable::new(Closure::of_kb(k));
        let closure = table.closure();
        let idx = |bits: &TypeBits| -> usize {
            table
                .position(bits)
                .expect("countermodel types are realizable")
        };

        let cons: Vec<Const> = self.skeleton.keys().copied().collect();
        let const_id: BTreeMap<Const, u32> = cons
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, i as u32))
            .collect();
        let mut node_types: Vec<usize> = cons.iter().map(|c| idx(&self.skeleton[c])).collect();
        let mut parents: Vec<Option<(Role, u32)>> = vec![None; cons.len()];
        let mut children: Vec<Vec<(Role, u32)>> = vec![Vec::new(); cons.len()];
        let mut edges: Vec<(RoleName, u32, u32)> = Vec::new();

        for &(r, c, d) in k.database.binary_atoms() {
            edges.push((r, const_id[&c], const_id[&d]));
        }

        // Lay the trees out; the root of each tree is the constant itself.
        let mut stack: Vec<(u32, &WitnessTree)> = Vec::new();
        for (c, tree) in &self.trees {
            debug_assert_eq!(tree.type_bits, self.skeleton[c]);
            stack.push((const_id[c], tree));
        }
        while let Some((my, tree)) = stack.pop() {
            for (role, child) in &tree.children {
                let cid = node_types.len() as u32;
                node_types.push(idx(&child.type_bits));
                parents.push(Some((*role, my)));
                children.push(Vec::new());
                children[my as usize].push((*role, cid));
                edges.push(oriented(*role, my, cid));
                stack.push((cid, child));
            }
        }

        // Discharge leftover demands (the frontier's, chiefly) into one
        // shared node per witness type.
        let mut island: BTreeMap<usize, u32> = BTreeMap::new();
        let mut pending: Vec<u32> = (0..node_types.len() as u32).collect();
        while let Some(n) = pending.pop() {
            let t = node_types[n as usize];
            for &(pair, role, body) in &closure.exists {
                if !table.types()[t].get(pair) {
                    continue;
                }
                let witnessed = children[n as usize]
                    .iter()
                    .any(|&(r, ch)| r == role && member(&table.types()[node_types[ch as usize]], body))
                    || parents[n as usize].is_some_and(|(pr, pid)| {
                        pr.inv() == role && member(&table.types()[node_types[pid as usize]], body)
                    })
                    || ((n as usize) < cons.len()
                        && k.database
                            .role_successors(role, cons[n as usize])
                            .iter()
                            .any(|d| member(&table.types()[node_types[const_id[d] as usize]], body)));
                if witnessed {
                    continue;
                }
                let w = (0..table.len())
                    .find(|&w| member(&table.types()[w], body) && table.coherent_idx(t, role, w))
                    .expect("realizable types have coherent witnesses");
                let wid = match island.get(&w) {
                    Some(&id) => id,
                    None => {
                        let id = node_types.len() as u32;
                        node_types.push(w);
                        parents.push(None);
                        children.push(Vec::new());
                        pending.push(id);
                        island.insert(w, id);
                        id
                    }
                };
                children[n as usize].push((role, wid));
                edges.push(oriented(role, n, wid));
            }
        }

        let mut unary: Vec<(ConceptName, u32)> = Vec::new();
        for pair in 1..closure.pair_count() {
            if let ConceptKind::Atomic(name) = closure.rep(pair).kind() {
                for (n, &t) in node_types.iter().enumerate() {
                    if table.types()[t].get(pair) {
                        unary.push((name, n as u32));
                    }
                }
            }
        }

        Structure::new(
            node_types.len() as u32,
            unary,
            edges,
            cons.iter().map(|&c| (c, const_id[&c])),
        )
    }
}

fn oriented(role: Role, from: u32, to: u32) -> (RoleName, u32, u32) {
    if role.inverted {
        (role.name, to, from)
    } else {
        (role.name, from, to)
    }
}

/// K ⊨ q(b): does every model of K admit a homomorphism of some disjunct
/// sending the answer variable to `b`? Unsatisfiable KBs entail everything.
pub fn ucq_entailed(k: &KB, q: &UCQ, b: Const) -> Result<bool, EngineError> {
    ucq_entailed_with(k, q, b, &Limits::default()).map(|o| o.entailed)
}

/// As `ucq_entailed`, under explicit limits and keeping the countermodel.
pub fn ucq_entailed_with(
    k: &KB,
    q: &UCQ,
    b: Const,
    limits: &Limits,
) -> Result<EntailOutcome, EngineError> {
    if !k.database.contains_constant(b) {
        return Err(ModelError::UnknownConstant(b.text()).into());
    }
    if q.disjuncts.iter().any(|d| !d.is_rooted()) {
        return Err(ModelError::NonRootedQuery.into());
    }
    let table = build_table(k, limits)?;
    if !table_satisfiable(&table, &k.database) {
        return Ok(EntailOutcome {
            entailed: true,
            countermodel: None,
        });
    }
    let budget = Budget::new(limits.max_search_nodes);
    let m = q
        .disjuncts
        .iter()
        .map(|d| d.atom_count() + d.vars().len())
        .max()
        .expect("a UCQ has at least one disjunct");
    let disjuncts: Vec<(Var, BTreeSet<QAtom>)> = q.disjuncts.iter().map(collapse).collect();
    let pieces = piece_universe(&disjuncts, &budget)?;
    let engine = Engine {
        k,
        table: &table,
        pieces,
        disjuncts,
        m,
        budget: &budget,
        memo: RefCell::new(HashMap::new()),
    };
    engine.decide(b)
}

/// q weakly separates: entailed at every positive, at no negative example.
pub fn verify_weak_separator(
    k: &KB,
    q: &UCQ,
    positives: &[Const],
    negatives: &[Const],
) -> Result<bool, EngineError> {
    for &a in positives {
        if !ucq_entailed(k, q, a)? {
            return Ok(false);
        }
    }
    for &b in negatives {
        if ucq_entailed(k, q, b)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// C weakly separates: K ⊨ C(a) for every positive a, K ⊭ C(b) for every
/// negative b.
pub fn verify_weak_concept(
    k: &KB,
    c: Concept,
    positives: &[Const],
    negatives: &[Const],
) -> Result<bool, EngineError> {
    for &a in positives {
        if !entails_concept(k, c, a)? {
            return Ok(false);
        }
    }
    for &b in negatives {
        if entails_concept(k, c, b)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// C strongly separates: K ⊨ C(a) for every positive a and K ⊨ ¬C(b) for
/// every negative b.
pub fn verify_strong_concept(
    k: &KB,
    c: Concept,
    positives: &[Const],
    negatives: &[Const],
) -> Result<bool, EngineError> {
    for &a in positives {
        if !entails_concept(k, c, a)? {
            return Ok(false);
        }
    }
    for &b in negatives {
        if !entails_concept(k, Concept::not(c), b)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The reserved root variable of query pieces. `%` cannot occur in parsed
/// variable names, so it never collides with user queries.
fn piece_root() -> Var {
    Var::new("%r")
}

/// Drop equality atoms by merging their variables; the class member with
/// the smallest name represents each class.
fn collapse(cq: &CQ) -> (Var, BTreeSet<QAtom>) {
    let mut repr: BTreeMap<Var, Var> = cq.vars().into_iter().map(|v| (v, v)).collect();
    fn find(repr: &BTreeMap<Var, Var>, mut v: Var) -> Var {
        while repr[&v] != v {
            v = repr[&v];
        }
        v
    }
    for atom in &cq.atoms {
        if let QAtom::Eq(v, w) = *atom {
            let (rv, rw) = (find(&repr, v), find(&repr, w));
            if rv != rw {
                let (lo, hi) = if rv.text() <= rw.text() { (rv, rw) } else { (rw, rv) };
                repr.insert(hi, lo);
            }
        }
    }
    let f = |v: Var| find(&repr, v);
    let atoms = cq
        .atoms
        .iter()
        .filter_map(|a| match *a {
            QAtom::Unary(n, v) => Some(QAtom::Unary(n, f(v))),
            QAtom::Binary(r, v, w) => Some(QAtom::Binary(r, f(v), f(w))),
            QAtom::Eq(..) => None,
        })
        .collect();
    (f(cq.answer), atoms)
}

/// A connected query fragment rooted at the reserved variable; the unit the
/// tree search reasons about.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
struct RQuery {
    atoms: BTreeSet<QAtom>,
}

impl RQuery {
    fn free_vars(&self) -> BTreeSet<Var> {
        self.atoms
            .iter()
            .flat_map(|a| a.vars())
            .filter(|&v| v != piece_root())
            .collect()
    }
}

/// Rename every merged variable to the reserved root.
fn contract(atoms: impl IntoIterator<Item = QAtom>, merged: &BTreeSet<Var>) -> RQuery {
    let f = |v: Var| if merged.contains(&v) { piece_root() } else { v };
    let atoms = atoms
        .into_iter()
        .map(|a| match a {
            QAtom::Unary(n, v) => QAtom::Unary(n, f(v)),
            QAtom::Binary(r, v, w) => QAtom::Binary(r, f(v), f(w)),
            QAtom::Eq(..) => unreachable!("equality atoms are collapsed first"),
        })
        .collect();
    RQuery { atoms }
}

/// One connected component of the free variables, with the atoms inside it
/// and the seam atoms tying it to the anchored variables.
struct Comp {
    internal: BTreeSet<QAtom>,
    seams: Vec<QAtom>,
}

struct Split {
    anchored_unary: Vec<(ConceptName, Var)>,
    anchored_binary: Vec<(RoleName, Var, Var)>,
    comps: Vec<Comp>,
}

/// Classify atoms against a set of anchored variables and group the free
/// variables into connected components (connected through atoms between two
/// free variables; seams do not merge components).
fn split(atoms: &BTreeSet<QAtom>, anchored: &BTreeSet<Var>) -> Split {
    let free: BTreeSet<Var> = atoms
        .iter()
        .flat_map(|a| a.vars())
        .filter(|v| !anchored.contains(v))
        .collect();
    let mut repr: BTreeMap<Var, Var> = free.iter().map(|&v| (v, v)).collect();
    fn find(repr: &BTreeMap<Var, Var>, mut v: Var) -> Var {
        while repr[&v] != v {
            v = repr[&v];
        }
        v
    }
    for atom in atoms {
        if let QAtom::Binary(_, v, w) = *atom {
            if !anchored.contains(&v) && !anchored.contains(&w) {
                let (rv, rw) = (find(&repr, v), find(&repr, w));
                if rv != rw {
                    repr.insert(rv, rw);
                }
            }
        }
    }
    let mut sp = Split {
        anchored_unary: Vec::new(),
        anchored_binary: Vec::new(),
        comps: Vec::new(),
    };
    let mut by_root: BTreeMap<Var, usize> = BTreeMap::new();
    let mut comp_of = |sp: &mut Split, v: Var, repr: &BTreeMap<Var, Var>| -> usize {
        let root = find(repr, v);
        *by_root.entry(root).or_insert_with(|| {
            sp.comps.push(Comp {
                internal: BTreeSet::new(),
                seams: Vec::new(),
            });
            sp.comps.len() - 1
        })
    };
    for atom in atoms {
        match *atom {
            QAtom::Unary(n, v) => {
                if anchored.contains(&v) {
                    sp.anchored_unary.push((n, v));
                } else {
                    let i = comp_of(&mut sp, v, &repr);
                    sp.comps[i].internal.insert(*atom);
                }
            }
            QAtom::Binary(r, v, w) => match (anchored.contains(&v), anchored.contains(&w)) {
                (true, true) => sp.anchored_binary.push((r, v, w)),
                (false, false) => {
                    let i = comp_of(&mut sp, v, &repr);
                    sp.comps[i].internal.insert(*atom);
                }
                _ => {
                    let freev = if anchored.contains(&v) { w } else { v };
                    let i = comp_of(&mut sp, freev, &repr);
                    sp.comps[i].seams.push(*atom);
                }
            },
            QAtom::Eq(..) => debug_assert!(false, "equality atoms are collapsed first"),
        }
    }
    sp
}

#[derive(Default)]
struct Pieces {
    list: Vec<RQuery>,
    index: HashMap<RQuery, usize>,
}

impl Pieces {
    fn insert(&mut self, q: RQuery) -> (usize, bool) {
        if let Some(&id) = self.index.get(&q) {
            return (id, false);
        }
        let id = self.list.len();
        self.list.push(q.clone());
        self.index.insert(q, id);
        (id, true)
    }

    fn id(&self, q: &RQuery) -> usize {
        *self
            .index
            .get(q)
            .expect("piece universe is closed under decomposition")
    }
}

/// Component-side endpoints of the seam atoms: the variables a sub-piece
/// merges into its root.
fn seam_ends(comp: &Comp, anchored: &BTreeSet<Var>) -> BTreeSet<Var> {
    comp.seams
        .iter()
        .flat_map(|a| a.vars())
        .filter(|v| !anchored.contains(v))
        .collect()
}

/// All piece fragments any homomorphism decomposition can ask about: seeded
/// by anchoring each variable subset of each disjunct, then closed under the
/// node-level split used by `Engine::embeds`.
fn piece_universe(
    disjuncts: &[(Var, BTreeSet<QAtom>)],
    budget: &Budget,
) -> Result<Pieces, EngineError> {
    let mut pieces = Pieces::default();
    let mut work: Vec<usize> = Vec::new();
    for (_, atoms) in disjuncts {
        let vars: Vec<Var> = atoms
            .iter()
            .flat_map(|a| a.vars())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        budget.spend(1u64.checked_shl(vars.len() as u32).unwrap_or(u64::MAX))?;
        for mask in 1..(1u64 << vars.len()) {
            let anchored: BTreeSet<Var> = vars
                .iter()
                .enumerate()
                .filter(|&(i, _)| mask >> i & 1 == 1)
                .map(|(_, &v)| v)
                .collect();
            let sp = split(atoms, &anchored);
            for comp in &sp.comps {
                let all = comp.internal.iter().chain(comp.seams.iter()).copied();
                let (id, new) = pieces.insert(contract(all, &anchored));
                if new {
                    work.push(id);
                }
            }
        }
    }
    while let Some(id) = work.pop() {
        let q = pieces.list[id].clone();
        let free: Vec<Var> = q.free_vars().into_iter().collect();
        budget.spend(1u64.checked_shl(free.len() as u32).unwrap_or(u64::MAX))?;
        for mask in 0..(1u64 << free.len()) {
            let mut anchored: BTreeSet<Var> = BTreeSet::from([piece_root()]);
            anchored.extend(
                free.iter()
                    .enumerate()
                    .filter(|&(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &v)| v),
            );
            let sp = split(&q.atoms, &anchored);
            for comp in &sp.comps {
                let merged = seam_ends(comp, &anchored);
                let (sid, new) = pieces.insert(contract(comp.internal.iter().copied(), &merged));
                if new {
                    work.push(sid);
                }
            }
        }
    }
    Ok(pieces)
}

/// Piece ids embeddable below a node.
type Behavior = BTreeSet<usize>;

/// Witness tree under construction, over type indices.
#[derive(Clone, Debug)]
struct TNode {
    t: usize,
    children: Vec<(Role, TNode)>,
}

struct Engine<'a> {
    k: &'a KB,
    table: &'a TypeTable,
    pieces: Pieces,
    disjuncts: Vec<(Var, BTreeSet<QAtom>)>,
    m: usize,
    budget: &'a Budget,
    #[allow(clippy::type_complexity)]
    memo: RefCell<HashMap<(usize, Vec<usize>, usize), Rc<Vec<(Behavior, TNode)>>>>,
}

impl Engine<'_> {
    fn type_has(&self, bits: &TypeBits, name: ConceptName) -> bool {
        self.table
            .closure()
            .lit_of(Concept::atomic(name))
            .is_some_and(|l| member(bits, l))
    }

    /// Existential closure pairs the type demands: (pair, role, body).
    fn demands_of(&self, t: usize) -> Vec<(usize, Role, Lit)> {
        let bits = &self.table.types()[t];
        self.table
            .closure()
            .exists
            .iter()
            .filter(|&&(p, _, _)| bits.get(p))
            .copied()
            .collect()
    }

    /// Does the piece embed at a node of type `t` whose children expose the
    /// given behaviors? Enumerates the variables mapped onto the node
    /// itself; the components left over must each fit below one child.
    fn embeds(
        &self,
        q: &RQuery,
        t: usize,
        children: &[(Role, &Behavior)],
    ) -> Result<bool, EngineError> {
        let free: Vec<Var> = q.free_vars().into_iter().collect();
        self.budget
            .spend(1u64.checked_shl(free.len() as u32).unwrap_or(u64::MAX))?;
        let bits = &self.table.types()[t];
        'masks: for mask in 0..(1u64 << free.len()) {
            let mut anchored: BTreeSet<Var> = BTreeSet::from([piece_root()]);
            anchored.extend(
                free.iter()
                    .enumerate()
                    .filter(|&(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &v)| v),
            );
            let sp = split(&q.atoms, &anchored);
            // Tree nodes carry no loops, and their only edges towards the
            // node itself come from the one parent, handled by the caller.
            if !sp.anchored_binary.is_empty() {
                continue;
            }
            if !sp
                .anchored_unary
                .iter()
                .all(|&(a, _)| self.type_has(bits, a))
            {
                continue;
            }
            for comp in &sp.comps {
                let sub = contract(comp.internal.iter().copied(), &seam_ends(comp, &anchored));
                let sid = self.pieces.id(&sub);
                let placed = children.iter().any(|&(role, beh)| {
                    beh.contains(&sid)
                        && comp
                            .seams
                            .iter()
                            .all(|seam| seam_compatible(seam, &anchored, role))
                });
                if !placed {
                    continue 'masks;
                }
            }
            return Ok(true);
        }
        Ok(false)
    }

    fn node_behavior(
        &self,
        t: usize,
        children: &[(Role, &Behavior)],
    ) -> Result<Behavior, EngineError> {
        let mut beh = Behavior::new();
        for id in 0..self.pieces.list.len() {
            if self.embeds(&self.pieces.list[id].clone(), t, children)? {
                beh.insert(id);
            }
        }
        Ok(beh)
    }

    /// The ⊆-minimal behaviors achievable by a depth-`depth` witness tree
    /// whose root has type `t`, with the given demands already satisfied
    /// from outside (by database neighbours), each with one witness tree.
    fn achievable(
        &self,
        t: usize,
        satisfied: &BTreeSet<usize>,
        depth: usize,
    ) -> Result<Rc<Vec<(Behavior, TNode)>>, EngineError> {
        let key = (t, satisfied.iter().copied().collect::<Vec<_>>(), depth);
        if let Some(v) = self.memo.borrow().get(&key) {
            return Ok(v.clone());
        }
        self.budget.spend(1)?;
        let out = if depth == 0 {
            let beh = self.node_behavior(t, &[])?;
            vec![(
                beh,
                TNode {
                    t,
                    children: Vec::new(),
                },
            )]
        } else {
            let demands = self.demands_of(t);
            let mut acc = Vec::new();
            self.expand(
                t,
                &demands,
                0,
                &mut satisfied.clone(),
                &mut Vec::new(),
                depth,
                &mut acc,
            )?;
            antichain(acc)
        };
        let rc = Rc::new(out);
        self.memo.borrow_mut().insert(key, rc.clone());
        Ok(rc)
    }

    /// Walk the demands in closure order; each unsatisfied one picks a
    /// coherent witness child, which may also discharge later demands of
    /// the same role. Choices are deduplicated by their visible effect.
    #[allow(clippy::too_many_arguments)]
    fn expand(
        &self,
        t: usize,
        demands: &[(usize, Role, Lit)],
        from: usize,
        satisfied: &mut BTreeSet<usize>,
        chosen: &mut Vec<(Role, Behavior, TNode)>,
        depth: usize,
        acc: &mut Vec<(Behavior, TNode)>,
    ) -> Result<(), EngineError> {
        let next = demands[from..]
            .iter()
            .position(|(p, _, _)| !satisfied.contains(p))
            .map(|d| from + d);
        let Some(j) = next else {
            self.budget.spend(1)?;
            let refs: Vec<(Role, &Behavior)> = chosen.iter().map(|(r, b, _)| (*r, b)).collect();
            let beh = self.node_behavior(t, &refs)?;
            acc.push((
                beh,
                TNode {
                    t,
                    children: chosen.iter().map(|(r, _, n)| (*r, n.clone())).collect(),
                },
            ));
            return Ok(());
        };
        let (_, role, body) = demands[j];
        let mut seen: HashSet<(Vec<usize>, Behavior)> = HashSet::new();
        for w in 0..self.table.len() {
            if !member(&self.table.types()[w], body) || !self.table.coherent_idx(t, role, w) {
                continue;
            }
            let extra: Vec<usize> = demands[j + 1..]
                .iter()
                .filter(|&&(q, r2, b2)| {
                    r2 == role && member(&self.table.types()[w], b2) && !satisfied.contains(&q)
                })
                .map(|&(q, _, _)| q)
                .collect();
            for (bw, tree) in self.achievable(w, &BTreeSet::new(), depth - 1)?.iter() {
                if !seen.insert((extra.clone(), bw.clone())) {
                    continue;
                }
                satisfied.extend(extra.iter().copied());
                chosen.push((role, bw.clone(), tree.clone()));
                self.expand(t, demands, j + 1, satisfied, chosen, depth, acc)?;
                chosen.pop();
                for q in &extra {
                    satisfied.remove(q);
                }
            }
        }
        Ok(())
    }

    fn decide(&self, b: Const) -> Result<EntailOutcome, EngineError> {
        let cands =
            candidates(self.table, &self.k.database).expect("satisfiability checked upfront");
        let mut order: Vec<Const> = cands.keys().copied().collect();
        order.sort_by_key(|c| cands[c].len());
        let edges: Vec<(Role, Const, Const)> = self
            .k
            .database
            .binary_atoms()
            .map(|&(r, c, d)| (Role::new(r), c, d))
            .collect();
        let mut assigned: BTreeMap<Const, usize> = BTreeMap::new();
        let found = self.skeletons(&order, &cands, &edges, &mut assigned, b)?;
        Ok(match found {
            Some(cm) => EntailOutcome {
                entailed: false,
                countermodel: Some(cm),
            },
            None => EntailOutcome {
                entailed: true,
                countermodel: None,
            },
        })
    }

    /// Backtrack over coherent skeleton type assignments; stop at the first
    /// one some witness forest of which refutes the query.
    fn skeletons(
        &self,
        order: &[Const],
        cands: &BTreeMap<Const, Vec<usize>>,
        edges: &[(Role, Const, Const)],
        assigned: &mut BTreeMap<Const, usize>,
        b: Const,
    ) -> Result<Option<ForestCountermodel>, EngineError> {
        let Some(&c) = order.get(assigned.len()) else {
            return self.try_skeleton(assigned, b);
        };
        for &i in &cands[&c] {
            self.budget.spend(1)?;
            assigned.insert(c, i);
            let ok = edges.iter().all(|&(role, from, to)| {
                if from != c && to != c {
                    return true;
                }
                match (assigned.get(&from), assigned.get(&to)) {
                    (Some(&fi), Some(&ti)) => self.table.coherent_idx(fi, role, ti),
                    _ => true,
                }
            });
            if ok {
                if let Some(cm) = self.skeletons(order, cands, edges, assigned, b)? {
                    return Ok(Some(cm));
                }
            }
            assigned.remove(&c);
        }
        Ok(None)
    }

    fn try_skeleton(
        &self,
        skeleton: &BTreeMap<Const, usize>,
        b: Const,
    ) -> Result<Option<ForestCountermodel>, EngineError> {
        let mut options: Vec<(Const, Rc<Vec<(Behavior, TNode)>>)> = Vec::new();
        for (&c, &t) in skeleton {
            let satisfied: BTreeSet<usize> = self
                .demands_of(t)
                .into_iter()
                .filter(|&(_, role, body)| {
                    self.k
                        .database
                        .role_successors(role, c)
                        .iter()
                        .any(|d| member(&self.table.types()[skeleton[d]], body))
                })
                .map(|(p, _, _)| p)
                .collect();
            options.push((c, self.achievable(t, &satisfied, self.m)?));
        }
        self.combos(skeleton, &options, &mut Vec::new(), b)
    }

    /// Try every combination of per-constant minimal behaviors.
    #[allow(clippy::type_complexity)]
    fn combos(
        &self,
        skeleton: &BTreeMap<Const, usize>,
        options: &[(Const, Rc<Vec<(Behavior, TNode)>>)],
        choice: &mut Vec<usize>,
        b: Const,
    ) -> Result<Option<ForestCountermodel>, EngineError> {
        if choice.len() == options.len() {
            self.budget.spend(1)?;
            let picked: BTreeMap<Const, &(Behavior, TNode)> = options
                .iter()
                .zip(choice.iter())
                .map(|((c, opts), &i)| (*c, &opts[i]))
                .collect();
            for (answer, atoms) in &self.disjuncts {
                if self.hom_disjunct(*answer, atoms, skeleton, &picked, b)? {
                    return Ok(None);
                }
            }
            return Ok(Some(self.assemble(skeleton, &picked)));
        }
        for i in 0..options[choice.len()].1.len() {
            choice.push(i);
            let found = self.combos(skeleton, options, choice, b)?;
            choice.pop();
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }

    /// Does the disjunct map into the forest with the answer variable on
    /// `b`? Enumerates the set of variables mapped onto constants and their
    /// images; each leftover component must attach to a single constant by
    /// its seams and embed as a piece below it.
    fn hom_disjunct(
        &self,
        answer: Var,
        atoms: &BTreeSet<QAtom>,
        skeleton: &BTreeMap<Const, usize>,
        picked: &BTreeMap<Const, &(Behavior, TNode)>,
        b: Const,
    ) -> Result<bool, EngineError> {
        let mut vars: BTreeSet<Var> = atoms.iter().flat_map(|a| a.vars()).collect();
        vars.insert(answer);
        let others: Vec<Var> = vars.iter().copied().filter(|&v| v != answer).collect();
        let cons: Vec<Const> = skeleton.keys().copied().collect();
        self.budget
            .spend(1u64.checked_shl(others.len() as u32).unwrap_or(u64::MAX))?;
        for mask in 0..(1u64 << others.len()) {
            let mut anchored: BTreeSet<Var> = BTreeSet::from([answer]);
            let slots: Vec<Var> = others
                .iter()
                .enumerate()
                .filter(|&(i, _)| mask >> i & 1 == 1)
                .map(|(_, &v)| v)
                .collect();
            anchored.extend(slots.iter().copied());
            let sp = split(atoms, &anchored);
            let mut idx = vec![0usize; slots.len()];
            loop {
                self.budget.spend(1)?;
                let mut g: BTreeMap<Var, Const> = BTreeMap::from([(answer, b)]);
                for (s, &i) in slots.iter().zip(&idx) {
                    g.insert(*s, cons[i]);
                }
                if self.anchored_hom_ok(&sp, &anchored, &g, skeleton, picked) {
                    return Ok(true);
                }
                let mut d = 0;
                while d < idx.len() {
                    idx[d] += 1;
                    if idx[d] < cons.len() {
                        break;
                    }
                    idx[d] = 0;
                    d += 1;
                }
                if d == idx.len() {
                    break;
                }
            }
        }
        Ok(false)
    }

    fn anchored_hom_ok(
        &self,
        sp: &Split,
        anchored: &BTreeSet<Var>,
        g: &BTreeMap<Var, Const>,
        skeleton: &BTreeMap<Const, usize>,
        picked: &BTreeMap<Const, &(Behavior, TNode)>,
    ) -> bool {
        if !sp
            .anchored_unary
            .iter()
            .all(|&(a, v)| self.type_has(&self.table.types()[skeleton[&g[&v]]], a))
        {
            return false;
        }
        if !sp
            .anchored_binary
            .iter()
            .all(|&(r, v, w)| self.k.database.has_binary(r, g[&v], g[&w]))
        {
            return false;
        }
        for comp in &sp.comps {
            let mut target: Option<Const> = None;
            for seam in &comp.seams {
                let end = seam
                    .vars()
                    .into_iter()
                    .find(|v| anchored.contains(v))
                    .expect("seams touch an anchored variable");
                let c = g[&end];
                if *target.get_or_insert(c) != c {
                    return false;
                }
            }
            let c = target.expect("components attach through seams");
            let all = comp.internal.iter().chain(comp.seams.iter()).copied();
            let piece = contract(all, anchored);
            if !picked[&c].0.contains(&self.pieces.id(&piece)) {
                return false;
            }
        }
        true
    }

    fn assemble(
        &self,
        skeleton: &BTreeMap<Const, usize>,
        picked: &BTreeMap<Const, &(Behavior, TNode)>,
    ) -> ForestCountermodel {
        ForestCountermodel {
            skeleton: skeleton
                .iter()
                .map(|(&c, &t)| (c, self.table.types()[t].clone()))
                .collect(),
            trees: picked
                .iter()
                .map(|(&c, &&(_, ref tn))| (c, self.witness_of(tn)))
                .collect(),
            depth_bound: self.m,
        }
    }

    fn witness_of(&self, n: &TNode) -> WitnessTree {
        WitnessTree {
            type_bits: self.table.types()[n.t].clone(),
            children: n
                .children
                .iter()
                .map(|(r, ch)| (*r, self.witness_of(ch)))
                .collect(),
        }
    }
}

/// A seam atom is realized by a child edge iff the edge's role matches the
/// atom's direction: r(z, u) needs an r-child, r(u, z) an r⁻-child, for z
/// anchored and u free.
fn seam_compatible(seam: &QAtom, anchored: &BTreeSet<Var>, child_role: Role) -> bool {
    match *seam {
        QAtom::Binary(r, v, w) => {
            if anchored.contains(&v) {
                debug_assert!(!anchored.contains(&w));
                child_role == Role::new(r)
            } else {
                child_role == Role::new(r).inv()
            }
        }
        _ => unreachable!("seams are binary atoms"),
    }
}

/// Keep the ⊆-minimal behaviors, one witness each.
fn antichain(mut all: Vec<(Behavior, TNode)>) -> Vec<(Behavior, TNode)> {
    all.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    let mut keep: Vec<(Behavior, TNode)> = Vec::new();
    for (beh, tree) in all {
        if keep.iter().all(|(k, _)| !k.is_subset(&beh)) {
            keep.push((beh, tree));
        }
    }
    keep
}
