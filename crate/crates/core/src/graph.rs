//! Graph operations on databases and structures: connected restriction,
//! canonical queries, database merging, homomorphisms, bisimulations, and
//! embeddings.

use crate::model::concept::Role;
use crate::model::kb::{Database, ModelError, Signature};
use crate::model::query::{QAtom, CQ};
use crate::model::structure::Structure;
use crate::symbols::{ConceptName, Const, RoleName, Var};
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

/// D together with a tuple of its constants (length 1 everywhere but the
/// merge-based tests).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedDatabase {
    pub database: Database,
    pub point: Vec<Const>,
}

impl PointedDatabase {
    pub fn new(database: Database, point: Vec<Const>) -> Result<PointedDatabase, ModelError> {
        for &c in &point {
            if !database.contains_constant(c) {
                return Err(ModelError::UnknownConstant(c.text()));
            }
        }
        Ok(PointedDatabase { database, point })
    }
}

/// A structure together with a tuple of domain elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedStructure {
    pub structure: Structure,
    pub point: Vec<u32>,
}

impl PointedStructure {
    pub fn new(structure: Structure, point: Vec<u32>) -> PointedStructure {
        for &e in &point {
            assert!(e < structure.domain_size(), "point element out of domain");
        }
        PointedStructure { structure, point }
    }
}

fn gaifman_neighbors(d: &Database) -> BTreeMap<Const, BTreeSet<Const>> {
    let mut adj: BTreeMap<Const, BTreeSet<Const>> = BTreeMap::new();
    for &(_, c1, c2) in d.binary_atoms() {
        adj.entry(c1).or_default().insert(c2);
        adj.entry(c2).or_default().insert(c1);
    }
    adj
}

/// The induced sub-database on the constants reachable from `a` in the
/// Gaifman graph of D (binary atoms as undirected edges).
pub fn connected_restriction(d: &Database, a: Const) -> Result<Database, ModelError> {
    if !d.contains_constant(a) {
        return Err(ModelError::UnknownConstant(a.text()));
    }
    let adj = gaifman_neighbors(d);
    let mut reached: BTreeSet<Const> = BTreeSet::new();
    let mut queue = VecDeque::from([a]);
    reached.insert(a);
    while let Some(c) = queue.pop_front() {
        if let Some(ns) = adj.get(&c) {
            for &n in ns {
                if reached.insert(n) {
                    queue.push_back(n);
                }
            }
        }
    }
    Ok(Database::new(
        d.unary_atoms().filter(|(_, c)| reached.contains(c)).copied(),
        d.binary_atoms().filter(|(_, c, _)| reached.contains(c)).copied(),
    ))
}

struct FreshVars {
    used: usize,
}

impl FreshVars {
    fn new() -> FreshVars {
        FreshVars { used: 0 }
    }

    fn next(&mut self) -> Var {
        const POOL: [&str; 5] = ["y", "z", "u", "v", "w"];
        let v = if self.used < POOL.len() {
            Var::new(POOL[self.used])
        } else {
            Var::new(&format!("y{}", self.used + 1))
        };
        self.used += 1;
        v
    }
}

/// The canonical query of D at a point tuple: one variable per constant,
/// every atom mirrored, everything but the answer variable existential.
/// Point positions beyond the first contribute equality atoms tying a fresh
/// variable to the position's constant (the repeated-constant rule; never
/// triggered by the length-1 tuples of the decision procedures).
pub fn canonical_cq_tuple(d: &Database, points: &[Const]) -> Result<CQ, ModelError> {
    assert!(!points.is_empty(), "canonical query needs a point");
    for &p in points {
        if !d.contains_constant(p) {
            return Err(ModelError::UnknownConstant(p.text()));
        }
    }
    // Variables are assigned in first-mention order over text-sorted atoms,
    // so the naming does not depend on interner state.
    let mut unary: Vec<(ConceptName, Const)> = d.unary_atoms().copied().collect();
    unary.sort_by_key(|&(n, c)| (n.text(), c.text()));
    let mut binary: Vec<(RoleName, Const, Const)> = d.binary_atoms().copied().collect();
    binary.sort_by_key(|&(r, c1, c2)| (r.text(), c1.text(), c2.text()));

    let mut fresh = FreshVars::new();
    let mut var_of: BTreeMap<Const, Var> = BTreeMap::new();
    var_of.insert(points[0], Var::new("x"));
    let mentions = unary
        .iter()
        .map(|&(_, c)| c)
        .chain(binary.iter().flat_map(|&(_, c1, c2)| [c1, c2]));
    for c in mentions {
        var_of.entry(c).or_insert_with(|| fresh.next());
    }

    let mut atoms: Vec<QAtom> = Vec::new();
    for &(n, c) in &unary {
        atoms.push(QAtom::Unary(n, var_of[&c]));
    }
    for &(r, c1, c2) in &binary {
        atoms.push(QAtom::Binary(r, var_of[&c1], var_of[&c2]));
    }
    for &p in &points[1..] {
        let position_var = fresh.next();
        atoms.push(QAtom::Eq(position_var, var_of[&p]));
    }
    Ok(CQ::new(var_of[&points[0]], atoms))
}

pub fn canonical_cq(d: &Database, a: Const) -> Result<CQ, ModelError> {
    canonical_cq_tuple(d, &[a])
}

/// D ∪ D' where D' is a disjoint constant-renamed copy of D and the copy of
/// `b` is identified with `a`. Fresh names are primed copies of the
/// originals.
pub fn merge_databases(d: &Database, a: Const, b: Const) -> Result<Database, ModelError> {
    for c in [a, b] {
        if !d.contains_constant(c) {
            return Err(ModelError::UnknownConstant(c.text()));
        }
    }
    let cons = d.constants();
    let mut used: BTreeSet<String> = cons.iter().map(|c| c.text()).collect();
    let mut rename: BTreeMap<Const, Const> = BTreeMap::new();
    for &c in &cons {
        if c == b {
            rename.insert(c, a);
            continue;
        }
        let mut name = format!("{c}'");
        while used.contains(&name) {
            name.push('\'');
        }
        used.insert(name.clone());
        rename.insert(c, Const::new(&name));
    }
    let copy = Database::new(
        d.unary_atoms().map(|&(n, c)| (n, rename[&c])),
        d.binary_atoms().map(|&(r, c1, c2)| (r, rename[&c1], rename[&c2])),
    );
    Ok(d.union(&copy))
}

/// Is there a homomorphism of the database structure into `s` sending the
/// point tuple of `p` to the point tuple of `s`? Homomorphisms need not
/// respect any other constants. Backtracking search; constants are ordered
/// by reachability from the point so each step is constrained by an
/// already-assigned neighbor when possible.
pub fn hom_exists(p: &PointedDatabase, s: &PointedStructure) -> Result<bool, ModelError> {
    if p.point.len() != s.point.len() {
        return Err(ModelError::PointArity(p.point.len(), s.point.len()));
    }
    let cons: Vec<Const> = p.database.constants().into_iter().collect();
    let idx: BTreeMap<Const, usize> = cons.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let n = cons.len();

    let mut labels: Vec<Vec<ConceptName>> = vec![Vec::new(); n];
    for &(name, c) in p.database.unary_atoms() {
        labels[idx[&c]].push(name);
    }
    let mut out_edges: Vec<Vec<(RoleName, usize)>> = vec![Vec::new(); n];
    let mut in_edges: Vec<Vec<(RoleName, usize)>> = vec![Vec::new(); n];
    for &(r, c1, c2) in p.database.binary_atoms() {
        out_edges[idx[&c1]].push((r, idx[&c2]));
        in_edges[idx[&c2]].push((r, idx[&c1]));
    }

    let mut assignment: Vec<Option<u32>> = vec![None; n];
    for (pc, &pe) in p.point.iter().zip(&s.point) {
        let i = idx[pc];
        match assignment[i] {
            Some(prev) if prev != pe => return Ok(false),
            _ => assignment[i] = Some(pe),
        }
    }

    // Breadth-first order seeded by the point constants.
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut queue: VecDeque<usize> = VecDeque::new();
    let enqueue = |i: usize, seen: &mut Vec<bool>, queue: &mut VecDeque<usize>| {
        if !seen[i] {
            seen[i] = true;
            queue.push_back(i);
        }
    };
    for pc in &p.point {
        enqueue(idx[pc], &mut seen, &mut queue);
    }
    let mut cursor = 0;
    loop {
        while let Some(i) = queue.pop_front() {
            order.push(i);
            for &(_, j) in out_edges[i].iter().chain(in_edges[i].iter()) {
                enqueue(j, &mut seen, &mut queue);
            }
        }
        while cursor < n && seen[cursor] {
            cursor += 1;
        }
        if cursor == n {
            break;
        }
        enqueue(cursor, &mut seen, &mut queue);
    }

    // Atoms touching i and already-assigned constants must hold at e. A
    // self-loop's other endpoint is e itself, not yet in the assignment.
    let consistent = |i: usize, e: u32, assignment: &[Option<u32>]| -> bool {
        let st = &s.structure;
        let resolve = |j: usize| if j == i { Some(e) } else { assignment[j] };
        labels[i].iter().all(|&a| st.has_unary(a, e))
            && out_edges[i].iter().all(|&(r, j)| match resolve(j) {
                Some(f) => st.has_edge(Role::new(r), e, f),
                None => true,
            })
            && in_edges[i].iter().all(|&(r, j)| match resolve(j) {
                Some(f) => st.has_edge(Role::new(r), f, e),
                None => true,
            })
    };

    fn search(
        step: usize,
        order: &[usize],
        assignment: &mut Vec<Option<u32>>,
        s: &Structure,
        consistent: &impl Fn(usize, u32, &[Option<u32>]) -> bool,
    ) -> bool {
        let Some(&i) = order.get(step) else {
            return true;
        };
        if let Some(e) = assignment[i] {
            return consistent(i, e, assignment)
                && search(step + 1, order, assignment, s, consistent);
        }
        for e in s.elements() {
            if consistent(i, e, assignment) {
                assignment[i] = Some(e);
                if search(step + 1, order, assignment, s, consistent) {
                    assignment[i] = None;
                    return true;
                }
                assignment[i] = None;
            }
        }
        false
    }

    Ok(search(0, &order, &mut assignment, &s.structure, &consistent))
}

/// Partition of the domain into Σ-bisimilarity classes, computed by
/// refinement: split on Σ-labels, then repeatedly on the sets of successor
/// classes along every Σ-role in both directions.
pub fn sigma_bisim_classes(s: &Structure, sigma: &Signature) -> Vec<u32> {
    let n = s.domain_size() as usize;
    let concepts: Vec<ConceptName> = sigma.concept_names.iter().copied().collect();
    let roles: Vec<Role> = sigma.roles();

    let assign = |keys: Vec<Vec<u32>>| -> Vec<u32> {
        let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
        keys.into_iter()
            .map(|k| {
                let fresh = ids.len() as u32;
                *ids.entry(k).or_insert(fresh)
            })
            .collect()
    };

    let mut class = assign(
        (0..n)
            .map(|e| {
                concepts
                    .iter()
                    .map(|&a| u32::from(s.has_unary(a, e as u32)))
                    .collect()
            })
            .collect(),
    );
    loop {
        let count = class.iter().collect::<BTreeSet<_>>().len();
        let keys: Vec<Vec<u32>> = (0..n)
            .map(|e| {
                let mut key = vec![class[e]];
                for &role in &roles {
                    let succ: BTreeSet<u32> = s
                        .successors(role, e as u32)
                        .iter()
                        .map(|&f| class[f as usize])
                        .collect();
                    key.push(succ.len() as u32);
                    key.extend(succ);
                }
                key
            })
            .collect();
        class = assign(keys);
        if class.iter().collect::<BTreeSet<_>>().len() == count {
            return class;
        }
    }
}

fn disjoint_union(s1: &Structure, s2: &Structure) -> Structure {
    let off = s1.domain_size();
    Structure::new(
        off + s2.domain_size(),
        s1.unary_atoms()
            .chain(s2.unary_atoms().map(|(a, e)| (a, e + off))),
        s1.edges()
            .chain(s2.edges().map(|(r, d, e)| (r, d + off, e + off))),
        [],
    )
}

/// Are the two points related by a Σ-bisimulation?
pub fn bisimilar(s1: &PointedStructure, s2: &PointedStructure, sigma: &Signature) -> bool {
    assert_eq!(s1.point.len(), 1, "bisimilarity is checked at single points");
    assert_eq!(s2.point.len(), 1, "bisimilarity is checked at single points");
    let union = disjoint_union(&s1.structure, &s2.structure);
    let class = sigma_bisim_classes(&union, sigma);
    class[s1.point[0] as usize] == class[(s1.structure.domain_size() + s2.point[0]) as usize]
}

/// Quotient of `s` by the given element classes, keeping Σ-atoms only.
fn sigma_quotient(s: &Structure, class: &[u32], sigma: &Signature) -> Structure {
    let k = class.iter().map(|&c| c + 1).max().unwrap_or(0);
    Structure::new(
        k,
        s.unary_atoms()
            .filter(|(a, _)| sigma.concept_names.contains(a))
            .map(|(a, e)| (a, class[e as usize])),
        s.edges()
            .filter(|(r, _, _)| sigma.role_names.contains(r))
            .map(|(r, d, e)| (r, class[d as usize], class[e as usize])),
        [],
    )
}

/// Does an ALCI(Σ)-embedding of (D, a) into the pointed structure exist?
/// An embedding relates constants to elements such that Σ-labels transfer,
/// related elements of one constant are pairwise Σ-bisimilar, and every
/// Σ-edge of D is matched by an edge on related elements. Equivalently
/// (because bisimilar elements have successors in the same classes), the
/// Σ-reduct of D around `a` maps homomorphically into the Σ-bisimulation
/// quotient of the target.
pub fn embedding_exists(
    d: &Database,
    a: Const,
    s: &PointedStructure,
    sigma: &Signature,
) -> Result<bool, ModelError> {
    if s.point.len() != 1 {
        return Err(ModelError::PointArity(1, s.point.len()));
    }
    if !d.contains_constant(a) {
        return Err(ModelError::UnknownConstant(a.text()));
    }
    let reduct = Database::new(
        d.unary_atoms()
            .filter(|(n, _)| sigma.concept_names.contains(n))
            .copied(),
        d.binary_atoms()
            .filter(|(r, _, _)| sigma.role_names.contains(r))
            .copied(),
    );
    if !reduct.contains_constant(a) {
        // No Σ-atoms mention a: the singleton relation {(a, point)} is an
        // embedding.
        return Ok(true);
    }
    let dcon = connected_restriction(&reduct, a)?;
    let class = sigma_bisim_classes(&s.structure, sigma);
    let quotient = sigma_quotient(&s.structure, &class, sigma);
    let qpoint = class[s.point[0] as usize];
    hom_exists(
        &PointedDatabase::new(dcon, vec![a])?,
        &PointedStructure::new(quotient, vec![qpoint]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::structure::structure_of_database;
    use proptest::prelude::*;

    fn c(s: &str) -> Const {
        Const::new(s)
    }

    fn cn(s: &str) -> ConceptName {
        ConceptName::new(s)
    }

    fn rn(s: &str) -> RoleName {
        RoleName::new(s)
    }

    fn citizenship_db() -> Database {
        Database::new(
            [(cn("Person"), c("a"))],
            [
                (rn("born_in"), c("a"), c("c")),
                (rn("citizen_of"), c("a"), c("c")),
                (rn("born_in"), c("b"), c("c1")),
                (rn("citizen_of"), c("b"), c("c2")),
            ],
        )
    }

    #[test]
    fn connected_restriction_keeps_the_component_of_the_point() {
        let d = citizenship_db();
        let da = connected_restriction(&d, c("a")).unwrap();
        assert_eq!(
            da,
            Database::new(
                [(cn("Person"), c("a"))],
                [
                    (rn("born_in"), c("a"), c("c")),
                    (rn("citizen_of"), c("a"), c("c")),
                ],
            )
        );
        let loop_db = Database::new([], [(rn("R"), c("a"), c("a"))]);
        assert_eq!(connected_restriction(&loop_db, c("a")).unwrap(), loop_db);
        let split = Database::new([(cn("A"), c("a")), (cn("B"), c("b"))], []);
        assert_eq!(
            connected_restriction(&split, c("a")).unwrap(),
            Database::new([(cn("A"), c("a"))], [])
        );
        assert!(connected_restriction(&split, c("zzz")).is_err());
    }

    #[test]
    fn canonical_cq_of_a_self_loop() {
        let d = Database::new([], [(rn("R"), c("a"), c("a"))]);
        let q = canonical_cq(&d, c("a")).unwrap();
        let x = Var::new("x");
        assert_eq!(q, CQ::new(x, [QAtom::Binary(rn("R"), x, x)]));
        assert!(q.is_rooted());
    }

    #[test]
    fn canonical_cq_of_the_citizenship_component() {
        let d = connected_restriction(&citizenship_db(), c("a")).unwrap();
        let q = canonical_cq(&d, c("a")).unwrap();
        let (x, y) = (Var::new("x"), Var::new("y"));
        assert_eq!(
            q,
            CQ::new(
                x,
                [
                    QAtom::Unary(cn("Person"), x),
                    QAtom::Binary(rn("born_in"), x, y),
                    QAtom::Binary(rn("citizen_of"), x, y),
                ],
            )
        );
    }

    #[test]
    fn canonical_cq_single_atom() {
        let d = Database::new([(cn("A"), c("a"))], []);
        let q = canonical_cq(&d, c("a")).unwrap();
        assert_eq!(q, CQ::new(Var::new("x"), [QAtom::Unary(cn("A"), Var::new("x"))]));
    }

    #[test]
    fn repeated_point_positions_add_equalities() {
        let d = Database::new([], [(rn("R"), c("a"), c("b"))]);
        let q = canonical_cq_tuple(&d, &[c("a"), c("a")]).unwrap();
        let (x, y, z) = (Var::new("x"), Var::new("y"), Var::new("z"));
        assert_eq!(
            q,
            CQ::new(x, [QAtom::Binary(rn("R"), x, y), QAtom::Eq(z, x)])
        );
    }

    #[test]
    fn merge_identifies_the_copied_negative_with_the_positive() {
        let d = Database::new([(cn("A"), c("a")), (cn("B"), c("b"))], []);
        let merged = merge_databases(&d, c("a"), c("b")).unwrap();
        assert_eq!(
            merged,
            Database::new(
                [
                    (cn("A"), c("a")),
                    (cn("B"), c("b")),
                    (cn("A"), c("a'")),
                    (cn("B"), c("a")),
                ],
                [],
            )
        );
        assert!(merged.constants().len() <= 2 * d.constants().len() - 1);
    }

    #[test]
    fn merge_on_the_votes_database() {
        let d = Database::new(
            [(cn("Left"), c("c1")), (cn("Right"), c("c2"))],
            [(rn("votes"), c("a"), c("c1")), (rn("votes"), c("b"), c("c2"))],
        );
        let merged = merge_databases(&d, c("a"), c("b")).unwrap();
        assert!(merged.binary_atoms().any(|&x| x == (rn("votes"), c("a"), c("c1"))));
        assert!(merged.binary_atoms().any(|&x| x == (rn("votes"), c("a"), c("c2'"))));
    }

    #[test]
    fn merge_of_a_constant_with_itself_is_degenerate() {
        let d = Database::new([(cn("A"), c("a"))], []);
        assert_eq!(merge_databases(&d, c("a"), c("a")).unwrap(), d);
    }

    #[test]
    fn hom_respects_points() {
        // Self loop at a cannot map onto a loop-free edge.
        let self_loop = Database::new([], [(rn("R"), c("a"), c("a"))]);
        let edge = Database::new([], [(rn("R"), c("b"), c("cc"))]);
        let target = structure_of_database(&edge);
        let pb = target.constant(c("b")).unwrap();
        let p = PointedDatabase::new(self_loop.clone(), vec![c("a")]).unwrap();
        let ps = PointedStructure::new(target, vec![pb]);
        assert!(!hom_exists(&p, &ps).unwrap());

        // Identity.
        let s = structure_of_database(&self_loop);
        let pa = s.constant(c("a")).unwrap();
        assert!(hom_exists(&p, &PointedStructure::new(s, vec![pa])).unwrap());

        // Both endpoints of an edge may collapse onto one loop element.
        let ab = Database::new([], [(rn("R"), c("a"), c("b"))]);
        let loop_s = structure_of_database(&self_loop);
        let e = loop_s.constant(c("a")).unwrap();
        let p_ab = PointedDatabase::new(ab, vec![c("a")]).unwrap();
        assert!(hom_exists(&p_ab, &PointedStructure::new(loop_s, vec![e])).unwrap());
    }

    #[test]
    fn hom_checks_self_loops_off_the_point() {
        // The loop sits on a constant the search places freely; the target
        // carries the right label but no edge at all.
        let d = Database::new([(cn("A"), c("a"))], [(rn("r"), c("b"), c("b"))]);
        let target = Structure::new(1, [(cn("A"), 0)], [], []);
        let p = PointedDatabase::new(d, vec![c("a")]).unwrap();
        let ps = PointedStructure::new(target, vec![0]);
        assert!(!hom_exists(&p, &ps).unwrap());
    }

    #[test]
    fn point_arity_mismatch_is_an_error() {
        let d = Database::new([(cn("A"), c("a"))], []);
        let s = structure_of_database(&d);
        let p = PointedDatabase::new(d, vec![c("a")]).unwrap();
        let ps = PointedStructure::new(s, vec![]);
        assert!(matches!(hom_exists(&p, &ps), Err(ModelError::PointArity(1, 0))));
    }

    fn sig(concepts: &[&str], roles: &[&str]) -> Signature {
        Signature {
            concept_names: concepts.iter().map(|s| cn(s)).collect(),
            role_names: roles.iter().map(|s| rn(s)).collect(),
        }
    }

    #[test]
    fn bisimilarity_identifies_loop_and_cycle() {
        let one = Structure::new(1, [], [(rn("R"), 0, 0)], []);
        let two = Structure::new(2, [], [(rn("R"), 0, 1), (rn("R"), 1, 0)], []);
        let sigma = sig(&[], &["R"]);
        assert!(bisimilar(
            &PointedStructure::new(one.clone(), vec![0]),
            &PointedStructure::new(two, vec![0]),
            &sigma,
        ));
        assert!(bisimilar(
            &PointedStructure::new(one.clone(), vec![0]),
            &PointedStructure::new(one, vec![0]),
            &sigma,
        ));
    }

    #[test]
    fn bisimilarity_sees_labels() {
        let s1 = Structure::new(1, [(cn("A"), 0)], [], []);
        let s2 = Structure::new(1, [], [], []);
        assert!(!bisimilar(
            &PointedStructure::new(s1, vec![0]),
            &PointedStructure::new(s2, vec![0]),
            &sig(&["A"], &[]),
        ));
    }

    #[test]
    fn embedding_into_a_cycle_succeeds_where_hom_fails() {
        let self_loop = Database::new([], [(rn("R"), c("a"), c("a"))]);
        let two = Structure::new(2, [], [(rn("R"), 0, 1), (rn("R"), 1, 0)], []);
        let ps = PointedStructure::new(two, vec![0]);
        let sigma = sig(&[], &["R"]);
        let p = PointedDatabase::new(self_loop.clone(), vec![c("a")]).unwrap();
        assert!(!hom_exists(&p, &ps).unwrap());
        assert!(embedding_exists(&self_loop, c("a"), &ps, &sigma).unwrap());
    }

    #[test]
    fn embedding_checks_labels_at_the_point() {
        let d = Database::new([(cn("A"), c("a"))], []);
        let s = Structure::new(1, [], [], []);
        let ps = PointedStructure::new(s, vec![0]);
        assert!(!embedding_exists(&d, c("a"), &ps, &sig(&["A"], &[])).unwrap());
    }

    // ---- randomized properties ----

    fn db_strategy() -> impl Strategy<Value = Database> {
        let consts = ["a", "b", "cc", "d"];
        let concepts = ["A", "B"];
        let roles = ["r", "s"];
        (
            proptest::collection::vec((0..2usize, 0..4usize), 0..4),
            proptest::collection::vec((0..2usize, 0..4usize, 0..4usize), 0..5),
        )
            .prop_map(move |(unary, binary)| {
                let mut u: Vec<(ConceptName, Const)> =
                    unary.into_iter().map(|(i, j)| (cn(concepts[i]), c(consts[j]))).collect();
                // Keep `a` in every database so it can serve as the point.
                u.push((cn("A"), c("a")));
                Database::new(
                    u,
                    binary
                        .into_iter()
                        .map(|(i, j, k)| (rn(roles[i]), c(consts[j]), c(consts[k]))),
                )
            })
    }

    fn structure_strategy() -> impl Strategy<Value = Structure> {
        (1..4u32).prop_flat_map(|n| {
            (
                proptest::collection::vec((0..2usize, 0..n), 0..4),
                proptest::collection::vec((0..2usize, 0..n, 0..n), 0..6),
            )
                .prop_map(move |(unary, binary)| {
                    let concepts = ["A", "B"];
                    let roles = ["r", "s"];
                    Structure::new(
                        n,
                        unary.into_iter().map(|(i, e)| (cn(concepts[i]), e)),
                        binary.into_iter().map(|(i, d, e)| (rn(roles[i]), d, e)),
                        [],
                    )
                })
        })
    }

    proptest! {
        #[test]
        fn connected_restriction_is_idempotent(d in db_strategy()) {
            let once = connected_restriction(&d, c("a")).unwrap();
            let twice = connected_restriction(&once, c("a")).unwrap();
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn connected_restriction_is_monotone(d in db_strategy(), extra in db_strategy()) {
            let bigger = d.union(&extra);
            let small = connected_restriction(&d, c("a")).unwrap();
            let large = connected_restriction(&bigger, c("a")).unwrap();
            prop_assert!(small.unary_atoms().all(|a| large.unary_atoms().any(|b| a == b)));
            prop_assert!(small.binary_atoms().all(|a| large.binary_atoms().any(|b| a == b)));
        }

        #[test]
        fn canonical_cq_is_rooted_and_holds_at_its_point(d in db_strategy()) {
            let dcon = connected_restriction(&d, c("a")).unwrap();
            let q = canonical_cq(&dcon, c("a")).unwrap();
            prop_assert!(q.is_rooted());
            let s = structure_of_database(&d);
            prop_assert!(q.holds_at(&s, s.constant(c("a")).unwrap()));
        }

        #[test]
        fn merge_bounds_constants(d in db_strategy(), pick in 0..2usize) {
            let cons: Vec<Const> = d.constants().into_iter().collect();
            let b = cons[pick % cons.len()];
            let merged = merge_databases(&d, c("a"), b).unwrap();
            prop_assert!(merged.constants().len() <= 2 * cons.len() - 1);
        }

        #[test]
        fn hom_composes(d1 in db_strategy(), d2 in db_strategy(), s in structure_strategy()) {
            let p1 = PointedDatabase::new(d1, vec![c("a")]).unwrap();
            let s2 = structure_of_database(&d2);
            let mid = PointedStructure::new(s2.clone(), vec![s2.constant(c("a")).unwrap()]);
            let p2 = PointedDatabase::new(d2.clone(), vec![c("a")]).unwrap();
            if hom_exists(&p1, &mid).unwrap() {
                for e in s.elements() {
                    let ps = PointedStructure::new(s.clone(), vec![e]);
                    if hom_exists(&p2, &ps).unwrap() {
                        prop_assert!(hom_exists(&p1, &ps).unwrap());
                    }
                }
            }
        }

        #[test]
        fn hom_implies_embedding(d in db_strategy(), s in structure_strategy()) {
            let p = PointedDatabase::new(d.clone(), vec![c("a")]).unwrap();
            let sigma = d.signature();
            for e in s.elements() {
                let ps = PointedStructure::new(s.clone(), vec![e]);
                if hom_exists(&p, &ps).unwrap() {
                    prop_assert!(embedding_exists(&d, c("a"), &ps, &sigma).unwrap());
                }
            }
        }

        #[test]
        fn bisimilar_is_symmetric_and_transitive(
            s1 in structure_strategy(),
            s2 in structure_strategy(),
            s3 in structure_strategy(),
        ) {
            let sigma = sig(&["A", "B"], &["r", "s"]);
            let p1 = PointedStructure::new(s1, vec![0]);
            let p2 = PointedStructure::new(s2, vec![0]);
            let p3 = PointedStructure::new(s3, vec![0]);
            prop_assert!(bisimilar(&p1, &p1, &sigma));
            prop_assert_eq!(bisimilar(&p1, &p2, &sigma), bisimilar(&p2, &p1, &sigma));
            if bisimilar(&p1, &p2, &sigma) && bisimilar(&p2, &p3, &sigma) {
                prop_assert!(bisimilar(&p1, &p3, &sigma));
            }
        }

        #[test]
        fn bisimilar_points_agree_on_concepts(s in structure_strategy(), depth_seed in 0..64u32) {
            use crate::model::concept::Concept;
            let sigma = sig(&["A", "B"], &["r", "s"]);
            let class = sigma_bisim_classes(&s, &sigma);
            // A small pseudo-random Σ-concept of modal depth ≤ 3.
            let mut seed = depth_seed;
            let mut next = || { seed = seed.wrapping_mul(1103515245).wrapping_add(12345); seed >> 16 };
            fn build(next: &mut impl FnMut() -> u32, depth: u32) -> Concept {
                let pick = next() % if depth == 0 { 2 } else { 5 };
                match pick {
                    0 => Concept::atomic(ConceptName::new("A")),
                    1 => Concept::atomic(ConceptName::new("B")),
                    2 => Concept::not(build(next, 0)),
                    3 => Concept::and(build(next, depth - 1), build(next, depth - 1)),
                    _ => {
                        let name = RoleName::new(if next() % 2 == 0 { "r" } else { "s" });
                        let role = if next() % 2 == 0 { Role::new(name) } else { Role::inverse_of(name) };
                        Concept::exists(role, build(next, depth - 1))
                    }
                }
            }
            let concept = build(&mut next, 3);
            let ext = s.extension(concept);
            for e1 in s.elements() {
                for e2 in s.elements() {
                    if class[e1 as usize] == class[e2 as usize] {
                        prop_assert_eq!(ext[e1 as usize], ext[e2 as usize]);
                    }
                }
            }
        }
    }
}
