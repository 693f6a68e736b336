//! Separability deciders and separator synthesis for labeled KBs.
//!
//! Three notions, ordered by what counts as a separator: weak projective
//! (UCQs over an arbitrary extension of the signature; decided through
//! canonical-query entailment), weak non-projective (plain-signature ALCI
//! concepts, synthesized from realizable types), and strong (the separator
//! must work in every model at once; decided twice, through merged databases
//! and through type disjointness, and the two verdicts are asserted equal).

use std::collections::BTreeSet;
use std::time::Instant;

use serde::Serialize;

use crate::entailment::{
    ucq_entailed_with, verify_strong_concept, verify_weak_concept, verify_weak_separator,
    ForestCountermodel,
};
use crate::graph::{canonical_cq, connected_restriction, merge_databases};
use crate::limits::{EngineError, Limits};
use crate::model::concept::Concept;
use crate::model::kb::{ConceptInclusion, LabeledKB, KB};
use crate::model::query::UCQ;
use crate::reasoner::{
    build_table, fresh_name, is_alci_complete, is_connected_type, kb_satisfiable,
    table_realizable_at, TypeBits, TypeTable,
};
use crate::symbols::Const;
use crate::syntax::{render_concept, render_ucq};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskKind {
    WeakProjective,
    WeakNonprojective,
    Strong,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Separable,
    Inseparable,
}

/// The synthesized formula, kept in AST form alongside its rendering.
#[derive(Clone, Debug)]
pub enum SeparatorFormula {
    Ucq(UCQ),
    Concept(Concept),
}

#[derive(Clone, Debug, Serialize)]
pub struct Separator {
    /// "ucq" or "concept".
    pub kind: &'static str,
    pub text: String,
    /// Result of the independent verification pass over the formula.
    pub verified: bool,
    #[serde(skip)]
    pub formula: SeparatorFormula,
}

#[derive(Clone, Debug, Serialize)]
pub struct CountermodelSketch {
    pub negative: String,
    pub nodes: usize,
    pub depth_bound: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessType {
    pub negative: String,
    pub concept: String,
    /// Whether the type is realizable at no positive example; only then does
    /// its complement double as a separator.
    pub excludes_positives: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MergeResult {
    pub positive: String,
    pub negative: String,
    pub merged_unsatisfiable: bool,
    pub types_disjoint: bool,
}

/// Machine-checkable grounds for the verdict.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// Separable weak verdicts: one countermodel sketch per negative at
    /// which the canonical query was refuted (full models in `evidence`).
    Countermodels { refuted_at: Vec<CountermodelSketch> },
    /// Inseparable weak verdicts: negatives at which the canonical query is
    /// entailed.
    EntailedAt { negatives: Vec<String> },
    /// Separable non-projective verdicts: the witnessing type per negative.
    WitnessTypes { witnesses: Vec<WitnessType> },
    /// Inseparable non-projective verdicts: the first negative every
    /// realizable type of which fails a witness condition.
    NoWitnessType { negative: String },
    /// Strong verdicts: both characterizations for every (positive,
    /// negative) pair.
    MergeResults { pairs: Vec<MergeResult> },
}

#[derive(Clone, Debug, Serialize)]
pub struct Stats {
    /// Closure size (concepts, complements included) and type count of the
    /// input KB.
    pub closure: usize,
    pub types: usize,
    pub time_ms: u64,
}

/// Typed artifacts behind the certificate, for downstream checks; not part
/// of the serialized report.
#[derive(Clone, Debug, Default)]
pub struct Evidence {
    pub countermodels: Vec<(Const, ForestCountermodel)>,
    pub witness_types: Vec<(Const, TypeBits)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeparabilityReport {
    pub task: TaskKind,
    pub status: Status,
    pub separator: Option<Separator>,
    pub certificate: Certificate,
    pub stats: Stats,
    #[serde(skip)]
    pub evidence: Evidence,
}

impl SeparabilityReport {
    pub fn separable(&self) -> bool {
        self.status == Status::Separable
    }
}

fn names(consts: &[Const]) -> Vec<String> {
    consts.iter().map(|c| c.text()).collect()
}

fn stats_of(table: &TypeTable, start: Instant) -> Stats {
    Stats {
        closure: table.closure().concept_count(),
        types: table.len(),
        time_ms: start.elapsed().as_millis() as u64,
    }
}

/// The canonical separator candidate: the disjunction over positives of the
/// canonical query of the example's connected database component.
fn canonical_ucq(k: &KB, positives: &[Const]) -> Result<UCQ, EngineError> {
    let mut disjuncts = Vec::new();
    for &a in positives {
        let component = connected_restriction(&k.database, a)?;
        disjuncts.push(canonical_cq(&component, a)?);
    }
    Ok(UCQ::new(disjuncts))
}

pub fn weak_projective(lk: &LabeledKB) -> Result<SeparabilityReport, EngineError> {
    weak_projective_with(lk, &Limits::default())
}

/// UCQ separability. The canonical query depends only on the positives and
/// is entailed at each of them, so (K,P,N) is separable iff it is entailed
/// at no negative, and then it is itself a separator.
pub fn weak_projective_with(
    lk: &LabeledKB,
    limits: &Limits,
) -> Result<SeparabilityReport, EngineError> {
    let start = Instant::now();
    let k = &lk.kb;
    let table = build_table(k, limits)?;
    let q = canonical_ucq(k, lk.positives())?;

    let mut sketches = Vec::new();
    let mut countermodels = Vec::new();
    let mut entailed_at = Vec::new();
    for &b in lk.negatives() {
        let outcome = ucq_entailed_with(k, &q, b, limits)?;
        if outcome.entailed {
            entailed_at.push(b);
        } else if let Some(cm) = outcome.countermodel {
            sketches.push(CountermodelSketch {
                negative: b.text(),
                nodes: cm.node_count(),
                depth_bound: cm.depth_bound,
            });
            countermodels.push((b, cm));
        }
    }

    if !entailed_at.is_empty() {
        return Ok(SeparabilityReport {
            task: TaskKind::WeakProjective,
            status: Status::Inseparable,
            separator: None,
            certificate: Certificate::EntailedAt { negatives: names(&entailed_at) },
            stats: stats_of(&table, start),
            evidence: Evidence::default(),
        });
    }

    let verified = verify_weak_separator(k, &q, lk.positives(), lk.negatives())?;
    Ok(SeparabilityReport {
        task: TaskKind::WeakProjective,
        status: Status::Separable,
        separator: Some(Separator {
            kind: "ucq",
            text: render_ucq(&q),
            verified,
            formula: SeparatorFormula::Ucq(q),
        }),
        certificate: Certificate::Countermodels { refuted_at: sketches },
        stats: stats_of(&table, start),
        evidence: Evidence { countermodels, witness_types: Vec::new() },
    })
}

/// K with the type pinned at b: a fresh name confined below ⊓t and asserted
/// of b, so models of the extension are exactly models of K realizing t (or
/// a supertype-compatible refinement) at b.
fn pinned_kb(k: &KB, table: &TypeTable, t: &TypeBits, b: Const) -> KB {
    let tc = table.concept_of_type(t);
    let x = fresh_name(k, tc);
    let o = k.ontology.with_inclusion(ConceptInclusion { lhs: Concept::atomic(x), rhs: tc });
    KB::new(o, k.database.with_unary(x, b))
}

pub fn weak_nonprojective(lk: &LabeledKB) -> Result<SeparabilityReport, EngineError> {
    weak_nonprojective_with(lk, &Limits::default())
}

/// Plain-signature ALCI separability. Per negative b, a witness is a type
/// realizable at b such that (i) pinning it at b refutes the canonical
/// query and (ii) if it is connected and has a complete unraveling then it
/// is realizable at no positive. Separable iff every negative has a
/// witness. When every witness excludes the positives, the conjunction of
/// the complemented type concepts is a separator; otherwise the decision
/// stands without a formula.
pub fn weak_nonprojective_with(
    lk: &LabeledKB,
    limits: &Limits,
) -> Result<SeparabilityReport, EngineError> {
    let start = Instant::now();
    let k = &lk.kb;
    let table = build_table(k, limits)?;
    let q = canonical_ucq(k, lk.positives())?;

    let mut positive_types: Vec<BTreeSet<TypeBits>> = Vec::new();
    for &a in lk.positives() {
        positive_types.push(table_realizable_at(&table, &k.database, a)?);
    }

    let mut witnesses: Vec<(Const, TypeBits, bool)> = Vec::new();
    for &b in lk.negatives() {
        // Pinning only strengthens the KB, so a query already entailed at b
        // stays entailed under every pinned type: no candidate can satisfy
        // the non-entailment condition and the scan is skipped.
        if ucq_entailed_with(k, &q, b, limits)?.entailed {
            return Ok(SeparabilityReport {
                task: TaskKind::WeakNonprojective,
                status: Status::Inseparable,
                separator: None,
                certificate: Certificate::NoWitnessType { negative: b.text() },
                stats: stats_of(&table, start),
                evidence: Evidence::default(),
            });
        }
        let realizable = table_realizable_at(&table, &k.database, b)?;
        // Types no positive realizes come first: they auto-satisfy condition
        // (ii) and are the ones whose complement yields a separator.
        let mut ordered: Vec<(&TypeBits, bool)> = realizable
            .iter()
            .map(|t| (t, positive_types.iter().all(|s| !s.contains(t))))
            .collect();
        ordered.sort_by_key(|&(_, excludes)| !excludes);

        let mut found = None;
        for (t, excludes) in ordered {
            if !excludes && is_connected_type(table.closure(), t) && is_alci_complete(&table, t) {
                continue;
            }
            let pinned = pinned_kb(k, &table, t, b);
            if !ucq_entailed_with(&pinned, &q, b, limits)?.entailed {
                found = Some((t.clone(), excludes));
                break;
            }
        }
        match found {
            Some((t, excludes)) => witnesses.push((b, t, excludes)),
            None => {
                return Ok(SeparabilityReport {
                    task: TaskKind::WeakNonprojective,
                    status: Status::Inseparable,
                    separator: None,
                    certificate: Certificate::NoWitnessType { negative: b.text() },
                    stats: stats_of(&table, start),
                    evidence: Evidence::default(),
                });
            }
        }
    }

    // ALCI is conjunction-closed, so the per-negative separators ¬⊓t
    // combine into one concept — but only when every witness excludes the
    // positives; otherwise the verdict is certificate-only.
    let separator = if witnesses.iter().all(|&(_, _, excludes)| excludes) {
        let distinct: BTreeSet<&TypeBits> = witnesses.iter().map(|(_, t, _)| t).collect();
        let conjuncts: Vec<Concept> = distinct
            .into_iter()
            .map(|t| Concept::not(table.concept_of_type(t)))
            .collect();
        let concept = Concept::big_and(&conjuncts);
        let verified = verify_weak_concept(k, concept, lk.positives(), lk.negatives())?;
        Some(Separator {
            kind: "concept",
            text: render_concept(concept),
            verified,
            formula: SeparatorFormula::Concept(concept),
        })
    } else {
        None
    };

    let certificate = Certificate::WitnessTypes {
        witnesses: witnesses
            .iter()
            .map(|(b, t, excludes)| WitnessType {
                negative: b.text(),
                concept: render_concept(table.concept_of_type(t)),
                excludes_positives: *excludes,
            })
            .collect(),
    };
    let evidence = Evidence {
        countermodels: Vec::new(),
        witness_types: witnesses.into_iter().map(|(b, t, _)| (b, t)).collect(),
    };
    Ok(SeparabilityReport {
        task: TaskKind::WeakNonprojective,
        status: Status::Separable,
        separator,
        certificate,
        stats: stats_of(&table, start),
        evidence,
    })
}

pub fn projective_via_reduction(lk: &LabeledKB) -> Result<SeparabilityReport, EngineError> {
    projective_via_reduction_with(lk, &Limits::default())
}

/// The projective decision through the non-projective one: a tautology over
/// a fresh name splits every type into indistinguishable twins, which kills
/// completeness of connected types and frees the witness search from
/// condition (ii). Must agree with `weak_projective` exactly.
pub fn projective_via_reduction_with(
    lk: &LabeledKB,
    limits: &Limits,
) -> Result<SeparabilityReport, EngineError> {
    let spare = Concept::atomic(fresh_name(&lk.kb, Concept::top()));
    let extended = KB::new(
        lk.kb.ontology.with_inclusion(ConceptInclusion { lhs: spare, rhs: spare }),
        lk.kb.database.clone(),
    );
    let relabeled = LabeledKB::new(
        extended,
        lk.positives().iter().copied(),
        lk.negatives().iter().copied(),
    )
    .expect("examples are untouched by the ontology extension");
    let mut report = weak_nonprojective_with(&relabeled, limits)?;
    report.task = TaskKind::WeakProjective;
    Ok(report)
}

pub fn strong(lk: &LabeledKB) -> Result<SeparabilityReport, EngineError> {
    strong_with(lk, &Limits::default())
}

/// Strong separability: some formula must distinguish each positive from
/// each negative in every model simultaneously. Characterized by the merged
/// KB (positive and negative identified) being unsatisfiable for every
/// pair, equivalently by the pairs realizing disjoint type sets; both are
/// computed and must agree. The separator is the disjunction of the type
/// concepts realizable at the positives.
pub fn strong_with(lk: &LabeledKB, limits: &Limits) -> Result<SeparabilityReport, EngineError> {
    let start = Instant::now();
    let k = &lk.kb;
    let table = build_table(k, limits)?;

    let mut realizable = std::collections::BTreeMap::new();
    for &e in lk.positives().iter().chain(lk.negatives()) {
        realizable.insert(e, table_realizable_at(&table, &k.database, e)?);
    }

    let mut pairs = Vec::new();
    let mut separable = true;
    for &a in lk.positives() {
        for &b in lk.negatives() {
            let merged = merge_databases(&k.database, a, b)?;
            let merged_unsatisfiable = !kb_satisfiable(&KB::new(k.ontology.clone(), merged));
            let types_disjoint = realizable[&a].intersection(&realizable[&b]).next().is_none();
            assert_eq!(
                merged_unsatisfiable, types_disjoint,
                "the merge and type characterizations of strong separability disagree on ({a:?}, {b:?})"
            );
            separable &= merged_unsatisfiable;
            pairs.push(MergeResult {
                positive: a.text(),
                negative: b.text(),
                merged_unsatisfiable,
                types_disjoint,
            });
        }
    }
    let certificate = Certificate::MergeResults { pairs };

    if !separable {
        return Ok(SeparabilityReport {
            task: TaskKind::Strong,
            status: Status::Inseparable,
            separator: None,
            certificate,
            stats: stats_of(&table, start),
            evidence: Evidence::default(),
        });
    }

    // ⊔ over positives of ⊔ over their realizable types of ⊓t; the two
    // disjunction layers flatten into one over the union of the type sets.
    let mut positive_types = BTreeSet::new();
    for &a in lk.positives() {
        positive_types.extend(realizable[&a].iter().cloned());
    }
    let disjuncts: Vec<Concept> =
        positive_types.iter().map(|t| table.concept_of_type(t)).collect();
    let concept = Concept::big_or(&disjuncts);
    let verified = verify_strong_concept(k, concept, lk.positives(), lk.negatives())?;
    Ok(SeparabilityReport {
        task: TaskKind::Strong,
        status: Status::Separable,
        separator: Some(Separator {
            kind: "concept",
            text: render_concept(concept),
            verified,
            formula: SeparatorFormula::Concept(concept),
        }),
        certificate,
        stats: stats_of(&table, start),
        evidence: Evidence::default(),
    })
}
