//! Command-line front end: parse a labeled KB file, run separability
//! tasks, print reports, check candidate separators, and expose the
//! brute-force oracle for debugging.
//!
//! Exit codes: 0 all requested tasks separable (or checks pass), 1 some
//! task inseparable (or check failed), 2 input or usage error, 3 separator
//! verification mismatch under --verify, 4 resource limit hit.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ontosep::entailment::ucq_entailed_with;
use ontosep::model::query::UCQ;
use ontosep::oracle::{brute_weak_separable_empty_ontology, enumerate_models, ModelBudget};
use ontosep::reasoner::kb_satisfiable;
use ontosep::separability::{
    strong_with, weak_nonprojective_with, weak_projective_with, Certificate, SeparabilityReport,
};
use ontosep::syntax::{parse_concept, parse_labeled_kb, parse_ucq, render_report};
use ontosep::{Concept, EngineError, LabeledKB, Limits};

const EXIT_SEPARABLE: u8 = 0;
const EXIT_INSEPARABLE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_VERIFY: u8 = 3;
const EXIT_RESOURCE: u8 = 4;

#[derive(Parser)]
#[command(name = "ontosep", version, about = "Separability decisions for labeled ALCI knowledge bases")]
struct CliConfig {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide separability of the labeled KB and print one report per task.
    Check(CheckArgs),
    /// Check a candidate separator formula against the labeled KB.
    Verify(VerifyArgs),
    /// Enumerate bounded models by brute force and cross-check the engine.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TaskArg {
    WeakProjective,
    WeakNonprojective,
    Strong,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Args)]
struct CheckArgs {
    /// Labeled KB in .okb syntax.
    file: PathBuf,
    #[arg(long, value_enum, default_value_t = TaskArg::All)]
    task: TaskArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Fail (exit 3) if any emitted separator flunks its independent
    /// verification.
    #[arg(long)]
    verify: bool,
    /// Cap on closure size (concepts, complements included).
    #[arg(long)]
    max_closure: Option<usize>,
    /// Cap on search nodes for the entailment engine.
    #[arg(long)]
    max_nodes: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Weak,
    Strong,
}

#[derive(Args)]
struct VerifyArgs {
    /// Labeled KB in .okb syntax.
    file: PathBuf,
    /// File holding the candidate separator: a concept, or a UCQ written
    /// `q(x) :- ...` (UCQs verify in weak mode only).
    #[arg(long)]
    formula: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Weak)]
    mode: ModeArg,
    #[arg(long)]
    max_closure: Option<usize>,
    #[arg(long)]
    max_nodes: Option<u64>,
}

#[derive(Args)]
struct OracleArgs {
    /// Labeled KB in .okb syntax.
    file: PathBuf,
    /// Domain size bound for model enumeration.
    #[arg(long, default_value_t = 2)]
    oracle_domain: u32,
}

fn main() -> ExitCode {
    let config = CliConfig::parse();
    let code = match config.command {
        Command::Check(args) => check(&args),
        Command::Verify(args) => verify(&args),
        Command::Oracle(args) => oracle(&args),
    };
    ExitCode::from(code)
}

fn read_labeled_kb(path: &Path) -> Result<LabeledKB, u8> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_INPUT
    })?;
    parse_labeled_kb(&text).map_err(|e| {
        eprintln!("{}:{}", path.display(), e);
        EXIT_INPUT
    })
}

fn limits(max_closure: Option<usize>, max_nodes: Option<u64>) -> Limits {
    let mut limits = Limits::default();
    if let Some(cap) = max_closure {
        limits.max_closure = cap;
    }
    if let Some(cap) = max_nodes {
        limits.max_search_nodes = cap;
    }
    limits
}

fn resource_exit(e: &EngineError) -> u8 {
    match e {
        EngineError::ClosureTooLarge { .. }
        | EngineError::TypeSpaceTooLarge { .. }
        | EngineError::SearchBudget { .. } => EXIT_RESOURCE,
        EngineError::Model(_) => EXIT_INPUT,
    }
}

fn render_text(r: &SeparabilityReport) -> String {
    let task = match r.task {
        ontosep::TaskKind::WeakProjective => "weak-projective",
        ontosep::TaskKind::WeakNonprojective => "weak-nonprojective",
        ontosep::TaskKind::Strong => "strong",
    };
    let status = if r.separable() { "separable" } else { "inseparable" };
    let mut out = format!("== {task}: {status}\n");
    match &r.separator {
        Some(sep) => {
            let verdict = if sep.verified { "verified" } else { "UNVERIFIED" };
            let _ = writeln!(out, "separator ({}, {verdict}): {}", sep.kind, sep.text);
        }
        None if r.separable() => out.push_str("separator: none emitted (certificate only)\n"),
        None => {}
    }
    match &r.certificate {
        Certificate::Countermodels { refuted_at } => {
            for cm in refuted_at {
                let _ = writeln!(
                    out,
                    "countermodel at {}: {} nodes, depth bound {}",
                    cm.negative, cm.nodes, cm.depth_bound
                );
            }
        }
        Certificate::EntailedAt { negatives } => {
            let _ = writeln!(out, "canonical query entailed at: {}", negatives.join(", "));
        }
        Certificate::WitnessTypes { witnesses } => {
            for w in witnesses {
                let scope = if w.excludes_positives { "excludes positives" } else { "shared with positives" };
                let _ = writeln!(out, "witness type at {} ({scope}): {}", w.negative, w.concept);
            }
        }
        Certificate::NoWitnessType { negative } => {
            let _ = writeln!(out, "no witness type at {negative}");
        }
        Certificate::MergeResults { pairs } => {
            for p in pairs {
                let _ = writeln!(
                    out,
                    "pair ({}, {}): merged {}, types {}",
                    p.positive,
                    p.negative,
                    if p.merged_unsatisfiable { "unsatisfiable" } else { "satisfiable" },
                    if p.types_disjoint { "disjoint" } else { "overlap" },
                );
            }
        }
    }
    let _ = writeln!(
        out,
        "stats: closure {}, types {}, {} ms",
        r.stats.closure, r.stats.types, r.stats.time_ms
    );
    out
}

fn check(args: &CheckArgs) -> u8 {
    let lk = match read_labeled_kb(&args.file) {
        Ok(lk) => lk,
        Err(code) => return code,
    };
    let limits = limits(args.max_closure, args.max_nodes);

    let tasks: Vec<fn(&LabeledKB, &Limits) -> Result<SeparabilityReport, EngineError>> =
        match args.task {
            TaskArg::WeakProjective => vec![weak_projective_with],
            TaskArg::WeakNonprojective => vec![weak_nonprojective_with],
            TaskArg::Strong => vec![strong_with],
            TaskArg::All => vec![weak_projective_with, weak_nonprojective_with, strong_with],
        };

    let mut reports = Vec::new();
    for task in tasks {
        match task(&lk, &limits) {
            Ok(report) => reports.push(report),
            Err(e) => {
                eprintln!("error: {e}");
                return resource_exit(&e);
            }
        }
    }

    match args.format {
        FormatArg::Json if reports.len() == 1 => println!("{}", render_report(&reports[0])),
        FormatArg::Json => {
            let values: Vec<serde_json::Value> =
                reports.iter().map(|r| serde_json::to_value(r).unwrap()).collect();
            println!("{}", serde_json::to_string_pretty(&values).unwrap());
        }
        FormatArg::Text => {
            for r in &reports {
                print!("{}", render_text(r));
            }
        }
    }

    if args.verify && reports.iter().any(|r| r.separator.as_ref().is_some_and(|s| !s.verified)) {
        eprintln!("error: an emitted separator failed verification");
        return EXIT_VERIFY;
    }
    if reports.iter().all(|r| r.separable()) {
        EXIT_SEPARABLE
    } else {
        EXIT_INSEPARABLE
    }
}

enum Formula {
    Concept(Concept),
    Ucq(UCQ),
}

fn read_formula(path: &Path) -> Result<Formula, u8> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_INPUT
    })?;
    // Queries start with their head; everything else must be a concept.
    let parsed = if text.trim_start().starts_with("q(") {
        parse_ucq(&text).map(Formula::Ucq)
    } else {
        parse_concept(&text).map(Formula::Concept)
    };
    parsed.map_err(|e| {
        eprintln!("{}:{}", path.display(), e);
        EXIT_INPUT
    })
}

/// Per-example entailment verdicts for a candidate separator. Weak mode
/// wants the formula entailed at every positive and no negative; strong
/// mode additionally wants the complement entailed at every negative.
fn verify(args: &VerifyArgs) -> u8 {
    let lk = match read_labeled_kb(&args.file) {
        Ok(lk) => lk,
        Err(code) => return code,
    };
    let formula = match read_formula(&args.formula) {
        Ok(f) => f,
        Err(code) => return code,
    };
    let limits = limits(args.max_closure, args.max_nodes);
    let k = &lk.kb;

    let entailed_at = |e| -> Result<(bool, bool), EngineError> {
        // (formula entailed, complement entailed) at the example.
        match &formula {
            Formula::Ucq(q) => Ok((ucq_entailed_with(k, q, e, &limits)?.entailed, false)),
            Formula::Concept(c) => Ok((
                ontosep::reasoner::entails_concept(k, *c, e)?,
                ontosep::reasoner::entails_concept(k, Concept::not(*c), e)?,
            )),
        }
    };

    if args.mode == ModeArg::Strong && matches!(formula, Formula::Ucq(_)) {
        eprintln!("error: strong verification needs a concept formula (a UCQ has no complement)");
        return EXIT_INPUT;
    }

    let mut pass = true;
    for &a in lk.positives() {
        match entailed_at(a) {
            Ok((entailed, _)) => {
                let verdict = if entailed { "entailed (as required)" } else { "NOT entailed" };
                pass &= entailed;
                println!("positive {}: {verdict}", a.text());
            }
            Err(e) => {
                eprintln!("error: {e}");
                return resource_exit(&e);
            }
        }
    }
    for &b in lk.negatives() {
        match entailed_at(b) {
            Ok((entailed, complement)) => {
                let ok = match args.mode {
                    ModeArg::Weak => !entailed,
                    ModeArg::Strong => complement,
                };
                let verdict = match (args.mode, ok) {
                    (ModeArg::Weak, true) => "not entailed (as required)",
                    (ModeArg::Weak, false) => "ENTAILED",
                    (ModeArg::Strong, true) => "complement entailed (as required)",
                    (ModeArg::Strong, false) => "complement NOT entailed",
                };
                pass &= ok;
                println!("negative {}: {verdict}", b.text());
            }
            Err(e) => {
                eprintln!("error: {e}");
                return resource_exit(&e);
            }
        }
    }
    if pass {
        println!("separation holds");
        EXIT_SEPARABLE
    } else {
        println!("separation fails");
        EXIT_INSEPARABLE
    }
}

fn oracle(args: &OracleArgs) -> u8 {
    let lk = match read_labeled_kb(&args.file) {
        Ok(lk) => lk,
        Err(code) => return code,
    };
    let k = &lk.kb;
    let budget = ModelBudget { max_domain_size: args.oracle_domain, max_models: 2_000_000 };
    let mut stream = enumerate_models(k, budget);
    let mut found = 0u64;
    for _ in stream.by_ref() {
        found += 1;
    }
    let sweep = if stream.complete() { "complete sweep" } else { "budget exhausted" };
    println!(
        "models at domain bound {}: {found} ({sweep}, {} candidates examined)",
        args.oracle_domain,
        stream.examined()
    );

    let engine_sat = kb_satisfiable(k);
    println!("engine: kb_satisfiable = {engine_sat}");
    let mut agree = true;
    if found > 0 && !engine_sat {
        println!("DISAGREEMENT: oracle found a model, engine says unsatisfiable");
        agree = false;
    }
    if found == 0 && stream.complete() && engine_sat {
        println!(
            "note: no model within bound {}; engine satisfiability may need a larger domain",
            args.oracle_domain
        );
    }

    if lk.kb.ontology.inclusions().is_empty() {
        match brute_weak_separable_empty_ontology(&k.database, lk.positives(), lk.negatives()) {
            Ok(separable) => {
                println!("brute-force weak separability (empty ontology): {separable}")
            }
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_INPUT;
            }
        }
    }
    if agree {
        EXIT_SEPARABLE
    } else {
        EXIT_INSEPARABLE
    }
}
