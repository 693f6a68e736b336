//! Text renderers for concepts and queries.
//!
//! Rendered text re-parses to a structurally equal value. Abbreviations
//! (`top`, `bot`, `or`, `forall`) are recognized on the raw concept tree, so
//! values built through the sugar constructors print in sugared form.

use crate::model::concept::{Concept, ConceptKind, Role};
use crate::model::query::{QAtom, CQ, UCQ};
use crate::separability::SeparabilityReport;

pub fn render_role(r: Role) -> String {
    if r.inverted {
        format!("inv({})", r.name)
    } else {
        r.name.text()
    }
}

enum Shape {
    Top,
    Bot,
    Or(Concept, Concept),
    Forall(Role, Concept),
    Raw(ConceptKind),
}

fn shape(c: Concept) -> Shape {
    if c.is_bot() {
        return Shape::Bot;
    }
    if c.is_top() {
        return Shape::Top;
    }
    if let ConceptKind::Not(x) = c.kind() {
        match x.kind() {
            ConceptKind::And(l, r) => {
                if let (ConceptKind::Not(l2), ConceptKind::Not(r2)) = (l.kind(), r.kind()) {
                    return Shape::Or(l2, r2);
                }
            }
            ConceptKind::Exists(role, b) => {
                if let ConceptKind::Not(inner) = b.kind() {
                    return Shape::Forall(role, inner);
                }
            }
            _ => {}
        }
    }
    Shape::Raw(c.kind())
}

// Binding strength: or = 1, and = 2, prefix operators = 3, atoms = 4.
fn prec(c: Concept) -> u8 {
    match shape(c) {
        Shape::Top | Shape::Bot => 4,
        Shape::Or(..) => 1,
        Shape::Forall(..) => 3,
        Shape::Raw(ConceptKind::Atomic(_)) => 4,
        Shape::Raw(ConceptKind::Not(_) | ConceptKind::Exists(..)) => 3,
        Shape::Raw(ConceptKind::And(..)) => 2,
    }
}

fn fmt(c: Concept, min: u8, out: &mut String) {
    if prec(c) < min {
        out.push('(');
        fmt(c, 1, out);
        out.push(')');
        return;
    }
    match shape(c) {
        Shape::Top => out.push_str("top"),
        Shape::Bot => out.push_str("bot"),
        // Binary operators associate to the left, like the parser.
        Shape::Or(l, r) => {
            fmt(l, 1, out);
            out.push_str(" or ");
            fmt(r, 2, out);
        }
        Shape::Forall(role, b) => {
            out.push_str("forall ");
            out.push_str(&render_role(role));
            out.push_str(". ");
            fmt(b, 3, out);
        }
        Shape::Raw(ConceptKind::Atomic(a)) => out.push_str(&a.text()),
        Shape::Raw(ConceptKind::Not(x)) => {
            out.push_str("not ");
            fmt(x, 3, out);
        }
        Shape::Raw(ConceptKind::And(l, r)) => {
            fmt(l, 2, out);
            out.push_str(" and ");
            fmt(r, 3, out);
        }
        Shape::Raw(ConceptKind::Exists(role, b)) => {
            out.push_str("exists ");
            out.push_str(&render_role(role));
            out.push_str(". ");
            fmt(b, 3, out);
        }
    }
}

pub fn render_concept(c: Concept) -> String {
    let mut s = String::new();
    fmt(c, 1, &mut s);
    s
}

fn render_cq(q: &CQ) -> String {
    let atoms: Vec<String> = q
        .atoms
        .iter()
        .map(|a| match *a {
            QAtom::Unary(c, v) => format!("{c}({v})"),
            QAtom::Binary(r, v, w) => format!("{r}({v},{w})"),
            QAtom::Eq(v, w) => format!("{v} = {w}"),
        })
        .collect();
    format!("q({}) :- {}", q.answer, atoms.join(", "))
}

pub fn render_ucq(q: &UCQ) -> String {
    q.disjuncts.iter().map(render_cq).collect::<Vec<_>>().join(" | ")
}

/// JSON rendering of a separability report. Everything but the timing field
/// is a pure function of the input, so reruns agree byte for byte on it.
pub fn render_report(r: &SeparabilityReport) -> String {
    serde_json::to_string_pretty(r).expect("reports have no non-serializable state")
}
