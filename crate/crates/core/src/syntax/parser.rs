//! Recursive-descent parser for knowledge bases, concepts, and queries.
//!
//! Identifier kinds (concept name, role, constant, variable) are determined
//! by syntactic position, not spelling; using one identifier in two kinds
//! within a single parse is a positioned error.

use crate::model::concept::{Concept, Role};
use crate::model::kb::{ConceptInclusion, Database, LabeledKB, Ontology, KB};
use crate::model::query::{QAtom, CQ, UCQ};
use crate::symbols::{ConceptName, Const, RoleName, Var};
use crate::syntax::lexer::{lex, ParseError, Tok, Token};
use std::collections::HashMap;

#[derive(Clone, Copy, PartialEq, Eq)]
enum IdKind {
    ConceptK,
    RoleK,
    ConstK,
    VarK,
}

impl IdKind {
    fn describe(self) -> &'static str {
        match self {
            IdKind::ConceptK => "concept name",
            IdKind::RoleK => "role",
            IdKind::ConstK => "constant",
            IdKind::VarK => "variable",
        }
    }
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    kinds: HashMap<String, IdKind>,
}

fn err_at(tok: &Token, message: impl Into<String>, expected: Option<String>) -> ParseError {
    ParseError {
        line: tok.line,
        column: tok.column,
        message: message.into(),
        expected,
    }
}

impl<'a> Parser<'a> {
    fn new(toks: &'a [Token]) -> Parser<'a> {
        Parser {
            toks,
            pos: 0,
            kinds: HashMap::new(),
        }
    }

    fn peek(&self) -> &'a Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> &'a Token {
        let t = &self.toks[self.pos];
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, kind: Tok) -> Result<&'a Token, ParseError> {
        if self.peek().kind == kind {
            Ok(self.next())
        } else {
            let t = self.peek();
            Err(err_at(
                t,
                format!("found {}", t.kind.describe()),
                Some(kind.describe()),
            ))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, &'a Token), ParseError> {
        let t = self.peek();
        match &t.kind {
            Tok::Ident(s) => {
                self.next();
                Ok((s.clone(), t))
            }
            _ => Err(err_at(
                t,
                format!("found {}", t.kind.describe()),
                Some(what.into()),
            )),
        }
    }

    /// Record the kind an identifier is used in; one identifier may not play
    /// two kinds within a single parse.
    fn register(&mut self, name: &str, kind: IdKind, tok: &Token) -> Result<(), ParseError> {
        match self.kinds.get(name) {
            None => {
                self.kinds.insert(name.to_owned(), kind);
                Ok(())
            }
            Some(&old) if old == kind => Ok(()),
            Some(&old) => Err(err_at(
                tok,
                format!(
                    "`{name}` is used as a {} here but as a {} elsewhere",
                    kind.describe(),
                    old.describe()
                ),
                None,
            )),
        }
    }

    // ---- concepts ----

    fn concept(&mut self) -> Result<Concept, ParseError> {
        self.or_level()
    }

    fn or_level(&mut self) -> Result<Concept, ParseError> {
        let mut c = self.and_level()?;
        while self.peek().kind == Tok::KwOr {
            self.next();
            c = Concept::or(c, self.and_level()?);
        }
        Ok(c)
    }

    fn and_level(&mut self) -> Result<Concept, ParseError> {
        let mut c = self.unary_level()?;
        while self.peek().kind == Tok::KwAnd {
            self.next();
            c = Concept::and(c, self.unary_level()?);
        }
        Ok(c)
    }

    fn unary_level(&mut self) -> Result<Concept, ParseError> {
        match self.peek().kind {
            Tok::KwNot => {
                self.next();
                Ok(Concept::not(self.unary_level()?))
            }
            Tok::KwExists => {
                self.next();
                let role = self.role()?;
                self.expect(Tok::Dot)?;
                Ok(Concept::exists(role, self.unary_level()?))
            }
            Tok::KwForall => {
                self.next();
                let role = self.role()?;
                self.expect(Tok::Dot)?;
                Ok(Concept::forall(role, self.unary_level()?))
            }
            _ => self.atom_level(),
        }
    }

    fn atom_level(&mut self) -> Result<Concept, ParseError> {
        let t = self.peek();
        match &t.kind {
            Tok::KwTop => {
                self.next();
                Ok(Concept::top())
            }
            Tok::KwBot => {
                self.next();
                Ok(Concept::bot())
            }
            Tok::Ident(name) => {
                let name = name.clone();
                self.next();
                self.register(&name, IdKind::ConceptK, t)?;
                Ok(Concept::atomic(ConceptName::new(&name)))
            }
            Tok::LParen => {
                self.next();
                let c = self.or_level()?;
                self.expect(Tok::RParen)?;
                Ok(c)
            }
            _ => Err(err_at(
                t,
                format!("found {}", t.kind.describe()),
                Some("a concept".into()),
            )),
        }
    }

    fn role(&mut self) -> Result<Role, ParseError> {
        if self.peek().kind == Tok::KwInv {
            self.next();
            self.expect(Tok::LParen)?;
            let (name, tok) = self.ident("a role name")?;
            self.register(&name, IdKind::RoleK, tok)?;
            self.expect(Tok::RParen)?;
            Ok(Role::inverse_of(RoleName::new(&name)))
        } else {
            let (name, tok) = self.ident("a role")?;
            self.register(&name, IdKind::RoleK, tok)?;
            Ok(Role::new(RoleName::new(&name)))
        }
    }

    // ---- labeled knowledge bases ----

    fn labeled_kb(&mut self) -> Result<LabeledKB, ParseError> {
        let mut inclusions: Option<Vec<ConceptInclusion>> = None;
        let mut atoms: Option<(Vec<(ConceptName, Const)>, Vec<(RoleName, Const, Const)>)> = None;
        let mut positives: Option<Vec<(String, Token)>> = None;
        let mut negatives: Option<Vec<(String, Token)>> = None;

        while self.peek().kind != Tok::Eof {
            let t = self.peek();
            match t.kind {
                Tok::KwOntology => {
                    if inclusions.is_some() {
                        return Err(err_at(t, "duplicate `ontology` section", None));
                    }
                    self.next();
                    inclusions = Some(self.ontology_body()?);
                }
                Tok::KwDatabase => {
                    if atoms.is_some() {
                        return Err(err_at(t, "duplicate `database` section", None));
                    }
                    self.next();
                    atoms = Some(self.database_body()?);
                }
                Tok::KwPositive => {
                    if positives.is_some() {
                        return Err(err_at(t, "duplicate `positive` section", None));
                    }
                    self.next();
                    positives = Some(self.example_body("positive")?);
                }
                Tok::KwNegative => {
                    if negatives.is_some() {
                        return Err(err_at(t, "duplicate `negative` section", None));
                    }
                    self.next();
                    negatives = Some(self.example_body("negative")?);
                }
                _ => {
                    return Err(err_at(
                        t,
                        format!("found {}", t.kind.describe()),
                        Some("a section: `ontology`, `database`, `positive`, or `negative`".into()),
                    ))
                }
            }
        }

        let eof = self.peek();
        let (unary, binary) = atoms.unwrap_or_default();
        let database = Database::new(unary, binary);
        let positives =
            positives.ok_or_else(|| err_at(eof, "positive examples must be non-empty", None))?;
        let negatives =
            negatives.ok_or_else(|| err_at(eof, "negative examples must be non-empty", None))?;
        for (name, tok) in positives.iter().chain(negatives.iter()) {
            if !database.contains_constant(Const::new(name)) {
                return Err(err_at(
                    tok,
                    format!("example constant `{name}` does not occur in the database"),
                    None,
                ));
            }
        }
        let ontology = Ontology::new(inclusions.unwrap_or_default());
        let kb = KB::new(ontology, database);
        let pos: Vec<Const> = positives.iter().map(|(n, _)| Const::new(n)).collect();
        let neg: Vec<Const> = negatives.iter().map(|(n, _)| Const::new(n)).collect();
        LabeledKB::new(kb, pos, neg).map_err(|e| err_at(eof, e.to_string(), None))
    }

    fn ontology_body(&mut self) -> Result<Vec<ConceptInclusion>, ParseError> {
        self.expect(Tok::LBrace)?;
        let mut cis = Vec::new();
        while self.peek().kind != Tok::RBrace {
            if self.peek().kind == Tok::Eof {
                return Err(self.expect(Tok::RBrace).unwrap_err());
            }
            let lhs = self.concept()?;
            self.expect(Tok::Leq)?;
            let rhs = self.concept()?;
            cis.push(ConceptInclusion { lhs, rhs });
        }
        self.next();
        Ok(cis)
    }

    #[allow(clippy::type_complexity)]
    fn database_body(
        &mut self,
    ) -> Result<(Vec<(ConceptName, Const)>, Vec<(RoleName, Const, Const)>), ParseError> {
        self.expect(Tok::LBrace)?;
        let mut unary = Vec::new();
        let mut binary = Vec::new();
        while self.peek().kind != Tok::RBrace {
            if self.peek().kind == Tok::Eof {
                return Err(self.expect(Tok::RBrace).unwrap_err());
            }
            let (name, head) = self.ident("an atom")?;
            self.expect(Tok::LParen)?;
            let (c1, t1) = self.ident("a constant")?;
            self.register(&c1, IdKind::ConstK, t1)?;
            if self.peek().kind == Tok::Comma {
                self.next();
                let (c2, t2) = self.ident("a constant")?;
                self.register(&c2, IdKind::ConstK, t2)?;
                self.expect(Tok::RParen)?;
                self.register(&name, IdKind::RoleK, head)?;
                binary.push((RoleName::new(&name), Const::new(&c1), Const::new(&c2)));
            } else {
                self.expect(Tok::RParen)?;
                self.register(&name, IdKind::ConceptK, head)?;
                unary.push((ConceptName::new(&name), Const::new(&c1)));
            }
        }
        self.next();
        Ok((unary, binary))
    }

    fn example_body(&mut self, which: &str) -> Result<Vec<(String, Token)>, ParseError> {
        self.expect(Tok::LBrace)?;
        if self.peek().kind == Tok::RBrace {
            let t = self.peek();
            return Err(err_at(t, format!("{which} examples must be non-empty"), None));
        }
        let mut out = Vec::new();
        loop {
            let (name, tok) = self.ident("a constant")?;
            self.register(&name, IdKind::ConstK, tok)?;
            out.push((name, tok.clone()));
            if self.peek().kind == Tok::Comma {
                self.next();
            } else {
                break;
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(out)
    }

    // ---- queries ----

    fn ucq(&mut self) -> Result<UCQ, ParseError> {
        let mut heads = Vec::new();
        let mut disjuncts = vec![self.cq(&mut heads)?];
        while self.peek().kind == Tok::Pipe {
            self.next();
            disjuncts.push(self.cq(&mut heads)?);
        }
        Ok(UCQ::new(disjuncts))
    }

    fn cq(&mut self, heads: &mut Vec<Var>) -> Result<CQ, ParseError> {
        let (head, head_tok) = self.ident("`q`")?;
        if head != "q" {
            return Err(err_at(head_tok, format!("found identifier `{head}`"), Some("`q`".into())));
        }
        self.expect(Tok::LParen)?;
        let answer = self.var()?;
        self.expect(Tok::RParen)?;
        if let Some(&first) = heads.first() {
            if first != answer {
                return Err(err_at(
                    head_tok,
                    "disjuncts must share the answer variable",
                    None,
                ));
            }
        }
        heads.push(answer);
        self.expect(Tok::Turnstile)?;
        let mut atoms = vec![self.qatom()?];
        while self.peek().kind == Tok::Comma {
            self.next();
            atoms.push(self.qatom()?);
        }
        Ok(CQ::new(answer, atoms))
    }

    fn var(&mut self) -> Result<Var, ParseError> {
        let (name, tok) = self.ident("a variable")?;
        self.register(&name, IdKind::VarK, tok)?;
        Ok(Var::new(&name))
    }

    fn qatom(&mut self) -> Result<QAtom, ParseError> {
        let (name, head) = self.ident("an atom")?;
        match self.peek().kind {
            Tok::LParen => {
                self.next();
                let v1 = self.var()?;
                if self.peek().kind == Tok::Comma {
                    self.next();
                    let v2 = self.var()?;
                    self.expect(Tok::RParen)?;
                    self.register(&name, IdKind::RoleK, head)?;
                    Ok(QAtom::Binary(RoleName::new(&name), v1, v2))
                } else {
                    self.expect(Tok::RParen)?;
                    self.register(&name, IdKind::ConceptK, head)?;
                    Ok(QAtom::Unary(ConceptName::new(&name), v1))
                }
            }
            Tok::Eq => {
                self.register(&name, IdKind::VarK, head)?;
                self.next();
                let rhs = self.var()?;
                Ok(QAtom::Eq(Var::new(&name), rhs))
            }
            _ => {
                let t = self.peek();
                Err(err_at(
                    t,
                    format!("found {}", t.kind.describe()),
                    Some("`(` or `=`".into()),
                ))
            }
        }
    }

    fn finish<T>(&mut self, value: T) -> Result<T, ParseError> {
        self.expect(Tok::Eof)?;
        Ok(value)
    }
}

/// Parse a full labeled knowledge base file.
pub fn parse_labeled_kb(text: &str) -> Result<LabeledKB, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser::new(&toks);
    p.labeled_kb()
}

/// Parse a single concept expression.
pub fn parse_concept(text: &str) -> Result<Concept, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser::new(&toks);
    let c = p.concept()?;
    p.finish(c)
}

/// Parse a union of conjunctive queries, `q(x) :- ... | q(x) :- ...`.
pub fn parse_ucq(text: &str) -> Result<UCQ, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser::new(&toks);
    let q = p.ucq()?;
    p.finish(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::concept::Concept as C;

    fn cn(s: &str) -> Concept {
        C::atomic(ConceptName::new(s))
    }

    fn role(s: &str) -> Role {
        Role::new(RoleName::new(s))
    }

    const CITIZENSHIP: &str = "
        ontology { exists citizen_of. top <= Person }
        database {
            born_in(a, c)  citizen_of(a, c)
            born_in(b, c1) citizen_of(b, c2)
            Person(a)
        }
        positive { a }
        negative { b }
    ";

    #[test]
    fn parses_the_citizenship_kb() {
        let lkb = parse_labeled_kb(CITIZENSHIP).unwrap();
        assert_eq!(lkb.positives(), &[Const::new("a")]);
        assert_eq!(lkb.negatives(), &[Const::new("b")]);
        assert_eq!(lkb.kb.database.atom_count(), 5);
        assert_eq!(lkb.kb.database.constants().len(), 5);
        let cis = lkb.kb.ontology.inclusions();
        assert_eq!(cis.len(), 1);
        assert_eq!(
            cis[0],
            ConceptInclusion {
                lhs: C::exists(role("citizen_of"), C::top()),
                rhs: cn("Person"),
            }
        );
    }

    #[test]
    fn empty_positive_section_is_rejected() {
        let err = parse_labeled_kb("database { A(a) } positive { } negative { a }").unwrap_err();
        assert_eq!(err.message, "positive examples must be non-empty");
    }

    #[test]
    fn missing_negative_section_is_rejected() {
        let err = parse_labeled_kb("database { A(a) } positive { a }").unwrap_err();
        assert_eq!(err.message, "negative examples must be non-empty");
    }

    #[test]
    fn example_constants_must_occur_in_the_database() {
        let err =
            parse_labeled_kb("database { A(a) }\npositive { a }\nnegative { d }").unwrap_err();
        assert_eq!(err.message, "example constant `d` does not occur in the database");
        assert_eq!((err.line, err.column), (3, 12));
    }

    #[test]
    fn one_identifier_cannot_play_two_kinds() {
        let err = parse_labeled_kb(
            "database { R(a) R(a,b) } positive { a } negative { b }",
        )
        .unwrap_err();
        assert!(err.message.contains("`R` is used as a role here but as a concept name"));

        let err2 = parse_labeled_kb(
            "database { r(a,b) } positive { a } negative { r }",
        )
        .unwrap_err();
        assert!(err2.message.contains("`r` is used as a constant here but as a role"));
    }

    #[test]
    fn self_loop_kb_with_uppercase_role_parses() {
        let lkb = parse_labeled_kb(
            "ontology { top <= exists R. top and exists inv(R). top }
             database { R(a,a) R(b,c) }
             positive { a } negative { b }",
        )
        .unwrap();
        assert_eq!(lkb.kb.database.atom_count(), 2);
        let ci = lkb.kb.ontology.inclusions()[0];
        assert!(ci.lhs.is_top());
        assert_eq!(
            ci.rhs,
            C::and(
                C::exists(role("R"), C::top()),
                C::exists(Role::inverse_of(RoleName::new("R")), C::top()),
            )
        );
    }

    #[test]
    fn operator_precedence() {
        assert_eq!(
            parse_concept("not A and B or C").unwrap(),
            C::or(C::and(C::not(cn("A")), cn("B")), cn("C"))
        );
        assert_eq!(
            parse_concept("exists r. A and B").unwrap(),
            C::and(C::exists(role("r"), cn("A")), cn("B"))
        );
        assert_eq!(
            parse_concept("exists r. (A and B)").unwrap(),
            C::exists(role("r"), C::and(cn("A"), cn("B")))
        );
        assert_eq!(
            parse_concept("A or B or C").unwrap(),
            C::or(C::or(cn("A"), cn("B")), cn("C"))
        );
        assert_eq!(
            parse_concept("not exists r. A").unwrap(),
            C::not(C::exists(role("r"), cn("A")))
        );
        assert_eq!(
            parse_concept("forall inv(r). not A").unwrap(),
            C::forall(Role::inverse_of(RoleName::new("r")), C::not(cn("A")))
        );
    }

    #[test]
    fn ucq_parses_disjuncts_equalities_and_roles() {
        let q = parse_ucq("q(x) :- R(x,x) | q(x) :- r2(x, y), A(y), x = z").unwrap();
        assert_eq!(q.disjuncts.len(), 2);
        assert_eq!(q.answer(), Var::new("x"));
        assert_eq!(
            q.disjuncts[0].atoms.iter().collect::<Vec<_>>(),
            vec![&QAtom::Binary(RoleName::new("R"), Var::new("x"), Var::new("x"))]
        );
        assert!(q.disjuncts[1].atoms.contains(&QAtom::Eq(Var::new("x"), Var::new("z"))));
    }

    #[test]
    fn ucq_disjuncts_must_share_the_answer_variable() {
        let err = parse_ucq("q(x) :- A(x) | q(y) :- A(y)").unwrap_err();
        assert!(err.message.contains("share the answer variable"));
    }

    #[test]
    fn garbage_inputs_error_instead_of_crashing() {
        for text in ["", "ontology", "ontology {", "q(", "database { A(a,) }", "<="] {
            assert!(parse_labeled_kb(text).is_err());
            assert!(parse_ucq(text).is_err());
        }
    }
}
