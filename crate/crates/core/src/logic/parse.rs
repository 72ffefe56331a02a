//! Recursive-descent parser for the concrete formula syntax.
//!
//! Precedence, loosest first: `<->`, `->` (both right-associative), `|`, `&`,
//! then prefix `!` and quantifiers `E x.` / `A x.`, whose bodies extend as far
//! right as possible.

use super::signature::{is_identifier, SYMBOL_CHARS};
use super::{Formula, LogicError, ParseErrorKind, Signature, Term};
use crate::modal::ModalFormula;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Param(String),
    Symbol(String),
    Eq,
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    Comma,
    Dot,
    Box,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, LogicError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '!' => Some(Tok::Not),
            '&' => Some(Tok::And),
            '|' => Some(Tok::Or),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            _ => None,
        };
        if c == '[' && chars.get(i + 1).is_some_and(|&(_, d)| d == ']') {
            out.push((pos, Tok::Box));
            i += 2;
            continue;
        }
        if let Some(t) = single {
            out.push((pos, t));
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().map(|(_, c)| c).collect();
            out.push((pos, Tok::Ident(word)));
            continue;
        }
        if c == '#' {
            i += 1;
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            if start == i {
                return Err(LogicError::syntax(pos, "expected a parameter name after `#`"));
            }
            let word: String = chars[start..i].iter().map(|(_, c)| c).collect();
            out.push((pos, Tok::Param(word)));
            continue;
        }
        if SYMBOL_CHARS.contains(c) || c == '=' || c == '-' {
            let start = i;
            while i < chars.len()
                && (SYMBOL_CHARS.contains(chars[i].1) || chars[i].1 == '=' || chars[i].1 == '-')
            {
                i += 1;
            }
            let run: String = chars[start..i].iter().map(|(_, c)| c).collect();
            let tok = match run.as_str() {
                "=" => Tok::Eq,
                "->" => Tok::Implies,
                "<->" => Tok::Iff,
                _ => Tok::Symbol(run),
            };
            out.push((pos, tok));
            continue;
        }
        return Err(LogicError::syntax(pos, format!("unexpected character `{c}`")));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    sig: &'a Signature,
    /// Set while parsing the modal layer, where a modal operator reached by
    /// the first-order grammar must sit under a quantifier.
    modal: bool,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.at + k).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), LogicError> {
        let pos = self.pos();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => Err(LogicError::syntax(pos, format!("expected {what}"))),
        }
    }

    fn iff(&mut self) -> Result<Formula, LogicError> {
        let lhs = self.implication()?;
        if self.peek() == Some(&Tok::Iff) {
            self.bump();
            let rhs = self.iff()?;
            return Ok(Formula::and(
                Formula::implies(lhs.clone(), rhs.clone()),
                Formula::implies(rhs, lhs),
            ));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, LogicError> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Implies) {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, LogicError> {
        let mut lhs = self.conjunction()?;
        while self.peek() == Some(&Tok::Or) {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, LogicError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn quantifier_ahead(&self) -> Option<bool> {
        match (self.peek(), self.peek_at(1), self.peek_at(2)) {
            (Some(Tok::Ident(q)), Some(Tok::Ident(_)), Some(Tok::Dot)) if q == "E" || q == "A" => {
                Some(q == "E")
            }
            _ => None,
        }
    }

    fn modal_ahead(&self) -> bool {
        matches!(self.peek(), Some(Tok::Box)) || matches!(self.peek(), Some(Tok::Symbol(s)) if s == "<>")
    }

    fn unary(&mut self) -> Result<Formula, LogicError> {
        if self.modal_ahead() {
            return Err(LogicError::Parse {
                position: self.pos(),
                kind: if self.modal {
                    ParseErrorKind::ModalityUnderQuantifier
                } else {
                    ParseErrorKind::ModalOperator
                },
            });
        }
        if self.peek() == Some(&Tok::Not) {
            self.bump();
            return Ok(Formula::not(self.unary()?));
        }
        if let Some(existential) = self.quantifier_ahead() {
            self.bump();
            let var = match self.bump() {
                Some(Tok::Ident(v)) => v,
                _ => unreachable!("checked by quantifier_ahead"),
            };
            if self.sig.constant_index(&var).is_some() || self.sig.relation_index(&var).is_some() {
                return Err(LogicError::syntax(
                    self.toks[self.at - 1].0,
                    format!("`{var}` is a declared symbol and cannot be bound"),
                ));
            }
            self.bump();
            let body = self.iff()?;
            return Ok(if existential {
                Formula::exists(var, body)
            } else {
                Formula::forall(var, body)
            });
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula, LogicError> {
        if self.peek() == Some(&Tok::LParen) {
            self.bump();
            let f = self.iff()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(f);
        }
        // Prefix relation application.
        if let (Some(Tok::Ident(name)), Some(Tok::LParen)) = (self.peek(), self.peek_at(1)) {
            if let Some(rel) = self.sig.relation_index(name) {
                let pos = self.pos();
                self.bump();
                self.bump();
                let mut terms = vec![self.term()?];
                while self.peek() == Some(&Tok::Comma) {
                    self.bump();
                    terms.push(self.term()?);
                }
                self.expect(Tok::RParen, "`)` closing the argument list")?;
                let expected = self.sig.relations[rel].arity;
                if terms.len() != expected {
                    return Err(LogicError::Parse {
                        position: pos,
                        kind: ParseErrorKind::ArityMismatch {
                            relation: self.sig.relations[rel].name.clone(),
                            expected,
                            found: terms.len(),
                        },
                    });
                }
                return Ok(Formula::atom(rel, terms));
            }
            let pos = self.pos();
            return Err(LogicError::Parse {
                position: pos,
                kind: ParseErrorKind::UndeclaredSymbol(name.clone()),
            });
        }
        let lhs = self.term()?;
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Eq) => Ok(Formula::equal(lhs, self.term()?)),
            Some(Tok::Symbol(s)) => {
                let rel = self.sig.relation_index(&s).ok_or_else(|| LogicError::Parse {
                    position: pos,
                    kind: ParseErrorKind::UndeclaredSymbol(s.clone()),
                })?;
                if self.sig.relations[rel].arity != 2 {
                    return Err(LogicError::Parse {
                        position: pos,
                        kind: ParseErrorKind::ArityMismatch {
                            relation: s,
                            expected: self.sig.relations[rel].arity,
                            found: 2,
                        },
                    });
                }
                let rhs = self.term()?;
                Ok(Formula::atom(rel, vec![lhs, rhs]))
            }
            Some(Tok::Ident(s)) if self.sig.relation_index(&s).is_some() => {
                // Identifier-named binary relation used infix: `x R y`.
                let rel = self.sig.relation_index(&s).unwrap();
                if self.sig.relations[rel].arity != 2 {
                    return Err(LogicError::Parse {
                        position: pos,
                        kind: ParseErrorKind::ArityMismatch {
                            relation: s,
                            expected: self.sig.relations[rel].arity,
                            found: 2,
                        },
                    });
                }
                let rhs = self.term()?;
                Ok(Formula::atom(rel, vec![lhs, rhs]))
            }
            _ => Err(LogicError::syntax(pos, "expected `=` or a relation symbol")),
        }
    }

    fn term(&mut self) -> Result<Term, LogicError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Param(p)) => Ok(Term::Param(p)),
            Some(Tok::Ident(name)) => {
                if let Some(c) = self.sig.constant_index(&name) {
                    Ok(Term::Const(c))
                } else if self.sig.relation_index(&name).is_some() {
                    Err(LogicError::syntax(
                        pos,
                        format!("relation `{name}` used as a term"),
                    ))
                } else if is_identifier(&name) {
                    Ok(Term::Var(name))
                } else {
                    Err(LogicError::syntax(pos, "expected a term"))
                }
            }
            _ => Err(LogicError::syntax(pos, "expected a term")),
        }
    }
}

/// Parses the concrete syntax into an abbreviation-free formula.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, LogicError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: text.len(),
        sig,
        modal: false,
    };
    if p.peek().is_none() {
        return Err(LogicError::syntax(0, "empty formula"));
    }
    let f = p.iff()?;
    if p.peek().is_some() {
        return Err(LogicError::syntax(p.pos(), "unexpected trailing input"));
    }
    Ok(f)
}

/// Modal layer: `[]` and `<>` prefixes combined with the connectives of the
/// first-order grammar and the same precedence. Quantifier bodies are parsed
/// as first-order formulas, so a modal operator there is rejected.
impl Parser<'_> {
    fn m_iff(&mut self) -> Result<ModalFormula, LogicError> {
        let lhs = self.m_implication()?;
        if self.peek() == Some(&Tok::Iff) {
            self.bump();
            let rhs = self.m_iff()?;
            return Ok(ModalFormula::and(
                ModalFormula::implies(lhs.clone(), rhs.clone()),
                ModalFormula::implies(rhs, lhs),
            ));
        }
        Ok(lhs)
    }

    fn m_implication(&mut self) -> Result<ModalFormula, LogicError> {
        let lhs = self.m_disjunction()?;
        if self.peek() == Some(&Tok::Implies) {
            self.bump();
            let rhs = self.m_implication()?;
            return Ok(ModalFormula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn m_disjunction(&mut self) -> Result<ModalFormula, LogicError> {
        let mut lhs = self.m_conjunction()?;
        while self.peek() == Some(&Tok::Or) {
            self.bump();
            lhs = ModalFormula::or(lhs, self.m_conjunction()?);
        }
        Ok(lhs)
    }

    fn m_conjunction(&mut self) -> Result<ModalFormula, LogicError> {
        let mut lhs = self.m_unary()?;
        while self.peek() == Some(&Tok::And) {
            self.bump();
            lhs = ModalFormula::and(lhs, self.m_unary()?);
        }
        Ok(lhs)
    }

    fn m_unary(&mut self) -> Result<ModalFormula, LogicError> {
        if self.modal_ahead() {
            let boxed = self.bump() == Some(Tok::Box);
            let inner = self.m_unary()?;
            return Ok(if boxed {
                ModalFormula::Box(Box::new(inner))
            } else {
                ModalFormula::Diamond(Box::new(inner))
            });
        }
        match self.peek() {
            Some(Tok::Not) => {
                self.bump();
                Ok(ModalFormula::not(self.m_unary()?))
            }
            Some(Tok::LParen) => {
                self.bump();
                let f = self.m_iff()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            _ if self.quantifier_ahead().is_some() => Ok(ModalFormula::Core(self.unary()?)),
            _ => Ok(ModalFormula::Core(self.primary()?)),
        }
    }
}

pub(crate) fn parse_modal(text: &str, sig: &Signature) -> Result<ModalFormula, LogicError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        end: text.len(),
        sig,
        modal: true,
    };
    if p.peek().is_none() {
        return Err(LogicError::syntax(0, "empty formula"));
    }
    let f = p.m_iff()?;
    if p.peek().is_some() {
        return Err(LogicError::syntax(p.pos(), "unexpected trailing input"));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lt_sig() -> Signature {
        Signature::relational(&[("<", 2), ("R", 2), ("P", 1)])
    }

    #[test]
    fn nested_existentials() {
        let sig = lt_sig();
        let f = parse_formula("E x. E y. x < y", &sig).unwrap();
        let want = Formula::exists(
            "x",
            Formula::exists("y", Formula::atom(0, vec![Term::var("x"), Term::var("y")])),
        );
        assert_eq!(f, want);
    }

    #[test]
    fn universal_is_expanded() {
        let sig = lt_sig();
        let f = parse_formula("A x. R(x,x)", &sig).unwrap();
        let want = Formula::not(Formula::exists(
            "x",
            Formula::not(Formula::atom(1, vec![Term::var("x"), Term::var("x")])),
        ));
        assert_eq!(f, want);
    }

    #[test]
    fn implication_and_iff_are_expanded() {
        let sig = lt_sig();
        let f = parse_formula("P(x) -> P(y)", &sig).unwrap();
        assert_eq!(f.render(&sig), "!P(x) | P(y)");
        let g = parse_formula("P(x) <-> P(y)", &sig).unwrap();
        assert_eq!(g.render(&sig), "(!P(x) | P(y)) & (!P(y) | P(x))");
    }

    #[test]
    fn canonical_text_round_trips() {
        let sig = lt_sig();
        for text in [
            "!(E x. x = #a)",
            "E x. E y. x < y",
            "!P(#a) & (E x. x < #b)",
            "P(x) | P(y) & P(z)",
            "(P(x) | P(y)) & P(z)",
            "P(x) & (P(y) & P(z))",
            "!!(x < y)",
            "E x. !(E y. !(x < y | x = y))",
        ] {
            let f = parse_formula(text, &sig).unwrap();
            assert_eq!(f.render(&sig), text);
        }
    }

    #[test]
    fn precedence() {
        let sig = lt_sig();
        let f = parse_formula("P(x) | P(y) & P(z)", &sig).unwrap();
        assert!(matches!(f, Formula::Or(..)));
        let g = parse_formula("!P(x) & P(y)", &sig).unwrap();
        assert!(matches!(g, Formula::And(..)));
        let h = parse_formula("E x. P(x) & P(y)", &sig).unwrap();
        assert!(matches!(h, Formula::Exists(..)));
    }

    #[test]
    fn errors_carry_positions() {
        let sig = lt_sig();
        match parse_formula("E x. Q(x)", &sig) {
            Err(LogicError::Parse {
                kind: ParseErrorKind::UndeclaredSymbol(s),
                position,
            }) => {
                assert_eq!(s, "Q");
                assert_eq!(position, 5);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_formula("P(x, y)", &sig),
            Err(LogicError::Parse {
                kind: ParseErrorKind::ArityMismatch { .. },
                ..
            })
        ));
        assert!(matches!(
            parse_formula("x ~ y", &sig),
            Err(LogicError::Parse {
                kind: ParseErrorKind::UndeclaredSymbol(_),
                ..
            })
        ));
        match parse_formula("(P(x)", &sig) {
            Err(LogicError::Parse { position, .. }) => assert_eq!(position, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_formula("", &sig).is_err());
        assert!(parse_formula("P(x) P(y)", &sig).is_err());
    }

    #[test]
    fn relation_named_e_is_not_a_quantifier() {
        let sig = Signature::relational(&[("E", 2)]);
        let f = parse_formula("E x. E(x, x)", &sig).unwrap();
        assert_eq!(f.render(&sig), "E x. E(x,x)");
    }

    #[test]
    fn constants_resolve() {
        let sig = Signature::new(
            vec![super::super::RelationDecl {
                name: "<".into(),
                arity: 2,
            }],
            vec!["c".into()],
        )
        .unwrap();
        let f = parse_formula("E x. c < x", &sig).unwrap();
        assert_eq!(
            f,
            Formula::exists("x", Formula::atom(0, vec![Term::Const(0), Term::var("x")]))
        );
    }
}
