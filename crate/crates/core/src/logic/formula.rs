use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::Signature;

/// A term: bound or free variable, signature constant, or a parameter naming
/// an element of a particular structure (written `#name`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(usize),
    Param(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn param(name: impl Into<String>) -> Self {
        Term::Param(name.into())
    }
}

/// First-order formula over the core connectives. `A`, `->` and `<->` are
/// expanded by the parser, so every formula is built from these six nodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(usize, Vec<Term>),
    Equal(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn atom(rel: usize, terms: Vec<Term>) -> Self {
        Formula::Atom(rel, terms)
    }

    pub fn equal(a: Term, b: Term) -> Self {
        Formula::Equal(a, b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn exists(var: impl Into<String>, body: Formula) -> Self {
        Formula::Exists(var.into(), Box::new(body))
    }

    /// `∀x.φ` as `¬∃x.¬φ`.
    pub fn forall(var: impl Into<String>, body: Formula) -> Self {
        Formula::not(Formula::exists(var, Formula::not(body)))
    }

    /// `φ → ψ` as `¬φ ∨ ψ`.
    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::or(Formula::not(a), b)
    }

    /// Number of formula nodes; terms are not counted.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(..) | Formula::Equal(..) => 1,
            Formula::Not(f) | Formula::Exists(_, f) => 1 + f.size(),
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut term = |t: &Term, bound: &Vec<String>| {
            if let Term::Var(v) = t {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
        };
        match self {
            Formula::Atom(_, ts) => ts.iter().for_each(|t| term(t, bound)),
            Formula::Equal(a, b) => {
                term(a, bound);
                term(b, bound);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(v, f) => {
                bound.push(v.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Parameters in order of first occurrence (preorder, left to right).
    pub fn params(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        self.visit_terms(&mut |t| {
            if let Term::Param(p) = t {
                if !out.contains(p) {
                    out.push(p.clone());
                }
            }
        });
        out
    }

    pub fn has_params(&self) -> bool {
        let mut found = false;
        self.visit_terms(&mut |t| found |= matches!(t, Term::Param(_)));
        found
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Atom(..) | Formula::Equal(..) => true,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.is_quantifier_free() && b.is_quantifier_free()
            }
            Formula::Exists(..) => false,
        }
    }

    pub(crate) fn visit_terms(&self, f: &mut impl FnMut(&Term)) {
        match self {
            Formula::Atom(_, ts) => ts.iter().for_each(|t| f(t)),
            Formula::Equal(a, b) => {
                f(a);
                f(b);
            }
            Formula::Not(g) | Formula::Exists(_, g) => g.visit_terms(f),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.visit_terms(f);
                b.visit_terms(f);
            }
        }
    }

    /// Renames parameters through `map`; parameters missing from the map are kept.
    pub fn rename_params(&self, map: &HashMap<String, String>) -> Formula {
        let t = |t: &Term| match t {
            Term::Param(p) => Term::Param(map.get(p).cloned().unwrap_or_else(|| p.clone())),
            other => other.clone(),
        };
        match self {
            Formula::Atom(r, ts) => Formula::Atom(*r, ts.iter().map(t).collect()),
            Formula::Equal(a, b) => Formula::Equal(t(a), t(b)),
            Formula::Not(f) => Formula::not(f.rename_params(map)),
            Formula::And(a, b) => Formula::and(a.rename_params(map), b.rename_params(map)),
            Formula::Or(a, b) => Formula::or(a.rename_params(map), b.rename_params(map)),
            Formula::Exists(v, f) => Formula::exists(v.clone(), f.rename_params(map)),
        }
    }

    /// Replaces free occurrences of `var` by `term`. Variables are never
    /// captured because `term` is a constant or parameter in every caller.
    pub fn substitute_var(&self, var: &str, term: &Term) -> Formula {
        let t = |x: &Term| match x {
            Term::Var(v) if v == var => term.clone(),
            other => other.clone(),
        };
        match self {
            Formula::Atom(r, ts) => Formula::Atom(*r, ts.iter().map(t).collect()),
            Formula::Equal(a, b) => Formula::Equal(t(a), t(b)),
            Formula::Not(f) => Formula::not(f.substitute_var(var, term)),
            Formula::And(a, b) => {
                Formula::and(a.substitute_var(var, term), b.substitute_var(var, term))
            }
            Formula::Or(a, b) => Formula::or(a.substitute_var(var, term), b.substitute_var(var, term)),
            Formula::Exists(v, _) if v == var => self.clone(),
            Formula::Exists(v, f) => Formula::exists(v.clone(), f.substitute_var(var, term)),
        }
    }

    pub fn render(&self, sig: &Signature) -> String {
        self.display(sig).to_string()
    }

    pub fn display<'a>(&'a self, sig: &'a Signature) -> Rendered<'a> {
        Rendered { formula: self, sig }
    }
}

/// Canonical concrete syntax of a formula; `parse_formula` inverts it.
pub struct Rendered<'a> {
    formula: &'a Formula,
    sig: &'a Signature,
}

impl fmt::Display for Rendered<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self.formula, self.sig)
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, t: &Term, sig: &Signature) -> fmt::Result {
    match t {
        Term::Var(v) => f.write_str(v),
        Term::Const(c) => f.write_str(&sig.constants[*c]),
        Term::Param(p) => write!(f, "#{p}"),
    }
}

fn is_primary(phi: &Formula, sig: &Signature) -> bool {
    match phi {
        Formula::Atom(r, _) => !sig.is_infix(*r),
        Formula::Not(_) => true,
        _ => false,
    }
}

fn write_operand(
    f: &mut fmt::Formatter<'_>,
    phi: &Formula,
    sig: &Signature,
    bare: bool,
) -> fmt::Result {
    if bare {
        write_formula(f, phi, sig)
    } else {
        f.write_str("(")?;
        write_formula(f, phi, sig)?;
        f.write_str(")")
    }
}

fn write_formula(f: &mut fmt::Formatter<'_>, phi: &Formula, sig: &Signature) -> fmt::Result {
    match phi {
        Formula::Atom(r, ts) => {
            let name = &sig.relations[*r].name;
            if sig.is_infix(*r) {
                write_term(f, &ts[0], sig)?;
                write!(f, " {name} ")?;
                write_term(f, &ts[1], sig)
            } else {
                write!(f, "{name}(")?;
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write_term(f, t, sig)?;
                }
                f.write_str(")")
            }
        }
        Formula::Equal(a, b) => {
            write_term(f, a, sig)?;
            f.write_str(" = ")?;
            write_term(f, b, sig)
        }
        Formula::Not(g) => {
            f.write_str("!")?;
            write_operand(f, g, sig, is_primary(g, sig))
        }
        Formula::And(a, b) => {
            // & is left-associative and binds tighter than |.
            let left_bare = matches!(**a, Formula::And(..)) || is_operand_atomic(a, sig);
            write_operand(f, a, sig, left_bare)?;
            f.write_str(" & ")?;
            write_operand(f, b, sig, is_operand_atomic(b, sig))
        }
        Formula::Or(a, b) => {
            let left_bare = matches!(**a, Formula::Or(..) | Formula::And(..))
                || is_operand_atomic(a, sig);
            write_operand(f, a, sig, left_bare)?;
            f.write_str(" | ")?;
            let right_bare = matches!(**b, Formula::And(..)) || is_operand_atomic(b, sig);
            write_operand(f, b, sig, right_bare)
        }
        Formula::Exists(v, g) => {
            write!(f, "E {v}. ")?;
            write_formula(f, g, sig)
        }
    }
}

fn is_operand_atomic(phi: &Formula, sig: &Signature) -> bool {
    let _ = sig;
    matches!(phi, Formula::Atom(..) | Formula::Equal(..) | Formula::Not(_))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lt(a: &str, b: &str) -> Formula {
        Formula::atom(0, vec![Term::var(a), Term::var(b)])
    }

    #[test]
    fn size_counts_formula_nodes_only() {
        let f = Formula::exists("x", Formula::exists("y", lt("x", "y")));
        assert_eq!(f.size(), 3);
        assert_eq!(Formula::forall("x", lt("x", "x")).size(), 4);
    }

    #[test]
    fn free_vars_respect_binding() {
        let f = Formula::and(Formula::exists("x", lt("x", "y")), lt("x", "x"));
        let fv: Vec<_> = f.free_vars().into_iter().collect();
        assert_eq!(fv, vec!["x".to_string(), "y".to_string()]);
    }

    #[test]
    fn substitution_stops_at_rebinding() {
        let f = Formula::and(lt("x", "x"), Formula::exists("x", lt("x", "y")));
        let g = f.substitute_var("x", &Term::param("a"));
        let sig = Signature::relational(&[("<", 2)]);
        assert_eq!(g.render(&sig), "#a < #a & (E x. x < y)");
    }
}
