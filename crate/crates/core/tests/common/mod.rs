//! Generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use proptest::prelude::*;
use robinson_core::fixtures;
use robinson_core::logic::{Formula, QuantifierClass, Signature, Structure, Term};
use robinson_core::structure::ExtensionSystem;

/// Formula skeleton with terms as small indices; [`Shape::build`] resolves
/// them against the variables in scope and the available parameters.
#[derive(Debug, Clone)]
pub enum Shape {
    Atom(usize, Vec<u8>),
    Eq(u8, u8),
    Not(Box<Shape>),
    And(Box<Shape>, Box<Shape>),
    Or(Box<Shape>, Box<Shape>),
    Exists(Box<Shape>),
    Forall(Box<Shape>),
}

pub fn shape(sig: &Signature, depth: u32) -> impl Strategy<Value = Shape> {
    let arities: Vec<usize> = sig.relations.iter().map(|r| r.arity).collect();
    let n = arities.len();
    let atom = (0..n).prop_flat_map(move |r| {
        let a = arities[r];
        prop::collection::vec(any::<u8>(), a).prop_map(move |ts| Shape::Atom(r, ts))
    });
    let leaf = prop_oneof![3 => atom, 1 => (any::<u8>(), any::<u8>()).prop_map(|(a, b)| Shape::Eq(a, b))];
    leaf.prop_recursive(depth, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|s| Shape::Not(Box::new(s))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Shape::And(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Shape::Or(Box::new(a), Box::new(b))),
            inner.clone().prop_map(|s| Shape::Exists(Box::new(s))),
            inner.prop_map(|s| Shape::Forall(Box::new(s))),
        ]
    })
}

impl Shape {
    /// A sentence whose parameters, if any, come from `params`.
    pub fn build(&self, params: &[String]) -> Formula {
        self.go(0, params)
    }

    fn term(t: u8, scope: usize, params: &[String]) -> Term {
        let k = t as usize % (scope + params.len());
        if k < scope {
            Term::var(format!("x{k}"))
        } else {
            Term::param(params[k - scope].clone())
        }
    }

    fn go(&self, scope: usize, params: &[String]) -> Formula {
        let leaf = matches!(self, Shape::Atom(..) | Shape::Eq(..));
        if leaf && scope + params.len() == 0 {
            return Formula::exists("x0", self.go(1, params));
        }
        match self {
            Shape::Atom(r, ts) => Formula::atom(*r, ts.iter().map(|&t| Self::term(t, scope, params)).collect()),
            Shape::Eq(a, b) => Formula::equal(Self::term(*a, scope, params), Self::term(*b, scope, params)),
            Shape::Not(s) => Formula::not(s.go(scope, params)),
            Shape::And(a, b) => Formula::and(a.go(scope, params), b.go(scope, params)),
            Shape::Or(a, b) => Formula::or(a.go(scope, params), b.go(scope, params)),
            Shape::Exists(s) => Formula::exists(format!("x{scope}"), s.go(scope + 1, params)),
            Shape::Forall(s) => Formula::forall(format!("x{scope}"), s.go(scope + 1, params)),
        }
    }
}

pub fn graph_signature() -> Signature {
    fixtures::graph_signature()
}

/// A random directed graph on `n <= 4` vertices, loops allowed.
pub fn digraph(id: String, n: usize, mask: u32) -> Structure {
    let mut t = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if mask >> (i * n + j) & 1 == 1 {
                t.push(vec![i, j]);
            }
        }
    }
    Structure::from_indices(&graph_signature(), id, n, &[t], &[]).expect("valid digraph")
}

/// An `auto` extension system over 1 to 4 random digraphs of size 1 to 3.
pub fn digraph_system() -> impl Strategy<Value = ExtensionSystem> {
    prop::collection::vec((1usize..=3, any::<u32>()), 1..=4).prop_map(|specs| {
        let nodes = specs
            .into_iter()
            .enumerate()
            .map(|(i, (n, m))| digraph(format!("N{i}"), n, m))
            .collect();
        ExtensionSystem::auto(graph_signature(), nodes).expect("distinct ids")
    })
}

/// Quantifier prefixes, as alternating block strings, of every prenex form
/// reachable by pulling quantifiers out past connectives.
fn prefixes(phi: &Formula) -> BTreeSet<String> {
    fn squash(s: String) -> String {
        let mut out = String::new();
        for c in s.chars() {
            if !out.ends_with(c) {
                out.push(c);
            }
        }
        out
    }
    fn merges(a: &str, b: &str, out: &mut BTreeSet<String>, acc: String) {
        if a.is_empty() || b.is_empty() {
            out.insert(squash(acc + a + b));
            return;
        }
        merges(&a[1..], b, out, format!("{acc}{}", &a[..1]));
        merges(a, &b[1..], out, format!("{acc}{}", &b[..1]));
    }
    match phi {
        Formula::Atom(..) | Formula::Equal(..) => BTreeSet::from([String::new()]),
        Formula::Not(f) => prefixes(f)
            .into_iter()
            .map(|p| p.chars().map(|c| if c == 'E' { 'A' } else { 'E' }).collect())
            .collect(),
        Formula::And(a, b) | Formula::Or(a, b) => {
            let mut out = BTreeSet::new();
            for p in prefixes(a) {
                for q in prefixes(b) {
                    merges(&p, &q, &mut out, String::new());
                }
            }
            out
        }
        Formula::Exists(_, f) => prefixes(f).into_iter().map(|p| squash(format!("E{p}"))).collect(),
    }
}

pub fn prenex_oracle(phi: &Formula) -> QuantifierClass {
    let ps = prefixes(phi);
    if ps.contains("") {
        QuantifierClass::Delta0
    } else if ps.contains("E") {
        QuantifierClass::Sigma1
    } else if ps.iter().any(|p| p == "A" || p == "AE") {
        QuantifierClass::Pi2
    } else {
        QuantifierClass::Other
    }
}
