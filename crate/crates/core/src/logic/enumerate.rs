//! Canonical enumeration of sentences up to a size budget.
//!
//! The pool contains one representative per class of syntactic variants that
//! no forcing or satisfaction clause can tell apart:
//! - bound variables are named by binding depth (`x0`, `x1`, ...);
//! - every quantifier binds a variable that occurs in its body;
//! - `∧` and `∨` chains are right-nested, strictly increasing, duplicate-free;
//! - equations are oriented `s = t` with `s ≤ t`;
//! - no triple negation (`¬¬¬φ` and `¬φ` are forced at exactly the same nodes).
//!
//! [`canonicalize`] maps any sentence to its representative without increasing
//! its size, so a property checked over the pool holds for all sentences of the
//! same budget.
//!
//! Sentences are ordered by size, then by their preorder token sequence, with
//! relation atoms (declaration order) < `=` < `¬` < `∧` < `∨` < `∃`, and terms
//! ordered variables < constants (declaration order) < parameters (list order).

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::{Budget, Formula, Signature, Term};

const TERM_BASE: u32 = 1 << 20;
const CONST_BASE: u32 = TERM_BASE + (1 << 12);
const PARAM_BASE: u32 = TERM_BASE + (1 << 13);

/// Term of a [`SentencePool`] node: a bound variable by binding depth, a
/// constant or a parameter by position in the parameter list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PoolTerm {
    Var(u32),
    Const(u32),
    Param(u32),
}

impl PoolTerm {
    fn token(self) -> u32 {
        match self {
            PoolTerm::Var(l) => TERM_BASE + l,
            PoolTerm::Const(c) => CONST_BASE + c,
            PoolTerm::Param(p) => PARAM_BASE + p,
        }
    }
}

/// Node of a [`SentencePool`]; children are indices into the same pool.
#[derive(Debug, Clone)]
pub enum PoolNode {
    Atom(u32, Vec<PoolTerm>),
    Eq(PoolTerm, PoolTerm),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Exists(usize),
}

#[derive(Debug)]
struct Node {
    kind: PoolNode,
    size: usize,
    mask: u64,
    has_param: bool,
    tokens: Vec<u32>,
}

struct Enumerator<'a> {
    sig: &'a Signature,
    n_params: usize,
    param_budget: usize,
    nodes: Vec<Node>,
    levels: HashMap<(usize, usize), Vec<usize>>,
}

fn node_tokens(sig: &Signature) -> [u32; 5] {
    let r = sig.relations.len() as u32;
    [r, r + 1, r + 2, r + 3, r + 4]
}

impl<'a> Enumerator<'a> {
    fn key(&self, i: usize) -> (usize, &[u32]) {
        (self.nodes[i].size, &self.nodes[i].tokens)
    }

    fn cmp(&self, a: usize, b: usize) -> Ordering {
        self.key(a).cmp(&self.key(b))
    }

    fn push(&mut self, kind: PoolNode) -> usize {
        let [eq_t, not_t, and_t, or_t, ex_t] = node_tokens(self.sig);
        let (size, mask, has_param, tokens) = match &kind {
            PoolNode::Atom(r, ts) => {
                let mut tok = vec![*r];
                tok.extend(ts.iter().map(|t| t.token()));
                (1, term_mask(ts), ts.iter().any(is_param), tok)
            }
            PoolNode::Eq(a, b) => (
                1,
                term_mask(&[*a, *b]),
                is_param(a) || is_param(b),
                vec![eq_t, a.token(), b.token()],
            ),
            PoolNode::Not(c) => {
                let n = &self.nodes[*c];
                let mut tok = vec![not_t];
                tok.extend_from_slice(&n.tokens);
                (n.size + 1, n.mask, n.has_param, tok)
            }
            PoolNode::And(a, b) | PoolNode::Or(a, b) => {
                let t = if matches!(kind, PoolNode::And(..)) { and_t } else { or_t };
                let (na, nb) = (&self.nodes[*a], &self.nodes[*b]);
                let mut tok = vec![t];
                tok.extend_from_slice(&na.tokens);
                tok.extend_from_slice(&nb.tokens);
                (
                    na.size + nb.size + 1,
                    na.mask | nb.mask,
                    na.has_param || nb.has_param,
                    tok,
                )
            }
            PoolNode::Exists(c) => {
                let n = &self.nodes[*c];
                let mut tok = vec![ex_t];
                tok.extend_from_slice(&n.tokens);
                // The binder's own variable is dropped by the caller's depth.
                (n.size + 1, n.mask, n.has_param, tok)
            }
        };
        self.nodes.push(Node {
            kind,
            size,
            mask,
            has_param,
            tokens,
        });
        self.nodes.len() - 1
    }

    fn terms(&self, depth: usize, with_params: bool) -> Vec<PoolTerm> {
        let mut ts: Vec<PoolTerm> = (0..depth as u32).map(PoolTerm::Var).collect();
        ts.extend((0..self.sig.constants.len() as u32).map(PoolTerm::Const));
        if with_params {
            ts.extend((0..self.n_params as u32).map(PoolTerm::Param));
        }
        ts
    }

    /// Canonical formulas of exactly `size` nodes whose variables are among
    /// the `depth` enclosing binders.
    fn level(&mut self, size: usize, depth: usize) -> Vec<usize> {
        if let Some(v) = self.levels.get(&(size, depth)) {
            return v.clone();
        }
        // Every enclosing binder adds a node, so a parameterized root has
        // room for this subformula only if `size + depth` fits.
        let allow_params = size + depth <= self.param_budget;
        let mut out = Vec::new();
        if size == 1 {
            let terms = self.terms(depth, allow_params);
            for (r, decl) in self.sig.relations.iter().enumerate() {
                for tuple in product(&terms, decl.arity) {
                    out.push(self.push(PoolNode::Atom(r as u32, tuple)));
                }
            }
            for (i, a) in terms.iter().enumerate() {
                for b in &terms[i..] {
                    out.push(self.push(PoolNode::Eq(*a, *b)));
                }
            }
        } else {
            let usable = |e: &Enumerator, i: usize| allow_params || !e.nodes[i].has_param;
            for c in self.level(size - 1, depth) {
                let triple = matches!(self.nodes[c].kind, PoolNode::Not(g) if matches!(self.nodes[g].kind, PoolNode::Not(_)));
                if !triple && usable(self, c) {
                    out.push(self.push(PoolNode::Not(c)));
                }
            }
            if depth < 63 {
                for c in self.level(size - 1, depth + 1) {
                    if self.nodes[c].mask & (1 << depth) != 0 && usable(self, c) {
                        let e = self.push(PoolNode::Exists(c));
                        self.nodes[e].mask &= !(1 << depth);
                        out.push(e);
                    }
                }
            }
            for left in 1..size - 1 {
                let right = size - 1 - left;
                let ls = self.level(left, depth);
                let rs = self.level(right, depth);
                for &a in &ls {
                    if !usable(self, a) {
                        continue;
                    }
                    for &b in &rs {
                        if !usable(self, b) {
                            continue;
                        }
                        for and in [true, false] {
                            if self.chain_ok(a, b, and) {
                                let k = if and { PoolNode::And(a, b) } else { PoolNode::Or(a, b) };
                                out.push(self.push(k));
                            }
                        }
                    }
                }
            }
        }
        out.sort_by(|a, b| self.cmp(*a, *b));
        self.levels.insert((size, depth), out.clone());
        out
    }

    fn chain_ok(&self, a: usize, b: usize, and: bool) -> bool {
        let same = |i: usize| match self.nodes[i].kind {
            PoolNode::And(..) => and,
            PoolNode::Or(..) => !and,
            _ => false,
        };
        if same(a) {
            return false;
        }
        let head = match self.nodes[b].kind {
            PoolNode::And(h, _) if and => h,
            PoolNode::Or(h, _) if !and => h,
            _ => b,
        };
        self.cmp(a, head) == Ordering::Less
    }

}

/// The canonical pool as a shared DAG: `roots` lists the sentences in
/// canonical order and `nodes` holds every subformula once.
#[derive(Debug, Clone)]
pub struct SentencePool {
    pub nodes: Vec<PoolNode>,
    pub roots: Vec<usize>,
}

impl SentencePool {
    /// Enumerates the pool over `n_params` parameters; see [`enumerate_pool`].
    pub fn new(sig: &Signature, n_params: usize, budget: usize, param_budget: usize) -> Self {
        assert!(budget < 64, "budget must be below 64");
        let mut e = Enumerator {
            sig,
            n_params,
            param_budget: param_budget.min(budget),
            nodes: Vec::new(),
            levels: HashMap::new(),
        };
        let mut roots = Vec::new();
        for size in 1..=budget {
            roots.extend(e.level(size, 0));
        }
        Self {
            nodes: e.nodes.into_iter().map(|n| n.kind).collect(),
            roots,
        }
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// The `i`-th sentence, naming parameter `p` by `params[p]`.
    pub fn formula(&self, i: usize, params: &[String]) -> Formula {
        self.materialize(self.roots[i], 0, params)
    }

    fn materialize(&self, i: usize, depth: usize, params: &[String]) -> Formula {
        let term = |t: &PoolTerm| match t {
            PoolTerm::Var(l) => Term::Var(format!("x{l}")),
            PoolTerm::Const(c) => Term::Const(*c as usize),
            PoolTerm::Param(p) => Term::Param(params[*p as usize].clone()),
        };
        let m = |j: usize, d: usize| self.materialize(j, d, params);
        match &self.nodes[i] {
            PoolNode::Atom(r, ts) => Formula::Atom(*r as usize, ts.iter().map(term).collect()),
            PoolNode::Eq(a, b) => Formula::Equal(term(a), term(b)),
            PoolNode::Not(c) => Formula::not(m(*c, depth)),
            PoolNode::And(a, b) => Formula::and(m(*a, depth), m(*b, depth)),
            PoolNode::Or(a, b) => Formula::or(m(*a, depth), m(*b, depth)),
            PoolNode::Exists(c) => Formula::exists(format!("x{depth}"), m(*c, depth + 1)),
        }
    }
}

fn is_param(t: &PoolTerm) -> bool {
    matches!(t, PoolTerm::Param(_))
}

fn term_mask(ts: &[PoolTerm]) -> u64 {
    ts.iter().fold(0, |m, t| match t {
        PoolTerm::Var(l) => m | (1 << l),
        _ => m,
    })
}

fn product(terms: &[PoolTerm], arity: usize) -> Vec<Vec<PoolTerm>> {
    let mut out = vec![Vec::with_capacity(arity)];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                terms.iter().map(move |t| {
                    let mut v = prefix.clone();
                    v.push(*t);
                    v
                })
            })
            .collect();
    }
    out
}

/// All canonical sentences with parameters from `params` and size ≤ `budget`,
/// in canonical order. A budget of 0 yields the empty list.
pub fn enumerate_sentences(sig: &Signature, params: &[String], budget: usize) -> Vec<Formula> {
    enumerate_pool(sig, params, budget, budget)
}

/// Like [`enumerate_sentences`], but sentences mentioning a parameter are only
/// included up to size `param_budget`.
pub fn enumerate_pool(
    sig: &Signature,
    params: &[String],
    budget: usize,
    param_budget: usize,
) -> Vec<Formula> {
    let pool = SentencePool::new(sig, params.len(), budget, param_budget);
    (0..pool.len()).map(|i| pool.formula(i, params)).collect()
}

/// Process-wide cache of pools keyed by signature, parameter count and
/// budget. Pools over `n` parameters are shared by every structure of size
/// `n`, since parameters are positional.
pub fn shared_pool(sig: &Signature, n_params: usize, budget: Budget) -> Arc<SentencePool> {
    type Key = (Signature, usize, Budget);
    static CACHE: OnceLock<Mutex<Vec<(Key, Arc<SentencePool>)>>> = OnceLock::new();
    // Pools at large budgets weigh tens of megabytes, so only a few are kept.
    const KEEP: usize = 4;
    let cache = CACHE.get_or_init(Default::default);
    let key = (sig.clone(), n_params, budget);
    if let Some((_, p)) = cache
        .lock()
        .expect("pool cache poisoned")
        .iter()
        .find(|(k, _)| *k == key)
    {
        return Arc::clone(p);
    }
    let pool = Arc::new(SentencePool::new(sig, n_params, budget.size, budget.param_size));
    let mut entries = cache.lock().expect("pool cache poisoned");
    if entries.len() >= KEEP {
        entries.remove(0);
    }
    entries.push((key, Arc::clone(&pool)));
    pool
}

/// Preorder token key used for canonical ordering. Bound variables must be
/// named by depth as produced by [`canonicalize`].
pub fn canonical_key(phi: &Formula, sig: &Signature, params: &[String]) -> (usize, Vec<u32>) {
    let [eq_t, not_t, and_t, or_t, ex_t] = node_tokens(sig);
    let term = |t: &Term| match t {
        Term::Var(v) => TERM_BASE + v.trim_start_matches('x').parse::<u32>().unwrap_or(4095),
        Term::Const(c) => CONST_BASE + *c as u32,
        Term::Param(p) => {
            PARAM_BASE
                + params
                    .iter()
                    .position(|q| q == p)
                    .unwrap_or(params.len() + 1) as u32
        }
    };
    fn walk(
        f: &Formula,
        out: &mut Vec<u32>,
        term: &dyn Fn(&Term) -> u32,
        toks: [u32; 5],
    ) {
        let [eq_t, not_t, and_t, or_t, ex_t] = toks;
        match f {
            Formula::Atom(r, ts) => {
                out.push(*r as u32);
                out.extend(ts.iter().map(term));
            }
            Formula::Equal(a, b) => out.extend([eq_t, term(a), term(b)]),
            Formula::Not(g) => {
                out.push(not_t);
                walk(g, out, term, toks);
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                out.push(if matches!(f, Formula::And(..)) { and_t } else { or_t });
                walk(a, out, term, toks);
                walk(b, out, term, toks);
            }
            Formula::Exists(_, g) => {
                out.push(ex_t);
                walk(g, out, term, toks);
            }
        }
    }
    let mut out = Vec::new();
    walk(phi, &mut out, &term, [eq_t, not_t, and_t, or_t, ex_t]);
    (phi.size(), out)
}

/// Maps a sentence to its canonical representative (see module docs). The
/// result is never larger than the input.
pub fn canonicalize(phi: &Formula, sig: &Signature, params: &[String]) -> Formula {
    let mut scope = Vec::new();
    canon(phi, sig, params, &mut scope)
}

fn canon(phi: &Formula, sig: &Signature, params: &[String], scope: &mut Vec<String>) -> Formula {
    let rename = |t: &Term, scope: &Vec<String>| match t {
        Term::Var(v) => match scope.iter().rposition(|s| s == v) {
            Some(l) => Term::Var(format!("x{l}")),
            None => t.clone(),
        },
        other => other.clone(),
    };
    match phi {
        Formula::Atom(r, ts) => Formula::Atom(*r, ts.iter().map(|t| rename(t, scope)).collect()),
        Formula::Equal(a, b) => {
            let (a, b) = (rename(a, scope), rename(b, scope));
            let key = |t: &Term| canonical_key(&Formula::Equal(t.clone(), t.clone()), sig, params).1[1];
            if key(&a) <= key(&b) {
                Formula::Equal(a, b)
            } else {
                Formula::Equal(b, a)
            }
        }
        Formula::Not(g) => {
            let c = canon(g, sig, params, scope);
            match c {
                Formula::Not(inner) if matches!(*inner, Formula::Not(_)) => *inner,
                other => Formula::not(other),
            }
        }
        Formula::And(..) | Formula::Or(..) => {
            let and = matches!(phi, Formula::And(..));
            let mut items = Vec::new();
            flatten(phi, and, &mut |f| {
                let c = canon(f, sig, params, scope);
                flatten_owned(c, and, &mut items);
            });
            items.sort_by_cached_key(|f| canonical_key(f, sig, params));
            items.dedup();
            let mut it = items.into_iter().rev();
            let mut acc = it.next().expect("chains are nonempty");
            for f in it {
                acc = if and { Formula::and(f, acc) } else { Formula::or(f, acc) };
            }
            acc
        }
        Formula::Exists(v, g) => {
            if !g.free_vars().contains(v) {
                return canon(g, sig, params, scope);
            }
            scope.push(v.clone());
            let body = canon(g, sig, params, scope);
            scope.pop();
            Formula::exists(format!("x{}", scope.len()), body)
        }
    }
}

fn flatten<'f>(phi: &'f Formula, and: bool, f: &mut impl FnMut(&'f Formula)) {
    match phi {
        Formula::And(a, b) if and => {
            flatten(a, and, f);
            flatten(b, and, f);
        }
        Formula::Or(a, b) if !and => {
            flatten(a, and, f);
            flatten(b, and, f);
        }
        other => f(other),
    }
}

fn flatten_owned(phi: Formula, and: bool, out: &mut Vec<Formula>) {
    match phi {
        Formula::And(a, b) if and => {
            flatten_owned(*a, and, out);
            flatten_owned(*b, and, out);
        }
        Formula::Or(a, b) if !and => {
            flatten_owned(*a, and, out);
            flatten_owned(*b, and, out);
        }
        other => out.push(other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    fn lt() -> Signature {
        Signature::relational(&[("<", 2)])
    }

    #[test]
    fn first_member_is_exists_x_lt_x() {
        let sig = lt();
        let pool = enumerate_sentences(&sig, &[], 3);
        assert!(pool.iter().all(|f| f.size() >= 2));
        assert_eq!(pool[0].render(&sig), "E x0. x0 < x0");
        assert_eq!(pool[1].render(&sig), "E x0. x0 = x0");
        let texts: Vec<String> = pool.iter().map(|f| f.render(&sig)).collect();
        assert!(texts.contains(&"E x0. E x1. x0 < x1".to_string()));
        assert!(texts.contains(&"!(E x0. x0 < x0)".to_string()));
    }

    #[test]
    fn budget_zero_is_empty() {
        assert!(enumerate_sentences(&lt(), &[], 0).is_empty());
    }

    #[test]
    fn deterministic_and_strictly_ordered() {
        let sig = Signature::relational(&[("<", 2), ("P", 1)]);
        let params = vec!["a".to_string()];
        let a = enumerate_sentences(&sig, &params, 5);
        let b = enumerate_sentences(&sig, &params, 5);
        assert_eq!(a, b);
        let keys: Vec<_> = a.iter().map(|f| canonical_key(f, &sig, &params)).collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn pool_members_are_fixed_points_of_canonicalize() {
        let sig = Signature::relational(&[("<", 2), ("P", 1)]);
        let params = vec!["a".to_string(), "b".to_string()];
        for f in enumerate_sentences(&sig, &params, 5) {
            assert_eq!(canonicalize(&f, &sig, &params), f, "{}", f.render(&sig));
            assert!(f.is_sentence());
        }
    }

    #[test]
    fn canonicalize_normalizes_variants() {
        let sig = lt();
        let p = vec![];
        let c = |t: &str| canonicalize(&parse_formula(t, &sig).unwrap(), &sig, &p).render(&sig);
        assert_eq!(c("E y. E z. y < z"), "E x0. E x1. x0 < x1");
        assert_eq!(c("E y. E z. E w. y < z"), "E x0. E x1. x0 < x1");
        assert_eq!(c("E x. x < x & x < x"), "E x0. x0 < x0");
        assert_eq!(c("!!!(E x. x < x)"), "!(E x0. x0 < x0)");
        assert_eq!(c("E x. E y. y = x"), "E x0. E x1. x0 = x1");
        assert_eq!(
            c("E x. (x = x | x < x) | x < x"),
            "E x0. x0 < x0 | x0 = x0"
        );
    }

    #[test]
    fn param_budget_limits_parameterized_sentences() {
        let sig = lt();
        let params = vec!["a".to_string()];
        let pool = enumerate_pool(&sig, &params, 4, 2);
        assert!(pool.iter().all(|f| !f.has_params() || f.size() <= 2));
        assert!(pool.iter().any(|f| f.has_params()));
        let free = enumerate_sentences(&sig, &[], 4);
        assert_eq!(
            pool.iter().filter(|f| !f.has_params()).count(),
            free.len()
        );
    }
}
