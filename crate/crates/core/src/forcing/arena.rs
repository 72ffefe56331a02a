//! Hash-consed sentences for the forcing engine.
//!
//! Bound variables are numbered by binding depth from the sentence root and
//! parameters are element indices of the structure the sentence lives in.
//! Each distinct sentence gets one id, so verdicts can be memoized per
//! `(node, id)`.

use std::hash::BuildHasher;

use hashbrown::HashTable;
use rustc_hash::{FxBuildHasher, FxHashMap};
use smallvec::SmallVec;

use crate::logic::{Formula, LogicError, PoolNode, PoolTerm, SentencePool, Structure, Term};

pub(crate) type Fid = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum T {
    Var(u16),
    Const(u16),
    Param(u16),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum Node {
    Atom(u16, SmallVec<[T; 2]>),
    Eq(T, T),
    Not(Fid),
    And(Fid, Fid),
    Or(Fid, Fid),
    Exists(Fid),
}

#[derive(Debug, Default)]
pub(crate) struct Arena {
    nodes: Vec<Node>,
    has_param: Vec<bool>,
    /// Ids keyed by the hash of their node, so nodes are stored once.
    index: HashTable<Fid>,
    subst: FxHashMap<(Fid, u16), Fid>,
    mapped: FxHashMap<(Fid, u32), Fid>,
}

impl Arena {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, f: Fid) -> &Node {
        &self.nodes[f as usize]
    }

    pub fn has_param(&self, f: Fid) -> bool {
        self.has_param[f as usize]
    }

    pub fn intern(&mut self, node: Node) -> Fid {
        let hash = FxBuildHasher.hash_one(&node);
        let nodes = &self.nodes;
        if let Some(&f) = self.index.find(hash, |&f| nodes[f as usize] == node) {
            return f;
        }
        let hp = match &node {
            Node::Atom(_, ts) => ts.iter().any(|t| matches!(t, T::Param(_))),
            Node::Eq(a, b) => matches!(a, T::Param(_)) || matches!(b, T::Param(_)),
            Node::Not(g) | Node::Exists(g) => self.has_param(*g),
            Node::And(a, b) | Node::Or(a, b) => self.has_param(*a) || self.has_param(*b),
        };
        let f = self.nodes.len() as Fid;
        self.nodes.push(node);
        self.has_param.push(hp);
        let nodes = &self.nodes;
        self.index
            .insert_unique(hash, f, |&g| FxBuildHasher.hash_one(&nodes[g as usize]));
        f
    }

    pub fn not(&mut self, f: Fid) -> Fid {
        self.intern(Node::Not(f))
    }

    /// Replaces variable 0 by parameter `a` and renumbers the remaining
    /// variables down by one. Applied to the body of a root `∃`.
    pub fn subst0(&mut self, f: Fid, a: u16) -> Fid {
        if let Some(&g) = self.subst.get(&(f, a)) {
            return g;
        }
        let t = |t: T| match t {
            T::Var(0) => T::Param(a),
            T::Var(l) => T::Var(l - 1),
            other => other,
        };
        let node = match self.node(f).clone() {
            Node::Atom(r, ts) => Node::Atom(r, ts.into_iter().map(t).collect()),
            Node::Eq(x, y) => Node::Eq(t(x), t(y)),
            Node::Not(g) => Node::Not(self.subst0(g, a)),
            Node::And(x, y) => Node::And(self.subst0(x, a), self.subst0(y, a)),
            Node::Or(x, y) => Node::Or(self.subst0(x, a), self.subst0(y, a)),
            Node::Exists(g) => Node::Exists(self.subst0(g, a)),
        };
        let g = self.intern(node);
        self.subst.insert((f, a), g);
        g
    }

    /// Renames parameters through `map`. `key` identifies the map for
    /// caching; callers use the edge index.
    pub fn map_params(&mut self, f: Fid, key: u32, map: &[usize]) -> Fid {
        if !self.has_param(f) {
            return f;
        }
        if let Some(&g) = self.mapped.get(&(f, key)) {
            return g;
        }
        let t = |t: T| match t {
            T::Param(i) => T::Param(map[i as usize] as u16),
            other => other,
        };
        let node = match self.node(f).clone() {
            Node::Atom(r, ts) => Node::Atom(r, ts.into_iter().map(t).collect()),
            Node::Eq(x, y) => Node::Eq(t(x), t(y)),
            Node::Not(g) => Node::Not(self.map_params(g, key, map)),
            Node::And(x, y) => Node::And(self.map_params(x, key, map), self.map_params(y, key, map)),
            Node::Or(x, y) => Node::Or(self.map_params(x, key, map), self.map_params(y, key, map)),
            Node::Exists(g) => Node::Exists(self.map_params(g, key, map)),
        };
        let g = self.intern(node);
        self.mapped.insert((f, key), g);
        g
    }

    /// Interns every sentence of a pool, returning root ids in pool order.
    /// Parameter `p` of the pool becomes element `p`.
    pub fn intern_pool(&mut self, pool: &SentencePool) -> Vec<Fid> {
        let t = |t: &PoolTerm| match *t {
            PoolTerm::Var(l) => T::Var(l as u16),
            PoolTerm::Const(c) => T::Const(c as u16),
            PoolTerm::Param(p) => T::Param(p as u16),
        };
        let mut ids: Vec<Fid> = Vec::with_capacity(pool.nodes.len());
        for n in &pool.nodes {
            // children always precede their parents in the pool
            let node = match n {
                PoolNode::Atom(r, ts) => Node::Atom(*r as u16, ts.iter().map(t).collect()),
                PoolNode::Eq(a, b) => Node::Eq(t(a), t(b)),
                PoolNode::Not(c) => Node::Not(ids[*c]),
                PoolNode::And(a, b) => Node::And(ids[*a], ids[*b]),
                PoolNode::Or(a, b) => Node::Or(ids[*a], ids[*b]),
                PoolNode::Exists(c) => Node::Exists(ids[*c]),
            };
            ids.push(self.intern(node));
        }
        pool.roots.iter().map(|&r| ids[r]).collect()
    }

    /// Compiles a sentence whose parameters name elements of `s`.
    pub fn compile(&mut self, s: &Structure, phi: &Formula) -> Result<Fid, LogicError> {
        let free = phi.free_vars();
        if !free.is_empty() {
            return Err(LogicError::FreeVariables(free.into_iter().collect()));
        }
        let mut scope = Vec::new();
        self.compile_in(s, phi, &mut scope)
    }

    fn compile_in(
        &mut self,
        s: &Structure,
        phi: &Formula,
        scope: &mut Vec<String>,
    ) -> Result<Fid, LogicError> {
        let term = |t: &Term, scope: &Vec<String>| -> Result<T, LogicError> {
            Ok(match t {
                Term::Var(v) => T::Var(
                    scope
                        .iter()
                        .rposition(|b| b == v)
                        .ok_or_else(|| LogicError::UnassignedVariable(v.clone()))?
                        as u16,
                ),
                Term::Const(c) => T::Const(*c as u16),
                Term::Param(p) => T::Param(s.element(p).ok_or_else(|| {
                    LogicError::DanglingParameter {
                        name: p.clone(),
                        structure: s.id.clone(),
                    }
                })? as u16),
            })
        };
        let node = match phi {
            Formula::Atom(r, ts) => Node::Atom(
                *r as u16,
                ts.iter().map(|t| term(t, scope)).collect::<Result<_, _>>()?,
            ),
            Formula::Equal(a, b) => Node::Eq(term(a, scope)?, term(b, scope)?),
            Formula::Not(g) => Node::Not(self.compile_in(s, g, scope)?),
            Formula::And(a, b) => {
                Node::And(self.compile_in(s, a, scope)?, self.compile_in(s, b, scope)?)
            }
            Formula::Or(a, b) => {
                Node::Or(self.compile_in(s, a, scope)?, self.compile_in(s, b, scope)?)
            }
            Formula::Exists(v, g) => {
                scope.push(v.clone());
                let body = self.compile_in(s, g, scope);
                scope.pop();
                Node::Exists(body?)
            }
        };
        Ok(self.intern(node))
    }

    /// Back to a [`Formula`], naming variables `x{level}` and parameters by
    /// the element names of `s`.
    pub fn decompile(&self, s: &Structure, f: Fid) -> Formula {
        self.decompile_at(s, f, 0)
    }

    fn decompile_at(&self, s: &Structure, f: Fid, depth: u16) -> Formula {
        let t = |t: &T| match t {
            T::Var(l) => Term::Var(format!("x{l}")),
            T::Const(c) => Term::Const(*c as usize),
            T::Param(i) => Term::Param(s.element_name(*i as usize).to_string()),
        };
        match self.node(f) {
            Node::Atom(r, ts) => Formula::Atom(*r as usize, ts.iter().map(t).collect()),
            Node::Eq(a, b) => Formula::Equal(t(a), t(b)),
            Node::Not(g) => Formula::not(self.decompile_at(s, *g, depth)),
            Node::And(a, b) => Formula::and(
                self.decompile_at(s, *a, depth),
                self.decompile_at(s, *b, depth),
            ),
            Node::Or(a, b) => Formula::or(
                self.decompile_at(s, *a, depth),
                self.decompile_at(s, *b, depth),
            ),
            Node::Exists(g) => {
                Formula::exists(format!("x{depth}"), self.decompile_at(s, *g, depth + 1))
            }
        }
    }
}
