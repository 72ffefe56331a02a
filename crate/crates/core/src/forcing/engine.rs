use std::collections::HashMap;
use std::rc::Rc;

use rustc_hash::FxHashMap;

use super::arena::{Arena, Fid, Node, T};
use super::trace::{Clause, Trace, TraceStep};
use super::{ForcingError, ForcingVerdict};
use crate::logic::{class_of_levels, shared_pool, Budget, Formula, QuantifierClass, Structure};
use crate::structure::ExtensionSystem;

/// Memoized evaluator of the forcing relation over one extension system.
///
/// Verdicts are cached per `(node, sentence)`. The clause for `¬φ` at `N`
/// quantifies over the listed edges `N → Q` (the identity edge included),
/// transporting parameters along each edge's element map.
pub struct ForcingEngine<'a> {
    sys: &'a ExtensionSystem,
    pub(crate) arena: Arena,
    memo: Vec<Verdicts>,
    truth: Vec<Verdicts>,
    pools: HashMap<(usize, Budget), Rc<Vec<Fid>>>,
    levels: FxHashMap<Fid, (u32, u32)>,
    extra_maps: Vec<Vec<usize>>,
}

impl<'a> ForcingEngine<'a> {
    pub fn new(sys: &'a ExtensionSystem) -> Self {
        Self {
            sys,
            arena: Arena::default(),
            memo: vec![Verdicts::default(); sys.nodes().len()],
            truth: vec![Verdicts::default(); sys.nodes().len()],
            pools: HashMap::new(),
            levels: FxHashMap::default(),
            extra_maps: Vec::new(),
        }
    }

    pub fn system(&self) -> &'a ExtensionSystem {
        self.sys
    }

    /// Number of memoized `(node, sentence)` verdicts.
    pub fn memo_len(&self) -> usize {
        self.memo.iter().map(|v| v.known).sum()
    }

    /// Number of distinct sentences seen so far.
    pub fn sentence_count(&self) -> usize {
        self.arena.len()
    }

    /// Compiles a sentence whose parameters name elements of `node`.
    pub(crate) fn compile(&mut self, node: usize, phi: &Formula) -> Result<Fid, ForcingError> {
        Ok(self.arena.compile(self.sys.node(node), phi)?)
    }

    pub(crate) fn negate(&mut self, f: Fid) -> Fid {
        self.arena.not(f)
    }

    pub(crate) fn transport(&mut self, f: Fid, edge: usize) -> Fid {
        let e = self.sys.edge(edge);
        self.arena.map_params(f, edge as u32, &e.map)
    }

    /// Ids of the canonical pool of `node` in pool order. Pools depend only
    /// on the node's size, so nodes of equal size share them.
    pub(crate) fn pool(&mut self, node: usize, budget: Budget) -> Rc<Vec<Fid>> {
        self.sentence_pool(self.sys.node(node).size(), budget)
    }

    /// Pool ids for sentences whose parameters are positions `0..n`.
    pub(crate) fn sentence_pool(&mut self, n: usize, budget: Budget) -> Rc<Vec<Fid>> {
        if let Some(p) = self.pools.get(&(n, budget)) {
            return Rc::clone(p);
        }
        let dag = shared_pool(&self.sys.signature, n, budget);
        let ids = Rc::new(self.arena.intern_pool(&dag));
        self.pools.insert((n, budget), Rc::clone(&ids));
        ids
    }

    /// Registers an element map that is not a listed edge, returning a key
    /// for [`Self::map_by`].
    pub(crate) fn register_map(&mut self, map: Vec<usize>) -> u32 {
        if let Some(i) = self.extra_maps.iter().position(|m| *m == map) {
            return (self.sys.edges().len() + i) as u32;
        }
        self.extra_maps.push(map);
        (self.sys.edges().len() + self.extra_maps.len() - 1) as u32
    }

    pub(crate) fn map_by(&mut self, f: Fid, key: u32) -> Fid {
        let k = key as usize;
        let edges = self.sys.edges().len();
        if k < edges {
            return self.transport(f, k);
        }
        let map = std::mem::take(&mut self.extra_maps[k - edges]);
        let g = self.arena.map_params(f, key, &map);
        self.extra_maps[k - edges] = map;
        g
    }

    pub(crate) fn key_map(&self, key: u32) -> Vec<usize> {
        let k = key as usize;
        let edges = self.sys.edges().len();
        if k < edges {
            self.sys.edge(k).map.clone()
        } else {
            self.extra_maps[k - edges].clone()
        }
    }

    /// Classical truth of a compiled sentence in `node`'s structure.
    pub(crate) fn truth(&mut self, node: usize, f: Fid) -> bool {
        if let Some(v) = self.truth[node].get(f) {
            return v;
        }
        let sys = self.sys;
        let s = sys.node(node);
        let v = match self.arena.node(f).clone() {
            Node::Atom(r, ts) => {
                let args: smallvec::SmallVec<[usize; 4]> =
                    ts.iter().map(|t| element(s, *t)).collect();
                s.holds(r as usize, &args)
            }
            Node::Eq(a, b) => element(s, a) == element(s, b),
            Node::Not(g) => !self.truth(node, g),
            Node::And(a, b) => self.truth(node, a) && self.truth(node, b),
            Node::Or(a, b) => self.truth(node, a) || self.truth(node, b),
            Node::Exists(body) => (0..s.size() as u16).any(|a| {
                let g = self.arena.subst0(body, a);
                self.truth(node, g)
            }),
        };
        self.truth[node].set(f, v);
        v
    }

    /// Quantifier class of a compiled sentence, as `classify` would give.
    pub(crate) fn class(&mut self, f: Fid) -> QuantifierClass {
        let (s, p) = self.prenex_levels(f);
        class_of_levels(s, p)
    }

    fn prenex_levels(&mut self, f: Fid) -> (u32, u32) {
        if let Some(&v) = self.levels.get(&f) {
            return v;
        }
        let v = match *self.arena.node(f) {
            Node::Atom(..) | Node::Eq(..) => (0, 0),
            Node::Not(g) => {
                let (s, p) = self.prenex_levels(g);
                (p, s)
            }
            Node::And(a, b) | Node::Or(a, b) => {
                let (sa, pa) = self.prenex_levels(a);
                let (sb, pb) = self.prenex_levels(b);
                (sa.max(sb), pa.max(pb))
            }
            Node::Exists(g) => {
                let (s, p) = self.prenex_levels(g);
                let sigma = s.min(p + 1).max(1);
                (sigma, sigma + 1)
            }
        };
        self.levels.insert(f, v);
        v
    }

    pub(crate) fn render(&self, node: usize, f: Fid) -> String {
        self.arena
            .decompile(self.sys.node(node), f)
            .render(&self.sys.signature)
    }

    pub(crate) fn formula(&self, node: usize, f: Fid) -> Formula {
        self.arena.decompile(self.sys.node(node), f)
    }

    /// Whether `node` forces `phi`.
    pub fn forces(&mut self, node: usize, phi: &Formula) -> Result<bool, ForcingError> {
        let f = self.compile(node, phi)?;
        Ok(self.force(node, f))
    }

    /// Whether `node` forces `phi` or forces `¬phi`.
    pub fn decides(&mut self, node: usize, phi: &Formula) -> Result<bool, ForcingError> {
        let f = self.compile(node, phi)?;
        Ok(self.decides_id(node, f))
    }

    pub(crate) fn decides_id(&mut self, node: usize, f: Fid) -> bool {
        if self.force(node, f) {
            return true;
        }
        let nf = self.negate(f);
        self.force(node, nf)
    }

    pub(crate) fn force(&mut self, node: usize, f: Fid) -> bool {
        if let Some(v) = self.memo[node].get(f) {
            return v;
        }
        let sys = self.sys;
        let v = match self.arena.node(f).clone() {
            Node::Atom(r, ts) => {
                let s = sys.node(node);
                let args: smallvec::SmallVec<[usize; 4]> =
                    ts.iter().map(|t| element(s, *t)).collect();
                s.holds(r as usize, &args)
            }
            Node::Eq(a, b) => {
                let s = sys.node(node);
                element(s, a) == element(s, b)
            }
            Node::And(a, b) => self.force(node, a) && self.force(node, b),
            Node::Or(a, b) => self.force(node, a) || self.force(node, b),
            Node::Exists(body) => {
                let n = sys.node(node).size() as u16;
                (0..n).any(|a| {
                    let g = self.arena.subst0(body, a);
                    self.force(node, g)
                })
            }
            Node::Not(g) => !sys.out_edges(node).iter().any(|&k| {
                let h = self.transport(g, k);
                self.force(sys.edge(k).to, h)
            }),
        };
        self.memo[node].set(f, v);
        v
    }

    /// Verdict with a derivation trace cut off below `trace_depth` levels.
    pub fn verdict(
        &mut self,
        node: usize,
        phi: &Formula,
        trace_depth: usize,
    ) -> Result<ForcingVerdict, ForcingError> {
        let f = self.compile(node, phi)?;
        let trace = self.trace(node, f, trace_depth);
        Ok(ForcingVerdict {
            node: self.sys.node_id(node).to_string(),
            sentence: self.render(node, f),
            forced: trace.forced,
            trace,
        })
    }

    pub(crate) fn trace(&mut self, node: usize, f: Fid, depth: usize) -> Trace {
        let forced = self.force(node, f);
        let sys = self.sys;
        let clause = match self.arena.node(f) {
            Node::Atom(..) | Node::Eq(..) => Clause::Atomic,
            Node::Not(_) => Clause::Not,
            Node::And(..) => Clause::And,
            Node::Or(..) => Clause::Or,
            Node::Exists(_) => Clause::Exists,
        };
        let mut out = Trace {
            node: sys.node_id(node).to_string(),
            sentence: self.render(node, f),
            clause,
            forced,
            truncated: false,
            steps: Vec::new(),
        };
        if clause == Clause::Atomic {
            return out;
        }
        if depth == 0 {
            out.truncated = true;
            return out;
        }
        let d = depth - 1;
        match self.arena.node(f).clone() {
            Node::And(a, b) | Node::Or(a, b) => {
                let is_and = clause == Clause::And;
                // Record the first child that settles the verdict, or both.
                let first = self.force(node, a);
                let settles = if is_and { !first } else { first };
                out.steps.push(TraceStep::plain(self.trace(node, a, d)));
                if !settles {
                    out.steps.push(TraceStep::plain(self.trace(node, b, d)));
                }
            }
            Node::Exists(body) => {
                let s = sys.node(node);
                for a in 0..s.size() as u16 {
                    let g = self.arena.subst0(body, a);
                    let hit = self.force(node, g);
                    if !forced || hit {
                        let t = self.trace(node, g, d);
                        out.steps.push(TraceStep::element(s.element_name(a as usize), t));
                    }
                    if hit {
                        break;
                    }
                }
            }
            Node::Not(g) => {
                for &k in sys.out_edges(node) {
                    let e = sys.edge(k);
                    let h = self.transport(g, k);
                    let hit = self.force(e.to, h);
                    let t = self.trace(e.to, h, d);
                    out.steps.push(TraceStep::edge(sys, k, t));
                    if hit {
                        break;
                    }
                }
            }
            Node::Atom(..) | Node::Eq(..) => unreachable!("handled above"),
        }
        out
    }
}

/// Cached verdicts of one node, indexed by sentence id: 0 unknown, 1 false,
/// 2 true. Ids are dense, so a byte table beats hashing.
#[derive(Debug, Clone, Default)]
struct Verdicts {
    table: Vec<u8>,
    known: usize,
}

impl Verdicts {
    fn get(&self, f: Fid) -> Option<bool> {
        match self.table.get(f as usize) {
            Some(1) => Some(false),
            Some(2) => Some(true),
            _ => None,
        }
    }

    fn set(&mut self, f: Fid, v: bool) {
        let i = f as usize;
        if i >= self.table.len() {
            self.table.resize((i + 1).next_power_of_two(), 0);
        }
        self.known += usize::from(self.table[i] == 0);
        self.table[i] = 1 + u8::from(v);
    }
}

fn element(s: &Structure, t: T) -> usize {
    match t {
        T::Param(i) => i as usize,
        T::Const(c) => s.constant(c as usize),
        T::Var(_) => unreachable!("sentences have no free variables"),
    }
}
