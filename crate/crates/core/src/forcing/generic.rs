use serde::Serialize;

use super::{ForcingEngine, ForcingError};
use crate::logic::{shared_pool, Budget};
use crate::structure::ExtensionSystem;

/// Whether a node decides every pool sentence within a budget.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenericityReport {
    pub node: String,
    pub budget: Budget,
    pub generic: bool,
    pub pool_size: usize,
    /// Sentences with neither themselves nor their negation forced.
    pub undecided: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenericStep {
    pub from: String,
    pub to: String,
    pub edge: usize,
    /// Image of each element of `from`, by name.
    pub map: Vec<String>,
    /// The undecided sentence at `from` that `to` forces after transport.
    pub sentence: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenericPath {
    pub start: String,
    pub end: String,
    pub budget: Budget,
    pub steps: Vec<GenericStep>,
}

impl ForcingEngine<'_> {
    /// Genericity report listing every undecided sentence.
    pub fn genericity(&mut self, node: usize, budget: Budget) -> GenericityReport {
        let pool = self.pool(node, budget);
        let mut undecided = Vec::new();
        for &f in pool.iter() {
            if !self.decides_id(node, f) {
                undecided.push(self.render(node, f));
            }
        }
        GenericityReport {
            node: self.system().node_id(node).to_string(),
            budget,
            generic: undecided.is_empty(),
            pool_size: pool.len(),
            undecided,
        }
    }

    /// Like [`Self::genericity`] but stops at the first undecided sentence.
    pub fn is_budget_generic(&mut self, node: usize, budget: Budget) -> bool {
        let pool = self.pool(node, budget);
        pool.iter().all(|&f| self.decides_id(node, f))
    }

    /// Walks from `start` to a budget-generic node. At each step the first
    /// undecided pool sentence is forced by moving along the first listed
    /// edge whose target forces it. Persistence means sentences decided
    /// earlier stay decided, so the walk takes at most as many moves as the
    /// largest pool; `cap` defaults to that bound.
    pub fn build_generic(
        &mut self,
        start: usize,
        budget: Budget,
        cap: Option<usize>,
    ) -> Result<GenericPath, ForcingError> {
        let sys = self.system();
        let cap = cap.unwrap_or_else(|| default_cap(sys, start, budget));
        let mut cur = start;
        let mut steps = Vec::new();
        loop {
            let pool = self.pool(cur, budget);
            let Some(f) = pool.iter().copied().find(|&f| !self.decides_id(cur, f)) else {
                break;
            };
            if steps.len() >= cap {
                return Err(ForcingError::MoveCapExceeded { cap });
            }
            let next = sys.out_edges(cur).iter().copied().find(|&k| {
                let h = self.transport(f, k);
                self.force(sys.edge(k).to, h)
            });
            let Some(k) = next else {
                return Err(ForcingError::Inconsistent(format!(
                    "`{}` is undecided at {} but no extension forces it",
                    self.render(cur, f),
                    sys.node_id(cur)
                )));
            };
            let e = sys.edge(k);
            let target = sys.node(e.to);
            steps.push(GenericStep {
                from: sys.node_id(cur).to_string(),
                to: target.id.clone(),
                edge: k,
                map: e.map.iter().map(|&j| target.element_name(j).to_string()).collect(),
                sentence: self.render(cur, f),
            });
            cur = e.to;
        }
        Ok(GenericPath {
            start: sys.node_id(start).to_string(),
            end: sys.node_id(cur).to_string(),
            budget,
            steps,
        })
    }
}

/// Largest pool over the nodes reachable from `start`.
pub(crate) fn default_cap(sys: &ExtensionSystem, start: usize, budget: Budget) -> usize {
    let mut sizes: Vec<usize> = sys.reachable(start).iter().map(|&n| sys.node(n).size()).collect();
    sizes.sort_unstable();
    sizes.dedup();
    sizes
        .into_iter()
        .map(|n| shared_pool(&sys.signature, n, budget).len())
        .max()
        .unwrap_or(0)
}

pub fn is_generic(
    sys: &ExtensionSystem,
    node: &str,
    budget: Budget,
) -> Result<GenericityReport, ForcingError> {
    let n = sys.require_node(node)?;
    Ok(ForcingEngine::new(sys).genericity(n, budget))
}

pub fn build_generic(
    sys: &ExtensionSystem,
    start: &str,
    budget: Budget,
    cap: Option<usize>,
) -> Result<GenericPath, ForcingError> {
    let n = sys.require_node(start)?;
    ForcingEngine::new(sys).build_generic(n, budget, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn two_chain_genericity() {
        let sys = fixtures::order_class(&[1, 2]);
        let b = Budget::new(4);
        let top = is_generic(&sys, "L2", b).unwrap();
        assert!(top.generic && top.undecided.is_empty());
        let bottom = is_generic(&sys, "L1", b).unwrap();
        assert!(!bottom.generic);
        assert!(bottom.undecided.contains(&"E x0. E x1. x0 < x1".to_string()));
    }

    #[test]
    fn single_node_is_generic() {
        let sys = fixtures::order_class(&[3]);
        assert!(is_generic(&sys, "L3", Budget::new(5)).unwrap().generic);
    }

    #[test]
    fn paths_to_generics() {
        let sys = fixtures::order_class(&[1, 2]);
        let p = build_generic(&sys, "L1", Budget::new(4), None).unwrap();
        assert_eq!(p.end, "L2");
        assert_eq!(p.steps.len(), 1);
        let q = build_generic(&sys, "L2", Budget::new(4), None).unwrap();
        assert!(q.steps.is_empty());

        let sys = fixtures::order_class(&[1, 2, 3]);
        let p = build_generic(&sys, "L1", Budget::new(5), None).unwrap();
        assert_eq!(p.end, "L3");
        assert!(is_generic(&sys, "L3", Budget::new(5)).unwrap().generic);
    }

    #[test]
    fn move_cap_is_reported() {
        let sys = fixtures::order_class(&[1, 2, 3]);
        assert!(matches!(
            build_generic(&sys, "L1", Budget::new(5), Some(0)),
            Err(ForcingError::MoveCapExceeded { cap: 0 })
        ));
    }
}
