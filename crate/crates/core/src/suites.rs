//! Named property suites over one extension system, each checking one
//! theorem exhaustively over the budget pools.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::forcing::{naive_forces, ForcingEngine, TransferKind};
use crate::logic::Budget;
use crate::modal::Principle;
use crate::structure::ExtensionSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// No node forces a sentence and its negation; forcing persists along
    /// every edge.
    Facts,
    /// Budget-generic nodes force exactly the sentences true in them.
    Infgen,
    /// Budget-generic nodes joined by a path are elementarily equivalent
    /// over the lower node's parameters.
    Geneq,
    /// Budget-generic nodes are Σ₁-absolute into every descendant.
    Excomp,
    /// Budget-generic nodes are Π₂-complete in every descendant.
    Pi2,
    /// Budget-generic nodes satisfy `<>[]φ -> φ`.
    Mp,
    /// Budget-generic nodes satisfy `φ -> []<>φ`.
    Ra,
    /// The memoized engine agrees with the naive evaluator.
    Oracle,
}

pub const ALL_SUITES: [Suite; 8] = [
    Suite::Facts,
    Suite::Infgen,
    Suite::Geneq,
    Suite::Excomp,
    Suite::Pi2,
    Suite::Mp,
    Suite::Ra,
    Suite::Oracle,
];

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ALL_SUITES
            .into_iter()
            .find(|x| x.to_string() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Facts => "facts",
            Suite::Infgen => "infgen",
            Suite::Geneq => "geneq",
            Suite::Excomp => "excomp",
            Suite::Pi2 => "pi2",
            Suite::Mp => "mp",
            Suite::Ra => "ra",
            Suite::Oracle => "oracle",
        })
    }
}

/// Violations kept verbatim in a report; the count covers all of them.
const KEEP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub budget: Budget,
    pub holds: bool,
    pub generic_nodes: Vec<String>,
    /// Number of individual checks made; for transfer suites, pool
    /// sentences times the maps they were carried along.
    pub checked: usize,
    pub violation_count: usize,
    pub violations: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl SuiteReport {
    fn violation(&mut self, msg: impl FnOnce() -> String) {
        self.violation_count += 1;
        if self.violations.len() < KEEP {
            self.violations.push(msg());
        }
    }
}

pub fn run_suite(sys: &ExtensionSystem, suite: Suite, budget: Budget) -> SuiteReport {
    ForcingEngine::new(sys).suite(suite, budget)
}

impl ForcingEngine<'_> {
    pub fn suite(&mut self, suite: Suite, budget: Budget) -> SuiteReport {
        let sys = self.system();
        let nodes = sys.nodes().len();
        let generics: Vec<usize> = (0..nodes).filter(|&n| self.is_budget_generic(n, budget)).collect();
        let mut r = SuiteReport {
            suite,
            budget,
            holds: true,
            generic_nodes: generics.iter().map(|&n| sys.node_id(n).to_string()).collect(),
            checked: 0,
            violation_count: 0,
            violations: Vec::new(),
            notes: Vec::new(),
        };
        let id = |n: usize| sys.node_id(n).to_string();
        match suite {
            Suite::Facts => {
                for n in 0..nodes {
                    let pool = self.pool(n, budget);
                    for &f in pool.iter() {
                        let nf = self.negate(f);
                        r.checked += 1;
                        if self.force(n, f) && self.force(n, nf) {
                            r.violation(|| format!("{} forces both {} and its negation", id(n), self.render(n, f)));
                        }
                        for g in [f, nf] {
                            if !self.force(n, g) {
                                continue;
                            }
                            for &k in sys.out_edges(n) {
                                r.checked += 1;
                                let h = self.transport(g, k);
                                let to = sys.edge(k).to;
                                if !self.force(to, h) {
                                    r.violation(|| {
                                        format!(
                                            "{} forces {} but {} does not force {}",
                                            id(n),
                                            self.render(n, g),
                                            id(to),
                                            self.render(to, h)
                                        )
                                    });
                                }
                            }
                        }
                    }
                }
            }
            Suite::Infgen => {
                for &n in &generics {
                    let pool = self.pool(n, budget);
                    for &f in pool.iter() {
                        let nf = self.negate(f);
                        for g in [f, nf] {
                            r.checked += 1;
                            if self.force(n, g) != self.truth(n, g) {
                                r.violation(|| format!("{}: forcing and truth differ on {}", id(n), self.render(n, g)));
                            }
                        }
                    }
                }
            }
            Suite::Geneq | Suite::Excomp | Suite::Pi2 => {
                let kind = match suite {
                    Suite::Geneq => TransferKind::Elementary,
                    Suite::Excomp => TransferKind::Sigma1,
                    _ => TransferKind::Pi2,
                };
                for &lower in &generics {
                    for upper in sys.reachable(lower) {
                        if upper == lower || (kind == TransferKind::Elementary && !generics.contains(&upper)) {
                            continue;
                        }
                        let t = self.transfer(kind, lower, upper, budget).expect("reachable");
                        r.checked += t.maps_checked * self.pool(lower, budget).len();
                        for c in t.counterexamples {
                            r.violation(|| {
                                format!(
                                    "{kind} transfer {} -> {} (map {:?}) fails on {}: {} below, {} above",
                                    t.lower, t.upper, c.map, c.sentence, c.lower_value, c.upper_value
                                )
                            });
                        }
                    }
                }
            }
            Suite::Mp => {
                for n in 0..nodes {
                    let rep = self.modal_principle(n, Principle::Mp, budget);
                    let generic = generics.contains(&n);
                    if generic {
                        r.checked += 1;
                    }
                    if rep.holds {
                        continue;
                    }
                    let detail = format!(
                        "{} fails MP on {} (boxed at {})",
                        rep.node,
                        rep.sentence.unwrap_or_default(),
                        rep.path.last().cloned().unwrap_or_default()
                    );
                    if generic {
                        r.violation(|| detail);
                    } else {
                        r.notes.push(format!("non-generic {detail}"));
                    }
                }
            }
            Suite::Ra => {
                for &n in &generics {
                    let pool = self.pool(n, budget);
                    for &f in pool.iter() {
                        if !self.truth(n, f) {
                            continue;
                        }
                        for &k in sys.out_edges(n) {
                            r.checked += 1;
                            let n1 = sys.edge(k).to;
                            let g = self.transport(f, k);
                            let back = sys.out_edges(n1).iter().any(|&k2| {
                                let h = self.transport(g, k2);
                                self.truth(sys.edge(k2).to, h)
                            });
                            if !back {
                                r.violation(|| {
                                    format!("{}: {} is lost after moving to {} for good", id(n), self.render(n, f), id(n1))
                                });
                            }
                        }
                    }
                }
                for n in 0..nodes {
                    let rep = self.modal_principle(n, Principle::Ra, budget);
                    r.notes.push(match rep.holds {
                        true => format!("{}: theory resurrection holds", rep.node),
                        false => format!(
                            "{}: theory resurrection fails after {} ({})",
                            rep.node,
                            rep.path.last().cloned().unwrap_or_default(),
                            rep.sentence.unwrap_or_default()
                        ),
                    });
                }
                r.notes.push(
                    "theory resurrection is the desk-scale reading: equal parameter-free budget theories".into(),
                );
            }
            Suite::Oracle => {
                for n in 0..nodes {
                    let pool = self.pool(n, budget);
                    for &f in pool.iter() {
                        let nf = self.negate(f);
                        for g in [f, nf] {
                            r.checked += 1;
                            let phi = self.formula(n, g);
                            let naive = naive_forces(sys, n, &phi).expect("pool sentences are well formed");
                            if self.force(n, g) != naive {
                                r.violation(|| format!("{}: engine and naive evaluator differ on {}", id(n), self.render(n, g)));
                            }
                        }
                    }
                }
            }
        }
        r.holds = r.violation_count == 0;
        r
    }
}
