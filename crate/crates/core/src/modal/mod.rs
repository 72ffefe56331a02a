//! An extension system read as a Kripke frame. Accessibility is the edge
//! relation, which is reflexive because every node carries its identity
//! edge, so `[] φ` holds at `n` iff `φ` holds at every edge target of `n`
//! (with parameters transported) and `<>` is its dual.

mod formula;

pub use formula::{parse_modal, ModalFormula};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forcing::{ForcingEngine, TransferKind};
use crate::logic::{satisfies_sentence, Budget, LogicError};
use crate::structure::{ExtensionSystem, StructureError};

#[derive(Debug, Error)]
pub enum ModalError {
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

impl From<crate::forcing::ForcingError> for ModalError {
    fn from(e: crate::forcing::ForcingError) -> Self {
        use crate::forcing::ForcingError as F;
        match e {
            F::Logic(l) => ModalError::Logic(l),
            F::Structure(s) => ModalError::Structure(s),
            other => unreachable!("modal checks only raise lookup errors: {other}"),
        }
    }
}

/// Evaluates a modal sentence at `node`. Cores are evaluated classically.
pub fn modal_eval(sys: &ExtensionSystem, node: &str, m: &ModalFormula) -> Result<bool, ModalError> {
    let n = sys.require_node(node)?;
    m.check_sentence()?;
    let s = sys.node(n);
    if let Some(p) = m.params().into_iter().find(|p| s.element(p).is_none()) {
        return Err(LogicError::DanglingParameter {
            name: p,
            structure: s.id.clone(),
        }
        .into());
    }
    let identity: Vec<usize> = (0..s.size()).collect();
    eval_at(sys, n, n, &identity, m)
}

/// `map` sends the elements of `origin`, which the parameters name, into `at`.
fn eval_at(
    sys: &ExtensionSystem,
    origin: usize,
    at: usize,
    map: &[usize],
    m: &ModalFormula,
) -> Result<bool, ModalError> {
    Ok(match m {
        ModalFormula::Core(f) => {
            let g = sys.transport_map(origin, at, map, f);
            satisfies_sentence(sys.node(at), &g)?
        }
        ModalFormula::Not(a) => !eval_at(sys, origin, at, map, a)?,
        ModalFormula::And(a, b) => eval_at(sys, origin, at, map, a)? && eval_at(sys, origin, at, map, b)?,
        ModalFormula::Or(a, b) => eval_at(sys, origin, at, map, a)? || eval_at(sys, origin, at, map, b)?,
        ModalFormula::Box(a) | ModalFormula::Diamond(a) => {
            let want = matches!(m, ModalFormula::Diamond(_));
            for &k in sys.out_edges(at) {
                let e = sys.edge(k);
                let next: Vec<usize> = map.iter().map(|&x| e.map[x]).collect();
                if eval_at(sys, origin, e.to, &next, a)? == want {
                    return Ok(want);
                }
            }
            !want
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Principle {
    /// Maximality Principle `<>[]φ -> φ`, parameters from the node.
    Mp,
    /// Resurrection: after any move there is a further move back to a node
    /// with the same parameter-free budget theory.
    Ra,
}

impl FromStr for Principle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mp" => Ok(Principle::Mp),
            "ra" => Ok(Principle::Ra),
            other => Err(format!("unknown principle `{other}`")),
        }
    }
}

impl fmt::Display for Principle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Principle::Mp => "mp",
            Principle::Ra => "ra",
        })
    }
}

const RA_READING: &str = "desk-scale reading: resurrection compares parameter-free budget theories of whole nodes";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrincipleReport {
    pub node: String,
    pub principle: Principle,
    pub budget: Budget,
    pub holds: bool,
    /// For MP, a sentence with `<>[]φ` true and `φ` false at the node. For
    /// RA, a sentence on which the node and the stranded successor differ.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sentence: Option<String>,
    /// For MP, the node and the successor where `[]φ` holds. For RA, the
    /// node and the successor from which no move restores its theory.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub path: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reading: Option<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BfaViolation {
    pub descendant: String,
    /// Image of each element of the node in the descendant, by name.
    pub map: Vec<String>,
    pub sentence: String,
}

impl ForcingEngine<'_> {
    /// `[] f` at `node`, classically.
    pub(crate) fn box_truth(&mut self, node: usize, f: u32) -> bool {
        let sys = self.system();
        sys.out_edges(node).iter().all(|&k| {
            let g = self.transport(f, k);
            self.truth(sys.edge(k).to, g)
        })
    }

    pub fn modal_principle(&mut self, node: usize, principle: Principle, budget: Budget) -> PrincipleReport {
        let sys = self.system();
        let mut report = PrincipleReport {
            node: sys.node_id(node).to_string(),
            principle,
            budget,
            holds: true,
            sentence: None,
            path: Vec::new(),
            reading: None,
        };
        match principle {
            Principle::Mp => {
                // Parameter-free instances first, then the boldface ones.
                let pool = self.pool(node, budget);
                let (light, bold): (Vec<u32>, Vec<u32>) =
                    pool.iter().partition(|&&f| !self.arena.has_param(f));
                for f in light.into_iter().chain(bold) {
                    if self.truth(node, f) {
                        continue;
                    }
                    let witness = sys.out_edges(node).iter().copied().find(|&k| {
                        let g = self.transport(f, k);
                        self.box_truth(sys.edge(k).to, g)
                    });
                    if let Some(k) = witness {
                        report.holds = false;
                        report.sentence = Some(self.render(node, f));
                        report.path = vec![report.node.clone(), sys.node_id(sys.edge(k).to).to_string()];
                        break;
                    }
                }
            }
            Principle::Ra => {
                report.reading = Some(RA_READING);
                let own = self.theory(node, budget);
                for n1 in successors(sys, node) {
                    let restored = successors(sys, n1)
                        .into_iter()
                        .any(|n2| self.theory(n2, budget) == own);
                    if !restored {
                        let other = self.theory(n1, budget);
                        let pool = self.sentence_pool(0, budget);
                        let i = (0..own.len()).find(|&i| own[i] != other[i]);
                        report.holds = false;
                        report.sentence = i.map(|i| self.render(node, pool[i]));
                        report.path = vec![report.node.clone(), sys.node_id(n1).to_string()];
                        break;
                    }
                }
            }
        }
        report
    }

    /// Truth values of the parameter-free pool at `node`, in pool order.
    pub(crate) fn theory(&mut self, node: usize, budget: Budget) -> Vec<bool> {
        let pool = self.sentence_pool(0, budget);
        pool.iter().map(|&f| self.truth(node, f)).collect()
    }

    /// Σ₁ pool sentences with parameters in `node` that hold in some proper
    /// descendant but fail at `node`.
    pub fn bfa_sigma1(&mut self, node: usize, budget: Budget) -> Vec<BfaViolation> {
        let sys = self.system();
        let mut out = Vec::new();
        for d in sys.reachable(node) {
            if d == node {
                continue;
            }
            let report = self
                .transfer(TransferKind::Sigma1, node, d, budget)
                .expect("descendants are reachable");
            out.extend(report.counterexamples.into_iter().map(|c| BfaViolation {
                descendant: report.upper.clone(),
                map: c.map,
                sentence: c.sentence,
            }));
        }
        out
    }
}

/// Distinct targets of the edges leaving `node`, the node itself included.
fn successors(sys: &ExtensionSystem, node: usize) -> Vec<usize> {
    let mut out: Vec<usize> = sys.out_edges(node).iter().map(|&k| sys.edge(k).to).collect();
    out.sort_unstable();
    out.dedup();
    out
}

pub fn check_modal_principle(
    sys: &ExtensionSystem,
    node: &str,
    principle: Principle,
    budget: Budget,
) -> Result<PrincipleReport, ModalError> {
    let n = sys.require_node(node)?;
    Ok(ForcingEngine::new(sys).modal_principle(n, principle, budget))
}

/// Empty exactly when `node` is Σ₁-absolute into every descendant within
/// the budget.
pub fn bfa_sigma1_report(
    sys: &ExtensionSystem,
    node: &str,
    budget: Budget,
) -> Result<Vec<BfaViolation>, ModalError> {
    let n = sys.require_node(node)?;
    Ok(ForcingEngine::new(sys).bfa_sigma1(n, budget))
}
