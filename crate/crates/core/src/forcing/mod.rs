//! Robinson's infinite forcing over an extension system.
//!
//! `N ⊩ φ` is computed by recursion on the sentence:
//! atomic sentences are forced iff true in `N`; `∧` and `∨` are forced
//! componentwise; `∃x φ` is forced iff `φ(a)` is forced for some element
//! `a`; and `¬φ` is forced iff no edge `N → Q` has `Q ⊩ φ` with parameters
//! carried along the edge.

mod arena;
mod engine;
mod generic;
mod naive;
mod trace;
mod transfer;

pub use engine::ForcingEngine;
pub use generic::{build_generic, is_generic, GenericPath, GenericStep, GenericityReport};
pub use naive::naive_forces;
pub use trace::{replay_trace, Clause, EdgeRef, Trace, TraceStep};
pub use transfer::{
    check_transfer, is_persistent, PersistenceReport, TransferKind, TransferReport,
};

use serde::Serialize;
use thiserror::Error;

use crate::logic::{Formula, LogicError};
use crate::structure::{ExtensionSystem, StructureError};

#[derive(Debug, Error)]
pub enum ForcingError {
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
    #[error("move cap of {cap} exceeded")]
    MoveCapExceeded { cap: usize },
    #[error("no path from `{lower}` to `{upper}`")]
    NoPath { lower: String, upper: String },
    #[error("sentence has parameters: {0:?}")]
    HasParameters(Vec<String>),
}

/// Outcome of a forcing query with its derivation trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ForcingVerdict {
    pub node: String,
    pub sentence: String,
    #[serde(serialize_with = "verdict_word")]
    #[serde(rename = "verdict")]
    pub forced: bool,
    pub trace: Trace,
}

fn verdict_word<S: serde::Serializer>(forced: &bool, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(if *forced { "forced" } else { "not-forced" })
}

/// One-shot query: does node `node` force `phi`? The trace is recorded to
/// `trace_depth` levels.
pub fn forces(
    sys: &ExtensionSystem,
    node: &str,
    phi: &Formula,
    trace_depth: usize,
) -> Result<ForcingVerdict, ForcingError> {
    let n = sys.require_node(node)?;
    ForcingEngine::new(sys).verdict(n, phi, trace_depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::logic::parse_formula;

    fn l12() -> ExtensionSystem {
        fixtures::order_class(&[1, 2])
    }

    fn parse(sys: &ExtensionSystem, text: &str) -> Formula {
        parse_formula(text, &sys.signature).unwrap()
    }

    #[test]
    fn two_chain_examples() {
        let sys = l12();
        let phi = parse(&sys, "E x. E y. x < y");
        assert!(forces(&sys, "L2", &phi, 8).unwrap().forced);
        assert!(!forces(&sys, "L1", &phi, 8).unwrap().forced);
        let neg = parse(&sys, "!(E x. E y. x < y)");
        assert!(!forces(&sys, "L1", &neg, 8).unwrap().forced);
        let p = parse(&sys, "!(E y. #0 < y)");
        assert!(!forces(&sys, "L1", &p, 8).unwrap().forced);
    }

    #[test]
    fn errors() {
        let sys = l12();
        let p = parse(&sys, "E y. #7 < y");
        assert!(matches!(
            forces(&sys, "L1", &p, 1),
            Err(ForcingError::Logic(LogicError::DanglingParameter { .. }))
        ));
        assert!(matches!(
            forces(&sys, "L9", &p, 1),
            Err(ForcingError::Structure(StructureError::UnknownNode(_)))
        ));
    }

    #[test]
    fn traces_replay() {
        let sys = fixtures::order_class(&[1, 2, 3]);
        for text in [
            "E x. E y. x < y",
            "!(E x. E y. x < y)",
            "!!(E x. E y. x < y)",
            "A x. E y. x < y | y < x | x = y",
            "E x. !(E y. y < x)",
            "!(E y. #0 < y) & E x. x = x",
        ] {
            let phi = parse(&sys, text);
            for node in ["L1", "L2", "L3"] {
                if phi.params().iter().any(|p| sys.node(sys.node_index(node).unwrap()).element(p).is_none()) {
                    continue;
                }
                for depth in [0, 1, 3, 12] {
                    let v = forces(&sys, node, &phi, depth).unwrap();
                    assert_eq!(replay_trace(&sys, &v.trace), Ok(v.forced), "{text} at {node}");
                }
            }
        }
    }

    #[test]
    fn tampered_trace_is_rejected() {
        let sys = l12();
        let phi = parse(&sys, "!(E x. E y. x < y)");
        let mut v = forces(&sys, "L1", &phi, 8).unwrap();
        v.trace.forced = !v.trace.forced;
        assert!(replay_trace(&sys, &v.trace).is_err());
        let mut w = forces(&sys, "L1", &phi, 8).unwrap();
        w.trace.steps.truncate(0);
        assert!(replay_trace(&sys, &w.trace).is_err());
    }

    #[test]
    fn verdict_json_shape() {
        let sys = l12();
        let v = forces(&sys, "L2", &parse(&sys, "E x. E y. x < y"), 2).unwrap();
        let j = serde_json::to_value(&v).unwrap();
        assert_eq!(j["verdict"], "forced");
        assert_eq!(j["node"], "L2");
        assert_eq!(j["trace"]["clause"], "exists");
    }

    #[test]
    fn engine_matches_naive_on_small_classes() {
        for (name, sys) in fixtures::corpus().into_iter().take(12) {
            let mut engine = ForcingEngine::new(&sys);
            for n in 0..sys.nodes().len() {
                let pool = crate::logic::Budget::new(5)
                    .with_param_size(4)
                    .pool(&sys.signature, sys.params(n));
                for phi in &pool {
                    let neg = Formula::not(phi.clone());
                    for f in [phi, &neg] {
                        assert_eq!(
                            engine.forces(n, f).unwrap(),
                            naive_forces(&sys, n, f).unwrap(),
                            "{name}: {}",
                            f.render(&sys.signature)
                        );
                    }
                }
            }
        }
    }
}
