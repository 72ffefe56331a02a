use serde::{Deserialize, Serialize};

use super::arena::Arena;
use super::naive::naive_forces;
use crate::logic::{parse_formula, satisfies_sentence, Formula, Term};
use crate::structure::ExtensionSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Clause {
    Atomic,
    And,
    Or,
    Exists,
    Not,
}

/// One step of the forcing recursion. Which children are recorded:
/// `∧`/`∨` the first child that settles the verdict, or both; `∃` the
/// witness, or every element when there is none; `¬` the edges examined in
/// listing order, up to the first one whose target forces the body.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub node: String,
    pub sentence: String,
    pub clause: Clause,
    pub forced: bool,
    /// Set when the depth limit cut the recursion here.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub truncated: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub steps: Vec<TraceStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRef {
    pub index: usize,
    pub to: String,
    pub map: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge: Option<EdgeRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element: Option<String>,
    pub trace: Trace,
}

impl TraceStep {
    pub(crate) fn plain(trace: Trace) -> Self {
        Self {
            edge: None,
            element: None,
            trace,
        }
    }

    pub(crate) fn element(name: &str, trace: Trace) -> Self {
        Self {
            edge: None,
            element: Some(name.to_string()),
            trace,
        }
    }

    pub(crate) fn edge(sys: &ExtensionSystem, k: usize, trace: Trace) -> Self {
        let e = sys.edge(k);
        let target = sys.node(e.to);
        Self {
            edge: Some(EdgeRef {
                index: k,
                to: target.id.clone(),
                map: e.map.iter().map(|&j| target.element_name(j).to_string()).collect(),
            }),
            element: None,
            trace,
        }
    }
}

/// Re-checks a trace against the system: every step must follow from its
/// recorded children by the clause it names, atomic steps are re-evaluated,
/// and truncated steps are recomputed with the naive evaluator. Returns the
/// replayed verdict.
pub fn replay_trace(sys: &ExtensionSystem, trace: &Trace) -> Result<bool, String> {
    let mut arena = Arena::default();
    replay(sys, trace, &mut arena)
}

fn replay(sys: &ExtensionSystem, t: &Trace, arena: &mut Arena) -> Result<bool, String> {
    let at = |msg: &str| format!("{} at {}: {msg}", t.sentence, t.node);
    let node = sys
        .node_index(&t.node)
        .ok_or_else(|| at("unknown node"))?;
    let phi = parse_formula(&t.sentence, &sys.signature).map_err(|e| at(&e.to_string()))?;
    let normal = |arena: &mut Arena, target: usize, f: &Formula| -> Result<String, String> {
        let s = sys.node(target);
        let id = arena.compile(s, f).map_err(|e| at(&e.to_string()))?;
        Ok(arena.decompile(s, id).render(&sys.signature))
    };
    let expect_child = |arena: &mut Arena, step: &TraceStep, target: usize, f: &Formula| {
        let want = normal(arena, target, f)?;
        let got = normal(arena, target, &parse_child(sys, step)?)?;
        if want != got || step.trace.node != sys.node_id(target) {
            return Err(at(&format!("unexpected child `{}`", step.trace.sentence)));
        }
        replay(sys, &step.trace, arena).and_then(|v| {
            if v == step.trace.forced {
                Ok(v)
            } else {
                Err(at("child verdict does not replay"))
            }
        })
    };
    let clause = match &phi {
        Formula::Atom(..) | Formula::Equal(..) => Clause::Atomic,
        Formula::Not(_) => Clause::Not,
        Formula::And(..) => Clause::And,
        Formula::Or(..) => Clause::Or,
        Formula::Exists(..) => Clause::Exists,
    };
    if clause != t.clause {
        return Err(at("clause does not match the sentence"));
    }
    let verdict = if clause == Clause::Atomic {
        satisfies_sentence(sys.node(node), &phi).map_err(|e| at(&e.to_string()))?
    } else if t.truncated {
        naive_forces(sys, node, &phi).map_err(|e| at(&e.to_string()))?
    } else {
        match &phi {
            Formula::And(a, b) | Formula::Or(a, b) => {
                let is_and = clause == Clause::And;
                let mut vals = Vec::new();
                for (step, part) in t.steps.iter().zip([a, b]) {
                    vals.push(expect_child(arena, step, node, part)?);
                }
                match (is_and, vals.as_slice()) {
                    (true, [false]) => false,
                    (true, [true, v]) => *v,
                    (false, [true]) => true,
                    (false, [false, v]) => *v,
                    _ => return Err(at("wrong number of children")),
                }
            }
            Formula::Exists(v, body) => {
                let s = sys.node(node);
                let mut hit = false;
                let mut last = None;
                for step in &t.steps {
                    let name = step.element.as_deref().ok_or_else(|| at("missing element"))?;
                    let a = s.element(name).ok_or_else(|| at("unknown element"))?;
                    if last.is_some_and(|l| a <= l) {
                        return Err(at("elements out of order"));
                    }
                    last = Some(a);
                    let inst = body.substitute_var(v, &Term::Param(name.to_string()));
                    hit = expect_child(arena, step, node, &inst)?;
                }
                let complete = t.steps.len() == s.size();
                match (hit, t.steps.len(), complete) {
                    (true, 1, _) => true,
                    (false, _, true) => false,
                    _ => return Err(at("witness list inconsistent with verdict")),
                }
            }
            Formula::Not(g) => {
                let out = sys.out_edges(node);
                let mut hit = false;
                for (i, step) in t.steps.iter().enumerate() {
                    let e = step.edge.as_ref().ok_or_else(|| at("missing edge"))?;
                    if out.get(i) != Some(&e.index) {
                        return Err(at("edges out of order"));
                    }
                    if hit {
                        return Err(at("edges listed past a witness"));
                    }
                    let target = sys.edge(e.index).to;
                    hit = expect_child(arena, step, target, &sys.transport(e.index, g))?;
                }
                match (hit, t.steps.len() == out.len()) {
                    (true, _) => false,
                    (false, true) => true,
                    (false, false) => return Err(at("not every edge examined")),
                }
            }
            Formula::Atom(..) | Formula::Equal(..) => unreachable!("atomic handled above"),
        }
    };
    if verdict != t.forced {
        return Err(at("recorded verdict does not replay"));
    }
    Ok(verdict)
}

fn parse_child(sys: &ExtensionSystem, step: &TraceStep) -> Result<Formula, String> {
    parse_formula(&step.trace.sentence, &sys.signature).map_err(|e| e.to_string())
}
