use rayon::prelude::*;
use serde::Serialize;

use super::{compute_embeddings, ExtensionSystem, StructureError};
use crate::logic::{satisfies_sentence, Budget};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CofinalityWitness {
    pub from: String,
    pub to: String,
    /// `map[i]` is the image of the i-th element of `from`, by name.
    pub map: Vec<String>,
}

/// Outcome of [`mutually_cofinal`]. `forward` holds one witness per node of
/// the first system that embeds into the second, `backward` the converse.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CofinalityReport {
    pub holds: bool,
    pub forward: Vec<CofinalityWitness>,
    pub backward: Vec<CofinalityWitness>,
    /// Nodes with no embedding into the other system, prefixed by `s:`/`t:`.
    pub unmatched: Vec<String>,
}

/// Checks that every node of `s` embeds into some node of `t` and conversely.
pub fn mutually_cofinal(
    s: &ExtensionSystem,
    t: &ExtensionSystem,
) -> Result<CofinalityReport, StructureError> {
    if s.signature != t.signature {
        return Err(StructureError::SignatureMismatch);
    }
    let mut unmatched = Vec::new();
    let forward = witnesses(s, t, "s", &mut unmatched);
    let backward = witnesses(t, s, "t", &mut unmatched);
    Ok(CofinalityReport {
        holds: unmatched.is_empty(),
        forward,
        backward,
        unmatched,
    })
}

fn witnesses(
    a: &ExtensionSystem,
    b: &ExtensionSystem,
    side: &str,
    unmatched: &mut Vec<String>,
) -> Vec<CofinalityWitness> {
    let mut out = Vec::new();
    for x in a.nodes() {
        let found = b.nodes().iter().find_map(|y| {
            compute_embeddings(&a.signature, x, y)
                .into_iter()
                .next()
                .map(|m| (y, m))
        });
        match found {
            Some((y, m)) => out.push(CofinalityWitness {
                from: x.id.clone(),
                to: y.id.clone(),
                map: m.iter().map(|&j| y.element_name(j).to_string()).collect(),
            }),
            None => unmatched.push(format!("{side}:{}", x.id)),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransportCounterexample {
    pub from: String,
    pub to: String,
    pub map: Vec<String>,
    pub sentence: String,
    /// Truth value at the source; the target has the opposite value.
    pub source_value: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelCompletenessReport {
    pub holds: bool,
    pub budget: Budget,
    pub counterexamples: Vec<TransportCounterexample>,
}

/// Checks that every edge preserves the truth of every budget sentence with
/// parameters from its source. Identity edges are skipped.
pub fn check_model_complete(sys: &ExtensionSystem, budget: Budget) -> ModelCompletenessReport {
    let sig = &sys.signature;
    let pools: Vec<_> = (0..sys.nodes().len())
        .into_par_iter()
        .map(|i| budget.pool(sig, sys.params(i)))
        .collect();
    let per_edge: Vec<Vec<TransportCounterexample>> = sys
        .edges()
        .par_iter()
        .enumerate()
        .filter(|(_, e)| !e.is_identity())
        .map(|(k, e)| {
            let (a, b) = (sys.node(e.from), sys.node(e.to));
            let mut found = Vec::new();
            for phi in &pools[e.from] {
                let here = satisfies_sentence(a, phi).expect("pool sentences are well formed");
                let there = satisfies_sentence(b, &sys.transport(k, phi))
                    .expect("transported sentences are well formed");
                if here != there {
                    found.push(TransportCounterexample {
                        from: a.id.clone(),
                        to: b.id.clone(),
                        map: e.map.iter().map(|&j| b.element_name(j).to_string()).collect(),
                        sentence: phi.render(sig),
                        source_value: here,
                    });
                }
            }
            found
        })
        .collect();
    let counterexamples: Vec<_> = per_edge.into_iter().flatten().collect();
    ModelCompletenessReport {
        holds: counterexamples.is_empty(),
        budget,
        counterexamples,
    }
}
