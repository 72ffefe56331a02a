use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ForcingEngine, ForcingError};
use crate::logic::{satisfies_sentence, Budget, Formula, QuantifierClass};
use crate::structure::ExtensionSystem;

/// Which sentences must transfer from an upper node down to a lower one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransferKind {
    /// All sentences, both directions.
    Elementary,
    /// Σ₁ sentences true above are true below.
    Sigma1,
    /// Π₂ sentences true above are true below.
    Pi2,
}

impl TransferKind {
    fn admits(self, class: QuantifierClass) -> bool {
        match self {
            TransferKind::Elementary => true,
            TransferKind::Sigma1 => class.is_sigma1(),
            TransferKind::Pi2 => class.is_pi2(),
        }
    }
}

impl FromStr for TransferKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "elementary" => Ok(TransferKind::Elementary),
            "sigma1" => Ok(TransferKind::Sigma1),
            "pi2" => Ok(TransferKind::Pi2),
            other => Err(format!("unknown transfer kind `{other}`")),
        }
    }
}

impl fmt::Display for TransferKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransferKind::Elementary => "elementary",
            TransferKind::Sigma1 => "sigma1",
            TransferKind::Pi2 => "pi2",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransferCounterexample {
    /// Image of each element of the lower node, by name.
    pub map: Vec<String>,
    pub sentence: String,
    pub lower_value: bool,
    pub upper_value: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransferReport {
    pub kind: TransferKind,
    pub lower: String,
    pub upper: String,
    pub budget: Budget,
    pub holds: bool,
    pub maps_checked: usize,
    pub counterexamples: Vec<TransferCounterexample>,
}

impl ForcingEngine<'_> {
    /// Checks transfer along every listed edge `lower → upper`, or along the
    /// first path found when no direct edge is listed.
    pub fn transfer(
        &mut self,
        kind: TransferKind,
        lower: usize,
        upper: usize,
        budget: Budget,
    ) -> Result<TransferReport, ForcingError> {
        let sys = self.system();
        let mut keys: Vec<u32> = sys
            .out_edges(lower)
            .iter()
            .copied()
            .filter(|&k| sys.edge(k).to == upper)
            .map(|k| k as u32)
            .collect();
        if keys.is_empty() {
            let map = sys.path_map(lower, upper).ok_or_else(|| ForcingError::NoPath {
                lower: sys.node_id(lower).to_string(),
                upper: sys.node_id(upper).to_string(),
            })?;
            keys.push(self.register_map(map));
        }
        let pool = self.pool(lower, budget);
        let mut counterexamples = Vec::new();
        for &f in pool.iter() {
            if kind != TransferKind::Elementary && !kind.admits(self.class(f)) {
                continue;
            }
            let below = self.truth(lower, f);
            for &key in &keys {
                let g = self.map_by(f, key);
                let above = self.truth(upper, g);
                let fails = match kind {
                    TransferKind::Elementary => below != above,
                    _ => above && !below,
                };
                if fails {
                    let target = sys.node(upper);
                    let map = self.key_map(key);
                    counterexamples.push(TransferCounterexample {
                        map: map.iter().map(|&j| target.element_name(j).to_string()).collect(),
                        sentence: self.render(lower, f),
                        lower_value: below,
                        upper_value: above,
                    });
                }
            }
        }
        Ok(TransferReport {
            kind,
            lower: sys.node_id(lower).to_string(),
            upper: sys.node_id(upper).to_string(),
            budget,
            holds: counterexamples.is_empty(),
            maps_checked: keys.len(),
            counterexamples,
        })
    }
}

pub fn check_transfer(
    sys: &ExtensionSystem,
    kind: TransferKind,
    lower: &str,
    upper: &str,
    budget: Budget,
) -> Result<TransferReport, ForcingError> {
    let (l, u) = (sys.require_node(lower)?, sys.require_node(upper)?);
    ForcingEngine::new(sys).transfer(kind, l, u, budget)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PersistenceReport {
    pub sentence: String,
    pub holds: bool,
    /// First edge `(from, to)` along which the sentence stops holding.
    pub counterexample: Option<(String, String)>,
}

/// Whether a parameter-free sentence, once true at a node, stays true along
/// every edge.
pub fn is_persistent(sys: &ExtensionSystem, phi: &Formula) -> Result<PersistenceReport, ForcingError> {
    let params = phi.params();
    if !params.is_empty() {
        return Err(ForcingError::HasParameters(params));
    }
    let truth = sys
        .nodes()
        .iter()
        .map(|s| satisfies_sentence(s, phi))
        .collect::<Result<Vec<_>, _>>()?;
    let counterexample = sys
        .edges()
        .iter()
        .find(|e| truth[e.from] && !truth[e.to])
        .map(|e| (sys.node_id(e.from).to_string(), sys.node_id(e.to).to_string()));
    Ok(PersistenceReport {
        sentence: phi.render(&sys.signature),
        holds: counterexample.is_none(),
        counterexample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::logic::parse_formula;

    #[test]
    fn transfer_examples() {
        let sys = fixtures::order_class(&[1, 2]);
        let b = Budget::new(4);
        let r = check_transfer(&sys, TransferKind::Sigma1, "L1", "L2", b).unwrap();
        assert!(!r.holds);
        assert!(r
            .counterexamples
            .iter()
            .any(|c| c.sentence == "E x0. E x1. x0 < x1"));
        assert_eq!(r.maps_checked, 2);
        let same = check_transfer(&sys, TransferKind::Elementary, "L2", "L2", b).unwrap();
        assert!(same.holds);
        assert!(matches!(
            check_transfer(&sys, TransferKind::Pi2, "L2", "L1", b),
            Err(ForcingError::NoPath { .. })
        ));
    }

    #[test]
    fn composite_paths_are_used() {
        let text = r#"{
            "signature": {"relations": [{"name": "<", "arity": 2}]},
            "structures": [
                {"id": "A", "universe": [0]},
                {"id": "B", "universe": [0, 1], "relations": {"<": [[0, 1]]}}
            ],
            "extensions": [
                {"from": "A", "to": "A", "map": {"0": 0}},
                {"from": "B", "to": "B", "map": {"0": 0, "1": 1}},
                {"from": "A", "to": "B", "map": {"0": 1}}
            ]
        }"#;
        let sys = ExtensionSystem::from_json(text).unwrap();
        let r = check_transfer(&sys, TransferKind::Sigma1, "A", "B", Budget::new(3)).unwrap();
        assert_eq!(r.maps_checked, 1);
        assert!(r.counterexamples.iter().all(|c| c.map == ["1"]));
    }

    #[test]
    fn persistence_examples() {
        let sys = fixtures::order_class(&[1, 2, 3]);
        let p = |t: &str| parse_formula(t, &sys.signature).unwrap();
        assert!(is_persistent(&sys, &p("E x. E y. x < y")).unwrap().holds);
        let r = is_persistent(&sys, &p("!(E x. E y. x < y)")).unwrap();
        assert!(!r.holds);
        assert_eq!(r.counterexample, Some(("L1".into(), "L2".into())));
        assert!(matches!(
            is_persistent(&sys, &p("E y. #0 < y")),
            Err(ForcingError::HasParameters(_))
        ));
        let single = fixtures::order_class(&[2]);
        assert!(is_persistent(&single, &p("!(E x. E y. x < y)")).unwrap().holds);
    }
}
