use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::ExtensionSystem;

/// Chains are enumerated exhaustively when there are at most this many.
const EXHAUSTIVE_LIMIT: u128 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LowerBound {
    pub node: String,
    /// Index of the edge from the last chain node into `node`.
    pub edge: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainResult {
    pub nodes: Vec<String>,
    pub edges: Vec<usize>,
    pub lower_bound: Option<LowerBound>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainProbeReport {
    pub chain_length: usize,
    pub seed: u64,
    pub kappa: Option<u64>,
    pub exhaustive: bool,
    pub directed: bool,
    pub chains: Vec<ChainResult>,
}

/// Probes chains of non-identity edges of length `1..=chain_length` for a
/// common lower bound: a node `R` with an edge `g` from the last node such
/// that `g` composed with every tail of the chain is a listed edge.
///
/// With `kappa` set, chains only use edges whose size label is at most
/// `kappa`; unlabelled edges are always admitted. All chains are checked
/// when there are at most 10⁴ of them, otherwise `sample_count` seeded
/// random walks are.
pub fn sigma_closed_probe(
    sys: &ExtensionSystem,
    chain_length: usize,
    sample_count: usize,
    seed: u64,
    kappa: Option<u64>,
) -> ChainProbeReport {
    let admissible = |k: usize| {
        let e = sys.edge(k);
        !e.is_identity() && kappa.is_none_or(|b| e.size.is_none_or(|s| s <= b))
    };
    let steps: Vec<Vec<usize>> = (0..sys.nodes().len())
        .map(|i| sys.out_edges(i).iter().copied().filter(|&k| admissible(k)).collect())
        .collect();

    let total = count_paths(sys, &steps, chain_length);
    let exhaustive = total <= EXHAUSTIVE_LIMIT;
    let mut paths: Vec<(usize, Vec<usize>)> = Vec::new();
    if exhaustive {
        for start in 0..sys.nodes().len() {
            let mut path = Vec::new();
            collect_paths(sys, &steps, start, start, chain_length, &mut path, &mut paths);
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let starts: Vec<usize> = (0..steps.len()).filter(|&i| !steps[i].is_empty()).collect();
        for _ in 0..sample_count {
            let start = starts[rng.gen_range(0..starts.len())];
            let len = rng.gen_range(1..=chain_length);
            let mut path = Vec::with_capacity(len);
            let mut at = start;
            while path.len() < len && !steps[at].is_empty() {
                let k = steps[at][rng.gen_range(0..steps[at].len())];
                path.push(k);
                at = sys.edge(k).to;
            }
            paths.push((start, path));
        }
    }

    let chains: Vec<ChainResult> = paths
        .into_iter()
        .map(|(start, edges)| {
            let mut nodes = vec![sys.node_id(start).to_string()];
            nodes.extend(edges.iter().map(|&k| sys.node_id(sys.edge(k).to).to_string()));
            let lower_bound = lower_bound(sys, start, &edges);
            ChainResult {
                nodes,
                edges,
                lower_bound,
            }
        })
        .collect();
    ChainProbeReport {
        chain_length,
        seed,
        kappa,
        exhaustive,
        directed: chains.iter().all(|c| c.lower_bound.is_some()),
        chains,
    }
}

fn count_paths(sys: &ExtensionSystem, steps: &[Vec<usize>], max_len: usize) -> u128 {
    // ending[i] = number of paths of the current length ending at node i
    let mut ending = vec![1u128; steps.len()];
    let mut total = 0u128;
    for _ in 0..max_len {
        let mut next = vec![0u128; steps.len()];
        for (i, out) in steps.iter().enumerate() {
            for &k in out {
                let t = sys.edge(k).to;
                next[t] = next[t].saturating_add(ending[i]);
            }
        }
        total = next.iter().fold(total, |acc, x| acc.saturating_add(*x));
        if total > EXHAUSTIVE_LIMIT {
            return total;
        }
        ending = next;
    }
    total
}

fn collect_paths(
    sys: &ExtensionSystem,
    steps: &[Vec<usize>],
    start: usize,
    at: usize,
    remaining: usize,
    path: &mut Vec<usize>,
    out: &mut Vec<(usize, Vec<usize>)>,
) {
    if remaining == 0 {
        return;
    }
    for &k in &steps[at] {
        path.push(k);
        out.push((start, path.clone()));
        collect_paths(sys, steps, start, sys.edge(k).to, remaining - 1, path, out);
        path.pop();
    }
}

fn lower_bound(sys: &ExtensionSystem, start: usize, edges: &[usize]) -> Option<LowerBound> {
    // Element maps from each chain node into the last one.
    let last = edges.last().map_or(start, |&k| sys.edge(k).to);
    let mut nodes = vec![start];
    nodes.extend(edges.iter().map(|&k| sys.edge(k).to));
    let mut into_last: Vec<Vec<usize>> = vec![(0..sys.node(last).size()).collect()];
    for &k in edges.iter().rev() {
        let e = sys.edge(k);
        let tail = into_last.last().expect("seeded above");
        let m = e.map.iter().map(|&x| tail[x]).collect();
        into_last.push(m);
    }
    into_last.reverse();
    sys.out_edges(last).iter().copied().find_map(|g| {
        let ge = sys.edge(g);
        let ok = nodes.iter().zip(&into_last).all(|(&n, m)| {
            let composite: Vec<usize> = m.iter().map(|&x| ge.map[x]).collect();
            sys.find_edge(n, ge.to, &composite).is_some()
        });
        ok.then(|| LowerBound {
            node: sys.node_id(ge.to).to_string(),
            edge: g,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn single_node_is_directed() {
        let sys =
            ExtensionSystem::auto(fixtures::order_signature(), vec![fixtures::linear_order(2)])
                .unwrap();
        let r = sigma_closed_probe(&sys, 3, 10, 0, None);
        assert!(r.directed && r.exhaustive && r.chains.is_empty());
    }

    #[test]
    fn linear_orders_are_directed() {
        let nodes = (1..=4).map(fixtures::linear_order).collect();
        let sys = ExtensionSystem::auto(fixtures::order_signature(), nodes).unwrap();
        let r = sigma_closed_probe(&sys, 3, 10, 7, None);
        assert!(r.exhaustive && r.directed);
        assert!(r.chains.iter().any(|c| c.nodes == ["L1", "L2", "L3", "L4"]));
    }

    #[test]
    fn sampling_is_seeded() {
        let sys = fixtures::graph_system(4);
        let a = sigma_closed_probe(&sys, 6, 25, 11, None);
        let b = sigma_closed_probe(&sys, 6, 25, 11, None);
        assert!(!a.exhaustive);
        assert_eq!(a, b);
        assert_eq!(a.chains.len(), 25);
    }

    #[test]
    fn broken_closure_is_caught() {
        // A -> B and A -> C with no common extension: chains are fine, but
        // a system whose composites are missing has no lower bound.
        let text = r#"{
            "signature": {"relations": [{"name": "<", "arity": 2}]},
            "structures": [
                {"id": "A", "universe": [0]},
                {"id": "B", "universe": [0, 1], "relations": {"<": [[0, 1]]}},
                {"id": "C", "universe": [0, 1, 2], "relations": {"<": [[0, 1], [0, 2], [1, 2]]}}
            ],
            "extensions": [
                {"from": "A", "to": "A", "map": {"0": 0}},
                {"from": "B", "to": "B", "map": {"0": 0, "1": 1}},
                {"from": "C", "to": "C", "map": {"0": 0, "1": 1, "2": 2}},
                {"from": "A", "to": "B", "map": {"0": 0}},
                {"from": "B", "to": "C", "map": {"0": 0, "1": 1}}
            ]
        }"#;
        let sys = ExtensionSystem::from_json_unchecked(text).unwrap();
        let r = sigma_closed_probe(&sys, 2, 1, 0, None);
        assert!(!r.directed);
        let bad: Vec<_> = r.chains.iter().filter(|c| c.lower_bound.is_none()).collect();
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].nodes, ["A", "B", "C"]);
    }

    #[test]
    fn kappa_restricts_edges() {
        let text = r#"{
            "signature": {"relations": [{"name": "<", "arity": 2}]},
            "structures": [
                {"id": "A", "universe": [0]},
                {"id": "B", "universe": [0, 1], "relations": {"<": [[0, 1]]}}
            ],
            "extensions": [
                {"from": "A", "to": "A", "map": {"0": 0}},
                {"from": "B", "to": "B", "map": {"0": 0, "1": 1}},
                {"from": "A", "to": "B", "map": {"0": 0}, "size": 5}
            ]
        }"#;
        let sys = ExtensionSystem::from_json(text).unwrap();
        assert_eq!(sigma_closed_probe(&sys, 2, 1, 0, Some(4)).chains.len(), 0);
        assert_eq!(sigma_closed_probe(&sys, 2, 1, 0, Some(5)).chains.len(), 1);
    }
}
