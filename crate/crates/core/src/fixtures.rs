//! Generators for small structures and extension systems: linear orders,
//! antichains, graphs up to size 5 and a corpus of small classes used by the
//! exhaustive checks.

use crate::logic::{RelationDecl, Signature, Structure};
use crate::structure::{Embedding, ExtensionSystem};

pub fn order_signature() -> Signature {
    Signature::relational(&[("<", 2)])
}

/// `<` plus a constant `c`.
pub fn pointed_order_signature() -> Signature {
    Signature::new(
        vec![RelationDecl {
            name: "<".into(),
            arity: 2,
        }],
        vec!["c".into()],
    )
    .expect("fixed signature")
}

pub fn graph_signature() -> Signature {
    Signature::relational(&[("E", 2)])
}

pub fn unary_signature() -> Signature {
    Signature::relational(&[("R", 1)])
}

fn order_tuples(n: usize) -> Vec<Vec<usize>> {
    let mut t = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            t.push(vec![i, j]);
        }
    }
    t
}

/// The strict linear order `0 < 1 < … < n-1`, named `L{n}`.
pub fn linear_order(n: usize) -> Structure {
    Structure::from_indices(&order_signature(), format!("L{n}"), n, &[order_tuples(n)], &[])
        .expect("valid order")
}

/// `n` incomparable points, named `A{n}`.
pub fn antichain(n: usize) -> Structure {
    Structure::from_indices(&order_signature(), format!("A{n}"), n, &[vec![]], &[])
        .expect("valid antichain")
}

/// `L{n}` with the constant naming element `c`, named `L{n}c{c}`.
pub fn pointed_linear_order(n: usize, c: usize) -> Structure {
    Structure::from_indices(
        &pointed_order_signature(),
        format!("L{n}c{c}"),
        n,
        &[order_tuples(n)],
        &[c],
    )
    .expect("valid pointed order")
}

/// `n` points of which the first `k` satisfy `R`, named `U{n}r{k}`.
pub fn unary(n: usize, k: usize) -> Structure {
    let r = (0..k).map(|i| vec![i]).collect();
    Structure::from_indices(&unary_signature(), format!("U{n}r{k}"), n, &[r], &[])
        .expect("valid unary structure")
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut p = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            p.push((i, j));
        }
    }
    p
}

/// The simple graph on `n` vertices whose edge set is selected by `mask`
/// over the pairs `(i, j)`, `i < j`, in lexicographic order.
pub fn graph(n: usize, mask: u32) -> Structure {
    let mut t = Vec::new();
    for (b, (i, j)) in pairs(n).into_iter().enumerate() {
        if mask >> b & 1 == 1 {
            t.push(vec![i, j]);
            t.push(vec![j, i]);
        }
    }
    t.sort();
    Structure::from_indices(&graph_signature(), format!("G{n}m{mask}"), n, &[t], &[])
        .expect("valid graph")
}

/// All labelled simple graphs with 1 to `n` vertices.
pub fn all_graphs(n: usize) -> Vec<Structure> {
    let mut out = Vec::new();
    for k in 1..=n {
        for mask in 0..1u32 << pairs(k).len() {
            out.push(graph(k, mask));
        }
    }
    out
}

/// One graph per isomorphism type with 1 to `n` vertices (`n ≤ 5`), each
/// represented by its least edge mask.
pub fn graphs_up_to_iso(n: usize) -> Vec<Structure> {
    assert!(n <= 5, "graph fixtures stop at 5 vertices");
    let mut out = Vec::new();
    for k in 1..=n {
        let ps = pairs(k);
        let perms = injections(k, k);
        let mut seen = std::collections::HashSet::new();
        for mask in 0..1u32 << ps.len() {
            let canon = perms
                .iter()
                .map(|p| {
                    let mut m = 0u32;
                    for (b, &(i, j)) in ps.iter().enumerate() {
                        if mask >> b & 1 == 1 {
                            let (x, y) = (p[i].min(p[j]), p[i].max(p[j]));
                            let idx = ps.iter().position(|&q| q == (x, y)).expect("pair");
                            m |= 1 << idx;
                        }
                    }
                    m
                })
                .min()
                .expect("at least one permutation");
            if seen.insert(canon) {
                out.push(graph(k, canon));
            }
        }
    }
    out
}

/// Auto-mode system over all graph types with 1 to `n` vertices.
pub fn graph_system(n: usize) -> ExtensionSystem {
    ExtensionSystem::auto(graph_signature(), graphs_up_to_iso(n)).expect("distinct ids")
}

/// All injective maps `0..n → 0..m`, lexicographically ordered.
pub fn injections(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for x in 0..m {
            if !cur.contains(&x) {
                cur.push(x);
                go(n, m, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(n, m, &mut Vec::new(), &mut out);
    out
}

/// Auto-mode class of linear orders with the given sizes.
pub fn order_class(sizes: &[usize]) -> ExtensionSystem {
    ExtensionSystem::auto(
        order_signature(),
        sizes.iter().map(|&n| linear_order(n)).collect(),
    )
    .expect("distinct sizes")
}

/// Linear orders with only end-extension edges (`i ↦ i`), an explicit
/// multiverse that is reflexive and composition closed.
pub fn end_extension_orders(sizes: &[usize]) -> ExtensionSystem {
    let nodes: Vec<Structure> = sizes.iter().map(|&n| linear_order(n)).collect();
    let mut edges = Vec::new();
    for (i, &a) in sizes.iter().enumerate() {
        for (j, &b) in sizes.iter().enumerate() {
            if a <= b {
                edges.push(Embedding {
                    from: i,
                    to: j,
                    map: (0..a).collect(),
                    forcing: Some("end".into()),
                    size: Some((b - a + 1) as u64),
                });
            }
        }
    }
    ExtensionSystem::explicit(order_signature(), nodes, edges).expect("closed by construction")
}

/// A root with two incomparable one-point extensions: `U1r0` into `U2r1`
/// (new point in `R`) and into `U2r0` (new point outside `R`).
pub fn fork() -> ExtensionSystem {
    let sig = unary_signature();
    let root = Structure::from_indices(&sig, "root", 1, &[vec![]], &[]).expect("root");
    let yes = Structure::from_indices(&sig, "yes", 2, &[vec![vec![1]]], &[]).expect("yes");
    let no = Structure::from_indices(&sig, "no", 2, &[vec![]], &[]).expect("no");
    let id = |i: usize, n: usize| Embedding {
        from: i,
        to: i,
        map: (0..n).collect(),
        forcing: None,
        size: None,
    };
    let into = |j: usize| Embedding {
        from: 0,
        to: j,
        map: vec![0],
        forcing: None,
        size: None,
    };
    let edges = vec![id(0, 1), id(1, 2), id(2, 2), into(1), into(2)];
    ExtensionSystem::explicit(sig, vec![root, yes, no], edges).expect("closed by construction")
}

/// Small named systems, each with at most 6 nodes of size at most 4.
pub fn corpus() -> Vec<(String, ExtensionSystem)> {
    let mut out: Vec<(String, ExtensionSystem)> = Vec::new();
    for sizes in [
        &[1][..],
        &[1, 2],
        &[1, 2, 3],
        &[1, 2, 3, 4],
        &[2, 3],
        &[1, 3],
        &[3],
    ] {
        out.push((format!("orders{sizes:?}"), order_class(sizes)));
    }
    out.push((
        "end-orders[1, 2, 3]".into(),
        end_extension_orders(&[1, 2, 3]),
    ));
    out.push(("end-orders[1, 3, 4]".into(), end_extension_orders(&[1, 3, 4])));
    // Sentences of size 9 cannot tell A3 from A4, so both are generic and
    // joined by edges.
    let sets = (1..=4).map(antichain).collect();
    out.push((
        "antichains[1, 2, 3, 4]".into(),
        ExtensionSystem::auto(order_signature(), sets).expect("ids"),
    ));
    let mixed = vec![linear_order(1), antichain(2), linear_order(2), antichain(3)];
    out.push((
        "orders-antichains".into(),
        ExtensionSystem::auto(order_signature(), mixed).expect("ids"),
    ));
    let pointed = vec![
        pointed_linear_order(1, 0),
        pointed_linear_order(2, 0),
        pointed_linear_order(2, 1),
        pointed_linear_order(3, 1),
    ];
    out.push((
        "pointed-orders".into(),
        ExtensionSystem::auto(pointed_order_signature(), pointed).expect("ids"),
    ));
    for spec in [
        &[(1, 0), (2, 1), (3, 1)][..],
        &[(1, 0), (2, 0), (2, 1), (2, 2)],
        &[(1, 1), (2, 1), (3, 2), (4, 2)],
        &[(2, 1), (3, 1), (3, 2), (4, 1), (4, 2), (4, 3)],
    ] {
        let nodes = spec.iter().map(|&(n, k)| unary(n, k)).collect();
        out.push((
            format!("unary{spec:?}"),
            ExtensionSystem::auto(unary_signature(), nodes).expect("ids"),
        ));
    }
    out.push(("fork".into(), fork()));
    for masks in [
        &[(1, 0), (2, 0), (2, 1)][..],
        &[(1, 0), (2, 1), (3, 7)],
        &[(1, 0), (2, 0), (3, 0), (3, 1)],
        &[(1, 0), (2, 1), (3, 3), (4, 11)],
        &[(2, 0), (2, 1), (3, 1), (3, 3)],
    ] {
        let nodes = masks.iter().map(|&(n, m)| graph(n, m)).collect();
        out.push((
            format!("graphs{masks:?}"),
            ExtensionSystem::auto(graph_signature(), nodes).expect("ids"),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::check_extension_system;

    #[test]
    fn graph_type_counts() {
        // 1, 2, 4, 11, 34 graphs on 1..=5 vertices up to isomorphism
        let counts: Vec<usize> = (1..=5)
            .map(|n| graphs_up_to_iso(n).len() - if n > 1 { graphs_up_to_iso(n - 1).len() } else { 0 })
            .collect();
        assert_eq!(counts, vec![1, 2, 4, 11, 34]);
    }

    #[test]
    fn corpus_is_small_and_valid() {
        let corpus = corpus();
        assert!(corpus.len() >= 20);
        for (name, sys) in &corpus {
            assert!(sys.nodes().len() <= 6, "{name}");
            assert!(sys.nodes().iter().all(|n| n.size() <= 4), "{name}");
            assert!(check_extension_system(sys).passes, "{name}");
        }
    }
}

/// `count` seeded dense families over slices `0..=k + 1`, alternating
/// decide and pattern kinds, all meetable well within depth 64.
pub fn mixed_families(k: usize, count: usize, seed: u64) -> Vec<crate::cohen::DenseFamily> {
    use crate::cohen::{Condition, DenseFamily};
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|j| {
            let slice = Some(rng.gen_range(0..k + 2));
            if j % 2 == 0 {
                DenseFamily::Decide {
                    slice,
                    pos: rng.gen_range(0..24),
                }
            } else {
                let len = rng.gen_range(1..=3);
                DenseFamily::Pattern {
                    slice,
                    word: Condition::new((0..len).map(|_| rng.gen()).collect()),
                    min: rng.gen_range(0..16),
                }
            }
        })
        .collect()
}
