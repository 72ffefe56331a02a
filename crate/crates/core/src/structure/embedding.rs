use crate::logic::{Signature, Structure};

/// Checks directly that `map` is an injective map `a → b` that sends
/// constants to constants and preserves and reflects every relation tuple.
pub fn is_strong_embedding(
    sig: &Signature,
    a: &Structure,
    b: &Structure,
    map: &[usize],
) -> Result<(), String> {
    if map.len() != a.size() {
        return Err(format!(
            "map covers {} elements, `{}` has {}",
            map.len(),
            a.id,
            a.size()
        ));
    }
    if let Some(&bad) = map.iter().find(|&&x| x >= b.size()) {
        return Err(format!("image index {bad} outside `{}`", b.id));
    }
    for i in 0..map.len() {
        for j in i + 1..map.len() {
            if map[i] == map[j] {
                return Err(format!(
                    "not injective: `{}` and `{}` both map to `{}`",
                    a.element_name(i),
                    a.element_name(j),
                    b.element_name(map[i])
                ));
            }
        }
    }
    for (c, name) in sig.constants.iter().enumerate() {
        if map[a.constant(c)] != b.constant(c) {
            return Err(format!("constant `{name}` not preserved"));
        }
    }
    for (r, decl) in sig.relations.iter().enumerate() {
        let mut tuple = vec![0; decl.arity];
        loop {
            let image: Vec<usize> = tuple.iter().map(|&x| map[x]).collect();
            let (src, dst) = (a.holds(r, &tuple), b.holds(r, &image));
            if src != dst {
                let names: Vec<&str> = tuple.iter().map(|&x| a.element_name(x)).collect();
                return Err(format!(
                    "`{}` on {:?} is {} in `{}` but {} on the image",
                    decl.name,
                    names,
                    src,
                    a.id,
                    dst
                ));
            }
            if !next_tuple(&mut tuple, a.size()) {
                break;
            }
        }
    }
    Ok(())
}

fn next_tuple(t: &mut [usize], n: usize) -> bool {
    for slot in t.iter_mut().rev() {
        *slot += 1;
        if *slot < n {
            return true;
        }
        *slot = 0;
    }
    false
}

/// All strong embeddings `a ↪ b`, as element maps in lexicographic order.
pub fn compute_embeddings(sig: &Signature, a: &Structure, b: &Structure) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if a.size() > b.size() {
        return out;
    }
    // Constants pin some images in advance.
    let mut pinned = vec![None; a.size()];
    for c in 0..sig.constants.len() {
        let (src, dst) = (a.constant(c), b.constant(c));
        match pinned[src] {
            Some(d) if d != dst => return out,
            _ => pinned[src] = Some(dst),
        }
    }
    let mut map = Vec::with_capacity(a.size());
    let mut used = vec![false; b.size()];
    search(sig, a, b, &pinned, &mut map, &mut used, &mut out);
    out
}

fn search(
    sig: &Signature,
    a: &Structure,
    b: &Structure,
    pinned: &[Option<usize>],
    map: &mut Vec<usize>,
    used: &mut [bool],
    out: &mut Vec<Vec<usize>>,
) {
    let i = map.len();
    if i == a.size() {
        out.push(map.clone());
        return;
    }
    let candidates: Vec<usize> = match pinned[i] {
        Some(d) => vec![d],
        None => (0..b.size()).collect(),
    };
    for cand in candidates {
        if used[cand] {
            continue;
        }
        map.push(cand);
        if consistent_with_last(sig, a, b, map) {
            used[cand] = true;
            search(sig, a, b, pinned, map, used, out);
            used[cand] = false;
        }
        map.pop();
    }
}

/// Checks every relation tuple over the assigned prefix that mentions the
/// most recently assigned element.
fn consistent_with_last(sig: &Signature, a: &Structure, b: &Structure, map: &[usize]) -> bool {
    let last = map.len() - 1;
    let n = map.len();
    for (r, decl) in sig.relations.iter().enumerate() {
        let mut tuple = vec![0; decl.arity];
        loop {
            if tuple.contains(&last) {
                let image: Vec<usize> = tuple.iter().map(|&x| map[x]).collect();
                if a.holds(r, &tuple) != b.holds(r, &image) {
                    return false;
                }
            }
            if !next_tuple(&mut tuple, n) {
                break;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn point_into_two_chain_has_two_embeddings() {
        let sig = fixtures::order_signature();
        let (l1, l2) = (fixtures::linear_order(1), fixtures::linear_order(2));
        assert_eq!(compute_embeddings(&sig, &l1, &l2), vec![vec![0], vec![1]]);
        assert!(compute_embeddings(&sig, &l2, &l1).is_empty());
    }

    #[test]
    fn self_embeddings_contain_identity() {
        let sig = fixtures::graph_signature();
        for g in fixtures::all_graphs(3) {
            let maps = compute_embeddings(&sig, &g, &g);
            assert!(maps.contains(&(0..g.size()).collect::<Vec<_>>()));
        }
    }

    #[test]
    fn antichain_does_not_embed_in_chain() {
        let sig = fixtures::order_signature();
        let anti = fixtures::antichain(2);
        assert!(compute_embeddings(&sig, &anti, &fixtures::linear_order(2)).is_empty());
    }

    #[test]
    fn search_matches_filtered_injections() {
        let sig = fixtures::graph_signature();
        let graphs = fixtures::all_graphs(3);
        for a in &graphs {
            for b in &graphs {
                let mut brute = Vec::new();
                for m in fixtures::injections(a.size(), b.size()) {
                    if is_strong_embedding(&sig, a, b, &m).is_ok() {
                        brute.push(m);
                    }
                }
                assert_eq!(compute_embeddings(&sig, a, b), brute);
            }
        }
    }

    #[test]
    fn constants_are_respected() {
        let sig = fixtures::pointed_order_signature();
        let a = fixtures::pointed_linear_order(1, 0);
        let b = fixtures::pointed_linear_order(2, 1);
        assert_eq!(compute_embeddings(&sig, &a, &b), vec![vec![1]]);
    }
}
