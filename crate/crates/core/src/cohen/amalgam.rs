use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{build_mutual_tower, CohenError, Condition, DenseFamily, ProductCondition, RealApprox};

const READING: &str = "desk-scale reading: d meets every supplied family, each input is slice n of d up to the recorded finite diff, and the inputs' product meets every family confined to their slices";

/// One stage of the amalgamation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub stage: usize,
    /// The family met at this stage, absent once the list is exhausted.
    pub family: Option<String>,
    /// The auxiliary real on slices `stage..`, first entry for slice `stage`.
    pub aux: Vec<Condition>,
    /// Least sub-condition of the current slices times `aux` in the family.
    pub witness: ProductCondition,
    /// Extra entries on slice `stage` added so the finished slices keep
    /// meeting the families confined to them.
    #[serde(default, skip_serializing_if = "ProductCondition::is_empty")]
    pub repair: ProductCondition,
    /// The committed condition `p_stage`.
    pub condition: ProductCondition,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmalgamationCertificate {
    pub seed: u64,
    pub depth: usize,
    pub families: Vec<String>,
    pub inputs: Vec<RealApprox>,
    /// Slices of the amalgamated real `d`.
    pub output: Vec<Condition>,
    /// Positions where slice `n` of `d` differs from input `n`.
    pub diffs: Vec<Vec<usize>>,
    pub stages: Vec<Stage>,
    pub reading: String,
}

impl AmalgamationCertificate {
    /// The whole of `d` as a product condition.
    pub fn product(&self) -> ProductCondition {
        ProductCondition::from_slices(&self.output)
    }

    /// Input `n` recovered from slice `n` of `d` and the recorded diff.
    pub fn decode(&self, n: usize) -> Option<Condition> {
        let mut c = self.output.get(n)?.clone();
        for &i in self.diffs.get(n)? {
            c.set(i, !c.get(i)?);
        }
        Some(c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verification {
    pub valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

/// Number of slices the construction runs over.
fn stage_count(k: usize, families: &[DenseFamily]) -> usize {
    let widest = families.iter().flat_map(|f| f.support()).map(|n| n + 1).max().unwrap_or(0);
    k.max(families.len()).max(widest)
}

/// Families whose slices all lie below `k`.
fn confined(families: &[DenseFamily], k: usize) -> impl Iterator<Item = &DenseFamily> {
    families.iter().filter(move |f| f.support().iter().all(|&n| n < k))
}

/// Amalgamates mutually generic reals `c_0 … c_{k-1}` into one product real
/// `d` meeting every family, with slice `n` of `d` a finite modification of
/// `c_n`.
///
/// Stage `n` keeps the finished slices `d_0 … d_{n-1}` and the committed
/// condition `p_{n-1}`. It builds an auxiliary real `e` on the remaining
/// slices that extends `p_{n-1}`, meets every remaining family by least
/// meets alongside the finished slices, and is seeded random elsewhere. A least witness `p ∈ D_n`
/// inside the finished slices times `e` gives `p_n = p ∪ p_{n-1}`. Slice `n`
/// is then `c_n` overwritten by `p_n` when `n < k`, and `e`'s slice `n`
/// otherwise.
pub fn amalgamate(
    inputs: &[RealApprox],
    families: &[DenseFamily],
    depth: usize,
    seed: u64,
) -> Result<AmalgamationCertificate, CohenError> {
    let k = inputs.len();
    for (n, c) in inputs.iter().enumerate() {
        if c.bits.len() != depth {
            return Err(CohenError::InputLength {
                index: n,
                expected: depth,
                found: c.bits.len(),
            });
        }
    }
    let given: Vec<Condition> = inputs.iter().map(|c| c.bits.clone()).collect();
    let joint = ProductCondition::from_slices(&given);
    if let Some(f) = confined(families, k).find(|f| !f.contains(&joint)) {
        return Err(CohenError::NotMutuallyGeneric { family: f.to_string() });
    }

    let slices = stage_count(k, families);
    let exhausted = |stage: usize, fam: &DenseFamily| CohenError::DepthExhaustedAt {
        stage,
        depth,
        family: fam.to_string(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done: Vec<Condition> = Vec::with_capacity(slices);
    let mut prev = ProductCondition::new();
    let mut stages = Vec::with_capacity(slices);
    for n in 0..slices {
        let finished = ProductCondition::from_slices(&done);
        let mut cur = finished.union(&prev.restrict(n..slices)).expect("p_{n-1} agrees with the finished slices");
        for fam in &families[n.min(families.len())..] {
            cur = fam.meet(&cur)?;
            if cur.max_position().is_some_and(|m| m >= depth) {
                return Err(exhausted(n, fam));
            }
        }
        let aux: Vec<Condition> = (n..slices)
            .map(|s| Condition::new((0..depth).map(|i| cur.get(s, i).unwrap_or_else(|| rng.gen())).collect()))
            .collect();
        let total = finished.union(&ProductCondition::from_slices(&aux).shifted(n)).expect("disjoint slices");
        let (family, witness) = match families.get(n) {
            Some(fam) => (Some(fam.to_string()), fam.witness(&total).expect("the auxiliary real meets D_n")),
            None => (None, ProductCondition::new()),
        };
        let mut p = prev.union(&witness).expect("both lie inside the finished slices times e");

        let mut slice = match given.get(n) {
            Some(c) => c.clone(),
            None => aux[0].clone(),
        };
        let overwrite = |slice: &mut Condition, p: &ProductCondition| {
            for ((_, i), b) in p.restrict(n..n + 1).entries() {
                slice.set(i, b);
            }
        };
        overwrite(&mut slice, &p);

        // Overwriting can destroy an occurrence some family confined to the
        // finished slices relied on; meet it again inside p.
        let mut repair = ProductCondition::new();
        loop {
            let with = finished.union(&ProductCondition::from_condition(n, &slice)).expect("disjoint slices");
            let Some(fam) = confined(families, n + 1).find(|f| !f.contains(&with)) else {
                break;
            };
            let base = finished.union(&p).expect("p agrees with the finished slices");
            let added = fam.meet(&base)?.minus(&base);
            if added.is_empty()
                || added.max_position().is_some_and(|m| m >= depth)
                || added.slices() != [n]
            {
                return Err(exhausted(n, fam));
            }
            p = p.union(&added).expect("new entries");
            repair = repair.union(&added).expect("new entries");
            overwrite(&mut slice, &p);
        }

        done.push(slice);
        stages.push(Stage {
            stage: n,
            family,
            aux,
            witness,
            repair,
            condition: p.clone(),
        });
        prev = p;
    }

    let diffs = given
        .iter()
        .zip(&done)
        .map(|(c, d)| (0..depth).filter(|&i| c.get(i) != d.get(i)).collect())
        .collect();
    Ok(AmalgamationCertificate {
        seed,
        depth,
        families: families.iter().map(|f| f.to_string()).collect(),
        inputs: inputs.to_vec(),
        output: done,
        diffs,
        stages,
        reading: READING.to_string(),
    })
}

/// Replays a certificate against the families: every `p_n` lies in family
/// `n` and extends `p_{n-1}`, each stage's witness sits inside the finished
/// slices times its auxiliary real, `d` extends every `p_n`, each recorded
/// diff is exactly where slice `n` of `d` and input `n` disagree and lies
/// inside the positions the chain fixes, and `d` meets every family.
pub fn verify_amalgamation(cert: &AmalgamationCertificate, families: &[DenseFamily]) -> Verification {
    match replay(cert, families) {
        Ok(()) => Verification {
            valid: true,
            failure: None,
        },
        Err(msg) => Verification {
            valid: false,
            failure: Some(msg),
        },
    }
}

fn replay(cert: &AmalgamationCertificate, families: &[DenseFamily]) -> Result<(), String> {
    let names: Vec<String> = families.iter().map(|f| f.to_string()).collect();
    if names != cert.families {
        return Err("families differ from the certificate's".into());
    }
    let depth = cert.depth;
    let k = cert.inputs.len();
    for (n, c) in cert.inputs.iter().enumerate() {
        c.verify().map_err(|e| format!("input {n}: {e}"))?;
        if c.depth != depth {
            return Err(format!("input {n} has depth {} not {depth}", c.depth));
        }
    }
    let joint = ProductCondition::from_slices(&cert.inputs.iter().map(|c| c.bits.clone()).collect::<Vec<_>>());
    if let Some(f) = confined(families, k).find(|f| !f.contains(&joint)) {
        return Err(format!("inputs do not meet {f}"));
    }
    let slices = stage_count(k, families);
    if cert.output.len() != slices || cert.stages.len() != slices {
        return Err(format!("expected {slices} slices and stages"));
    }
    if let Some(n) = cert.output.iter().position(|d| d.len() != depth) {
        return Err(format!("slice {n} of d does not have depth {depth}"));
    }
    let d = cert.product();
    let mut prev = ProductCondition::new();
    for (n, st) in cert.stages.iter().enumerate() {
        let p = &st.condition;
        if st.stage != n {
            return Err(format!("stage {n} is numbered {}", st.stage));
        }
        if !p.extends(&prev) {
            return Err(format!("p_{n} does not extend the previous condition"));
        }
        match (families.get(n), &st.family) {
            (Some(f), Some(name)) if f.to_string() == *name => {
                if !f.contains(p) {
                    return Err(format!("p_{n} is not in family {n} ({f})"));
                }
                if !f.contains(&st.witness) || !p.extends(&st.witness) {
                    return Err(format!("stage {n} witness is not in {f} below p_{n}"));
                }
            }
            (None, None) => {}
            _ => return Err(format!("stage {n} names the wrong family")),
        }
        if st.aux.len() != slices - n || st.aux.iter().any(|a| a.len() != depth) {
            return Err(format!("stage {n} auxiliary real has the wrong shape"));
        }
        let finished = ProductCondition::from_slices(&cert.output[..n]);
        let total = finished
            .union(&ProductCondition::from_slices(&st.aux).shifted(n))
            .expect("disjoint slices");
        if !total.extends(&prev) {
            return Err(format!("stage {n} auxiliary real is incompatible with the previous condition"));
        }
        if !total.extends(&st.witness) {
            return Err(format!("stage {n} witness is not inside the finished slices times e"));
        }
        if !p.extends(&st.repair) {
            return Err(format!("stage {n} repair is not part of p_{n}"));
        }
        if !p.minus(&prev).minus(&st.witness).minus(&st.repair).is_empty() {
            return Err(format!("p_{n} adds entries beyond its witness and repair"));
        }
        if let Some(((s, i), b)) = p.entries().find(|&((s, i), b)| d.get(s, i) != Some(b)) {
            return Err(format!("d does not extend p_{n}: slice {s} position {i} should be {}", b as u8));
        }
        if n >= k && cert.output[n] != st.aux[0] {
            return Err(format!("slice {n} of d is not the auxiliary real of stage {n}"));
        }
        prev = p.clone();
    }
    if cert.diffs.len() != k {
        return Err(format!("expected {k} diffs"));
    }
    for (n, c) in cert.inputs.iter().enumerate() {
        let actual: Vec<usize> = (0..depth).filter(|&i| c.bits.get(i) != cert.output[n].get(i)).collect();
        if actual != cert.diffs[n] {
            return Err(format!("diff_{n} does not match slice {n} of d against input {n}"));
        }
        if let Some(i) = actual.iter().find(|&&i| prev.get(n, i).is_none()) {
            return Err(format!("slice {n} position {i} changed without a condition fixing it"));
        }
    }
    if let Some(f) = families.iter().find(|f| !f.contains(&d)) {
        return Err(format!("d does not meet {f}"));
    }
    Ok(())
}

/// Countable-chain demonstration at finite length: builds a tower of
/// `length` mutually generic reals and amalgamates each initial segment,
/// so every stage of the chain gets its own lower bound.
pub fn iterate_amalgamation(
    length: usize,
    families: &[DenseFamily],
    depth: usize,
    seed: u64,
) -> Result<Vec<AmalgamationCertificate>, CohenError> {
    let tower = build_mutual_tower(length, families, depth, seed)?;
    (1..=length)
        .map(|t| amalgamate(&tower[..t], families, depth, seed.wrapping_add(t as u64)))
        .collect()
}
