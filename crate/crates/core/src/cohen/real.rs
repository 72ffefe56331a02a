use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CohenError, Condition, DenseFamily, ProductCondition};

/// A family met by a real, with the least prefix lying in it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub family: String,
    pub prefix: Condition,
}

/// A real truncated to a fixed depth, with the families it is known to meet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealApprox {
    pub depth: usize,
    pub bits: Condition,
    #[serde(default)]
    pub witnesses: Vec<Witness>,
}

impl RealApprox {
    /// An approximation with no recorded witnesses.
    pub fn bare(bits: Condition) -> Self {
        Self {
            depth: bits.len(),
            bits,
            witnesses: Vec::new(),
        }
    }

    /// Checks the length and replays every witness as a prefix check.
    pub fn verify(&self) -> Result<(), String> {
        if self.bits.len() != self.depth {
            return Err(format!("length {} differs from depth {}", self.bits.len(), self.depth));
        }
        for w in &self.witnesses {
            let fam = DenseFamily::parse(&w.family, None).map_err(|e| e.to_string())?;
            if !self.bits.extends(&w.prefix) {
                return Err(format!("witness for {} is not a prefix", w.family));
            }
            if !fam.contains_condition(&w.prefix).map_err(|e| e.to_string())? {
                return Err(format!("witness for {} is not in the family", w.family));
            }
        }
        Ok(())
    }
}

/// Meets each family in order from the empty condition, then zero-fills to
/// `depth`.
pub fn build_generic_real(families: &[DenseFamily], depth: usize) -> Result<RealApprox, CohenError> {
    let mut p = Condition::default();
    for fam in families {
        p = fam.meet_condition(&p)?;
        if p.len() > depth {
            return Err(CohenError::DepthExhausted {
                depth,
                family: fam.to_string(),
            });
        }
    }
    p.zero_fill(depth);
    let witnesses = families
        .iter()
        .map(|fam| Witness {
            family: fam.to_string(),
            prefix: fam.witness_condition(&p).expect("met above and kept by extension"),
        })
        .collect();
    Ok(RealApprox {
        depth,
        bits: p,
        witnesses,
    })
}

/// Builds a product real on the first `k` slices: seeded random bits, then
/// each family in order is met by its first occurrence if the current bits
/// already meet it, else by its least meet, whose entries override the
/// bits. Earlier occurrences are kept fixed, so the product of the returned
/// slices meets every family confined to them.
pub fn build_mutual_tower(
    k: usize,
    families: &[DenseFamily],
    depth: usize,
    seed: u64,
) -> Result<Vec<RealApprox>, CohenError> {
    if k == 0 {
        return Err(CohenError::EmptyTower);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: Vec<Vec<bool>> = (0..k).map(|_| (0..depth).map(|_| rng.gen()).collect()).collect();
    let fill = |fixed: &ProductCondition| -> ProductCondition {
        let mut out = ProductCondition::new();
        for (n, row) in noise.iter().enumerate() {
            for (i, &b) in row.iter().enumerate() {
                out.insert(n, i, fixed.get(n, i).unwrap_or(b));
            }
        }
        out
    };
    let mut fixed = ProductCondition::new();
    for fam in families {
        if fam.support().iter().any(|&n| n >= k) {
            continue;
        }
        let entries = match fam.witness(&fill(&fixed)) {
            Some(w) => w,
            None => fam.meet(&fixed)?,
        };
        if entries.max_position().is_some_and(|m| m >= depth) {
            return Err(CohenError::DepthExhausted {
                depth,
                family: fam.to_string(),
            });
        }
        fixed = fixed.union(&entries).expect("entries extend the fixed part");
    }
    let total = fill(&fixed);
    Ok((0..k)
        .map(|n| {
            let bits = Condition::new((0..depth).map(|i| total.get(n, i).expect("filled")).collect());
            let witnesses = families
                .iter()
                .filter_map(|fam| fam.on_single_slice().filter(|(s, _)| *s == n))
                .map(|(_, fam)| Witness {
                    family: fam.to_string(),
                    prefix: fam.witness_condition(&bits).expect("met in the product"),
                })
                .collect();
            RealApprox { depth, bits, witnesses }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fams(s: &str) -> Vec<DenseFamily> {
        DenseFamily::parse_many(s, None).unwrap()
    }

    #[test]
    fn generic_real_examples() {
        let decide: Vec<DenseFamily> = (0..8).map(|i| DenseFamily::Decide { slice: None, pos: i }).collect();
        let r = build_generic_real(&decide, 8).unwrap();
        assert_eq!(r.bits.to_string(), "00000000");
        assert_eq!(r.witnesses.len(), 8);
        assert!(r.verify().is_ok());
        assert_eq!(build_generic_real(&fams("pattern:1@0"), 4).unwrap().bits.to_string(), "1000");
        assert_eq!(build_generic_real(&[], 3).unwrap().bits.to_string(), "000");
        assert!(matches!(
            build_generic_real(&fams("pattern:111@6"), 8),
            Err(CohenError::DepthExhausted { .. })
        ));
    }

    #[test]
    fn tower_examples() {
        let t = build_mutual_tower(2, &fams("decide:0,0;decide:1,0"), 16, 3).unwrap();
        assert_eq!(t.len(), 2);
        assert!(t.iter().all(|r| r.bits.len() == 16 && r.verify().is_ok()));
        let one = build_mutual_tower(1, &fams("pattern:0,11@0"), 8, 9).unwrap();
        assert!(one[0].bits.to_string().contains("11"));
        assert_eq!(build_mutual_tower(3, &fams("pattern:2,101@4"), 32, 5).unwrap(),
            build_mutual_tower(3, &fams("pattern:2,101@4"), 32, 5).unwrap());
        assert!(matches!(build_mutual_tower(0, &[], 8, 0), Err(CohenError::EmptyTower)));
    }
}
