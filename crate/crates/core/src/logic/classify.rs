use serde::{Deserialize, Serialize};

use super::{Formula, LogicError};

/// Quantifier-prefix class of a sentence after prenexing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QuantifierClass {
    #[serde(rename = "delta0")]
    Delta0,
    #[serde(rename = "sigma1")]
    Sigma1,
    #[serde(rename = "pi2")]
    Pi2,
    #[serde(rename = "other")]
    Other,
}

impl QuantifierClass {
    /// Membership in the Σ₁ fragment (quantifier-free sentences included).
    pub fn is_sigma1(self) -> bool {
        matches!(self, QuantifierClass::Delta0 | QuantifierClass::Sigma1)
    }

    /// Membership in the Π₂ fragment, which contains Δ₀, Σ₁ and Π₁.
    pub fn is_pi2(self) -> bool {
        !matches!(self, QuantifierClass::Other)
    }
}

impl std::fmt::Display for QuantifierClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            QuantifierClass::Delta0 => "delta0",
            QuantifierClass::Sigma1 => "sigma1",
            QuantifierClass::Pi2 => "pi2",
            QuantifierClass::Other => "other",
        })
    }
}

/// Least `n` with the formula in Σₙ, and least `n` with it in Πₙ, where both
/// are measured over all prenex forms reachable by the usual quantifier moves.
pub(crate) fn prenex_levels(phi: &Formula) -> (u32, u32) {
    match phi {
        Formula::Atom(..) | Formula::Equal(..) => (0, 0),
        Formula::Not(f) => {
            let (s, p) = prenex_levels(f);
            (p, s)
        }
        Formula::And(a, b) | Formula::Or(a, b) => {
            let (sa, pa) = prenex_levels(a);
            let (sb, pb) = prenex_levels(b);
            (sa.max(sb), pa.max(pb))
        }
        Formula::Exists(_, f) => {
            let (s, p) = prenex_levels(f);
            let sigma = s.min(p + 1).max(1);
            (sigma, sigma + 1)
        }
    }
}

pub fn classify(phi: &Formula) -> Result<QuantifierClass, LogicError> {
    let free = phi.free_vars();
    if !free.is_empty() {
        return Err(LogicError::FreeVariables(free.into_iter().collect()));
    }
    Ok(classify_unchecked(phi))
}

pub(crate) fn classify_unchecked(phi: &Formula) -> QuantifierClass {
    let (s, p) = prenex_levels(phi);
    class_of_levels(s, p)
}

/// Class from the pair returned by [`prenex_levels`]; `(0, 0)` only arises
/// for quantifier-free formulas.
pub(crate) fn class_of_levels(s: u32, p: u32) -> QuantifierClass {
    if s == 0 && p == 0 {
        QuantifierClass::Delta0
    } else if s <= 1 {
        QuantifierClass::Sigma1
    } else if p <= 2 {
        QuantifierClass::Pi2
    } else {
        QuantifierClass::Other
    }
}
