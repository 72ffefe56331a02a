//! Finite-depth combinatorics of Cohen forcing: Add(ω,1) conditions as bit
//! sequences, Add(ω,ω) conditions as finite partial maps on slices, dense
//! families with a deterministic meet procedure, generic reals and towers
//! truncated to a depth, and the amalgamation of a tower of mutually
//! generic reals into one generic real with a replayable certificate.
//!
//! Genericity here always means "meets every supplied family within the
//! depth".

mod amalgam;
mod condition;
mod family;
mod real;

pub use amalgam::{
    amalgamate, iterate_amalgamation, verify_amalgamation, AmalgamationCertificate, Stage, Verification,
};
pub use condition::{Condition, ProductCondition};
pub use family::DenseFamily;
pub use real::{build_generic_real, build_mutual_tower, RealApprox, Witness};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohenError {
    #[error("bad family `{spec}`: {message}")]
    FamilySpec { spec: String, message: String },
    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },
    #[error("family {family} is not dense: nothing in it is compatible with {witness}")]
    NotDense { family: String, witness: String },
    #[error("family {0} constrains several reals and cannot act on a single one")]
    WrongPoset(String),
    #[error("family {family} has no member compatible with {condition}")]
    NoMember { family: String, condition: String },
    #[error("depth {depth} is too small to meet {family}")]
    DepthExhausted { depth: usize, family: String },
    #[error("depth {depth} is too small to meet {family} at stage {stage}")]
    DepthExhaustedAt {
        stage: usize,
        depth: usize,
        family: String,
    },
    #[error("input {index} has length {found}, expected {expected}")]
    InputLength {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("the inputs are not mutually generic: their product misses {family}")]
    NotMutuallyGeneric { family: String },
    #[error("a tower needs at least one real")]
    EmptyTower,
}

impl CohenError {
    /// Whether the failure is a depth or search limit rather than bad input.
    pub fn is_exhaustion(&self) -> bool {
        matches!(
            self,
            CohenError::DepthExhausted { .. } | CohenError::DepthExhaustedAt { .. } | CohenError::NoMember { .. }
        )
    }
}

/// Cantor pairing `π(n, i) = (n + i)(n + i + 1)/2 + n`.
pub fn pair(n: u64, i: u64) -> u64 {
    let s = n + i;
    s * (s + 1) / 2 + n
}

/// Inverse of [`pair`].
pub fn unpair(z: u64) -> (u64, u64) {
    let mut w = ((8 * z as u128 + 1).isqrt() as u64 - 1) / 2;
    // Guard against rounding at the boundary of a diagonal.
    while w * (w + 1) / 2 > z {
        w -= 1;
    }
    let n = z - w * (w + 1) / 2;
    (n, w - n)
}

/// Moves a product condition onto slice 0 along the pairing.
pub fn pair_condition(p: &ProductCondition) -> ProductCondition {
    let mut out = ProductCondition::new();
    for ((n, i), b) in p.entries() {
        out.insert(0, pair(n as u64, i as u64) as usize, b);
    }
    out
}

/// Inverse of [`pair_condition`]; `None` when `q` uses a slice other than 0.
pub fn unpair_condition(q: &ProductCondition) -> Option<ProductCondition> {
    let mut out = ProductCondition::new();
    for ((s, z), b) in q.entries() {
        if s != 0 {
            return None;
        }
        let (n, i) = unpair(z as u64);
        out.insert(n as usize, i as usize, b);
    }
    Some(out)
}
