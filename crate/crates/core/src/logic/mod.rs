//! First-order language: signatures, formulas, parsing, satisfaction on finite
//! structures, quantifier classification and canonical sentence enumeration.

mod classify;
mod enumerate;
mod eval;
mod formula;
mod parse;
mod signature;
mod structure;

pub use classify::{classify, QuantifierClass};
pub(crate) use classify::class_of_levels;
pub use enumerate::{
    canonical_key, canonicalize, enumerate_pool, enumerate_sentences, shared_pool, PoolNode, PoolTerm,
    SentencePool,
};
pub use eval::{satisfies, satisfies_sentence};
pub use formula::{Formula, Rendered, Term};
pub use parse::parse_formula;
pub(crate) use parse::parse_modal;
pub use signature::{RelationDecl, Signature};
pub use structure::Structure;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Sentence-size budget for pools. Sentences that mention a parameter are
/// only included up to `param_size`, which never exceeds `size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Budget {
    pub size: usize,
    pub param_size: usize,
}

impl Budget {
    pub fn new(size: usize) -> Self {
        Self {
            size,
            param_size: size,
        }
    }

    pub fn with_param_size(self, param_size: usize) -> Self {
        Self {
            size: self.size,
            param_size: param_size.min(self.size),
        }
    }

    /// The canonical pool of sentences within this budget.
    pub fn pool(&self, sig: &Signature, params: &[String]) -> Vec<Formula> {
        enumerate_pool(sig, params, self.size, self.param_size)
    }

    /// Whether `phi` falls inside this budget.
    pub fn admits(&self, phi: &Formula) -> bool {
        let n = phi.size();
        n <= self.size && (n <= self.param_size || !phi.has_params())
    }
}

impl From<usize> for Budget {
    fn from(size: usize) -> Self {
        Self::new(size)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UndeclaredSymbol(String),
    /// `[]` or `<>` where only first-order syntax is allowed.
    ModalOperator,
    /// `[]` or `<>` inside the scope of a quantifier.
    ModalityUnderQuantifier,
    ArityMismatch {
        relation: String,
        expected: usize,
        found: usize,
    },
}

impl std::fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParseErrorKind::Syntax(m) => f.write_str(m),
            ParseErrorKind::UndeclaredSymbol(s) => write!(f, "undeclared symbol `{s}`"),
            ParseErrorKind::ModalOperator => f.write_str("modal operator in a first-order formula"),
            ParseErrorKind::ModalityUnderQuantifier => {
                f.write_str("modal operator under a quantifier")
            }
            ParseErrorKind::ArityMismatch {
                relation,
                expected,
                found,
            } => write!(
                f,
                "relation `{relation}` expects {expected} arguments, found {found}"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("parse error at {position}: {kind}")]
    Parse {
        position: usize,
        kind: ParseErrorKind,
    },
    #[error("invalid signature: {0}")]
    InvalidSignature(String),
    #[error("invalid structure `{id}`: {message}")]
    InvalidStructure { id: String, message: String },
    #[error("parameter `#{name}` names no element of `{structure}`")]
    DanglingParameter { name: String, structure: String },
    #[error("variable `{0}` is not assigned")]
    UnassignedVariable(String),
    #[error("formula has free variables: {0:?}")]
    FreeVariables(Vec<String>),
}

impl LogicError {
    pub(crate) fn syntax(position: usize, msg: impl Into<String>) -> Self {
        LogicError::Parse {
            position,
            kind: ParseErrorKind::Syntax(msg.into()),
        }
    }
}
