use serde::{Deserialize, Serialize};

use super::LogicError;

/// A relation symbol with its arity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelationDecl {
    pub name: String,
    pub arity: usize,
}

/// A finite relational signature with constants.
///
/// Declaration order is significant: it fixes the canonical symbol order used
/// by sentence enumeration.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub relations: Vec<RelationDecl>,
    #[serde(default)]
    pub constants: Vec<String>,
}

impl Signature {
    pub fn new(relations: Vec<RelationDecl>, constants: Vec<String>) -> Result<Self, LogicError> {
        let sig = Self {
            relations,
            constants,
        };
        sig.validate()?;
        Ok(sig)
    }

    /// Shorthand for tests and fixtures: `Signature::relational(&[("<", 2)])`.
    pub fn relational(rels: &[(&str, usize)]) -> Self {
        Self::new(
            rels.iter()
                .map(|(n, a)| RelationDecl {
                    name: n.to_string(),
                    arity: *a,
                })
                .collect(),
            Vec::new(),
        )
        .expect("invalid fixture signature")
    }

    pub fn validate(&self) -> Result<(), LogicError> {
        let mut seen = std::collections::HashSet::new();
        for r in &self.relations {
            if r.arity == 0 {
                return Err(LogicError::InvalidSignature(format!(
                    "relation `{}` has arity 0",
                    r.name
                )));
            }
            if !valid_symbol(&r.name) {
                return Err(LogicError::InvalidSignature(format!(
                    "`{}` is not a valid relation name",
                    r.name
                )));
            }
            if r.arity != 2 && !is_identifier(&r.name) {
                return Err(LogicError::InvalidSignature(format!(
                    "symbolic relation `{}` must be binary (infix)",
                    r.name
                )));
            }
            if !seen.insert(r.name.as_str()) {
                return Err(LogicError::InvalidSignature(format!(
                    "duplicate symbol `{}`",
                    r.name
                )));
            }
        }
        for c in &self.constants {
            if !is_identifier(c) || c == "E" || c == "A" {
                return Err(LogicError::InvalidSignature(format!(
                    "`{c}` is not a valid constant name"
                )));
            }
            if !seen.insert(c.as_str()) {
                return Err(LogicError::InvalidSignature(format!(
                    "duplicate symbol `{c}`"
                )));
            }
        }
        Ok(())
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|r| r.name == name)
    }

    pub fn constant_index(&self, name: &str) -> Option<usize> {
        self.constants.iter().position(|c| c == name)
    }

    /// Binary relations with symbolic names are written infix.
    pub fn is_infix(&self, rel: usize) -> bool {
        let r = &self.relations[rel];
        r.arity == 2 && !is_identifier(&r.name)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) const SYMBOL_CHARS: &str = "<>~^*+%@$?/\\:";

pub(crate) fn is_symbolic(s: &str) -> bool {
    !s.is_empty()
        && s.chars().all(|c| SYMBOL_CHARS.contains(c) || c == '=' || c == '-')
        && !matches!(s, "=" | "->" | "<->")
}

fn valid_symbol(s: &str) -> bool {
    is_identifier(s) || is_symbolic(s)
}
