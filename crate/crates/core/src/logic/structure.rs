use std::collections::HashMap;

use super::{LogicError, Signature};

/// Largest relation table we are willing to store densely.
const MAX_TABLE: usize = 1 << 24;

/// A finite structure for a [`Signature`]. Elements are addressed by index;
/// `universe` carries their names, which is how parameters refer to them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    pub id: String,
    universe: Vec<String>,
    index: HashMap<String, usize>,
    /// Dense truth tables, one per relation, row-major over element indices.
    tables: Vec<Vec<bool>>,
    constants: Vec<usize>,
}

impl Structure {
    /// Builds a structure, checking that tuples have the declared arity and
    /// range over the universe and that every constant is assigned.
    pub fn new(
        sig: &Signature,
        id: impl Into<String>,
        universe: Vec<String>,
        relations: &HashMap<String, Vec<Vec<String>>>,
        constants: &HashMap<String, String>,
    ) -> Result<Self, LogicError> {
        let id = id.into();
        let bad = |msg: String| LogicError::InvalidStructure {
            id: id.clone(),
            message: msg,
        };
        if universe.is_empty() {
            return Err(bad("universe is empty".into()));
        }
        let mut index = HashMap::new();
        for (i, e) in universe.iter().enumerate() {
            if index.insert(e.clone(), i).is_some() {
                return Err(bad(format!("duplicate element `{e}`")));
            }
        }
        for name in relations.keys() {
            if sig.relation_index(name).is_none() {
                return Err(bad(format!("undeclared relation `{name}`")));
            }
        }
        let n = universe.len();
        let mut tables = Vec::with_capacity(sig.relations.len());
        for decl in &sig.relations {
            let cells = n
                .checked_pow(decl.arity as u32)
                .filter(|c| *c <= MAX_TABLE)
                .ok_or_else(|| bad(format!("relation `{}` table too large", decl.name)))?;
            let mut table = vec![false; cells];
            for tuple in relations.get(&decl.name).map(Vec::as_slice).unwrap_or(&[]) {
                if tuple.len() != decl.arity {
                    return Err(bad(format!(
                        "tuple {tuple:?} for `{}` has length {}, expected {}",
                        decl.name,
                        tuple.len(),
                        decl.arity
                    )));
                }
                let mut cell = 0;
                for e in tuple {
                    let i = *index
                        .get(e)
                        .ok_or_else(|| bad(format!("tuple element `{e}` not in universe")))?;
                    cell = cell * n + i;
                }
                table[cell] = true;
            }
            tables.push(table);
        }
        for c in constants.keys() {
            if sig.constant_index(c).is_none() {
                return Err(bad(format!("undeclared constant `{c}`")));
            }
        }
        let mut consts = Vec::with_capacity(sig.constants.len());
        for c in &sig.constants {
            let e = constants
                .get(c)
                .ok_or_else(|| bad(format!("constant `{c}` is unassigned")))?;
            consts.push(
                *index
                    .get(e)
                    .ok_or_else(|| bad(format!("constant `{c}` names unknown element `{e}`")))?,
            );
        }
        Ok(Self {
            id,
            universe,
            index,
            tables,
            constants: consts,
        })
    }

    /// Builds directly from index tuples. Used by fixture generators.
    pub fn from_indices(
        sig: &Signature,
        id: impl Into<String>,
        size: usize,
        relations: &[Vec<Vec<usize>>],
        constants: &[usize],
    ) -> Result<Self, LogicError> {
        let names: Vec<String> = (0..size).map(|i| i.to_string()).collect();
        let rels = sig
            .relations
            .iter()
            .zip(relations)
            .map(|(d, tuples)| {
                (
                    d.name.clone(),
                    tuples
                        .iter()
                        .map(|t| t.iter().map(|i| names[*i].clone()).collect())
                        .collect(),
                )
            })
            .collect();
        let consts = sig
            .constants
            .iter()
            .zip(constants)
            .map(|(c, i)| (c.clone(), names[*i].clone()))
            .collect();
        Self::new(sig, id, names, &rels, &consts)
    }

    pub fn size(&self) -> usize {
        self.universe.len()
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn element(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn element_name(&self, i: usize) -> &str {
        &self.universe[i]
    }

    pub fn constant(&self, c: usize) -> usize {
        self.constants[c]
    }

    pub fn constants(&self) -> &[usize] {
        &self.constants
    }

    pub fn holds(&self, rel: usize, args: &[usize]) -> bool {
        let n = self.universe.len();
        let cell = args.iter().fold(0, |acc, a| acc * n + a);
        self.tables[rel][cell]
    }

    /// All tuples of relation `rel`, in lexicographic order of element indices.
    pub fn tuples(&self, rel: usize, arity: usize) -> Vec<Vec<usize>> {
        let n = self.universe.len();
        self.tables[rel]
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(|(mut cell, _)| {
                let mut t = vec![0; arity];
                for slot in t.iter_mut().rev() {
                    *slot = cell % n;
                    cell /= n;
                }
                t
            })
            .collect()
    }
}
