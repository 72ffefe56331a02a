use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::{CohenError, Condition, ProductCondition};

/// A dense open set of conditions, given by a membership test and a meet
/// procedure. Families without a slice act on slice 0 of Add(ω,ω).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DenseFamily {
    /// Conditions defined at `pos`.
    Decide { slice: Option<usize>, pos: usize },
    /// Conditions containing `word` at some start `≥ min`.
    Pattern {
        slice: Option<usize>,
        word: Condition,
        min: usize,
    },
    /// Sequences extending one of `members`.
    List { source: String, members: Vec<Condition> },
    /// Product conditions extending one of `members`.
    ProductList {
        source: String,
        members: Vec<ProductCondition>,
    },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ListFile {
    Sequences(Vec<Condition>),
    Products(Vec<ProductCondition>),
}

impl DenseFamily {
    /// Parses `decide:i`, `decide:n,i`, `pattern:w@m`, `pattern:n,w@m` or
    /// `list:<path>`; relative list paths resolve against `base`.
    pub fn parse(spec: &str, base: Option<&Path>) -> Result<Self, CohenError> {
        let bad = |msg: &str| CohenError::FamilySpec {
            spec: spec.to_string(),
            message: msg.to_string(),
        };
        let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad(&format!("`{s}` is not a natural number")));
        let (kind, rest) = spec.trim().split_once(':').ok_or_else(|| bad("expected `kind:arguments`"))?;
        match kind {
            "decide" => match rest.split_once(',') {
                Some((n, i)) => Ok(DenseFamily::Decide {
                    slice: Some(num(n)?),
                    pos: num(i)?,
                }),
                None => Ok(DenseFamily::Decide {
                    slice: None,
                    pos: num(rest)?,
                }),
            },
            "pattern" => {
                let (head, min) = rest.rsplit_once('@').ok_or_else(|| bad("expected `word@min`"))?;
                let (slice, word) = match head.split_once(',') {
                    Some((n, w)) => (Some(num(n)?), w),
                    None => (None, head),
                };
                let word: Condition = word.trim().parse().map_err(|e: String| bad(&e))?;
                if word.is_empty() {
                    return Err(bad("empty pattern word"));
                }
                Ok(DenseFamily::Pattern {
                    slice,
                    word,
                    min: num(min)?,
                })
            }
            "list" => {
                let path = PathBuf::from(rest.trim());
                let full = match base {
                    Some(b) if path.is_relative() => b.join(&path),
                    _ => path,
                };
                let text = std::fs::read_to_string(&full).map_err(|e| CohenError::Io {
                    path: full.display().to_string(),
                    message: e.to_string(),
                })?;
                let file: ListFile = serde_json::from_str(&text).map_err(|e| bad(&e.to_string()))?;
                let source = rest.trim().to_string();
                match file {
                    ListFile::Sequences(members) => Self::list(source, members),
                    ListFile::Products(members) => Self::product_list(source, members),
                }
            }
            _ => Err(bad("unknown family kind")),
        }
    }

    /// Parses a `;`-separated list of family specs.
    pub fn parse_many(specs: &str, base: Option<&Path>) -> Result<Vec<Self>, CohenError> {
        specs
            .split(';')
            .filter(|s| !s.trim().is_empty())
            .map(|s| Self::parse(s, base))
            .collect()
    }

    /// An explicit family of sequences, checked for density.
    pub fn list(source: String, members: Vec<Condition>) -> Result<Self, CohenError> {
        if let Some(gap) = sequence_gap(&members) {
            return Err(CohenError::NotDense {
                family: format!("list:{source}"),
                witness: gap.to_string(),
            });
        }
        Ok(DenseFamily::List { source, members })
    }

    /// An explicit family of product conditions, checked for density.
    pub fn product_list(source: String, members: Vec<ProductCondition>) -> Result<Self, CohenError> {
        if let Some(gap) = product_gap(&members)? {
            return Err(CohenError::NotDense {
                family: format!("list:{source}"),
                witness: gap.to_string(),
            });
        }
        Ok(DenseFamily::ProductList { source, members })
    }

    /// Slices the family constrains.
    pub fn support(&self) -> Vec<usize> {
        match self {
            DenseFamily::Decide { slice, .. } | DenseFamily::Pattern { slice, .. } => {
                vec![slice.unwrap_or(0)]
            }
            DenseFamily::List { .. } => vec![0],
            DenseFamily::ProductList { members, .. } => {
                let mut out: Vec<usize> = members.iter().flat_map(|m| m.slices()).collect();
                out.sort_unstable();
                out.dedup();
                out
            }
        }
    }

    /// The same family on a single real, when it constrains one slice only.
    pub fn on_single_slice(&self) -> Option<(usize, DenseFamily)> {
        match self {
            DenseFamily::Decide { slice, pos } => Some((slice.unwrap_or(0), DenseFamily::Decide { slice: None, pos: *pos })),
            DenseFamily::Pattern { slice, word, min } => Some((
                slice.unwrap_or(0),
                DenseFamily::Pattern {
                    slice: None,
                    word: word.clone(),
                    min: *min,
                },
            )),
            DenseFamily::List { .. } => Some((0, self.clone())),
            DenseFamily::ProductList { .. } => None,
        }
    }

    fn single(&self) -> Result<(), CohenError> {
        match self {
            DenseFamily::Decide { slice: Some(_), .. }
            | DenseFamily::Pattern { slice: Some(_), .. }
            | DenseFamily::ProductList { .. } => Err(CohenError::WrongPoset(self.to_string())),
            _ => Ok(()),
        }
    }

    /// Membership of a sequence condition.
    pub fn contains_condition(&self, p: &Condition) -> Result<bool, CohenError> {
        self.single()?;
        Ok(self.witness_condition(p).is_some())
    }

    /// Least prefix of `p` lying in the family.
    pub fn witness_condition(&self, p: &Condition) -> Option<Condition> {
        match self {
            DenseFamily::Decide { pos, .. } => (p.len() > *pos).then(|| p.prefix(pos + 1)),
            DenseFamily::Pattern { word, min, .. } => {
                let w = word.len();
                (*min..(p.len() + 1).saturating_sub(w))
                    .find(|&s| p.bits()[s..s + w] == *word.bits())
                    .map(|s| p.prefix(s + w))
            }
            DenseFamily::List { members, .. } => members.iter().find(|m| p.extends(m)).cloned(),
            DenseFamily::ProductList { .. } => None,
        }
    }

    /// Least `q ≤ p` in the family under the zero-fill policy.
    pub fn meet_condition(&self, p: &Condition) -> Result<Condition, CohenError> {
        self.single()?;
        if self.witness_condition(p).is_some() {
            return Ok(p.clone());
        }
        let mut q = p.clone();
        match self {
            DenseFamily::Decide { pos, .. } => q.zero_fill(pos + 1),
            DenseFamily::Pattern { word, min, .. } => {
                // Least start at or after `min` whose overlap with `p` agrees.
                let s = (*min..)
                    .find(|&s| {
                        word.bits()
                            .iter()
                            .enumerate()
                            .all(|(j, &b)| p.get(s + j).is_none_or(|c| c == b))
                    })
                    .expect("starts past the end of p always agree");
                q.zero_fill(s);
                for (j, &b) in word.bits().iter().enumerate() {
                    q.set(s + j, b);
                }
            }
            DenseFamily::List { members, .. } => {
                q = members
                    .iter()
                    .find(|m| m.extends(p))
                    .cloned()
                    .ok_or_else(|| CohenError::NoMember {
                        family: self.to_string(),
                        condition: p.to_string(),
                    })?;
            }
            DenseFamily::ProductList { .. } => unreachable!("rejected by single()"),
        }
        Ok(q)
    }

    /// Membership of a product condition.
    pub fn contains(&self, p: &ProductCondition) -> bool {
        self.witness(p).is_some()
    }

    /// A least sub-condition of `p` lying in the family: the decided
    /// position, the first occurrence of the word, or the first member
    /// extended.
    pub fn witness(&self, p: &ProductCondition) -> Option<ProductCondition> {
        match self {
            DenseFamily::Decide { slice, pos } => {
                let n = slice.unwrap_or(0);
                p.get(n, *pos).map(|b| {
                    let mut w = ProductCondition::new();
                    w.insert(n, *pos, b);
                    w
                })
            }
            DenseFamily::Pattern { slice, word, min } => {
                let n = slice.unwrap_or(0);
                let end = p.max_position()? + 1;
                (*min..end)
                    .find(|&s| word.bits().iter().enumerate().all(|(j, &b)| p.get(n, s + j) == Some(b)))
                    .map(|s| {
                        let mut w = ProductCondition::new();
                        for (j, &b) in word.bits().iter().enumerate() {
                            w.insert(n, s + j, b);
                        }
                        w
                    })
            }
            DenseFamily::List { members, .. } => members
                .iter()
                .map(|m| ProductCondition::from_condition(0, m))
                .find(|m| p.extends(m)),
            DenseFamily::ProductList { members, .. } => members.iter().find(|m| p.extends(m)).cloned(),
        }
    }

    /// Least `q ≤ p` in the family: the decided position set to 0, the word
    /// at the least admissible start, or `p` joined with the first
    /// compatible member.
    pub fn meet(&self, p: &ProductCondition) -> Result<ProductCondition, CohenError> {
        if self.contains(p) {
            return Ok(p.clone());
        }
        let mut q = p.clone();
        match self {
            DenseFamily::Decide { slice, pos } => {
                q.insert(slice.unwrap_or(0), *pos, false);
            }
            DenseFamily::Pattern { slice, word, min } => {
                let n = slice.unwrap_or(0);
                let s = (*min..)
                    .find(|&s| {
                        word.bits()
                            .iter()
                            .enumerate()
                            .all(|(j, &b)| p.get(n, s + j).is_none_or(|c| c == b))
                    })
                    .expect("starts past every defined position always agree");
                for (j, &b) in word.bits().iter().enumerate() {
                    q.insert(n, s + j, b);
                }
            }
            DenseFamily::List { members, .. } => {
                q = members
                    .iter()
                    .find_map(|m| p.union(&ProductCondition::from_condition(0, m)))
                    .ok_or_else(|| self.no_member(p))?;
            }
            DenseFamily::ProductList { members, .. } => {
                q = members.iter().find_map(|m| p.union(m)).ok_or_else(|| self.no_member(p))?;
            }
        }
        Ok(q)
    }

    fn no_member(&self, p: &ProductCondition) -> CohenError {
        CohenError::NoMember {
            family: self.to_string(),
            condition: p.to_string(),
        }
    }
}

impl fmt::Display for DenseFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DenseFamily::Decide { slice: None, pos } => write!(f, "decide:{pos}"),
            DenseFamily::Decide { slice: Some(n), pos } => write!(f, "decide:{n},{pos}"),
            DenseFamily::Pattern { slice: None, word, min } => write!(f, "pattern:{word}@{min}"),
            DenseFamily::Pattern {
                slice: Some(n),
                word,
                min,
            } => write!(f, "pattern:{n},{word}@{min}"),
            DenseFamily::List { source, .. } | DenseFamily::ProductList { source, .. } => {
                write!(f, "list:{source}")
            }
        }
    }
}

/// A sequence extending no member and compatible with none, if any: the
/// members are dense iff every branch of the binary tree passes through
/// one of them.
fn sequence_gap(members: &[Condition]) -> Option<Condition> {
    fn walk(prefix: &mut Condition, members: &[&Condition]) -> Option<Condition> {
        if members.iter().any(|m| prefix.extends(m)) {
            return None;
        }
        let below: Vec<&Condition> = members.iter().copied().filter(|m| m.extends(prefix)).collect();
        if below.is_empty() {
            return Some(prefix.clone());
        }
        for bit in [false, true] {
            let mut next = prefix.clone();
            next.set(prefix.len(), bit);
            if let Some(gap) = walk(&mut next, &below) {
                return Some(gap);
            }
        }
        None
    }
    let refs: Vec<&Condition> = members.iter().collect();
    walk(&mut Condition::default(), &refs)
}

/// Limit on the search for an assignment incompatible with every member.
const DENSITY_NODES: usize = 1 << 20;

/// A total assignment to the members' positions compatible with no member,
/// if any. The members are dense iff there is none.
fn product_gap(members: &[ProductCondition]) -> Result<Option<ProductCondition>, CohenError> {
    let mut coords: Vec<(usize, usize)> = members.iter().flat_map(|m| m.entries().map(|(k, _)| k)).collect();
    coords.sort_unstable();
    coords.dedup();
    let mut visited = 0;
    fn walk(
        at: usize,
        assign: &mut ProductCondition,
        coords: &[(usize, usize)],
        alive: &[&ProductCondition],
        visited: &mut usize,
    ) -> Result<Option<ProductCondition>, ()> {
        *visited += 1;
        if *visited > DENSITY_NODES {
            return Err(());
        }
        if alive.is_empty() {
            return Ok(Some(assign.clone()));
        }
        if alive.iter().any(|m| assign.extends(m)) {
            return Ok(None);
        }
        let (n, i) = coords[at];
        for bit in [false, true] {
            assign.insert(n, i, bit);
            let next: Vec<&ProductCondition> = alive
                .iter()
                .copied()
                .filter(|m| m.get(n, i).is_none_or(|b| b == bit))
                .collect();
            let gap = walk(at + 1, assign, coords, &next, visited)?;
            if gap.is_some() {
                return Ok(gap);
            }
        }
        assign.remove(n, i);
        Ok(None)
    }
    let alive: Vec<&ProductCondition> = members.iter().collect();
    walk(0, &mut ProductCondition::new(), &coords, &alive, &mut visited).map_err(|()| {
        CohenError::FamilySpec {
            spec: "list".into(),
            message: format!("density check exceeded {DENSITY_NODES} steps"),
        }
    })
}
