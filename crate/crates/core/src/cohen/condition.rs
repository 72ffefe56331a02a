use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A condition of Add(ω,1): a finite bit sequence. `q ≤ p` iff `q`
/// end-extends `p`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Condition {
    bits: Vec<bool>,
}

impl Condition {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zeros(len: usize) -> Self {
        Self::new(vec![false; len])
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.bits.get(i).copied()
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        if i >= self.bits.len() {
            self.bits.resize(i + 1, false);
        }
        self.bits[i] = bit;
    }

    /// `self ≤ p`: `p` is a prefix of `self`.
    pub fn extends(&self, p: &Condition) -> bool {
        self.bits.starts_with(&p.bits)
    }

    pub fn compatible(&self, other: &Condition) -> bool {
        self.extends(other) || other.extends(self)
    }

    pub fn prefix(&self, len: usize) -> Condition {
        Condition::new(self.bits[..len.min(self.len())].to_vec())
    }

    /// Pads with zeros up to `len`.
    pub fn zero_fill(&mut self, len: usize) {
        if self.bits.len() < len {
            self.bits.resize(len, false);
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Condition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(format!("`{other}` is not a bit in `{s}`")),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Condition::new)
    }
}

impl From<Condition> for String {
    fn from(c: Condition) -> String {
        c.to_string()
    }
}

impl TryFrom<String> for Condition {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// A condition of Add(ω,ω): a finite partial map `(slice, position) → bit`.
/// `q ≤ p` iff `q`'s map extends `p`'s.
///
/// Serialized as one string per slice, `.` marking undefined positions.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "Vec<String>", try_from = "Vec<String>")]
pub struct ProductCondition {
    map: BTreeMap<(usize, usize), bool>,
}

impl ProductCondition {
    pub fn new() -> Self {
        Self::default()
    }

    /// The condition agreeing with `c` on slice `slice`.
    pub fn from_condition(slice: usize, c: &Condition) -> Self {
        let mut p = Self::new();
        for (i, &b) in c.bits().iter().enumerate() {
            p.map.insert((slice, i), b);
        }
        p
    }

    /// Slice `n` of the result is `slices[n]`.
    pub fn from_slices(slices: &[Condition]) -> Self {
        let mut p = Self::new();
        for (n, c) in slices.iter().enumerate() {
            for (i, &b) in c.bits().iter().enumerate() {
                p.map.insert((n, i), b);
            }
        }
        p
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, slice: usize, pos: usize) -> Option<bool> {
        self.map.get(&(slice, pos)).copied()
    }

    /// Sets a position, returning the previous value.
    pub fn insert(&mut self, slice: usize, pos: usize, bit: bool) -> Option<bool> {
        self.map.insert((slice, pos), bit)
    }

    pub fn remove(&mut self, slice: usize, pos: usize) -> Option<bool> {
        self.map.remove(&(slice, pos))
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), bool)> + '_ {
        self.map.iter().map(|(&k, &v)| (k, v))
    }

    /// `self ≤ p`.
    pub fn extends(&self, p: &ProductCondition) -> bool {
        p.map.iter().all(|(k, v)| self.map.get(k) == Some(v))
    }

    pub fn compatible(&self, other: &ProductCondition) -> bool {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .map
            .iter()
            .all(|(k, v)| large.map.get(k).is_none_or(|w| w == v))
    }

    /// The common extension of two compatible conditions.
    pub fn union(&self, other: &ProductCondition) -> Option<ProductCondition> {
        if !self.compatible(other) {
            return None;
        }
        let mut out = self.clone();
        out.map.extend(other.map.iter().map(|(&k, &v)| (k, v)));
        Some(out)
    }

    /// Entries of `self` absent from `base`.
    pub fn minus(&self, base: &ProductCondition) -> ProductCondition {
        ProductCondition {
            map: self
                .map
                .iter()
                .filter(|(k, _)| !base.map.contains_key(k))
                .map(|(&k, &v)| (k, v))
                .collect(),
        }
    }

    /// Entries on slices in `range`.
    pub fn restrict(&self, range: std::ops::Range<usize>) -> ProductCondition {
        ProductCondition {
            map: self
                .map
                .range((range.start, 0)..(range.end, 0))
                .map(|(&k, &v)| (k, v))
                .collect(),
        }
    }

    /// The same entries with every slice index raised by `by`.
    pub fn shifted(&self, by: usize) -> ProductCondition {
        ProductCondition {
            map: self.map.iter().map(|(&(n, i), &b)| ((n + by, i), b)).collect(),
        }
    }

    /// Slices mentioned, sorted.
    pub fn slices(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.map.keys().map(|&(n, _)| n).collect();
        out.dedup();
        out
    }

    /// Largest position mentioned, if any.
    pub fn max_position(&self) -> Option<usize> {
        self.map.keys().map(|&(_, i)| i).max()
    }

    /// Slice `n` read as a sequence, defined while positions are contiguous
    /// from 0.
    pub fn slice_prefix(&self, n: usize) -> Condition {
        let mut bits = Vec::new();
        while let Some(b) = self.get(n, bits.len()) {
            bits.push(b);
        }
        Condition::new(bits)
    }
}

impl From<ProductCondition> for Vec<String> {
    fn from(p: ProductCondition) -> Vec<String> {
        let slices = p.slices().last().map_or(0, |n| n + 1);
        let mut out = vec![String::new(); slices];
        for ((n, i), b) in p.entries() {
            let s = &mut out[n];
            while s.len() < i {
                s.push('.');
            }
            s.push(if b { '1' } else { '0' });
        }
        out
    }
}

impl TryFrom<Vec<String>> for ProductCondition {
    type Error = String;

    fn try_from(slices: Vec<String>) -> Result<Self, Self::Error> {
        let mut p = ProductCondition::new();
        for (n, s) in slices.iter().enumerate() {
            for (i, c) in s.chars().enumerate() {
                match c {
                    '0' => p.insert(n, i, false),
                    '1' => p.insert(n, i, true),
                    '.' => None,
                    other => return Err(format!("`{other}` is not a bit or `.` in `{s}`")),
                };
            }
        }
        Ok(p)
    }
}

impl fmt::Display for ProductCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let slices: Vec<String> = self.clone().into();
        write!(f, "[{}]", slices.join("|"))
    }
}
