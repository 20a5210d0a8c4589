//! Finite binary words and coordinate constraints.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A finite binary word `σ ∈ 2^{<ω}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryWord(Vec<bool>);

impl BinaryWord {
    pub fn empty() -> Self {
        BinaryWord(Vec::new())
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BinaryWord(bits)
    }

    /// Word of length `len` whose bits spell `index` with coordinate 0 as the
    /// most significant bit, so numeric order agrees with lexicographic order.
    pub fn from_index(index: usize, len: usize) -> Self {
        BinaryWord(
            (0..len)
                .map(|i| (index >> (len - 1 - i)) & 1 == 1)
                .collect(),
        )
    }

    pub fn to_index(&self) -> usize {
        self.0
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | usize::from(b))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.0.get(i).copied()
    }

    pub fn ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn zeros(&self) -> usize {
        self.len() - self.ones()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn child(&self, bit: bool) -> Self {
        let mut bits = self.0.clone();
        bits.push(bit);
        BinaryWord(bits)
    }

    pub fn prefix(&self, len: usize) -> Self {
        BinaryWord(self.0[..len.min(self.len())].to_vec())
    }

    pub fn is_prefix_of(&self, other: &BinaryWord) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn comparable(&self, other: &BinaryWord) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    /// Copy with bit `n` forced to `bit`; the word must cover `n`.
    pub fn with_bit(&self, n: usize, bit: bool) -> Self {
        let mut bits = self.0.clone();
        bits[n] = bit;
        BinaryWord(bits)
    }

    /// All words of length `len` extending `self`, in lexicographic order.
    pub fn extensions(&self, len: usize) -> impl Iterator<Item = BinaryWord> + '_ {
        let free = len.saturating_sub(self.len());
        (0..1usize << free).map(move |tail| {
            let mut bits = self.0.clone();
            bits.extend(BinaryWord::from_index(tail, free).0);
            BinaryWord(bits)
        })
    }

    /// The constraint map `{⟨i, σ(i)⟩ : i < |σ|}`.
    pub fn to_cylinder(&self) -> ConstraintCylinder {
        ConstraintCylinder(self.0.iter().copied().enumerate().collect())
    }
}

impl From<Vec<bool>> for BinaryWord {
    fn from(bits: Vec<bool>) -> Self {
        BinaryWord(bits)
    }
}

impl FromStr for BinaryWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidWord(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()
            .map(BinaryWord)
    }
}

impl fmt::Display for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for BinaryWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BinaryWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A finite partial assignment of coordinates to bits. The empty map is the
/// whole space.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ConstraintCylinder(BTreeMap<usize, bool>);

impl ConstraintCylinder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds from pairs, rejecting a coordinate that is given two different
    /// bits. Repeating an identical pair is harmless.
    pub fn from_pairs<I: IntoIterator<Item = (usize, bool)>>(pairs: I) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (coord, bit) in pairs {
            if let Some(prev) = map.insert(coord, bit) {
                if prev != bit {
                    return Err(Error::ConflictingConstraint { coord });
                }
            }
        }
        Ok(ConstraintCylinder(map))
    }

    pub fn with(mut self, coord: usize, bit: bool) -> Result<Self> {
        match self.0.insert(coord, bit) {
            Some(prev) if prev != bit => Err(Error::ConflictingConstraint { coord }),
            _ => Ok(self),
        }
    }

    pub fn get(&self, coord: usize) -> Option<bool> {
        self.0.get(&coord).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, bool)> + '_ {
        self.0.iter().map(|(&c, &b)| (c, b))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn support_depth(&self) -> usize {
        self.0.keys().next_back().map_or(0, |&c| c + 1)
    }
}
