//! Truncated Turing functionals: total tables from depth-`d` oracle words to
//! outputs.
//!
//! Two output shapes are supported. An [`Enumerator`] outputs a finite set of
//! naturals per oracle word (a stand-in for `W_e^X`). A [`BitFunctional`]
//! outputs a word with per-position divergence markers (a stand-in for
//! `Φ^A`). Both read only the first `depth` bits of the oracle.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::clopen::{ClopenSet, DEFAULT_DEPTH_CAP};
use crate::error::{Error, Result};
use crate::maps::FiniteSupportPermutation;
use crate::word::BinaryWord;

/// Output word of a bit functional; `None` marks a divergent position.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitOutput(Vec<Option<bool>>);

impl BitOutput {
    pub fn new(bits: Vec<Option<bool>>) -> Self {
        BitOutput(bits)
    }

    pub fn converged(word: &BinaryWord) -> Self {
        BitOutput(word.bits().iter().map(|&b| Some(b)).collect())
    }

    pub fn divergent(width: usize) -> Self {
        BitOutput(vec![None; width])
    }

    pub fn width(&self) -> usize {
        self.0.len()
    }

    /// Value at `b`; positions beyond the width diverge.
    pub fn get(&self, b: usize) -> Option<bool> {
        self.0.get(b).copied().flatten()
    }

    pub fn set(&mut self, b: usize, value: Option<bool>) {
        self.0[b] = value;
    }

    pub fn positions(&self) -> &[Option<bool>] {
        &self.0
    }
}

/// `0`, `1`, and `*` for divergence.
impl fmt::Display for BitOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            f.write_str(match b {
                Some(false) => "0",
                Some(true) => "1",
                None => "*",
            })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitOutput({self})")
    }
}

impl FromStr for BitOutput {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(Some(false)),
                '1' => Ok(Some(true)),
                '*' => Ok(None),
                _ => Err(Error::InvalidFunctional(format!("bad output symbol {c:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitOutput)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedFunctional<O> {
    depth: usize,
    table: Vec<O>,
}

pub type Enumerator = TruncatedFunctional<BTreeSet<usize>>;
pub type BitFunctional = TruncatedFunctional<BitOutput>;

impl<O> TruncatedFunctional<O> {
    /// `table[i]` is the output on `BinaryWord::from_index(i, depth)`.
    pub fn new(depth: usize, table: Vec<O>) -> Result<Self> {
        Self::with_cap(depth, table, DEFAULT_DEPTH_CAP)
    }

    pub fn with_cap(depth: usize, table: Vec<O>, cap: usize) -> Result<Self> {
        if depth > cap {
            return Err(Error::DepthExceeded { depth, cap });
        }
        if table.len() != 1 << depth {
            return Err(Error::InvalidFunctional(format!(
                "table has {} entries, expected {}",
                table.len(),
                1usize << depth
            )));
        }
        Ok(TruncatedFunctional { depth, table })
    }

    pub fn from_fn<F: FnMut(&BinaryWord) -> O>(depth: usize, mut f: F) -> Result<Self> {
        if depth > DEFAULT_DEPTH_CAP {
            return Err(Error::DepthExceeded {
                depth,
                cap: DEFAULT_DEPTH_CAP,
            });
        }
        let table = (0..1usize << depth)
            .map(|i| f(&BinaryWord::from_index(i, depth)))
            .collect();
        Ok(TruncatedFunctional { depth, table })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn at_index(&self, index: usize) -> &O {
        &self.table[index]
    }

    /// Output on an oracle word; only the first `depth` bits are read.
    pub fn output(&self, oracle: &BinaryWord) -> Result<&O> {
        if oracle.len() < self.depth {
            return Err(Error::InsufficientPrefix {
                needed: self.depth,
                got: oracle.len(),
            });
        }
        Ok(&self.table[oracle.prefix(self.depth).to_index()])
    }

    pub fn outputs(&self) -> &[O] {
        &self.table
    }

    pub fn outputs_mut(&mut self) -> &mut [O] {
        &mut self.table
    }

    /// The clopen set of oracles whose output satisfies `pred`.
    pub fn preimage<F: Fn(&O) -> bool>(&self, pred: F) -> ClopenSet {
        ClopenSet::from_fn(self.depth, |i| pred(&self.table[i]))
    }
}

impl Enumerator {
    /// `{Y : n ∈ Ψ^Y}`.
    pub fn enumerates(&self, n: usize) -> ClopenSet {
        self.preimage(|out| out.contains(&n))
    }
}

impl BitFunctional {
    /// Largest output width in the table.
    pub fn width(&self) -> usize {
        self.table.iter().map(BitOutput::width).max().unwrap_or(0)
    }

    /// `{A : Φ^A(b)↓ = value}`.
    pub fn converges_to(&self, b: usize, value: bool) -> ClopenSet {
        self.preimage(|out| out.get(b) == Some(value))
    }

    /// The exact depth-truncated tabulation of `f*` on outputs `0..width`.
    pub fn tabulate_pullback(
        f: &FiniteSupportPermutation,
        depth: usize,
        width: usize,
    ) -> Result<Self> {
        let needed = (0..width).map(|b| f.apply(b) + 1).max().unwrap_or(0);
        if needed > depth {
            return Err(Error::InsufficientPrefix { needed, got: depth });
        }
        Self::from_fn(depth, |a| {
            BitOutput((0..width).map(|b| Some(a.bits()[f.apply(b)])).collect())
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionalMode {
    Enumeration,
    Bits,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionalFile {
    depth: usize,
    mode: FunctionalMode,
    table: BTreeMap<String, serde_json::Value>,
}

/// A functional loaded from JSON, in either mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyFunctional {
    Enumeration(Enumerator),
    Bits(BitFunctional),
}

impl AnyFunctional {
    pub fn mode(&self) -> FunctionalMode {
        match self {
            AnyFunctional::Enumeration(_) => FunctionalMode::Enumeration,
            AnyFunctional::Bits(_) => FunctionalMode::Bits,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: FunctionalFile = serde_json::from_str(text)?;
        Self::from_value_file(file)
    }

    pub fn from_value(value: serde_json::Value) -> Result<Self> {
        let file: FunctionalFile = serde_json::from_value(value)?;
        Self::from_value_file(file)
    }

    fn from_value_file(file: FunctionalFile) -> Result<Self> {
        let depth = file.depth;
        if depth > DEFAULT_DEPTH_CAP {
            return Err(Error::DepthExceeded {
                depth,
                cap: DEFAULT_DEPTH_CAP,
            });
        }
        if file.table.len() != 1 << depth {
            return Err(Error::InvalidFunctional(format!(
                "table has {} entries, expected all {} words of length {depth}",
                file.table.len(),
                1usize << depth
            )));
        }
        let mut indexed = Vec::with_capacity(file.table.len());
        for (key, value) in file.table {
            let word: BinaryWord = key.parse()?;
            if word.len() != depth {
                return Err(Error::InvalidFunctional(format!(
                    "key {key:?} does not have length {depth}"
                )));
            }
            indexed.push((word.to_index(), key, value));
        }
        indexed.sort_by_key(|(index, _, _)| *index);
        match file.mode {
            FunctionalMode::Enumeration => {
                let table = indexed
                    .into_iter()
                    .map(|(_, key, value)| {
                        serde_json::from_value::<BTreeSet<usize>>(value).map_err(|e| {
                            Error::InvalidFunctional(format!("entry {key:?}: {e}"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(AnyFunctional::Enumeration(TruncatedFunctional::new(depth, table)?))
            }
            FunctionalMode::Bits => {
                let table = indexed
                    .into_iter()
                    .map(|(_, key, value)| match value {
                        serde_json::Value::String(s) => s.parse::<BitOutput>(),
                        other => Err(Error::InvalidFunctional(format!(
                            "entry {key:?}: expected a string, found {other}"
                        ))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(AnyFunctional::Bits(TruncatedFunctional::new(depth, table)?))
            }
        }
    }

    pub fn to_value(&self) -> serde_json::Value {
        let (depth, mode, table): (usize, FunctionalMode, BTreeMap<String, serde_json::Value>) =
            match self {
                AnyFunctional::Enumeration(e) => (
                    e.depth,
                    FunctionalMode::Enumeration,
                    e.table
                        .iter()
                        .enumerate()
                        .map(|(i, out)| {
                            (
                                BinaryWord::from_index(i, e.depth).to_string(),
                                serde_json::json!(out),
                            )
                        })
                        .collect(),
                ),
                AnyFunctional::Bits(b) => (
                    b.depth,
                    FunctionalMode::Bits,
                    b.table
                        .iter()
                        .enumerate()
                        .map(|(i, out)| {
                            (
                                BinaryWord::from_index(i, b.depth).to_string(),
                                serde_json::Value::String(out.to_string()),
                            )
                        })
                        .collect(),
                ),
            };
        serde_json::to_value(FunctionalFile { depth, mode, table })
            .expect("functional serialization is infallible")
    }

    pub fn to_json(&self) -> String {
        self.to_value().to_string()
    }
}
