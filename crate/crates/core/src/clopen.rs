//! Clopen subsets of Cantor space as reduced ordered decision diagrams.
//!
//! A [`ClopenSet`] is an immutable, canonical reduced ordered binary decision
//! diagram over coordinates `0, 1, 2, …` with coordinate 0 at the root. The
//! node table is stored in a canonical post-order, so two sets are
//! structurally equal (`==`) exactly when they denote the same subset of
//! `2^ω`. Every operation goes through a [`Builder`] that hash-conses nodes
//! and exports the result back into canonical form.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::word::{BinaryWord, ConstraintCylinder};

/// Largest depth accepted by operations that enumerate all `2^depth` words.
pub const DEFAULT_DEPTH_CAP: usize = 24;

/// Line used for the empty word in the antichain text format.
pub const EMPTY_WORD_LINE: &str = "-";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum Ref {
    Zero,
    One,
    Node(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct Node {
    var: u32,
    lo: Ref,
    hi: Ref,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum BoolOp {
    And,
    Or,
    Xor,
    Diff,
}

impl BoolOp {
    fn eval(self, a: bool, b: bool) -> bool {
        match self {
            BoolOp::And => a && b,
            BoolOp::Or => a || b,
            BoolOp::Xor => a != b,
            BoolOp::Diff => a && !b,
        }
    }
}

fn terminal(r: Ref) -> Option<bool> {
    match r {
        Ref::Zero => Some(false),
        Ref::One => Some(true),
        Ref::Node(_) => None,
    }
}

fn from_bool(b: bool) -> Ref {
    if b {
        Ref::One
    } else {
        Ref::Zero
    }
}

/// Hash-consing node store. Refs are only meaningful for the builder that
/// produced them.
#[derive(Debug, Default)]
pub(crate) struct Builder {
    nodes: Vec<Node>,
    unique: HashMap<Node, u32>,
}

impl Builder {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    fn node(&self, id: u32) -> Node {
        self.nodes[id as usize]
    }

    fn top(&self, r: Ref) -> u32 {
        match r {
            Ref::Node(id) => self.node(id).var,
            _ => u32::MAX,
        }
    }

    fn cofactors(&self, r: Ref, var: u32) -> (Ref, Ref) {
        match r {
            Ref::Node(id) => {
                let n = self.node(id);
                if n.var == var {
                    (n.lo, n.hi)
                } else {
                    (r, r)
                }
            }
            _ => (r, r),
        }
    }

    pub(crate) fn mk(&mut self, var: u32, lo: Ref, hi: Ref) -> Ref {
        if lo == hi {
            return lo;
        }
        let node = Node { var, lo, hi };
        if let Some(&id) = self.unique.get(&node) {
            return Ref::Node(id);
        }
        let id = u32::try_from(self.nodes.len()).expect("decision diagram node overflow");
        self.nodes.push(node);
        self.unique.insert(node, id);
        Ref::Node(id)
    }

    pub(crate) fn literal(&mut self, var: usize, bit: bool) -> Ref {
        let var = coord_u32(var);
        if bit {
            self.mk(var, Ref::Zero, Ref::One)
        } else {
            self.mk(var, Ref::One, Ref::Zero)
        }
    }

    /// Copies a canonical set into this builder. Canonical node tables list
    /// children before parents, so a single forward pass suffices.
    pub(crate) fn import(&mut self, set: &ClopenSet) -> Ref {
        let mut local = Vec::with_capacity(set.nodes.len());
        let remap = |r: Ref, local: &Vec<Ref>| match r {
            Ref::Node(id) => local[id as usize],
            t => t,
        };
        for n in set.nodes.iter() {
            let lo = remap(n.lo, &local);
            let hi = remap(n.hi, &local);
            let r = self.mk(n.var, lo, hi);
            local.push(r);
        }
        remap(set.root, &local)
    }

    pub(crate) fn apply(&mut self, op: BoolOp, a: Ref, b: Ref) -> Ref {
        let mut memo = HashMap::new();
        self.apply_rec(op, a, b, &mut memo)
    }

    fn apply_rec(
        &mut self,
        op: BoolOp,
        a: Ref,
        b: Ref,
        memo: &mut HashMap<(Ref, Ref), Ref>,
    ) -> Ref {
        if let (Some(x), Some(y)) = (terminal(a), terminal(b)) {
            return from_bool(op.eval(x, y));
        }
        match op {
            BoolOp::And => {
                if a == Ref::Zero || b == Ref::Zero {
                    return Ref::Zero;
                }
                if a == Ref::One || a == b {
                    return b;
                }
                if b == Ref::One {
                    return a;
                }
            }
            BoolOp::Or => {
                if a == Ref::One || b == Ref::One {
                    return Ref::One;
                }
                if a == Ref::Zero || a == b {
                    return b;
                }
                if b == Ref::Zero {
                    return a;
                }
            }
            BoolOp::Xor => {
                if a == b {
                    return Ref::Zero;
                }
                if a == Ref::Zero {
                    return b;
                }
                if b == Ref::Zero {
                    return a;
                }
            }
            BoolOp::Diff => {
                if a == Ref::Zero || b == Ref::One || a == b {
                    return Ref::Zero;
                }
                if b == Ref::Zero {
                    return a;
                }
            }
        }
        if let Some(&r) = memo.get(&(a, b)) {
            return r;
        }
        let var = self.top(a).min(self.top(b));
        let (a0, a1) = self.cofactors(a, var);
        let (b0, b1) = self.cofactors(b, var);
        let lo = self.apply_rec(op, a0, b0, memo);
        let hi = self.apply_rec(op, a1, b1, memo);
        let r = self.mk(var, lo, hi);
        memo.insert((a, b), r);
        r
    }

    pub(crate) fn not(&mut self, a: Ref) -> Ref {
        self.apply(BoolOp::Xor, a, Ref::One)
    }

    /// `(cond ∧ then) ∨ (¬cond ∧ otherwise)`.
    pub(crate) fn ite(&mut self, cond: Ref, then: Ref, otherwise: Ref) -> Ref {
        let yes = self.apply(BoolOp::And, cond, then);
        let no = self.apply(BoolOp::Diff, otherwise, cond);
        self.apply(BoolOp::Or, yes, no)
    }

    pub(crate) fn restrict(&mut self, a: Ref, var: usize, bit: bool) -> Ref {
        let var = coord_u32(var);
        let mut memo = HashMap::new();
        self.restrict_rec(a, var, bit, &mut memo)
    }

    fn restrict_rec(
        &mut self,
        a: Ref,
        var: u32,
        bit: bool,
        memo: &mut HashMap<u32, Ref>,
    ) -> Ref {
        let Ref::Node(id) = a else { return a };
        let n = self.node(id);
        if n.var > var {
            return a;
        }
        if n.var == var {
            return if bit { n.hi } else { n.lo };
        }
        if let Some(&r) = memo.get(&id) {
            return r;
        }
        let lo = self.restrict_rec(n.lo, var, bit, memo);
        let hi = self.restrict_rec(n.hi, var, bit, memo);
        let r = self.mk(n.var, lo, hi);
        memo.insert(id, r);
        r
    }

    /// Substitutes every coordinate `v` of `a` by the function
    /// `subst(self, v)`, i.e. returns `{X : (subst_v(X))_v ∈ a}`.
    pub(crate) fn compose<F>(&mut self, a: Ref, mut subst: F) -> Ref
    where
        F: FnMut(&mut Builder, usize) -> Ref,
    {
        let mut memo: HashMap<u32, Ref> = HashMap::new();
        let mut cache: HashMap<u32, Ref> = HashMap::new();
        self.compose_rec(a, &mut subst, &mut memo, &mut cache)
    }

    fn compose_rec<F>(
        &mut self,
        a: Ref,
        subst: &mut F,
        memo: &mut HashMap<u32, Ref>,
        cache: &mut HashMap<u32, Ref>,
    ) -> Ref
    where
        F: FnMut(&mut Builder, usize) -> Ref,
    {
        let Ref::Node(id) = a else { return a };
        if let Some(&r) = memo.get(&id) {
            return r;
        }
        let n = self.node(id);
        let lo = self.compose_rec(n.lo, subst, memo, cache);
        let hi = self.compose_rec(n.hi, subst, memo, cache);
        let cond = match cache.get(&n.var) {
            Some(&c) => c,
            None => {
                let c = subst(self, n.var as usize);
                cache.insert(n.var, c);
                c
            }
        };
        let r = self.ite(cond, hi, lo);
        memo.insert(id, r);
        r
    }

    /// Builds the set whose membership on depth-`depth` words is given by
    /// `member(index)` (index as in [`BinaryWord::from_index`]).
    pub(crate) fn tabulate<F: Fn(usize) -> bool>(&mut self, depth: usize, member: &F) -> Ref {
        self.tabulate_rec(0, depth, 0, member)
    }

    fn tabulate_rec<F: Fn(usize) -> bool>(
        &mut self,
        level: usize,
        depth: usize,
        prefix: usize,
        member: &F,
    ) -> Ref {
        if level == depth {
            return from_bool(member(prefix));
        }
        let lo = self.tabulate_rec(level + 1, depth, prefix << 1, member);
        let hi = self.tabulate_rec(level + 1, depth, (prefix << 1) | 1, member);
        self.mk(level as u32, lo, hi)
    }

    /// Exports `root` as a canonical set: reachable nodes in post-order,
    /// low child visited first.
    pub(crate) fn export(&self, root: Ref) -> ClopenSet {
        let mut out = Vec::new();
        let mut seen: HashMap<u32, u32> = HashMap::new();
        let root = self.export_rec(root, &mut out, &mut seen);
        ClopenSet {
            nodes: out.into(),
            root,
        }
    }

    fn export_rec(&self, r: Ref, out: &mut Vec<Node>, seen: &mut HashMap<u32, u32>) -> Ref {
        let Ref::Node(id) = r else { return r };
        if let Some(&new) = seen.get(&id) {
            return Ref::Node(new);
        }
        let n = self.node(id);
        let lo = self.export_rec(n.lo, out, seen);
        let hi = self.export_rec(n.hi, out, seen);
        out.push(Node { var: n.var, lo, hi });
        let new = (out.len() - 1) as u32;
        seen.insert(id, new);
        Ref::Node(new)
    }
}

fn coord_u32(coord: usize) -> u32 {
    u32::try_from(coord)
        .ok()
        .filter(|&c| c < u32::MAX)
        .expect("coordinate out of range")
}

/// Exact finite representation of a clopen subset of `2^ω`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ClopenSet {
    nodes: Arc<[Node]>,
    root: Ref,
}

impl ClopenSet {
    pub fn empty() -> Self {
        ClopenSet {
            nodes: Arc::from([]),
            root: Ref::Zero,
        }
    }

    pub fn full() -> Self {
        ClopenSet {
            nodes: Arc::from([]),
            root: Ref::One,
        }
    }

    /// `{X : X(coord) = bit}`.
    pub fn literal(coord: usize, bit: bool) -> Self {
        let mut b = Builder::new();
        let r = b.literal(coord, bit);
        b.export(r)
    }

    /// The cylinder `[σ]` of sequences extending `σ`.
    pub fn from_word(word: &BinaryWord) -> Self {
        Self::from_cylinder(&word.to_cylinder())
    }

    /// `{X : X(i) = b for every constraint ⟨i, b⟩}`.
    pub fn from_cylinder(cylinder: &ConstraintCylinder) -> Self {
        let mut b = Builder::new();
        // Deepest coordinate first, so each mk sits above its child.
        let mut acc = Ref::One;
        let pairs: Vec<_> = cylinder.iter().collect();
        for &(coord, bit) in pairs.iter().rev() {
            let var = coord_u32(coord);
            acc = if bit {
                b.mk(var, Ref::Zero, acc)
            } else {
                b.mk(var, acc, Ref::Zero)
            };
        }
        b.export(acc)
    }

    /// Union of cylinders `[σ]` over the given words.
    pub fn from_words<'a, I: IntoIterator<Item = &'a BinaryWord>>(words: I) -> Self {
        words
            .into_iter()
            .fold(Self::empty(), |acc, w| acc.union(&Self::from_word(w)))
    }

    /// Builds a set of support at most `depth` from its truth table over
    /// all depth-`depth` words, indexed as in [`BinaryWord::from_index`].
    pub fn from_truth_table(depth: usize, table: &[bool]) -> Result<Self> {
        Self::from_truth_table_capped(depth, table, DEFAULT_DEPTH_CAP)
    }

    pub fn from_truth_table_capped(depth: usize, table: &[bool], cap: usize) -> Result<Self> {
        check_depth(depth, cap)?;
        let expected = 1usize << depth;
        if table.len() != expected {
            return Err(Error::TruthTableSize {
                expected,
                got: table.len(),
            });
        }
        Ok(Self::from_fn(depth, |i| table[i]))
    }

    /// Builds a set from a membership predicate on depth-`depth` word
    /// indices. Uncapped; callers enforce their own depth limit.
    pub(crate) fn from_fn<F: Fn(usize) -> bool>(depth: usize, member: F) -> Self {
        let mut b = Builder::new();
        let r = b.tabulate(depth, &member);
        b.export(r)
    }

    fn binary(&self, other: &Self, op: BoolOp) -> Self {
        let mut b = Builder::new();
        let x = b.import(self);
        let y = b.import(other);
        let r = b.apply(op, x, y);
        b.export(r)
    }

    pub fn union(&self, other: &Self) -> Self {
        self.binary(other, BoolOp::Or)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        self.binary(other, BoolOp::And)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.binary(other, BoolOp::Diff)
    }

    pub fn symmetric_difference(&self, other: &Self) -> Self {
        self.binary(other, BoolOp::Xor)
    }

    pub fn complement(&self) -> Self {
        let mut b = Builder::new();
        let x = b.import(self);
        let r = b.not(x);
        b.export(r)
    }

    /// Semantic equality; identical to `==` because the form is canonical.
    pub fn equals(&self, other: &Self) -> bool {
        self == other
    }

    pub fn is_empty(&self) -> bool {
        self.root == Ref::Zero
    }

    pub fn is_full(&self) -> bool {
        self.root == Ref::One
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.intersect(other).is_empty()
    }

    /// One more than the largest coordinate the set depends on; 0 for the
    /// empty and full sets.
    pub fn support_depth(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| n.var as usize + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn depends_on(&self, coord: usize) -> bool {
        self.nodes.iter().any(|n| n.var as usize == coord)
    }

    /// No node has identical children and coordinates strictly increase
    /// along every edge.
    pub fn is_reduced(&self) -> bool {
        let var_of = |r: Ref| match r {
            Ref::Node(id) => Some(self.nodes[id as usize].var),
            _ => None,
        };
        self.nodes.iter().all(|n| {
            n.lo != n.hi
                && var_of(n.lo).is_none_or(|v| v > n.var)
                && var_of(n.hi).is_none_or(|v| v > n.var)
        })
    }

    /// Membership of any sequence whose bits are given by `bit`.
    pub fn eval<F: Fn(usize) -> bool>(&self, bit: F) -> bool {
        let mut r = self.root;
        loop {
            match r {
                Ref::Zero => return false,
                Ref::One => return true,
                Ref::Node(id) => {
                    let n = self.nodes[id as usize];
                    r = if bit(n.var as usize) { n.hi } else { n.lo };
                }
            }
        }
    }

    /// Membership of every infinite extension of `word`; the word must cover
    /// the support.
    pub fn contains(&self, word: &BinaryWord) -> Result<bool> {
        let needed = self.support_depth();
        if word.len() < needed {
            return Err(Error::InsufficientPrefix {
                needed,
                got: word.len(),
            });
        }
        Ok(self.eval(|i| word.bits()[i]))
    }

    pub fn truth_table(&self, depth: usize) -> Result<Vec<bool>> {
        self.truth_table_capped(depth, DEFAULT_DEPTH_CAP)
    }

    pub fn truth_table_capped(&self, depth: usize, cap: usize) -> Result<Vec<bool>> {
        check_depth(depth, cap)?;
        let needed = self.support_depth();
        if depth < needed {
            return Err(Error::InsufficientPrefix { needed, got: depth });
        }
        Ok((0..1usize << depth)
            .map(|idx| self.eval(|i| (idx >> (depth - 1 - i)) & 1 == 1))
            .collect())
    }

    /// `{X : X with coordinate `coord` forced to `bit` ∈ self}`.
    pub fn restrict(&self, coord: usize, bit: bool) -> Self {
        let mut b = Builder::new();
        let x = b.import(self);
        let r = b.restrict(x, coord, bit);
        b.export(r)
    }

    /// `{X : (X(map(0)), X(map(1)), …) ∈ self}` for an injective `map`.
    pub fn rename<F: Fn(usize) -> usize>(&self, map: F) -> Self {
        let mut b = Builder::new();
        let x = b.import(self);
        let r = b.compose(x, |b, v| b.literal(map(v), true));
        b.export(r)
    }

    /// The canonical antichain: the maximal cylinders contained in the set,
    /// in lexicographic order. Their cylinders partition the set.
    pub fn antichain(&self) -> Vec<BinaryWord> {
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        self.collect_antichain(self.root, &mut prefix, &mut out);
        out
    }

    fn collect_antichain(&self, r: Ref, prefix: &mut Vec<bool>, out: &mut Vec<BinaryWord>) {
        match r {
            Ref::Zero => {}
            Ref::One => out.push(BinaryWord::from_bits(prefix.clone())),
            Ref::Node(id) => {
                let n = self.nodes[id as usize];
                let (lo, hi) = if n.var as usize == prefix.len() {
                    (n.lo, n.hi)
                } else {
                    (r, r)
                };
                prefix.push(false);
                self.collect_antichain(lo, prefix, out);
                prefix.pop();
                prefix.push(true);
                self.collect_antichain(hi, prefix, out);
                prefix.pop();
            }
        }
    }

    /// Structural fold over the diagram: `leaf(bit)` at terminals and
    /// `node(coord, lo, hi)` at internal nodes, shared nodes evaluated once.
    pub fn fold<T: Clone, L, N>(&self, leaf: L, node: N) -> T
    where
        L: Fn(bool) -> T,
        N: Fn(usize, &T, &T) -> T,
    {
        let zero = leaf(false);
        let one = leaf(true);
        let mut values: Vec<T> = Vec::with_capacity(self.nodes.len());
        let get = |r: Ref, values: &Vec<T>| -> T {
            match r {
                Ref::Zero => zero.clone(),
                Ref::One => one.clone(),
                Ref::Node(id) => values[id as usize].clone(),
            }
        };
        for n in self.nodes.iter() {
            let lo = get(n.lo, &values);
            let hi = get(n.hi, &values);
            values.push(node(n.var as usize, &lo, &hi));
        }
        get(self.root, &values)
    }

    /// Antichain text format: one word per line, `-` for the empty word.
    pub fn to_antichain_text(&self) -> String {
        let mut s = String::new();
        for w in self.antichain() {
            if w.is_empty() {
                s.push_str(EMPTY_WORD_LINE);
            } else {
                s.push_str(&w.to_string());
            }
            s.push('\n');
        }
        s
    }

    /// Parses the antichain text format. Blank lines and `#` comments are
    /// ignored. The words need not be canonical or incomparable.
    pub fn from_antichain_text(text: &str) -> Result<Self> {
        let mut words = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let word = if line == EMPTY_WORD_LINE {
                BinaryWord::empty()
            } else {
                line.parse().map_err(|_| Error::Parse {
                    line: i + 1,
                    message: format!("invalid word {line:?}"),
                })?
            };
            words.push(word);
        }
        Ok(Self::from_words(&words))
    }

    pub fn to_cylinders(&self) -> Vec<ConstraintCylinder> {
        self.antichain().iter().map(BinaryWord::to_cylinder).collect()
    }

    pub fn from_cylinders<'a, I: IntoIterator<Item = &'a ConstraintCylinder>>(cyls: I) -> Self {
        cyls.into_iter()
            .fold(Self::empty(), |acc, c| acc.union(&Self::from_cylinder(c)))
    }

    /// Cylinder-list JSON text, `{"cylinders":[{"coord":bit,…},…]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("clopen serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Parses either serialization, choosing JSON when the text starts with `{`.
    pub fn parse_any(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::from_json(text)
        } else {
            Self::from_antichain_text(text)
        }
    }
}

fn check_depth(depth: usize, cap: usize) -> Result<()> {
    if depth > cap {
        Err(Error::DepthExceeded { depth, cap })
    } else {
        Ok(())
    }
}

impl fmt::Debug for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let words: Vec<String> = self
            .antichain()
            .iter()
            .map(|w| {
                if w.is_empty() {
                    "ε".to_string()
                } else {
                    w.to_string()
                }
            })
            .collect();
        write!(f, "ClopenSet{{{}}}", words.join(", "))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClopenRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cylinders: Option<Vec<BTreeMap<String, u8>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    antichain: Option<Vec<String>>,
}

impl Serialize for ClopenSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let cylinders = self
            .to_cylinders()
            .iter()
            .map(|c| {
                c.iter()
                    .map(|(coord, bit)| (coord.to_string(), u8::from(bit)))
                    .collect::<BTreeMap<_, _>>()
            })
            .collect();
        ClopenRepr {
            cylinders: Some(cylinders),
            antichain: None,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ClopenSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ClopenRepr::deserialize(deserializer)?;
        let mut set = ClopenSet::empty();
        if let Some(cyls) = repr.cylinders {
            for raw in cyls {
                let mut cyl = ConstraintCylinder::new();
                for (coord, bit) in raw {
                    let coord: usize = coord
                        .parse()
                        .map_err(|_| D::Error::custom(format!("invalid coordinate {coord:?}")))?;
                    if coord >= u32::MAX as usize {
                        return Err(D::Error::custom(format!("coordinate {coord} out of range")));
                    }
                    let bit = match bit {
                        0 => false,
                        1 => true,
                        other => return Err(D::Error::custom(format!("invalid bit {other}"))),
                    };
                    cyl = cyl.with(coord, bit).map_err(D::Error::custom)?;
                }
                set = set.union(&ClopenSet::from_cylinder(&cyl));
            }
        }
        if let Some(words) = repr.antichain {
            for w in words {
                let word: BinaryWord = w.parse().map_err(D::Error::custom)?;
                set = set.union(&ClopenSet::from_word(&word));
            }
        }
        Ok(set)
    }
}
