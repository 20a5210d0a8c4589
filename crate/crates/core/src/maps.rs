//! Maps of Cantor space and their action on clopen sets.
//!
//! * [`FiniteSupportPermutation`]: a bijection `f` of ω that is the identity
//!   from `window` on. Its pullback is `f*(A)(n) = A(f(n))`.
//! * [`BlockCode`]: applies a bijection of `{0,1}^k` to consecutive k-blocks.
//! * [`CoordinateShift`]: `A ↦ A ∪ {n}` or `A ↦ A ∖ {n}`.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::clopen::{Builder, ClopenSet, Ref};
use crate::error::{Error, Result};
use crate::measure::{measure_poly, poly_equal};
use crate::word::BinaryWord;

/// A permutation of ω equal to the identity outside `0..window`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PermutationFile", into = "PermutationFile")]
pub struct FiniteSupportPermutation {
    table: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PermutationFile {
    window: usize,
    map: Vec<usize>,
}

impl TryFrom<PermutationFile> for FiniteSupportPermutation {
    type Error = Error;

    fn try_from(file: PermutationFile) -> Result<Self> {
        if file.map.len() != file.window {
            return Err(Error::NotABijection(format!(
                "window {} but {} entries",
                file.window,
                file.map.len()
            )));
        }
        FiniteSupportPermutation::new(file.map)
    }
}

impl From<FiniteSupportPermutation> for PermutationFile {
    fn from(f: FiniteSupportPermutation) -> Self {
        PermutationFile {
            window: f.window(),
            map: f.table,
        }
    }
}

impl FiniteSupportPermutation {
    /// `table[n] = f(n)` for `n < table.len()`.
    pub fn new(table: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; table.len()];
        for (n, &v) in table.iter().enumerate() {
            if v >= table.len() {
                return Err(Error::NotABijection(format!(
                    "f({n}) = {v} lies outside the window {}",
                    table.len()
                )));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::NotABijection(format!("{v} is hit twice")));
            }
        }
        Ok(FiniteSupportPermutation { table })
    }

    pub fn identity(window: usize) -> Self {
        FiniteSupportPermutation {
            table: (0..window).collect(),
        }
    }

    /// The transposition `(a b)` on the smallest window containing both.
    pub fn transposition(a: usize, b: usize) -> Self {
        let mut f = Self::identity(a.max(b) + 1);
        f.table.swap(a, b);
        f
    }

    /// Uniformly random permutation of `0..window`.
    pub fn random<R: Rng + ?Sized>(window: usize, rng: &mut R) -> Self {
        let mut table: Vec<usize> = (0..window).collect();
        table.shuffle(rng);
        FiniteSupportPermutation { table }
    }

    pub fn window(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, n: usize) -> usize {
        self.table.get(n).copied().unwrap_or(n)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.table.len()];
        for (n, &v) in self.table.iter().enumerate() {
            inv[v] = n;
        }
        FiniteSupportPermutation { table: inv }
    }

    /// `self ∘ other`, i.e. `n ↦ self(other(n))`.
    pub fn compose(&self, other: &Self) -> Self {
        let window = self.window().max(other.window());
        FiniteSupportPermutation {
            table: (0..window).map(|n| self.apply(other.apply(n))).collect(),
        }
    }

    /// The same map on a larger window.
    pub fn extended(&self, window: usize) -> Self {
        FiniteSupportPermutation {
            table: (0..window.max(self.window())).map(|n| self.apply(n)).collect(),
        }
    }

    /// Equality as maps of ω, ignoring window size.
    pub fn same_map(&self, other: &Self) -> bool {
        let window = self.window().max(other.window());
        (0..window).all(|n| self.apply(n) == other.apply(n))
    }

    pub fn is_identity(&self) -> bool {
        self.table.iter().enumerate().all(|(n, &v)| n == v)
    }
}

impl fmt::Debug for FiniteSupportPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.table)
    }
}

/// Prefix of length `len` of `f*(x)`, generic over the alphabet.
pub fn pullback_sequence<T: Copy>(
    f: &FiniteSupportPermutation,
    x: &[T],
    len: usize,
) -> Result<Vec<T>> {
    let needed = (0..len).map(|n| f.apply(n) + 1).max().unwrap_or(0);
    if x.len() < needed {
        return Err(Error::InsufficientPrefix {
            needed,
            got: x.len(),
        });
    }
    Ok((0..len).map(|n| x[f.apply(n)]).collect())
}

/// The word `y` of length `len` with `y(n) = x(f(n))`.
pub fn pullback_prefix(
    f: &FiniteSupportPermutation,
    x: &BinaryWord,
    len: usize,
) -> Result<BinaryWord> {
    pullback_sequence(f, x.bits(), len).map(BinaryWord::from_bits)
}

/// `{X : f*(X) ∈ a}`. A cylinder `[σ]` maps to the constraint cylinder
/// `{⟨f(n), σ(n)⟩ : n < |σ|}`; in general each coordinate `m` of `a` is
/// renamed to `f(m)`.
pub fn pullback_preimage(f: &FiniteSupportPermutation, a: &ClopenSet) -> ClopenSet {
    a.rename(|m| f.apply(m))
}

/// `{f*(X) : X ∈ a}`, the preimage under `f⁻¹`.
pub fn pullback_image(f: &FiniteSupportPermutation, a: &ClopenSet) -> ClopenSet {
    pullback_preimage(&f.inverse(), a)
}

/// Length-`len` prefix of `f*(η ∘ f⁻¹)`, which always equals `η`'s prefix.
/// The relabeled sequence `g = η ∘ f⁻¹` is materialized only as far as the
/// pullback reads it.
pub fn pullback_of_relabeled_inverse<T: Copy>(
    f: &FiniteSupportPermutation,
    eta: &[T],
    len: usize,
) -> Result<Vec<T>> {
    let inv = f.inverse();
    let reach = (0..len).map(|n| f.apply(n) + 1).max().unwrap_or(0);
    let relabeled = (0..reach)
        .map(|m| {
            let src = inv.apply(m);
            eta.get(src).copied().ok_or(Error::InsufficientPrefix {
                needed: src + 1,
                got: eta.len(),
            })
        })
        .collect::<Result<Vec<T>>>()?;
    pullback_sequence(f, &relabeled, len)
}

/// A block code: `h` applied to each consecutive block of `k` bits.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BlockCodeFile", into = "BlockCodeFile")]
pub struct BlockCode {
    k: usize,
    /// `map[w] = h(w)` with blocks indexed as in [`BinaryWord::from_index`].
    map: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlockCodeFile {
    k: usize,
    map: BTreeMap<String, String>,
}

impl TryFrom<BlockCodeFile> for BlockCode {
    type Error = Error;

    fn try_from(file: BlockCodeFile) -> Result<Self> {
        let k = file.k;
        if k == 0 || k > 16 {
            return Err(Error::NotABijection(format!("block length {k} out of range 1..=16")));
        }
        if file.map.len() != 1 << k {
            return Err(Error::NotABijection(format!(
                "expected {} entries, found {}",
                1usize << k,
                file.map.len()
            )));
        }
        let mut map = vec![usize::MAX; 1 << k];
        for (src, dst) in &file.map {
            let s: BinaryWord = src.parse()?;
            let d: BinaryWord = dst.parse()?;
            if s.len() != k || d.len() != k {
                return Err(Error::NotABijection(format!(
                    "entry {src:?} -> {dst:?} is not a pair of length-{k} blocks"
                )));
            }
            map[s.to_index()] = d.to_index();
        }
        BlockCode::new(k, map)
    }
}

impl From<BlockCode> for BlockCodeFile {
    fn from(c: BlockCode) -> Self {
        BlockCodeFile {
            k: c.k,
            map: c
                .map
                .iter()
                .enumerate()
                .map(|(s, &d)| {
                    (
                        BinaryWord::from_index(s, c.k).to_string(),
                        BinaryWord::from_index(d, c.k).to_string(),
                    )
                })
                .collect(),
        }
    }
}

impl BlockCode {
    pub fn new(k: usize, map: Vec<usize>) -> Result<Self> {
        if k == 0 || k > 16 {
            return Err(Error::NotABijection(format!("block length {k} out of range 1..=16")));
        }
        if map.len() != 1 << k {
            return Err(Error::NotABijection(format!(
                "expected {} images, found {}",
                1usize << k,
                map.len()
            )));
        }
        // Reuse the permutation check on the block indices.
        FiniteSupportPermutation::new(map.clone())?;
        Ok(BlockCode { k, map })
    }

    /// Builds from `(block, image)` word pairs; unlisted blocks are fixed.
    pub fn from_pairs(k: usize, pairs: &[(&str, &str)]) -> Result<Self> {
        let mut map: Vec<usize> = (0..1 << k).collect();
        for (src, dst) in pairs {
            let s: BinaryWord = src.parse()?;
            let d: BinaryWord = dst.parse()?;
            if s.len() != k || d.len() != k {
                return Err(Error::NotABijection(format!("{src} -> {dst} has wrong length")));
            }
            map[s.to_index()] = d.to_index();
        }
        Self::new(k, map)
    }

    pub fn identity(k: usize) -> Self {
        BlockCode {
            k,
            map: (0..1 << k).collect(),
        }
    }

    /// The code acting on each block by `h(w)(i) = w(g(i))`.
    pub fn from_coordinate_permutation(g: &FiniteSupportPermutation) -> Self {
        let k = g.window();
        let map = (0..1usize << k)
            .map(|w| {
                let word = BinaryWord::from_index(w, k);
                let image: Vec<bool> = (0..k).map(|i| word.bits()[g.apply(i)]).collect();
                BinaryWord::from_bits(image).to_index()
            })
            .collect();
        BlockCode { k, map }
    }

    pub fn random<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Self {
        let mut map: Vec<usize> = (0..1 << k).collect();
        map.shuffle(rng);
        BlockCode { k, map }
    }

    pub fn block_len(&self) -> usize {
        self.k
    }

    pub fn image_of(&self, block: &BinaryWord) -> BinaryWord {
        BinaryWord::from_index(self.map[block.to_index()], self.k)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (s, &d) in self.map.iter().enumerate() {
            inv[d] = s;
        }
        BlockCode { k: self.k, map: inv }
    }

    /// Applies the code to a word whose length is a multiple of `k`.
    pub fn apply_word(&self, x: &BinaryWord) -> Result<BinaryWord> {
        if !x.len().is_multiple_of(self.k) {
            let needed = x.len().div_ceil(self.k) * self.k;
            return Err(Error::InsufficientPrefix {
                needed,
                got: x.len(),
            });
        }
        let mut out = Vec::with_capacity(x.len());
        for block in x.bits().chunks(self.k) {
            let w = BinaryWord::from_bits(block.to_vec());
            out.extend_from_slice(self.image_of(&w).bits());
        }
        Ok(BinaryWord::from_bits(out))
    }
}

impl fmt::Debug for BlockCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let moved: Vec<String> = self
            .map
            .iter()
            .enumerate()
            .filter(|(s, d)| s != *d)
            .map(|(s, &d)| {
                format!(
                    "{}->{}",
                    BinaryWord::from_index(s, self.k),
                    BinaryWord::from_index(d, self.k)
                )
            })
            .collect();
        write!(f, "BlockCode(k={}, {})", self.k, moved.join(" "))
    }
}

/// `{X : c(X) ∈ a}`. Output coordinate `jk+i` is bit `i` of `h` applied to
/// block `j` of `X`, so each coordinate of `a` is replaced by that block
/// function.
pub fn blockcode_preimage(c: &BlockCode, a: &ClopenSet) -> ClopenSet {
    let k = c.k;
    let mut b = Builder::new();
    let root = b.import(a);
    let r = b.compose(root, |b, coord| {
        let (block, i) = (coord / k, coord % k);
        output_bit(b, c, block * k, i)
    });
    b.export(r)
}

/// `{c(X) : X ∈ a}`.
pub fn blockcode_image(c: &BlockCode, a: &ClopenSet) -> ClopenSet {
    blockcode_preimage(&c.inverse(), a)
}

/// Decision diagram of `X ↦ h(X[offset..offset+k])(i)`.
fn output_bit(b: &mut Builder, c: &BlockCode, offset: usize, i: usize) -> Ref {
    let k = c.k;
    let member = |w: usize| (c.map[w] >> (k - 1 - i)) & 1 == 1;
    let local = b.tabulate(k, &member);
    if offset == 0 {
        return local;
    }
    // Shift the block-local coordinates 0..k up to offset..offset+k.
    let shifted = b.export(local).rename(|v| v + offset);
    b.import(&shifted)
}

/// Both characterizations of `μ_p`-preservation for every `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BernoulliCertificate {
    /// Every cylinder `[σ]`, `|σ| ≤ k`, has a preimage with the same
    /// measure polynomial.
    pub polynomial: bool,
    /// `h` preserves the Hamming weight of every block.
    pub hamming_weight: bool,
}

impl BernoulliCertificate {
    pub fn preserves(&self) -> bool {
        self.polynomial && self.hamming_weight
    }
}

/// Certifies both characterizations and checks that they agree.
pub fn certify_bernoulli(c: &BlockCode) -> BernoulliCertificate {
    let polynomial = (0..=c.k).all(|len| {
        (0..1usize << len).all(|idx| {
            let sigma = ClopenSet::from_word(&BinaryWord::from_index(idx, len));
            poly_equal(
                &measure_poly(&blockcode_preimage(c, &sigma)),
                &measure_poly(&sigma),
            )
        })
    });
    let hamming_weight = c
        .map
        .iter()
        .enumerate()
        .all(|(s, &d)| s.count_ones() == d.count_ones());
    let cert = BernoulliCertificate {
        polynomial,
        hamming_weight,
    };
    assert_eq!(
        cert.polynomial, cert.hamming_weight,
        "measure-polynomial and Hamming-weight criteria disagree for {c:?}"
    );
    cert
}

/// True iff the block code preserves `μ_p` for every `p`.
pub fn preserves_all_bernoulli(c: &BlockCode) -> bool {
    certify_bernoulli(c).preserves()
}

/// The permutation `g` of block positions with `h(w)(i) = w(g(i))` for all
/// blocks `w`, if one exists.
pub fn induced_by_coordinate_permutation(c: &BlockCode) -> Option<FiniteSupportPermutation> {
    let k = c.k;
    let bit = |w: usize, i: usize| (w >> (k - 1 - i)) & 1 == 1;
    let table = (0..k)
        .map(|i| (0..k).find(|&j| (0..1usize << k).all(|w| bit(c.map[w], i) == bit(w, j))))
        .collect::<Option<Vec<usize>>>()?;
    FiniteSupportPermutation::new(table).ok()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftDirection {
    Add,
    Remove,
}

/// `A ↦ A ∪ {n}` (add) or `A ↦ A ∖ {n}` (remove).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoordinateShift {
    pub n: usize,
    pub direction: ShiftDirection,
}

impl CoordinateShift {
    pub fn add(n: usize) -> Self {
        CoordinateShift {
            n,
            direction: ShiftDirection::Add,
        }
    }

    pub fn remove(n: usize) -> Self {
        CoordinateShift {
            n,
            direction: ShiftDirection::Remove,
        }
    }

    fn forced_bit(&self) -> bool {
        self.direction == ShiftDirection::Add
    }

    pub fn apply_word(&self, x: &BinaryWord) -> Result<BinaryWord> {
        if x.len() <= self.n {
            return Err(Error::InsufficientPrefix {
                needed: self.n + 1,
                got: x.len(),
            });
        }
        Ok(x.with_bit(self.n, self.forced_bit()))
    }
}

/// `{A : s(A) ∈ e}`: coordinate `n` of `e` is fixed and the result no
/// longer depends on it.
pub fn shift_preimage(s: &CoordinateShift, e: &ClopenSet) -> ClopenSet {
    e.restrict(s.n, s.forced_bit())
}
