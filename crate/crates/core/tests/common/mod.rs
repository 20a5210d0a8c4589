//! Brute-force oracles over explicit truth tables. Nothing here goes through
//! the decision-diagram code paths it is used to check.

#![allow(dead_code)]

use cantor_core::{BinaryWord, BitFunctional, ClopenSet, FiniteSupportPermutation, RationalProb};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

/// Bit `coord` of the depth-`depth` word with the given index.
pub fn bit(index: usize, coord: usize, depth: usize) -> bool {
    (index >> (depth - 1 - coord)) & 1 == 1
}

pub fn word(index: usize, depth: usize) -> Vec<bool> {
    (0..depth).map(|i| bit(index, i, depth)).collect()
}

pub fn index_of(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b))
}

/// Random boolean expression over cylinders and literals.
#[derive(Debug, Clone)]
pub enum Expr {
    Cyl(Vec<bool>),
    Lit(usize, bool),
    Union(Box<Expr>, Box<Expr>),
    Inter(Box<Expr>, Box<Expr>),
    Diff(Box<Expr>, Box<Expr>),
    Compl(Box<Expr>),
}

impl Expr {
    pub fn random<R: Rng>(rng: &mut R, depth: usize, size: usize) -> Expr {
        if size <= 1 {
            return if rng.gen_bool(0.5) {
                let len = rng.gen_range(0..=depth.min(6));
                Expr::Cyl((0..len).map(|_| rng.gen_bool(0.5)).collect())
            } else {
                Expr::Lit(rng.gen_range(0..depth), rng.gen_bool(0.5))
            };
        }
        let left = rng.gen_range(1..size);
        match rng.gen_range(0..4) {
            0 => Expr::Union(
                Box::new(Self::random(rng, depth, left)),
                Box::new(Self::random(rng, depth, size - left)),
            ),
            1 => Expr::Inter(
                Box::new(Self::random(rng, depth, left)),
                Box::new(Self::random(rng, depth, size - left)),
            ),
            2 => Expr::Diff(
                Box::new(Self::random(rng, depth, left)),
                Box::new(Self::random(rng, depth, size - left)),
            ),
            _ => Expr::Compl(Box::new(Self::random(rng, depth, size - 1))),
        }
    }

    pub fn to_set(&self) -> ClopenSet {
        match self {
            Expr::Cyl(w) => ClopenSet::from_word(&BinaryWord::from_bits(w.clone())),
            Expr::Lit(c, b) => ClopenSet::literal(*c, *b),
            Expr::Union(a, b) => a.to_set().union(&b.to_set()),
            Expr::Inter(a, b) => a.to_set().intersect(&b.to_set()),
            Expr::Diff(a, b) => a.to_set().difference(&b.to_set()),
            Expr::Compl(a) => a.to_set().complement(),
        }
    }

    /// Evaluates on every depth-`depth` word by plain boolean logic.
    pub fn table(&self, depth: usize) -> Vec<bool> {
        match self {
            Expr::Cyl(w) => (0..1 << depth)
                .map(|i| w.iter().enumerate().all(|(c, &b)| bit(i, c, depth) == b))
                .collect(),
            Expr::Lit(c, b) => (0..1 << depth).map(|i| bit(i, *c, depth) == *b).collect(),
            Expr::Union(a, b) => zip(&a.table(depth), &b.table(depth), |x, y| x || y),
            Expr::Inter(a, b) => zip(&a.table(depth), &b.table(depth), |x, y| x && y),
            Expr::Diff(a, b) => zip(&a.table(depth), &b.table(depth), |x, y| x && !y),
            Expr::Compl(a) => a.table(depth).iter().map(|x| !x).collect(),
        }
    }
}

fn zip(a: &[bool], b: &[bool], f: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect()
}

/// Random set given by a random truth table over `depth` coordinates.
pub fn random_table<R: Rng>(rng: &mut R, depth: usize, density: f64) -> Vec<bool> {
    (0..1 << depth).map(|_| rng.gen_bool(density)).collect()
}

/// Membership by walking the canonical antichain (independent of truth
/// tables produced by the library).
pub fn table_of(set: &ClopenSet, depth: usize) -> Vec<bool> {
    let words = set.antichain();
    (0..1 << depth)
        .map(|i| {
            words
                .iter()
                .any(|w| w.bits().iter().enumerate().all(|(c, &b)| bit(i, c, depth) == b))
        })
        .collect()
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// `Σ_{w ∈ set} p^{ones(w)} (1−p)^{zeros(w)}` over the truth table.
pub fn brute_measure(table: &[bool], depth: usize, p: &BigRational) -> BigRational {
    let q = BigRational::one() - p;
    let mut by_weight = vec![0i64; depth + 1];
    for (i, &member) in table.iter().enumerate() {
        if member {
            by_weight[(0..depth).filter(|&c| bit(i, c, depth)).count()] += 1;
        }
    }
    let mut total = BigRational::zero();
    for (ones, &count) in by_weight.iter().enumerate() {
        if count > 0 {
            total += BigRational::from_integer(count.into()) * pow(p, ones) * pow(&q, depth - ones);
        }
    }
    total
}

pub fn pow(x: &BigRational, k: usize) -> BigRational {
    (0..k).fold(BigRational::one(), |acc, _| acc * x)
}

pub fn brute_conditional(
    table: &[bool],
    cond: &[bool],
    depth: usize,
    p: &BigRational,
) -> Option<BigRational> {
    let joint: Vec<bool> = zip(table, cond, |x, y| x && y);
    let mass = brute_measure(cond, depth, p);
    if mass.is_zero() {
        None
    } else {
        Some(brute_measure(&joint, depth, p) / mass)
    }
}

pub fn prob(s: &str) -> RationalProb {
    s.parse().unwrap()
}

/// Cube of extensions of `sigma` as a depth-`depth` truth table.
pub fn cone_table(sigma: &[bool], depth: usize) -> Vec<bool> {
    (0..1 << depth)
        .map(|i| sigma.iter().enumerate().all(|(c, &b)| bit(i, c, depth) == b))
        .collect()
}

/// `{x : (x(f(0)), …, x(f(depth−1))) ∈ table}` by direct evaluation.
pub fn brute_pullback_preimage(
    f: &FiniteSupportPermutation,
    table: &[bool],
    depth: usize,
) -> Vec<bool> {
    (0..1 << depth)
        .map(|i| {
            let y: Vec<bool> = (0..depth).map(|n| bit(i, f.apply(n), depth)).collect();
            table[index_of(&y)]
        })
        .collect()
}

/// Discrepancy set of a bit functional by toggling bit `n` directly.
pub fn brute_discrepancy(
    phi: &BitFunctional,
    n: usize,
    b: usize,
    sigma: &[bool],
) -> Vec<bool> {
    let depth = phi.depth();
    (0..1usize << depth)
        .map(|i| {
            let mut w = word(i, depth);
            if !sigma.iter().enumerate().all(|(c, &s)| w[c] == s) {
                return false;
            }
            w[n] = true;
            let plus = phi.at_index(index_of(&w)).get(b);
            w[n] = false;
            let minus = phi.at_index(index_of(&w)).get(b);
            matches!((plus, minus), (Some(x), Some(y)) if x != y)
        })
        .collect()
}

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}
