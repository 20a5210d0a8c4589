//! Exact Bernoulli product measures of clopen sets.
//!
//! Under `μ_p` every coordinate is an independent bit that equals 1 with
//! probability `p`. The measure of a clopen set is therefore a polynomial in
//! `p` with integer coefficients, computed here by one pass over the decision
//! diagram: `μ(node) = p·μ(hi) + (1−p)·μ(lo)`. Skipped coordinates integrate
//! out to 1, so no padding is needed.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::clopen::ClopenSet;
use crate::error::{Error, Result};

/// An exact probability: a reduced fraction in `[0, 1]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalProb(BigRational);

impl RationalProb {
    pub fn new(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::InvalidProbability(format!("{numer}/{denom}")));
        }
        Self::from_ratio(BigRational::new(numer.into(), denom.into()))
    }

    pub fn from_ratio(r: BigRational) -> Result<Self> {
        if r.is_negative() || r > BigRational::one() {
            return Err(Error::InvalidProbability(r.to_string()));
        }
        Ok(RationalProb(r))
    }

    pub fn zero() -> Self {
        RationalProb(BigRational::zero())
    }

    pub fn one() -> Self {
        RationalProb(BigRational::one())
    }

    pub fn half() -> Self {
        RationalProb(BigRational::new(1.into(), 2.into()))
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn into_ratio(self) -> BigRational {
        self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    /// `1 − p`.
    pub fn complement(&self) -> Self {
        RationalProb(BigRational::one() - &self.0)
    }

    /// Strictly between 0 and 1.
    pub fn is_interior(&self) -> bool {
        !self.is_zero() && !self.is_one()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl FromStr for RationalProb {
    type Err = Error;

    /// Accepts `a/b` or a bare integer.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidProbability(s.to_string());
        let t = s.trim();
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Self::from_ratio(BigRational::new(n, d)).map_err(|_| bad())
    }
}

/// Always rendered as `a/b`, including `0/1` and `1/1`.
impl fmt::Display for RationalProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for RationalProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for RationalProb {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RationalProb {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Dense integer polynomial in `p`, coefficient of `p^k` at index `k`,
/// without trailing zeros.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct MeasurePoly(Vec<BigInt>);

impl MeasurePoly {
    pub fn from_coeffs<I: IntoIterator<Item = BigInt>>(coeffs: I) -> Self {
        let mut c: Vec<BigInt> = coeffs.into_iter().collect();
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        MeasurePoly(c)
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)))
    }

    pub fn zero() -> Self {
        MeasurePoly(Vec::new())
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::from_coeffs([c])
    }

    /// The monomial `p`.
    pub fn p() -> Self {
        Self::from_i64s(&[0, 1])
    }

    /// `1 − p`.
    pub fn one_minus_p() -> Self {
        Self::from_i64s(&[1, -1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Horner evaluation at a rational point.
    pub fn eval(&self, p: &BigRational) -> BigRational {
        self.0
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * p + BigRational::from_integer(c.clone()))
    }

    pub fn eval_prob(&self, p: &RationalProb) -> BigRational {
        self.eval(p.as_ratio())
    }

    /// Coefficients as JSON text, lowest degree first.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("polynomial serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

impl fmt::Debug for MeasurePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl fmt::Display for MeasurePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Coeff {
    Small(i64),
    Big(String),
}

/// Serialized as a list of integers; coefficients outside `i64` are written
/// as decimal strings.
impl Serialize for MeasurePoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs: Vec<Coeff> = self
            .0
            .iter()
            .map(|c| c.to_i64().map_or_else(|| Coeff::Big(c.to_string()), Coeff::Small))
            .collect();
        coeffs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MeasurePoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let coeffs = Vec::<Coeff>::deserialize(deserializer)?;
        coeffs
            .into_iter()
            .map(|c| match c {
                Coeff::Small(v) => Ok(BigInt::from(v)),
                Coeff::Big(s) => s.parse().map_err(serde::de::Error::custom),
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(MeasurePoly::from_coeffs)
    }
}

impl Add for &MeasurePoly {
    type Output = MeasurePoly;

    fn add(self, rhs: &MeasurePoly) -> MeasurePoly {
        let n = self.0.len().max(rhs.0.len());
        MeasurePoly::from_coeffs((0..n).map(|i| {
            self.0.get(i).cloned().unwrap_or_default() + rhs.0.get(i).cloned().unwrap_or_default()
        }))
    }
}

impl Neg for &MeasurePoly {
    type Output = MeasurePoly;

    fn neg(self) -> MeasurePoly {
        MeasurePoly(self.0.iter().map(|c| -c).collect())
    }
}

impl Sub for &MeasurePoly {
    type Output = MeasurePoly;

    fn sub(self, rhs: &MeasurePoly) -> MeasurePoly {
        self + &(-rhs)
    }
}

impl Mul for &MeasurePoly {
    type Output = MeasurePoly;

    fn mul(self, rhs: &MeasurePoly) -> MeasurePoly {
        if self.is_zero() || rhs.is_zero() {
            return MeasurePoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in rhs.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        MeasurePoly::from_coeffs(out)
    }
}

/// `μ_p(a)` as a polynomial in `p`.
pub fn measure_poly(a: &ClopenSet) -> MeasurePoly {
    let p = MeasurePoly::p();
    let q = MeasurePoly::one_minus_p();
    a.fold(
        |bit| if bit { MeasurePoly::one() } else { MeasurePoly::zero() },
        |_, lo, hi| &(&p * hi) + &(&q * lo),
    )
}

/// Exact `μ_p(a)`.
pub fn measure_at(a: &ClopenSet, p: &RationalProb) -> RationalProb {
    let p1 = p.as_ratio().clone();
    let p0 = BigRational::one() - &p1;
    let value = a.fold(
        |bit| {
            if bit {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        },
        |_, lo, hi| &p1 * hi + &p0 * lo,
    );
    RationalProb(value)
}

/// `μ_p(a | b) = μ_p(a ∩ b) / μ_p(b)`.
pub fn conditional(a: &ClopenSet, b: &ClopenSet, p: &RationalProb) -> Result<RationalProb> {
    let mass = measure_at(b, p);
    if mass.is_zero() {
        return Err(Error::ZeroConditioningMass);
    }
    let joint = measure_at(&a.intersect(b), p);
    Ok(RationalProb(joint.0 / mass.0))
}

/// Equality as polynomials. Two measure polynomials agree at a single
/// transcendental `p`, or at infinitely many `p`, exactly when this holds.
pub fn poly_equal(q1: &MeasurePoly, q2: &MeasurePoly) -> bool {
    q1 == q2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::BinaryWord;

    fn cyl(s: &str) -> ClopenSet {
        ClopenSet::from_word(&s.parse::<BinaryWord>().unwrap())
    }

    fn prob(s: &str) -> RationalProb {
        s.parse().unwrap()
    }

    #[test]
    fn rational_prob_parsing() {
        assert_eq!(prob("2/4"), prob("1/2"));
        assert_eq!(prob("2/4").to_string(), "1/2");
        assert_eq!(prob("1").to_string(), "1/1");
        assert_eq!(prob("0").to_string(), "0/1");
        assert!("3/2".parse::<RationalProb>().is_err());
        assert!("-1/2".parse::<RationalProb>().is_err());
        assert!("1/0".parse::<RationalProb>().is_err());
        assert!("x".parse::<RationalProb>().is_err());
        assert_eq!(prob("1/3").complement(), prob("2/3"));
    }

    #[test]
    fn polynomial_examples() {
        assert_eq!(measure_poly(&cyl("1")), MeasurePoly::p());
        assert_eq!(measure_poly(&ClopenSet::empty()), MeasurePoly::zero());
        assert_eq!(measure_poly(&ClopenSet::full()), MeasurePoly::one());
        let weight_three = ClopenSet::from_words(
            &["111", "001", "101", "110"].map(|s| s.parse::<BinaryWord>().unwrap()),
        );
        assert_eq!(measure_poly(&weight_three), MeasurePoly::p());
        assert!(poly_equal(&measure_poly(&cyl("10")), &measure_poly(&cyl("01"))));
        assert_eq!(measure_poly(&cyl("10")), MeasurePoly::from_i64s(&[0, 1, -1]));
        assert!(!poly_equal(&measure_poly(&cyl("1")), &measure_poly(&cyl("11"))));
    }

    #[test]
    fn measure_examples() {
        assert_eq!(measure_at(&cyl("01"), &prob("1/2")), prob("1/4"));
        assert_eq!(measure_at(&cyl("11"), &prob("1/3")), prob("1/9"));
        assert_eq!(measure_at(&ClopenSet::literal(3, true), &prob("1/2")), prob("1/2"));
    }

    #[test]
    fn conditional_examples() {
        let a = cyl("10").union(&ClopenSet::literal(4, false));
        let p = prob("1/3");
        assert_eq!(conditional(&a, &ClopenSet::full(), &p).unwrap(), measure_at(&a, &p));
        assert!(conditional(&a, &a, &p).unwrap().is_one());
        assert_eq!(conditional(&cyl("11"), &cyl("1"), &prob("1/2")).unwrap(), prob("1/2"));
        assert_eq!(
            conditional(&a, &ClopenSet::empty(), &p),
            Err(Error::ZeroConditioningMass)
        );
        assert_eq!(
            conditional(&a, &cyl("1"), &prob("0")),
            Err(Error::ZeroConditioningMass)
        );
    }

    #[test]
    fn poly_arithmetic_and_json() {
        let a = MeasurePoly::from_i64s(&[1, 2]);
        let b = MeasurePoly::from_i64s(&[0, -2, 3]);
        assert_eq!(&a + &b, MeasurePoly::from_i64s(&[1, 0, 3]));
        assert_eq!(&a * &b, MeasurePoly::from_i64s(&[0, -2, -1, 6]));
        assert_eq!(&a - &a, MeasurePoly::zero());
        assert_eq!(b.degree(), Some(2));
        assert_eq!(MeasurePoly::zero().degree(), None);
        assert_eq!(b.to_json(), "[0,-2,3]");
        assert_eq!(MeasurePoly::from_json("[0,-2,3,0]").unwrap(), b);
        let huge = MeasurePoly::constant("123456789012345678901234567890".parse().unwrap());
        assert_eq!(MeasurePoly::from_json(&huge.to_json()).unwrap(), huge);
        assert_eq!(
            b.eval(prob("1/2").as_ratio()),
            BigRational::new((-1).into(), 4.into())
        );
    }
}
