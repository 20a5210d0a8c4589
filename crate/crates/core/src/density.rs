//! Conditional densities along prefixes and majority-vote enumeration.

use std::collections::BTreeSet;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::clopen::ClopenSet;
use crate::error::{Error, Result};
use crate::functional::Enumerator;
use crate::measure::{conditional, measure_at, RationalProb};
use crate::word::BinaryWord;

/// `μ_p(a | [x↾n])` for `n = 0..=|x|`. Entries are `None` where the prefix
/// cylinder has measure zero.
pub fn density_profile(
    a: &ClopenSet,
    x: &BinaryWord,
    p: &RationalProb,
) -> Vec<Option<RationalProb>> {
    (0..=x.len())
        .map(|n| conditional(a, &ClopenSet::from_word(&x.prefix(n)), p).ok())
        .collect()
}

/// `Ξ(a)`, the points at which `a` has density 1.
///
/// Descends the prefix tree and keeps a cylinder once the conditional
/// measure of `a` on it reaches 1; drops it once it reaches 0. Past the
/// support every conditional is 0 or 1, so the descent terminates, and for
/// clopen `a` the result is `a` itself.
pub fn density_one_set(a: &ClopenSet) -> ClopenSet {
    let p = RationalProb::half();
    let mut kept = Vec::new();
    let mut stack = vec![BinaryWord::empty()];
    while let Some(w) = stack.pop() {
        let d = conditional(a, &ClopenSet::from_word(&w), &p).expect("μ_1/2 of a cylinder is positive");
        if d.is_one() {
            kept.push(w);
        } else if !d.is_zero() {
            stack.push(w.child(true));
            stack.push(w.child(false));
        }
    }
    let xi = ClopenSet::from_words(&kept);
    assert_eq!(
        measure_at(&xi, &p),
        measure_at(a, &p),
        "density-one set must carry the same measure"
    );
    xi
}

/// First word `σ` (shortest first, then lexicographic) with `|σ| ≤ max_len`
/// and `μ_p(s | [σ]) > 1/2`.
pub fn find_density_witness(
    s: &ClopenSet,
    p: &RationalProb,
    max_len: usize,
) -> Option<BinaryWord> {
    let half = RationalProb::half();
    (0..=max_len)
        .flat_map(|len| (0..1usize << len).map(move |i| BinaryWord::from_index(i, len)))
        .find(|sigma| {
            conditional(s, &ClopenSet::from_word(sigma), p).is_ok_and(|d| d > half)
        })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vote {
    pub n: usize,
    /// `μ_p({Y ≻ σ : n ∈ Ψ^Y} | [σ])`.
    pub measure: RationalProb,
    pub elected: bool,
}

fn check_vote_inputs(psi: &Enumerator, sigma: &BinaryWord, p: &RationalProb) -> Result<ClopenSet> {
    if sigma.len() > psi.depth() {
        return Err(Error::PreconditionViolated(format!(
            "|σ| = {} exceeds functional depth {}",
            sigma.len(),
            psi.depth()
        )));
    }
    let cone = ClopenSet::from_word(sigma);
    if measure_at(&cone, p).is_zero() {
        return Err(Error::ZeroConditioningMass);
    }
    Ok(cone)
}

/// Per-candidate vote measures for `n < window`.
pub fn vote_measures(
    psi: &Enumerator,
    sigma: &BinaryWord,
    p: &RationalProb,
    window: usize,
) -> Result<Vec<Vote>> {
    let cone = check_vote_inputs(psi, sigma, p)?;
    let half = BigRational::new(1.into(), 2.into());
    (0..window)
        .map(|n| {
            let measure = conditional(&psi.enumerates(n), &cone, p)?;
            Ok(Vote {
                n,
                elected: *measure.as_ratio() > half,
                measure,
            })
        })
        .collect()
}

/// `{n < window : μ_p({Y ≻ σ : n ∈ Ψ^Y} | [σ]) > 1/2}`. Ties at exactly 1/2
/// are excluded.
pub fn majority_vote_enumerate(
    psi: &Enumerator,
    sigma: &BinaryWord,
    p: &RationalProb,
    window: usize,
) -> Result<BTreeSet<usize>> {
    Ok(vote_measures(psi, sigma, p, window)?
        .into_iter()
        .filter(|v| v.elected)
        .map(|v| v.n)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> BinaryWord {
        s.parse().unwrap()
    }

    fn cyl(s: &str) -> ClopenSet {
        ClopenSet::from_word(&w(s))
    }

    fn prob(s: &str) -> RationalProb {
        s.parse().unwrap()
    }

    #[test]
    fn profile_examples() {
        let p = prob("1/3");
        let full = density_profile(&ClopenSet::full(), &w("0101"), &p);
        assert!(full.iter().all(|d| d.as_ref().unwrap().is_one()));
        let prof = density_profile(&cyl("1"), &w("110"), &p);
        let rendered: Vec<String> = prof.iter().map(|d| d.as_ref().unwrap().to_string()).collect();
        assert_eq!(rendered, ["1/3", "1/1", "1/1", "1/1"]);
        let zero_mass = density_profile(&cyl("1"), &w("01"), &prob("0"));
        assert!(zero_mass[0].is_some());
        assert!(zero_mass[2].is_none());
    }

    #[test]
    fn density_one_of_clopen_is_itself() {
        assert!(density_one_set(&ClopenSet::full()).is_full());
        assert!(density_one_set(&ClopenSet::empty()).is_empty());
        let a = cyl("10").union(&ClopenSet::literal(3, true));
        assert_eq!(density_one_set(&a), a);
    }

    #[test]
    fn witness_scan() {
        let s = cyl("011").union(&cyl("0100"));
        // μ(s | [01]) = 1/2 + 1/4 > 1/2
        assert_eq!(find_density_witness(&s, &prob("1/2"), 4), Some(w("01")));
        assert_eq!(find_density_witness(&ClopenSet::empty(), &prob("1/2"), 3), None);
    }

    #[test]
    fn votes() {
        let target: BTreeSet<usize> = [1, 3].into();
        let constant = Enumerator::from_fn(3, |_| target.clone()).unwrap();
        let got = majority_vote_enumerate(&constant, &w("1"), &prob("1/2"), 3).unwrap();
        assert_eq!(got, [1].into());

        // n = 0 is enumerated on exactly half of the extensions of σ
        let tie = Enumerator::from_fn(3, |y| if y.bits()[2] { [0].into() } else { BTreeSet::new() })
            .unwrap();
        let votes = vote_measures(&tie, &w("0"), &prob("1/2"), 1).unwrap();
        assert_eq!(votes[0].measure.to_string(), "1/2");
        assert!(majority_vote_enumerate(&tie, &w("0"), &prob("1/2"), 1).unwrap().is_empty());

        assert!(matches!(
            majority_vote_enumerate(&tie, &w("0000"), &prob("1/2"), 1),
            Err(Error::PreconditionViolated(_))
        ));
        assert_eq!(
            majority_vote_enumerate(&tie, &w("1"), &prob("0"), 1),
            Err(Error::ZeroConditioningMass)
        );
    }
}
