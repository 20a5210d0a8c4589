//! Recovering a permutation from a noisy truncated functional.
//!
//! Setting: `Φ` agrees with the pullback `f*` on a set `E` of oracles with
//! `μ(E | [σ]) ≥ 95%`. Toggling oracle bit `n` flips exactly one output bit
//! of `f*`, namely `f⁻¹(n)`. So the discrepancy set
//!
//! ```text
//! D_{n,b} = {A ≻ σ : Φ^{A+n}(b)↓ ≠ Φ^{A−n}(b)↓}
//! ```
//!
//! has conditional measure at least 80% for `b = f⁻¹(n)` and at most 20% for
//! every other `b`. Scanning `b` and accepting the first candidate at or
//! above the threshold therefore computes `f⁻¹(n)`.
//!
//! Measures are computed exactly on decision diagrams, or estimated by
//! seeded Monte Carlo sampling of extensions of `σ`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clopen::ClopenSet;
use crate::error::{Error, Result};
use crate::functional::{AnyFunctional, BitFunctional, BitOutput};
use crate::maps::{shift_preimage, CoordinateShift, FiniteSupportPermutation};
use crate::measure::{conditional, RationalProb};
use crate::word::BinaryWord;

pub fn default_promise_level() -> RationalProb {
    RationalProb::new(95, 100).expect("constant")
}

pub fn default_accept_threshold() -> RationalProb {
    RationalProb::new(80, 100).expect("constant")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoveryMode {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryConfig {
    pub promise_level: RationalProb,
    pub accept_threshold: RationalProb,
    pub p: RationalProb,
    pub mode: RecoveryMode,
    /// Samples per coordinate; every candidate `b` is scored on the same
    /// samples. Monte Carlo mode only.
    pub samples: usize,
    pub seed: u64,
    /// Largest candidate examined is `search_bound − 1`; defaults to the
    /// functional's output width.
    pub search_bound: Option<usize>,
    /// Margin at which the Hoeffding failure bound is reported.
    pub mc_delta: f64,
}

impl Default for RecoveryConfig {
    fn default() -> Self {
        RecoveryConfig {
            promise_level: default_promise_level(),
            accept_threshold: default_accept_threshold(),
            p: RationalProb::half(),
            mode: RecoveryMode::Exact,
            samples: 20_000,
            seed: 0,
            search_bound: None,
            mc_delta: 0.05,
        }
    }
}

impl RecoveryConfig {
    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        RecoveryConfig {
            mode: RecoveryMode::MonteCarlo,
            samples,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.accept_threshold.is_zero() || self.accept_threshold >= self.promise_level {
            return Err(Error::InvalidConfig(format!(
                "need 0 < accept_threshold ({}) < promise_level ({})",
                self.accept_threshold, self.promise_level
            )));
        }
        if self.mode == RecoveryMode::MonteCarlo && self.samples == 0 {
            return Err(Error::InvalidConfig("monte carlo mode needs samples > 0".into()));
        }
        if !self.p.is_interior() {
            return Err(Error::InvalidConfig(format!("p = {} must lie in (0, 1)", self.p)));
        }
        if !(self.mc_delta > 0.0 && self.mc_delta < 1.0) {
            return Err(Error::InvalidConfig(format!("mc_delta {} not in (0, 1)", self.mc_delta)));
        }
        Ok(())
    }

    /// The thresholds are derived for `p = 1/2` only.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.p != RationalProb::half() {
            out.push(format!(
                "p = {}: the {}/{} thresholds are only justified at p = 1/2",
                self.p, self.promise_level, self.accept_threshold
            ));
        }
        out
    }
}

/// How a synthesized instance was produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorInfo {
    pub seed: u64,
    pub corruption_mass: RationalProb,
    pub corrupted_extensions: usize,
    pub style: CorruptionStyle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecoveryInstance {
    pub phi: BitFunctional,
    pub sigma: BinaryWord,
    /// Coordinates `0..window` are inverted.
    pub window: usize,
    /// Known answer `n ↦ f⁻¹(n)` for synthesized instances.
    pub expected_inverse: Option<Vec<usize>>,
    pub generator: Option<GeneratorInfo>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    phi: serde_json::Value,
    sigma: BinaryWord,
    window: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    expected_inverse: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generator: Option<GeneratorInfo>,
}

impl RecoveryInstance {
    pub fn new(phi: BitFunctional, sigma: BinaryWord, window: usize) -> Result<Self> {
        let inst = RecoveryInstance {
            phi,
            sigma,
            window,
            expected_inverse: None,
            generator: None,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        let depth = self.phi.depth();
        if self.sigma.len() > depth {
            return Err(Error::InvalidInstance(format!(
                "|σ| = {} exceeds depth {depth}",
                self.sigma.len()
            )));
        }
        if self.window > depth {
            return Err(Error::InvalidInstance(format!(
                "window {} exceeds depth {depth}; toggled coordinates must be read by Φ",
                self.window
            )));
        }
        if let Some(expected) = &self.expected_inverse {
            if expected.len() != self.window {
                return Err(Error::InvalidInstance(format!(
                    "expected_inverse has {} entries for window {}",
                    expected.len(),
                    self.window
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let file = InstanceFile {
            phi: AnyFunctional::Bits(self.phi.clone()).to_value(),
            sigma: self.sigma.clone(),
            window: self.window,
            expected_inverse: self.expected_inverse.clone(),
            generator: self.generator.clone(),
        };
        serde_json::to_string(&file).expect("instance serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)?;
        let AnyFunctional::Bits(phi) = AnyFunctional::from_value(file.phi)? else {
            return Err(Error::InvalidInstance("phi must be a bits-mode functional".into()));
        };
        let inst = RecoveryInstance {
            phi,
            sigma: file.sigma,
            window: file.window,
            expected_inverse: file.expected_inverse,
            generator: file.generator,
        };
        inst.validate()?;
        Ok(inst)
    }
}

/// `E = {A ≻ σ : Φ^A(b)↓ = A(f(b)) for all b < output_window}`.
pub fn agreement_set(
    phi: &BitFunctional,
    f: &FiniteSupportPermutation,
    sigma: &BinaryWord,
    output_window: usize,
) -> Result<ClopenSet> {
    let depth = phi.depth();
    let needed = (0..output_window).map(|b| f.apply(b) + 1).max().unwrap_or(0);
    if needed > depth {
        return Err(Error::InsufficientPrefix { needed, got: depth });
    }
    let agrees = ClopenSet::from_fn(depth, |idx| {
        let out = phi.at_index(idx);
        (0..output_window).all(|b| {
            let oracle_bit = (idx >> (depth - 1 - f.apply(b))) & 1 == 1;
            out.get(b) == Some(oracle_bit)
        })
    });
    Ok(agrees.intersect(&ClopenSet::from_word(sigma)))
}

/// Decision sets `{A : Φ^A(b)↓ = v}` for each output position, shared by
/// every discrepancy query on one functional.
struct DecisionSets {
    cone: ClopenSet,
    zeros: Vec<ClopenSet>,
    ones: Vec<ClopenSet>,
}

impl DecisionSets {
    fn new(phi: &BitFunctional, sigma: &BinaryWord, bound: usize) -> Self {
        DecisionSets {
            cone: ClopenSet::from_word(sigma),
            zeros: (0..bound).map(|b| phi.converges_to(b, false)).collect(),
            ones: (0..bound).map(|b| phi.converges_to(b, true)).collect(),
        }
    }

    fn discrepancy(&self, n: usize, b: usize) -> ClopenSet {
        let add = CoordinateShift::add(n);
        let remove = CoordinateShift::remove(n);
        let up_one = shift_preimage(&add, &self.ones[b]);
        let up_zero = shift_preimage(&add, &self.zeros[b]);
        let down_one = shift_preimage(&remove, &self.ones[b]);
        let down_zero = shift_preimage(&remove, &self.zeros[b]);
        let differs = up_one
            .intersect(&down_zero)
            .union(&up_zero.intersect(&down_one));
        differs.intersect(&self.cone)
    }
}

/// `D_{n,b} = {A ≻ σ : Φ^{A+n}(b)↓ ≠ Φ^{A−n}(b)↓}`. A divergent side is never
/// a discrepancy.
pub fn discrepancy_set(
    phi: &BitFunctional,
    n: usize,
    b: usize,
    sigma: &BinaryWord,
) -> Result<ClopenSet> {
    if n >= phi.depth() {
        return Err(Error::PreconditionViolated(format!(
            "coordinate {n} is not read by a depth-{} functional",
            phi.depth()
        )));
    }
    let sets = DecisionSets {
        cone: ClopenSet::from_word(sigma),
        zeros: vec![phi.converges_to(b, false)],
        ones: vec![phi.converges_to(b, true)],
    };
    Ok(sets.discrepancy(n, 0))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub b: usize,
    /// `μ_σ(D_{n,b})`, exact or as the empirical frequency `hits / samples`.
    pub measure: RationalProb,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hits: Option<usize>,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    Found { b: usize },
    NotFound,
    Ambiguous { candidates: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordinateScan {
    pub n: usize,
    /// `n < |σ|`: toggling `n` leaves the cone, so one side of every pair is
    /// outside the promised region.
    pub below_sigma: bool,
    pub candidates: Vec<Candidate>,
    pub verdict: Verdict,
    /// Smallest accepted measure minus the threshold.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accept_margin: Option<RationalProb>,
    /// Threshold minus the largest rejected measure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reject_margin: Option<RationalProb>,
}

impl CoordinateScan {
    fn from_candidates(n: usize, sigma_len: usize, candidates: Vec<Candidate>, threshold: &RationalProb) -> Self {
        let accepted: Vec<usize> = candidates.iter().filter(|c| c.accepted).map(|c| c.b).collect();
        let verdict = match accepted.as_slice() {
            [] => Verdict::NotFound,
            [b] => Verdict::Found { b: *b },
            _ => Verdict::Ambiguous {
                candidates: accepted.clone(),
            },
        };
        let gap = |hi: &RationalProb, lo: &RationalProb| {
            RationalProb::from_ratio(hi.as_ratio() - lo.as_ratio()).ok()
        };
        let accept_margin = candidates
            .iter()
            .filter(|c| c.accepted)
            .map(|c| &c.measure)
            .min()
            .and_then(|m| gap(m, threshold));
        let reject_margin = candidates
            .iter()
            .filter(|c| !c.accepted)
            .map(|c| &c.measure)
            .max()
            .and_then(|m| gap(threshold, m));
        CoordinateScan {
            n,
            below_sigma: n < sigma_len,
            candidates,
            verdict,
            accept_margin,
            reject_margin,
        }
    }

    pub fn result(&self) -> Result<usize> {
        match &self.verdict {
            Verdict::Found { b } => Ok(*b),
            Verdict::NotFound => Err(Error::NotFound {
                n: self.n,
                bound: self.candidates.len(),
            }),
            Verdict::Ambiguous { candidates } => Err(Error::Ambiguous {
                n: self.n,
                count: candidates.len(),
            }),
        }
    }
}

fn search_bound(instance: &RecoveryInstance, config: &RecoveryConfig) -> usize {
    config.search_bound.unwrap_or_else(|| instance.phi.width())
}

fn check_coordinate(instance: &RecoveryInstance, n: usize) -> Result<()> {
    if n >= instance.window {
        return Err(Error::PreconditionViolated(format!(
            "coordinate {n} lies outside the window {}",
            instance.window
        )));
    }
    Ok(())
}

fn scan_exact(
    instance: &RecoveryInstance,
    sets: &DecisionSets,
    n: usize,
    config: &RecoveryConfig,
) -> Result<CoordinateScan> {
    let candidates = (0..sets.ones.len())
        .map(|b| {
            let measure = conditional(&sets.discrepancy(n, b), &sets.cone, &config.p)?;
            Ok(Candidate {
                b,
                accepted: measure >= config.accept_threshold,
                measure,
                hits: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoordinateScan::from_candidates(
        n,
        instance.sigma.len(),
        candidates,
        &config.accept_threshold,
    ))
}

/// Per-coordinate generator seed, so coordinates can be scanned in any order.
fn coordinate_seed(seed: u64, n: usize) -> u64 {
    seed ^ (n as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn scan_monte_carlo(
    instance: &RecoveryInstance,
    bound: usize,
    n: usize,
    config: &RecoveryConfig,
) -> Result<CoordinateScan> {
    let phi = &instance.phi;
    let depth = phi.depth();
    let sigma_len = instance.sigma.len();
    let prefix = instance.sigma.to_index() << (depth - sigma_len);
    let p = config.p.to_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(coordinate_seed(config.seed, n));
    let mut hits = vec![0usize; bound];
    let toggle = 1usize << (depth - 1 - n);
    for _ in 0..config.samples {
        let mut idx = prefix;
        for pos in sigma_len..depth {
            if rng.gen_bool(p) {
                idx |= 1 << (depth - 1 - pos);
            }
        }
        let plus: &BitOutput = phi.at_index(idx | toggle);
        let minus: &BitOutput = phi.at_index(idx & !toggle);
        for (b, hit) in hits.iter_mut().enumerate() {
            if let (Some(x), Some(y)) = (plus.get(b), minus.get(b)) {
                if x != y {
                    *hit += 1;
                }
            }
        }
    }
    let total = BigInt::from(config.samples);
    let candidates = hits
        .into_iter()
        .enumerate()
        .map(|(b, h)| {
            let measure = RationalProb::from_ratio(BigRational::new(BigInt::from(h), total.clone()))?;
            Ok(Candidate {
                b,
                accepted: measure >= config.accept_threshold,
                measure,
                hits: Some(h),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoordinateScan::from_candidates(
        n,
        sigma_len,
        candidates,
        &config.accept_threshold,
    ))
}

/// Scores every candidate `b < search_bound` for coordinate `n` without
/// deciding success.
pub fn scan_coordinate(
    instance: &RecoveryInstance,
    n: usize,
    config: &RecoveryConfig,
) -> Result<CoordinateScan> {
    config.validate()?;
    instance.validate()?;
    check_coordinate(instance, n)?;
    let bound = search_bound(instance, config);
    match config.mode {
        RecoveryMode::Exact => {
            let sets = DecisionSets::new(&instance.phi, &instance.sigma, bound);
            scan_exact(instance, &sets, n, config)
        }
        RecoveryMode::MonteCarlo => scan_monte_carlo(instance, bound, n, config),
    }
}

/// The unique `b < search_bound` with `μ_σ(D_{n,b}) ≥ accept_threshold`.
pub fn recover_inverse_at(
    instance: &RecoveryInstance,
    n: usize,
    config: &RecoveryConfig,
) -> Result<usize> {
    scan_coordinate(instance, n, config)?.result()
}

/// Hoeffding failure bound `2·exp(−2Nδ²)` for one empirical frequency.
pub fn hoeffding_alpha(samples: usize, delta: f64) -> f64 {
    2.0 * (-2.0 * samples as f64 * delta * delta).exp()
}

/// Smallest `N` with `N ≥ ln(2/α) / (2δ²)`.
pub fn hoeffding_samples(delta: f64, alpha: f64) -> usize {
    ((2.0 / alpha).ln() / (2.0 * delta * delta)).ceil() as usize
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloBound {
    pub samples: usize,
    pub delta: f64,
    /// Failure probability of one accept/reject decision whose exact
    /// measure is at least `delta` from the threshold.
    pub alpha: f64,
    /// Samples needed to reach `alpha = 1e-3` at `delta`.
    pub samples_for_1e_3: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub mode: RecoveryMode,
    pub p: RationalProb,
    pub promise_level: RationalProb,
    pub accept_threshold: RationalProb,
    pub search_bound: usize,
    pub coordinates: Vec<CoordinateScan>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<MonteCarloBound>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl RecoveryReport {
    /// `n ↦ b` for every coordinate with a unique accepted candidate.
    pub fn table(&self) -> BTreeMap<usize, usize> {
        self.coordinates
            .iter()
            .filter_map(|c| match c.verdict {
                Verdict::Found { b } => Some((c.n, b)),
                _ => None,
            })
            .collect()
    }

    /// Recovered inverse as a map, or the first failure: a coordinate
    /// without a unique candidate, or two coordinates sharing a target.
    pub fn inverse_table(&self) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(self.coordinates.len());
        let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
        for scan in &self.coordinates {
            let b = scan.result()?;
            if let Some(&first) = owner.get(&b) {
                return Err(Error::NonInjective {
                    first,
                    second: scan.n,
                    target: b,
                });
            }
            owner.insert(b, scan.n);
            out.push(b);
        }
        Ok(out)
    }
}

/// Scans every coordinate of the window, in parallel.
pub fn scan_permutation(
    instance: &RecoveryInstance,
    config: &RecoveryConfig,
) -> Result<RecoveryReport> {
    config.validate()?;
    instance.validate()?;
    let bound = search_bound(instance, config);
    let coordinates = match config.mode {
        RecoveryMode::Exact => {
            let sets = DecisionSets::new(&instance.phi, &instance.sigma, bound);
            (0..instance.window)
                .into_par_iter()
                .map(|n| scan_exact(instance, &sets, n, config))
                .collect::<Result<Vec<_>>>()?
        }
        RecoveryMode::MonteCarlo => (0..instance.window)
            .into_par_iter()
            .map(|n| scan_monte_carlo(instance, bound, n, config))
            .collect::<Result<Vec<_>>>()?,
    };
    let monte_carlo = (config.mode == RecoveryMode::MonteCarlo).then(|| MonteCarloBound {
        samples: config.samples,
        delta: config.mc_delta,
        alpha: hoeffding_alpha(config.samples, config.mc_delta),
        samples_for_1e_3: hoeffding_samples(config.mc_delta, 1e-3),
    });
    Ok(RecoveryReport {
        mode: config.mode,
        p: config.p.clone(),
        promise_level: config.promise_level.clone(),
        accept_threshold: config.accept_threshold.clone(),
        search_bound: bound,
        coordinates,
        monte_carlo,
        warnings: config.warnings(),
    })
}

/// `n ↦ f⁻¹(n)` on the whole window, checked for injectivity.
pub fn recover_permutation(
    instance: &RecoveryInstance,
    config: &RecoveryConfig,
) -> Result<Vec<usize>> {
    scan_permutation(instance, config)?.inverse_table()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependenceCheck {
    /// `μ_σ(E)`.
    pub measure: RationalProb,
    /// `μ_σ(p_n⁻¹ E)`.
    pub plus: RationalProb,
    /// `μ_σ(m_n⁻¹ E)`.
    pub minus: RationalProb,
    /// `μ_σ(E) = p·μ_σ(p_n⁻¹E) + (1−p)·μ_σ(m_n⁻¹E)` exactly.
    pub identity_holds: bool,
    /// At `p = 1/2` with `μ_σ(E) ≥ q`: whether `sum ≥ 2q` and
    /// `min(plus, minus) ≥ 2q − 1`. `None` when the bound does not apply.
    pub bound_holds: Option<bool>,
}

impl IndependenceCheck {
    pub fn sum(&self) -> BigRational {
        self.plus.as_ratio() + self.minus.as_ratio()
    }
}

/// Checks the decomposition of `μ_σ(E)` over bit `n` against the shifted
/// sets, and the bound derived from it at promise level 95/100.
pub fn independence_identity_check(
    e: &ClopenSet,
    sigma: &BinaryWord,
    n: usize,
    p: &RationalProb,
) -> Result<IndependenceCheck> {
    independence_identity_check_at(e, sigma, n, p, &default_promise_level())
}

pub fn independence_identity_check_at(
    e: &ClopenSet,
    sigma: &BinaryWord,
    n: usize,
    p: &RationalProb,
    promise_level: &RationalProb,
) -> Result<IndependenceCheck> {
    if n <= sigma.len() {
        return Err(Error::PreconditionViolated(format!(
            "need n > |σ|, got n = {n}, |σ| = {}",
            sigma.len()
        )));
    }
    let cone = ClopenSet::from_word(sigma);
    let measure = conditional(e, &cone, p)?;
    let plus = conditional(&shift_preimage(&CoordinateShift::add(n), e), &cone, p)?;
    let minus = conditional(&shift_preimage(&CoordinateShift::remove(n), e), &cone, p)?;
    let weighted = p.as_ratio() * plus.as_ratio() + p.complement().as_ratio() * minus.as_ratio();
    let identity_holds = &weighted == measure.as_ratio();
    let q = promise_level.as_ratio();
    let bound_holds = (*p == RationalProb::half() && measure.as_ratio() >= q).then(|| {
        let two_q = q * BigRational::from_integer(2.into());
        let sum = plus.as_ratio() + minus.as_ratio();
        let floor = &two_q - BigRational::one();
        let low = plus.as_ratio().min(minus.as_ratio());
        sum >= two_q && *low >= floor
    });
    Ok(IndependenceCheck {
        measure,
        plus,
        minus,
        identity_holds,
        bound_holds,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorruptionStyle {
    /// Flip or diverge one or two random output positions.
    Mixed,
    /// Every output position diverges.
    Divergent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisOptions {
    /// `corruption_mass` may not exceed `1 − promise_level`; `None` lifts
    /// the limit for below-promise fixtures.
    pub promise_level: Option<RationalProb>,
    pub style: CorruptionStyle,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions {
            promise_level: Some(default_promise_level()),
            style: CorruptionStyle::Mixed,
        }
    }
}

/// A recovery instance whose functional is the depth-`depth` tabulation of
/// `f*`, corrupted on `⌊corruption_mass · 2^{depth−|σ|}⌋` extensions of `σ`.
/// Corrupted outputs always disagree with `f*`, so the agreement set has
/// conditional uniform measure exactly `1 − corrupted / 2^{depth−|σ|}`.
pub fn synthesize_instance(
    f: &FiniteSupportPermutation,
    sigma: &BinaryWord,
    depth: usize,
    corruption_mass: &RationalProb,
    seed: u64,
) -> Result<RecoveryInstance> {
    synthesize_instance_with(f, sigma, depth, corruption_mass, seed, &SynthesisOptions::default())
}

pub fn synthesize_instance_with(
    f: &FiniteSupportPermutation,
    sigma: &BinaryWord,
    depth: usize,
    corruption_mass: &RationalProb,
    seed: u64,
    options: &SynthesisOptions,
) -> Result<RecoveryInstance> {
    if let Some(level) = &options.promise_level {
        if *corruption_mass > level.complement() {
            return Err(Error::InvalidMass(format!(
                "{corruption_mass} exceeds 1 − {level}"
            )));
        }
    }
    if sigma.len() > depth {
        return Err(Error::InvalidInstance(format!(
            "|σ| = {} exceeds depth {depth}",
            sigma.len()
        )));
    }
    let width = f.window();
    let mut phi = BitFunctional::tabulate_pullback(f, depth, width)?;
    let free = depth - sigma.len();
    let extensions = 1usize << free;
    let scaled = corruption_mass.as_ratio() * BigRational::from_integer(BigInt::from(extensions));
    let corrupted: usize = scaled
        .floor()
        .to_integer()
        .try_into()
        .map_err(|_| Error::InvalidMass(corruption_mass.to_string()))?;
    if corrupted > 0 && width == 0 {
        return Err(Error::InvalidMass(
            "cannot corrupt a functional with no output positions".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = sigma.to_index() << free;
    let mut chosen = sample(&mut rng, extensions, corrupted).into_vec();
    chosen.sort_unstable();
    let table = phi.outputs_mut();
    for tail in chosen {
        let out = &mut table[base + tail];
        match options.style {
            CorruptionStyle::Divergent => *out = BitOutput::divergent(width),
            CorruptionStyle::Mixed => {
                let touches = if width > 1 && rng.gen_bool(0.5) { 2 } else { 1 };
                for pos in sample(&mut rng, width, touches) {
                    let current = out.get(pos);
                    let replacement = if rng.gen_bool(0.5) {
                        None
                    } else {
                        current.map(|bit| !bit)
                    };
                    out.set(pos, replacement);
                }
            }
        }
    }
    let inverse = f.inverse();
    Ok(RecoveryInstance {
        phi,
        sigma: sigma.clone(),
        window: width,
        expected_inverse: Some((0..width).map(|n| inverse.apply(n)).collect()),
        generator: Some(GeneratorInfo {
            seed,
            corruption_mass: corruption_mass.clone(),
            corrupted_extensions: corrupted,
            style: options.style,
        }),
    })
}
