use std::path::Path;

use anyhow::{bail, Context, Result};
use cantor_core::maps::{certify_bernoulli, induced_by_coordinate_permutation};
use cantor_core::measure::{measure_at, measure_poly};
use cantor_core::ml_test::transport_with_report;
use cantor_core::recovery::{scan_permutation, synthesize_instance_with, CorruptionStyle, SynthesisOptions};
use cantor_core::{
    BinaryWord, BlockCode, ClopenSet, FiniteSupportPermutation, RationalProb, RecoveryConfig,
    RecoveryInstance, RecoveryMode, TestStage,
};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::report::{Check, Inputs, RunReport};
use crate::{Command, Mode, Style};

pub fn run(command: Command) -> Result<RunReport> {
    let mut inputs = Inputs::default();
    match command {
        Command::Measure { set, p, poly } => {
            let text = inputs.read(&set)?;
            let a = ClopenSet::parse_any(&text).with_context(|| format!("parsing {}", set.display()))?;
            let mut report = RunReport::new("measure", &inputs);
            if poly {
                report.check(Check::new("measure_poly", true, measure_poly(&a)));
            }
            if p.is_some() || !poly {
                let p = p.unwrap_or_else(RationalProb::half);
                report.check(Check::new(
                    "measure",
                    true,
                    json!({ "p": p, "measure": measure_at(&a, &p) }),
                ));
            }
            Ok(report)
        }
        Command::Transport { test, perm, out } => {
            let stage = TestStage::from_json(&inputs.read(&test)?)
                .with_context(|| format!("parsing {}", test.display()))?;
            let f = read_perm(&mut inputs, &perm)?;
            stage.validate().context("input test stage")?;
            let mut report = RunReport::new("transport", &inputs);
            let moved = transport_with_report(&f, &stage);
            for level in &moved.levels {
                report.check(Check::new(
                    format!("level {} measure preserved", level.level),
                    level.poly_equal,
                    json!({
                        "original": level.original,
                        "transported": level.transported,
                        "measure": level.measure,
                    }),
                ));
            }
            report.check(Check::new("transported stage valid", moved.transported_valid, Value::Null));
            report.check(Check::new("round trip through inverse", moved.round_trip, Value::Null));
            let stage_json: Value = serde_json::from_str(&moved.transported.to_json())?;
            emit(&mut report, out.as_deref(), stage_json)?;
            Ok(report)
        }
        Command::CertifyBlockcode { code } => {
            let c: BlockCode = serde_json::from_str(&inputs.read(&code)?)
                .with_context(|| format!("parsing {}", code.display()))?;
            let mut report = RunReport::new("certify-blockcode", &inputs);
            let cert = certify_bernoulli(&c);
            report.check(Check::new(
                "polynomial and weight criteria agree",
                cert.polynomial == cert.hamming_weight,
                json!({ "polynomial": cert.polynomial, "hamming_weight": cert.hamming_weight }),
            ));
            report.output = json!({
                "preserves_all_bernoulli": cert.preserves(),
                "induced_by_coordinate_permutation": induced_by_coordinate_permutation(&c),
            });
            Ok(report)
        }
        Command::Recover {
            instance,
            mode,
            samples,
            seed,
            search_bound,
            window,
            p,
        } => {
            let mut inst = RecoveryInstance::from_json(&inputs.read(&instance)?)
                .with_context(|| format!("parsing {}", instance.display()))?;
            if let Some(w) = window {
                inst.window = w;
                if let Some(expected) = &mut inst.expected_inverse {
                    expected.truncate(w);
                }
                let expected = inst.expected_inverse.take();
                inst.validate()?;
                inst.expected_inverse = expected;
            }
            let config = RecoveryConfig {
                mode: match mode {
                    Mode::Exact => RecoveryMode::Exact,
                    Mode::Mc => RecoveryMode::MonteCarlo,
                },
                samples,
                seed,
                search_bound,
                p: p.unwrap_or_else(RationalProb::half),
                ..RecoveryConfig::default()
            };
            let mut report = RunReport::new("recover", &inputs);
            if mode == Mode::Mc {
                report.seed = Some(seed);
            }
            let scan = scan_permutation(&inst, &config)?;
            for c in &scan.coordinates {
                report.check(Check::new(format!("n={} unique candidate", c.n), c.result().is_ok(), c));
            }
            let table: Vec<Option<usize>> = scan.coordinates.iter().map(|c| c.result().ok()).collect();
            if report.pass {
                let inj = scan.inverse_table();
                report.check(Check::new(
                    "injective",
                    inj.is_ok(),
                    inj.err().map(|e| e.to_string()),
                ));
            }
            if let Some(expected) = &inst.expected_inverse {
                let agrees = expected.iter().zip(&table).all(|(e, got)| Some(*e) == *got);
                report.check(Check::new("matches expected inverse", agrees, expected));
            }
            report.warnings = scan.warnings.clone();
            report.output = json!({
                "mode": scan.mode,
                "search_bound": scan.search_bound,
                "table": table,
                "monte_carlo": scan.monte_carlo,
            });
            Ok(report)
        }
        Command::Synthesize {
            perm,
            sigma,
            depth,
            mass,
            seed,
            window,
            style,
            below_promise,
            out,
        } => {
            let mut f = read_perm(&mut inputs, &perm)?;
            if let Some(w) = window {
                if w < f.window() {
                    bail!("window {w} is smaller than the permutation's window {}", f.window());
                }
                f = f.extended(w);
            }
            let sigma: BinaryWord = match sigma.as_str() {
                "-" => BinaryWord::empty(),
                s => s.parse().with_context(|| format!("parsing --sigma {s:?}"))?,
            };
            let options = SynthesisOptions {
                promise_level: (!below_promise).then(cantor_core::recovery::default_promise_level),
                style: match style {
                    Style::Mixed => CorruptionStyle::Mixed,
                    Style::Divergent => CorruptionStyle::Divergent,
                },
            };
            let inst = synthesize_instance_with(&f, &sigma, depth, &mass, seed, &options)?;
            let mut report = RunReport::new("synthesize", &inputs);
            report.seed = Some(seed);
            let free = depth - sigma.len();
            let expected = (mass.numer().clone() << free) / mass.denom();
            let got = inst.generator.as_ref().map_or(0, |g| g.corrupted_extensions);
            report.check(Check::new(
                "corrupted extensions",
                expected == got.into(),
                json!({ "corrupted": got, "extensions": 1u128 << free }),
            ));
            let text = inst.to_json();
            report.check(Check::new(
                "instance digest",
                true,
                hex::encode(Sha256::digest(text.as_bytes())),
            ));
            emit(&mut report, out.as_deref(), serde_json::from_str(&text)?)?;
            Ok(report)
        }
    }
}

fn read_perm(inputs: &mut Inputs, path: &Path) -> Result<FiniteSupportPermutation> {
    serde_json::from_str(&inputs.read(path)?).with_context(|| format!("parsing {}", path.display()))
}

/// Writes `value` to `out`, or embeds it in the report.
fn emit(report: &mut RunReport, out: Option<&Path>, value: Value) -> Result<()> {
    match out {
        Some(path) => {
            let text = serde_json::to_string_pretty(&value)? + "\n";
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            report.output = json!({ "written": path.display().to_string() });
        }
        None => report.output = value,
    }
    Ok(())
}
