use anyhow::{bail, Result};
use info_core::InfoUnit;
use mechanism_lab::{decompose, privacy_epsilon, random_prior, Adjacency, Mechanism};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::pretty_json;
use crate::config::FileConfig;
use crate::manifest::RunRecorder;
use crate::seeds::derive_seed;

const DEFAULT_TRIALS: usize = 100;
/// Numerical slack on each bound, in nats.
const SLACK: f64 = 1e-9;

#[derive(Serialize)]
struct SuiteResult {
    name: &'static str,
    trials: usize,
    /// Worst observed `lhs - rhs` over all trials; negative means margin.
    max_violation: f64,
    pass: bool,
}

/// Checks the privacy-memorization bounds on randomly sampled instances:
///
/// * randomized response: total memorization is at most the selective-x
///   epsilon `ln((1 - p) / p)`;
/// * arbitrary kernels: total memorization is at most the selective-x
///   epsilon, and relational memorization at most the selective-y epsilon;
/// * the full epsilon dominates both selective ones;
/// * factorized kernels have nonpositive relational memorization under
///   every prior.
///
/// All quantities are in nats with `1e-9` slack. Returns an error (nonzero
/// exit) if any suite observes a violation.
pub fn run(
    trials: Option<usize>,
    cfg: &FileConfig,
    seed: u64,
    rec: &mut RunRecorder,
) -> Result<()> {
    let trials = trials.or(cfg.verify.trials).unwrap_or(DEFAULT_TRIALS);
    if trials == 0 {
        bail!("--trials must be positive");
    }
    rec.param("trials", trials as i64);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "verify-theorems"));
    let mut suites: Vec<SuiteResult> = Vec::new();

    let mut worst_rr = f64::NEG_INFINITY;
    for _ in 0..trials {
        let flip: f64 = rng.random_range(0.02..0.48);
        let mech = Mechanism::randomized_response_x(2, 2, flip)?;
        let eps = privacy_epsilon(&mech, Adjacency::SelectiveX).epsilon;
        let prior = random_prior(2, 2, &mut rng)?;
        let mem = decompose(&mech, &prior, InfoUnit::Nats)?.mem;
        worst_rr = worst_rr.max(mem - eps);
    }
    suites.push(SuiteResult {
        name: "randomized response: mem <= selective-x epsilon",
        trials,
        max_violation: worst_rr,
        pass: worst_rr <= SLACK,
    });

    let mut worst_total = f64::NEG_INFINITY;
    let mut worst_rel = f64::NEG_INFINITY;
    let mut worst_mono = f64::NEG_INFINITY;
    for _ in 0..trials {
        let nx = rng.random_range(2..=4);
        let ny = rng.random_range(2..=4);
        let nw = rng.random_range(2..=4);
        let mech = Mechanism::random(nx, ny, nw, &mut rng)?;
        let e_sx = privacy_epsilon(&mech, Adjacency::SelectiveX).epsilon;
        let e_sy = privacy_epsilon(&mech, Adjacency::SelectiveY).epsilon;
        let e_full = privacy_epsilon(&mech, Adjacency::Full).epsilon;
        let prior = random_prior(nx, ny, &mut rng)?;
        let d = decompose(&mech, &prior, InfoUnit::Nats)?;
        worst_total = worst_total.max(d.mem - e_sx);
        worst_rel = worst_rel.max(d.mem_r - e_sy);
        worst_mono = worst_mono.max(e_sx.max(e_sy) - e_full);
    }
    suites.push(SuiteResult {
        name: "random kernels: mem <= selective-x epsilon",
        trials,
        max_violation: worst_total,
        pass: worst_total <= SLACK,
    });
    suites.push(SuiteResult {
        name: "random kernels: mem_r <= selective-y epsilon",
        trials,
        max_violation: worst_rel,
        pass: worst_rel <= SLACK,
    });
    suites.push(SuiteResult {
        name: "random kernels: full epsilon >= selective epsilons",
        trials,
        max_violation: worst_mono,
        pass: worst_mono <= SLACK,
    });

    let mut worst_fact = f64::NEG_INFINITY;
    for _ in 0..trials {
        let nx = rng.random_range(2..=3);
        let ny = rng.random_range(2..=3);
        let nw_x = rng.random_range(2..=3);
        let nw_y = rng.random_range(2..=3);
        let mech = Mechanism::factorized_random(nx, ny, nw_x, nw_y, &mut rng)?;
        let prior = random_prior(nx, ny, &mut rng)?;
        let mem_r = decompose(&mech, &prior, InfoUnit::Nats)?.mem_r;
        worst_fact = worst_fact.max(mem_r);
    }
    suites.push(SuiteResult {
        name: "factorized kernels: mem_r <= 0",
        trials,
        max_violation: worst_fact,
        pass: worst_fact <= SLACK,
    });

    rec.write_output("verify.json", &pretty_json(&suites)?)?;
    println!(
        "{:<52} {:>7} {:>14} {:>9}",
        "suite", "trials", "max violation", "status"
    );
    for s in &suites {
        println!(
            "{:<52} {:>7} {:>14.3e} {:>9}",
            s.name,
            s.trials,
            s.max_violation,
            if s.pass { "ok" } else { "VIOLATED" }
        );
    }
    if suites.iter().any(|s| !s.pass) {
        bail!("at least one bound was violated; see verify.json");
    }
    println!(
        "all {} suites passed at slack {SLACK:e} nats",
        suites.len()
    );
    Ok(())
}
