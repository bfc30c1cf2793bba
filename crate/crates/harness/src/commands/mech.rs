use std::path::Path;

use anyhow::{bail, Context, Result};
use info_core::JointDistribution;
use mechanism_lab::{
    adversarial_prior_search, decompose, drp_epsilon, is_factorized, privacy_epsilon, uniform_prior,
    Adjacency, DrpMethod, Mechanism,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{parse_unit, pretty_json};
use crate::cli::MechCmd;
use crate::config::FileConfig;
use crate::manifest::RunRecorder;
use crate::seeds::derive_seed;

const DEFAULT_FACTOR_TOL: f64 = 1e-9;
const DEFAULT_DRP_ITERATIONS: usize = 200;
const DEFAULT_DRP_TOL: f64 = 1e-10;
const DEFAULT_SEARCH_ITERATIONS: usize = 500;

pub fn run(cmd: &MechCmd, cfg: &FileConfig, seed: u64, rec: &mut RunRecorder) -> Result<()> {
    match cmd {
        MechCmd::Make {
            kind,
            nx,
            ny,
            nw,
            nw_x,
            nw_y,
            flip_prob,
            delta,
        } => make(
            kind, *nx, *ny, *nw, *nw_x, *nw_y, *flip_prob, *delta, seed, rec,
        ),
        MechCmd::Epsilon { mech, adjacency } => {
            let m = load_mech(rec, mech)?;
            let adj = parse_adjacency(adjacency)?;
            rec.param("adjacency", adjacency.as_str());
            let report = privacy_epsilon(&m, adj);
            rec.write_output("epsilon.json", &pretty_json(&report)?)?;
            match report.witness {
                Some(w) => println!(
                    "epsilon = {} nats ({adjacency}), attained at w={} ({},{}) vs ({},{})",
                    report.epsilon, w.w, w.x, w.y, w.x_alt, w.y_alt
                ),
                None => println!("epsilon = {} nats ({adjacency}), no witness", report.epsilon),
            }
            Ok(())
        }
        MechCmd::Factorize { mech, tol } => {
            let m = load_mech(rec, mech)?;
            let tol = tol.or(cfg.mech.tol).unwrap_or(DEFAULT_FACTOR_TOL);
            rec.param("tol", tol);
            let factors = is_factorized(&m, tol)?;
            #[derive(Serialize)]
            struct FactorizeOutput {
                factorized: bool,
                tol: f64,
                factors: Option<mechanism_lab::Factorization>,
            }
            let out = FactorizeOutput {
                factorized: factors.is_some(),
                tol,
                factors,
            };
            rec.write_output("factorize.json", &pretty_json(&out)?)?;
            println!(
                "kernel {} as r(w|x) * s(w|y) at tolerance {tol}",
                if out.factorized {
                    "factorizes"
                } else {
                    "does not factorize"
                }
            );
            Ok(())
        }
        MechCmd::Drp {
            mech,
            method,
            iterations,
            tol,
        } => {
            let m = load_mech(rec, mech)?;
            let method_enum = parse_drp_method(method)?;
            let iterations = iterations
                .or(cfg.mech.iterations)
                .unwrap_or(DEFAULT_DRP_ITERATIONS);
            let tol = tol.or(cfg.mech.tol).unwrap_or(DEFAULT_DRP_TOL);
            rec.param("method", method.as_str());
            rec.param("iterations", iterations as i64);
            rec.param("tol", tol);
            let sub_seed = derive_seed(seed, "mech.drp");
            let report = drp_epsilon(&m, method_enum, iterations, tol, sub_seed)?;
            rec.write_output("drp.json", &pretty_json(&report)?)?;
            println!(
                "relaxed epsilon = {} nats ({}{})",
                report.epsilon,
                method,
                if report.stabilized {
                    ""
                } else {
                    ", budget exhausted before stabilizing"
                }
            );
            Ok(())
        }
        MechCmd::Adversarial { mech, iterations } => {
            let m = load_mech(rec, mech)?;
            let iterations = iterations
                .or(cfg.mech.iterations)
                .unwrap_or(DEFAULT_SEARCH_ITERATIONS);
            rec.param("iterations", iterations as i64);
            let sub_seed = derive_seed(seed, "mech.adversarial");
            let result = adversarial_prior_search(&m, iterations, sub_seed)?;
            rec.write_output("adversarial.json", &pretty_json(&result)?)?;
            println!(
                "best prior found reaches mem_r = {} bits",
                result.mem_r_bits
            );
            Ok(())
        }
        MechCmd::Decompose { mech, prior, unit } => {
            let m = load_mech(rec, mech)?;
            let u = parse_unit(unit)?;
            rec.param("unit", unit.as_str());
            let prior_table = match prior {
                Some(path) => {
                    rec.input(path)?;
                    let text = std::fs::read_to_string(path)
                        .with_context(|| format!("reading prior {}", path.display()))?;
                    JointDistribution::from_json(&text)
                        .with_context(|| format!("parsing prior {}", path.display()))?
                }
                None => uniform_prior(m.nx(), m.ny())?,
            };
            let d = decompose(&m, &prior_table, u)?;
            rec.write_output("decompose.json", &pretty_json(&d)?)?;
            println!(
                "mem = {} {unit}  (marginal {} + relational {})",
                d.mem, d.mem_m, d.mem_r
            );
            Ok(())
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn make(
    kind: &str,
    nx: Option<usize>,
    ny: Option<usize>,
    nw: Option<usize>,
    nw_x: Option<usize>,
    nw_y: Option<usize>,
    flip_prob: Option<f64>,
    delta: Option<f64>,
    seed: u64,
    rec: &mut RunRecorder,
) -> Result<()> {
    rec.param("kind", kind);
    let mech = match kind {
        "xor" => Mechanism::xor_channel(),
        "noisy-xor" => {
            let delta = delta.context("kind 'noisy-xor' needs --delta")?;
            rec.param("delta", delta);
            Mechanism::noisy_xor(delta)?
        }
        "rr" => {
            let flip = flip_prob.context("kind 'rr' needs --flip-prob")?;
            let nx = nx.unwrap_or(2);
            let ny = ny.unwrap_or(2);
            rec.param("nx", nx as i64);
            rec.param("ny", ny as i64);
            rec.param("flip_prob", flip);
            Mechanism::randomized_response_x(nx, ny, flip)?
        }
        "random" => {
            let (nx, ny, nw) = (
                nx.context("kind 'random' needs --nx")?,
                ny.context("kind 'random' needs --ny")?,
                nw.context("kind 'random' needs --nw")?,
            );
            rec.param("nx", nx as i64);
            rec.param("ny", ny as i64);
            rec.param("nw", nw as i64);
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "mech.make"));
            Mechanism::random(nx, ny, nw, &mut rng)?
        }
        "factorized" => {
            let (nx, ny, nw_x, nw_y) = (
                nx.context("kind 'factorized' needs --nx")?,
                ny.context("kind 'factorized' needs --ny")?,
                nw_x.context("kind 'factorized' needs --nw-x")?,
                nw_y.context("kind 'factorized' needs --nw-y")?,
            );
            rec.param("nx", nx as i64);
            rec.param("ny", ny as i64);
            rec.param("nw_x", nw_x as i64);
            rec.param("nw_y", nw_y as i64);
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "mech.make"));
            Mechanism::factorized_random(nx, ny, nw_x, nw_y, &mut rng)?
        }
        other => bail!(
            "unknown mechanism kind '{other}' \
             (expected xor, noisy-xor, rr, random, or factorized)"
        ),
    };
    let path = rec.write_output("mechanism.json", &format!("{}\n", mech.to_json()))?;
    println!(
        "wrote {} mechanism ({}x{} inputs, {} outputs) to {}",
        kind,
        mech.nx(),
        mech.ny(),
        mech.nw(),
        path.display()
    );
    Ok(())
}

fn parse_adjacency(s: &str) -> Result<Adjacency> {
    match s {
        "full" => Ok(Adjacency::Full),
        "selective-x" => Ok(Adjacency::SelectiveX),
        "selective-y" => Ok(Adjacency::SelectiveY),
        other => bail!(
            "unknown adjacency '{other}' (expected full, selective-x, or selective-y)"
        ),
    }
}

fn parse_drp_method(s: &str) -> Result<DrpMethod> {
    match s {
        "alternating" => Ok(DrpMethod::Alternating),
        "brute-force" => Ok(DrpMethod::BruteForce),
        other => bail!("unknown method '{other}' (expected alternating or brute-force)"),
    }
}

fn load_mech(rec: &mut RunRecorder, path: &Path) -> Result<Mechanism> {
    rec.input(path)?;
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading mechanism {}", path.display()))?;
    Mechanism::from_json(&text).with_context(|| format!("parsing mechanism {}", path.display()))
}
