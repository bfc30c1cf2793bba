use crate::{decompose::decompose, uniform_prior, MechError, Mechanism};
use info_core::{InfoUnit, JointDistribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const RESTARTS: usize = 32;
/// Floor on prior cells keeping every input pair reachable, so the
/// information quantities stay finite and the landscape smooth.
const PRIOR_FLOOR: f64 = 1e-6;

/// Outcome of the adversarial prior search.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct AdversarialSearchResult {
    /// Prior over `(X, Y)` attaining the best relational memorization found.
    pub prior: JointDistribution,
    /// Relational memorization under that prior, in bits.
    pub mem_r_bits: f64,
}

/// Searches for the prior over `(x, y)` maximizing the relational part
/// `mem_r` of the memorization decomposition, in bits.
///
/// Hill climbing with 32 restarts (the first from the uniform prior, the
/// rest from flat-Dirichlet draws) run in parallel and merged
/// deterministically: best objective wins, earlier restart index on ties.
/// Each step proposes a convex mixture of the current prior with a random
/// simplex point; the mixing weight starts at 1/2 and halves after eight
/// consecutive rejections. Proposal cells are floored at 1e-6 and
/// renormalized. The result is deterministic in `seed` and is a lower bound
/// on the true supremum.
pub fn adversarial_prior_search(
    mech: &Mechanism,
    iterations: usize,
    seed: u64,
) -> Result<AdversarialSearchResult, MechError> {
    if iterations == 0 {
        return Err(MechError::ZeroIterations());
    }
    let objective = |prior: &JointDistribution| -> Result<f64, MechError> {
        Ok(decompose(mech, prior, InfoUnit::Bits)?.mem_r)
    };

    let results: Vec<Result<(f64, JointDistribution), MechError>> = (0..RESTARTS)
        .into_par_iter()
        .map(|restart| {
            let mut rng = ChaCha8Rng::seed_from_u64(
                seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(restart as u64),
            );
            let mut current = if restart == 0 {
                uniform_prior(mech.nx(), mech.ny())?
            } else {
                random_floored_prior(mech.nx(), mech.ny(), &mut rng)?
            };
            let mut best = objective(&current)?;
            let mut step = 0.5;
            let mut rejections = 0;
            for _ in 0..iterations {
                let proposal = mix_toward_random(&current, step, &mut rng)?;
                let value = objective(&proposal)?;
                if value > best {
                    best = value;
                    current = proposal;
                    rejections = 0;
                } else {
                    rejections += 1;
                    if rejections >= 8 {
                        rejections = 0;
                        step = (step * 0.5).max(1e-3);
                    }
                }
            }
            Ok((best, current))
        })
        .collect();

    let mut merged: Option<(f64, JointDistribution)> = None;
    for result in results {
        let (value, prior) = result?;
        let better = match &merged {
            None => true,
            // Strict comparison keeps the earliest restart on ties.
            Some((best, _)) => value > *best,
        };
        if better {
            merged = Some((value, prior));
        }
    }
    let (mem_r_bits, prior) = merged.expect("at least one restart ran");
    Ok(AdversarialSearchResult { prior, mem_r_bits })
}

fn random_floored_prior<R: Rng + ?Sized>(
    nx: usize,
    ny: usize,
    rng: &mut R,
) -> Result<JointDistribution, MechError> {
    let cells = nx * ny;
    let raw: Vec<f64> = (0..cells)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    floored_simplex(nx, ny, raw)
}

/// Convex mixture of the current prior with a fresh flat-Dirichlet draw.
fn mix_toward_random<R: Rng + ?Sized>(
    current: &JointDistribution,
    step: f64,
    rng: &mut R,
) -> Result<JointDistribution, MechError> {
    let sizes = current.alphabet_sizes();
    let (nx, ny) = (sizes[0], sizes[1]);
    let cells = nx * ny;
    let mut target: Vec<f64> = (0..cells)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let total: f64 = target.iter().sum();
    if total > 0.0 {
        for v in &mut target {
            *v /= total;
        }
    } else {
        target = vec![1.0 / cells as f64; cells];
    }
    let mixed: Vec<f64> = current
        .probabilities()
        .iter()
        .zip(&target)
        .map(|(&p, &q)| (1.0 - step) * p + step * q)
        .collect();
    floored_simplex(nx, ny, mixed)
}

/// Floors cells at `PRIOR_FLOOR`, renormalizes, and nudges the sum exact.
fn floored_simplex(nx: usize, ny: usize, mut p: Vec<f64>) -> Result<JointDistribution, MechError> {
    for v in &mut p {
        *v = v.max(PRIOR_FLOOR);
    }
    let total: f64 = p.iter().sum();
    for v in &mut p {
        *v /= total;
    }
    let sum: f64 = p.iter().sum();
    let imax = p
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    p[imax] += 1.0 - sum;
    Ok(JointDistribution::from_named(&["X", "Y"], &[nx, ny], p)?)
}
