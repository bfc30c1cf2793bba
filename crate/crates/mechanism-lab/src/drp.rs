use crate::{
    epsilon::{Adjacency, EpsilonReport},
    factorize::is_factorized,
    MechError, Mechanism,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeSet;

/// Search strategy for the relaxed epsilon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DrpMethod {
    /// Alternating exact block minimization over the factor blocks, with
    /// random restarts. Works at any kernel size.
    Alternating,
    /// Grid search over one factor block with exact response in the other,
    /// then a descent polish. Limited to small kernels.
    BruteForce,
}

/// Kernel-size cap for [`DrpMethod::BruteForce`].
pub const MAX_EXHAUSTIVE_CELLS: usize = 64;

const RESTARTS: usize = 16;
const MAX_BIJECTIONS: usize = 128;
const GRID_BUDGET: usize = 200_000;
/// Floor keeping factor entries strictly positive so log ratios stay finite;
/// far below any tolerance in use.
const FACTOR_FLOOR: f64 = 1e-290;

/// Smallest `epsilon` such that `p(w | x, y) <= e^epsilon * q(w | x, y)`
/// for some properly normalized factorized kernel
/// `q(w | x, y) = r(w, x) * s(w, y)` in the searched family.
///
/// The search space is the union of three family kinds:
///
/// * kernels depending only on `x` (`s` constant), for which the optimum is
///   the closed form `max_x ln sum_w max_y p(w | x, y)`;
/// * kernels depending only on `y`, symmetrically;
/// * for composite `|W|`, product splits `W ~ W1 x W2` along a bijection,
///   with `q = a(w1 | x) * b(w2 | y)` and both blocks normalized.
///
/// For binary `|W|` the first two kinds exhaust all normalized factorized
/// kernels, so the result is exact there; in general it is an upper bound
/// on the infimum over all factorized kernels. If the kernel itself
/// factorizes, zero is (numerically) attainable and reported.
///
/// `iterations` caps descent sweeps per restart; `tol` is the stabilization
/// threshold on the objective. `stabilized` in the report is false only if
/// the winning candidate exhausted its sweep budget while still improving
/// by more than `tol`. The result is deterministic in `seed`.
pub fn drp_epsilon(
    mech: &Mechanism,
    method: DrpMethod,
    iterations: usize,
    tol: f64,
    seed: u64,
) -> Result<EpsilonReport, MechError> {
    if iterations == 0 {
        return Err(MechError::ZeroIterations());
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(MechError::InvalidTolerance(tol));
    }
    if method == DrpMethod::BruteForce && mech.cells() > MAX_EXHAUSTIVE_CELLS {
        return Err(MechError::TooLargeForExhaustive {
            cells: mech.cells(),
            max: MAX_EXHAUSTIVE_CELLS,
        });
    }

    let mut candidates: Vec<(f64, bool)> = Vec::new();

    // The kernel itself is a feasible comparison point when it factorizes.
    if let Some(f) = is_factorized(mech, 1e-9)? {
        if let Some(eps) = identity_candidate(mech, &f) {
            candidates.push((eps, true));
        }
    }

    // Exact optima of the two single-dependence families.
    candidates.push((single_side_eps(mech, Side::X), true));
    candidates.push((single_side_eps(mech, Side::Y), true));

    // Product-split families for composite |W|.
    for (n1, n2) in divisor_splits(mech.nw()) {
        let bijections = canonical_bijections(mech.nw(), n1, n2, seed);
        let jobs: Vec<(usize, usize)> = match method {
            DrpMethod::Alternating => (0..bijections.len())
                .flat_map(|b| (0..RESTARTS).map(move |r| (b, r)))
                .collect(),
            DrpMethod::BruteForce => (0..bijections.len()).map(|b| (b, 0)).collect(),
        };
        let split_candidates: Vec<(f64, bool)> = jobs
            .par_iter()
            .map(|&(bij_idx, restart)| {
                let fam = SplitFamily {
                    mech,
                    n1,
                    n2,
                    grid: &bijections[bij_idx],
                };
                match method {
                    DrpMethod::Alternating => {
                        let b_init = if restart == 0 {
                            vec![vec![1.0 / n2 as f64; n2]; mech.ny()]
                        } else {
                            let mut rng = ChaCha8Rng::seed_from_u64(
                                seed.wrapping_mul(0x100000001B3)
                                    .wrapping_add((bij_idx * RESTARTS + restart) as u64),
                            );
                            (0..mech.ny())
                                .map(|_| dirichlet_row(n2, &mut rng))
                                .collect()
                        };
                        fam.descend(b_init, iterations, tol)
                    }
                    DrpMethod::BruteForce => {
                        let budget = (GRID_BUDGET / bijections.len()).max(2_000);
                        let b_best = fam.grid_search(budget);
                        fam.descend(b_best, iterations, tol)
                    }
                }
            })
            .collect();
        candidates.extend(split_candidates);
    }

    // Deterministic merge: smallest epsilon, stabilized preferred on ties.
    let (epsilon, stabilized) = candidates
        .into_iter()
        .min_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then_with(|| b.1.cmp(&a.1))
        })
        .expect("candidate list is never empty");

    Ok(EpsilonReport {
        epsilon: epsilon.max(0.0),
        adjacency: Adjacency::Full,
        witness: None,
        stabilized,
    })
}

/// Log of the worst normalization-corrected ratio against the kernel's own
/// factorization, or `None` if a positive cell reconstructs to zero.
fn identity_candidate(mech: &Mechanism, f: &crate::Factorization) -> Option<f64> {
    let mut eps = 0.0f64;
    for x in 0..mech.nx() {
        for y in 0..mech.ny() {
            let norm: f64 = (0..mech.nw()).map(|w| f.reconstruct(w, x, y)).sum();
            if norm <= 0.0 {
                return None;
            }
            for w in 0..mech.nw() {
                let p = mech.prob(w, x, y);
                if p > 0.0 {
                    let q = f.reconstruct(w, x, y) / norm;
                    if q <= 0.0 {
                        return None;
                    }
                    eps = eps.max(p.ln() - q.ln());
                }
            }
        }
    }
    Some(eps)
}

enum Side {
    X,
    Y,
}

/// Exact optimum over kernels depending on a single input:
/// for `Side::X`, `max_x ln sum_w max_y p(w | x, y)`. The inner maxima are
/// forced by feasibility and the outer normalization is optimal by scaling.
fn single_side_eps(mech: &Mechanism, side: Side) -> f64 {
    let (outer, inner) = match side {
        Side::X => (mech.nx(), mech.ny()),
        Side::Y => (mech.ny(), mech.nx()),
    };
    let mut worst = f64::NEG_INFINITY;
    for o in 0..outer {
        let mut total = 0.0;
        for w in 0..mech.nw() {
            let mut peak = 0.0f64;
            for i in 0..inner {
                let p = match side {
                    Side::X => mech.prob(w, o, i),
                    Side::Y => mech.prob(w, i, o),
                };
                peak = peak.max(p);
            }
            total += peak;
        }
        worst = worst.max(total.ln());
    }
    worst.max(0.0)
}

fn divisor_splits(nw: usize) -> Vec<(usize, usize)> {
    (2..=nw / 2)
        .filter(|d| nw.is_multiple_of(*d))
        .map(|d| (d, nw / d))
        .collect()
}

/// Product-split family: output relabeled along `grid` as a `n1 x n2`
/// arrangement, compared against `a(w1 | x) * b(w2 | y)` with both factor
/// blocks row-normalized.
struct SplitFamily<'a> {
    mech: &'a Mechanism,
    n1: usize,
    n2: usize,
    /// `grid[w1 * n2 + w2]` is the output symbol at block coordinates.
    grid: &'a [usize],
}

impl SplitFamily<'_> {
    /// Exact minimization over `a` for fixed `b`; writes the optimum into
    /// `a` and returns the objective value. For each `x` the problem is
    /// `min_{a in simplex} max_{w1} (c(w1) - ln a(w1))` with
    /// `c(w1) = max over positive cells of ln p - ln b`; the optimum is
    /// `a ~ e^c` with value `ln sum e^c`.
    #[allow(clippy::needless_range_loop)]
    fn update_a(&self, a: &mut [Vec<f64>], b: &[Vec<f64>]) -> f64 {
        let m = self.mech;
        let mut worst = f64::NEG_INFINITY;
        for x in 0..m.nx() {
            let mut c = vec![f64::NEG_INFINITY; self.n1];
            for y in 0..m.ny() {
                for w1 in 0..self.n1 {
                    for w2 in 0..self.n2 {
                        let p = m.prob(self.grid[w1 * self.n2 + w2], x, y);
                        if p > 0.0 {
                            let v = p.ln() - b[y][w2].ln();
                            if v > c[w1] {
                                c[w1] = v;
                            }
                        }
                    }
                }
            }
            let cmax = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if !cmax.is_finite() {
                // No positive cell touches this x (impossible for valid
                // kernels); keep a uniform block.
                for e in a[x].iter_mut() {
                    *e = 1.0 / self.n1 as f64;
                }
                continue;
            }
            let z: f64 = c.iter().map(|&v| (v - cmax).exp()).sum();
            for w1 in 0..self.n1 {
                a[x][w1] = (((c[w1] - cmax).exp()) / z).max(FACTOR_FLOOR);
            }
            worst = worst.max(cmax + z.ln());
        }
        worst
    }

    /// Mirror image of [`update_a`]: exact minimization over `b` for fixed
    /// `a`, returning the objective value.
    #[allow(clippy::needless_range_loop)]
    fn update_b(&self, b: &mut [Vec<f64>], a: &[Vec<f64>]) -> f64 {
        let m = self.mech;
        let mut worst = f64::NEG_INFINITY;
        for y in 0..m.ny() {
            let mut c = vec![f64::NEG_INFINITY; self.n2];
            for x in 0..m.nx() {
                for w1 in 0..self.n1 {
                    for w2 in 0..self.n2 {
                        let p = m.prob(self.grid[w1 * self.n2 + w2], x, y);
                        if p > 0.0 {
                            let v = p.ln() - a[x][w1].ln();
                            if v > c[w2] {
                                c[w2] = v;
                            }
                        }
                    }
                }
            }
            let cmax = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if !cmax.is_finite() {
                for e in b[y].iter_mut() {
                    *e = 1.0 / self.n2 as f64;
                }
                continue;
            }
            let z: f64 = c.iter().map(|&v| (v - cmax).exp()).sum();
            for w2 in 0..self.n2 {
                b[y][w2] = (((c[w2] - cmax).exp()) / z).max(FACTOR_FLOOR);
            }
            worst = worst.max(cmax + z.ln());
        }
        worst
    }

    /// Alternating exact block updates from the given `b`; each update is a
    /// block optimum, so the objective is non-increasing. Returns the final
    /// value and whether the improvement fell below `tol` within the budget.
    fn descend(&self, b_init: Vec<Vec<f64>>, max_sweeps: usize, tol: f64) -> (f64, bool) {
        let m = self.mech;
        let mut b: Vec<Vec<f64>> = b_init
            .into_iter()
            .map(|row| row.into_iter().map(|v| v.max(FACTOR_FLOOR)).collect())
            .collect();
        let mut a = vec![vec![1.0 / self.n1 as f64; self.n1]; m.nx()];
        let mut prev = f64::INFINITY;
        let mut value = f64::INFINITY;
        let mut stabilized = false;
        for _ in 0..max_sweeps {
            self.update_a(&mut a, &b);
            value = self.update_b(&mut b, &a);
            if prev - value < tol {
                stabilized = true;
                break;
            }
            prev = value;
        }
        (value.max(0.0), stabilized)
    }

    /// Coarse grid over the `b` block (exact response in `a`), returning the
    /// best grid point. Grid resolution adapts to stay within `budget`
    /// objective evaluations.
    fn grid_search(&self, budget: usize) -> Vec<Vec<f64>> {
        let ny = self.mech.ny();
        let mut steps = 1usize;
        while simplex_point_count(steps + 1, self.n2)
            .and_then(|c| c.checked_pow(ny as u32))
            .is_some_and(|total| total <= budget as u128)
        {
            steps += 1;
        }
        let points = simplex_points(steps, self.n2);
        let mut best_val = f64::INFINITY;
        let mut best: Vec<Vec<f64>> = vec![vec![1.0 / self.n2 as f64; self.n2]; ny];
        let mut index = vec![0usize; ny];
        let mut a = vec![vec![1.0 / self.n1 as f64; self.n1]; self.mech.nx()];
        loop {
            let b: Vec<Vec<f64>> = index.iter().map(|&i| points[i].clone()).collect();
            let val = self.update_a(&mut a, &b);
            if val < best_val {
                best_val = val;
                best = b;
            }
            // Advance the mixed-radix counter over grid points.
            let mut pos = 0;
            loop {
                if pos == ny {
                    return best;
                }
                index[pos] += 1;
                if index[pos] < points.len() {
                    break;
                }
                index[pos] = 0;
                pos += 1;
            }
        }
    }
}

fn simplex_point_count(steps: usize, parts: usize) -> Option<u128> {
    // C(steps + parts - 1, parts - 1)
    let mut c: u128 = 1;
    for i in 0..parts - 1 {
        c = c.checked_mul((steps + parts - 1 - i) as u128)?;
        c /= (i + 1) as u128;
    }
    Some(c)
}

/// All points of the standard simplex with coordinates in multiples of
/// `1/steps`, floored away from exact zero for log safety.
fn simplex_points(steps: usize, parts: usize) -> Vec<Vec<f64>> {
    fn rec(remaining: usize, parts_left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts_left == 1 {
            let mut p = prefix.clone();
            p.push(remaining);
            out.push(p);
            return;
        }
        for take in 0..=remaining {
            prefix.push(take);
            rec(remaining - take, parts_left - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut raw = Vec::new();
    rec(steps, parts, &mut Vec::new(), &mut raw);
    raw.into_iter()
        .map(|counts| {
            counts
                .into_iter()
                .map(|k| (k as f64 / steps as f64).max(FACTOR_FLOOR))
                .collect()
        })
        .collect()
}

fn dirichlet_row<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n)
        .map(|_| (-(1.0 - rng.random::<f64>()).ln()).max(FACTOR_FLOOR))
        .collect();
    let total: f64 = v.iter().sum();
    for e in &mut v {
        *e /= total;
    }
    v
}

/// Representative bijections between outputs and an `n1 x n2` block
/// arrangement, deduplicated up to independent relabeling of the two blocks
/// and capped at [`MAX_BIJECTIONS`]. For large `|W|` a seeded sample of
/// arrangements stands in for full enumeration.
fn canonical_bijections(nw: usize, n1: usize, n2: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut perms: Vec<Vec<usize>> = Vec::new();
    if nw <= 8 {
        perms = all_permutations(&(0..nw).collect::<Vec<_>>());
    } else {
        perms.push((0..nw).collect());
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED_CAFE);
        for _ in 0..256 {
            let mut p: Vec<usize> = (0..nw).collect();
            for i in (1..nw).rev() {
                let j = rng.random_range(0..=i);
                p.swap(i, j);
            }
            perms.push(p);
        }
    }
    let mut set: BTreeSet<Vec<usize>> = BTreeSet::new();
    for p in perms {
        set.insert(canonical_grid(&p, n1, n2));
    }
    set.into_iter().take(MAX_BIJECTIONS).collect()
}

fn all_permutations(elems: &[usize]) -> Vec<Vec<usize>> {
    if elems.len() <= 1 {
        return vec![elems.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..elems.len() {
        let mut rest = elems.to_vec();
        let head = rest.remove(i);
        for mut tail in all_permutations(&rest) {
            let mut p = Vec::with_capacity(elems.len());
            p.push(head);
            p.append(&mut tail);
            out.push(p);
        }
    }
    out
}

/// Canonical representative of a block arrangement under independent
/// relabeling of `w1` (row permutations) and `w2` (column permutations):
/// for each choice of leading row, order columns by that row and the
/// remaining rows lexicographically, then take the lexicographic minimum.
fn canonical_grid(grid: &[usize], n1: usize, n2: usize) -> Vec<usize> {
    let mut best: Option<Vec<usize>> = None;
    for first in 0..n1 {
        let mut cols: Vec<usize> = (0..n2).collect();
        cols.sort_by_key(|&c| grid[first * n2 + c]);
        let mut rows: Vec<Vec<usize>> = (0..n1)
            .map(|r| cols.iter().map(|&c| grid[r * n2 + c]).collect())
            .collect();
        let lead = rows.remove(first);
        rows.sort();
        let mut flat = lead;
        for row in rows {
            flat.extend(row);
        }
        if best.as_ref().is_none_or(|b| flat < *b) {
            best = Some(flat);
        }
    }
    best.unwrap()
}
