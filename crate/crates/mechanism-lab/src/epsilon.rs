use crate::Mechanism;
use serde::{Deserialize, Serialize};

/// Which inputs may differ between the two runs being compared.
///
/// `SelectiveX` holds `y` fixed and varies `x`, `SelectiveY` the reverse,
/// and `Full` allows both coordinates to change at once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Adjacency {
    Full,
    SelectiveX,
    SelectiveY,
}

/// Input pair and output symbol attaining the reported epsilon:
/// `ln p(w | x, y) - ln p(w | x_alt, y_alt) = epsilon`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub w: usize,
    pub x: usize,
    pub y: usize,
    pub x_alt: usize,
    pub y_alt: usize,
}

/// Worst-case log-ratio bound over an adjacency relation.
///
/// `epsilon` is in nats and is `+inf` exactly when some adjacent pair gives
/// an output positive probability on one side and zero on the other. The
/// `witness` attains the bound; it is absent only when the adjacency
/// relation is empty or no ratio is defined. `stabilized` is always true for
/// exact maximization and is false only for iterative searches that
/// exhausted their budget before converging.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonReport {
    pub epsilon: f64,
    pub adjacency: Adjacency,
    pub witness: Option<Witness>,
    pub stabilized: bool,
}

/// Exact worst-case epsilon of a mechanism under the given adjacency:
/// the maximum over outputs `w` and adjacent input pairs of
/// `ln p(w | x, y) - ln p(w | x', y')`.
///
/// Pairs where both probabilities are zero contribute nothing. Because the
/// adjacency relation is symmetric, the result is nonnegative whenever any
/// ratio is defined.
pub fn privacy_epsilon(mech: &Mechanism, adjacency: Adjacency) -> EpsilonReport {
    let mut best: Option<(f64, Witness)> = None;
    for x in 0..mech.nx() {
        for y in 0..mech.ny() {
            for x_alt in 0..mech.nx() {
                for y_alt in 0..mech.ny() {
                    let adjacent = match adjacency {
                        Adjacency::Full => (x, y) != (x_alt, y_alt),
                        Adjacency::SelectiveX => y == y_alt && x != x_alt,
                        Adjacency::SelectiveY => x == x_alt && y != y_alt,
                    };
                    if !adjacent {
                        continue;
                    }
                    for w in 0..mech.nw() {
                        let num = mech.prob(w, x, y);
                        if num == 0.0 {
                            continue;
                        }
                        let den = mech.prob(w, x_alt, y_alt);
                        let ratio = if den == 0.0 {
                            f64::INFINITY
                        } else {
                            num.ln() - den.ln()
                        };
                        if best.is_none_or(|(b, _)| ratio > b) {
                            best = Some((ratio, Witness { w, x, y, x_alt, y_alt }));
                        }
                    }
                }
            }
        }
    }
    match best {
        Some((epsilon, witness)) => EpsilonReport {
            // Symmetry of the relation makes the true maximum nonnegative;
            // clamp the roundoff case where all ratios are ~0.
            epsilon: epsilon.max(0.0),
            adjacency,
            witness: Some(witness),
            stabilized: true,
        },
        None => EpsilonReport {
            epsilon: 0.0,
            adjacency,
            witness: None,
            stabilized: true,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn randomized_response_epsilons() {
        let m = Mechanism::randomized_response_x(2, 2, 0.25).unwrap();
        let rx = privacy_epsilon(&m, Adjacency::SelectiveX);
        assert_relative_eq!(rx.epsilon, 3.0f64.ln(), epsilon = 1e-12);
        let w = rx.witness.unwrap();
        let attained =
            m.prob(w.w, w.x, w.y).ln() - m.prob(w.w, w.x_alt, w.y_alt).ln();
        assert_relative_eq!(attained, rx.epsilon, epsilon = 1e-9);

        // The kernel ignores y.
        let ry = privacy_epsilon(&m, Adjacency::SelectiveY);
        assert_eq!(ry.epsilon, 0.0);

        let rf = privacy_epsilon(&m, Adjacency::Full);
        assert_relative_eq!(rf.epsilon, 3.0f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn binary_randomized_response_closed_form() {
        for p in [0.05, 0.1, 0.25, 0.4] {
            let m = Mechanism::randomized_response_x(2, 2, p).unwrap();
            let r = privacy_epsilon(&m, Adjacency::SelectiveX);
            assert_relative_eq!(r.epsilon, ((1.0 - p) / p).ln(), epsilon = 1e-12);
        }
    }

    #[test]
    fn deterministic_kernel_gives_infinite_epsilon() {
        let m = Mechanism::xor_channel();
        for adj in [Adjacency::Full, Adjacency::SelectiveX, Adjacency::SelectiveY] {
            let r = privacy_epsilon(&m, adj);
            assert!(r.epsilon.is_infinite());
            // Witness names a (positive, zero) pair.
            let w = r.witness.unwrap();
            assert!(m.prob(w.w, w.x, w.y) > 0.0);
            assert_eq!(m.prob(w.w, w.x_alt, w.y_alt), 0.0);
        }
    }

    #[test]
    fn full_dominates_selective() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let m = Mechanism::random(3, 3, 3, &mut rng).unwrap();
            let full = privacy_epsilon(&m, Adjacency::Full).epsilon;
            let sx = privacy_epsilon(&m, Adjacency::SelectiveX).epsilon;
            let sy = privacy_epsilon(&m, Adjacency::SelectiveY).epsilon;
            assert!(full >= sx - 1e-12);
            assert!(full >= sy - 1e-12);
        }
    }

    #[test]
    fn witness_attains_epsilon_on_random_mechanisms() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..20 {
            let m = Mechanism::random(2, 3, 4, &mut rng).unwrap();
            for adj in [Adjacency::Full, Adjacency::SelectiveX, Adjacency::SelectiveY] {
                let r = privacy_epsilon(&m, adj);
                let w = r.witness.expect("nondegenerate alphabets have witnesses");
                if r.epsilon.is_finite() {
                    let attained =
                        m.prob(w.w, w.x, w.y).ln() - m.prob(w.w, w.x_alt, w.y_alt).ln();
                    assert_relative_eq!(attained, r.epsilon, epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn single_symbol_inputs_have_empty_adjacency() {
        let m = Mechanism::new(1, 1, 2, vec![0.5, 0.5]).unwrap();
        let r = privacy_epsilon(&m, Adjacency::Full);
        assert_eq!(r.epsilon, 0.0);
        assert!(r.witness.is_none());
    }
}
