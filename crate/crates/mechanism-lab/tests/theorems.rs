//! Bound checks tying the privacy epsilons to the memorization
//! decomposition, on seeded ensembles of mechanisms and priors. All
//! quantities are in nats; the slack covers summation roundoff only.

use info_core::InfoUnit;
use mechanism_lab::{
    adversarial_prior_search, decompose, is_factorized, privacy_epsilon, random_prior,
    uniform_prior, Adjacency, Mechanism,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SLACK: f64 = 1e-9;

#[test]
fn selective_x_epsilon_bounds_total_memorization() {
    // Randomized response kernels with known epsilon.
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for flip in [0.1, 0.25, 0.4] {
        let m = Mechanism::randomized_response_x(2, 2, flip).unwrap();
        let eps = privacy_epsilon(&m, Adjacency::SelectiveX).epsilon;
        for _ in 0..50 {
            let prior = random_prior(2, 2, &mut rng).unwrap();
            let d = decompose(&m, &prior, InfoUnit::Nats).unwrap();
            assert!(
                d.mem <= eps + SLACK,
                "mem = {} exceeds eps = {eps} at flip = {flip}",
                d.mem
            );
        }
    }
}

#[test]
fn selective_x_epsilon_bounds_memorization_on_random_kernels() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..30 {
        let nx = rng.random_range(2..=3);
        let ny = rng.random_range(2..=3);
        let nw = rng.random_range(2..=4);
        let m = Mechanism::random(nx, ny, nw, &mut rng).unwrap();
        let eps = privacy_epsilon(&m, Adjacency::SelectiveX).epsilon;
        for _ in 0..10 {
            let prior = random_prior(nx, ny, &mut rng).unwrap();
            let d = decompose(&m, &prior, InfoUnit::Nats).unwrap();
            assert!(d.mem <= eps + SLACK);
        }
    }
}

#[test]
fn full_epsilon_also_bounds_memorization() {
    // The full relation contains the selective one, so its epsilon is at
    // least as large and inherits the bound.
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..20 {
        let m = Mechanism::random(2, 3, 3, &mut rng).unwrap();
        let eps = privacy_epsilon(&m, Adjacency::Full).epsilon;
        for _ in 0..10 {
            let prior = random_prior(2, 3, &mut rng).unwrap();
            let d = decompose(&m, &prior, InfoUnit::Nats).unwrap();
            assert!(d.mem <= eps + SLACK);
        }
    }
}

#[test]
fn selective_y_epsilon_bounds_relational_memorization() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for _ in 0..30 {
        let nx = rng.random_range(2..=3);
        let ny = rng.random_range(2..=3);
        let nw = rng.random_range(2..=4);
        let m = Mechanism::random(nx, ny, nw, &mut rng).unwrap();
        let eps = privacy_epsilon(&m, Adjacency::SelectiveY).epsilon;
        for _ in 0..10 {
            let prior = random_prior(nx, ny, &mut rng).unwrap();
            let d = decompose(&m, &prior, InfoUnit::Nats).unwrap();
            assert!(
                d.mem_r <= eps + SLACK,
                "mem_r = {} exceeds eps_y = {eps}",
                d.mem_r
            );
        }
    }
}

#[test]
fn factorized_kernels_have_nonpositive_relational_part_under_every_prior() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for _ in 0..25 {
        let nx = rng.random_range(2..=3);
        let ny = rng.random_range(2..=3);
        let m = Mechanism::factorized_random(nx, ny, 2, 2, &mut rng).unwrap();
        assert!(is_factorized(&m, 1e-9).unwrap().is_some());
        for _ in 0..20 {
            let prior = random_prior(nx, ny, &mut rng).unwrap();
            let d = decompose(&m, &prior, InfoUnit::Nats).unwrap();
            assert!(d.mem_r <= SLACK, "mem_r = {} on a factorized kernel", d.mem_r);
        }
    }
}

#[test]
fn non_factorized_kernel_admits_positive_relational_part() {
    // Converse direction on the canonical example: the XOR channel fails
    // the factorization test, and some prior exposes mem_r > 0.
    let m = Mechanism::xor_channel();
    assert!(is_factorized(&m, 1e-6).unwrap().is_none());
    let found = adversarial_prior_search(&m, 50, 9).unwrap();
    assert!(found.mem_r_bits >= 0.99);
}

#[test]
fn uniform_prior_on_xor_attains_exactly_one_bit() {
    let m = Mechanism::xor_channel();
    let prior = uniform_prior(2, 2).unwrap();
    let d = decompose(&m, &prior, InfoUnit::Bits).unwrap();
    assert_eq!(d.mem_r, 1.0);
}
