use crate::{MechError, ROW_TOLERANCE};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Conditional mechanism `p(w | x, y)` over finite alphabets, stored as one
/// probability row per input pair.
///
/// The kernel is flat with layout `kernel[(x * ny + y) * nw + w]`. Validated
/// on construction and deserialization: entries are finite and nonnegative
/// and every `(x, y)` row sums to one within
/// [`ROW_TOLERANCE`](crate::ROW_TOLERANCE).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMechanism", into = "RawMechanism")]
pub struct Mechanism {
    nx: usize,
    ny: usize,
    nw: usize,
    kernel: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawMechanism {
    nx: usize,
    ny: usize,
    nw: usize,
    kernel: Vec<f64>,
}

impl TryFrom<RawMechanism> for Mechanism {
    type Error = MechError;

    fn try_from(raw: RawMechanism) -> Result<Self, MechError> {
        Mechanism::new(raw.nx, raw.ny, raw.nw, raw.kernel)
    }
}

impl From<Mechanism> for RawMechanism {
    fn from(m: Mechanism) -> Self {
        RawMechanism {
            nx: m.nx,
            ny: m.ny,
            nw: m.nw,
            kernel: m.kernel,
        }
    }
}

impl Mechanism {
    /// Builds a validated mechanism from a flat kernel.
    pub fn new(nx: usize, ny: usize, nw: usize, kernel: Vec<f64>) -> Result<Self, MechError> {
        if nx == 0 || ny == 0 || nw == 0 {
            return Err(MechError::EmptyAlphabet { nx, ny, nw });
        }
        let cells = nx * ny * nw;
        if kernel.len() != cells {
            return Err(MechError::ShapeMismatch {
                expected: cells,
                actual: kernel.len(),
            });
        }
        for (index, &value) in kernel.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(MechError::InvalidKernelEntry { index, value });
            }
        }
        for x in 0..nx {
            for y in 0..ny {
                let base = (x * ny + y) * nw;
                let sum: f64 = kernel[base..base + nw].iter().sum();
                if (sum - 1.0).abs() > ROW_TOLERANCE {
                    return Err(MechError::RowNotNormalized { x, y, sum });
                }
            }
        }
        Ok(Mechanism { nx, ny, nw, kernel })
    }

    /// Builds a mechanism by evaluating `p(w | x, y) = f(w, x, y)` on every
    /// cell, then validating the result.
    pub fn from_fn(
        nx: usize,
        ny: usize,
        nw: usize,
        f: impl Fn(usize, usize, usize) -> f64,
    ) -> Result<Self, MechError> {
        let mut kernel = Vec::with_capacity(nx * ny * nw);
        for x in 0..nx {
            for y in 0..ny {
                for w in 0..nw {
                    kernel.push(f(w, x, y));
                }
            }
        }
        Mechanism::new(nx, ny, nw, kernel)
    }

    /// Randomized response on `x`: the output equals `x` with probability
    /// `1 - flip_prob` and is otherwise uniform over the remaining symbols.
    /// The kernel ignores `y`. For the binary case with `flip_prob < 1/2`
    /// the selective-`x` epsilon is `ln((1 - flip_prob) / flip_prob)`.
    pub fn randomized_response_x(
        nx: usize,
        ny: usize,
        flip_prob: f64,
    ) -> Result<Self, MechError> {
        if nx < 2 {
            return Err(MechError::InvalidParameter(format!(
                "randomized response needs nx >= 2, got {nx}"
            )));
        }
        if !(0.0..=1.0).contains(&flip_prob) {
            return Err(MechError::InvalidParameter(format!(
                "flip probability must lie in [0, 1], got {flip_prob}"
            )));
        }
        let off = flip_prob / (nx - 1) as f64;
        Mechanism::from_fn(nx, ny, nx, |w, x, _| {
            if w == x {
                1.0 - flip_prob
            } else {
                off
            }
        })
    }

    /// Deterministic XOR channel: `w = x XOR y` over binary alphabets.
    pub fn xor_channel() -> Self {
        Mechanism::from_fn(2, 2, 2, |w, x, y| if w == x ^ y { 1.0 } else { 0.0 })
            .expect("XOR kernel is valid")
    }

    /// Noisy XOR channel: `w = x XOR y` with probability `1 - delta`, the
    /// opposite bit otherwise. `delta = 0` recovers the deterministic
    /// channel, `delta = 1/2` an input-independent coin.
    pub fn noisy_xor(delta: f64) -> Result<Self, MechError> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(MechError::InvalidParameter(format!(
                "noise level must lie in [0, 1], got {delta}"
            )));
        }
        Mechanism::from_fn(2, 2, 2, |w, x, y| {
            if w == x ^ y {
                1.0 - delta
            } else {
                delta
            }
        })
    }

    /// Random factorized mechanism over the product alphabet
    /// `W = W1 x W2` with `|W1| = nw_x`, `|W2| = nw_y`:
    /// `p((w1, w2) | x, y) = p1(w1 | x) * p2(w2 | y)` where each conditional
    /// is an independent flat-Dirichlet draw. The flat output index is
    /// `w1 * nw_y + w2`.
    pub fn factorized_random<R: Rng + ?Sized>(
        nx: usize,
        ny: usize,
        nw_x: usize,
        nw_y: usize,
        rng: &mut R,
    ) -> Result<Self, MechError> {
        if nx == 0 || ny == 0 || nw_x == 0 || nw_y == 0 {
            return Err(MechError::EmptyAlphabet {
                nx,
                ny,
                nw: nw_x * nw_y,
            });
        }
        let p1: Vec<Vec<f64>> = (0..nx).map(|_| dirichlet_flat(nw_x, rng)).collect();
        let p2: Vec<Vec<f64>> = (0..ny).map(|_| dirichlet_flat(nw_y, rng)).collect();
        Mechanism::from_fn(nx, ny, nw_x * nw_y, |w, x, y| {
            let (w1, w2) = (w / nw_y, w % nw_y);
            p1[x][w1] * p2[y][w2]
        })
    }

    /// Fully random mechanism: every conditional row is an independent
    /// flat-Dirichlet draw.
    pub fn random<R: Rng + ?Sized>(
        nx: usize,
        ny: usize,
        nw: usize,
        rng: &mut R,
    ) -> Result<Self, MechError> {
        if nx == 0 || ny == 0 || nw == 0 {
            return Err(MechError::EmptyAlphabet { nx, ny, nw });
        }
        let mut kernel = Vec::with_capacity(nx * ny * nw);
        for _ in 0..nx * ny {
            kernel.extend(dirichlet_flat(nw, rng));
        }
        Mechanism::new(nx, ny, nw, kernel)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn nw(&self) -> usize {
        self.nw
    }

    /// Total number of kernel cells `nx * ny * nw`.
    pub fn cells(&self) -> usize {
        self.kernel.len()
    }

    /// `p(w | x, y)`.
    #[inline]
    pub fn prob(&self, w: usize, x: usize, y: usize) -> f64 {
        debug_assert!(w < self.nw && x < self.nx && y < self.ny);
        self.kernel[(x * self.ny + y) * self.nw + w]
    }

    /// The conditional row `p(. | x, y)`.
    pub fn row(&self, x: usize, y: usize) -> &[f64] {
        let base = (x * self.ny + y) * self.nw;
        &self.kernel[base..base + self.nw]
    }

    /// Serializes to the JSON interchange form.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("mechanism serializes infallibly")
    }

    /// Parses and validates the JSON interchange form.
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Flat-Dirichlet sample on the simplex: normalized unit-exponential draws.
fn dirichlet_flat<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let total: f64 = v.iter().sum();
    if total <= 0.0 {
        // All draws hit exactly zero; fall back to uniform.
        return vec![1.0 / n as f64; n];
    }
    for e in &mut v {
        *e /= total;
    }
    // Push any normalization roundoff into the largest entry so the row sum
    // is exact.
    let sum: f64 = v.iter().sum();
    let imax = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    v[imax] += 1.0 - sum;
    v
}
