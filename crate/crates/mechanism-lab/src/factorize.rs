use crate::{MechError, Mechanism};
use serde::{Deserialize, Serialize};

/// Factor pair witnessing `p(w | x, y) = r(w, x) * s(w, y)`, together with
/// the largest absolute reconstruction error over all cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Factorization {
    nx: usize,
    ny: usize,
    nw: usize,
    /// `r[w * nx + x]`
    r: Vec<f64>,
    /// `s[w * ny + y]`
    s: Vec<f64>,
    pub residual: f64,
}

impl Factorization {
    pub fn r(&self, w: usize, x: usize) -> f64 {
        self.r[w * self.nx + x]
    }

    pub fn s(&self, w: usize, y: usize) -> f64 {
        self.s[w * self.ny + y]
    }

    /// `r(w, x) * s(w, y)`, the reconstructed kernel entry.
    pub fn reconstruct(&self, w: usize, x: usize, y: usize) -> f64 {
        self.r(w, x) * self.s(w, y)
    }
}

/// Tests whether the kernel factorizes as `p(w | x, y) = r(w, x) * s(w, y)`.
///
/// Equivalently, each output slice `M_w[x][y] = p(w | x, y)` must have rank
/// at most one. Entries within `tol * scale` of zero (with `scale` the
/// largest entry of the slice) are treated as zero, and 2x2 minors are
/// compared against `tol * scale^2`, so the test is invariant under scaling
/// of the slice. Returns the factor pair with its worst-cell reconstruction
/// error, or `None` if some slice is not rank one.
#[allow(clippy::needless_range_loop)]
pub fn is_factorized(mech: &Mechanism, tol: f64) -> Result<Option<Factorization>, MechError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(MechError::InvalidTolerance(tol));
    }
    let (nx, ny, nw) = (mech.nx(), mech.ny(), mech.nw());
    let mut r = vec![0.0; nw * nx];
    let mut s = vec![0.0; nw * ny];
    for w in 0..nw {
        // Pivot = largest entry of the slice.
        let mut scale = 0.0f64;
        let (mut px, mut py) = (0, 0);
        for x in 0..nx {
            for y in 0..ny {
                let v = mech.prob(w, x, y);
                if v > scale {
                    scale = v;
                    px = x;
                    py = y;
                }
            }
        }
        if scale == 0.0 {
            // Output symbol never emitted: zero factors reconstruct it.
            continue;
        }
        let zero_cut = tol * scale;
        // Rank one with nonnegative entries forces the zero cells to be a
        // union of full rows and full columns: p = 0 iff r(x) = 0 or
        // s(y) = 0. Check that pattern explicitly.
        let row_nonzero: Vec<bool> =
            (0..nx).map(|x| (0..ny).any(|y| mech.prob(w, x, y) > zero_cut)).collect();
        let col_nonzero: Vec<bool> =
            (0..ny).map(|y| (0..nx).any(|x| mech.prob(w, x, y) > zero_cut)).collect();
        for x in 0..nx {
            for y in 0..ny {
                let near_zero = mech.prob(w, x, y) <= zero_cut;
                if near_zero && row_nonzero[x] && col_nonzero[y] {
                    return Ok(None);
                }
            }
        }
        // All 2x2 minors against the pivot must vanish; for a matrix this is
        // equivalent to rank one.
        let minor_cut = tol * scale * scale;
        for x in 0..nx {
            for y in 0..ny {
                let minor = mech.prob(w, x, y) * scale
                    - mech.prob(w, x, py) * mech.prob(w, px, y);
                if minor.abs() > minor_cut {
                    return Ok(None);
                }
            }
        }
        let root = scale.sqrt();
        for x in 0..nx {
            r[w * nx + x] = mech.prob(w, x, py) / root;
        }
        for y in 0..ny {
            s[w * ny + y] = mech.prob(w, px, y) / root;
        }
    }
    let mut f = Factorization {
        nx,
        ny,
        nw,
        r,
        s,
        residual: 0.0,
    };
    let mut residual = 0.0f64;
    for w in 0..nw {
        for x in 0..nx {
            for y in 0..ny {
                let err = (f.reconstruct(w, x, y) - mech.prob(w, x, y)).abs();
                residual = residual.max(err);
            }
        }
    }
    f.residual = residual;
    Ok(Some(f))
}
