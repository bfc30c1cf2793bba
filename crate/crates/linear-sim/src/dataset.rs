use crate::LinSimError;
use nalgebra::{DMatrix, DMatrixView, DVectorView};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// A regression dataset of `n` records `z_i = (x_i, y_i)` with scalar
/// target `x_i` and `d`-dimensional features `y_i`, stored as the design
/// matrix `Z` of shape `n x (d + 1)` whose first column is `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n: usize,
    d: usize,
    z: DMatrix<f64>,
}

impl Dataset {
    /// Builds a dataset from targets and features directly.
    pub fn from_parts(x: &[f64], y: &DMatrix<f64>) -> Result<Self, LinSimError> {
        let n = x.len();
        let d = y.ncols();
        if n == 0 || d == 0 || y.nrows() != n {
            return Err(LinSimError::EmptyDataset { n, d });
        }
        let mut z = DMatrix::zeros(n, d + 1);
        for i in 0..n {
            z[(i, 0)] = x[i];
            for j in 0..d {
                z[(i, j + 1)] = y[(i, j)];
            }
        }
        Ok(Dataset { n, d, z })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// The full design matrix `Z` (`n x (d + 1)`).
    pub fn z(&self) -> &DMatrix<f64> {
        &self.z
    }

    /// The target column `X`.
    pub fn x(&self) -> DVectorView<'_, f64> {
        self.z.column(0)
    }

    /// The feature block `Y` (`n x d`).
    pub fn y(&self) -> DMatrixView<'_, f64> {
        self.z.columns(1, self.d)
    }
}

/// Samples `n` records with `x_i ~ N(0, 1)` and `y_i ~ N(0, I_d)`, all
/// entries independent. Deterministic in `seed`.
pub fn sample_gaussian_dataset(n: usize, d: usize, seed: u64) -> Result<Dataset, LinSimError> {
    if n == 0 || d == 0 {
        return Err(LinSimError::EmptyDataset { n, d });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Row-major fill: records are contiguous draws, so extending d extends
    // each record rather than reshuffling the whole dataset.
    let mut z = DMatrix::zeros(n, d + 1);
    for i in 0..n {
        for j in 0..=d {
            z[(i, j)] = StandardNormal.sample(&mut rng);
        }
    }
    Ok(Dataset { n, d, z })
}
