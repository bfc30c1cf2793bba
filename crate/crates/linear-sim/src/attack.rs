use crate::{Dataset, LinSimError};
use nalgebra::DVector;

/// Reconstruction attempt: estimated targets and per-record absolute errors.
#[derive(Debug, Clone)]
pub struct AttackResult {
    pub x_hat: Vec<f64>,
    pub errors: Vec<f64>,
}

impl AttackResult {
    pub fn mean_error(&self) -> f64 {
        self.errors.iter().sum::<f64>() / self.errors.len() as f64
    }

    pub fn max_error(&self) -> f64 {
        self.errors.iter().cloned().fold(0.0, f64::max)
    }
}

/// Reconstructs training targets from trained weights alone.
///
/// Inverts the minimum-norm form `w = e_1 + v / ||v||^2` with
/// `v = (-1, u)`: the leading weight gives `||v||^2 = 1 / (1 - w_1)`, and
/// `x_hat_i = ||v||^2 * (w_{2:} . y_i)` recovers `u . y_i`, which equals
/// `x_i` exactly at the interpolating solution. The attack needs only `w`
/// and the feature vectors, not the targets; the targets are used here to
/// score the reconstruction.
///
/// When the leading weight is within `1e-12` of 1 (the `d < n` limit
/// `w = e_1`), no signal remains and the attack reports
/// [`LinSimError::DegenerateAttack`].
pub fn recovery_attack(w: &DVector<f64>, ds: &Dataset) -> Result<AttackResult, LinSimError> {
    if w.len() != ds.d() + 1 {
        return Err(LinSimError::DimensionMismatch {
            expected: ds.d() + 1,
            actual: w.len().saturating_sub(1),
        });
    }
    let leading = w[0];
    if leading >= 1.0 - 1e-12 {
        return Err(LinSimError::DegenerateAttack { leading });
    }
    let v_norm_squared = 1.0 / (1.0 - leading);
    let tail = w.rows(1, ds.d());
    let mut x_hat = Vec::with_capacity(ds.n());
    let mut errors = Vec::with_capacity(ds.n());
    for i in 0..ds.n() {
        let dot = ds.y().row(i).transpose().dot(&tail);
        let estimate = v_norm_squared * dot;
        x_hat.push(estimate);
        errors.push((estimate - ds.x()[i]).abs());
    }
    Ok(AttackResult { x_hat, errors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{closed_form_minimizer, sample_gaussian_dataset, Dataset};
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    #[test]
    fn exact_on_hand_instance() {
        let ds = Dataset::from_parts(&[1.0], &DMatrix::from_row_slice(1, 1, &[1.0])).unwrap();
        let w = closed_form_minimizer(&ds).unwrap();
        let attack = recovery_attack(&w, &ds).unwrap();
        assert_relative_eq!(attack.x_hat[0], 1.0, epsilon = 1e-12);
        assert!(attack.max_error() < 1e-12);
    }

    #[test]
    fn exact_at_the_minimum_norm_interpolator() {
        let ds = sample_gaussian_dataset(20, 100, 13).unwrap();
        let w = closed_form_minimizer(&ds).unwrap();
        let attack = recovery_attack(&w, &ds).unwrap();
        assert!(attack.max_error() < 1e-8, "max error {}", attack.max_error());
    }

    #[test]
    fn degenerate_at_e1() {
        let ds = sample_gaussian_dataset(30, 5, 4).unwrap();
        let w = closed_form_minimizer(&ds).unwrap();
        assert!(matches!(
            recovery_attack(&w, &ds),
            Err(LinSimError::DegenerateAttack { .. })
        ));
    }

    #[test]
    fn rejects_mismatched_weights() {
        let ds = sample_gaussian_dataset(10, 5, 4).unwrap();
        let w = DVector::zeros(3);
        assert!(matches!(
            recovery_attack(&w, &ds),
            Err(LinSimError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn zero_weights_predict_zero() {
        let ds = sample_gaussian_dataset(10, 20, 4).unwrap();
        let w = DVector::zeros(21);
        let attack = recovery_attack(&w, &ds).unwrap();
        for (estimate, i) in attack.x_hat.iter().zip(0..) {
            assert_eq!(*estimate, 0.0);
            assert_relative_eq!(attack.errors[i], ds.x()[i].abs());
        }
    }
}
