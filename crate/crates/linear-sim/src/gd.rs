use crate::{Dataset, LinSimError, DIVERGENCE_LOSS};
use nalgebra::DVector;

/// Gradient-descent configuration. `lr = None` selects the default rate
/// `1 / lambda_max(Z^T Z / n)`, the largest step that keeps every mode
/// stable with margin.
#[derive(Debug, Clone, Copy)]
pub struct GdConfig {
    pub lr: Option<f64>,
    pub steps: usize,
    pub record_every: usize,
}

impl Default for GdConfig {
    fn default() -> Self {
        GdConfig {
            lr: None,
            steps: 100_000,
            record_every: 1_000,
        }
    }
}

impl GdConfig {
    /// Defaults for memorization curves: a shorter horizon with dense
    /// recording, so transients stay visible.
    pub fn curve_default() -> Self {
        GdConfig {
            lr: None,
            steps: 1_000,
            record_every: 10,
        }
    }
}

/// Result of a gradient-descent run: final weights and the recorded loss
/// curve (step 0, every `record_every` steps, and the final step).
#[derive(Debug, Clone)]
pub struct GdRun {
    pub w: DVector<f64>,
    pub losses: Vec<(usize, f64)>,
}

/// Empirical loss `L(w) = ||Z w - X||^2 / (2n)`.
pub fn empirical_loss(ds: &Dataset, w: &DVector<f64>) -> f64 {
    let r = ds.z() * w - ds.x();
    r.norm_squared() / (2.0 * ds.n() as f64)
}

/// Default learning rate `1 / lambda_max(Z^T Z / n)`, with the largest
/// eigenvalue found by power iteration.
pub fn default_learning_rate(ds: &Dataset) -> f64 {
    let n = ds.n() as f64;
    let dim = ds.d() + 1;
    let mut v = DVector::from_element(dim, 1.0 / (dim as f64).sqrt());
    let mut lambda = 0.0f64;
    let mut zv = DVector::zeros(ds.n());
    let mut bv = DVector::zeros(dim);
    for _ in 0..300 {
        zv.gemv(1.0, ds.z(), &v, 0.0);
        bv.gemv_tr(1.0 / n, ds.z(), &zv, 0.0);
        let norm = bv.norm();
        if norm == 0.0 {
            // Zero curvature: any rate works; gradient is identically zero.
            return 1.0;
        }
        let next = bv.dot(&v);
        bv /= norm;
        std::mem::swap(&mut v, &mut bv);
        if (next - lambda).abs() <= 1e-12 * next.abs().max(1.0) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    1.0 / lambda
}

/// Runs gradient descent on `L` from `w = 0`, invoking `on_record` at step
/// 0, every `record_every` steps, and at the final step. Aborts with
/// [`LinSimError::Diverged`] if the loss exceeds
/// [`DIVERGENCE_LOSS`](crate::DIVERGENCE_LOSS).
pub(crate) fn run_gd(
    ds: &Dataset,
    cfg: &GdConfig,
    mut on_record: impl FnMut(usize, &DVector<f64>, f64) -> Result<(), LinSimError>,
) -> Result<DVector<f64>, LinSimError> {
    if cfg.record_every == 0 {
        return Err(LinSimError::InvalidConfig(
            "record_every must be at least 1".into(),
        ));
    }
    let lr = match cfg.lr {
        Some(lr) if lr > 0.0 && lr.is_finite() => lr,
        Some(lr) => {
            return Err(LinSimError::InvalidConfig(format!(
                "learning rate must be positive and finite, got {lr}"
            )))
        }
        None => default_learning_rate(ds),
    };
    let n = ds.n() as f64;
    let mut w = DVector::zeros(ds.d() + 1);
    let mut r = DVector::zeros(ds.n());
    let mut g = DVector::zeros(ds.d() + 1);
    for step in 0..=cfg.steps {
        // r = Z w - X
        r.gemv(1.0, ds.z(), &w, 0.0);
        r -= ds.x();
        let loss = r.norm_squared() / (2.0 * n);
        if !loss.is_finite() || loss > DIVERGENCE_LOSS {
            return Err(LinSimError::Diverged { step, loss });
        }
        if step % cfg.record_every == 0 || step == cfg.steps {
            on_record(step, &w, loss)?;
        }
        if step == cfg.steps {
            break;
        }
        // w <- w - lr * Z^T r / n
        g.gemv_tr(1.0 / n, ds.z(), &r, 0.0);
        w.axpy(-lr, &g, 1.0);
    }
    Ok(w)
}

/// Gradient descent from `w = 0`, recording the loss curve.
pub fn gradient_descent(ds: &Dataset, cfg: &GdConfig) -> Result<GdRun, LinSimError> {
    let mut losses = Vec::new();
    let w = run_gd(ds, cfg, |step, _, loss| {
        losses.push((step, loss));
        Ok(())
    })?;
    Ok(GdRun { w, losses })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample_gaussian_dataset;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    fn hand_dataset() -> Dataset {
        // Single record z = (1, 1).
        Dataset::from_parts(&[1.0], &DMatrix::from_row_slice(1, 1, &[1.0])).unwrap()
    }

    #[test]
    fn loss_known_values() {
        let ds = sample_gaussian_dataset(40, 10, 3).unwrap();
        // w = e_1 reproduces X exactly.
        let mut e1 = DVector::zeros(11);
        e1[0] = 1.0;
        assert_eq!(empirical_loss(&ds, &e1), 0.0);
        // w = 0 gives ||X||^2 / (2n).
        let zero = DVector::zeros(11);
        assert_relative_eq!(
            empirical_loss(&ds, &zero),
            ds.x().norm_squared() / 80.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn hand_instance_converges_in_one_step() {
        let ds = hand_dataset();
        let run = gradient_descent(
            &ds,
            &GdConfig {
                lr: Some(0.5),
                steps: 1,
                record_every: 1,
            },
        )
        .unwrap();
        assert_relative_eq!(run.w[0], 0.5, epsilon = 1e-15);
        assert_relative_eq!(run.w[1], 0.5, epsilon = 1e-15);
        assert_eq!(run.losses.first().unwrap(), &(0, 0.5));
        assert_relative_eq!(run.losses.last().unwrap().1, 0.0, epsilon = 1e-30);
    }

    #[test]
    fn default_learning_rate_matches_top_eigenvalue() {
        let ds = sample_gaussian_dataset(50, 20, 5).unwrap();
        let lr = default_learning_rate(&ds);
        // Oracle: dense eigendecomposition of Z^T Z / n.
        let b = ds.z().transpose() * ds.z() / ds.n() as f64;
        let top = b
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        assert_relative_eq!(lr, 1.0 / top, epsilon = 1e-9);
    }

    #[test]
    fn loss_is_monotone_at_stable_rates() {
        let ds = sample_gaussian_dataset(60, 30, 11).unwrap();
        let run = gradient_descent(
            &ds,
            &GdConfig {
                lr: None,
                steps: 500,
                record_every: 10,
            },
        )
        .unwrap();
        for pair in run.losses.windows(2) {
            assert!(pair[1].1 <= pair[0].1 + 1e-12);
        }
    }

    #[test]
    fn oversized_rate_diverges() {
        let ds = sample_gaussian_dataset(60, 30, 11).unwrap();
        let lr = default_learning_rate(&ds) * 10.0;
        let err = gradient_descent(
            &ds,
            &GdConfig {
                lr: Some(lr),
                steps: 10_000,
                record_every: 100,
            },
        )
        .unwrap_err();
        assert!(matches!(err, LinSimError::Diverged { .. }));
    }

    #[test]
    fn zero_targets_stay_at_zero() {
        let y = DMatrix::from_fn(10, 20, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0);
        let ds = Dataset::from_parts(&[0.0; 10], &y).unwrap();
        let run = gradient_descent(
            &ds,
            &GdConfig {
                lr: None,
                steps: 100,
                record_every: 10,
            },
        )
        .unwrap();
        assert_eq!(run.w.norm(), 0.0);
        assert!(run.losses.iter().all(|&(_, l)| l == 0.0));
    }

    #[test]
    fn rejects_bad_config() {
        let ds = hand_dataset();
        assert!(matches!(
            gradient_descent(
                &ds,
                &GdConfig {
                    lr: Some(-1.0),
                    steps: 10,
                    record_every: 1
                }
            ),
            Err(LinSimError::InvalidConfig(_))
        ));
        assert!(matches!(
            gradient_descent(
                &ds,
                &GdConfig {
                    lr: None,
                    steps: 10,
                    record_every: 0
                }
            ),
            Err(LinSimError::InvalidConfig(_))
        ));
    }

    #[test]
    fn records_first_and_last_steps() {
        let ds = sample_gaussian_dataset(20, 5, 2).unwrap();
        let run = gradient_descent(
            &ds,
            &GdConfig {
                lr: None,
                steps: 25,
                record_every: 10,
            },
        )
        .unwrap();
        let steps: Vec<usize> = run.losses.iter().map(|&(s, _)| s).collect();
        assert_eq!(steps, vec![0, 10, 20, 25]);
    }
}
