use crate::{
    gd::{run_gd, GdConfig},
    recovery_attack, Dataset, LinSimError,
};

/// One recorded step of a memorization curve.
///
/// Scores are `1 - loss` on the respective split. `recon_error_mean` is the
/// mean absolute reconstruction error of the attack run against the
/// training targets, and `memorization = 1 - recon_error_mean` clamped to
/// `[0, 1]`. At steps where the attack is degenerate (leading weight at 1)
/// the reconstruction error is recorded as NaN and memorization as 0.
#[derive(Debug, Clone, Copy)]
pub struct CurvePoint {
    pub step: usize,
    pub train_score: f64,
    pub heldout_score: f64,
    pub memorization: f64,
    pub recon_error_mean: f64,
}

/// A recorded memorization curve.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub points: Vec<CurvePoint>,
}

impl Trajectory {
    /// CSV rendering with a fixed header; floats use the shortest exact
    /// decimal form.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,train_score,heldout_score,memorization,recon_error_mean\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                p.step, p.train_score, p.heldout_score, p.memorization, p.recon_error_mean
            ));
        }
        out
    }

    /// Largest recorded memorization value and the step attaining it
    /// (earliest on ties). NaN-free by construction.
    pub fn peak_memorization(&self) -> Option<(usize, f64)> {
        self.points
            .iter()
            .map(|p| (p.step, p.memorization))
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
    }

    pub fn final_point(&self) -> Option<&CurvePoint> {
        self.points.last()
    }
}

/// Runs gradient descent on the training set, scoring both splits and the
/// reconstruction attack at every recorded step.
///
/// The heldout set must have the same feature dimension; it is drawn from
/// the same distribution but never touches the optimization. Training
/// targets must not be identically zero, otherwise there is nothing to
/// memorize and the curve is undefined.
pub fn memorization_curve(
    train: &Dataset,
    heldout: &Dataset,
    cfg: &GdConfig,
) -> Result<Trajectory, LinSimError> {
    if heldout.d() != train.d() {
        return Err(LinSimError::DimensionMismatch {
            expected: train.d(),
            actual: heldout.d(),
        });
    }
    if train.x().norm_squared() == 0.0 {
        return Err(LinSimError::DegenerateTargets);
    }
    let mut points = Vec::new();
    let heldout_n = heldout.n() as f64;
    run_gd(train, cfg, |step, w, train_loss| {
        let r = heldout.z() * w - heldout.x();
        let heldout_loss = r.norm_squared() / (2.0 * heldout_n);
        let (memorization, recon_error_mean) = match recovery_attack(w, train) {
            Ok(attack) => {
                let mean = attack.mean_error();
                ((1.0 - mean).clamp(0.0, 1.0), mean)
            }
            Err(LinSimError::DegenerateAttack { .. }) => (0.0, f64::NAN),
            Err(other) => return Err(other),
        };
        points.push(CurvePoint {
            step,
            train_score: 1.0 - train_loss,
            heldout_score: 1.0 - heldout_loss,
            memorization,
            recon_error_mean,
        });
        Ok(())
    })?;
    Ok(Trajectory { points })
}
