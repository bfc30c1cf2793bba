use anyhow::Result;
use linear_sim::{
    closed_form_minimizer, default_learning_rate, dynamics_spectrum, gradient_descent,
    memorization_curve, recovery_attack, sample_gaussian_dataset, GdConfig, LinSimError,
};
use serde::Serialize;

use super::pretty_json;
use crate::cli::LinsimCmd;
use crate::config::FileConfig;
use crate::manifest::RunRecorder;
use crate::seeds::derive_seed;

const DEFAULT_N: usize = 100;
const DEFAULT_D: usize = 1_000;

pub fn run(cmd: &LinsimCmd, cfg: &FileConfig, seed: u64, rec: &mut RunRecorder) -> Result<()> {
    match cmd {
        LinsimCmd::Curve {
            n,
            d,
            lr,
            steps,
            record_every,
        } => {
            let base = GdConfig::curve_default();
            let n = n.or(cfg.linsim.n).unwrap_or(DEFAULT_N);
            let d = d.or(cfg.linsim.d).unwrap_or(DEFAULT_D);
            let gd = GdConfig {
                lr: lr.or(cfg.linsim.lr),
                steps: steps.or(cfg.linsim.steps).unwrap_or(base.steps),
                record_every: record_every
                    .or(cfg.linsim.record_every)
                    .unwrap_or(base.record_every),
            };
            let train = sample_gaussian_dataset(n, d, derive_seed(seed, "linsim.train"))?;
            let heldout = sample_gaussian_dataset(n, d, derive_seed(seed, "linsim.heldout"))?;
            let lr_used = gd.lr.unwrap_or_else(|| default_learning_rate(&train));
            record_gd_params(rec, n, d, lr_used, &gd);
            let traj = memorization_curve(&train, &heldout, &gd)?;
            rec.write_output("curve.csv", &traj.to_csv())?;
            let mut meta = toml::Table::new();
            meta.insert("n".into(), (n as i64).into());
            meta.insert("d".into(), (d as i64).into());
            meta.insert("seed".into(), (seed as i64).into());
            meta.insert("lr".into(), lr_used.into());
            meta.insert("steps".into(), (gd.steps as i64).into());
            meta.insert("record_every".into(), (gd.record_every as i64).into());
            rec.write_output("meta.toml", &toml::to_string_pretty(&meta)?)?;
            let (peak_step, peak) = traj.peak_memorization().expect("curve has points");
            let last = traj.final_point().expect("curve has points");
            println!(
                "n={n} d={d} lr={lr_used:.3e}: memorization peaks at {peak:.4} \
                 (step {peak_step}), ends at {:.4} (step {})",
                last.memorization, last.step
            );
        }
        LinsimCmd::Converge { n, d, lr, steps } => {
            let base = GdConfig::default();
            let n = n.or(cfg.linsim.n).unwrap_or(DEFAULT_N);
            let d = d.or(cfg.linsim.d).unwrap_or(DEFAULT_D);
            let gd = GdConfig {
                lr: lr.or(cfg.linsim.lr),
                steps: steps.or(cfg.linsim.steps).unwrap_or(base.steps),
                record_every: base.record_every,
            };
            let train = sample_gaussian_dataset(n, d, derive_seed(seed, "linsim.train"))?;
            let lr_used = gd.lr.unwrap_or_else(|| default_learning_rate(&train));
            record_gd_params(rec, n, d, lr_used, &gd);
            let run = gradient_descent(&train, &gd)?;
            let w_star = closed_form_minimizer(&train)?;
            let rel_distance = (&run.w - &w_star).norm() / w_star.norm();
            let final_loss = run.losses.last().expect("loss recorded").1;

            #[derive(Serialize)]
            struct AttackSummary {
                degenerate: bool,
                mean_error: Option<f64>,
                max_error: Option<f64>,
            }
            let attack = match recovery_attack(&run.w, &train) {
                Ok(a) => AttackSummary {
                    degenerate: false,
                    mean_error: Some(a.mean_error()),
                    max_error: Some(a.max_error()),
                },
                Err(LinSimError::DegenerateAttack { .. }) => AttackSummary {
                    degenerate: true,
                    mean_error: None,
                    max_error: None,
                },
                Err(e) => return Err(e.into()),
            };

            #[derive(Serialize)]
            struct ConvergeOutput {
                n: usize,
                d: usize,
                lr: f64,
                steps: usize,
                final_loss: f64,
                rel_distance_to_minimizer: f64,
                attack: AttackSummary,
            }
            let out = ConvergeOutput {
                n,
                d,
                lr: lr_used,
                steps: gd.steps,
                final_loss,
                rel_distance_to_minimizer: rel_distance,
                attack,
            };
            rec.write_output("converge.json", &pretty_json(&out)?)?;
            println!(
                "n={n} d={d}: final loss {final_loss:.3e}, \
                 relative distance to minimizer {rel_distance:.3e}"
            );
            match (out.attack.degenerate, out.attack.mean_error) {
                (true, _) => println!("attack degenerate: weights carry no recoverable signal"),
                (false, Some(err)) => println!("attack mean reconstruction error {err:.3e}"),
                _ => {}
            }
        }
        LinsimCmd::Spectrum { n, d } => {
            let n = n.or(cfg.linsim.n).unwrap_or(DEFAULT_N);
            let d = d.or(cfg.linsim.d).unwrap_or(DEFAULT_D);
            rec.param("n", n as i64);
            rec.param("d", d as i64);
            let train = sample_gaussian_dataset(n, d, derive_seed(seed, "linsim.train"))?;
            let eigs = dynamics_spectrum(&train)?;
            let mut csv = String::from("index,eigenvalue\n");
            for (i, mu) in eigs.iter().enumerate() {
                csv.push_str(&format!("{i},{mu}\n"));
            }
            rec.write_output("spectrum.csv", &csv)?;
            let (min, max) = (
                eigs.iter().cloned().fold(f64::INFINITY, f64::min),
                eigs.iter().cloned().fold(0.0, f64::max),
            );
            println!(
                "{} eigenvalues, range [{min:.6e}, {max:.6e}], condition {:.3e}",
                eigs.len(),
                max / min
            );
        }
    }
    Ok(())
}

fn record_gd_params(rec: &mut RunRecorder, n: usize, d: usize, lr: f64, gd: &GdConfig) {
    rec.param("n", n as i64);
    rec.param("d", d as i64);
    rec.param("lr", lr);
    rec.param("steps", gd.steps as i64);
    rec.param("record_every", gd.record_every as i64);
}
