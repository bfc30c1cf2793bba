use crate::{MechError, Mechanism};
use info_core::{memorization_decomposition, InfoUnit, JointDistribution, MemorizationDecomposition};
use rand::Rng;

/// Joint table over `(x, y, w)` obtained by pushing a prior over the inputs
/// through the mechanism: `p(x, y, w) = prior(x, y) * p(w | x, y)`.
///
/// The prior must be a two-variable table whose alphabet sizes match the
/// mechanism inputs. The output variable is named `W`, or `W_` if the prior
/// already uses that name.
pub fn joint_with_output(
    mech: &Mechanism,
    prior: &JointDistribution,
) -> Result<JointDistribution, MechError> {
    let sizes = prior.alphabet_sizes();
    if sizes.len() != 2 || sizes[0] != mech.nx() || sizes[1] != mech.ny() {
        return Err(MechError::PriorShape {
            nx: mech.nx(),
            ny: mech.ny(),
            actual: sizes.to_vec(),
        });
    }
    let x_name = prior.variables()[0].clone();
    let y_name = prior.variables()[1].clone();
    let w_name = if x_name == "W" || y_name == "W" {
        "W_".to_string()
    } else {
        "W".to_string()
    };
    let (nx, ny, nw) = (mech.nx(), mech.ny(), mech.nw());
    let mut p = Vec::with_capacity(nx * ny * nw);
    for x in 0..nx {
        for y in 0..ny {
            let px_y = prior.probability(&[x, y])?;
            for w in 0..nw {
                p.push(px_y * mech.prob(w, x, y));
            }
        }
    }
    Ok(JointDistribution::new(
        vec![x_name, y_name, w_name],
        vec![nx, ny, nw],
        p,
    )?)
}

/// Memorization decomposition of a mechanism under a prior on its inputs:
/// total `mem = I(W; X | Y)`, marginal part `mem_m = I(W; X)`, and
/// relational part `mem_r = I(X; Y | W) - I(X; Y)`.
pub fn decompose(
    mech: &Mechanism,
    prior: &JointDistribution,
    unit: InfoUnit,
) -> Result<MemorizationDecomposition, MechError> {
    let joint = joint_with_output(mech, prior)?;
    let names: Vec<&str> = joint.variables().iter().map(|s| s.as_str()).collect();
    Ok(memorization_decomposition(
        &joint,
        &[names[0]],
        &[names[1]],
        &[names[2]],
        unit,
    )?)
}

/// Uniform prior over the input product alphabet, with variables `X`, `Y`.
pub fn uniform_prior(nx: usize, ny: usize) -> Result<JointDistribution, MechError> {
    if nx == 0 || ny == 0 {
        return Err(MechError::EmptyAlphabet { nx, ny, nw: 1 });
    }
    let cells = nx * ny;
    let mut p = vec![1.0 / cells as f64; cells];
    let sum: f64 = p.iter().sum();
    p[0] += 1.0 - sum;
    Ok(JointDistribution::from_named(&["X", "Y"], &[nx, ny], p)?)
}

/// Random prior over the input product alphabet: a flat-Dirichlet draw over
/// all `nx * ny` cells, with variables `X`, `Y`.
pub fn random_prior<R: Rng + ?Sized>(
    nx: usize,
    ny: usize,
    rng: &mut R,
) -> Result<JointDistribution, MechError> {
    if nx == 0 || ny == 0 {
        return Err(MechError::EmptyAlphabet { nx, ny, nw: 1 });
    }
    let cells = nx * ny;
    let mut p: Vec<f64> = (0..cells)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let total: f64 = p.iter().sum();
    if total <= 0.0 {
        return uniform_prior(nx, ny);
    }
    for v in &mut p {
        *v /= total;
    }
    let sum: f64 = p.iter().sum();
    let imax = p
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    p[imax] += 1.0 - sum;
    Ok(JointDistribution::from_named(&["X", "Y"], &[nx, ny], p)?)
}
