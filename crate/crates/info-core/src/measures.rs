use crate::{dist::JointDistribution, InfoError, InfoUnit, NEG_SLACK};
use serde::{Deserialize, Serialize};

/// Clamps floating-point roundoff on a measure that is nonnegative in exact
/// arithmetic. Values below `-NEG_SLACK` indicate an inconsistent table.
fn nonneg(nats: f64) -> Result<f64, InfoError> {
    if nats < -NEG_SLACK {
        Err(InfoError::NegativeMeasure(nats))
    } else {
        Ok(nats.max(0.0))
    }
}

fn entropy_nats(dist: &JointDistribution, subset: &[&str]) -> Result<f64, InfoError> {
    let marginal = dist.marginalize(subset)?;
    let h = -marginal
        .probabilities()
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>();
    nonneg(h)
}

/// Checks that the given subsets share no variable.
fn disjoint(subsets: &[&[&str]]) -> Result<(), InfoError> {
    let mut seen: Vec<&str> = Vec::new();
    for subset in subsets {
        for name in *subset {
            if seen.contains(name) {
                return Err(InfoError::OverlappingSubsets(name.to_string()));
            }
            seen.push(name);
        }
    }
    Ok(())
}

fn union<'a>(subsets: &[&[&'a str]]) -> Vec<&'a str> {
    subsets.iter().flat_map(|s| s.iter().copied()).collect()
}

/// Shannon entropy `H(subset)` of the marginal over the given variables.
pub fn entropy(
    dist: &JointDistribution,
    subset: &[&str],
    unit: InfoUnit,
) -> Result<f64, InfoError> {
    Ok(unit.from_nats(entropy_nats(dist, subset)?))
}

/// Mutual information `I(a; b)`, or conditional `I(a; b | given)` when a
/// conditioning subset is supplied. Computed from entropies:
/// `I(A;B|C) = H(AC) + H(BC) - H(ABC) - H(C)`.
pub fn mutual_information(
    dist: &JointDistribution,
    a: &[&str],
    b: &[&str],
    given: Option<&[&str]>,
    unit: InfoUnit,
) -> Result<f64, InfoError> {
    Ok(unit.from_nats(mutual_information_nats(dist, a, b, given)?))
}

fn mutual_information_nats(
    dist: &JointDistribution,
    a: &[&str],
    b: &[&str],
    given: Option<&[&str]>,
) -> Result<f64, InfoError> {
    if a.is_empty() || b.is_empty() {
        return Err(InfoError::EmptySubset);
    }
    match given {
        None | Some([]) => {
            disjoint(&[a, b])?;
            let h_a = entropy_nats(dist, a)?;
            let h_b = entropy_nats(dist, b)?;
            let h_ab = entropy_nats(dist, &union(&[a, b]))?;
            nonneg(h_a + h_b - h_ab)
        }
        Some(c) => {
            disjoint(&[a, b, c])?;
            let h_ac = entropy_nats(dist, &union(&[a, c]))?;
            let h_bc = entropy_nats(dist, &union(&[b, c]))?;
            let h_abc = entropy_nats(dist, &union(&[a, b, c]))?;
            let h_c = entropy_nats(dist, c)?;
            nonneg(h_ac + h_bc - h_abc - h_c)
        }
    }
}

/// Interaction information `I(a; b) - I(a; b | w)`. Positive values mean `w`
/// explains away dependence between `a` and `b`; negative values mean
/// conditioning on `w` induces dependence. Unlike mutual information this
/// quantity is signed.
pub fn interaction_information(
    dist: &JointDistribution,
    a: &[&str],
    b: &[&str],
    w: &[&str],
    unit: InfoUnit,
) -> Result<f64, InfoError> {
    let unconditional = mutual_information_nats(dist, a, b, None)?;
    let conditional = mutual_information_nats(dist, a, b, Some(w))?;
    Ok(unit.from_nats(unconditional - conditional))
}

/// Split of total memorization into a marginal and a relational part.
///
/// `mem = I(W; X | Y)` is total memorization of `X` by the output `W` given
/// side information `Y`; `mem_m = I(W; X)` is the part visible without `Y`;
/// `mem_r = I(X; Y | W) - I(X; Y)` is the relational remainder, the negated
/// interaction information. The identity `mem = mem_m + mem_r` holds exactly
/// in exact arithmetic and to roundoff here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemorizationDecomposition {
    pub mem: f64,
    pub mem_m: f64,
    pub mem_r: f64,
    pub unit: InfoUnit,
}

/// Computes the memorization decomposition of `w` against data `x` and side
/// information `y` under the given joint table.
pub fn memorization_decomposition(
    dist: &JointDistribution,
    x: &[&str],
    y: &[&str],
    w: &[&str],
    unit: InfoUnit,
) -> Result<MemorizationDecomposition, InfoError> {
    if x.is_empty() || y.is_empty() || w.is_empty() {
        return Err(InfoError::EmptySubset);
    }
    disjoint(&[x, y, w])?;
    // All three quantities are combinations of seven entropies; computing the
    // entropies once keeps the decomposition identity tight in floating point.
    let h_x = entropy_nats(dist, x)?;
    let h_y = entropy_nats(dist, y)?;
    let h_w = entropy_nats(dist, w)?;
    let h_xy = entropy_nats(dist, &union(&[x, y]))?;
    let h_xw = entropy_nats(dist, &union(&[x, w]))?;
    let h_yw = entropy_nats(dist, &union(&[y, w]))?;
    let h_xyw = entropy_nats(dist, &union(&[x, y, w]))?;

    // mem = I(W;X|Y) = H(YW) + H(XY) - H(XYW) - H(Y)
    let mem = nonneg(h_yw + h_xy - h_xyw - h_y)?;
    // mem_m = I(W;X) = H(X) + H(W) - H(XW)
    let mem_m = nonneg(h_x + h_w - h_xw)?;
    // mem_r = I(X;Y|W) - I(X;Y); each mutual information is validated
    // separately before taking the signed difference.
    let cond = nonneg(h_xw + h_yw - h_xyw - h_w)?;
    let uncond = nonneg(h_x + h_y - h_xy)?;
    let mem_r = cond - uncond;

    Ok(MemorizationDecomposition {
        mem: unit.from_nats(mem),
        mem_m: unit.from_nats(mem_m),
        mem_r: unit.from_nats(mem_r),
        unit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn dist(vars: &[&str], sizes: &[usize], p: Vec<f64>) -> JointDistribution {
        JointDistribution::from_named(vars, sizes, p).unwrap()
    }

    /// Uniform x, y with w = x XOR y.
    fn xor_table() -> JointDistribution {
        let mut p = vec![0.0; 8];
        for x in 0..2usize {
            for y in 0..2usize {
                p[x * 4 + y * 2 + (x ^ y)] = 0.25;
            }
        }
        dist(&["X", "Y", "W"], &[2, 2, 2], p)
    }

    /// Uniform independent x, y with w = x.
    fn copy_table() -> JointDistribution {
        let mut p = vec![0.0; 8];
        for x in 0..2usize {
            for y in 0..2usize {
                p[x * 4 + y * 2 + x] = 0.25;
            }
        }
        dist(&["X", "Y", "W"], &[2, 2, 2], p)
    }

    #[test]
    fn entropy_known_values() {
        let uniform = dist(&["A"], &[2], vec![0.5, 0.5]);
        assert_relative_eq!(entropy(&uniform, &["A"], InfoUnit::Bits).unwrap(), 1.0);

        let point = dist(&["A"], &[3], vec![0.0, 1.0, 0.0]);
        assert_eq!(entropy(&point, &["A"], InfoUnit::Bits).unwrap(), 0.0);

        let skewed = dist(&["A"], &[2], vec![0.25, 0.75]);
        // Direct evaluation of -sum p log2 p.
        let expected = -(0.25f64 * 0.25f64.log2() + 0.75 * 0.75f64.log2());
        assert_relative_eq!(
            entropy(&skewed, &["A"], InfoUnit::Bits).unwrap(),
            expected,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            entropy(&skewed, &["A"], InfoUnit::Bits).unwrap(),
            0.8112781244591328,
            epsilon = 1e-14
        );
    }

    #[test]
    fn unit_conversion_is_ln2() {
        let skewed = dist(&["A"], &[2], vec![0.25, 0.75]);
        let bits = entropy(&skewed, &["A"], InfoUnit::Bits).unwrap();
        let nats = entropy(&skewed, &["A"], InfoUnit::Nats).unwrap();
        assert_relative_eq!(nats, bits * std::f64::consts::LN_2, epsilon = 1e-12);
    }

    #[test]
    fn mutual_information_known_values() {
        // Independent fair bits.
        let indep = dist(&["A", "B"], &[2, 2], vec![0.25; 4]);
        assert_eq!(
            mutual_information(&indep, &["A"], &["B"], None, InfoUnit::Bits).unwrap(),
            0.0
        );

        // B is a copy of A.
        let copy = dist(&["A", "B"], &[2, 2], vec![0.5, 0.0, 0.0, 0.5]);
        assert_relative_eq!(
            mutual_information(&copy, &["A"], &["B"], None, InfoUnit::Bits).unwrap(),
            1.0
        );
    }

    #[test]
    fn xor_conditioning_induces_dependence() {
        let t = xor_table();
        assert_eq!(
            mutual_information(&t, &["X"], &["Y"], None, InfoUnit::Bits).unwrap(),
            0.0
        );
        assert_relative_eq!(
            mutual_information(&t, &["X"], &["Y"], Some(&["W"]), InfoUnit::Bits).unwrap(),
            1.0
        );
        assert_relative_eq!(
            interaction_information(&t, &["X"], &["Y"], &["W"], InfoUnit::Bits).unwrap(),
            -1.0
        );
    }

    #[test]
    fn rejects_overlapping_subsets() {
        let t = xor_table();
        assert!(matches!(
            mutual_information(&t, &["X"], &["X"], None, InfoUnit::Bits).unwrap_err(),
            InfoError::OverlappingSubsets(_)
        ));
        assert!(matches!(
            mutual_information(&t, &["X"], &["Y"], Some(&["X"]), InfoUnit::Bits).unwrap_err(),
            InfoError::OverlappingSubsets(_)
        ));
        assert!(matches!(
            memorization_decomposition(&t, &["X"], &["Y"], &["Y"], InfoUnit::Bits).unwrap_err(),
            InfoError::OverlappingSubsets(_)
        ));
    }

    #[test]
    fn decomposition_xor_is_purely_relational() {
        let d =
            memorization_decomposition(&xor_table(), &["X"], &["Y"], &["W"], InfoUnit::Bits)
                .unwrap();
        assert_relative_eq!(d.mem, 1.0);
        assert_relative_eq!(d.mem_m, 0.0);
        assert_relative_eq!(d.mem_r, 1.0);
    }

    #[test]
    fn decomposition_copy_is_purely_marginal() {
        let d =
            memorization_decomposition(&copy_table(), &["X"], &["Y"], &["W"], InfoUnit::Bits)
                .unwrap();
        assert_relative_eq!(d.mem, 1.0);
        assert_relative_eq!(d.mem_m, 1.0);
        assert_relative_eq!(d.mem_r, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn decomposition_independent_output_is_zero() {
        // w uniform independent of (x, y).
        let p = vec![0.125; 8];
        let t = dist(&["X", "Y", "W"], &[2, 2, 2], p);
        let d = memorization_decomposition(&t, &["X"], &["Y"], &["W"], InfoUnit::Bits).unwrap();
        assert_relative_eq!(d.mem, 0.0, epsilon = 1e-12);
        assert_relative_eq!(d.mem_m, 0.0, epsilon = 1e-12);
        assert_relative_eq!(d.mem_r, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn negative_clamp_rejects_beyond_slack() {
        assert!(nonneg(-1e-13).unwrap() == 0.0);
        assert!(nonneg(1e-13).unwrap() > 0.0);
        assert!(matches!(
            nonneg(-1e-9),
            Err(InfoError::NegativeMeasure(_))
        ));
    }
}
