use crate::{InfoError, SUM_TOLERANCE};
use serde::{Deserialize, Serialize};

/// Dense joint probability table over named discrete variables.
///
/// Entries are stored row-major with the last variable varying fastest, so
/// the flat index of assignment `(a_0, ..., a_{k-1})` is
/// `sum_i a_i * stride_i` with `stride_i = prod_{j>i} size_j`.
///
/// Validated on construction (including deserialization): variable names are
/// unique, alphabet sizes are positive, the table has exactly
/// `prod(sizes)` finite nonnegative entries, and the total mass is 1 within
/// [`SUM_TOLERANCE`](crate::SUM_TOLERANCE).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawJointDistribution", into = "RawJointDistribution")]
pub struct JointDistribution {
    variables: Vec<String>,
    alphabet_sizes: Vec<usize>,
    probabilities: Vec<f64>,
}

/// Wire form of a joint table; conversion into [`JointDistribution`]
/// revalidates, so a hand-edited file cannot produce an invalid value.
#[derive(Serialize, Deserialize)]
struct RawJointDistribution {
    variables: Vec<String>,
    alphabet_sizes: Vec<usize>,
    probabilities: Vec<f64>,
}

impl TryFrom<RawJointDistribution> for JointDistribution {
    type Error = InfoError;

    fn try_from(raw: RawJointDistribution) -> Result<Self, InfoError> {
        JointDistribution::new(raw.variables, raw.alphabet_sizes, raw.probabilities)
    }
}

impl From<JointDistribution> for RawJointDistribution {
    fn from(d: JointDistribution) -> Self {
        RawJointDistribution {
            variables: d.variables,
            alphabet_sizes: d.alphabet_sizes,
            probabilities: d.probabilities,
        }
    }
}

impl JointDistribution {
    /// Builds a validated joint table.
    pub fn new(
        variables: Vec<String>,
        alphabet_sizes: Vec<usize>,
        probabilities: Vec<f64>,
    ) -> Result<Self, InfoError> {
        if variables.len() != alphabet_sizes.len() {
            return Err(InfoError::ShapeMismatch {
                expected: variables.len(),
                actual: alphabet_sizes.len(),
            });
        }
        for (i, name) in variables.iter().enumerate() {
            if variables[..i].contains(name) {
                return Err(InfoError::DuplicateVariable(name.clone()));
            }
        }
        for (name, &size) in variables.iter().zip(&alphabet_sizes) {
            if size == 0 {
                return Err(InfoError::EmptyAlphabet(name.clone()));
            }
        }
        let cells: usize = alphabet_sizes.iter().product();
        if probabilities.len() != cells {
            return Err(InfoError::ShapeMismatch {
                expected: cells,
                actual: probabilities.len(),
            });
        }
        for (index, &value) in probabilities.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(InfoError::InvalidProbability { index, value });
            }
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(InfoError::NotNormalized(total));
        }
        Ok(JointDistribution {
            variables,
            alphabet_sizes,
            probabilities,
        })
    }

    /// Convenience constructor from string slices.
    pub fn from_named(
        variables: &[&str],
        alphabet_sizes: &[usize],
        probabilities: Vec<f64>,
    ) -> Result<Self, InfoError> {
        Self::new(
            variables.iter().map(|s| s.to_string()).collect(),
            alphabet_sizes.to_vec(),
            probabilities,
        )
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn alphabet_sizes(&self) -> &[usize] {
        &self.alphabet_sizes
    }

    /// Row-major probability entries, last variable fastest.
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Alphabet size of a single named variable.
    pub fn alphabet_size(&self, variable: &str) -> Result<usize, InfoError> {
        Ok(self.alphabet_sizes[self.position(variable)?])
    }

    /// Probability of a full assignment, given in declared variable order.
    pub fn probability(&self, assignment: &[usize]) -> Result<f64, InfoError> {
        if assignment.len() != self.variables.len() {
            return Err(InfoError::ShapeMismatch {
                expected: self.variables.len(),
                actual: assignment.len(),
            });
        }
        let mut flat = 0;
        for ((&a, &size), stride) in assignment
            .iter()
            .zip(&self.alphabet_sizes)
            .zip(self.strides())
        {
            if a >= size {
                return Err(InfoError::ShapeMismatch {
                    expected: size,
                    actual: a,
                });
            }
            flat += a * stride;
        }
        Ok(self.probabilities[flat])
    }

    fn position(&self, variable: &str) -> Result<usize, InfoError> {
        self.variables
            .iter()
            .position(|v| v == variable)
            .ok_or_else(|| InfoError::UnknownVariable(variable.to_string()))
    }

    /// Positions of the given variables, rejecting unknowns and duplicates.
    pub(crate) fn positions(&self, subset: &[&str]) -> Result<Vec<usize>, InfoError> {
        if subset.is_empty() {
            return Err(InfoError::EmptySubset);
        }
        let mut out = Vec::with_capacity(subset.len());
        for (i, name) in subset.iter().enumerate() {
            if subset[..i].contains(name) {
                return Err(InfoError::OverlappingSubsets(name.to_string()));
            }
            out.push(self.position(name)?);
        }
        Ok(out)
    }

    /// Strides per variable for flat indexing, last variable fastest.
    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.alphabet_sizes.len()];
        for i in (0..self.alphabet_sizes.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.alphabet_sizes[i + 1];
        }
        strides
    }

    /// Marginal over `keep`, in the order given. Always yields a valid
    /// distribution: mass is regrouped, never lost.
    pub fn marginalize(&self, keep: &[&str]) -> Result<JointDistribution, InfoError> {
        let positions = self.positions(keep)?;
        let strides = self.strides();
        let kept_sizes: Vec<usize> = positions.iter().map(|&p| self.alphabet_sizes[p]).collect();
        let mut kept_strides = vec![1; kept_sizes.len()];
        for i in (0..kept_sizes.len().saturating_sub(1)).rev() {
            kept_strides[i] = kept_strides[i + 1] * kept_sizes[i + 1];
        }
        let cells: usize = kept_sizes.iter().product();
        let mut probs = vec![0.0; cells];
        for (flat, &p) in self.probabilities.iter().enumerate() {
            let mut sub = 0;
            for (k, &pos) in positions.iter().enumerate() {
                let digit = (flat / strides[pos]) % self.alphabet_sizes[pos];
                sub += digit * kept_strides[k];
            }
            probs[sub] += p;
        }
        JointDistribution::new(
            keep.iter().map(|s| s.to_string()).collect(),
            kept_sizes,
            probs,
        )
    }

    /// Serializes to the JSON interchange form.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("joint table serializes infallibly")
    }

    /// Parses and validates the JSON interchange form.
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xor_table() -> JointDistribution {
        // p(x, y, w) uniform over x, y with w = x XOR y.
        let mut p = vec![0.0; 8];
        for x in 0..2usize {
            for y in 0..2usize {
                p[x * 4 + y * 2 + (x ^ y)] = 0.25;
            }
        }
        JointDistribution::from_named(&["X", "Y", "W"], &[2, 2, 2], p).unwrap()
    }

    #[test]
    fn rejects_bad_tables() {
        let err = JointDistribution::from_named(&["A"], &[2], vec![0.5]).unwrap_err();
        assert!(matches!(err, InfoError::ShapeMismatch { .. }));

        let err = JointDistribution::from_named(&["A"], &[2], vec![0.5, 0.6]).unwrap_err();
        assert!(matches!(err, InfoError::NotNormalized(_)));

        let err = JointDistribution::from_named(&["A"], &[2], vec![-0.1, 1.1]).unwrap_err();
        assert!(matches!(err, InfoError::InvalidProbability { .. }));

        let err = JointDistribution::from_named(&["A", "A"], &[2, 2], vec![0.25; 4]).unwrap_err();
        assert!(matches!(err, InfoError::DuplicateVariable(_)));

        let err = JointDistribution::from_named(&["A", "B"], &[2, 0], vec![]).unwrap_err();
        assert!(matches!(err, InfoError::EmptyAlphabet(_)));
    }

    #[test]
    fn indexing_is_row_major_last_fastest() {
        let d = JointDistribution::from_named(
            &["A", "B"],
            &[2, 3],
            vec![0.05, 0.10, 0.15, 0.20, 0.25, 0.25],
        )
        .unwrap();
        assert_eq!(d.probability(&[0, 0]).unwrap(), 0.05);
        assert_eq!(d.probability(&[0, 2]).unwrap(), 0.15);
        assert_eq!(d.probability(&[1, 1]).unwrap(), 0.25);
        assert!(d.probability(&[2, 0]).is_err());
    }

    #[test]
    fn marginalization_regroups_mass() {
        let d = xor_table();
        let m = d.marginalize(&["X", "Y"]).unwrap();
        assert_eq!(m.alphabet_sizes(), &[2, 2]);
        for x in 0..2 {
            for y in 0..2 {
                assert_eq!(m.probability(&[x, y]).unwrap(), 0.25);
            }
        }
        // Marginal in reversed order transposes the table.
        let r = d.marginalize(&["W", "X"]).unwrap();
        assert_eq!(r.variables(), &["W".to_string(), "X".to_string()]);
        assert_eq!(r.probability(&[1, 0]).unwrap(), 0.25);
    }

    #[test]
    fn marginalize_rejects_unknown_and_duplicate() {
        let d = xor_table();
        assert!(matches!(
            d.marginalize(&["Z"]).unwrap_err(),
            InfoError::UnknownVariable(_)
        ));
        assert!(matches!(
            d.marginalize(&["X", "X"]).unwrap_err(),
            InfoError::OverlappingSubsets(_)
        ));
        assert!(matches!(d.marginalize(&[]).unwrap_err(), InfoError::EmptySubset));
    }

    #[test]
    fn json_round_trip_is_exact() {
        let d = JointDistribution::from_named(
            &["X", "Y"],
            &[2, 2],
            vec![0.1, 0.2, 0.3, 0.4],
        )
        .unwrap();
        let back = JointDistribution::from_json(&d.to_json()).unwrap();
        assert_eq!(back, d);
        // Bit-exact entries, not merely close.
        for (a, b) in back.probabilities().iter().zip(d.probabilities()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn json_rejects_invalid_payload() {
        let bad = r#"{"variables":["A"],"alphabet_sizes":[2],"probabilities":[0.5,0.6]}"#;
        assert!(JointDistribution::from_json(bad).is_err());
    }
}
