use serde::{Deserialize, Serialize};

use crate::metric::Metric;
use crate::QaError;

/// Train/validation comparison for one metric.
///
/// `m = r_tr - r_val` is the raw memorization gap in percentage points. When
/// an answer-entropy estimate is supplied, `mem_r_scaled_bits` converts the
/// gap to information units (`H · m / 100`), and with a sample count the
/// report also carries `mem_m_bound = e^{-H} / n` (H in nats): the most a
/// sample-marginal leak can contribute, which is tiny next to H itself
/// whenever `n e^{-H}` observations share each answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemorizationReport {
    pub metric: Metric,
    pub r_tr: f64,
    pub r_val: f64,
    /// Exactly `r_tr - r_val` as computed in IEEE arithmetic; reported at
    /// full precision rather than rounded.
    pub m: f64,
    pub h_x_bits: Option<f64>,
    pub mem_r_scaled_bits: Option<f64>,
    pub mem_m_bound: Option<f64>,
    pub n_train: Option<usize>,
    pub n_val: Option<usize>,
}

/// Builds a report from recovery rates in [0, 100]. `h_x_bits` is an
/// answer-entropy estimate in bits; `n` is the number of audited samples,
/// used only for the marginal bound.
pub fn memorization_report(
    r_tr: f64,
    r_val: f64,
    metric: Metric,
    h_x_bits: Option<f64>,
    n: Option<usize>,
) -> Result<MemorizationReport, QaError> {
    for rate in [r_tr, r_val] {
        if !(0.0..=100.0).contains(&rate) {
            return Err(QaError::InvalidRate { value: rate });
        }
    }
    let m = r_tr - r_val;
    let mem_r_scaled_bits = h_x_bits.map(|h| h * m / 100.0);
    let mem_m_bound = match (h_x_bits, n) {
        (Some(h), Some(n)) if n > 0 => Some((-h * std::f64::consts::LN_2).exp() / n as f64),
        _ => None,
    };
    Ok(MemorizationReport {
        metric,
        r_tr,
        r_val,
        m,
        h_x_bits,
        mem_r_scaled_bits,
        mem_m_bound,
        n_train: None,
        n_val: None,
    })
}

impl MemorizationReport {
    /// Attaches per-split sample counts.
    pub fn with_counts(mut self, n_train: usize, n_val: usize) -> Self {
        self.n_train = Some(n_train);
        self.n_val = Some(n_val);
        self
    }

    /// One comma-separated summary row (no header):
    /// `metric,r_tr,r_val,m`.
    pub fn summary_row(&self) -> String {
        format!("{},{},{},{}", self.metric, self.r_tr, self.r_val, self.m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_is_exact_difference() {
        let r = memorization_report(39.2, 34.7, Metric::F1, None, None).unwrap();
        // 39.2 and 34.7 round to floats whose difference is exactly 4.5.
        assert_eq!(r.m, 4.5);
        assert_eq!(r.m.to_bits(), (39.2f64 - 34.7).to_bits());
    }

    #[test]
    fn gap_reports_full_precision_not_rounded() {
        let r = memorization_report(35.8, 31.5, Metric::Em, None, None).unwrap();
        assert_eq!(r.m.to_bits(), (35.8f64 - 31.5).to_bits());
        // The IEEE difference is close to but not exactly 4.3.
        assert!((r.m - 4.3).abs() < 1e-14);
        assert_ne!(r.m, 4.3);
    }

    #[test]
    fn equal_rates_give_zero_gap() {
        let r = memorization_report(12.5, 12.5, Metric::Em, None, None).unwrap();
        assert_eq!(r.m, 0.0);
    }

    #[test]
    fn entropy_scaling_is_linear() {
        let base = memorization_report(60.0, 10.0, Metric::F1, Some(2.0), None).unwrap();
        let doubled = memorization_report(60.0, 10.0, Metric::F1, Some(4.0), None).unwrap();
        assert!((base.mem_r_scaled_bits.unwrap() - 1.0).abs() < 1e-12);
        assert!(
            (doubled.mem_r_scaled_bits.unwrap() - 2.0 * base.mem_r_scaled_bits.unwrap()).abs()
                < 1e-12
        );
    }

    #[test]
    fn marginal_bound_matches_closed_form() {
        // H = 1 bit = ln 2 nats: e^{-ln 2} / 10 = 0.05.
        let r = memorization_report(0.0, 0.0, Metric::Em, Some(1.0), Some(10)).unwrap();
        assert!((r.mem_m_bound.unwrap() - 0.05).abs() < 1e-12);
    }

    #[test]
    fn rates_outside_range_rejected() {
        assert!(matches!(
            memorization_report(-0.1, 0.0, Metric::Em, None, None),
            Err(QaError::InvalidRate { .. })
        ));
        assert!(matches!(
            memorization_report(0.0, 100.5, Metric::Em, None, None),
            Err(QaError::InvalidRate { .. })
        ));
    }

    #[test]
    fn summary_row_layout() {
        let r = memorization_report(39.2, 34.7, Metric::F1, None, None)
            .unwrap()
            .with_counts(4, 4);
        assert_eq!(r.summary_row(), "F1,39.2,34.7,4.5");
    }
}
