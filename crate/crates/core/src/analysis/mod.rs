//! Structure quantification: correlation dimension, nonlinear
//! forecastability, surrogate testing, and the final verdict.
//!
//! The pairwise kernels in this module parallelize over disjoint index
//! ranges and reduce in deterministic order (integer counts, ordered
//! collects), so results are bit-identical for any worker count.

mod correlation;
mod forecast;
mod surrogate;

pub use correlation::{correlation_integral, fit_dimension, fit_dimension_with_window};
pub use forecast::knn_forecast_error;
pub use surrogate::shuffle_surrogate_test;

/// Significance level used by the verdict unless overridden.
pub const DEFAULT_ALPHA: f64 = 0.01;

/// A slope at embedding dimension `m` must reach `0.8 * m` to count as
/// space-filling (the noise signature).
pub const SATURATION_FACTOR: f64 = 0.8;

/// Sampled `(log r, log C(r))` curve with an optional fitted scaling region.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationCurve {
    /// Strictly increasing radii (same units as the portrait coordinates).
    pub radii: Vec<f64>,
    /// `C(r)`: fraction of admissible point pairs within each radius.
    pub c_values: Vec<f64>,
    /// Number of pairs behind each estimate (denominator).
    pub n_pairs: u64,
    /// True when every admissible pair was enumerated (no sampling).
    pub exact: bool,
    /// Embedding dimension of the source portrait.
    pub embedding_dim: usize,
    /// Theiler exclusion used when counting pairs.
    pub theiler: usize,
    /// Inclusive index interval of the fitted scaling region.
    pub scaling_region: Option<(usize, usize)>,
    /// Fitted log-log slope: the correlation dimension estimate.
    pub slope: Option<f64>,
    /// Standard error of the fitted slope.
    pub slope_stderr: Option<f64>,
    /// Coefficient of determination of the fit.
    pub r_squared: Option<f64>,
}

/// One-step nonlinear prediction skill.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastResult {
    /// Prediction horizon in samples (always 1 here).
    pub horizon: usize,
    /// RMS prediction error divided by the RMS error of the mean predictor.
    pub normalized_error: f64,
    /// Neighbors averaged per prediction.
    pub neighbor_count: usize,
    /// Number of held-out test points.
    pub test_points: usize,
}

/// Outcome of a rank-based surrogate test.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateResult {
    /// Statistic on the original series.
    pub observed: f64,
    /// Statistic on each shuffled surrogate.
    pub surrogate_values: Vec<f64>,
    /// `(1 + #{surrogates as extreme as observed}) / (S + 1)`.
    pub p_value: f64,
    /// Which statistic was tested.
    pub statistic_name: String,
}

/// Final classification of an event series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// Temporal structure incompatible with independent draws.
    DeterministicStructure,
    /// No forecastable structure and space-filling dimension estimates.
    RandomConsistent,
    /// Neither signature is clean at the configured significance.
    Inconclusive,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Classification::DeterministicStructure => "DeterministicStructure",
            Classification::RandomConsistent => "RandomConsistent",
            Classification::Inconclusive => "Inconclusive",
        };
        f.write_str(s)
    }
}

/// Verdict with its supporting evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub classification: Classification,
    /// Correlation dimension at the primary embedding, when a fit succeeded.
    pub dimension_estimate: Option<f64>,
    /// Surrogate p-value of the forecast statistic.
    pub forecast_p: f64,
    /// True when dimension estimates grow like the embedding dimension.
    pub dimension_saturation: bool,
    pub evidence_summary: String,
}

/// Decide between deterministic structure, randomness, and neither.
///
/// * `forecast_p <= alpha` means the series is forecastable beyond every
///   shuffled copy of itself: deterministic structure.
/// * Otherwise, if the dimension estimate keeps up with the embedding
///   dimension at every probed `m` (slope >= 0.8 m), the series fills
///   space the way independent draws do: random-consistent.
/// * Anything else is inconclusive.
pub fn classify(
    dimension: Option<&CorrelationCurve>,
    forecast_surrogate: &SurrogateResult,
    saturation_probe: &[(usize, Option<f64>)],
    alpha: f64,
) -> Verdict {
    let forecast_p = forecast_surrogate.p_value;
    let dimension_saturation = !saturation_probe.is_empty()
        && saturation_probe.iter().all(|(m, slope)| {
            slope.map_or(false, |s| s >= SATURATION_FACTOR * *m as f64)
        });
    let classification = if forecast_p <= alpha {
        Classification::DeterministicStructure
    } else if dimension_saturation {
        Classification::RandomConsistent
    } else {
        Classification::Inconclusive
    };
    let dimension_estimate = dimension.and_then(|c| c.slope);

    let mut evidence = format!(
        "forecast statistic {:.4} has surrogate p={:.4} (alpha={alpha})",
        forecast_surrogate.observed, forecast_p
    );
    match dimension_estimate {
        Some(d) => evidence.push_str(&format!("; correlation dimension {:.3}", d)),
        None => evidence.push_str("; no correlation dimension fit"),
    }
    let probe_desc: Vec<String> = saturation_probe
        .iter()
        .map(|(m, s)| match s {
            Some(s) => format!("m={m}:{s:.2}"),
            None => format!("m={m}:none"),
        })
        .collect();
    if !probe_desc.is_empty() {
        evidence.push_str(&format!(
            "; saturation probe [{}] => {}",
            probe_desc.join(", "),
            if dimension_saturation { "space-filling" } else { "not space-filling" }
        ));
    }

    Verdict {
        classification,
        dimension_estimate,
        forecast_p,
        dimension_saturation,
        evidence_summary: evidence,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surrogate_with_p(p: f64) -> SurrogateResult {
        SurrogateResult {
            observed: 0.5,
            surrogate_values: vec![1.0; 99],
            p_value: p,
            statistic_name: "knn_forecast_normalized_error".into(),
        }
    }

    #[test]
    fn low_p_means_deterministic() {
        let v = classify(None, &surrogate_with_p(0.01), &[], 0.01);
        assert_eq!(v.classification, Classification::DeterministicStructure);
        assert!(!v.dimension_saturation);
    }

    #[test]
    fn saturated_slopes_mean_random() {
        let probe = [(2, Some(1.9)), (3, Some(2.8)), (4, Some(3.5))];
        let v = classify(None, &surrogate_with_p(0.45), &probe, 0.01);
        assert_eq!(v.classification, Classification::RandomConsistent);
        assert!(v.dimension_saturation);
    }

    #[test]
    fn middling_p_without_saturation_is_inconclusive() {
        let probe = [(2, Some(1.2)), (3, Some(1.3))];
        let v = classify(None, &surrogate_with_p(0.04), &probe, 0.01);
        assert_eq!(v.classification, Classification::Inconclusive);
    }

    #[test]
    fn missing_probe_slope_blocks_random_verdict() {
        let probe = [(2, Some(1.9)), (3, None)];
        let v = classify(None, &surrogate_with_p(0.5), &probe, 0.01);
        assert_eq!(v.classification, Classification::Inconclusive);
    }
}
