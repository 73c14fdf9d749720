//! Shuffle-surrogate test of the forecast statistic.
//!
//! The null hypothesis is exchangeability: every event is an independent
//! draw from the same marginal. Random permutations preserve the marginal
//! exactly while destroying temporal order, so a series that out-forecasts
//! all its shuffles carries genuine dynamical structure.

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::embedding::EmbeddingConfig;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, seeded_rng};
use crate::series::EventSeries;

use super::{knn_forecast_error, SurrogateResult};

/// Minimum surrogate count for a meaningful rank p-value.
pub const MIN_SURROGATES: usize = 19;

/// Name recorded in [`SurrogateResult::statistic_name`].
pub const FORECAST_STATISTIC: &str = "knn_forecast_normalized_error";

/// Rank the observed forecast error against `n_surrogates` random
/// permutations of the series.
///
/// "As extreme" means a surrogate error less than or equal to the observed
/// one, so `p_value = (1 + #extreme) / (n_surrogates + 1)` and the smallest
/// attainable p is `1 / (n_surrogates + 1)`.
pub fn shuffle_surrogate_test(
    series: &EventSeries,
    config: EmbeddingConfig,
    n_surrogates: usize,
    seed: u64,
    k: usize,
    test_fraction: f64,
    theiler: usize,
) -> Result<SurrogateResult> {
    if n_surrogates < MIN_SURROGATES {
        return Err(Error::InvalidParameter(format!(
            "surrogate test needs >= {MIN_SURROGATES} surrogates, got {n_surrogates}"
        )));
    }
    let observed = knn_forecast_error(series, config, k, test_fraction, theiler)?.normalized_error;

    // Surrogate i is fully determined by (seed, i): evaluation order and
    // worker count cannot change any value.
    let surrogate_values: Vec<f64> = (0..n_surrogates)
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let mut rng = seeded_rng(derive_seed(seed, i as u64));
            let mut values = series.values().to_vec();
            values.shuffle(&mut rng);
            let shuffled = EventSeries::new(
                values,
                format!("surrogate[{i}]({})", series.metadata().source_label),
                Some(seed),
            )?;
            Ok(knn_forecast_error(&shuffled, config, k, test_fraction, theiler)?.normalized_error)
        })
        .collect::<Result<Vec<f64>>>()?;

    let extreme = surrogate_values.iter().filter(|&&v| v <= observed).count();
    let p_value = (1 + extreme) as f64 / (n_surrogates + 1) as f64;

    Ok(SurrogateResult {
        observed,
        surrogate_values,
        p_value,
        statistic_name: FORECAST_STATISTIC.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{logistic_series, uniform_series};

    fn config() -> EmbeddingConfig {
        EmbeddingConfig::new(2, 1).unwrap()
    }

    #[test]
    fn logistic_beats_every_shuffle() {
        let s = logistic_series(0.2, 4.0, 5000).unwrap();
        let r = shuffle_surrogate_test(&s, config(), 99, 7, 2, 0.25, 2).unwrap();
        assert_eq!(r.p_value, 0.01);
        assert!(r.surrogate_values.iter().all(|&v| v > r.observed));
    }

    #[test]
    fn iid_series_is_indistinguishable_from_shuffles() {
        let s = uniform_series(5000, 23).unwrap();
        let r = shuffle_surrogate_test(&s, config(), 99, 7, 2, 0.25, 2).unwrap();
        assert!(r.p_value > 0.05, "p = {}", r.p_value);
    }

    #[test]
    fn p_value_has_rank_lower_bound() {
        let s = logistic_series(0.3, 4.0, 3000).unwrap();
        let r = shuffle_surrogate_test(&s, config(), 19, 1, 2, 0.25, 2).unwrap();
        assert!(r.p_value >= 1.0 / 20.0);
        assert!(r.p_value <= 1.0);
    }

    #[test]
    fn surrogate_count_floor_is_enforced() {
        let s = uniform_series(2000, 1).unwrap();
        assert!(shuffle_surrogate_test(&s, config(), 5, 1, 2, 0.25, 2).is_err());
    }

    #[test]
    fn results_are_seed_deterministic() {
        let s = uniform_series(2000, 3).unwrap();
        let a = shuffle_surrogate_test(&s, config(), 19, 11, 2, 0.25, 2).unwrap();
        let b = shuffle_surrogate_test(&s, config(), 19, 11, 2, 0.25, 2).unwrap();
        assert_eq!(a.surrogate_values, b.surrogate_values);
        assert_eq!(a.p_value, b.p_value);
    }
}
