//! Phase-space reconstruction from a single scalar series.
//!
//! A delay portrait uses time-lagged copies of one observable as
//! coordinates: point `j` is `(q_j, q_{j+tau}, ..., q_{j+(m-1)tau})`. For a
//! series produced by deterministic dynamics the portrait traces out the
//! underlying structure; for independent draws it fills space.

use crate::error::{Error, Result};
use crate::series::{EventSeries, SeriesMetadata};

/// Largest supported embedding dimension.
pub const MAX_DIMENSION: usize = 10;

/// Delay-embedding parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmbeddingConfig {
    /// Number of delay coordinates `m`.
    pub dimension: usize,
    /// Lag `tau` between coordinates, in sample steps.
    pub lag: usize,
}

impl EmbeddingConfig {
    pub fn new(dimension: usize, lag: usize) -> Result<Self> {
        if dimension < 1 || dimension > MAX_DIMENSION {
            return Err(Error::InvalidParameter(format!(
                "embedding dimension must lie in [1, {MAX_DIMENSION}], got {dimension}"
            )));
        }
        if lag < 1 {
            return Err(Error::InvalidParameter(format!(
                "lag must be >= 1, got {lag}"
            )));
        }
        Ok(EmbeddingConfig { dimension, lag })
    }

    /// Samples consumed by one point beyond its first coordinate.
    pub fn span(&self) -> usize {
        (self.dimension - 1) * self.lag
    }
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        EmbeddingConfig {
            dimension: 3,
            lag: 1,
        }
    }
}

/// An ordered set of `m`-dimensional delay vectors.
///
/// Coordinates are stored flat, row-major, to keep the pairwise kernels on
/// contiguous memory.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePortrait {
    coords: Vec<f64>,
    config: EmbeddingConfig,
    source: SeriesMetadata,
}

impl PhasePortrait {
    /// Build a portrait from explicit points (synthetic point clouds,
    /// tests). All points must have the same dimension.
    pub fn from_points(points: Vec<Vec<f64>>, label: impl Into<String>) -> Result<Self> {
        let dimension = points.first().map(|p| p.len()).unwrap_or(0);
        if dimension == 0 || dimension > MAX_DIMENSION {
            return Err(Error::InvalidParameter(format!(
                "point dimension must lie in [1, {MAX_DIMENSION}], got {dimension}"
            )));
        }
        let mut coords = Vec::with_capacity(points.len() * dimension);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dimension {
                return Err(Error::InvalidParameter(format!(
                    "point {i} has dimension {} != {dimension}",
                    p.len()
                )));
            }
            coords.extend_from_slice(p);
        }
        let length = points.len();
        Ok(PhasePortrait {
            coords,
            config: EmbeddingConfig { dimension, lag: 1 },
            source: SeriesMetadata {
                source_label: label.into(),
                seed: None,
                length,
                timestamps: None,
            },
        })
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.config.dimension
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.config.dimension
    }

    pub fn config(&self) -> EmbeddingConfig {
        self.config
    }

    pub fn source(&self) -> &SeriesMetadata {
        &self.source
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        let m = self.config.dimension;
        &self.coords[i * m..(i + 1) * m]
    }

    pub fn iter_points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.config.dimension)
    }

    /// Per-coordinate bounding box as `(min, max)` pairs.
    pub fn bounding_box(&self) -> Vec<(f64, f64)> {
        let m = self.config.dimension;
        let mut bounds = vec![(f64::INFINITY, f64::NEG_INFINITY); m];
        for p in self.iter_points() {
            for (c, &v) in p.iter().enumerate() {
                bounds[c].0 = bounds[c].0.min(v);
                bounds[c].1 = bounds[c].1.max(v);
            }
        }
        bounds
    }

    /// Max-norm diameter of the point set (largest coordinate extent).
    pub fn diameter(&self) -> f64 {
        self.bounding_box()
            .iter()
            .map(|(lo, hi)| hi - lo)
            .fold(0.0, f64::max)
    }
}

/// Reconstruct a phase portrait from a scalar series by delay coordinates.
///
/// Point `j`, coordinate `c` is `series[j + c*lag]`; points are ordered
/// by `j`.
pub fn delay_embed(series: &EventSeries, config: EmbeddingConfig) -> Result<PhasePortrait> {
    EmbeddingConfig::new(config.dimension, config.lag)?;
    let n = series.len();
    let span = config.span();
    if n <= span {
        return Err(Error::InsufficientData(format!(
            "series of length {n} cannot be embedded with m={}, lag={} (needs > {span} samples)",
            config.dimension, config.lag
        )));
    }
    let count = n - span;
    let m = config.dimension;
    let values = series.values();
    let mut coords = Vec::with_capacity(count * m);
    for j in 0..count {
        for c in 0..m {
            coords.push(values[j + c * config.lag]);
        }
    }
    Ok(PhasePortrait {
        coords,
        config,
        source: series.metadata().clone(),
    })
}

/// Extract the sequence of strict local maxima, refined by three-point
/// quadratic interpolation.
///
/// A sample `i` is a maximum when `v[i-1] < v[i] >= v[i+1]`; plateaus are
/// attributed to their first sample. The refined value never falls below
/// the sample value, so each output still dominates both flanking samples.
pub fn successive_maxima(series: &EventSeries) -> Result<EventSeries> {
    let v = series.values();
    if v.len() < 3 {
        return Err(Error::InsufficientData(
            "maxima extraction needs >= 3 samples".into(),
        ));
    }
    let mut maxima = Vec::new();
    for i in 1..v.len() - 1 {
        if v[i - 1] < v[i] && v[i] >= v[i + 1] {
            let concavity = v[i - 1] - 2.0 * v[i] + v[i + 1];
            let refined = if concavity < 0.0 {
                let half_slope = (v[i + 1] - v[i - 1]) / 2.0;
                v[i] - (half_slope * half_slope) / (2.0 * concavity)
            } else {
                v[i]
            };
            maxima.push(refined);
        }
    }
    if maxima.is_empty() {
        return Err(Error::NoMaxima);
    }
    EventSeries::new(
        maxima,
        format!("maxima({})", series.metadata().source_label),
        series.metadata().seed,
    )
}

/// Smallest lag at which the sample autocorrelation first drops below
/// `1/e`, clamped to `[1, n/10]`. Discrete chaotic maps decorrelate at lag
/// 1; flows need a few tens of samples.
pub fn suggest_lag(series: &EventSeries) -> Result<usize> {
    let v = series.values();
    let n = v.len();
    if n < 100 {
        return Err(Error::InsufficientData(format!(
            "lag suggestion needs >= 100 samples, got {n}"
        )));
    }
    let mean = v.iter().sum::<f64>() / n as f64;
    let var: f64 = v.iter().map(|x| (x - mean) * (x - mean)).sum();
    if var == 0.0 {
        return Err(Error::ConstantSeries);
    }
    let threshold = 1.0 / std::f64::consts::E;
    let max_lag = (n / 10).max(1);
    for lag in 1..=max_lag {
        let corr: f64 = v[..n - lag]
            .iter()
            .zip(&v[lag..])
            .map(|(a, b)| (a - mean) * (b - mean))
            .sum::<f64>()
            / var;
        if corr < threshold {
            return Ok(lag);
        }
    }
    Ok(max_lag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{logistic_series, uniform_series};

    fn series(values: &[f64]) -> EventSeries {
        EventSeries::new(values.to_vec(), "test", None).unwrap()
    }

    #[test]
    fn embeds_by_definition_m3_tau1() {
        let p = delay_embed(&series(&[1.0, 2.0, 3.0, 4.0, 5.0]), EmbeddingConfig::new(3, 1).unwrap())
            .unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.point(0), &[1.0, 2.0, 3.0]);
        assert_eq!(p.point(1), &[2.0, 3.0, 4.0]);
        assert_eq!(p.point(2), &[3.0, 4.0, 5.0]);
    }

    #[test]
    fn embeds_by_definition_m2_tau2() {
        let p = delay_embed(
            &series(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]),
            EmbeddingConfig::new(2, 2).unwrap(),
        )
        .unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p.point(0), &[1.0, 3.0]);
        assert_eq!(p.point(1), &[2.0, 4.0]);
        assert_eq!(p.point(2), &[3.0, 5.0]);
        assert_eq!(p.point(3), &[4.0, 6.0]);
    }

    #[test]
    fn rejects_series_too_short_for_config() {
        let err = delay_embed(&series(&[1.0, 2.0, 3.0]), EmbeddingConfig::new(4, 1).unwrap());
        assert!(matches!(err, Err(Error::InsufficientData(_))));
    }

    #[test]
    fn logistic_portrait_lies_on_the_parabola() {
        let s = logistic_series(0.2, 4.0, 10_000).unwrap();
        let p = delay_embed(&s, EmbeddingConfig::new(2, 1).unwrap()).unwrap();
        for pt in p.iter_points() {
            let (x, y) = (pt[0], pt[1]);
            assert!((y - 4.0 * x * (1.0 - x)).abs() <= 1e-12);
        }
    }

    #[test]
    fn maxima_from_hand_countable_peaks() {
        let m = successive_maxima(&series(&[0.0, 1.0, 0.0, 2.0, 0.0, 3.0, 0.0])).unwrap();
        assert_eq!(m.values(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn maxima_rejects_monotone_series() {
        assert!(matches!(
            successive_maxima(&series(&[1.0, 2.0, 3.0, 4.0])),
            Err(Error::NoMaxima)
        ));
    }

    #[test]
    fn maxima_plateau_takes_first_sample() {
        let m = successive_maxima(&series(&[0.0, 2.0, 2.0, 2.0, 0.0])).unwrap();
        assert_eq!(m.values(), &[2.0]);
    }

    #[test]
    fn maxima_refinement_dominates_flanks() {
        let s = series(&[0.0, 0.9, 1.0, 0.5, 0.0, 0.3, 0.8, 0.75, 0.1]);
        let m = successive_maxima(&s).unwrap();
        assert_eq!(m.len(), 2);
        assert!(m.values()[0] >= 1.0);
        assert!(m.values()[1] >= 0.8);
        assert!(m.len() <= s.len().div_ceil(2));
    }

    #[test]
    fn white_noise_decorrelates_at_lag_one() {
        let s = uniform_series(10_000, 4).unwrap();
        assert_eq!(suggest_lag(&s).unwrap(), 1);
    }

    #[test]
    fn sinusoid_lag_matches_analytic_crossing() {
        // cos autocorrelation crosses 1/e near period * acos(1/e) / 2pi ~ 7.6.
        let values: Vec<f64> = (0..10_000)
            .map(|i| (2.0 * std::f64::consts::PI * i as f64 / 40.0).sin())
            .collect();
        let lag = suggest_lag(&series(&values)).unwrap();
        assert!((6..=11).contains(&lag), "lag {lag}");
    }

    #[test]
    fn lag_needs_enough_samples() {
        let s = uniform_series(99, 1).unwrap();
        assert!(matches!(suggest_lag(&s), Err(Error::InsufficientData(_))));
    }
}
