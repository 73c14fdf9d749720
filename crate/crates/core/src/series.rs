//! The raw experimental record: an ordered scalar event series.

use crate::error::{Error, Result};

/// Provenance carried alongside a series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesMetadata {
    /// Where the values came from (generator expression or file name).
    pub source_label: String,
    /// Seed used to generate the series, if it was generated.
    pub seed: Option<u64>,
    /// Number of samples; always equals `values.len()`.
    pub length: usize,
    /// Optional per-sample timestamps from two-column input files.
    pub timestamps: Option<Vec<f64>>,
}

/// Ordered scalar observations with metadata.
///
/// Invariants (enforced at construction): at least one sample, every sample
/// finite, `metadata.length` equal to the sample count.
#[derive(Debug, Clone, PartialEq)]
pub struct EventSeries {
    values: Vec<f64>,
    metadata: SeriesMetadata,
}

impl EventSeries {
    /// Build a series, validating the invariants.
    pub fn new(values: Vec<f64>, source_label: impl Into<String>, seed: Option<u64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InsufficientData("a series needs >= 1 sample".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite value {} at index {i}",
                values[i]
            )));
        }
        let length = values.len();
        Ok(EventSeries {
            values,
            metadata: SeriesMetadata {
                source_label: source_label.into(),
                seed,
                length,
                timestamps: None,
            },
        })
    }

    /// Attach timestamps (from two-column ingestion).
    pub fn with_timestamps(mut self, timestamps: Vec<f64>) -> Result<Self> {
        if timestamps.len() != self.values.len() {
            return Err(Error::InvalidParameter(format!(
                "{} timestamps for {} samples",
                timestamps.len(),
                self.values.len()
            )));
        }
        self.metadata.timestamps = Some(timestamps);
        Ok(self)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: length >= 1
    }

    pub fn metadata(&self) -> &SeriesMetadata {
        &self.metadata
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Min-max rescale to `[0, 1]`, snapped to a `2^-30` grid.
    ///
    /// The snap absorbs the last-ulp rounding differences between a series
    /// and any positively rescaled copy of it (`a*s + b`, `a > 0`), so the
    /// whole analysis pipeline produces byte-identical reports for both.
    /// `2^-30 ~ 1e-9` is far below every radius and tolerance used
    /// downstream.
    pub fn normalized(&self) -> Result<EventSeries> {
        let lo = self.min();
        let hi = self.max();
        if lo == hi {
            return Err(Error::ConstantSeries);
        }
        let span = hi - lo;
        const QUANTUM: f64 = (1u64 << 30) as f64;
        let values: Vec<f64> = self
            .values
            .iter()
            .map(|v| (((v - lo) / span) * QUANTUM).round() / QUANTUM)
            .collect();
        let mut out = EventSeries::new(values, self.metadata.source_label.clone(), self.metadata.seed)?;
        out.metadata.timestamps = self.metadata.timestamps.clone();
        Ok(out)
    }
}
