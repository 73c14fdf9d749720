//! Screen-hit sampling for the two-slit detector stand-in.
//!
//! The screen model is a smooth multimodal intensity on `[-1, 1]`:
//! `I(q) ~ cos^2(fringe_frequency * q) * exp(-q^2 / envelope_width^2)`,
//! normalized numerically on a fixed grid. Sampling goes through a
//! tabulated inverse CDF, so both the truly-random sampler and the
//! chaos-masked sampler share one marginal to grid resolution.

use crate::error::{Error, Result};
use crate::rng::seeded_rng;
use crate::series::EventSeries;
use rand::Rng;

/// Number of CDF table nodes. Linear interpolation between nodes keeps the
/// marginal-matching error far below the 0.02 two-sample acceptance bound.
const CDF_NODES: usize = 4096;

/// Screen geometry knobs. The screen interval is fixed at `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitScreenModel {
    /// Spatial frequency of the cos^2 fringes; 0 disables them.
    pub fringe_frequency: f64,
    /// Width of the Gaussian envelope; `f64::INFINITY` gives a flat envelope.
    pub envelope_width: f64,
}

impl Default for SlitScreenModel {
    /// Several fringes under a mid-width envelope: visibly multimodal.
    fn default() -> Self {
        SlitScreenModel {
            fringe_frequency: 12.0,
            envelope_width: 0.5,
        }
    }
}

impl SlitScreenModel {
    /// Flat (uniform) intensity on the screen.
    pub fn flat() -> Self {
        SlitScreenModel {
            fringe_frequency: 0.0,
            envelope_width: f64::INFINITY,
        }
    }

    /// Unnormalized intensity at screen position `q`.
    pub fn intensity(&self, q: f64) -> f64 {
        let fringe = (self.fringe_frequency * q).cos().powi(2);
        let envelope = if self.envelope_width.is_infinite() {
            1.0
        } else {
            (-(q * q) / (self.envelope_width * self.envelope_width)).exp()
        };
        fringe * envelope
    }

    fn validate(&self) -> Result<()> {
        if !(self.fringe_frequency >= 0.0 && self.fringe_frequency.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "fringe_frequency must be finite and >= 0, got {}",
                self.fringe_frequency
            )));
        }
        if !(self.envelope_width > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "envelope_width must be > 0, got {}",
                self.envelope_width
            )));
        }
        Ok(())
    }
}

/// Tabulated CDF of a screen model on the fixed node grid.
#[derive(Debug, Clone)]
pub struct ScreenCdf {
    positions: Vec<f64>,
    cdf: Vec<f64>,
}

impl ScreenCdf {
    /// Build the table, normalizing by the trapezoidal total intensity.
    pub fn build(model: &SlitScreenModel) -> Result<ScreenCdf> {
        model.validate()?;
        let positions: Vec<f64> = (0..CDF_NODES)
            .map(|k| -1.0 + 2.0 * k as f64 / (CDF_NODES - 1) as f64)
            .collect();
        let intensity: Vec<f64> = positions.iter().map(|&q| model.intensity(q)).collect();
        let mut cdf = vec![0.0; CDF_NODES];
        for k in 1..CDF_NODES {
            let step = positions[k] - positions[k - 1];
            cdf[k] = cdf[k - 1] + 0.5 * (intensity[k] + intensity[k - 1]) * step;
        }
        let total = cdf[CDF_NODES - 1];
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidParameter(
                "degenerate screen model: zero total intensity".into(),
            ));
        }
        for c in cdf.iter_mut() {
            *c /= total;
        }
        cdf[CDF_NODES - 1] = 1.0;
        Ok(ScreenCdf { positions, cdf })
    }

    /// Inverse CDF lookup with linear interpolation, `u` in `[0, 1]`.
    pub fn inverse(&self, u: f64) -> f64 {
        let m = self.cdf.len();
        let j = self
            .cdf
            .partition_point(|&c| c <= u)
            .saturating_sub(1)
            .min(m - 2);
        let lo = self.cdf[j];
        let hi = self.cdf[j + 1];
        let t = if hi > lo { ((u - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 0.0 };
        self.positions[j] + t * (self.positions[j + 1] - self.positions[j])
    }

    /// CDF value at screen position `q`, interpolated.
    pub fn cdf_at(&self, q: f64) -> f64 {
        if q <= self.positions[0] {
            return 0.0;
        }
        let m = self.positions.len();
        if q >= self.positions[m - 1] {
            return 1.0;
        }
        let j = self
            .positions
            .partition_point(|&p| p <= q)
            .saturating_sub(1)
            .min(m - 2);
        let t = (q - self.positions[j]) / (self.positions[j + 1] - self.positions[j]);
        self.cdf[j] + t * (self.cdf[j + 1] - self.cdf[j])
    }
}

/// I.i.d. screen hits drawn from the model's normalized intensity.
pub fn born_hits(model: &SlitScreenModel, n: usize, seed: u64) -> Result<EventSeries> {
    if n < 1 {
        return Err(Error::InsufficientData("n must be >= 1".into()));
    }
    let table = ScreenCdf::build(model)?;
    let mut rng = seeded_rng(seed);
    let values: Vec<f64> = (0..n).map(|_| table.inverse(rng.random())).collect();
    EventSeries::new(
        values,
        format!(
            "born(fringe={},envelope={})",
            model.fringe_frequency, model.envelope_width
        ),
        Some(seed),
    )
}

/// How a base value in `[0, 1]` is turned into a CDF quantile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskMapping {
    /// Treat the base value itself as the quantile. Leaves a slight marginal
    /// mismatch when the base map's invariant density is not uniform.
    Value,
    /// Map the base value's rank to an equispaced quantile; the output
    /// marginal then matches the screen distribution exactly, sample for
    /// sample.
    Rank,
}

/// Push a deterministic series in `[0, 1]` through the screen's inverse CDF.
///
/// The transform is monotone, so temporal structure survives: whenever the
/// base pairs `(b_i, b_{i+1})` lie on a curve, the output pairs do too. Only
/// the marginal changes.
pub fn chaos_masked_hits(
    base: &EventSeries,
    model: &SlitScreenModel,
    mapping: MaskMapping,
) -> Result<EventSeries> {
    if let Some(i) = base
        .values()
        .iter()
        .position(|v| !(0.0..=1.0).contains(v))
    {
        return Err(Error::InvalidParameter(format!(
            "base value {} at index {i} outside [0, 1]",
            base.values()[i]
        )));
    }
    let table = ScreenCdf::build(model)?;
    let n = base.len();
    let values: Vec<f64> = match mapping {
        MaskMapping::Value => base.values().iter().map(|&b| table.inverse(b)).collect(),
        MaskMapping::Rank => {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| {
                base.values()[a]
                    .total_cmp(&base.values()[b])
                    .then(a.cmp(&b))
            });
            let mut rank = vec![0usize; n];
            for (r, &idx) in order.iter().enumerate() {
                rank[idx] = r;
            }
            (0..n)
                .map(|i| table.inverse((rank[i] as f64 + 0.5) / n as f64))
                .collect()
        }
    };
    EventSeries::new(
        values,
        format!(
            "chaos-masked({},mapping={mapping:?})",
            base.metadata().source_label
        ),
        base.metadata().seed,
    )
}
