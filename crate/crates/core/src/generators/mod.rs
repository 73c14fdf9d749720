//! Synthetic event series of known provenance.
//!
//! Everything here is a ground-truth oracle for the analysis stages:
//! deterministic chaotic maps and flows, truly random samplers, a
//! chaotic series disguised behind a target marginal, and the
//! detector-imperfection model (dropout + noise).

mod lorenz;
mod slit;

pub use lorenz::{lorenz_series, LorenzParams};
pub use slit::{born_hits, chaos_masked_hits, MaskMapping, ScreenCdf, SlitScreenModel};

use crate::error::{Error, Result};
use crate::rng::seeded_rng;
use crate::series::EventSeries;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Iterated-map parameters with the canonical chaotic defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapParams {
    pub logistic_k: f64,
    pub henon_a: f64,
    pub henon_b: f64,
}

impl Default for MapParams {
    fn default() -> Self {
        MapParams {
            logistic_k: 4.0,
            henon_a: 1.4,
            henon_b: 0.3,
        }
    }
}

impl MapParams {
    fn validate(&self) -> Result<()> {
        if !(self.logistic_k > 0.0 && self.logistic_k <= 4.0) {
            return Err(Error::InvalidParameter(format!(
                "logistic_k must lie in (0, 4], got {}",
                self.logistic_k
            )));
        }
        if !self.henon_a.is_finite() || !self.henon_b.is_finite() {
            return Err(Error::InvalidParameter(
                "henon parameters must be finite".into(),
            ));
        }
        Ok(())
    }
}

/// Escape bound separating basin exit from legitimate dynamics.
pub const DIVERGENCE_BOUND: f64 = 1.0e6;

/// Iterate `x_{n+1} = k x_n (1 - x_n)` for `n` samples (including `x0`).
pub fn logistic_series(x0: f64, k: f64, n: usize) -> Result<EventSeries> {
    if !(x0 > 0.0 && x0 < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "x0 must lie in (0, 1), got {x0}"
        )));
    }
    if !(k > 0.0 && k <= 4.0) {
        return Err(Error::InvalidParameter(format!(
            "k must lie in (0, 4], got {k}"
        )));
    }
    if n < 1 {
        return Err(Error::InsufficientData("n must be >= 1".into()));
    }
    let mut values = Vec::with_capacity(n);
    let mut x = x0;
    values.push(x);
    for _ in 1..n {
        x = k * x * (1.0 - x);
        values.push(x);
    }
    EventSeries::new(values, format!("logistic(k={k},x0={x0})"), None)
}

/// Iterate the two-coordinate quadratic map
/// `x_{n+1} = y_n + 1 - a x_n^2`, `y_{n+1} = b x_n`.
///
/// Returns the aligned `(x, y)` series. Errors with [`Error::Divergence`]
/// when `|x_n|` exceeds [`DIVERGENCE_BOUND`], which signals an initial
/// condition outside the attractor's basin.
pub fn henon_series(
    x0: f64,
    y0: f64,
    params: &MapParams,
    n: usize,
) -> Result<(EventSeries, EventSeries)> {
    params.validate()?;
    if n < 1 {
        return Err(Error::InsufficientData("n must be >= 1".into()));
    }
    if !x0.is_finite() || !y0.is_finite() {
        return Err(Error::InvalidParameter("initial point must be finite".into()));
    }
    let (a, b) = (params.henon_a, params.henon_b);
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    let (mut x, mut y) = (x0, y0);
    xs.push(x);
    ys.push(y);
    for step in 1..n {
        let x_next = y + 1.0 - a * x * x;
        let y_next = b * x;
        if !x_next.is_finite() || x_next.abs() > DIVERGENCE_BOUND {
            return Err(Error::Divergence {
                step,
                magnitude: x_next.abs(),
                bound: DIVERGENCE_BOUND,
            });
        }
        x = x_next;
        y = y_next;
        xs.push(x);
        ys.push(y);
    }
    let label = format!("henon(a={a},b={b})");
    Ok((
        EventSeries::new(xs, format!("{label}/x"), None)?,
        EventSeries::new(ys, format!("{label}/y"), None)?,
    ))
}

/// I.i.d. uniform samples on `[0, 1)` — the fundamentally random null.
pub fn uniform_series(n: usize, seed: u64) -> Result<EventSeries> {
    if n < 1 {
        return Err(Error::InsufficientData("n must be >= 1".into()));
    }
    let mut rng = seeded_rng(seed);
    let values: Vec<f64> = (0..n).map(|_| rng.random()).collect();
    EventSeries::new(values, "iid-uniform", Some(seed))
}

/// Detector-imperfection model: each sample is independently deleted with
/// probability `dropout_rate`; survivors get additive zero-mean Gaussian
/// noise with standard deviation `noise_sigma`. Order is preserved.
pub fn corrupt(
    series: &EventSeries,
    dropout_rate: f64,
    noise_sigma: f64,
    seed: u64,
) -> Result<EventSeries> {
    if !(0.0..1.0).contains(&dropout_rate) {
        return Err(Error::InvalidParameter(format!(
            "dropout_rate must lie in [0, 1), got {dropout_rate}"
        )));
    }
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "noise_sigma must be finite and >= 0, got {noise_sigma}"
        )));
    }
    let mut rng = seeded_rng(seed);
    let mut values = Vec::with_capacity(series.len());
    for &v in series.values() {
        let u: f64 = rng.random();
        if u < dropout_rate {
            continue;
        }
        if noise_sigma > 0.0 {
            let z: f64 = StandardNormal.sample(&mut rng);
            values.push(v + noise_sigma * z);
        } else {
            values.push(v);
        }
    }
    if values.is_empty() {
        return Err(Error::InsufficientData(
            "dropout removed every sample".into(),
        ));
    }
    EventSeries::new(
        values,
        format!(
            "corrupt({},dropout={dropout_rate},sigma={noise_sigma})",
            series.metadata().source_label
        ),
        Some(seed),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn logistic_direct_substitution() {
        let s = logistic_series(0.2, 4.0, 4).unwrap();
        // Exactly the platform evaluation of the recurrence.
        let q1 = 4.0 * 0.2 * (1.0 - 0.2);
        let q2 = 4.0 * q1 * (1.0 - q1);
        let q3 = 4.0 * q2 * (1.0 - q2);
        assert_eq!(s.values(), &[0.2, q1, q2, q3]);
        for (got, want) in s.values().iter().zip([0.2, 0.64, 0.9216, 0.28901376]) {
            assert_abs_diff_eq!(got, &want, epsilon = 1e-12);
        }
    }

    #[test]
    fn logistic_collapses_from_half() {
        let s = logistic_series(0.5, 4.0, 3).unwrap();
        assert_eq!(s.values(), &[0.5, 1.0, 0.0]);
    }

    #[test]
    fn logistic_residuals_vanish() {
        let s = logistic_series(0.123, 4.0, 10_000).unwrap();
        let v = s.values();
        let worst = v
            .windows(2)
            .map(|w| (w[1] - 4.0 * w[0] * (1.0 - w[0])).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-12, "max residual {worst}");
        assert!(v.iter().all(|&q| (0.0..=1.0).contains(&q)));
    }

    #[test]
    fn logistic_rejects_bad_inputs() {
        assert!(logistic_series(0.0, 4.0, 5).is_err());
        assert!(logistic_series(1.0, 4.0, 5).is_err());
        assert!(logistic_series(0.2, 4.1, 5).is_err());
        assert!(logistic_series(0.2, 0.0, 5).is_err());
        assert!(logistic_series(0.2, 4.0, 0).is_err());
    }

    #[test]
    fn henon_direct_substitution() {
        let (x, y) = henon_series(0.0, 0.0, &MapParams::default(), 3).unwrap();
        assert_eq!(x.values()[0], 0.0);
        assert_eq!(x.values()[1], 1.0);
        assert_abs_diff_eq!(x.values()[2], -0.4, epsilon = 1e-12);
        assert_eq!(y.values(), &[0.0, 0.0, 0.3]);
    }

    #[test]
    fn henon_second_coordinate_is_exactly_scaled_first() {
        let p = MapParams::default();
        let (x, y) = henon_series(0.0, 0.0, &p, 5000).unwrap();
        for i in 0..x.len() - 1 {
            assert_eq!(y.values()[i + 1].to_bits(), (p.henon_b * x.values()[i]).to_bits());
        }
    }

    #[test]
    fn henon_settles_into_bounding_box() {
        let (x, y) = henon_series(0.0, 0.0, &MapParams::default(), 10_000).unwrap();
        for i in 100..x.len() {
            assert!((-1.5..=1.5).contains(&x.values()[i]), "x[{i}]={}", x.values()[i]);
            assert!((-0.45..=0.45).contains(&y.values()[i]), "y[{i}]={}", y.values()[i]);
        }
    }

    #[test]
    fn henon_diverges_outside_basin() {
        let err = henon_series(1.0e6, 0.0, &MapParams::default(), 10).unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }));
    }

    #[test]
    fn uniform_is_seed_deterministic() {
        let a = uniform_series(1000, 9).unwrap();
        let b = uniform_series(1000, 9).unwrap();
        assert_eq!(a.values(), b.values());
        let c = uniform_series(1000, 10).unwrap();
        assert_ne!(a.values(), c.values());
    }

    #[test]
    fn corrupt_identity_when_disabled() {
        let s = logistic_series(0.3, 4.0, 500).unwrap();
        let c = corrupt(&s, 0.0, 0.0, 123).unwrap();
        assert_eq!(s.values(), c.values());
    }

    #[test]
    fn corrupt_dropout_length_within_binomial_bound() {
        let s = uniform_series(10_000, 1).unwrap();
        let c = corrupt(&s, 0.1, 0.0, 3).unwrap();
        // n*p = 1000 dropped, sigma = sqrt(n p (1-p)) = 30; +-3 sigma minus a
        // little slack keeps the bound at [8700, 9300].
        assert!((8700..=9300).contains(&c.len()), "len {}", c.len());
    }

    #[test]
    fn corrupt_noise_sigma_concentrates() {
        let s = EventSeries::new(vec![0.5; 100_000], "const", None).unwrap();
        let c = corrupt(&s, 0.0, 0.01, 5).unwrap();
        let n = c.len() as f64;
        let mean = c.values().iter().sum::<f64>() / n;
        let var = c.values().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let sd = var.sqrt();
        assert!((0.009..=0.011).contains(&sd), "sd {sd}");
    }

    #[test]
    fn corrupt_rejects_full_dropout() {
        let s = uniform_series(10, 1).unwrap();
        assert!(corrupt(&s, 1.0, 0.0, 1).is_err());
    }

    #[test]
    fn corrupt_is_seed_deterministic() {
        let s = uniform_series(5000, 2).unwrap();
        let a = corrupt(&s, 0.2, 0.05, 11).unwrap();
        let b = corrupt(&s, 0.2, 0.05, 11).unwrap();
        assert_eq!(a.values(), b.values());
    }
}
