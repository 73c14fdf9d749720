//! Correlation integral and dimension fit.
//!
//! `C(r)` is the fraction of point pairs closer than `r` in max-norm,
//! with temporally adjacent pairs excluded by a Theiler window. Its
//! log-log slope over the scaling region estimates the correlation
//! dimension: non-integer values flag strange-attractor structure,
//! slopes tracking the embedding dimension flag space-filling noise.

use rayon::prelude::*;

use crate::embedding::PhasePortrait;
use crate::error::{Error, Result};
use crate::rng::SubStream;

use super::CorrelationCurve;

/// Minimum portrait size for a meaningful estimate.
pub const MIN_PORTRAIT_POINTS: usize = 1000;

/// Shortest admissible scaling window, in radii.
pub const MIN_SCALING_WINDOW: usize = 4;

/// Minimum radii inside the usable `C` band before a fit is attempted.
pub const MIN_CANDIDATE_RADII: usize = 8;

/// Fit quality floor for an automatic scaling region.
pub const MIN_FIT_R_SQUARED: f64 = 0.98;

/// Usable band of `C` values for dimension fitting: below, counts are too
/// sparse; above, the curve bends toward saturation.
pub const FIT_C_LOW: f64 = 1e-4;
pub const FIT_C_HIGH: f64 = 0.5;

#[inline]
fn max_norm(a: &[f64], b: &[f64]) -> f64 {
    let mut d = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        let diff = (x - y).abs();
        if diff > d {
            d = diff;
        }
    }
    d
}

/// Pairs `(i, j)` with `i < j` and `j - i > theiler`.
fn admissible_pairs(points: usize, theiler: usize) -> u64 {
    if points == 0 || points - 1 <= theiler {
        return 0;
    }
    let span = (points - 1 - theiler) as u64;
    span * (span + 1) / 2
}

/// Estimate `C(r)` over a radius grid.
///
/// When the admissible pair count fits inside `pair_budget` every pair is
/// enumerated; otherwise `pair_budget` pairs are sampled uniformly from a
/// seeded stream. Counting uses integer histograms, so parallel execution
/// reduces deterministically regardless of worker count.
pub fn correlation_integral(
    portrait: &PhasePortrait,
    radii: &[f64],
    theiler: usize,
    pair_budget: usize,
    seed: u64,
) -> Result<CorrelationCurve> {
    let n = portrait.len();
    if n < MIN_PORTRAIT_POINTS {
        return Err(Error::InsufficientData(format!(
            "correlation integral needs >= {MIN_PORTRAIT_POINTS} points, got {n}"
        )));
    }
    if radii.is_empty() {
        return Err(Error::InvalidParameter("empty radius grid".into()));
    }
    for w in radii.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::InvalidParameter(
                "radii must be strictly increasing".into(),
            ));
        }
    }
    if !(radii[0] > 0.0) || !radii.iter().all(|r| r.is_finite()) {
        return Err(Error::InvalidParameter("radii must be positive and finite".into()));
    }
    if pair_budget == 0 {
        return Err(Error::InvalidParameter("pair_budget must be > 0".into()));
    }

    let total_pairs = admissible_pairs(n, theiler);
    if total_pairs == 0 {
        return Err(Error::InsufficientData(format!(
            "Theiler window {theiler} excludes every pair of {n} points"
        )));
    }
    let exact = total_pairs <= pair_budget as u64;

    // Each pair lands in the histogram bin of the first radius >= distance;
    // a prefix sum then yields cumulative counts per radius.
    let bin_of = |d: f64| radii.partition_point(|&r| r < d);
    let nbins = radii.len();

    let histogram: Vec<u64> = if exact {
        (0..n)
            .into_par_iter()
            .fold(
                || vec![0u64; nbins],
                |mut hist, i| {
                    let pi = portrait.point(i);
                    for j in (i + theiler + 1)..n {
                        let idx = bin_of(max_norm(pi, portrait.point(j)));
                        if idx < nbins {
                            hist[idx] += 1;
                        }
                    }
                    hist
                },
            )
            .reduce(
                || vec![0u64; nbins],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    a
                },
            )
    } else {
        (0..pair_budget)
            .into_par_iter()
            .fold(
                || vec![0u64; nbins],
                |mut hist, pair_index| {
                    // Index-addressed substream: pair k is the same no matter
                    // which worker draws it.
                    let mut stream = SubStream::new(seed, pair_index as u64);
                    let (i, j) = loop {
                        let i = stream.next_below(n as u64) as usize;
                        let j = stream.next_below(n as u64) as usize;
                        if i.abs_diff(j) > theiler {
                            break (i, j);
                        }
                    };
                    let idx = bin_of(max_norm(portrait.point(i), portrait.point(j)));
                    if idx < nbins {
                        hist[idx] += 1;
                    }
                    hist
                },
            )
            .reduce(
                || vec![0u64; nbins],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    a
                },
            )
    };

    let denominator = if exact { total_pairs } else { pair_budget as u64 };
    let mut cumulative = 0u64;
    let c_values: Vec<f64> = histogram
        .iter()
        .map(|&h| {
            cumulative += h;
            cumulative as f64 / denominator as f64
        })
        .collect();

    Ok(CorrelationCurve {
        radii: radii.to_vec(),
        c_values,
        n_pairs: denominator,
        exact,
        embedding_dim: portrait.dimension(),
        theiler,
        scaling_region: None,
        slope: None,
        slope_stderr: None,
        r_squared: None,
    })
}

struct WindowFit {
    slope: f64,
    stderr: f64,
    r_squared: f64,
}

fn fit_window(log_r: &[f64], log_c: &[f64]) -> WindowFit {
    let n = log_r.len() as f64;
    let mean_x = log_r.iter().sum::<f64>() / n;
    let mean_y = log_c.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in log_r.iter().zip(log_c) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    let slope = sxy / sxx;
    let sse = (syy - slope * sxy).max(0.0);
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 0.0 };
    let dof = (log_r.len().saturating_sub(2)).max(1) as f64;
    let stderr = (sse / dof / sxx).sqrt();
    WindowFit {
        slope,
        stderr,
        r_squared,
    }
}

/// Radii whose `C` lies inside the usable fitting band. Monotonicity of
/// `C(r)` makes this a contiguous index range.
fn candidate_range(curve: &CorrelationCurve) -> (usize, usize) {
    let lo = curve.c_values.partition_point(|&c| c <= FIT_C_LOW);
    let hi = curve.c_values.partition_point(|&c| c < FIT_C_HIGH);
    (lo, hi)
}

/// Pick the contiguous window of at least [`MIN_SCALING_WINDOW`] radii that
/// maximizes fit quality (ties go to the longest window) and populate the
/// slope fields.
pub fn fit_dimension(curve: &CorrelationCurve) -> Result<CorrelationCurve> {
    let (lo, hi) = candidate_range(curve);
    let count = hi.saturating_sub(lo);
    if count < MIN_CANDIDATE_RADII {
        return Err(Error::InsufficientData(format!(
            "dimension fit needs >= {MIN_CANDIDATE_RADII} radii with C in ({FIT_C_LOW:e}, {FIT_C_HIGH}), got {count}"
        )));
    }

    let log_r: Vec<f64> = curve.radii[lo..hi].iter().map(|r| r.ln()).collect();
    let log_c: Vec<f64> = curve.c_values[lo..hi].iter().map(|c| c.ln()).collect();

    let mut best: Option<(WindowFit, usize, usize)> = None;
    for start in 0..count {
        for end in (start + MIN_SCALING_WINDOW)..=count {
            let fit = fit_window(&log_r[start..end], &log_c[start..end]);
            let better = match &best {
                None => true,
                Some((b, s, e)) => {
                    fit.r_squared > b.r_squared
                        || (fit.r_squared == b.r_squared && (end - start) > (e - s))
                }
            };
            if better {
                best = Some((fit, start, end));
            }
        }
    }

    let (fit, start, end) = best.expect("candidate count >= window size");
    if fit.r_squared < MIN_FIT_R_SQUARED {
        return Err(Error::NoScalingRegion {
            min_window: MIN_SCALING_WINDOW,
            threshold: MIN_FIT_R_SQUARED,
        });
    }

    let mut out = curve.clone();
    out.scaling_region = Some((lo + start, lo + end - 1));
    out.slope = Some(fit.slope);
    out.slope_stderr = Some(fit.stderr);
    out.r_squared = Some(fit.r_squared);
    Ok(out)
}

/// Fit over an analyst-chosen inclusive radius window, bypassing automatic
/// selection and the R^2 floor.
pub fn fit_dimension_with_window(
    curve: &CorrelationCurve,
    window: (usize, usize),
) -> Result<CorrelationCurve> {
    let (a, b) = window;
    if b >= curve.radii.len() || a > b {
        return Err(Error::InvalidParameter(format!(
            "scaling window {a}..={b} out of range for {} radii",
            curve.radii.len()
        )));
    }
    if b - a + 1 < MIN_SCALING_WINDOW {
        return Err(Error::InvalidParameter(format!(
            "scaling window must cover >= {MIN_SCALING_WINDOW} radii"
        )));
    }
    if curve.c_values[a..=b].iter().any(|&c| c <= 0.0) {
        return Err(Error::InvalidParameter(
            "scaling window contains radii with zero pair count".into(),
        ));
    }
    let log_r: Vec<f64> = curve.radii[a..=b].iter().map(|r| r.ln()).collect();
    let log_c: Vec<f64> = curve.c_values[a..=b].iter().map(|c| c.ln()).collect();
    let fit = fit_window(&log_r, &log_c);
    let mut out = curve.clone();
    out.scaling_region = Some((a, b));
    out.slope = Some(fit.slope);
    out.slope_stderr = Some(fit.stderr);
    out.r_squared = Some(fit.r_squared);
    Ok(out)
}

/// 24 log-spaced radii spanning `[min_fraction, 1]` of `diameter`.
pub fn radius_grid(diameter: f64, count: usize, min_fraction: f64) -> Result<Vec<f64>> {
    if !(diameter > 0.0 && diameter.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "diameter must be positive, got {diameter}"
        )));
    }
    if count < 2 || !(min_fraction > 0.0 && min_fraction < 1.0) {
        return Err(Error::InvalidParameter(
            "radius grid needs count >= 2 and min_fraction in (0, 1)".into(),
        ));
    }
    let log_min = (diameter * min_fraction).ln();
    let log_max = diameter.ln();
    Ok((0..count)
        .map(|i| (log_min + (log_max - log_min) * i as f64 / (count - 1) as f64).exp())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{delay_embed, EmbeddingConfig};
    use crate::generators::uniform_series;
    use crate::rng::seeded_rng;
    use rand::Rng;

    fn uniform_square(n: usize, seed: u64) -> PhasePortrait {
        let mut rng = seeded_rng(seed);
        let pts: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.random(), rng.random()]).collect();
        PhasePortrait::from_points(pts, "uniform-square").unwrap()
    }

    #[test]
    fn coincident_points_are_all_within_any_radius() {
        let pts = vec![vec![0.25, 0.75]; 1000];
        let p = PhasePortrait::from_points(pts, "coincident").unwrap();
        let curve = correlation_integral(&p, &[0.5], 0, usize::MAX, 0).unwrap();
        assert_eq!(curve.c_values, vec![1.0]);
        assert!(curve.exact);
    }

    #[test]
    fn small_portraits_are_rejected() {
        let pts = vec![vec![0.0, 0.0], vec![0.0, 0.0]];
        let p = PhasePortrait::from_points(pts, "two").unwrap();
        assert!(matches!(
            correlation_integral(&p, &[0.5], 0, usize::MAX, 0),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn uniform_square_matches_analytic_expectation() {
        // P(max-norm < 0.1) = (2*0.1 - 0.1^2)^2 = 0.0361 for iid uniform.
        let p = uniform_square(10_000, 11);
        let curve = correlation_integral(&p, &[0.1], 0, usize::MAX, 0).unwrap();
        assert!(curve.exact);
        assert!((curve.c_values[0] - 0.0361).abs() < 0.002, "C = {}", curve.c_values[0]);
    }

    #[test]
    fn sampled_mode_tracks_exact_mode() {
        let p = uniform_square(4000, 3);
        let radii = radius_grid(1.0, 24, 1e-3).unwrap();
        let exact = correlation_integral(&p, &radii, 0, usize::MAX, 0).unwrap();
        let sampled = correlation_integral(&p, &radii, 0, 400_000, 1).unwrap();
        assert!(exact.exact);
        assert!(!sampled.exact);
        for (a, b) in exact.c_values.iter().zip(&sampled.c_values) {
            assert!((a - b).abs() < 0.01, "{a} vs {b}");
        }
    }

    #[test]
    fn sampled_mode_spread_across_seeds_is_small() {
        let p = uniform_square(4000, 5);
        // Radius near C ~ 0.05: (2r - r^2)^2 = 0.05 => r ~ 0.119.
        let estimates: Vec<f64> = (0..20)
            .map(|s| {
                correlation_integral(&p, &[0.119], 0, 200_000, s)
                    .unwrap()
                    .c_values[0]
            })
            .collect();
        let mean = estimates.iter().sum::<f64>() / 20.0;
        let sd = (estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / 19.0).sqrt();
        assert!(sd < 0.01, "sd = {sd}");
        assert!((mean - 0.05).abs() < 0.01, "mean = {mean}");
    }

    #[test]
    fn c_is_monotone_in_r() {
        let s = uniform_series(3000, 17).unwrap();
        let p = delay_embed(&s, EmbeddingConfig::new(3, 1).unwrap()).unwrap();
        let radii = radius_grid(1.0, 24, 1e-3).unwrap();
        let curve = correlation_integral(&p, &radii, 3, 500_000, 9).unwrap();
        for w in curve.c_values.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn theiler_window_removes_adjacent_pairs() {
        // A slow ramp: only temporally adjacent points are close in space.
        let values: Vec<f64> = (0..2000).map(|i| i as f64 / 2000.0).collect();
        let s = crate::series::EventSeries::new(values, "ramp", None).unwrap();
        let p = delay_embed(&s, EmbeddingConfig::new(2, 1).unwrap()).unwrap();
        let with_w = correlation_integral(&p, &[0.001], 10, usize::MAX, 0).unwrap();
        let without_w = correlation_integral(&p, &[0.001], 0, usize::MAX, 0).unwrap();
        assert_eq!(with_w.c_values[0], 0.0);
        assert!(without_w.c_values[0] > 0.0);
    }

    #[test]
    fn line_segment_in_3d_has_dimension_one() {
        let mut rng = seeded_rng(8);
        let pts: Vec<Vec<f64>> = (0..10_000)
            .map(|_| {
                let t: f64 = rng.random();
                vec![t, 0.3 + 0.5 * t, 0.9 - 0.2 * t]
            })
            .collect();
        let p = PhasePortrait::from_points(pts, "segment").unwrap();
        let radii = radius_grid(1.0, 24, 1e-3).unwrap();
        let curve = correlation_integral(&p, &radii, 0, 2_000_000, 2).unwrap();
        let fitted = fit_dimension(&curve).unwrap();
        let slope = fitted.slope.unwrap();
        assert!((0.9..=1.1).contains(&slope), "slope {slope}");
        assert!(fitted.r_squared.unwrap() >= MIN_FIT_R_SQUARED);
        let (a, b) = fitted.scaling_region.unwrap();
        assert!(b - a + 1 >= MIN_SCALING_WINDOW);
    }

    #[test]
    fn iid_scalar_embedded_at_m3_saturates() {
        let s = uniform_series(10_000, 21).unwrap();
        let p = delay_embed(&s, EmbeddingConfig::new(3, 1).unwrap()).unwrap();
        let radii = radius_grid(p.diameter(), 24, 1e-3).unwrap();
        let curve = correlation_integral(&p, &radii, 3, 10_000_000, 4).unwrap();
        let fitted = fit_dimension(&curve).unwrap();
        assert!(fitted.slope.unwrap() >= 2.6, "slope {}", fitted.slope.unwrap());
    }

    #[test]
    fn manual_window_override() {
        let p = uniform_square(2000, 2);
        let radii = radius_grid(1.0, 24, 1e-3).unwrap();
        let curve = correlation_integral(&p, &radii, 0, 500_000, 7).unwrap();
        let lo = curve.c_values.partition_point(|&c| c <= 0.0);
        let fitted = fit_dimension_with_window(&curve, (lo + 2, lo + 8)).unwrap();
        assert_eq!(fitted.scaling_region, Some((lo + 2, lo + 8)));
        assert!(fitted.slope.is_some());
        assert!(fit_dimension_with_window(&curve, (0, 99)).is_err());
        assert!(fit_dimension_with_window(&curve, (5, 6)).is_err());
    }
}
