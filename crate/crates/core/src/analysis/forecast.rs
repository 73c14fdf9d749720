//! Nearest-neighbor one-step forecasting.
//!
//! Determinism implies predictability: if the present state fixes the
//! future, phase-space neighbors of a test point must have successors close
//! to the test point's own successor. The normalized error compares the
//! k-NN predictor against the constant mean predictor; values near 1 mean
//! no skill, values near 0 mean strong determinism.

use rayon::prelude::*;

use crate::embedding::{delay_embed, EmbeddingConfig, PhasePortrait};
use crate::error::{Error, Result};
use crate::series::EventSeries;

use super::ForecastResult;

/// Minimum portrait size for a forecast.
pub const MIN_FORECAST_POINTS: usize = 500;

/// Below this many points the grid is slower than a straight scan.
const GRID_THRESHOLD: usize = 2000;

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

/// Fixed-size best-k accumulator ordered by `(distance, index)`.
/// The index tie-break keeps grid and exhaustive search bit-identical.
struct BestK {
    k: usize,
    entries: Vec<(f64, usize)>,
}

impl BestK {
    fn new(k: usize) -> Self {
        BestK {
            k,
            entries: Vec::with_capacity(k + 1),
        }
    }

    #[inline]
    fn offer(&mut self, dist: f64, index: usize) {
        if self.entries.len() == self.k {
            let worst = self.entries[self.k - 1];
            if (dist, index) >= (worst.0, worst.1) {
                return;
            }
        }
        let pos = self
            .entries
            .partition_point(|&(d, i)| (d, i) < (dist, index));
        self.entries.insert(pos, (dist, index));
        self.entries.truncate(self.k);
    }

    fn full(&self) -> bool {
        self.entries.len() == self.k
    }

    fn worst_dist(&self) -> f64 {
        self.entries.last().map(|&(d, _)| d).unwrap_or(f64::INFINITY)
    }
}

/// Uniform bucket grid over a portrait for neighbor queries.
///
/// Cubic cells of side `cell`; a query expands Chebyshev shells outward
/// until the k-th best distance proves no farther shell can improve it.
pub(crate) struct UniformGrid<'a> {
    portrait: &'a PhasePortrait,
    mins: Vec<f64>,
    dims: Vec<usize>,
    strides: Vec<usize>,
    cell: f64,
    buckets: Vec<Vec<u32>>,
    point_cells: Vec<Vec<isize>>,
}

impl<'a> UniformGrid<'a> {
    pub(crate) fn build(portrait: &'a PhasePortrait) -> Self {
        let m = portrait.dimension();
        let n = portrait.len();
        let bounds = portrait.bounding_box();
        let mins: Vec<f64> = bounds.iter().map(|b| b.0).collect();
        let max_extent = bounds
            .iter()
            .map(|(lo, hi)| hi - lo)
            .fold(0.0f64, f64::max)
            .max(f64::MIN_POSITIVE);
        // Aim for a few points per cell along the widest axis, capped so the
        // bucket table stays small even at high dimension.
        let target = ((n as f64 / 2.0).powf(1.0 / m as f64).floor() as usize).clamp(1, 64);
        let cell = max_extent / target as f64;
        let dims: Vec<usize> = bounds
            .iter()
            .map(|(lo, hi)| (((hi - lo) / cell).ceil() as usize).max(1))
            .collect();
        let mut strides = vec![1usize; m];
        for c in (0..m.saturating_sub(1)).rev() {
            strides[c] = strides[c + 1] * dims[c + 1];
        }
        let total: usize = dims.iter().product();
        let mut buckets = vec![Vec::new(); total];
        let mut point_cells = Vec::with_capacity(n);
        for i in 0..n {
            let p = portrait.point(i);
            let mut cell_coords = Vec::with_capacity(m);
            let mut linear = 0usize;
            for c in 0..m {
                let idx = (((p[c] - mins[c]) / cell).floor() as isize)
                    .clamp(0, dims[c] as isize - 1);
                cell_coords.push(idx);
                linear += idx as usize * strides[c];
            }
            buckets[linear].push(i as u32);
            point_cells.push(cell_coords);
        }
        UniformGrid {
            portrait,
            mins,
            dims,
            strides,
            cell,
            buckets,
            point_cells,
        }
    }

    #[inline]
    fn linear_index(&self, coords: &[isize]) -> usize {
        coords
            .iter()
            .zip(&self.strides)
            .map(|(&c, &s)| c as usize * s)
            .sum()
    }

    fn scan_bucket(
        &self,
        coords: &[isize],
        query: &[f64],
        query_index: usize,
        theiler: usize,
        best: &mut BestK,
    ) {
        let bucket = &self.buckets[self.linear_index(coords)];
        for &cand in bucket {
            let i = cand as usize;
            if i + theiler < query_index {
                let d = max_norm(query, self.portrait.point(i));
                best.offer(d, i);
            }
        }
    }

    /// Each cell of the shell at Chebyshev distance `level` is visited
    /// exactly once: it is attributed to the first axis pinned at +-level,
    /// earlier axes stay strictly inside, later axes range freely.
    fn visit_shell(
        &self,
        center: &[isize],
        level: isize,
        query: &[f64],
        query_index: usize,
        theiler: usize,
        best: &mut BestK,
    ) {
        let m = center.len();
        let mut coords = vec![0isize; m];
        for pivot in 0..m {
            for sign in [-1isize, 1] {
                let pinned = center[pivot] + sign * level;
                if pinned < 0 || pinned >= self.dims[pivot] as isize {
                    continue;
                }
                coords[pivot] = pinned;
                // Odometer over the remaining axes.
                let free: Vec<usize> = (0..m).filter(|&a| a != pivot).collect();
                let ranges: Vec<(isize, isize)> = free
                    .iter()
                    .map(|&a| {
                        let half = if a < pivot { level - 1 } else { level };
                        let lo = (center[a] - half).max(0);
                        let hi = (center[a] + half).min(self.dims[a] as isize - 1);
                        (lo, hi)
                    })
                    .collect();
                if ranges.iter().any(|(lo, hi)| lo > hi) {
                    continue;
                }
                let mut cursor: Vec<isize> = ranges.iter().map(|r| r.0).collect();
                'odometer: loop {
                    for (slot, &axis) in free.iter().enumerate() {
                        coords[axis] = cursor[slot];
                    }
                    self.scan_bucket(&coords, query, query_index, theiler, best);
                    for slot in (0..free.len()).rev() {
                        if cursor[slot] < ranges[slot].1 {
                            cursor[slot] += 1;
                            break;
                        }
                        if slot == 0 {
                            break 'odometer;
                        }
                        cursor[slot] = ranges[slot].0;
                    }
                    if free.is_empty() {
                        break;
                    }
                }
            }
        }
    }

    /// k nearest earlier points (Theiler-excluded) of point `query_index`.
    fn knn_earlier(&self, query_index: usize, k: usize, theiler: usize) -> Vec<(f64, usize)> {
        let query = self.portrait.point(query_index);
        let center = &self.point_cells[query_index];
        let mut best = BestK::new(k);
        self.scan_bucket(center, query, query_index, theiler, &mut best);

        let max_level = center
            .iter()
            .zip(&self.dims)
            .map(|(&c, &d)| c.max(d as isize - 1 - c))
            .max()
            .unwrap_or(0);
        let mut level = 1isize;
        while level <= max_level {
            // Points beyond this shell are at least (level - 1) * cell away.
            if best.full() && best.worst_dist() < (level - 1) as f64 * self.cell {
                break;
            }
            self.visit_shell(center, level, query, query_index, theiler, &mut best);
            level += 1;
        }
        best.entries
    }
}

fn knn_exhaustive(
    portrait: &PhasePortrait,
    query_index: usize,
    k: usize,
    theiler: usize,
) -> Vec<(f64, usize)> {
    let query = portrait.point(query_index);
    let mut best = BestK::new(k);
    for i in 0..query_index.saturating_sub(theiler) {
        best.offer(max_norm(query, portrait.point(i)), i);
    }
    best.entries
}

/// One-step k-NN forecast skill of a scalar series under delay embedding.
///
/// The last `test_fraction` of predictable points are held out; each is
/// predicted as the mean successor of its k nearest earlier neighbors
/// (max-norm, Theiler exclusion). The error is normalized by the mean
/// predictor trained on everything before the test block.
pub fn knn_forecast_error(
    series: &EventSeries,
    config: EmbeddingConfig,
    k: usize,
    test_fraction: f64,
    theiler: usize,
) -> Result<ForecastResult> {
    if k < 1 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    if !(test_fraction > 0.0 && test_fraction <= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "test_fraction must lie in (0, 0.5], got {test_fraction}"
        )));
    }
    let portrait = delay_embed(series, config)?;
    let n_points = portrait.len();
    if n_points < MIN_FORECAST_POINTS {
        return Err(Error::InsufficientData(format!(
            "forecast needs >= {MIN_FORECAST_POINTS} embedded points, got {n_points}"
        )));
    }
    // Points with a recorded successor sample.
    let predictable = n_points - 1;
    let test_count = ((predictable as f64 * test_fraction).floor() as usize).max(1);
    let split = predictable - test_count;
    if split <= theiler + k {
        return Err(Error::InsufficientData(format!(
            "not enough training points before the test block (split {split}, theiler {theiler}, k {k})"
        )));
    }

    let span = config.span();
    let values = series.values();
    let successor = |i: usize| values[i + span + 1];

    let train_mean = (0..split).map(successor).sum::<f64>() / split as f64;

    let grid = if n_points >= GRID_THRESHOLD {
        Some(UniformGrid::build(&portrait))
    } else {
        None
    };

    // Per-test-point squared errors, collected in index order so the final
    // sums do not depend on the worker count.
    let errors: Vec<(f64, f64)> = (split..predictable)
        .into_par_iter()
        .map(|j| {
            let neighbors = match &grid {
                Some(g) => g.knn_earlier(j, k, theiler),
                None => knn_exhaustive(&portrait, j, k, theiler),
            };
            let prediction = neighbors.iter().map(|&(_, i)| successor(i)).sum::<f64>()
                / neighbors.len() as f64;
            let truth = successor(j);
            let model_err = prediction - truth;
            let base_err = train_mean - truth;
            (model_err * model_err, base_err * base_err)
        })
        .collect();

    let model_sum: f64 = errors.iter().map(|e| e.0).sum();
    let base_sum: f64 = errors.iter().map(|e| e.1).sum();
    let normalized_error = if base_sum == 0.0 {
        if model_sum == 0.0 {
            0.0
        } else {
            return Err(Error::InvalidParameter(
                "degenerate test block: constant targets with nonzero model error".into(),
            ));
        }
    } else {
        (model_sum / base_sum).sqrt()
    };

    Ok(ForecastResult {
        horizon: 1,
        normalized_error,
        neighbor_count: k,
        test_points: test_count,
    })
}
