//! Canonical analysis report.
//!
//! The emitted document is a pure function of (input series, config):
//! fixed section order, keys sorted inside each section, floats at 12
//! significant digits. Wall-clock timings stay in the in-memory report for
//! display but are never written into the canonical document, which must be
//! byte-identical across runs and worker counts.

use sha2::{Digest, Sha256};

use crate::analysis::{
    Classification, CorrelationCurve, ForecastResult, SurrogateResult, Verdict,
};
use crate::pipeline::{AnalysisConfig, LagChoice};
use crate::rng::RNG_NAME;
use crate::series::EventSeries;

/// Normalization scheme identifier recorded in reports.
pub const NORMALIZATION_ID: &str = "minmax-q30";

/// SHA-256 over the little-endian bit patterns of the series values.
pub fn series_digest(series: &EventSeries) -> String {
    let mut hasher = Sha256::new();
    for v in series.values() {
        hasher.update(v.to_bits().to_le_bytes());
    }
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Everything an analysis run produced, plus the configuration needed to
/// reproduce it bit for bit.
#[derive(Debug, Clone)]
pub struct AnalysisReport {
    /// Digest of the normalized series (affine-equivalent inputs share it).
    pub input_digest: String,
    pub input_length: usize,
    pub config: AnalysisConfig,
    /// Lag actually used (resolved when the config asked for auto).
    pub resolved_lag: usize,
    /// Theiler window actually used.
    pub resolved_theiler: usize,
    pub verdict: Verdict,
    /// One fitted curve per probed embedding dimension, ascending.
    pub curves: Vec<CorrelationCurve>,
    pub forecast: ForecastResult,
    pub surrogate: SurrogateResult,
    /// Per-stage wall clock, seconds. Display only; never serialized.
    pub timings: Vec<(String, f64)>,
}

/// 12 significant digits, scientific: stable across platforms and runs.
fn fmt_float(v: f64) -> String {
    format!("{v:.11e}")
}

fn fmt_float_list(vs: &[f64]) -> String {
    vs.iter().map(|v| fmt_float(*v)).collect::<Vec<_>>().join(",")
}

struct Section {
    name: String,
    entries: Vec<(String, String)>,
}

impl Section {
    fn new(name: impl Into<String>) -> Self {
        Section {
            name: name.into(),
            entries: Vec::new(),
        }
    }

    fn put(&mut self, key: &str, value: impl Into<String>) {
        self.entries.push((key.to_string(), value.into()));
    }

    fn emit(mut self, out: &mut String) {
        self.entries.sort_by(|a, b| a.0.cmp(&b.0));
        out.push_str(&self.name);
        out.push_str(":\n");
        for (k, v) in self.entries {
            out.push_str(&format!("  {k}: {v}\n"));
        }
    }
}

fn interpretation(classification: Classification) -> &'static str {
    match classification {
        Classification::DeterministicStructure => "locality violated, hidden variables favored",
        Classification::RandomConsistent => {
            "objective reality violated, orthodox randomness favored"
        }
        Classification::Inconclusive => "no decision at the configured sensitivity",
    }
}

/// Render the canonical report document.
pub fn emit_report(report: &AnalysisReport) -> String {
    let mut out = String::from("chaoscope-report v1\n");

    let mut config = Section::new("config");
    let c = &report.config;
    config.put("alpha", fmt_float(c.alpha));
    config.put("dimension", c.dimension.to_string());
    config.put(
        "lag_mode",
        match c.lag {
            LagChoice::Auto => "auto",
            LagChoice::Fixed(_) => "fixed",
        },
    );
    config.put("lag", report.resolved_lag.to_string());
    config.put("neighbors", c.neighbors.to_string());
    config.put("pair_budget", c.pair_budget.to_string());
    config.put(
        "probe_dims",
        c.probe_dims
            .iter()
            .map(|m| m.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    config.put("radii_count", c.radii_count.to_string());
    config.put("radii_min_fraction", fmt_float(c.radii_min_fraction));
    config.put("rng", RNG_NAME);
    config.put(
        "scaling_override",
        match c.scaling_override {
            Some((a, b)) => format!("{a}..{b}"),
            None => "none".to_string(),
        },
    );
    config.put("seed", c.seed.to_string());
    config.put("surrogates", c.surrogates.to_string());
    config.put("test_fraction", fmt_float(c.test_fraction));
    config.put("theiler", report.resolved_theiler.to_string());
    config.emit(&mut out);

    let mut input = Section::new("input");
    input.put("digest_sha256", report.input_digest.clone());
    input.put("length", report.input_length.to_string());
    input.put("normalization", NORMALIZATION_ID);
    input.emit(&mut out);

    let mut verdict = Section::new("verdict");
    let v = &report.verdict;
    verdict.put("classification", v.classification.to_string());
    verdict.put(
        "dimension_estimate",
        v.dimension_estimate.map_or("none".to_string(), fmt_float),
    );
    verdict.put("dimension_saturation", v.dimension_saturation.to_string());
    verdict.put("evidence", v.evidence_summary.clone());
    verdict.put("forecast_p", fmt_float(v.forecast_p));
    verdict.put("interpretation", interpretation(v.classification));
    verdict.emit(&mut out);

    let mut forecast = Section::new("forecast");
    let f = &report.forecast;
    forecast.put("horizon", f.horizon.to_string());
    forecast.put("neighbors", f.neighbor_count.to_string());
    forecast.put("normalized_error", fmt_float(f.normalized_error));
    forecast.put("test_points", f.test_points.to_string());
    forecast.emit(&mut out);

    let mut surrogate = Section::new("surrogate");
    let s = &report.surrogate;
    surrogate.put("count", s.surrogate_values.len().to_string());
    surrogate.put("observed", fmt_float(s.observed));
    surrogate.put("p_value", fmt_float(s.p_value));
    surrogate.put("statistic", s.statistic_name.clone());
    surrogate.put("values", fmt_float_list(&s.surrogate_values));
    surrogate.emit(&mut out);

    for curve in &report.curves {
        let mut sec = Section::new(format!("curve_m{}", curve.embedding_dim));
        sec.put("c_values", fmt_float_list(&curve.c_values));
        sec.put("exact", curve.exact.to_string());
        sec.put("n_pairs", curve.n_pairs.to_string());
        sec.put(
            "r_squared",
            curve.r_squared.map_or("none".to_string(), fmt_float),
        );
        sec.put("radii", fmt_float_list(&curve.radii));
        sec.put(
            "scaling_region",
            curve
                .scaling_region
                .map_or("none".to_string(), |(a, b)| format!("{a}..{b}")),
        );
        sec.put("slope", curve.slope.map_or("none".to_string(), fmt_float));
        sec.put(
            "slope_stderr",
            curve.slope_stderr.map_or("none".to_string(), fmt_float),
        );
        sec.put("theiler", curve.theiler.to_string());
        sec.emit(&mut out);
    }

    out
}
