//! Self-contained SVG rendering for portraits, correlation curves, and raw
//! series. No plotting framework: figures are evidence files, diffed and
//! golden-tested, so byte output must be a pure function of the input.

use crate::analysis::CorrelationCurve;
use crate::embedding::PhasePortrait;
use crate::error::{Error, Result};
use crate::series::EventSeries;

/// Which portrait coordinates to draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    /// Scatter of two coordinates.
    TwoD(usize, usize),
    /// Oblique orthographic view of three coordinates
    /// (azimuth 30 degrees, elevation 20 degrees, fixed).
    ThreeD(usize, usize, usize),
}

/// Canvas parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotStyle {
    pub width: u32,
    pub height: u32,
    pub point_radius: f64,
    pub title: Option<String>,
}

impl Default for PlotStyle {
    fn default() -> Self {
        PlotStyle {
            width: 640,
            height: 480,
            point_radius: 1.2,
            title: None,
        }
    }
}

const MARGIN_LEFT: f64 = 62.0;
const MARGIN_RIGHT: f64 = 18.0;
const MARGIN_TOP: f64 = 34.0;
const MARGIN_BOTTOM: f64 = 48.0;

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

struct Frame {
    width: f64,
    height: f64,
    x_range: (f64, f64),
    y_range: (f64, f64),
}

impl Frame {
    fn new(style: &PlotStyle, x_range: (f64, f64), y_range: (f64, f64)) -> Frame {
        let pad = |(lo, hi): (f64, f64)| {
            if lo == hi {
                (lo - 0.5, hi + 0.5)
            } else {
                let pad = (hi - lo) * 0.04;
                (lo - pad, hi + pad)
            }
        };
        Frame {
            width: style.width as f64,
            height: style.height as f64,
            x_range: pad(x_range),
            y_range: pad(y_range),
        }
    }

    fn x(&self, v: f64) -> f64 {
        let (lo, hi) = self.x_range;
        MARGIN_LEFT + (v - lo) / (hi - lo) * (self.width - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        let (lo, hi) = self.y_range;
        self.height - MARGIN_BOTTOM - (v - lo) / (hi - lo) * (self.height - MARGIN_TOP - MARGIN_BOTTOM)
    }

    fn open(&self, out: &mut String, title: Option<&str>) {
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
            w = self.width,
            h = self.height
        ));
        out.push_str(&format!(
            "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
            self.width, self.height
        ));
        out.push_str(&format!(
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n",
            MARGIN_LEFT,
            MARGIN_TOP,
            self.width - MARGIN_LEFT - MARGIN_RIGHT,
            self.height - MARGIN_TOP - MARGIN_BOTTOM
        ));
        if let Some(t) = title {
            out.push_str(&format!(
                "<text x=\"{:.2}\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
                (MARGIN_LEFT + self.width - MARGIN_RIGHT) / 2.0,
                xml_escape(t)
            ));
        }
    }

    fn axes(&self, out: &mut String, x_label: &str, y_label: &str) {
        for i in 0..5 {
            let t = i as f64 / 4.0;
            let xv = self.x_range.0 + t * (self.x_range.1 - self.x_range.0);
            let yv = self.y_range.0 + t * (self.y_range.1 - self.y_range.0);
            let xp = self.x(xv);
            let yp = self.y(yv);
            let bottom = self.height - MARGIN_BOTTOM;
            out.push_str(&format!(
                "<line x1=\"{xp:.2}\" y1=\"{bottom:.2}\" x2=\"{xp:.2}\" y2=\"{:.2}\" stroke=\"black\" stroke-width=\"1\"/>\n",
                bottom + 5.0
            ));
            out.push_str(&format!(
                "<text x=\"{xp:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{}</text>\n",
                bottom + 17.0,
                fmt_tick(xv)
            ));
            out.push_str(&format!(
                "<line x1=\"{:.2}\" y1=\"{yp:.2}\" x2=\"{MARGIN_LEFT:.2}\" y2=\"{yp:.2}\" stroke=\"black\" stroke-width=\"1\"/>\n",
                MARGIN_LEFT - 5.0
            ));
            out.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{}</text>\n",
                MARGIN_LEFT - 8.0,
                yp + 3.0,
                fmt_tick(yv)
            ));
        }
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            (MARGIN_LEFT + self.width - MARGIN_RIGHT) / 2.0,
            self.height - 12.0,
            xml_escape(x_label)
        ));
        out.push_str(&format!(
            "<text x=\"14\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 14 {:.2})\">{}</text>\n",
            (MARGIN_TOP + self.height - MARGIN_BOTTOM) / 2.0,
            (MARGIN_TOP + self.height - MARGIN_BOTTOM) / 2.0,
            xml_escape(y_label)
        ));
    }

    fn footnote(&self, out: &mut String, text: &str) {
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"start\" fill=\"#444444\">{}</text>\n",
            MARGIN_LEFT,
            MARGIN_TOP - 8.0,
            xml_escape(text)
        ));
    }
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 0.01 && v.abs() < 10_000.0 {
        format!("{v:.2}")
    } else {
        format!("{v:.2e}")
    }
}

/// Project portrait points onto the plotting plane.
fn project(portrait: &PhasePortrait, projection: Projection) -> Result<Vec<(f64, f64)>> {
    let m = portrait.dimension();
    let check = |idx: usize| -> Result<()> {
        if idx >= m {
            Err(Error::BadProjection {
                index: idx,
                dimension: m,
            })
        } else {
            Ok(())
        }
    };
    match projection {
        Projection::TwoD(a, b) => {
            check(a)?;
            check(b)?;
            Ok(portrait.iter_points().map(|p| (p[a], p[b])).collect())
        }
        Projection::ThreeD(a, b, c) => {
            check(a)?;
            check(b)?;
            check(c)?;
            let azimuth = 30.0_f64.to_radians();
            let elevation = 20.0_f64.to_radians();
            let (sin_a, cos_a) = azimuth.sin_cos();
            let (sin_e, cos_e) = elevation.sin_cos();
            Ok(portrait
                .iter_points()
                .map(|p| {
                    let (x, y, z) = (p[a], p[b], p[c]);
                    let u = cos_a * x - sin_a * y;
                    let v = cos_e * z - sin_e * (sin_a * x + cos_a * y);
                    (u, v)
                })
                .collect())
        }
    }
}

/// Scatter plot of a phase portrait. Deterministic byte output.
pub fn render_portrait(
    portrait: &PhasePortrait,
    projection: Projection,
    style: &PlotStyle,
) -> Result<String> {
    let pts = project(portrait, projection)?;
    let xr = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |r, p| {
        (r.0.min(p.0), r.1.max(p.0))
    });
    let yr = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |r, p| {
        (r.0.min(p.1), r.1.max(p.1))
    });
    let frame = Frame::new(style, xr, yr);
    let lag = portrait.config().lag;
    let (x_label, y_label) = match projection {
        Projection::TwoD(a, b) => (format!("q[t+{}]", a * lag), format!("q[t+{}]", b * lag)),
        Projection::ThreeD(_, _, _) => (
            "oblique u (az 30, el 20)".to_string(),
            "oblique v (az 30, el 20)".to_string(),
        ),
    };

    let mut out = String::new();
    frame.open(&mut out, style.title.as_deref());
    frame.axes(&mut out, &x_label, &y_label);
    frame.footnote(
        &mut out,
        &format!(
            "N = {}  m = {}  lag = {}  source: {}",
            portrait.len(),
            portrait.dimension(),
            lag,
            portrait.source().source_label
        ),
    );
    for (x, y) in &pts {
        out.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{:.2}\" fill=\"#1f4e9c\" fill-opacity=\"0.55\"/>\n",
            frame.x(*x),
            frame.y(*y),
            style.point_radius
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Log-log plot of a correlation curve with its scaling region highlighted
/// and the fitted slope annotated.
pub fn render_curve(curve: &CorrelationCurve, style: &PlotStyle) -> String {
    let pts: Vec<(f64, f64)> = curve
        .radii
        .iter()
        .zip(&curve.c_values)
        .filter(|(_, &c)| c > 0.0)
        .map(|(&r, &c)| (r.log10(), c.log10()))
        .collect();
    let (xr, yr) = if pts.is_empty() {
        ((-3.0, 0.0), (-4.0, 0.0))
    } else {
        (
            pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |r, p| {
                (r.0.min(p.0), r.1.max(p.0))
            }),
            pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |r, p| {
                (r.0.min(p.1), r.1.max(p.1))
            }),
        )
    };
    let frame = Frame::new(style, xr, yr);
    let mut out = String::new();
    frame.open(&mut out, style.title.as_deref());
    frame.axes(&mut out, "log10 r", "log10 C(r)");
    frame.footnote(
        &mut out,
        &format!(
            "m = {}  pairs = {}  mode = {}",
            curve.embedding_dim,
            curve.n_pairs,
            if curve.exact { "exact" } else { "sampled" }
        ),
    );

    if let Some((a, b)) = curve.scaling_region {
        let x0 = frame.x(curve.radii[a].log10());
        let x1 = frame.x(curve.radii[b].log10());
        out.push_str(&format!(
            "<rect x=\"{:.2}\" y=\"{MARGIN_TOP:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"#f3c14b\" fill-opacity=\"0.25\"/>\n",
            x0,
            x1 - x0,
            frame.height - MARGIN_TOP - MARGIN_BOTTOM
        ));
    }

    if pts.len() >= 2 {
        let path: Vec<String> = pts
            .iter()
            .enumerate()
            .map(|(i, (x, y))| {
                format!(
                    "{}{:.2},{:.2}",
                    if i == 0 { "M" } else { "L" },
                    frame.x(*x),
                    frame.y(*y)
                )
            })
            .collect();
        out.push_str(&format!(
            "<path d=\"{}\" fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\"/>\n",
            path.join(" ")
        ));
    }
    for (x, y) in &pts {
        out.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.40\" fill=\"#1f4e9c\"/>\n",
            frame.x(*x),
            frame.y(*y)
        ));
    }

    let annotation = match (curve.slope, curve.slope_stderr) {
        (Some(s), Some(e)) => format!("slope = {s:.3} +- {e:.3}"),
        (Some(s), None) => format!("slope = {s:.3}"),
        _ => "no scaling region".to_string(),
    };
    out.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">{}</text>\n",
        frame.width - MARGIN_RIGHT - 8.0,
        MARGIN_TOP + 18.0,
        xml_escape(&annotation)
    ));
    out.push_str("</svg>\n");
    out
}

/// Index-versus-value scatter of a raw series.
pub fn render_series(series: &EventSeries, style: &PlotStyle) -> String {
    let n = series.len();
    let yr = (series.min(), series.max());
    let frame = Frame::new(style, (0.0, (n - 1).max(1) as f64), yr);
    let mut out = String::new();
    frame.open(&mut out, style.title.as_deref());
    frame.axes(&mut out, "event index i", "q_i");
    frame.footnote(
        &mut out,
        &format!("N = {}  source: {}", n, series.metadata().source_label),
    );
    for (i, &v) in series.values().iter().enumerate() {
        out.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{:.2}\" fill=\"#1f4e9c\" fill-opacity=\"0.55\"/>\n",
            frame.x(i as f64),
            frame.y(v),
            style.point_radius
        ));
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{delay_embed, EmbeddingConfig};
    use crate::generators::logistic_series;

    /// Cheap well-formedness check: every opened tag closes.
    fn assert_svg_parses(svg: &str) {
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        let opens = svg.matches("<svg").count();
        let closes = svg.matches("</svg>").count();
        assert_eq!(opens, closes);
        // Every element line is either self-closing or a text/svg pair.
        for line in svg.lines().skip(1) {
            let l = line.trim();
            if l.is_empty() || l == "</svg>" {
                continue;
            }
            assert!(
                l.ends_with("/>") || (l.starts_with("<text") && l.ends_with("</text>")),
                "unbalanced line: {l}"
            );
        }
    }

    #[test]
    fn logistic_portrait_renders_and_is_deterministic() {
        let s = logistic_series(0.2, 4.0, 2000).unwrap();
        let p = delay_embed(&s, EmbeddingConfig::new(2, 1).unwrap()).unwrap();
        let a = render_portrait(&p, Projection::TwoD(0, 1), &PlotStyle::default()).unwrap();
        let b = render_portrait(&p, Projection::TwoD(0, 1), &PlotStyle::default()).unwrap();
        assert_eq!(a, b);
        assert!(!a.is_empty());
        assert_svg_parses(&a);
    }

    #[test]
    fn three_d_projection_renders() {
        let s = logistic_series(0.2, 4.0, 2000).unwrap();
        let p = delay_embed(&s, EmbeddingConfig::new(3, 1).unwrap()).unwrap();
        let svg = render_portrait(&p, Projection::ThreeD(0, 1, 2), &PlotStyle::default()).unwrap();
        assert_svg_parses(&svg);
    }

    #[test]
    fn out_of_range_projection_is_rejected() {
        let s = logistic_series(0.2, 4.0, 500).unwrap();
        let p = delay_embed(&s, EmbeddingConfig::new(2, 1).unwrap()).unwrap();
        let err = render_portrait(&p, Projection::TwoD(0, 5), &PlotStyle::default());
        assert!(matches!(err, Err(Error::BadProjection { index: 5, dimension: 2 })));
    }

    #[test]
    fn unfitted_curve_gets_no_scaling_region_annotation() {
        let curve = CorrelationCurve {
            radii: vec![0.01, 0.1, 1.0],
            c_values: vec![0.0, 0.2, 1.0],
            n_pairs: 100,
            exact: true,
            embedding_dim: 2,
            theiler: 0,
            scaling_region: None,
            slope: None,
            slope_stderr: None,
            r_squared: None,
        };
        let svg = render_curve(&curve, &PlotStyle::default());
        assert!(svg.contains("no scaling region"));
        assert_svg_parses(&svg);
    }

    #[test]
    fn fitted_curve_annotates_slope() {
        let curve = CorrelationCurve {
            radii: vec![0.01, 0.02, 0.04, 0.08, 0.16],
            c_values: vec![0.01, 0.02, 0.04, 0.08, 0.16],
            n_pairs: 100,
            exact: false,
            embedding_dim: 2,
            theiler: 2,
            scaling_region: Some((1, 3)),
            slope: Some(1.234),
            slope_stderr: Some(0.01),
            r_squared: Some(0.999),
        };
        let svg = render_curve(&curve, &PlotStyle::default());
        assert!(svg.contains("slope = 1.234"));
        assert_svg_parses(&svg);
    }

    #[test]
    fn series_plot_renders() {
        let s = logistic_series(0.2, 4.0, 300).unwrap();
        let svg = render_series(&s, &PlotStyle::default());
        assert_svg_parses(&svg);
    }
}
