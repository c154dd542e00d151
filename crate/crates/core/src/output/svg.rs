//! Minimal standalone SVG line plots.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 50.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];
/// Plotted points per series; longer series are thinned evenly.
const MAX_POINTS: usize = 2000;

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Series {
    pub fn new(label: impl Into<String>, x: Vec<f64>, y: Vec<f64>) -> Self {
        Self {
            label: label.into(),
            x,
            y,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlotSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Phase-plane mode: equal treatment of both axes and a start marker.
    pub phase_plane: bool,
}

impl PlotSpec {
    pub fn lines(title: &str, x_label: &str, y_label: &str) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            phase_plane: false,
        }
    }

    pub fn phase(title: &str) -> Self {
        Self {
            title: title.into(),
            x_label: "phi".into(),
            y_label: "psi".into(),
            phase_plane: true,
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| {
        (l.min(v), h.max(v))
    });
    if hi - lo < 1e-12 * (1.0 + lo.abs()) {
        let pad = if lo == 0.0 { 1.0 } else { 0.05 * lo.abs() };
        (lo - pad, hi + pad)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

/// Renders the series to an SVG document.
pub fn svg_document(series: &[Series], spec: &PlotSpec) -> Result<String> {
    if series.is_empty() || series.iter().any(|s| s.x.is_empty()) {
        return Err(Error::Analysis("nothing to plot".into()));
    }
    if series.iter().any(|s| s.x.len() != s.y.len()) {
        return Err(Error::Analysis("series x and y lengths differ".into()));
    }
    let (x_lo, x_hi) = bounds(series.iter().flat_map(|s| s.x.iter().cloned()));
    let (y_lo, y_hi) = bounds(series.iter().flat_map(|s| s.y.iter().cloned()));
    let pw = WIDTH - MARGIN_L - MARGIN_R;
    let ph = HEIGHT - MARGIN_T - MARGIN_B;
    let px = |x: f64| MARGIN_L + (x - x_lo) / (x_hi - x_lo) * pw;
    let py = |y: f64| MARGIN_T + (y_hi - y) / (y_hi - y_lo) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
        MARGIN_L + pw / 2.0,
        escape(&spec.title)
    );
    // Axes box and ticks.
    let _ = writeln!(
        s,
        r#"<rect class="axes" x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let xv = x_lo + f * (x_hi - x_lo);
        let yv = y_lo + f * (y_hi - y_lo);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="10">{}</text>"#,
            px(xv),
            MARGIN_T + ph + 15.0,
            tick(xv)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-family="sans-serif" font-size="10">{}</text>"#,
            MARGIN_L - 5.0,
            py(yv) + 3.0,
            tick(yv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
        MARGIN_L + pw / 2.0,
        HEIGHT - 10.0,
        escape(&spec.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="15" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 15 {:.1})">{}</text>"#,
        MARGIN_T + ph / 2.0,
        MARGIN_T + ph / 2.0,
        escape(&spec.y_label)
    );

    for (k, ser) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let stride = ser.x.len().div_ceil(MAX_POINTS).max(1);
        let mut pts = String::new();
        let mut idx: Vec<usize> = (0..ser.x.len()).step_by(stride).collect();
        if *idx.last().unwrap() != ser.x.len() - 1 {
            idx.push(ser.x.len() - 1);
        }
        for i in idx {
            let _ = write!(pts, "{:.2},{:.2} ", px(ser.x[i]), py(ser.y[i]));
        }
        let _ = writeln!(
            s,
            r#"<polyline class="series" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.trim_end()
        );
        if spec.phase_plane {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                px(ser.x[0]),
                py(ser.y[0])
            );
        }
        let ly = MARGIN_T + 15.0 + 18.0 * k as f64;
        let lx = MARGIN_L + pw + 10.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            s,
            r#"<text class="legend" x="{}" y="{}" font-family="sans-serif" font-size="11">{}</text>"#,
            lx + 25.0,
            ly + 4.0,
            escape(&ser.label)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn tick(v: f64) -> String {
    if v.abs() >= 1e4 || (v != 0.0 && v.abs() < 1e-3) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

pub fn render_svg(series: &[Series], spec: &PlotSpec, path: &Path) -> Result<()> {
    let doc = svg_document(series, spec)?;
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, doc)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_is_rejected() {
        assert!(svg_document(&[], &PlotSpec::lines("", "x", "y")).is_err());
        let s = Series::new("a", vec![], vec![]);
        assert!(svg_document(&[s], &PlotSpec::lines("", "x", "y")).is_err());
    }

    #[test]
    fn constant_series_is_horizontal() {
        let s = Series::new("c", vec![0.0, 1.0, 2.0], vec![0.5; 3]);
        let doc = svg_document(&[s], &PlotSpec::lines("flat", "t", "y")).unwrap();
        let pts = doc
            .lines()
            .find(|l| l.contains("class=\"series\""))
            .unwrap()
            .split("points=\"")
            .nth(1)
            .unwrap()
            .trim_end_matches("\"/>");
        let ys: Vec<&str> = pts.split(' ').map(|p| p.split(',').nth(1).unwrap()).collect();
        assert!(ys.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn legend_lists_every_series() {
        let series: Vec<Series> = ["k1", "k2", "k3"]
            .iter()
            .map(|n| Series::new(*n, vec![0.0, 1.0], vec![1.0, 2.0]))
            .collect();
        let doc = svg_document(&series, &PlotSpec::lines("k", "t", "k")).unwrap();
        assert_eq!(doc.matches("class=\"series\"").count(), 3);
        for n in ["k1", "k2", "k3"] {
            assert!(doc.contains(&format!(">{n}</text>")));
        }
    }
}
