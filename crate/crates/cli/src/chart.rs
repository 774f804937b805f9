//! Line charts of aggregate tables, written as standalone SVG 1.1.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rugged_onemax::harness::AggregateRow;
use rugged_onemax::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub xs: Vec<usize>,
    pub ys: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChartSpec {
    pub series: Vec<Series>,
    pub x_label: String,
    pub y_label: String,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// The algorithm part of a series label such as `ea:normal`.
pub fn algorithm_of(label: &str) -> &str {
    label.split(':').next().unwrap_or(label)
}

impl ChartSpec {
    /// One series per label, in first-appearance order. cGA series are
    /// dropped unless `include_cga` is set.
    pub fn from_rows(rows: &[AggregateRow], include_cga: bool) -> Result<Self> {
        let mut order: Vec<&str> = Vec::new();
        let mut points: BTreeMap<&str, Vec<(usize, f64)>> = BTreeMap::new();
        for r in rows {
            if !include_cga && algorithm_of(&r.algorithm) == "cga" {
                continue;
            }
            if !points.contains_key(r.algorithm.as_str()) {
                order.push(&r.algorithm);
            }
            points
                .entry(&r.algorithm)
                .or_default()
                .push((r.n, r.mean_pct));
        }
        let series = order
            .into_iter()
            .map(|label| {
                let mut pts = points.remove(label).expect("label was recorded");
                pts.sort_by_key(|p| p.0);
                Series {
                    label: label.to_string(),
                    xs: pts.iter().map(|p| p.0).collect(),
                    ys: pts.iter().map(|p| p.1).collect(),
                }
            })
            .collect();
        let spec = ChartSpec {
            series,
            x_label: "n".into(),
            y_label: "mean % of ones in the best sampled point".into(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let first = self
            .series
            .first()
            .ok_or_else(|| Error::Schema("no series to plot".into()))?;
        if first.xs.is_empty() {
            return Err(Error::Schema(format!(
                "series `{}` has no points",
                first.label
            )));
        }
        for s in &self.series {
            if s.xs != first.xs {
                return Err(Error::Schema(format!(
                    "series `{}` does not share the n grid of `{}`",
                    s.label, first.label
                )));
            }
            if s.ys.len() != s.xs.len() {
                return Err(Error::Schema(format!(
                    "series `{}` has mismatched lengths",
                    s.label
                )));
            }
            if let Some(y) = s.ys.iter().find(|y| !(0.0..=100.0).contains(*y)) {
                return Err(Error::Schema(format!(
                    "series `{}` has y = {y} outside [0, 100]",
                    s.label
                )));
            }
        }
        Ok(())
    }

    /// Renders the chart. The y-axis spans 0 to 100 percent; every data point
    /// is a circle carrying `data-series`, `data-n` and `data-mean` attributes.
    pub fn to_svg(&self) -> Result<String> {
        self.validate()?;
        let xs = &self.series[0].xs;
        let (x_min, x_max) = (xs[0] as f64, *xs.last().expect("nonempty") as f64);
        let plot_w = WIDTH - LEFT - RIGHT;
        let plot_h = HEIGHT - TOP - BOTTOM;
        let px = |x: usize| {
            if x_max > x_min {
                LEFT + (x as f64 - x_min) / (x_max - x_min) * plot_w
            } else {
                LEFT + plot_w / 2.0
            }
        };
        let py = |y: f64| TOP + (1.0 - y / 100.0) * plot_h;

        let mut s = String::new();
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(
            s,
            r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
        );

        // axes and grid
        let _ = writeln!(s, r#"<g id="axes" stroke="black" fill="none">"#);
        let _ = writeln!(
            s,
            r#"<line x1="{LEFT}" y1="{}" x2="{}" y2="{}"/>"#,
            TOP + plot_h,
            LEFT + plot_w,
            TOP + plot_h
        );
        let _ = writeln!(
            s,
            r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{}"/>"#,
            TOP + plot_h
        );
        let _ = writeln!(s, "</g>");
        let _ = writeln!(s, r#"<g id="y-ticks" text-anchor="end">"#);
        for tick in (0..=100).step_by(10) {
            let y = py(tick as f64);
            let _ = writeln!(
                s,
                r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
                LEFT + plot_w
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}">{tick}</text>"#,
                LEFT - 6.0,
                y + 4.0
            );
        }
        let _ = writeln!(s, "</g>");
        let _ = writeln!(s, r#"<g id="x-ticks" text-anchor="middle">"#);
        for &x in xs {
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}">{x}</text>"#,
                px(x),
                TOP + plot_h + 18.0
            );
        }
        let _ = writeln!(s, "</g>");
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            LEFT + plot_w / 2.0,
            HEIGHT - 15.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text transform="translate(18 {:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
            TOP + plot_h / 2.0,
            escape(&self.y_label)
        );

        for (i, series) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let label = escape(&series.label);
            let _ = writeln!(s, r#"<g class="series" data-series="{label}">"#);
            let path: Vec<String> = series
                .xs
                .iter()
                .zip(&series.ys)
                .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                path.join(" ")
            );
            for (&x, &y) in series.xs.iter().zip(&series.ys) {
                let _ = writeln!(
                    s,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}" data-series="{label}" data-n="{x}" data-mean="{y}"/>"#,
                    px(x),
                    py(y)
                );
            }
            let ly = TOP + 10.0 + 20.0 * i as f64;
            let lx = LEFT + plot_w + 15.0;
            let _ = writeln!(
                s,
                r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
                lx + 20.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}">{label}</text>"#,
                lx + 26.0,
                ly + 4.0
            );
            let _ = writeln!(s, "</g>");
        }
        let _ = writeln!(s, "</svg>");
        Ok(s)
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
