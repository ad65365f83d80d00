//! Standalone SVG line charts, one series per system.

use std::fmt::Write;
use std::fs;
use std::path::{Path, PathBuf};

use crate::summarize::System;
use crate::Result;

use super::{AggregateRow, GroupBy};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 110.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

pub struct Series {
    pub label: String,
    /// `(x, y)` points; x values are placed at evenly spaced categorical positions.
    pub points: Vec<(f64, f64)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick_label(x: f64) -> String {
    if x.fract() == 0.0 {
        format!("{x:.0}")
    } else {
        format!("{x}")
    }
}

/// Renders a line chart. X positions are the sorted distinct x values of all
/// series, evenly spaced; the y axis spans the data range.
pub fn line_chart_svg(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let mut xs: Vec<f64> = series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let ys = series.iter().flat_map(|s| s.points.iter().map(|p| p.1));
    let (mut y_min, mut y_max) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), y| (lo.min(y), hi.max(y)));
    if !y_min.is_finite() {
        (y_min, y_max) = (0.0, 1.0);
    }
    if y_max - y_min <= f64::EPSILON * y_max.abs().max(1.0) {
        y_min -= 0.5;
        y_max += 0.5;
    }
    let pad = 0.05 * (y_max - y_min);
    let (y_min, y_max) = (y_min - pad, y_max + pad);

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x_pos = |x: f64| {
        let i = xs.iter().position(|&v| v == x).unwrap_or(0);
        if xs.len() <= 1 {
            MARGIN_LEFT + plot_w / 2.0
        } else {
            MARGIN_LEFT + plot_w * i as f64 / (xs.len() - 1) as f64
        }
    };
    let y_pos = |y: f64| MARGIN_TOP + plot_h * (1.0 - (y - y_min) / (y_max - y_min));

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let (x0, x1, y0, y1) = (MARGIN_LEFT, MARGIN_LEFT + plot_w, MARGIN_TOP, MARGIN_TOP + plot_h);
    let _ = writeln!(svg, r#"<line x1="{x0}" y1="{y1}" x2="{x1}" y2="{y1}" stroke="black"/>"#);
    let _ = writeln!(svg, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#);
    for &x in &xs {
        let px = x_pos(x);
        let _ = writeln!(
            svg,
            r#"<text x="{px:.1}" y="{}" text-anchor="middle">{}</text>"#,
            y1 + 18.0,
            tick_label(x)
        );
    }
    for i in 0..=4 {
        let v = y_min + (y_max - y_min) * i as f64 / 4.0;
        let py = y_pos(v);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{py:.1}" text-anchor="end" dominant-baseline="middle">{v:.3}</text>"#,
            x0 - 6.0
        );
        let _ = writeln!(
            svg,
            r##"<line x1="{x0}" y1="{py:.1}" x2="{x1}" y2="{py:.1}" stroke="#ddd"/>"##
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        x0 + plot_w / 2.0,
        HEIGHT - 10.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#,
        y0 + plot_h / 2.0,
        escape(y_label)
    );
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut pts: Vec<(f64, f64)> = s.points.clone();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let coords: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.1},{:.1}", x_pos(x), y_pos(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline data-series="{}" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            escape(&s.label),
            coords.join(" ")
        );
        for &(x, y) in &pts {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{color}"/>"#,
                x_pos(x),
                y_pos(y)
            );
        }
        let ly = y0 + 16.0 * i as f64 + 8.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            x1 + 10.0,
            x1 + 30.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{ly}" dominant-baseline="middle">{}</text>"#,
            x1 + 35.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

type Metric = (&'static str, &'static str, fn(&AggregateRow) -> f64);

const METRICS: [Metric; 3] = [
    ("perplexity", "Perplexity", |r| r.mean_perplexity),
    ("js_total", "Topic divergence (JS total)", |r| r.mean_js_total),
    ("time", "Summarize + train time (s)", |r| {
        r.mean_summarize_time_s + r.mean_train_time_s
    }),
];

/// One chart per metric (perplexity, divergence, time) for this grouping,
/// written as `<metric>_by_<k|rate>.svg` under `dir`.
pub fn emit_plots(rows: &[AggregateRow], group_by: GroupBy, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut systems: Vec<System> = rows.iter().map(|r| r.system).collect();
    systems.sort();
    systems.dedup();
    let x_label = match group_by {
        GroupBy::K => "number of topics",
        GroupBy::Rate => "compression rate",
    };
    let mut written = Vec::new();
    for (name, label, value) in METRICS {
        let series: Vec<Series> = systems
            .iter()
            .map(|&sys| Series {
                label: sys.name().to_string(),
                points: rows
                    .iter()
                    .filter(|r| r.system == sys)
                    .map(|r| (r.key, value(r)))
                    .collect(),
            })
            .collect();
        let title = format!("{label} by {x_label}");
        let path = dir.join(format!("{name}_by_{}.svg", group_by.column()));
        fs::write(&path, line_chart_svg(&title, x_label, label, &series))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(system: System, key: f64, ppl: f64) -> AggregateRow {
        AggregateRow {
            system,
            key,
            n: 1,
            mean_perplexity: ppl,
            mean_js_total: 1.0,
            mean_summarize_time_s: 0.0,
            mean_train_time_s: 1.0,
        }
    }

    #[test]
    fn one_polyline_per_system() {
        let rows: Vec<AggregateRow> = System::ALL
            .iter()
            .flat_map(|&s| [5.0, 10.0, 50.0].map(|k| row(s, k, k * 2.0)))
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let files = emit_plots(&rows, GroupBy::K, dir.path()).unwrap();
        assert_eq!(files.len(), 3);
        let svg = fs::read_to_string(dir.path().join("perplexity_by_k.svg")).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 4);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn flat_and_empty_series_render() {
        let svg = line_chart_svg(
            "t",
            "x",
            "y",
            &[Series {
                label: "A".into(),
                points: vec![(1.0, 3.0)],
            }],
        );
        assert!(!svg.contains("NaN"));
        let svg = line_chart_svg("t<", "x", "y", &[]);
        assert!(svg.contains("t&lt;"));
    }
}
