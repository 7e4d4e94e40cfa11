//! Minimal static SVG charts: labelled scatterplots, paired boxplots and
//! stacked proportion bars. Output depends only on the input data.

use std::fmt::Write;

use crate::analyze::{ImportanceReport, OutlierReport};
use crate::metrics::BoxStats;
use crate::reduce::EmbeddingResult;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn header(out: &mut String, width: f64, height: f64, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        width / 2.0,
        escape(title)
    );
}

/// Linear map from `[lo, hi]` onto `[a, b]`; degenerate ranges map to the midpoint.
fn scale(v: f64, lo: f64, hi: f64, a: f64, b: f64) -> f64 {
    if hi > lo {
        a + (v - lo) / (hi - lo) * (b - a)
    } else {
        (a + b) / 2.0
    }
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Scatterplot of an embedding, one colour per scribe, with a legend.
pub fn scatter_svg(embedding: &EmbeddingResult, title: &str) -> String {
    let mut scribes: Vec<&str> = Vec::new();
    for l in &embedding.labels {
        if !scribes.contains(&l.scribe.as_str()) {
            scribes.push(l.scribe.as_str());
        }
    }
    let (x0, x1) = bounds(embedding.coords.iter().map(|c| c[0]));
    let (y0, y1) = bounds(embedding.coords.iter().map(|c| c[1]));
    let plot_right = WIDTH - MARGIN - 100.0;

    let mut out = String::new();
    header(&mut out, WIDTH, HEIGHT, title);
    let _ = writeln!(
        out,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{:.1}" height="{:.1}" fill="none" stroke="#444"/>"##,
        plot_right - MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    for (c, l) in embedding.coords.iter().zip(&embedding.labels) {
        let k = scribes.iter().position(|s| *s == l.scribe.as_str()).unwrap_or(0);
        let px = scale(c[0], x0, x1, MARGIN + 8.0, plot_right - 8.0);
        let py = scale(c[1], y0, y1, HEIGHT - MARGIN - 8.0, MARGIN + 8.0);
        let _ = writeln!(
            out,
            r#"<circle cx="{px:.2}" cy="{py:.2}" r="3.5" fill="{}" fill-opacity="0.75"><title>{}</title></circle>"#,
            PALETTE[k % PALETTE.len()],
            escape(&l.to_string())
        );
    }
    for (k, s) in scribes.iter().enumerate() {
        let y = MARGIN + 10.0 + 18.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<circle cx="{:.1}" cy="{y:.1}" r="5" fill="{}"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            plot_right + 16.0,
            PALETTE[k % PALETTE.len()],
            plot_right + 26.0,
            y + 4.0,
            escape(s)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{} 1</text>"#,
        (MARGIN + plot_right) / 2.0,
        HEIGHT - MARGIN / 2.0,
        embedding.method
    );
    let _ = writeln!(
        out,
        r#"<text x="20" y="{:.1}" text-anchor="middle" transform="rotate(-90 20 {:.1})">{} 2</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        embedding.method
    );
    out.push_str("</svg>\n");
    out
}

fn draw_box(out: &mut String, stats: &BoxStats, cx: f64, half: f64, y: impl Fn(f64) -> f64, color: &str) {
    let _ = writeln!(
        out,
        r##"<line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="#333"/>"##,
        y(stats.min),
        y(stats.max)
    );
    let _ = writeln!(
        out,
        r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{color}" stroke="#333"/>"##,
        cx - half,
        y(stats.q3),
        2.0 * half,
        (y(stats.q1) - y(stats.q3)).max(0.5)
    );
    let _ = writeln!(
        out,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#000" stroke-width="2"/>"##,
        cx - half,
        y(stats.median),
        cx + half,
        y(stats.median)
    );
}

/// Paired boxplots of TF-IDF values (target unit vs rest) for the features
/// that carry distribution summaries.
pub fn importance_boxplot_svg(report: &ImportanceReport, title: &str) -> String {
    let feats: Vec<_> = report
        .features
        .iter()
        .filter_map(|f| Some((f, f.target_distribution?, f.rest_distribution?)))
        .collect();
    let width = (MARGIN * 2.0 + 60.0 * feats.len() as f64).max(WIDTH);
    let hi = feats
        .iter()
        .map(|(_, t, r)| t.max.max(r.max))
        .fold(0.0_f64, f64::max)
        .max(1e-9);
    let y = |v: f64| scale(v, 0.0, hi, HEIGHT - MARGIN, MARGIN);

    let mut out = String::new();
    header(&mut out, width, HEIGHT, title);
    let _ = writeln!(
        out,
        r##"<line x1="{MARGIN}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#444"/>"##,
        HEIGHT - MARGIN,
        width - MARGIN,
        HEIGHT - MARGIN
    );
    for (i, (f, t, r)) in feats.iter().enumerate() {
        let cx = MARGIN + 30.0 + 60.0 * i as f64;
        draw_box(&mut out, t, cx - 11.0, 9.0, y, PALETTE[3]);
        draw_box(&mut out, r, cx + 11.0, 9.0, y, PALETTE[0]);
        let _ = writeln!(
            out,
            r#"<text x="{cx:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            HEIGHT - MARGIN + 18.0,
            escape(&f.bigram.replace(' ', "␣"))
        );
    }
    let legend = [("target", PALETTE[3]), ("rest", PALETTE[0])];
    for (k, (name, color)) in legend.iter().enumerate() {
        let lx = width - MARGIN - 80.0;
        let ly = MARGIN + 18.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{lx:.1}" y="{:.1}" width="10" height="10" fill="{color}"/><text x="{:.1}" y="{:.1}">{name}</text>"#,
            ly - 9.0,
            lx + 16.0,
            ly
        );
    }
    out.push_str("</svg>\n");
    out
}

/// One stacked bar (inliers below, outliers above) per report row.
pub fn outlier_bars_svg(report: &OutlierReport, title: &str) -> String {
    let n = report.rows.len();
    let width = (MARGIN * 2.0 + 50.0 * n as f64).max(WIDTH);
    let y = |v: f64| scale(v, 0.0, 1.0, HEIGHT - MARGIN - 60.0, MARGIN);

    let mut out = String::new();
    header(&mut out, width, HEIGHT, title);
    for (i, r) in report.rows.iter().enumerate() {
        let x = MARGIN + 10.0 + 50.0 * i as f64;
        let inlier = 1.0 - r.outlier_fraction;
        let _ = writeln!(
            out,
            r#"<rect x="{x:.1}" y="{:.2}" width="30" height="{:.2}" fill="{}"/>"#,
            y(inlier),
            y(0.0) - y(inlier),
            PALETTE[0]
        );
        let _ = writeln!(
            out,
            r#"<rect x="{x:.1}" y="{:.2}" width="30" height="{:.2}" fill="{}"/>"#,
            y(1.0),
            y(inlier) - y(1.0),
            PALETTE[3]
        );
        let name = match &r.unit_id {
            Some(u) => format!("{} {}", r.codex_id, u),
            None => r.codex_id.clone(),
        };
        let lx = x + 15.0;
        let ly = y(0.0) + 12.0;
        let _ = writeln!(
            out,
            r#"<text x="{lx:.1}" y="{ly:.1}" text-anchor="end" transform="rotate(-45 {lx:.1} {ly:.1})" font-size="10">{}</text>"#,
            escape(&name)
        );
    }
    let legend = [("inlier", PALETTE[0]), ("outlier", PALETTE[3])];
    for (k, (name, color)) in legend.iter().enumerate() {
        let lx = width - MARGIN - 80.0;
        let ly = MARGIN + 18.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{lx:.1}" y="{:.1}" width="10" height="10" fill="{color}"/><text x="{:.1}" y="{:.1}">{name}</text>"#,
            ly - 9.0,
            lx + 16.0,
            ly
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Boxplots of per-sample values, one per named group.
pub fn boxplot_svg(groups: &[(String, BoxStats)], title: &str) -> String {
    let width = (MARGIN * 2.0 + 50.0 * groups.len() as f64).max(WIDTH);
    let (lo, hi) = bounds(groups.iter().flat_map(|(_, s)| [s.min, s.max]));
    let (lo, hi) = if lo.is_finite() { (lo.min(0.0), hi) } else { (0.0, 1.0) };
    let y = |v: f64| scale(v, lo, hi, HEIGHT - MARGIN - 60.0, MARGIN);

    let mut out = String::new();
    header(&mut out, width, HEIGHT, title);
    for (i, (name, stats)) in groups.iter().enumerate() {
        let cx = MARGIN + 25.0 + 50.0 * i as f64;
        draw_box(&mut out, stats, cx, 12.0, y, PALETTE[i % PALETTE.len()]);
        let ly = y(lo) + 12.0;
        let _ = writeln!(
            out,
            r#"<text x="{cx:.1}" y="{ly:.1}" text-anchor="end" transform="rotate(-45 {cx:.1} {ly:.1})" font-size="10">{}</text>"#,
            escape(name)
        );
    }
    for v in [lo, (lo + hi) / 2.0, hi] {
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.2}" text-anchor="end" font-size="10">{v:.3}</text>"#,
            MARGIN - 6.0,
            y(v) + 3.0
        );
    }
    out.push_str("</svg>\n");
    out
}
