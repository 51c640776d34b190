//! Minimal SVG writer for moment-band plots. Coordinates are printed with two
//! decimals so the output is byte-stable.

use std::fmt::Write as _;

/// One shaded band: `(x, lo, hi)` points in ascending x.
#[derive(Debug, Clone, PartialEq)]
pub struct BandSeries {
    pub label: String,
    pub points: Vec<(f64, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BandPlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<BandSeries>,
    /// Dashed horizontal reference lines.
    pub references: Vec<(f64, String)>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;
const TICKS: usize = 5;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Rounds `max` up to a value with a short decimal expansion.
fn nice_ceiling(max: f64) -> f64 {
    if !(max > 0.0) {
        return 1.0;
    }
    let mag = 10f64.powf(max.log10().floor());
    let steps = [1.0, 2.0, 2.5, 5.0, 10.0];
    steps
        .iter()
        .map(|s| s * mag)
        .find(|v| *v >= max)
        .unwrap_or(10.0 * mag)
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-0" {
        "0".to_owned()
    } else {
        s.to_owned()
    }
}

impl BandPlot {
    pub fn render(&self) -> String {
        let all = self.series.iter().flat_map(|s| s.points.iter());
        let x_max = nice_ceiling(all.clone().map(|p| p.0).fold(0.0, f64::max));
        let y_max = nice_ceiling(
            all.map(|p| p.2)
                .chain(self.references.iter().map(|r| r.0))
                .fold(0.0, f64::max),
        );
        let plot_w = WIDTH - LEFT - RIGHT;
        let plot_h = HEIGHT - TOP - BOTTOM;
        let sx = |x: f64| LEFT + x / x_max * plot_w;
        let sy = |y: f64| TOP + plot_h - y / y_max * plot_h;

        let mut o = String::new();
        let _ = writeln!(
            o,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(o, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            o,
            r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            LEFT + plot_w / 2.0,
            escape(&self.title)
        );

        for i in 0..=TICKS {
            let f = i as f64 / TICKS as f64;
            let (x, y) = (sx(f * x_max), sy(f * y_max));
            let _ = writeln!(
                o,
                r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#ddd"/>"##,
                TOP,
                TOP + plot_h
            );
            let _ = writeln!(
                o,
                r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                TOP + plot_h + 18.0,
                tick_label(f * x_max)
            );
            let _ = writeln!(
                o,
                r##"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/>"##,
                LEFT + plot_w
            );
            let _ = writeln!(
                o,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                LEFT - 6.0,
                y + 4.0,
                tick_label(f * y_max)
            );
        }
        let _ = writeln!(
            o,
            r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(
            o,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            LEFT + plot_w / 2.0,
            HEIGHT - 14.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            o,
            r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
            TOP + plot_h / 2.0,
            TOP + plot_h / 2.0,
            escape(&self.y_label)
        );

        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let mut pts: Vec<String> = s
                .points
                .iter()
                .map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.1)))
                .collect();
            pts.extend(
                s.points
                    .iter()
                    .rev()
                    .map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.2))),
            );
            let _ = writeln!(
                o,
                r#"<polygon points="{}" fill="{color}" fill-opacity="0.35" stroke="{color}"/>"#,
                pts.join(" ")
            );
            let ly = TOP + 14.0 + 20.0 * i as f64;
            let lx = LEFT + plot_w + 14.0;
            let _ = writeln!(
                o,
                r#"<rect x="{lx:.2}" y="{:.2}" width="14" height="10" fill="{color}" fill-opacity="0.35" stroke="{color}"/>"#,
                ly - 9.0
            );
            let _ = writeln!(
                o,
                r#"<text x="{:.2}" y="{ly:.2}">{}</text>"#,
                lx + 20.0,
                escape(&s.label)
            );
        }

        for (v, label) in &self.references {
            let y = sy(*v);
            let _ = writeln!(
                o,
                r#"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="black" stroke-dasharray="5,4"/>"#,
                LEFT + plot_w
            );
            let _ = writeln!(
                o,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                LEFT + plot_w - 4.0,
                y - 4.0,
                escape(label)
            );
        }
        o.push_str("</svg>\n");
        o
    }
}
