//! Minimal single-panel SVG line plots.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;

const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f",
];

pub struct Series<'a> {
    pub label: &'a str,
    pub values: &'a [f64],
    /// Half-width of a shaded band around `values`.
    pub band: Option<&'a [f64]>,
    pub dashed: bool,
}

pub struct Plot<'a> {
    pub title: String,
    pub times: &'a [f64],
    pub log_time: bool,
    pub series: Vec<Series<'a>>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Plot<'_> {
    pub fn render(&self) -> String {
        let x_of = |t: f64| if self.log_time { t.log10() } else { t };
        let xs: Vec<f64> = self.times.iter().map(|&t| x_of(t)).collect();
        let (x_lo, x_hi) = bounds(xs.iter().copied());
        let all_y = self.series.iter().flat_map(|s| {
            let band = s.band.unwrap_or(&[]);
            s.values.iter().enumerate().flat_map(move |(k, &v)| {
                let w = band.get(k).copied().unwrap_or(0.0);
                [v - w, v + w]
            })
        });
        let (y_lo, y_hi) = bounds(all_y.chain([0.0]));
        let plot_w = WIDTH - LEFT - RIGHT;
        let plot_h = HEIGHT - TOP - BOTTOM;
        let px = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
        let py = |y: f64| TOP + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h;

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="18" text-anchor="middle">{}</text>"#,
            LEFT + plot_w / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            out,
            r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
        );
        for i in 0..=4 {
            let y = y_lo + (y_hi - y_lo) * i as f64 / 4.0;
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{:.1}" text-anchor="end">{y:.2}</text>"#,
                LEFT - 6.0,
                py(y) + 4.0
            );
        }
        for i in 0..=4 {
            let x = x_lo + (x_hi - x_lo) * i as f64 / 4.0;
            let label = if self.log_time {
                format!("1e{x:.1}")
            } else {
                format!("{x:.3}")
            };
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{}" text-anchor="middle">{label}</text>"#,
                px(x),
                TOP + plot_h + 18.0
            );
        }
        let axis = if self.log_time { "t (log scale)" } else { "t" };
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{axis}</text>"#,
            LEFT + plot_w / 2.0,
            HEIGHT - 10.0
        );

        for (i, s) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            if let Some(band) = s.band {
                let upper = xs.iter().zip(s.values).zip(band).map(|((&x, &v), &w)| (px(x), py(v + w)));
                let lower = xs.iter().zip(s.values).zip(band).rev().map(|((&x, &v), &w)| (px(x), py(v - w)));
                let pts: Vec<String> = upper.chain(lower).map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let _ = writeln!(
                    out,
                    r#"<polygon points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#,
                    pts.join(" ")
                );
            }
            let pts: Vec<String> = xs
                .iter()
                .zip(s.values)
                .map(|(&x, &v)| format!("{:.2},{:.2}", px(x), py(v)))
                .collect();
            let dash = if s.dashed { r#" stroke-dasharray="6,4""# } else { "" };
            let _ = writeln!(
                out,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
                pts.join(" ")
            );
            let ly = TOP + 14.0 + 18.0 * i as f64;
            let lx = WIDTH - RIGHT + 12.0;
            let _ = writeln!(
                out,
                r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"{dash}/>"#,
                lx + 20.0
            );
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}">{}</text>"#,
                lx + 26.0,
                ly + 4.0,
                escape(s.label)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}
