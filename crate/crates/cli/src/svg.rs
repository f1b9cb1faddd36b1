//! Self-contained SVG rendering of the `(⟨N̂⟩, ⟨H⟩)` curves.

use std::fmt::Write;

use pseudoboson::statmech::{RangeBoundary, Sweep};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 540.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 70.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

/// Round tick spacing giving roughly `target` intervals over `span`.
fn tick_step(span: f64, target: f64) -> f64 {
    let raw = span / target;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm < 1.5 {
        1.0
    } else if norm < 3.5 {
        2.0
    } else if norm < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = tick_step(hi - lo, 6.0);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

struct Frame {
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + x / self.x_max * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - TOP - BOTTOM)
    }

    fn path(&self, pts: impl Iterator<Item = (f64, f64)>) -> String {
        let mut d = String::new();
        for (i, (x, y)) in pts.enumerate() {
            let _ = write!(
                d,
                "{}{:.3},{:.3} ",
                if i == 0 { "M" } else { "L" },
                self.px(x),
                self.py(y)
            );
        }
        d.trim_end().to_owned()
    }
}

/// One polyline per `β`, the two boundary rays dashed, axes labelled
/// `⟨N̂⟩` and `⟨H⟩`.
pub fn render(sweep: &Sweep, boundary: &RangeBoundary) -> String {
    let x_max = boundary.upper.last().map(|p| p.0).unwrap_or(1.0);
    let y_top = boundary
        .upper
        .last()
        .map(|p| p.1)
        .unwrap_or(boundary.e0 + 1.0);
    let frame = Frame {
        x_max,
        y_min: boundary
            .e0
            .min(boundary.lower.last().map(|p| p.1).unwrap_or(boundary.e0)),
        y_max: y_top,
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="serif" font-size="14">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<defs><clipPath id="plot"><rect x="{LEFT}" y="{TOP}" width="{}" height="{}"/></clipPath></defs>"#,
        WIDTH - LEFT - RIGHT,
        HEIGHT - TOP - BOTTOM
    );

    // axes and ticks
    let (x0, y0) = (frame.px(0.0), frame.py(frame.y_min));
    let _ = writeln!(
        s,
        r#"<g stroke="black" fill="none"><line x1="{x0}" y1="{y0}" x2="{}" y2="{y0}"/><line x1="{x0}" y1="{y0}" x2="{x0}" y2="{TOP}"/></g>"#,
        WIDTH - RIGHT
    );
    for t in ticks(0.0, frame.x_max) {
        let x = frame.px(t);
        let _ = writeln!(
            s,
            r#"<line class="tick" x1="{x:.3}" y1="{y0}" x2="{x:.3}" y2="{}" stroke="black"/><text x="{x:.3}" y="{}" text-anchor="middle">{}</text>"#,
            y0 + 5.0,
            y0 + 20.0,
            fmt_tick(t)
        );
    }
    for t in ticks(frame.y_min, frame.y_max) {
        let y = frame.py(t);
        let _ = writeln!(
            s,
            r#"<line class="tick" x1="{}" y1="{y:.3}" x2="{x0}" y2="{y:.3}" stroke="black"/><text x="{}" y="{:.3}" text-anchor="end">{}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            y + 5.0,
            fmt_tick(t)
        );
    }
    let _ = writeln!(
        s,
        r#"<text id="x-label" x="{:.3}" y="{}" text-anchor="middle" font-size="18">⟨N̂⟩</text>"#,
        0.5 * (LEFT + WIDTH - RIGHT),
        HEIGHT - 20.0
    );
    let _ = writeln!(
        s,
        r#"<text id="y-label" x="25" y="{:.3}" text-anchor="middle" font-size="18" transform="rotate(-90 25 {:.3})">⟨H⟩</text>"#,
        0.5 * (TOP + HEIGHT - BOTTOM),
        0.5 * (TOP + HEIGHT - BOTTOM)
    );

    let _ = writeln!(
        s,
        r#"<g clip-path="url(#plot)" fill="none" stroke-width="1.5">"#
    );
    for (name, line) in [
        ("boundary-lower", &boundary.lower),
        ("boundary-upper", &boundary.upper),
    ] {
        let _ = writeln!(
            s,
            r#"<path id="{name}" class="boundary" d="{}" stroke="black" stroke-dasharray="6 4"/>"#,
            frame.path(line.iter().copied())
        );
    }
    for (k, beta) in sweep.betas().into_iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let _ = writeln!(
            s,
            r#"<path class="curve" data-beta="{beta}" d="{}" stroke="{color}"/>"#,
            frame.path(sweep.curve(beta).map(|r| (r.n_expected, r.h_expected)))
        );
    }
    let _ = writeln!(s, "</g>");

    let lx = WIDTH - RIGHT + 15.0;
    for (k, beta) in sweep.betas().into_iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let y = TOP + 20.0 + 22.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">β = {beta}</text>"#,
            lx + 25.0,
            lx + 32.0,
            y + 5.0
        );
    }
    s.push_str("</svg>\n");
    s
}
