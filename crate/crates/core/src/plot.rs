//! Self-contained SVG rendering of result records.

use std::fmt::Write;

use rustc_hash::FxHashSet;

use crate::config::{PlotData, ResultRecord};
use crate::error::{Error, Result};

const SIZE: f64 = 640.0;
const MARGIN: f64 = 56.0;
/// Above this many cells only the outermost ones are drawn.
const MAX_CELLS: usize = 4000;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn fit(points: impl Iterator<Item = [f64; 2]>) -> Self {
        let mut f = Frame {
            x0: f64::INFINITY,
            x1: f64::NEG_INFINITY,
            y0: f64::INFINITY,
            y1: f64::NEG_INFINITY,
        };
        for [x, y] in points.filter(|p| p[0].is_finite() && p[1].is_finite()) {
            f.x0 = f.x0.min(x);
            f.x1 = f.x1.max(x);
            f.y0 = f.y0.min(y);
            f.y1 = f.y1.max(y);
        }
        if !f.x0.is_finite() {
            return Frame { x0: 0.0, x1: 1.0, y0: 0.0, y1: 1.0 };
        }
        let pad = |lo: &mut f64, hi: &mut f64| {
            let w = (*hi - *lo).max(1e-9);
            *lo -= 0.05 * w;
            *hi += 0.05 * w;
        };
        pad(&mut f.x0, &mut f.x1);
        pad(&mut f.y0, &mut f.y1);
        f
    }

    fn square(mut self) -> Self {
        let (w, h) = (self.x1 - self.x0, self.y1 - self.y0);
        if w > h {
            let c = 0.5 * (self.y0 + self.y1);
            (self.y0, self.y1) = (c - w / 2.0, c + w / 2.0);
        } else {
            let c = 0.5 * (self.x0 + self.x1);
            (self.x0, self.x1) = (c - h / 2.0, c + h / 2.0);
        }
        self
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (SIZE - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        SIZE - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (SIZE - 2.0 * MARGIN)
    }

    fn scale(&self) -> f64 {
        (SIZE - 2.0 * MARGIN) / (self.x1 - self.x0)
    }
}

fn header(title: &str) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}" font-family="sans-serif" font-size="12">"#
    );
    let _ = write!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = write!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, SIZE / 2.0, escape(title));
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn polyline(s: &mut String, f: &Frame, pts: &[[f64; 2]], style: &str, closed: bool) {
    let tag = if closed { "polygon" } else { "polyline" };
    let _ = write!(s, r#"<{tag} fill="none" {style} points=""#);
    for p in pts.iter().filter(|p| p[0].is_finite() && p[1].is_finite()) {
        let _ = write!(s, "{:.2},{:.2} ", f.px(p[0]), f.py(p[1]));
    }
    s.push_str(r#""/>"#);
}

fn axes(s: &mut String, f: &Frame, x_label: &str, y_label: &str) {
    let (l, r, b, t) = (MARGIN, SIZE - MARGIN, SIZE - MARGIN, MARGIN);
    let _ = write!(s, r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#, r - l, b - t);
    for (x, anchor) in [(f.x0, "start"), (f.x1, "end")] {
        let _ = write!(s, r#"<text x="{:.1}" y="{}" text-anchor="{anchor}">{}</text>"#, f.px(x), b + 16.0, fmt_num(x));
    }
    for y in [f.y0, f.y1] {
        let _ = write!(s, r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#, l - 4.0, f.py(y) + 4.0, fmt_num(y));
    }
    let _ = write!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, SIZE / 2.0, SIZE - 12.0, escape(x_label));
    let _ = write!(
        s,
        r#"<text transform="translate(14 {}) rotate(-90)" text-anchor="middle">{}</text>"#,
        SIZE / 2.0,
        escape(y_label)
    );
}

fn fmt_num(x: f64) -> String {
    if x != 0.0 && (x.abs() >= 1e4 || x.abs() < 1e-2) {
        format!("{x:.2e}")
    } else {
        format!("{x:.3}")
    }
}

/// Cells with a missing lattice neighbour, for thinning large balls.
fn outer_cells(cells: &[[f64; 2]], h: f64) -> Vec<[f64; 2]> {
    let key = |p: &[f64; 2]| ((p[0] / h).round() as i64, (p[1] / h).round() as i64);
    let set: FxHashSet<(i64, i64)> = cells.iter().map(key).collect();
    cells
        .iter()
        .filter(|p| {
            let (i, j) = key(p);
            [(1, 0), (-1, 0), (0, 1), (0, -1)].iter().any(|(a, b)| !set.contains(&(i + a, j + b)))
        })
        .copied()
        .collect()
}

fn shape_svg(
    title: &str,
    cells: &[[f64; 2]],
    h: f64,
    inner: &[[f64; 2]],
    outer: &[[f64; 2]],
    cone: Option<([f64; 2], f64)>,
) -> String {
    let f = Frame::fit(cells.iter().chain(outer).copied().chain([[0.0, 0.0]])).square();
    let mut s = header(title);
    let shown = if cells.len() > MAX_CELLS { outer_cells(cells, h) } else { cells.to_vec() };
    let w = (h * f.scale()).max(0.5);
    let _ = write!(s, r##"<g fill="#9ab" stroke="none">"##);
    for c in &shown {
        let _ = write!(s, r#"<rect x="{:.2}" y="{:.2}" width="{w:.2}" height="{w:.2}"/>"#, f.px(c[0] - h / 2.0), f.py(c[1] + h / 2.0));
    }
    s.push_str("</g>");
    polyline(&mut s, &f, inner, r##"stroke="#c33" stroke-width="1.5""##, true);
    polyline(&mut s, &f, outer, r##"stroke="#33c" stroke-width="1.5""##, true);
    if let Some((u, c)) = cone {
        // Boundary rays of B(u, c): angle asin(c) from the axis when c < 1.
        if c < 1.0 {
            let half = c.asin();
            let base = u[1].atan2(u[0]);
            let reach = 2.0 * (f.x1 - f.x0).max(f.y1 - f.y0);
            for a in [base - half, base + half] {
                let ray = [[0.0, 0.0], [reach * a.cos(), reach * a.sin()]];
                polyline(&mut s, &f, &ray, r#"stroke="black" stroke-dasharray="6 4""#, false);
            }
        }
    }
    axes(&mut s, &f, "x / t", "y / t");
    s.push_str("</svg>\n");
    s
}

fn trajectory_svg(title: &str, window: (f64, f64), breakpoints: &[f64], values: &[f64], bar: Option<f64>, hat: f64) -> String {
    let mut pts = Vec::with_capacity(2 * values.len());
    let mut x = window.0;
    for (k, &v) in values.iter().enumerate() {
        let next = breakpoints.get(k).copied().unwrap_or(window.1);
        pts.push([x, v]);
        pts.push([next, v]);
        x = next;
    }
    let guides: Vec<(f64, &str)> = bar.map(|b| (b, "#c33")).into_iter().chain([(hat, "#33c")]).collect();
    let f = Frame::fit(pts.iter().copied().chain(guides.iter().map(|g| [window.0, g.0])));
    let mut s = header(title);
    for &(y, color) in &guides {
        let line = [[f.x0, y], [f.x1, y]];
        polyline(&mut s, &f, &line, &format!(r#"stroke="{color}" stroke-dasharray="6 4""#), false);
    }
    polyline(&mut s, &f, &pts, r#"stroke="black" stroke-width="1.5""#, false);
    axes(&mut s, &f, "s", "T(s)");
    s.push_str("</svg>\n");
    s
}

fn trend_svg(title: &str, x_label: &str, y_label: &str, xs: &[f64], ys: &[f64], log_log: bool, slope: Option<f64>) -> String {
    let tr = |v: f64| if log_log { v.ln() } else { v };
    let pts: Vec<[f64; 2]> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| !log_log || (**x > 0.0 && **y > 0.0))
        .map(|(&x, &y)| [tr(x), tr(y)])
        .collect();
    let f = Frame::fit(pts.iter().copied());
    let mut s = header(title);
    polyline(&mut s, &f, &pts, r#"stroke="black""#, false);
    for p in &pts {
        let _ = write!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5"/>"#, f.px(p[0]), f.py(p[1]));
    }
    if let Some(b) = slope {
        let _ = write!(s, r#"<text x="{}" y="{}">fitted slope {b:.3}</text>"#, MARGIN + 8.0, MARGIN + 18.0);
    }
    let (xl, yl) = if log_log {
        (format!("ln {x_label}"), format!("ln {y_label}"))
    } else {
        (x_label.to_string(), y_label.to_string())
    };
    axes(&mut s, &f, &xl, &yl);
    s.push_str("</svg>\n");
    s
}

/// SVG for shape, trajectory and trend records; `NoPlot` otherwise.
pub fn emit_plot(record: &ResultRecord) -> Result<String> {
    let title = format!("{} {}", record.kind.name(), &record.provenance.config_hash[..12.min(record.provenance.config_hash.len())]);
    match &record.plot {
        Some(PlotData::Shape { cells, cell_size, inner, outer, cone }) => {
            Ok(shape_svg(&title, cells, *cell_size, inner, outer, *cone))
        }
        Some(PlotData::Trajectory { window, breakpoints, values, bar, hat }) => {
            Ok(trajectory_svg(&title, *window, breakpoints, values, *bar, *hat))
        }
        Some(PlotData::Trend { x_label, y_label, xs, ys, log_log, slope }) => {
            Ok(trend_svg(&title, x_label, y_label, xs, ys, *log_log, *slope))
        }
        None => Err(Error::NoPlot(record.kind.name().to_string())),
    }
}
