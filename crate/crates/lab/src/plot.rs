//! Static SVG plots. Output depends only on the data, never on the clock,
//! so plots are reproducible alongside the reports.

use std::fmt::Write;
use std::fs;
use std::path::Path;

use fractal_wave_core::{ApproxGraph, FractalKind};

use crate::error::{io_err, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self { name: name.into(), points }
    }
}

#[derive(Default, Clone, Copy)]
pub struct Axes {
    pub log_x: bool,
    pub log_y: bool,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-300 {
        let pad = lo.abs().max(1.0) * 0.5;
        (lo - pad, hi + pad)
    } else {
        (lo, hi)
    }
}

fn header(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="13">{}</text>"#, WIDTH / 2.0, escape(title));
    s
}

/// Line plot of several series. Points with non-finite coordinates, or
/// non-positive ones on a log axis, are skipped.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, series: &[Series], axes: Axes) -> String {
    let tx = |v: f64| if axes.log_x { v.log10() } else { v };
    let ty = |v: f64| if axes.log_y { v.log10() } else { v };
    let usable = |&(x, y): &(f64, f64)| {
        x.is_finite() && y.is_finite() && (!axes.log_x || x > 0.0) && (!axes.log_y || y > 0.0)
    };
    let pts: Vec<Vec<(f64, f64)>> =
        series.iter().map(|s| s.points.iter().filter(|p| usable(p)).map(|&(x, y)| (tx(x), ty(y))).collect()).collect();
    let (x0, x1) = range(pts.iter().flatten().map(|p| p.0));
    let (y0, y1) = range(pts.iter().flatten().map(|p| p.1));
    let (pw, ph) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * ph;

    let mut s = header(title);
    let _ = writeln!(s, r#"<rect x="{MARGIN}" y="{MARGIN}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let xl = if axes.log_x { format!("1e{xv:.2}") } else { format!("{xv:.3}") };
        let yl = if axes.log_y { format!("1e{yv:.2}") } else { format!("{yv:.3e}") };
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{xl}</text>"#, sx(xv), HEIGHT - MARGIN + 16.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{yl}</text>"#, MARGIN - 4.0, sy(yv) + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, WIDTH / 2.0, HEIGHT - 12.0, escape(x_label));
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
    for (i, (ser, p)) in series.iter().zip(&pts).enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = p.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        if path.len() == 1 {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, sx(p[0].0), sy(p[0].1));
        } else if !path.is_empty() {
            let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.4" points="{}"/>"#, path.join(" "));
        }
        let ly = MARGIN + 14.0 + 14.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{ly:.2}" fill="{color}" text-anchor="end">{}</text>"#,
            WIDTH - MARGIN - 6.0,
            escape(&ser.name)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Diverging blue-white-red colour for `v` in `[-1, 1]`.
fn color(v: f64) -> String {
    let v = v.clamp(-1.0, 1.0);
    let (r, g, b) = if v >= 0.0 {
        (1.0, 1.0 - v, 1.0 - v)
    } else {
        (1.0 + v, 1.0 + v, 1.0)
    };
    format!("#{:02x}{:02x}{:02x}", (r * 255.0).round() as u8, (g * 255.0).round() as u8, (b * 255.0).round() as u8)
}

/// Snapshot of `u` on the level-`m` cells. Each gasket cell is a triangle
/// coloured by the mean of its corner values; interval cells are bars.
/// Colours are scaled by `‖u‖∞`.
pub fn heatmap(title: &str, graph: &ApproxGraph, u: &[f64]) -> String {
    let scale = u.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    let (pw, ph) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN - 20.0);
    let mut s = header(&format!("{title} (|u| max {scale:.3e})"));
    let coords = graph.coords();
    match graph.kind() {
        FractalKind::SierpinskiGasket => {
            // The unit-side gasket is √3/2 tall.
            let side = pw.min(ph / (3f64.sqrt() / 2.0));
            let ox = MARGIN + (pw - side) / 2.0;
            let oy = HEIGHT - MARGIN;
            for cell in graph.cells() {
                let mean = cell.vertices.iter().map(|&x| u[x]).sum::<f64>() / cell.vertices.len() as f64;
                let pts: Vec<String> = cell
                    .vertices
                    .iter()
                    .map(|&x| format!("{:.3},{:.3}", ox + coords[x][0] * side, oy - coords[x][1] * side))
                    .collect();
                let _ = writeln!(s, r#"<polygon points="{}" fill="{}"/>"#, pts.join(" "), color(mean / scale));
            }
        }
        FractalKind::Interval => {
            let top = MARGIN + 40.0;
            for cell in graph.cells() {
                let (a, b) = (cell.vertices[0], cell.vertices[1]);
                let (xa, xb) = (coords[a][0].min(coords[b][0]), coords[a][0].max(coords[b][0]));
                let mean = 0.5 * (u[a] + u[b]);
                let _ = writeln!(
                    s,
                    r#"<rect x="{:.3}" y="{top}" width="{:.3}" height="{:.3}" fill="{}"/>"#,
                    MARGIN + xa * pw,
                    (xb - xa) * pw,
                    ph - 40.0,
                    color(mean / scale)
                );
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

pub fn write_svg(path: &Path, svg: &str) -> Result<()> {
    fs::write(path, svg).map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use fractal_wave_core::{Boundary, FractalSpec};

    #[test]
    fn plots_are_well_formed_and_repeatable() {
        let series = vec![Series::new("a<b", vec![(1.0, 2.0), (2.0, 0.5), (3.0, f64::NAN)])];
        let p = line_plot("t", "x", "y", &series, Axes { log_x: true, log_y: true });
        assert!(p.starts_with("<svg") && p.ends_with("</svg>\n") && p.contains("a&lt;b"));
        assert_eq!(p, line_plot("t", "x", "y", &series, Axes { log_x: true, log_y: true }));
        let g = ApproxGraph::build(&FractalSpec::sierpinski_gasket(), 2, Boundary::Neumann).unwrap();
        let u: Vec<f64> = (0..g.num_vertices()).map(|i| (i as f64).sin()).collect();
        let h = heatmap("u", &g, &u);
        assert_eq!(h.matches("<polygon").count(), 9);
        assert_eq!(color(1.0), "#ff0000");
        assert_eq!(color(0.0), "#ffffff");
    }
}
