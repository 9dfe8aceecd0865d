//! Minimal static SVG figures for planar inputs.

use std::fmt::Write;

const SIZE: f64 = 640.0;
const MARGIN: f64 = 32.0;

pub const GREY: &str = "#888888";
pub const BLUE: &str = "#1f5fbf";
pub const GREEN: &str = "#2a9d3a";
pub const RED: &str = "#c8322b";
pub const BLACK: &str = "#000000";

enum Shape {
    Dot { p: [f64; 2], r: f64, color: &'static str },
    Polygon { pts: Vec<[f64; 2]>, color: &'static str },
    Line { a: [f64; 2], b: [f64; 2], color: &'static str, width: f64 },
    Label { text: String, color: &'static str },
}

#[derive(Default)]
pub struct Figure {
    shapes: Vec<Shape>,
}

fn xy(p: &[f64]) -> [f64; 2] {
    [p[0], p[1]]
}

impl Figure {
    pub fn dot(&mut self, p: &[f64], r: f64, color: &'static str) {
        self.shapes.push(Shape::Dot { p: xy(p), r, color });
    }

    pub fn polygon(&mut self, pts: Vec<[f64; 2]>, color: &'static str) {
        if !pts.is_empty() {
            self.shapes.push(Shape::Polygon { pts, color });
        }
    }

    pub fn line(&mut self, a: &[f64], b: &[f64], color: &'static str, width: f64) {
        self.shapes.push(Shape::Line { a: xy(a), b: xy(b), color, width });
    }

    /// A line of legend text, stacked from the top left.
    pub fn label(&mut self, text: impl Into<String>, color: &'static str) {
        self.shapes.push(Shape::Label { text: text.into(), color });
    }

    fn bounds(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        let mut take = |p: &[f64; 2]| {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        };
        for s in &self.shapes {
            match s {
                Shape::Dot { p, .. } => take(p),
                Shape::Polygon { pts, .. } => pts.iter().for_each(&mut take),
                Shape::Line { a, b, .. } => {
                    take(a);
                    take(b)
                }
                Shape::Label { .. } => {}
            }
        }
        if !lo[0].is_finite() {
            return ([0.0, 0.0], [1.0, 1.0]);
        }
        (lo, hi)
    }

    pub fn render(&self) -> String {
        let (lo, hi) = self.bounds();
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
        let scale = (SIZE - 2.0 * MARGIN) / span;
        let map = |p: &[f64; 2]| -> (f64, f64) {
            (MARGIN + (p[0] - lo[0]) * scale, SIZE - MARGIN - (p[1] - lo[1]) * scale)
        };
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let mut label_row = 0;
        for s in &self.shapes {
            match s {
                Shape::Polygon { pts, color } => {
                    let list: Vec<String> = pts
                        .iter()
                        .map(|p| {
                            let (x, y) = map(p);
                            format!("{x:.2},{y:.2}")
                        })
                        .collect();
                    let _ = writeln!(
                        out,
                        r#"<polygon points="{}" fill="{color}" fill-opacity="0.15" stroke="{color}" stroke-width="1.5"/>"#,
                        list.join(" ")
                    );
                }
                Shape::Line { a, b, color, width } => {
                    let ((x1, y1), (x2, y2)) = (map(a), map(b));
                    let _ = writeln!(
                        out,
                        r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{color}" stroke-width="{width}"/>"#
                    );
                }
                Shape::Dot { p, r, color } => {
                    let (x, y) = map(p);
                    let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r}" fill="{color}"/>"#);
                }
                Shape::Label { text, color } => {
                    label_row += 1;
                    let _ = writeln!(
                        out,
                        r#"<text x="8" y="{}" font-family="monospace" font-size="12" fill="{color}">{}</text>"#,
                        14 * label_row,
                        escape(text)
                    );
                }
            }
        }
        out.push_str("</svg>\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
