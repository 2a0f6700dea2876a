//! A tiny SVG writer: polylines, circles, lines and text, nothing more.

use std::fmt::Write as _;
use std::path::Path;

pub struct Svg {
    width: f64,
    height: f64,
    body: String,
}

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        Svg { width, height, body: String::new() }
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str) {
        if pts.is_empty() {
            return;
        }
        let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="1.5"/>"#,
            coords.join(" ")
        );
    }

    pub fn line(&mut self, a: (f64, f64), b: (f64, f64), stroke: &str) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{stroke}" stroke-width="1"/>"#,
            a.0, a.1, b.0, b.1
        );
    }

    pub fn circle(&mut self, c: (f64, f64), r: f64, fill: &str) {
        let _ = writeln!(self.body, r#"<circle cx="{:.2}" cy="{:.2}" r="{r}" fill="{fill}"/>"#, c.0, c.1);
    }

    pub fn text(&mut self, at: (f64, f64), s: &str) {
        let esc = s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;");
        let _ = writeln!(
            self.body,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12">{esc}</text>"#,
            at.0, at.1
        );
    }

    pub fn render(&self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
             <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n{}</svg>\n",
            self.body,
            w = self.width,
            h = self.height
        )
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.render())
    }
}

/// Maps data coordinates into a plot box with a margin for labels.
pub struct Axes {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub width: f64,
    pub height: f64,
    pub margin: f64,
}

impl Axes {
    pub fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        Axes { x, y, width: 480.0, height: 360.0, margin: 50.0 }
    }

    pub fn map(&self, px: f64, py: f64) -> (f64, f64) {
        let fx = (px - self.x.0) / (self.x.1 - self.x.0);
        let fy = (py - self.y.0) / (self.y.1 - self.y.0);
        (
            self.margin + fx * (self.width - 2.0 * self.margin),
            self.height - self.margin - fy * (self.height - 2.0 * self.margin),
        )
    }

    /// Blank canvas with both axes and their labels drawn.
    pub fn canvas(&self, title: &str, xlabel: &str, ylabel: &str) -> Svg {
        let mut s = Svg::new(self.width, self.height);
        let o = self.map(self.x.0, self.y.0);
        s.line(o, self.map(self.x.1, self.y.0), "black");
        s.line(o, self.map(self.x.0, self.y.1), "black");
        s.text((self.margin, self.margin * 0.6), title);
        s.text((self.width / 2.0, self.height - 12.0), xlabel);
        s.text((6.0, self.height / 2.0), ylabel);
        s.text((o.0 - 10.0, o.1 + 16.0), &format!("{:.3}", self.x.0));
        let xe = self.map(self.x.1, self.y.0);
        s.text((xe.0 - 20.0, xe.1 + 16.0), &format!("{:.3}", self.x.1));
        let ye = self.map(self.x.0, self.y.1);
        s.text((4.0, ye.1 + 4.0), &format!("{:.3}", self.y.1));
        s.text((4.0, o.1), &format!("{:.3}", self.y.0));
        s
    }
}

/// `(d, |γ|)` points under the strong-QII boundary `(|γ| − π)² + d² = π²`.
pub fn qii_scatter(points: &[(f64, f64)], title: &str) -> Svg {
    let pi = std::f64::consts::PI;
    let xmax = points.iter().map(|p| p.0).fold(pi, f64::max) * 1.05;
    let ax = Axes::new((0.0, xmax), (0.0, pi * 1.05));
    let mut s = ax.canvas(title, "d_FS", "|gamma_B|");
    let arc: Vec<(f64, f64)> = (0..=200)
        .map(|i| {
            let d = pi * i as f64 / 200.0;
            let g = pi - (pi * pi - d * d).max(0.0).sqrt();
            ax.map(d, g)
        })
        .collect();
    s.polyline(&arc, "gray");
    s.polyline(&[ax.map(0.0, 0.0), ax.map(pi.min(xmax), pi)], "lightgray");
    for &(d, g) in points {
        s.circle(ax.map(d, g.abs()), 2.0, "steelblue");
    }
    s
}
