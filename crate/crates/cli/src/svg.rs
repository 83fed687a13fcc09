//! Minimal SVG output: polylines, dots and labels on a fixed canvas.

use std::fmt::Write as _;

pub struct Canvas {
    width: f64,
    height: f64,
    margin: f64,
    x_range: (f64, f64),
    y_range: (f64, f64),
    body: String,
}

impl Canvas {
    pub fn new(width: f64, height: f64, x_range: (f64, f64), y_range: (f64, f64)) -> Self {
        Canvas {
            width,
            height,
            margin: 40.0,
            x_range,
            y_range,
            body: String::new(),
        }
    }

    fn px(&self, x: f64) -> f64 {
        let (lo, hi) = self.x_range;
        self.margin + (x - lo) / (hi - lo) * (self.width - 2.0 * self.margin)
    }

    /// Larger `y` is drawn higher up.
    fn py(&self, y: f64) -> f64 {
        let (lo, hi) = self.y_range;
        self.height - self.margin - (y - lo) / (hi - lo) * (self.height - 2.0 * self.margin)
    }

    /// Pixel cell of a data point, for thinning dense clouds.
    pub fn cell(&self, x: f64, y: f64) -> (i64, i64) {
        (self.px(x).floor() as i64, self.py(y).floor() as i64)
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str, width: f64) {
        if pts.len() < 2 {
            return;
        }
        let coords: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y)))
            .collect();
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="{width}"/>"#,
            coords.join(" ")
        );
    }

    pub fn dot(&mut self, x: f64, y: f64, r: f64, fill: &str) {
        let _ = writeln!(
            self.body,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{r}" fill="{fill}"/>"#,
            self.px(x),
            self.py(y)
        );
    }

    /// A one-pixel square at a pixel cell from [`Canvas::cell`].
    pub fn pixel(&mut self, cell: (i64, i64), fill: &str) {
        let _ = writeln!(
            self.body,
            r#"<rect x="{}" y="{}" width="1" height="1" fill="{fill}"/>"#,
            cell.0, cell.1
        );
    }

    pub fn label(&mut self, x: f64, y: f64, text: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" font-family="sans-serif">{}</text>"#,
            self.px(x),
            self.py(y),
            escape(text)
        );
    }

    pub fn finish(self, title: &str) -> String {
        format!(
            concat!(
                r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
                "\n<title>{t}</title>\n",
                r#"<rect width="100%" height="100%" fill="white"/>"#,
                "\n{b}</svg>\n"
            ),
            w = self.width,
            h = self.height,
            t = escape(title),
            b = self.body
        )
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
