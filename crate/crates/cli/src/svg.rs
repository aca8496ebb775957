//! Minimal deterministic SVG writer. Fixed four-decimal coordinates keep
//! output byte-stable across runs.

use std::fmt::Write;

pub struct SvgDoc {
    view: [f64; 4],
    body: String,
}

fn fmt(v: f64) -> String {
    format!("{v:.4}")
}

impl SvgDoc {
    /// `view` is (min_x, min_y, width, height) in user units.
    pub fn new(view: [f64; 4]) -> Self {
        SvgDoc {
            view,
            body: String::new(),
        }
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str) {
        writeln!(
            self.body,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{fill}"/>"#,
            fmt(x),
            fmt(y),
            fmt(w),
            fmt(h)
        )
        .unwrap();
    }

    pub fn polygon(&mut self, points: &[[f64; 2]], fill: &str) {
        let pts: Vec<String> = points
            .iter()
            .map(|p| format!("{},{}", fmt(p[0]), fmt(p[1])))
            .collect();
        writeln!(
            self.body,
            r#"<polygon points="{}" fill="{fill}"/>"#,
            pts.join(" ")
        )
        .unwrap();
    }

    pub fn line(&mut self, a: [f64; 2], b: [f64; 2], stroke: &str, width: f64) {
        writeln!(
            self.body,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{stroke}" stroke-width="{}"/>"#,
            fmt(a[0]),
            fmt(a[1]),
            fmt(b[0]),
            fmt(b[1]),
            fmt(width)
        )
        .unwrap();
    }

    pub fn circle(&mut self, c: [f64; 2], r: f64, fill: &str) {
        writeln!(
            self.body,
            r#"<circle cx="{}" cy="{}" r="{}" fill="{fill}"/>"#,
            fmt(c[0]),
            fmt(c[1]),
            fmt(r)
        )
        .unwrap();
    }

    pub fn circle_outline(&mut self, c: [f64; 2], r: f64, stroke: &str, width: f64) {
        writeln!(
            self.body,
            r#"<circle cx="{}" cy="{}" r="{}" fill="none" stroke="{stroke}" stroke-width="{}"/>"#,
            fmt(c[0]),
            fmt(c[1]),
            fmt(r),
            fmt(width)
        )
        .unwrap();
    }

    pub fn polyline(&mut self, points: &[[f64; 2]], stroke: &str, width: f64, class: &str) {
        let pts: Vec<String> = points
            .iter()
            .map(|p| format!("{},{}", fmt(p[0]), fmt(p[1])))
            .collect();
        writeln!(
            self.body,
            r#"<polyline class="{class}" points="{}" fill="none" stroke="{stroke}" stroke-width="{}"/>"#,
            pts.join(" "),
            fmt(width)
        )
        .unwrap();
    }

    pub fn finish(self) -> String {
        format!(
            concat!(
                r#"<?xml version="1.0" encoding="UTF-8"?>"#,
                "\n",
                r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
                "\n{}</svg>\n"
            ),
            fmt(self.view[0]),
            fmt(self.view[1]),
            fmt(self.view[2]),
            fmt(self.view[3]),
            self.body
        )
    }
}

/// Color palette for tree components; cycles when there are more trees.
pub const TREE_PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
];
