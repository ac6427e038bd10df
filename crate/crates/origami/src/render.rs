//! Deterministic SVG scatter rendering of constructed point sets.
//!
//! The y axis points up (mathematical orientation) and generations are
//! colored through a fixed 8-color ramp, cycling for deeper runs. Rendering
//! is a pure function of the input points and spec: identical inputs give
//! byte-identical SVG.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("invalid render spec: {0}")]
    InvalidSpec(String),
}

/// Generation color ramp.
pub const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

#[derive(Debug, Clone)]
pub struct RenderSpec {
    /// `(xmin, xmax, ymin, ymax)`; `None` fits the point set padded by 5%.
    pub window: Option<(f64, f64, f64, f64)>,
    pub width_px: u32,
    pub height_px: u32,
    pub point_radius_px: f64,
    pub color_by_generation: bool,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            window: None,
            width_px: 800,
            height_px: 800,
            point_radius_px: 2.0,
            color_by_generation: true,
        }
    }
}

fn auto_window(points: &[(f64, f64, u32)]) -> (f64, f64, f64, f64) {
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for &(x, y, _) in points {
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    if points.is_empty() {
        return (-1.0, 1.0, -1.0, 1.0);
    }
    let pad = |lo: f64, hi: f64| {
        let span = hi - lo;
        let p = if span > 0.0 { span * 0.05 } else { 1.0 };
        (lo - p, hi + p)
    };
    let (x0, x1) = pad(xmin, xmax);
    let (y0, y1) = pad(ymin, ymax);
    (x0, x1, y0, y1)
}

/// Render `(x, y, generation)` points to an SVG document. Points outside
/// the window are simply not drawn.
pub fn render_svg(points: &[(f64, f64, u32)], spec: &RenderSpec) -> Result<String, RenderError> {
    if spec.width_px == 0 || spec.height_px == 0 {
        return Err(RenderError::InvalidSpec("zero-sized image".into()));
    }
    if !(spec.point_radius_px > 0.0) {
        return Err(RenderError::InvalidSpec("point radius must be positive".into()));
    }
    let (x0, x1, y0, y1) = match spec.window {
        Some(w) => w,
        None => auto_window(points),
    };
    if !(x1 > x0) || !(y1 > y0) {
        return Err(RenderError::InvalidSpec(format!(
            "empty window ({x0}, {x1}, {y0}, {y1})"
        )));
    }
    let (w, h) = (spec.width_px as f64, spec.height_px as f64);
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
        spec.width_px, spec.height_px, spec.width_px, spec.height_px
    ));
    svg.push_str(&format!(
        "<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
        spec.width_px, spec.height_px
    ));
    for &(x, y, g) in points {
        if x < x0 || x > x1 || y < y0 || y > y1 {
            continue;
        }
        let cx = (x - x0) / (x1 - x0) * w;
        let cy = h - (y - y0) / (y1 - y0) * h; // flip: y up
        let color = if spec.color_by_generation {
            PALETTE[(g as usize) % PALETTE.len()]
        } else {
            PALETTE[0]
        };
        svg.push_str(&format!(
            "<circle cx=\"{cx:.3}\" cy=\"{cy:.3}\" r=\"{:.3}\" fill=\"{color}\"/>\n",
            spec.point_radius_px
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
