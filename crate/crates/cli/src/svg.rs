//! Minimal static SVG 1.1 renderer for the figure artifacts.
//!
//! Output is a plain data rendering: a framed plot area with linear axes,
//! tick labels, and primitives for scatter points, polylines, and box
//! glyphs. Everything is emitted with fixed-precision coordinates so a
//! rerun produces byte-identical files.

/// A single-panel figure with linear axes.
pub struct Figure {
    width: f64,
    height: f64,
    margin_left: f64,
    margin_bottom: f64,
    margin_top: f64,
    margin_right: f64,
    x_range: (f64, f64),
    y_range: (f64, f64),
    body: String,
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

fn esc(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Figure {
    pub fn new(
        title: &str,
        x_label: &str,
        y_label: &str,
        x_range: (f64, f64),
        y_range: (f64, f64),
    ) -> Figure {
        let mut fig = Figure {
            width: 640.0,
            height: 480.0,
            margin_left: 70.0,
            margin_bottom: 55.0,
            margin_top: 40.0,
            margin_right: 20.0,
            x_range: pad_range(x_range),
            y_range: pad_range(y_range),
            body: String::new(),
        };
        fig.frame(title, x_label, y_label);
        fig
    }

    fn plot_width(&self) -> f64 {
        self.width - self.margin_left - self.margin_right
    }

    fn plot_height(&self) -> f64 {
        self.height - self.margin_top - self.margin_bottom
    }

    fn x_px(&self, x: f64) -> f64 {
        let (lo, hi) = self.x_range;
        self.margin_left + (x - lo) / (hi - lo) * self.plot_width()
    }

    fn y_px(&self, y: f64) -> f64 {
        let (lo, hi) = self.y_range;
        self.height - self.margin_bottom - (y - lo) / (hi - lo) * self.plot_height()
    }

    fn frame(&mut self, title: &str, x_label: &str, y_label: &str) {
        let (x0, x1) = (self.margin_left, self.width - self.margin_right);
        let (y0, y1) = (self.height - self.margin_bottom, self.margin_top);
        self.body.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" \
             stroke=\"#333333\" stroke-width=\"1\"/>\n",
            fmt(x0),
            fmt(y1),
            fmt(x1 - x0),
            fmt(y0 - y1)
        ));
        self.body.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"16\" text-anchor=\"middle\" \
             font-family=\"sans-serif\">{}</text>\n",
            fmt((x0 + x1) / 2.0),
            fmt(self.margin_top - 14.0),
            esc(title)
        ));
        self.body.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" \
             font-family=\"sans-serif\">{}</text>\n",
            fmt((x0 + x1) / 2.0),
            fmt(self.height - 12.0),
            esc(x_label)
        ));
        self.body.push_str(&format!(
            "<text x=\"16\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" \
             font-family=\"sans-serif\" transform=\"rotate(-90 16 {})\">{}</text>\n",
            fmt((y0 + y1) / 2.0),
            fmt((y0 + y1) / 2.0),
            esc(y_label)
        ));
        let x_ticks: Vec<(f64, f64)> =
            axis_ticks(self.x_range).into_iter().map(|v| (v, self.x_px(v))).collect();
        for (value, px) in x_ticks {
            self.body.push_str(&format!(
                "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#333333\" \
                 stroke-width=\"1\"/>\n",
                fmt(px),
                fmt(y0),
                fmt(y0 + 5.0)
            ));
            self.body.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\" \
                 font-family=\"sans-serif\">{}</text>\n",
                fmt(px),
                fmt(y0 + 18.0),
                tick_label(value)
            ));
        }
        let y_ticks: Vec<(f64, f64)> =
            axis_ticks(self.y_range).into_iter().map(|v| (v, self.y_px(v))).collect();
        for (value, py) in y_ticks {
            self.body.push_str(&format!(
                "<line x1=\"{1}\" y1=\"{0}\" x2=\"{2}\" y2=\"{0}\" stroke=\"#333333\" \
                 stroke-width=\"1\"/>\n",
                fmt(py),
                fmt(x0 - 5.0),
                fmt(x0)
            ));
            self.body.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\" \
                 font-family=\"sans-serif\">{}</text>\n",
                fmt(x0 - 8.0),
                fmt(py + 4.0),
                tick_label(value)
            ));
        }
    }

    pub fn line(&mut self, from: (f64, f64), to: (f64, f64), stroke: &str, width: f64) {
        self.body.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" \
             stroke-width=\"{}\"/>\n",
            fmt(self.x_px(from.0)),
            fmt(self.y_px(from.1)),
            fmt(self.x_px(to.0)),
            fmt(self.y_px(to.1)),
            stroke,
            fmt(width)
        ));
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], stroke: &str, width: f64) {
        if points.len() < 2 {
            return;
        }
        let coords: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{},{}", fmt(self.x_px(x)), fmt(self.y_px(y))))
            .collect();
        self.body.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"/>\n",
            coords.join(" "),
            stroke,
            fmt(width)
        ));
    }

    pub fn circles(&mut self, points: &[(f64, f64)], radius: f64, fill: &str, opacity: f64) {
        for &(x, y) in points {
            self.body.push_str(&format!(
                "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\" fill-opacity=\"{}\"/>\n",
                fmt(self.x_px(x)),
                fmt(self.y_px(y)),
                fmt(radius),
                fill,
                fmt(opacity)
            ));
        }
    }

    /// Box glyph at `x`: a quartile box with a median bar and whiskers.
    pub fn box_glyph(&mut self, x: f64, summary: &BoxSummary, half_width: f64, stroke: &str) {
        let (xl, xr) = (self.x_px(x - half_width), self.x_px(x + half_width));
        let xc = self.x_px(x);
        let box_top = self.y_px(summary.q3);
        let box_bottom = self.y_px(summary.q1);
        self.body.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" \
             stroke=\"{}\" stroke-width=\"1.5\"/>\n",
            fmt(xl),
            fmt(box_top),
            fmt(xr - xl),
            fmt(box_bottom - box_top),
            stroke
        ));
        for (y, x1, x2) in [
            (summary.median, xl, xr),
            (summary.low, (xl + xc) / 2.0, (xr + xc) / 2.0),
            (summary.high, (xl + xc) / 2.0, (xr + xc) / 2.0),
        ] {
            self.body.push_str(&format!(
                "<line x1=\"{0}\" y1=\"{2}\" x2=\"{1}\" y2=\"{2}\" stroke=\"{3}\" \
                 stroke-width=\"1.5\"/>\n",
                fmt(x1),
                fmt(x2),
                fmt(self.y_px(y)),
                stroke
            ));
        }
        for y in [summary.low, summary.high] {
            let near = if y <= summary.q1 { summary.q1 } else { summary.q3 };
            self.body.push_str(&format!(
                "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"{3}\" \
                 stroke-width=\"1\"/>\n",
                fmt(xc),
                fmt(self.y_px(y)),
                fmt(self.y_px(near)),
                stroke
            ));
        }
    }

    pub fn render(&self) -> String {
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
             <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
             width=\"{}\" height=\"{}\" viewBox=\"0 0 {0} {1}\">\n\
             <rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n{}</svg>\n",
            fmt(self.width),
            fmt(self.height),
            self.body
        )
    }
}

/// Five-number summary backing a box glyph.
#[derive(Debug, Clone, Copy)]
pub struct BoxSummary {
    pub low: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub high: f64,
}

impl BoxSummary {
    /// Quartile box with whiskers at the 5th and 95th percentiles.
    pub fn from_values(values: &[f64]) -> Option<BoxSummary> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Some(BoxSummary {
            low: quantile(&sorted, 0.05),
            q1: quantile(&sorted, 0.25),
            median: quantile(&sorted, 0.5),
            q3: quantile(&sorted, 0.75),
            high: quantile(&sorted, 0.95),
        })
    }
}

/// Linear-interpolation quantile of an ascending slice.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Widens a data range by 5% on each side; degenerate ranges get a unit pad.
fn pad_range((lo, hi): (f64, f64)) -> (f64, f64) {
    if !(hi > lo) {
        return (lo - 0.5, lo + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

/// Five evenly spaced axis ticks.
fn axis_ticks((lo, hi): (f64, f64)) -> Vec<f64> {
    (0..5).map(|i| lo + (hi - lo) * i as f64 / 4.0).collect()
}

fn tick_label(value: f64) -> String {
    if value == 0.0 {
        return "0".into();
    }
    let magnitude = value.abs();
    if (0.01..10_000.0).contains(&magnitude) {
        format!("{value:.2}")
    } else {
        format!("{value:.1e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_is_deterministic_and_well_formed() {
        let build = || {
            let mut fig = Figure::new("t", "x", "y", (0.0, 1.0), (0.0, 2.0));
            fig.circles(&[(0.1, 0.5), (0.9, 1.5)], 3.0, "#1f77b4", 0.7);
            fig.polyline(&[(0.0, 0.0), (0.5, 1.0), (1.0, 2.0)], "#d62728", 2.0);
            fig.line((0.0, 0.0), (1.0, 1.0), "#777777", 1.0);
            let summary =
                BoxSummary::from_values(&[0.2, 0.4, 0.6, 0.8, 1.0, 1.2]).unwrap();
            fig.box_glyph(0.5, &summary, 0.05, "#2ca02c");
            fig.render()
        };
        let a = build();
        let b = build();
        assert_eq!(a, b);
        assert!(a.starts_with("<?xml"));
        assert!(a.contains("version=\"1.1\""));
        assert!(a.ends_with("</svg>\n"));
        // Every opened element is closed (all primitives self-close).
        assert_eq!(a.matches("<svg").count(), 1);
        assert_eq!(a.matches("</svg>").count(), 1);
    }

    #[test]
    fn box_summary_orders_quantiles() {
        let s = BoxSummary::from_values(&[5.0, 1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!(s.low <= s.q1 && s.q1 <= s.median);
        assert!(s.median <= s.q3 && s.q3 <= s.high);
        assert_eq!(s.median, 3.0);
        assert!(BoxSummary::from_values(&[]).is_none());
    }
}
