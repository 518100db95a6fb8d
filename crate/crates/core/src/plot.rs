//! Minimal SVG emission for the diagnostic figures: line charts with an
//! optional secondary axis, and scatter plots. No plotting framework; the
//! output is a deterministic string of line/circle/text primitives.

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 70.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

/// One plottable series: x positions and values.
pub struct Series<'a> {
    pub label: &'a str,
    pub x: &'a [f64],
    pub y: &'a [f64],
    pub color: &'a str,
}

struct Range {
    lo: f64,
    hi: f64,
}

impl Range {
    fn of(values: impl Iterator<Item = f64>) -> Range {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in values {
            if v.is_finite() {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        if !lo.is_finite() {
            lo = 0.0;
            hi = 1.0;
        }
        if lo == hi {
            lo -= 0.5;
            hi += 0.5;
        }
        Range { lo, hi }
    }

    fn pad(mut self, fraction: f64) -> Range {
        let pad = (self.hi - self.lo) * fraction;
        self.lo -= pad;
        self.hi += pad;
        self
    }

    fn scale(&self, v: f64, out_lo: f64, out_hi: f64) -> f64 {
        out_lo + (v - self.lo) / (self.hi - self.lo) * (out_hi - out_lo)
    }

    /// Round tick positions: step 1/2/5 x 10^k targeting ~6 ticks.
    fn ticks(&self) -> Vec<f64> {
        let span = self.hi - self.lo;
        let raw = span / 6.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0]
            .into_iter()
            .map(|m| m * mag)
            .find(|s| span / s <= 7.0)
            .unwrap_or(mag * 10.0);
        let mut t = (self.lo / step).ceil() * step;
        let mut out = Vec::new();
        while t <= self.hi + step * 1e-9 {
            out.push(t);
            t += step;
        }
        out
    }
}

fn fmt(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if a >= 10000.0 || a < 0.01 {
        format!("{v:.2e}")
    } else if a >= 100.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

fn header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{x}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"16\">{title}</text>\n",
        x = WIDTH / 2.0,
    )
}

fn axis_box() -> String {
    format!(
        "<rect x=\"{MARGIN_LEFT}\" y=\"{MARGIN_TOP}\" width=\"{w}\" height=\"{h}\" \
         fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n",
        w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
        h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM,
    )
}

fn polyline(xs: &[f64], ys: &[f64], xr: &Range, yr: &Range, color: &str) -> String {
    let points: Vec<String> = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            format!(
                "{:.2},{:.2}",
                xr.scale(x, MARGIN_LEFT, WIDTH - MARGIN_RIGHT),
                yr.scale(y, HEIGHT - MARGIN_BOTTOM, MARGIN_TOP)
            )
        })
        .collect();
    format!(
        "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1\" points=\"{}\"/>\n",
        points.join(" ")
    )
}

fn x_axis_labels(xr: &Range, x_label: &str) -> String {
    let mut out = String::new();
    for t in xr.ticks() {
        let px = xr.scale(t, MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
        out.push_str(&format!(
            "<line x1=\"{px:.2}\" y1=\"{y0}\" x2=\"{px:.2}\" y2=\"{y1}\" stroke=\"black\"/>\n\
             <text x=\"{px:.2}\" y=\"{ty}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
             font-size=\"11\">{}</text>\n",
            fmt(t),
            y0 = HEIGHT - MARGIN_BOTTOM,
            y1 = HEIGHT - MARGIN_BOTTOM + 5.0,
            ty = HEIGHT - MARGIN_BOTTOM + 18.0,
        ));
    }
    out.push_str(&format!(
        "<text x=\"{x}\" y=\"{y}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"13\">{x_label}</text>\n",
        x = WIDTH / 2.0,
        y = HEIGHT - 12.0,
    ));
    out
}

fn y_axis_labels(yr: &Range, label: &str, color: &str, right: bool) -> String {
    let mut out = String::new();
    let (edge, tick_end, text_x, anchor) = if right {
        (
            WIDTH - MARGIN_RIGHT,
            WIDTH - MARGIN_RIGHT + 5.0,
            WIDTH - MARGIN_RIGHT + 8.0,
            "start",
        )
    } else {
        (MARGIN_LEFT, MARGIN_LEFT - 5.0, MARGIN_LEFT - 8.0, "end")
    };
    for t in yr.ticks() {
        let py = yr.scale(t, HEIGHT - MARGIN_BOTTOM, MARGIN_TOP);
        out.push_str(&format!(
            "<line x1=\"{edge}\" y1=\"{py:.2}\" x2=\"{tick_end}\" y2=\"{py:.2}\" stroke=\"black\"/>\n\
             <text x=\"{text_x}\" y=\"{ty:.2}\" text-anchor=\"{anchor}\" font-family=\"sans-serif\" \
             font-size=\"11\" fill=\"{color}\">{}</text>\n",
            fmt(t),
            ty = py + 4.0,
        ));
    }
    let (lx, rot) = if right {
        (WIDTH - 16.0, format!("rotate(90 {} {})", WIDTH - 16.0, HEIGHT / 2.0))
    } else {
        (18.0, format!("rotate(-90 18 {})", HEIGHT / 2.0))
    };
    out.push_str(&format!(
        "<text x=\"{lx}\" y=\"{y}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"13\" fill=\"{color}\" transform=\"{rot}\">{label}</text>\n",
        y = HEIGHT / 2.0,
    ));
    out
}

/// Single-axis multi-series line chart.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let xr = Range::of(series.iter().flat_map(|s| s.x.iter().copied()));
    let yr = Range::of(series.iter().flat_map(|s| s.y.iter().copied())).pad(0.05);
    let mut svg = header(title);
    svg.push_str(&axis_box());
    svg.push_str(&x_axis_labels(&xr, x_label));
    svg.push_str(&y_axis_labels(&yr, y_label, "black", false));
    for (i, s) in series.iter().enumerate() {
        svg.push_str(&polyline(s.x, s.y, &xr, &yr, s.color));
        svg.push_str(&format!(
            "<text x=\"{x}\" y=\"{y}\" font-family=\"sans-serif\" font-size=\"12\" \
             fill=\"{}\">{}</text>\n",
            s.color,
            s.label,
            x = MARGIN_LEFT + 10.0,
            y = MARGIN_TOP + 16.0 + 16.0 * i as f64,
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Two series against independent left/right axes sharing the x axis
/// (daily GHI on the left, DNI on the right).
pub fn dual_axis_chart(
    title: &str,
    x_label: &str,
    left: &Series,
    right: &Series,
) -> String {
    let xr = Range::of(left.x.iter().chain(right.x).copied());
    let yl = Range::of(left.y.iter().copied()).pad(0.05);
    let yr = Range::of(right.y.iter().copied()).pad(0.05);
    let mut svg = header(title);
    svg.push_str(&axis_box());
    svg.push_str(&x_axis_labels(&xr, x_label));
    svg.push_str(&y_axis_labels(&yl, left.label, left.color, false));
    svg.push_str(&y_axis_labels(&yr, right.label, right.color, true));
    svg.push_str(&polyline(left.x, left.y, &xr, &yl, left.color));
    svg.push_str(&polyline(right.x, right.y, &xr, &yr, right.color));
    svg.push_str("</svg>\n");
    svg
}

/// Scatter plot with an optional y = x reference line.
pub fn scatter_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    points: &[(f64, f64)],
    identity_line: bool,
) -> String {
    let xr = Range::of(points.iter().map(|p| p.0)).pad(0.05);
    let yr = Range::of(points.iter().map(|p| p.1)).pad(0.05);
    let mut svg = header(title);
    svg.push_str(&axis_box());
    svg.push_str(&x_axis_labels(&xr, x_label));
    svg.push_str(&y_axis_labels(&yr, y_label, "black", false));
    if identity_line {
        let lo = xr.lo.max(yr.lo);
        let hi = xr.hi.min(yr.hi);
        if lo < hi {
            svg.push_str(&format!(
                "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" \
                 stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n",
                xr.scale(lo, MARGIN_LEFT, WIDTH - MARGIN_RIGHT),
                yr.scale(lo, HEIGHT - MARGIN_BOTTOM, MARGIN_TOP),
                xr.scale(hi, MARGIN_LEFT, WIDTH - MARGIN_RIGHT),
                yr.scale(hi, HEIGHT - MARGIN_BOTTOM, MARGIN_TOP),
            ));
        }
    }
    for &(x, y) in points {
        svg.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\" fill=\"steelblue\" fill-opacity=\"0.5\"/>\n",
            xr.scale(x, MARGIN_LEFT, WIDTH - MARGIN_RIGHT),
            yr.scale(y, HEIGHT - MARGIN_BOTTOM, MARGIN_TOP),
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
