//! Byte-deterministic SVG rendering of 1-D results: a function graph on
//! top, then one labelled horizontal band per set (sublevel set,
//! subdifferential interval, normal cone rays, ...). All coordinates are
//! formatted with fixed precision, so identical inputs produce identical
//! bytes.

use varcert::convexsets::RealSet1D;
use varcert::funcspace::FnModel;

const WIDTH: f64 = 640.0;
const MARGIN: f64 = 48.0;
const GRAPH_HEIGHT: f64 = 200.0;
const BAND_HEIGHT: f64 = 34.0;
const CURVE_SAMPLES: usize = 256;
const Y_CLAMP: f64 = 8.0;

/// One horizontal band: a labelled interval union drawn on the shared
/// x-axis. Unbounded components are clipped at the window edge and get
/// an arrowhead; the empty set renders as an annotated dashed band.
pub struct Band {
    pub label: String,
    pub set: RealSet1D,
}

pub struct Scene {
    /// Plot window on the x-axis.
    pub x_lo: f64,
    pub x_hi: f64,
    /// Function sampled on the window; gaps at non-finite values.
    pub curve: Option<Vec<(f64, f64)>>,
    pub bands: Vec<Band>,
    pub title: String,
}

impl Scene {
    pub fn new(title: &str, x_lo: f64, x_hi: f64) -> Self {
        Scene { x_lo, x_hi, curve: None, bands: Vec::new(), title: title.to_string() }
    }

    pub fn with_function(mut self, f: &FnModel) -> Self {
        let mut pts = Vec::with_capacity(CURVE_SAMPLES + 1);
        for i in 0..=CURVE_SAMPLES {
            let x = self.x_lo + (self.x_hi - self.x_lo) * i as f64 / CURVE_SAMPLES as f64;
            let y = f.eval_unchecked(&[x]);
            if y.is_finite() && y.abs() <= Y_CLAMP {
                pts.push((x, y));
            } else {
                pts.push((x, f64::NAN)); // break the polyline here
            }
        }
        self.curve = Some(pts);
        self
    }

    pub fn with_band(mut self, label: &str, set: RealSet1D) -> Self {
        self.bands.push(Band { label: label.to_string(), set });
        self
    }
}

fn fmt(v: f64) -> String {
    // Fixed precision keeps the output byte-stable across runs.
    format!("{v:.3}")
}

pub fn render_svg(scene: &Scene) -> String {
    let n_bands = scene.bands.len();
    let height = MARGIN + GRAPH_HEIGHT + 24.0 + n_bands as f64 * BAND_HEIGHT + MARGIN;
    let inner_w = WIDTH - 2.0 * MARGIN;
    let span = scene.x_hi - scene.x_lo;
    let sx = |x: f64| MARGIN + (x.clamp(scene.x_lo, scene.x_hi) - scene.x_lo) / span * inner_w;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" \
         viewBox=\"0 0 {} {}\">\n",
        fmt(WIDTH),
        fmt(height),
        fmt(WIDTH),
        fmt(height)
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"14\" \
         text-anchor=\"middle\">{}</text>\n",
        fmt(WIDTH / 2.0),
        fmt(MARGIN / 2.0),
        escape(&scene.title)
    ));

    // ----- function graph -------------------------------------------------
    let graph_bot = MARGIN + GRAPH_HEIGHT;
    if let Some(curve) = &scene.curve {
        let finite: Vec<f64> =
            curve.iter().filter(|(_, y)| y.is_finite()).map(|&(_, y)| y).collect();
        let (y_lo, y_hi) = if finite.is_empty() {
            (-1.0, 1.0)
        } else {
            let lo = finite.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = finite.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if (hi - lo).abs() < 1e-9 { (lo - 1.0, hi + 1.0) } else { (lo, hi) }
        };
        let sy = |y: f64| graph_bot - (y - y_lo) / (y_hi - y_lo) * GRAPH_HEIGHT;
        // zero line inside the graph when visible
        if y_lo <= 0.0 && y_hi >= 0.0 {
            svg.push_str(&format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#cccccc\"/>\n",
                fmt(MARGIN),
                fmt(sy(0.0)),
                fmt(WIDTH - MARGIN),
                fmt(sy(0.0))
            ));
        }
        let mut seg: Vec<String> = Vec::new();
        let flush = |seg: &mut Vec<String>, svg: &mut String| {
            if seg.len() >= 2 {
                svg.push_str(&format!(
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f3d7a\" \
                     stroke-width=\"1.5\"/>\n",
                    seg.join(" ")
                ));
            }
            seg.clear();
        };
        for &(x, y) in curve {
            if y.is_finite() {
                seg.push(format!("{},{}", fmt(sx(x)), fmt(sy(y))));
            } else {
                flush(&mut seg, &mut svg);
            }
        }
        flush(&mut seg, &mut svg);
    }
    svg.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        fmt(MARGIN),
        fmt(graph_bot),
        fmt(WIDTH - MARGIN),
        fmt(graph_bot)
    ));
    for (x, anchor) in [(scene.x_lo, "start"), (scene.x_hi, "end")] {
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" \
             text-anchor=\"{anchor}\">{}</text>\n",
            fmt(sx(x)),
            fmt(graph_bot + 14.0),
            escape(&format!("{x}"))
        ));
    }

    // ----- bands ----------------------------------------------------------
    for (i, band) in scene.bands.iter().enumerate() {
        let y = graph_bot + 24.0 + (i as f64 + 0.5) * BAND_HEIGHT;
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\">{}</text>\n",
            fmt(MARGIN),
            fmt(y - 8.0),
            escape(&format!("{}: {}", band.label, band.set))
        ));
        if band.set.is_empty() {
            svg.push_str(&format!(
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"6\" fill=\"none\" \
                 stroke=\"#aa3333\" stroke-dasharray=\"4 3\"/>\n",
                fmt(MARGIN),
                fmt(y - 3.0),
                fmt(inner_w)
            ));
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"10\" \
                 fill=\"#aa3333\" text-anchor=\"middle\">empty</text>\n",
                fmt(WIDTH / 2.0),
                fmt(y + 3.0)
            ));
            continue;
        }
        for iv in band.set.intervals() {
            let left_unbounded = iv.lo == f64::NEG_INFINITY || iv.lo < scene.x_lo;
            let right_unbounded = iv.hi == f64::INFINITY || iv.hi > scene.x_hi;
            let x1 = sx(iv.lo.max(scene.x_lo));
            let x2 = sx(iv.hi.min(scene.x_hi));
            if iv.lo == iv.hi {
                svg.push_str(&format!(
                    "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"#2a7a2a\"/>\n",
                    fmt(x1),
                    fmt(y)
                ));
                continue;
            }
            svg.push_str(&format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#2a7a2a\" \
                 stroke-width=\"4\"/>\n",
                fmt(x1),
                fmt(y),
                fmt(x2),
                fmt(y)
            ));
            if left_unbounded {
                svg.push_str(&arrow(x1, y, -1.0));
            } else {
                svg.push_str(&endpoint(x1, y, iv.lo_closed));
            }
            if right_unbounded {
                svg.push_str(&arrow(x2, y, 1.0));
            } else {
                svg.push_str(&endpoint(x2, y, iv.hi_closed));
            }
        }
    }

    svg.push_str("</svg>\n");
    svg
}

fn arrow(x: f64, y: f64, dir: f64) -> String {
    let tip = x + dir * 8.0;
    format!(
        "<path d=\"M {} {} L {} {} L {} {} Z\" fill=\"#2a7a2a\"/>\n",
        fmt(tip),
        fmt(y),
        fmt(x),
        fmt(y - 4.0),
        fmt(x),
        fmt(y + 4.0)
    )
}

fn endpoint(x: f64, y: f64, closed: bool) -> String {
    if closed {
        format!("<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"#2a7a2a\"/>\n", fmt(x), fmt(y))
    } else {
        format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"white\" stroke=\"#2a7a2a\"/>\n",
            fmt(x),
            fmt(y)
        )
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
