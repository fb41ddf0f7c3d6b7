//! Self-contained SVG overlay of the final profile against the translator,
//! emitted as direct markup (two polylines, axes box, legend).

use minkflow::{Grid, State, TranslatorProfile};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN: f64 = 55.0;

pub fn render_overlay(grid: &Grid, state: &State, translator: &TranslatorProfile) -> String {
    // Align the translator with the state by the optimal vertical shift,
    // the midpoint of the range of u - φ.
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (u, phi) in state.u.iter().zip(&translator.samples) {
        let w = u - phi;
        lo = lo.min(w);
        hi = hi.max(w);
    }
    let shift = 0.5 * (lo + hi);
    let shifted: Vec<f64> = translator.samples.iter().map(|p| p + shift).collect();

    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for v in state.u.iter().chain(&shifted) {
        y_min = y_min.min(*v);
        y_max = y_max.max(*v);
    }
    if y_max - y_min < 1e-12 {
        y_min -= 0.5;
        y_max += 0.5;
    }
    let pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;

    let x_of = |x: f64| MARGIN + (x + grid.d()) / grid.length() * (WIDTH - 2.0 * MARGIN);
    let y_of = |y: f64| HEIGHT - MARGIN - (y - y_min) / (y_max - y_min) * (HEIGHT - 2.0 * MARGIN);
    let points = |values: &[f64]| -> String {
        values
            .iter()
            .enumerate()
            .map(|(i, v)| format!("{:.2},{:.2}", x_of(grid.node(i)), y_of(*v)))
            .collect::<Vec<_>>()
            .join(" ")
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n",
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    ));
    // Axis annotations: the two x endpoints and the y range.
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
        x_of(-grid.d()),
        HEIGHT - MARGIN + 22.0,
        -grid.d()
    ));
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
        x_of(grid.d()),
        HEIGHT - MARGIN + 22.0,
        grid.d()
    ));
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"end\">{:.4}</text>\n",
        MARGIN - 6.0,
        y_of(y_min),
        y_min
    ));
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"end\">{:.4}</text>\n",
        MARGIN - 6.0,
        y_of(y_max) + 4.0,
        y_max
    ));
    svg.push_str(&format!(
        "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"{}\"/>\n",
        points(&state.u)
    ));
    svg.push_str(&format!(
        "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\" points=\"{}\"/>\n",
        points(&shifted)
    ));
    // Legend.
    svg.push_str(&format!(
        "<line x1=\"{}\" y1=\"20\" x2=\"{}\" y2=\"20\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n",
        MARGIN,
        MARGIN + 30.0
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-size=\"13\">u(x, t = {})</text>\n",
        MARGIN + 38.0,
        state.t
    ));
    svg.push_str(&format!(
        "<line x1=\"{}\" y1=\"40\" x2=\"{}\" y2=\"40\" stroke=\"#d62728\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>\n",
        MARGIN,
        MARGIN + 30.0
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"44\" font-size=\"13\">translator (speed {:.6}, shifted by {:.4})</text>\n",
        MARGIN + 38.0,
        translator.speed,
        shift
    ));
    svg.push_str("</svg>\n");
    svg
}
