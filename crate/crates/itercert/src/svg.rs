//! Minimal static SVG line plots of trade-off curves. Pure presentation:
//! rendering never feeds back into any numeric output.

use std::fs;
use std::path::Path;

use itercert_core::scenario::TradeoffPoint;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 20.0;
const MARGIN_B: f64 = 55.0;

struct Axis {
    min: f64,
    max: f64,
}

impl Axis {
    fn from_values(values: impl Iterator<Item = f64>) -> Self {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for v in values {
            min = min.min(v);
            max = max.max(v);
        }
        if !min.is_finite() || !max.is_finite() {
            return Self { min: 0.0, max: 1.0 };
        }
        if min == max {
            // degenerate span: pad symmetrically
            return Self { min: min - 0.5, max: max + 0.5 };
        }
        let pad = 0.03 * (max - min);
        Self { min: min - pad, max: max + pad }
    }

    fn ticks(&self, n: usize) -> Vec<f64> {
        (0..=n)
            .map(|i| self.min + (self.max - self.min) * i as f64 / n as f64)
            .collect()
    }
}

fn sx(axis: &Axis, v: f64) -> f64 {
    MARGIN_L + (v - axis.min) / (axis.max - axis.min) * (WIDTH - MARGIN_L - MARGIN_R)
}

fn sy(axis: &Axis, v: f64) -> f64 {
    HEIGHT - MARGIN_B - (v - axis.min) / (axis.max - axis.min) * (HEIGHT - MARGIN_T - MARGIN_B)
}

fn polyline(out: &mut String, pts: &[(f64, f64)], color: &str, dashed: bool) {
    if pts.is_empty() {
        return;
    }
    let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let dash = if dashed { " stroke-dasharray=\"6,4\"" } else { "" };
    out.push_str(&format!(
        "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"{dash} points=\"{}\"/>\n",
        coords.join(" ")
    ));
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if (1e-3..1e5).contains(&a) {
        format!("{v:.4}")
    } else {
        format!("{v:.2e}")
    }
}

/// Renders the certified bound, the optional lower bound and the empirical
/// violation against the learned decision value.
pub fn render_tradeoff(path: &Path, points: &[TradeoffPoint], title: &str) -> std::io::Result<()> {
    let mut sorted: Vec<&TradeoffPoint> = points.iter().collect();
    sorted.sort_by(|a, b| a.y_value.total_cmp(&b.y_value));

    let x_axis = Axis::from_values(sorted.iter().map(|p| p.y_value));
    let y_axis = Axis::from_values(
        sorted
            .iter()
            .flat_map(|p| [p.epsilon, p.empirical_violation].into_iter())
            .chain(sorted.iter().filter_map(|p| p.epsilon_lower)),
    );

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str("  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "  <text x=\"{}\" y=\"14\" font-family=\"sans-serif\" font-size=\"13\">{title}</text>\n",
        MARGIN_L
    ));

    // axes
    out.push_str(&format!(
        "  <line x1=\"{MARGIN_L}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"black\"/>\n",
        HEIGHT - MARGIN_B,
        WIDTH - MARGIN_R
    ));
    out.push_str(&format!(
        "  <line x1=\"{MARGIN_L}\" y1=\"{MARGIN_T}\" x2=\"{MARGIN_L}\" y2=\"{}\" stroke=\"black\"/>\n",
        HEIGHT - MARGIN_B
    ));
    for t in x_axis.ticks(6) {
        let x = sx(&x_axis, t);
        out.push_str(&format!(
            "  <line x1=\"{x:.2}\" y1=\"{0}\" x2=\"{x:.2}\" y2=\"{1}\" stroke=\"black\"/>\n",
            HEIGHT - MARGIN_B,
            HEIGHT - MARGIN_B + 5.0
        ));
        out.push_str(&format!(
            "  <text x=\"{x:.2}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            HEIGHT - MARGIN_B + 18.0,
            tick_label(t)
        ));
    }
    for t in y_axis.ticks(5) {
        let y = sy(&y_axis, t);
        out.push_str(&format!(
            "  <line x1=\"{0}\" y1=\"{y:.2}\" x2=\"{MARGIN_L}\" y2=\"{y:.2}\" stroke=\"black\"/>\n",
            MARGIN_L - 5.0
        ));
        out.push_str(&format!(
            "  <text x=\"{}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
            MARGIN_L - 8.0,
            y + 4.0,
            tick_label(t)
        ));
    }
    out.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">decision value</text>\n",
        MARGIN_L + (WIDTH - MARGIN_L - MARGIN_R) / 2.0,
        HEIGHT - 12.0
    ));
    out.push_str(&format!(
        "  <text x=\"16\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {0})\">probability</text>\n",
        MARGIN_T + (HEIGHT - MARGIN_T - MARGIN_B) / 2.0
    ));

    let eps: Vec<(f64, f64)> =
        sorted.iter().map(|p| (sx(&x_axis, p.y_value), sy(&y_axis, p.epsilon))).collect();
    polyline(&mut out, &eps, "#d62728", false);
    let violation: Vec<(f64, f64)> = sorted
        .iter()
        .map(|p| (sx(&x_axis, p.y_value), sy(&y_axis, p.empirical_violation)))
        .collect();
    polyline(&mut out, &violation, "#ff9900", false);
    let lower: Vec<(f64, f64)> = sorted
        .iter()
        .filter_map(|p| p.epsilon_lower.map(|e| (sx(&x_axis, p.y_value), sy(&y_axis, e))))
        .collect();
    polyline(&mut out, &lower, "#1f77b4", true);

    // legend
    let legend = [
        ("certified bound", "#d62728"),
        ("empirical violation", "#ff9900"),
        ("lower bound", "#1f77b4"),
    ];
    for (i, (label, color)) in legend.iter().enumerate() {
        let y = MARGIN_T + 16.0 * i as f64 + 10.0;
        out.push_str(&format!(
            "  <line x1=\"{0}\" y1=\"{y:.1}\" x2=\"{1}\" y2=\"{y:.1}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            WIDTH - 190.0,
            WIDTH - 160.0
        ));
        out.push_str(&format!(
            "  <text x=\"{}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\">{label}</text>\n",
            WIDTH - 152.0,
            y + 4.0
        ));
    }

    out.push_str("</svg>\n");
    fs::write(path, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn renders_wellformed_svg() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("curve.svg");
        let points = vec![
            TradeoffPoint {
                control: 0.002,
                y_value: 100.0,
                q_star: 40,
                s_star: Some(41),
                epsilon: 0.3,
                epsilon_lower: Some(0.1),
                empirical_violation: 0.2,
            },
            TradeoffPoint {
                control: 1.0,
                y_value: 900.0,
                q_star: 0,
                s_star: Some(1),
                epsilon: 0.01,
                epsilon_lower: None,
                empirical_violation: 0.0,
            },
        ];
        render_tradeoff(&path, &points, "trade-off").unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("<svg"));
        assert!(text.contains("polyline"));
        assert!(text.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn single_point_does_not_degenerate() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("one.svg");
        let points = vec![TradeoffPoint {
            control: 1.0,
            y_value: 5.0,
            q_star: 0,
            s_star: None,
            epsilon: 0.5,
            epsilon_lower: None,
            empirical_violation: 0.5,
        }];
        render_tradeoff(&path, &points, "single").unwrap();
        assert!(fs::read_to_string(&path).unwrap().contains("</svg>"));
    }
}
