use std::fmt::Write as _;

use crate::error::Result;
use crate::spin::Spin;

use super::Simulation;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;

/// Static SVG of the target flip probability against time, one polyline per
/// control pattern. The selected branch is drawn in red, the rest in blue.
pub fn probability_svg(sim: &Simulation, target: usize, title: &str) -> Result<String> {
    let report = &sim.report;
    let duration = report.duration;
    let (w, h) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
    let x = |t: f64| MARGIN + w * t / duration;
    let y = |p: f64| MARGIN + h * (1.0 - p);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{w}" height="{h}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        MARGIN / 2.0,
        escape(title)
    );
    for k in 0..=4 {
        let p = k as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{:.1}" text-anchor="end">{p:.2}</text>"#,
            MARGIN - 6.0,
            y(p) + 4.0
        );
        let t = duration * p;
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{}" text-anchor="middle">{:.3}</text>"#,
            x(t),
            HEIGHT - MARGIN + 18.0,
            t * 1e3
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">t (ms)</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">P(target flipped)</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );

    // Draw the selected branch last so it stays visible.
    let mut order: Vec<_> = sim.trajectories.iter().collect();
    order.sort_by_key(|(p, _)| *p == report.selected);
    for (pattern, traj) in order {
        let on = *pattern == report.selected;
        let mut points = String::new();
        for (t, p_plus, p_minus, _) in traj.target_series(target)? {
            let flipped = match report.initial_target {
                Spin::Plus => p_minus,
                Spin::Minus => p_plus,
            };
            let _ = write!(points, "{:.2},{:.2} ", x(t), y(flipped));
        }
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{}" stroke-width="{}" points="{}"><title>{}</title></polyline>"#,
            if on { "#c0392b" } else { "#2e6da4" },
            if on { 2.0 } else { 1.0 },
            points.trim_end(),
            escape(&pattern.ket())
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
