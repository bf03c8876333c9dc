//! Static SVG plot: one panel per algorithm with the mean regret curve and
//! the band between the outermost quantile levels.

use std::fmt::Write;

use robust_moss::AlgorithmResult;

const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 300.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 28.0;
const MARGIN_B: f64 = 40.0;

/// Renders all algorithms in a two-column grid sharing one y scale.
pub fn render_svg(results: &[AlgorithmResult]) -> String {
    let cols = results.len().clamp(1, 2);
    let rows = results.len().div_ceil(2).max(1);
    let width = PANEL_W * cols as f64;
    let height = PANEL_H * rows as f64;
    let y_max = results
        .iter()
        .flat_map(|r| {
            r.stats
                .quantiles
                .last()
                .into_iter()
                .flatten()
                .chain(&r.stats.mean)
        })
        .copied()
        .fold(0.0f64, f64::max)
        .max(1e-12);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, result) in results.iter().enumerate() {
        let x0 = PANEL_W * (i % 2) as f64;
        let y0 = PANEL_H * (i / 2) as f64;
        panel(&mut svg, result, x0, y0, y_max);
    }
    svg.push_str("</svg>\n");
    svg
}

fn panel(svg: &mut String, result: &AlgorithmResult, x0: f64, y0: f64, y_max: f64) {
    let s = &result.stats;
    let t_max = *s.grid.last().unwrap_or(&1) as f64;
    let plot_w = PANEL_W - MARGIN_L - MARGIN_R;
    let plot_h = PANEL_H - MARGIN_T - MARGIN_B;
    let px = |t: usize| x0 + MARGIN_L + plot_w * t as f64 / t_max;
    let py = |r: f64| y0 + MARGIN_T + plot_h * (1.0 - r / y_max);

    let left = x0 + MARGIN_L;
    let bottom = y0 + MARGIN_T + plot_h;
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-weight="bold">{}</text>"#,
        left + plot_w / 2.0,
        y0 + 18.0,
        result.kind.name()
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{left:.1}" y="{:.1}" width="{plot_w:.1}" height="{plot_h:.1}" fill="none" stroke="black"/>"#,
        y0 + MARGIN_T
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text><text x="{:.1}" y="{:.1}" text-anchor="end">0</text>"#,
        left - 4.0,
        y0 + MARGIN_T + 4.0,
        tick(y_max),
        left - 4.0,
        bottom
    );
    let _ = writeln!(
        svg,
        r#"<text x="{left:.1}" y="{:.1}">0</text><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text><text x="{:.1}" y="{:.1}" text-anchor="middle">t</text>"#,
        bottom + 16.0,
        left + plot_w,
        bottom + 16.0,
        t_max,
        left + plot_w / 2.0,
        bottom + 30.0
    );

    if let (Some(lo), Some(hi)) = (s.quantiles.first(), s.quantiles.last()) {
        let mut points = String::new();
        for (t, r) in s.grid.iter().zip(hi) {
            let _ = write!(points, "{:.2},{:.2} ", px(*t), py(*r));
        }
        for (t, r) in s.grid.iter().zip(lo).rev() {
            let _ = write!(points, "{:.2},{:.2} ", px(*t), py(*r));
        }
        let _ = writeln!(
            svg,
            r##"<polygon points="{}" fill="#4c72b0" fill-opacity="0.25" stroke="none"/>"##,
            points.trim_end()
        );
    }
    let mut line = String::new();
    for (t, r) in s.grid.iter().zip(&s.mean) {
        let _ = write!(line, "{:.2},{:.2} ", px(*t), py(*r));
    }
    let _ = writeln!(
        svg,
        r##"<polyline points="{}" fill="none" stroke="#4c72b0" stroke-width="1.5"/>"##,
        line.trim_end()
    );
}

fn tick(x: f64) -> String {
    if x >= 1000.0 {
        format!("{x:.3e}")
    } else {
        format!("{x:.1}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use robust_moss::simulator::{aggregate, RegretTrace};
    use robust_moss::PolicyKind;

    #[test]
    fn renders_one_panel_per_algorithm() {
        let trace = RegretTrace {
            run_index: 0,
            grid: vec![1, 10, 100],
            cum_regret: vec![0.0, 2.0, 5.0],
            pull_counts: vec![50, 50],
        };
        let stats = aggregate(std::slice::from_ref(&trace), &[0.05, 0.95]).unwrap();
        let results: Vec<AlgorithmResult> = [
            PolicyKind::RobustMoss,
            PolicyKind::Moss,
            PolicyKind::RobustUcbTruncated,
        ]
        .into_iter()
        .map(|kind| AlgorithmResult {
            kind,
            stats: stats.clone(),
            traces: vec![trace.clone()],
        })
        .collect();
        let svg = render_svg(&results);
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert_eq!(svg.matches("<polygon").count(), 3);
        assert!(svg.contains(r#"height="600""#));
    }
}
