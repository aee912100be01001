//! Static outlier map: score distance against orthogonal distance with the
//! two cutoff lines.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;

pub fn outlier_map(sd: &[f64], od: &[f64], flags: &[bool], cutoff_sd: f64, cutoff_od: f64, title: &str) -> String {
    let max_sd = sd.iter().copied().fold(cutoff_sd, f64::max).max(1e-12) * 1.05;
    let max_od = od.iter().copied().fold(cutoff_od, f64::max).max(1e-12) * 1.05;
    let x = |v: f64| MARGIN + v / max_sd * (WIDTH - 2.0 * MARGIN);
    let y = |v: f64| HEIGHT - MARGIN - v / max_od * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    // Axes.
    let (x0, y0, x1, y1) = (MARGIN, HEIGHT - MARGIN, WIDTH - MARGIN, MARGIN);
    let _ = writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#);
    let _ = writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13">score distance (max {max_sd:.3})</text>"#,
        WIDTH / 2.0,
        HEIGHT - 16.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 18 {})">orthogonal distance (max {max_od:.3})</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    // Cutoffs.
    let _ = writeln!(
        s,
        r#"<line x1="{cx}" y1="{y0}" x2="{cx}" y2="{y1}" stroke="gray" stroke-dasharray="4 3"/>"#,
        cx = x(cutoff_sd)
    );
    let _ = writeln!(
        s,
        r#"<line x1="{x0}" y1="{cy}" x2="{x1}" y2="{cy}" stroke="gray" stroke-dasharray="4 3"/>"#,
        cy = y(cutoff_od)
    );
    for ((&a, &b), &flag) in sd.iter().zip(od).zip(flags) {
        let color = if flag { "#c0392b" } else { "#2c3e50" };
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, x(a), y(b));
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
