use std::fmt::Write;

use super::ProfilePoint;

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 52.0;

/// Line chart of a hazard ratio profile: true curve solid, fitted dashed.
pub fn profile_svg(title: &str, profile: &[ProfilePoint]) -> String {
    let t_max = profile.iter().map(|p| p.t).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let (mut lo, mut hi) = profile
        .iter()
        .flat_map(|p| [p.hr_true, p.hr_ll])
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if lo.is_nan() || hi.is_nan() || lo > hi {
        (lo, hi) = (0.0, 1.0);
    }
    let pad = ((hi - lo) * 0.05).max(0.05);
    let (lo, hi) = (lo - pad, hi + pad);

    let x = |t: f64| LEFT + (W - LEFT - RIGHT) * t / t_max;
    let y = |v: f64| TOP + (H - TOP - BOTTOM) * (hi - v) / (hi - lo);
    let path = |f: &dyn Fn(&ProfilePoint) -> f64| {
        let mut d = String::new();
        for (i, p) in profile.iter().enumerate() {
            let _ = write!(d, "{}{:.2},{:.2}", if i == 0 { "M" } else { " L" }, x(p.t), y(f(p)));
        }
        d
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        W / 2.0,
        escape(title)
    );

    let (x0, x1, y0, y1) = (LEFT, W - RIGHT, TOP, H - BOTTOM);
    let _ = writeln!(
        s,
        r#"<path d="M{x0},{y0} L{x0},{y1} L{x1},{y1}" fill="none" stroke="black"/>"#
    );
    for i in 0..=5 {
        let t = t_max * f64::from(i) / 5.0;
        let _ = writeln!(
            s,
            r#"<line x1="{0:.2}" y1="{y1}" x2="{0:.2}" y2="{1}" stroke="black"/><text x="{0:.2}" y="{2}" text-anchor="middle">{3:.2}</text>"#,
            x(t),
            y1 + 5.0,
            y1 + 18.0,
            t
        );
        let v = lo + (hi - lo) * f64::from(i) / 5.0;
        let _ = writeln!(
            s,
            r#"<line x1="{0}" y1="{1:.2}" x2="{x0}" y2="{1:.2}" stroke="black"/><text x="{2}" y="{3:.2}" text-anchor="end">{4:.2}</text>"#,
            x0 - 5.0,
            y(v),
            x0 - 8.0,
            y(v) + 4.0,
            v
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">time</text>"#,
        (x0 + x1) / 2.0,
        H - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">hazard ratio</text>"#,
        (y0 + y1) / 2.0
    );

    let _ = writeln!(
        s,
        r#"<path d="{}" fill="none" stroke="black" stroke-width="2"/>"#,
        path(&|p| p.hr_true)
    );
    let _ = writeln!(
        s,
        r#"<path d="{}" fill="none" stroke="firebrick" stroke-width="2" stroke-dasharray="6 4"/>"#,
        path(&|p| p.hr_ll)
    );

    let lx = x1 - 150.0;
    let _ = writeln!(
        s,
        r#"<line x1="{lx}" y1="{0}" x2="{1}" y2="{0}" stroke="black" stroke-width="2"/><text x="{2}" y="{3}">true HR</text>"#,
        y0 + 10.0,
        lx + 30.0,
        lx + 36.0,
        y0 + 14.0
    );
    let _ = writeln!(
        s,
        r#"<line x1="{lx}" y1="{0}" x2="{1}" y2="{0}" stroke="firebrick" stroke-width="2" stroke-dasharray="6 4"/><text x="{2}" y="{3}">weighted HR fit</text>"#,
        y0 + 28.0,
        lx + 30.0,
        lx + 36.0,
        y0 + 32.0
    );
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
