//! Minimal SVG charts. Coordinates are printed with fixed precision so
//! identical inputs give identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::hand::GraspType;
use crate::synergy::{ForceMassModel, RadarProfile};

const W: f64 = 640.0;
const H: f64 = 480.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

pub fn grasp_color(g: GraspType) -> &'static str {
    let i = GraspType::ALL.iter().position(|&x| x == g).unwrap_or(0);
    PALETTE[i % PALETTE.len()]
}

pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn open(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    s
}

fn close(mut s: String) -> String {
    s.push_str("</svg>\n");
    s
}

fn text(s: &mut String, x: f64, y: f64, anchor: &str, body: &str) {
    let _ = writeln!(s, r#"<text x="{x:.2}" y="{y:.2}" text-anchor="{anchor}">{}</text>"#, escape(body));
}

fn line(s: &mut String, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str) {
    let _ = writeln!(
        s,
        r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}"/>"#
    );
}

fn polyline(s: &mut String, pts: &[(f64, f64)], stroke: &str, closed: bool) {
    let p: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let tag = if closed { "polygon" } else { "polyline" };
    let _ = writeln!(
        s,
        r#"<{tag} points="{}" fill="none" stroke="{stroke}" stroke-width="1.5"/>"#,
        p.join(" ")
    );
}

fn legend(s: &mut String, entries: &[(String, &str)]) {
    for (i, (label, color)) in entries.iter().enumerate() {
        let y = 44.0 + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{:.1}" y="{:.1}" width="10" height="10" fill="{color}"/>"#,
            W - 130.0,
            y - 9.0
        );
        text(s, W - 115.0, y, "start", label);
    }
}

/// Nice upper bound for an axis.
fn axis_max(v: f64) -> f64 {
    if !(v > 0.0) {
        return 1.0;
    }
    let mag = 10f64.powf(v.log10().floor());
    for m in [1.0, 2.0, 2.5, 5.0, 10.0] {
        if m * mag >= v {
            return m * mag;
        }
    }
    10.0 * mag
}

/// Overlaid radar polygons, one per profile. All profiles must share spokes.
pub fn radar_svg(title: &str, profiles: &[&RadarProfile]) -> String {
    let mut s = open(title);
    let Some(first) = profiles.first() else {
        return close(s);
    };
    let n = first.spokes.len();
    let (cx, cy, r0) = (250.0, 255.0, 185.0);
    let rmax = axis_max(
        profiles
            .iter()
            .flat_map(|p| p.spokes.iter().map(|k| k.radius))
            .fold(0.0, f64::max),
    );
    let angle = |i: usize| -std::f64::consts::FRAC_PI_2 + std::f64::consts::TAU * i as f64 / n as f64;
    for ring in 1..=4 {
        let rr = r0 * ring as f64 / 4.0;
        let pts: Vec<(f64, f64)> = (0..n).map(|i| (cx + rr * angle(i).cos(), cy + rr * angle(i).sin())).collect();
        polyline(&mut s, &pts, "#dddddd", true);
        text(&mut s, cx + 3.0, cy - rr, "start", &format!("{:.3}", rmax * ring as f64 / 4.0));
    }
    for (i, spoke) in first.spokes.iter().enumerate() {
        let (c, sn) = (angle(i).cos(), angle(i).sin());
        line(&mut s, cx, cy, cx + r0 * c, cy + r0 * sn, "#bbbbbb");
        text(&mut s, cx + (r0 + 14.0) * c, cy + (r0 + 14.0) * sn + 4.0, "middle", &spoke.label);
    }
    let mut entries = Vec::new();
    for p in profiles {
        let color = grasp_color(p.grasp_type);
        let pts: Vec<(f64, f64)> = p
            .spokes
            .iter()
            .enumerate()
            .map(|(i, k)| {
                let rr = r0 * k.radius / rmax;
                (cx + rr * angle(i).cos(), cy + rr * angle(i).sin())
            })
            .collect();
        polyline(&mut s, &pts, color, true);
        entries.push((p.grasp_type.code().to_string(), color));
    }
    legend(&mut s, &entries);
    close(s)
}

/// Explained-variance bars with the cumulative curve and the elbow marked.
pub fn scree_svg(title: &str, explained: &[f64], elbow: usize) -> String {
    let mut s = open(title);
    let (x0, y0, pw, ph) = (60.0, 420.0, 520.0, 360.0);
    line(&mut s, x0, y0, x0 + pw, y0, "black");
    line(&mut s, x0, y0, x0, y0 - ph, "black");
    for t in 0..=4 {
        let f = t as f64 / 4.0;
        text(&mut s, x0 - 6.0, y0 - ph * f + 4.0, "end", &format!("{:.0}%", 100.0 * f));
    }
    let n = explained.len().max(1);
    let bw = pw / n as f64;
    let mut cum = 0.0;
    let mut curve = Vec::new();
    for (i, e) in explained.iter().enumerate() {
        let x = x0 + bw * i as f64;
        let _ = writeln!(
            s,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#4c78a8"/>"##,
            x + bw * 0.15,
            y0 - ph * e,
            bw * 0.7,
            ph * e
        );
        text(&mut s, x + bw / 2.0, y0 + 16.0, "middle", &format!("PC{}", i + 1));
        cum += e;
        curve.push((x + bw / 2.0, y0 - ph * cum));
    }
    polyline(&mut s, &curve, "#e45756", false);
    if elbow >= 1 && elbow <= curve.len() {
        let (x, y) = curve[elbow - 1];
        let _ = writeln!(
            s,
            r##"<circle cx="{x:.2}" cy="{y:.2}" r="5" fill="none" stroke="#e45756" stroke-width="2"/>"##
        );
        text(&mut s, x, y - 10.0, "middle", &format!("elbow k={elbow}"));
    }
    close(s)
}

fn bounds(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

/// 2-D points colored by grasp type.
pub fn scatter_svg(title: &str, points: &[[f64; 2]], groups: &[GraspType]) -> String {
    let mut s = open(title);
    let (x0, y0, pw, ph) = (40.0, 440.0, 440.0, 400.0);
    let (xl, xh) = bounds(points.iter().map(|p| p[0]));
    let (yl, yh) = bounds(points.iter().map(|p| p[1]));
    let _ = writeln!(
        s,
        r##"<rect x="{x0}" y="{:.1}" width="{pw}" height="{ph}" fill="none" stroke="#999999"/>"##,
        y0 - ph
    );
    for (p, g) in points.iter().zip(groups) {
        let x = x0 + pw * (p[0] - xl) / (xh - xl);
        let y = y0 - ph * (p[1] - yl) / (yh - yl);
        let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3.5" fill="{}"/>"#, grasp_color(*g));
    }
    let mut present: Vec<GraspType> = groups.to_vec();
    present.sort();
    present.dedup();
    let entries: Vec<(String, &str)> = present.iter().map(|g| (g.code().to_string(), grasp_color(*g))).collect();
    legend(&mut s, &entries);
    close(s)
}

/// Hold force against object mass, one line per grasp type.
pub fn force_mass_svg(title: &str, models: &BTreeMap<GraspType, ForceMassModel>) -> String {
    let mut s = open(title);
    let (x0, y0, pw, ph) = (60.0, 420.0, 440.0, 360.0);
    let xmax = axis_max(models.values().flat_map(|m| m.samples.iter().map(|p| p.mass_g)).fold(0.0, f64::max));
    let ymax = axis_max(models.values().flat_map(|m| m.samples.iter().map(|p| p.force_n)).fold(0.0, f64::max));
    line(&mut s, x0, y0, x0 + pw, y0, "black");
    line(&mut s, x0, y0, x0, y0 - ph, "black");
    for t in 0..=4 {
        let f = t as f64 / 4.0;
        text(&mut s, x0 + pw * f, y0 + 16.0, "middle", &format!("{:.0}", xmax * f));
        text(&mut s, x0 - 6.0, y0 - ph * f + 4.0, "end", &format!("{:.2}", ymax * f));
    }
    text(&mut s, x0 + pw / 2.0, y0 + 34.0, "middle", "object mass (g)");
    text(&mut s, 14.0, y0 - ph - 8.0, "start", "hold force (N)");
    let mut entries = Vec::new();
    for (g, m) in models {
        let color = grasp_color(*g);
        let pts: Vec<(f64, f64)> = m
            .samples
            .iter()
            .map(|p| (x0 + pw * p.mass_g / xmax, y0 - ph * p.force_n / ymax))
            .collect();
        polyline(&mut s, &pts, color, false);
        for (x, y) in &pts {
            let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{color}"/>"#);
        }
        entries.push((g.code().to_string(), color));
    }
    legend(&mut s, &entries);
    close(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hand::Domain;
    use crate::synergy::Spoke;

    #[test]
    fn escapes_markup() {
        assert_eq!(escape(r#"a<b>&"c'"#), "a&lt;b&gt;&amp;&quot;c&apos;");
    }

    #[test]
    fn axis_max_rounds_up() {
        assert_eq!(axis_max(0.0), 1.0);
        assert_eq!(axis_max(7.3), 10.0);
        assert_eq!(axis_max(2.2), 2.5);
        assert_eq!(axis_max(150.0), 200.0);
    }

    #[test]
    fn radar_has_one_polygon_per_profile() {
        let p = RadarProfile {
            grasp_type: GraspType::HookGrip,
            domain: Domain::Force,
            trials: 1,
            spokes: (0..5)
                .map(|i| Spoke {
                    label: format!("f{i}"),
                    radius: i as f64,
                })
                .collect(),
        };
        let svg = radar_svg("t <1>", &[&p, &p]);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("t &lt;1&gt;"));
        // rings plus two profiles
        assert_eq!(svg.matches("<polygon").count(), 4 + 2);
    }

    #[test]
    fn scree_marks_elbow() {
        let svg = scree_svg("s", &[0.7, 0.2, 0.1], 2);
        assert_eq!(svg.matches("<rect x=").count(), 3);
        assert!(svg.contains("elbow k=2"));
    }

    #[test]
    fn scatter_handles_degenerate_extent() {
        let svg = scatter_svg("s", &[[1.0, 1.0], [1.0, 1.0]], &[GraspType::PulpPinch, GraspType::PulpPinch]);
        assert!(!svg.contains("NaN"));
    }
}
