//! Static SVG overlay of a classified slice grid and its analytic curves.

use std::fmt::Write;

use boxlab_core::slices::{Curve, SliceScan};
use boxlab_core::Verdict;

const SIZE: f64 = 560.0;
const MARGIN: f64 = 60.0;

fn fill(verdict: Verdict) -> &'static str {
    match verdict {
        Verdict::Local => "#ececec",
        Verdict::QuantumConsistent => "#bfe0bf",
        Verdict::PostquantumIcOk => "#f2d49b",
        Verdict::IcViolating => "#ffffff",
    }
}

fn x(alpha: f64) -> f64 {
    MARGIN + alpha * SIZE
}

fn y(beta: f64) -> f64 {
    MARGIN + (1.0 - beta) * SIZE
}

fn stroke(name: &str) -> Option<&'static str> {
    let base = name
        .split('_')
        .take_while(|s| s.parse::<u32>().is_err())
        .collect::<Vec<_>>()
        .join("_");
    match base.as_str() {
        "ic" => Some(r##"stroke="#1f4fd8" stroke-width="2" stroke-dasharray="8 5""##),
        "npa" => Some(r##"stroke="#c81e1e" stroke-width="2""##),
        "chsh_local" | "chsh_tsirelson" => Some(r##"stroke="#000000" stroke-width="0.75""##),
        _ => None,
    }
}

pub fn render(scan: &SliceScan, curves: &[Curve], title: &str) -> String {
    let total = SIZE + 2.0 * MARGIN;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total}" height="{total}" viewBox="0 0 {total} {total}">"#
    );
    let _ = writeln!(
        out,
        r##"<rect width="{total}" height="{total}" fill="#ffffff"/>"##
    );

    // One rectangle per run of equal verdicts along each beta row.
    let h = scan.spec.step();
    let last = scan.resolution() - 1;
    let _ = writeln!(out, r#"<g shape-rendering="crispEdges">"#);
    for j in 0..=last {
        let mut i = 0;
        while i + j <= last {
            let verdict = scan
                .get(i, j)
                .expect("node in triangle")
                .classification
                .verdict;
            let mut k = i;
            while k + 1 + j <= last && scan.get(k + 1, j).unwrap().classification.verdict == verdict
            {
                k += 1;
            }
            let a0 = (i as f64 * h - h / 2.0).max(0.0);
            let a1 = (k as f64 * h + h / 2.0).min(1.0);
            let b0 = (j as f64 * h - h / 2.0).max(0.0);
            let b1 = (j as f64 * h + h / 2.0).min(1.0);
            let _ = writeln!(
                out,
                r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{}"/>"#,
                x(a0),
                y(b1),
                x(a1) - x(a0),
                y(b0) - y(b1),
                fill(verdict)
            );
            i = k + 1;
        }
    }
    let _ = writeln!(out, "</g>");

    // Hide the half cells that spill past the hypotenuse.
    let _ = writeln!(
        out,
        r##"<polygon points="{:.3},{:.3} {:.3},{:.3} {:.3},{:.3}" fill="#ffffff"/>"##,
        x(1.0),
        y(0.0),
        x(1.0),
        y(1.0),
        x(0.0),
        y(1.0)
    );

    for curve in curves {
        let Some(style) = stroke(&curve.name) else {
            continue;
        };
        let points: Vec<String> = curve
            .points
            .iter()
            .map(|&(a, b)| format!("{:.3},{:.3}", x(a), y(b)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" {style} points="{}"/>"#,
            points.join(" ")
        );
    }

    let _ = writeln!(
        out,
        r##"<polygon points="{:.3},{:.3} {:.3},{:.3} {:.3},{:.3}" fill="none" stroke="#000000" stroke-width="1.25"/>"##,
        x(0.0),
        y(0.0),
        x(1.0),
        y(0.0),
        x(0.0),
        y(1.0)
    );
    for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" font-size="12" text-anchor="middle">{t}</text>"#,
            x(t),
            y(0.0) + 18.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" font-size="12" text-anchor="end">{t}</text>"#,
            x(0.0) - 8.0,
            y(t) + 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" font-size="16" text-anchor="middle">α</text>"#,
        x(0.5),
        y(0.0) + 42.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" font-size="16" text-anchor="middle">β</text>"#,
        x(0.0) - 42.0,
        y(0.5)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" font-size="14" text-anchor="middle">{title}</text>"#,
        x(0.5),
        MARGIN / 2.0
    );
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suffixed_pieces_keep_their_style() {
        assert_eq!(stroke("npa_2"), stroke("npa"));
        assert_eq!(stroke("chsh_tsirelson_3"), stroke("chsh_local"));
        assert!(stroke("tlm").is_none());
    }
}
