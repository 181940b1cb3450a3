use std::fmt::Write as _;
use std::io::Write;

use super::RegularityCurve;
use crate::Error;

pub fn write_csv<W: Write>(out: W, curve: &RegularityCurve) -> Result<(), Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["s", "c2s", "one_minus_s", "feasible"]).map_err(csv_err)?;
    for r in &curve.rows {
        w.write_record([format!("{:.6}", r.s), format!("{:.12}", r.c2s), format!("{:.12}", r.one_minus_s), r.feasible.to_string()])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 48.0;
const COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];

/// Line chart of c(2s) for each curve against 1 - s, failure intervals shaded.
pub fn write_svg<W2: Write>(mut out: W2, title: &str, curves: &[&RegularityCurve]) -> Result<(), Error> {
    let rows = curves.iter().flat_map(|c| c.rows.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for r in rows {
        x0 = x0.min(r.s);
        x1 = x1.max(r.s);
        y0 = y0.min(r.c2s).min(r.one_minus_s);
        y1 = y1.max(r.c2s).max(r.one_minus_s);
    }
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle">{title}</text>"#, W / 2.0);
    for (k, c) in curves.iter().enumerate() {
        for &(a, b) in &c.gap_intervals {
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{PAD}" width="{:.2}" height="{}" fill="{}" fill-opacity="0.12"/>"#,
                sx(a),
                sx(b) - sx(a),
                H - 2.0 * PAD,
                COLORS[k % COLORS.len()]
            );
        }
    }
    let _ = writeln!(
        s,
        r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    let poly = |pts: Vec<(f64, f64)>, color: &str, dash: &str| {
        let p: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        format!(r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#, p.join(" "))
    };
    if let Some(c) = curves.first() {
        let _ = writeln!(s, "{}", poly(c.rows.iter().map(|r| (r.s, r.one_minus_s)).collect(), "black", r#" stroke-dasharray="4 3""#));
    }
    for (k, c) in curves.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let _ = writeln!(s, "{}", poly(c.rows.iter().map(|r| (r.s, r.c2s)).collect(), color, ""));
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{color}">c(2s), d={} {}</text>"#,
            W - PAD - 150.0,
            PAD + 16.0 * (k as f64 + 1.0),
            c.d,
            c.variant
        );
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}">1 - s (dashed)</text>"#, W - PAD - 150.0, PAD + 16.0 * (curves.len() as f64 + 1.0));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">s</text>"#, W / 2.0, H - 12.0);
    for (v, anchor) in [(x0, "start"), (x1, "end")] {
        let _ = writeln!(s, r#"<text x="{:.2}" y="{}" text-anchor="{anchor}">{v}</text>"#, sx(v), H - PAD + 16.0);
    }
    for v in [y0, y1] {
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{v:.2}</text>"#, PAD - 4.0, sy(v) + 4.0);
    }
    s.push_str("</svg>\n");
    out.write_all(s.as_bytes())?;
    Ok(())
}
