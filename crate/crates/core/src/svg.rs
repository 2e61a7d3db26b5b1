//! Minimal SVG charts: a histogram with an overlaid density, and a trend line
//! with confidence whiskers.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 50.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    log_x: bool,
}

impl Frame {
    fn tx(&self, x: f64) -> f64 {
        let (a, b, v) = if self.log_x {
            (self.x0.ln(), self.x1.ln(), x.ln())
        } else {
            (self.x0, self.x1, x)
        };
        PAD + (v - a) / (b - a) * (W - 2.0 * PAD)
    }

    fn ty(&self, y: f64) -> f64 {
        H - PAD - (y - self.y0) / (self.y1 - self.y0) * (H - 2.0 * PAD)
    }

    fn axes(&self, s: &mut String, title: &str, xlabel: &str, ylabel: &str) {
        let _ = write!(
            s,
            r##"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>
<line x1="{PAD}" y1="{yb}" x2="{xr}" y2="{yb}" stroke="black"/>
<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{yb}" stroke="black"/>
<text x="{cx}" y="25" text-anchor="middle" font-size="14">{title}</text>
<text x="{cx}" y="{xl}" text-anchor="middle" font-size="12">{xlabel}</text>
<text x="15" y="{cy}" text-anchor="middle" font-size="12" transform="rotate(-90 15 {cy})">{ylabel}</text>
<text x="{PAD}" y="{tl}" text-anchor="middle" font-size="10">{x0:.3}</text>
<text x="{xr}" y="{tl}" text-anchor="middle" font-size="10">{x1:.3}</text>
<text x="{yt}" y="{yb}" text-anchor="end" font-size="10">{y0:.3}</text>
<text x="{yt}" y="{PAD}" text-anchor="end" font-size="10">{y1:.3}</text>
"##,
            yb = H - PAD,
            xr = W - PAD,
            cx = W / 2.0,
            cy = H / 2.0,
            xl = H - 10.0,
            tl = H - PAD + 14.0,
            yt = PAD - 4.0,
            x0 = self.x0,
            x1 = self.x1,
            y0 = self.y0,
            y1 = self.y1,
        );
    }
}

fn open() -> String {
    format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n")
}

/// Bars for `density` on `edges`, with an optional curve `(x, y)`.
pub fn histogram(edges: &[f64], density: &[f64], overlay: Option<&[(f64, f64)]>, title: &str) -> String {
    let ymax = density
        .iter()
        .copied()
        .chain(overlay.unwrap_or(&[]).iter().map(|p| p.1))
        .fold(0.0, f64::max)
        * 1.1;
    let f = Frame {
        x0: edges[0],
        x1: edges[edges.len() - 1],
        y0: 0.0,
        y1: if ymax > 0.0 { ymax } else { 1.0 },
        log_x: false,
    };
    let mut s = open();
    f.axes(&mut s, title, "exit angle", "density");
    for (i, d) in density.iter().enumerate() {
        let (xa, xb) = (f.tx(edges[i]), f.tx(edges[i + 1]));
        let _ = writeln!(
            s,
            r##"<rect x="{xa:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="#9ecae1" stroke="#3182bd"/>"##,
            y = f.ty(*d),
            w = xb - xa,
            h = f.ty(0.0) - f.ty(*d),
        );
    }
    if let Some(curve) = overlay {
        let pts: Vec<String> = curve.iter().map(|(x, y)| format!("{:.2},{:.2}", f.tx(*x), f.ty(*y))).collect();
        let _ = writeln!(s, r##"<polyline points="{}" fill="none" stroke="#d62728" stroke-width="2"/>"##, pts.join(" "));
    }
    s.push_str("</svg>\n");
    s
}

/// Points `(x, y, lo, hi)` joined by a line, each with a vertical whisker.
pub fn trend(points: &[(f64, f64, f64, f64)], log_x: bool, title: &str, xlabel: &str, ylabel: &str) -> String {
    let xs = points.iter().map(|p| p.0);
    let (mut x0, mut x1) = xs.clone().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if x0 == x1 {
        x0 *= 0.5;
        x1 = x1 * 2.0 + 1.0;
    }
    if log_x {
        x0 /= 2.0;
        x1 *= 2.0;
    }
    let y0 = points.iter().map(|p| p.2).fold(f64::INFINITY, f64::min).min(0.0);
    let y1 = points.iter().map(|p| p.3).fold(f64::NEG_INFINITY, f64::max).max(y0 + 1e-12) * 1.1;
    let f = Frame { x0, x1, y0, y1, log_x };
    let mut s = open();
    f.axes(&mut s, title, xlabel, ylabel);
    let pts: Vec<String> = points.iter().map(|p| format!("{:.2},{:.2}", f.tx(p.0), f.ty(p.1))).collect();
    let _ = writeln!(s, r##"<polyline points="{}" fill="none" stroke="#3182bd" stroke-width="2"/>"##, pts.join(" "));
    for p in points {
        let x = f.tx(p.0);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><circle cx="{x:.2}" cy="{:.2}" r="3" fill="#3182bd"/>"##,
            f.ty(p.2),
            f.ty(p.3),
            f.ty(p.1)
        );
    }
    s.push_str("</svg>\n");
    s
}
