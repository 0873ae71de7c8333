//! Self-contained SVG of a reconstructed potential with the normalized
//! wavefunction as an inset.

use std::fmt::Write;

pub struct Series {
    pub r: Vec<f64>,
    pub v: Vec<f64>,
    pub psi: Vec<f64>,
}

struct Frame {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    xr: (f64, f64),
    yr: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        self.x0 + (x - self.xr.0) / (self.xr.1 - self.xr.0) * self.w
    }

    fn py(&self, y: f64) -> f64 {
        self.y0 + self.h - (y - self.yr.0) / (self.yr.1 - self.yr.0) * self.h
    }

    fn inside(&self, y: f64) -> bool {
        y.is_finite() && y >= self.yr.0 && y <= self.yr.1
    }

    /// Polylines of the in-range runs of `(x, y)`.
    fn polylines(&self, x: &[f64], y: &[f64], style: &str, out: &mut String) {
        let mut run: Vec<String> = Vec::new();
        let flush = |run: &mut Vec<String>, out: &mut String| {
            if run.len() > 1 {
                let _ = writeln!(out, r#"<polyline fill="none" {style} points="{}"/>"#, run.join(" "));
            }
            run.clear();
        };
        for (&a, &b) in x.iter().zip(y) {
            if self.inside(b) {
                run.push(format!("{:.2},{:.2}", self.px(a), self.py(b)));
            } else {
                flush(&mut run, out);
            }
        }
        flush(&mut run, out);
    }

    fn axes(&self, xlabel: &str, ylabel: &str, font: f64, out: &mut String) {
        let _ = writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="white" stroke="black"/>"#,
            self.x0, self.y0, self.w, self.h
        );
        for k in 0..=4 {
            let t = k as f64 / 4.0;
            let xv = self.xr.0 + t * (self.xr.1 - self.xr.0);
            let yv = self.yr.0 + t * (self.yr.1 - self.yr.0);
            let (x, y) = (self.px(xv), self.py(yv));
            let yb = self.y0 + self.h;
            let _ = writeln!(out, r#"<line x1="{x:.2}" y1="{yb:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, yb + 4.0);
            let _ = writeln!(
                out,
                r#"<text x="{x:.2}" y="{:.2}" font-size="{font}" text-anchor="middle">{}</text>"#,
                yb + 4.0 + font,
                tick(xv)
            );
            let _ = writeln!(out, r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="black"/>"#, self.x0 - 4.0, self.x0);
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" font-size="{font}" text-anchor="end">{}</text>"#,
                self.x0 - 6.0,
                y + font / 3.0,
                tick(yv)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="{font}" text-anchor="middle">{xlabel}</text>"#,
            self.x0 + self.w / 2.0,
            self.y0 + self.h + 2.4 * font + 4.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="{font}" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{ylabel}</text>"#,
            self.x0 - 3.6 * font,
            self.y0 + self.h / 2.0,
            self.x0 - 3.6 * font,
            self.y0 + self.h / 2.0
        );
    }
}

fn tick(x: f64) -> String {
    let s = format!("{:.3}", x);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let i = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[i]
}

/// Display range of `V`: the centrifugal wall near the origin is clipped so
/// the well stays visible. `energy` is kept in range.
fn potential_range(v: &[f64], energy: f64) -> (f64, f64) {
    let mut s: Vec<f64> = v.iter().copied().filter(|x| x.is_finite()).collect();
    if s.is_empty() {
        return (energy - 1.0, energy + 1.0);
    }
    s.sort_by(f64::total_cmp);
    let lo = s[0].min(energy);
    let hi = quantile(&s, 0.8).max(energy);
    let pad = 0.1 * (hi - lo).max(1e-9);
    (lo - pad, hi + pad)
}

/// The full SVG document.
pub fn render(series: &Series, energy: f64, title: &str) -> String {
    let (width, height) = (720.0, 520.0);
    let main = Frame {
        x0: 80.0,
        y0: 50.0,
        w: 600.0,
        h: 400.0,
        xr: (series.r[0], *series.r.last().expect("nonempty series")),
        yr: potential_range(&series.v, energy),
    };
    let pmax = series.psi.iter().copied().filter(|x| x.is_finite()).fold(0.0f64, |m, x| m.max(x.abs()));
    let pmax = if pmax > 0.0 { pmax } else { 1.0 };
    let inset = Frame {
        x0: main.x0 + main.w - 250.0,
        y0: main.y0 + 20.0,
        w: 230.0,
        h: 140.0,
        xr: main.xr,
        yr: (-1.1 * pmax, 1.1 * pmax),
    };

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="28" font-size="14" text-anchor="middle">{}</text>"#,
        width / 2.0,
        escape(title)
    );
    main.axes("r", "V(r)", 12.0, &mut out);
    main.polylines(&series.r, &series.v, r#"stroke="navy" stroke-width="1.6""#, &mut out);
    if main.inside(energy) {
        let y = main.py(energy);
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="firebrick" stroke-dasharray="6 4"/>"#,
            main.x0,
            main.x0 + main.w
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" fill="firebrick">E = {}</text>"#,
            main.x0 + 6.0,
            y - 4.0,
            tick(energy)
        );
    }
    inset.axes("r", "Ψ(r)", 9.0, &mut out);
    let zero = inset.py(0.0);
    let _ = writeln!(
        out,
        r#"<line x1="{:.2}" y1="{zero:.2}" x2="{:.2}" y2="{zero:.2}" stroke="gray" stroke-width="0.5"/>"#,
        inset.x0,
        inset.x0 + inset.w
    );
    inset.polylines(&series.r, &series.psi, r#"stroke="darkgreen" stroke-width="1.2""#, &mut out);
    let _ = writeln!(out, "</svg>");
    out
}
