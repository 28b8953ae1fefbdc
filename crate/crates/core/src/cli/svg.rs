//! Hand-written SVG: zeros as circles, curves as paths.

use std::fmt::Write;

const WIDTH: f64 = 800.0;
const PAD: f64 = 40.0;

#[derive(Clone, Debug, Default)]
pub struct PointLayer {
    pub n: usize,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, Default)]
pub struct SvgScene {
    pub points: Vec<PointLayer>,
    /// Each curve is a list of pieces; a piece is drawn as one path.
    pub curves: Vec<Vec<Vec<(f64, f64)>>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Viewport {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl SvgScene {
    /// Bounding box of everything drawn, grown by 5% on each side.
    pub fn viewport(&self) -> Viewport {
        let mut v = Viewport {
            x0: f64::INFINITY,
            x1: f64::NEG_INFINITY,
            y0: f64::INFINITY,
            y1: f64::NEG_INFINITY,
        };
        let all = self
            .points
            .iter()
            .flat_map(|l| l.points.iter())
            .chain(self.curves.iter().flatten().flatten());
        for &(x, y) in all {
            if x.is_finite() && y.is_finite() {
                v.x0 = v.x0.min(x);
                v.x1 = v.x1.max(x);
                v.y0 = v.y0.min(y);
                v.y1 = v.y1.max(y);
            }
        }
        if !v.x0.is_finite() {
            return Viewport {
                x0: -1.0,
                x1: 1.0,
                y0: -1.0,
                y1: 1.0,
            };
        }
        let w = (v.x1 - v.x0).max(1e-9);
        let h = (v.y1 - v.y0).max(1e-9);
        Viewport {
            x0: v.x0 - 0.05 * w,
            x1: v.x1 + 0.05 * w,
            y0: v.y0 - 0.05 * h,
            y1: v.y1 + 0.05 * h,
        }
    }

    pub fn render(&self) -> String {
        let vp = self.viewport();
        let (w, h) = (vp.x1 - vp.x0, vp.y1 - vp.y0);
        let scale = (WIDTH - 2.0 * PAD) / w;
        let height = (h * scale + 2.0 * PAD).clamp(200.0, 2400.0);
        let scale_y = (height - 2.0 * PAD) / h;
        let px = |x: f64| PAD + (x - vp.x0) * scale;
        let py = |y: f64| height - PAD - (y - vp.y0) * scale_y;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{height:.0}" viewBox="0 0 {WIDTH:.0} {height:.0}">"#
        );
        s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        s.push_str("<g stroke=\"#bbbbbb\" stroke-width=\"1\">\n");
        if vp.x0 < 0.0 && vp.x1 > 0.0 {
            let _ = writeln!(
                s,
                "<line x1=\"{0:.2}\" y1=\"{1:.2}\" x2=\"{0:.2}\" y2=\"{2:.2}\"/>",
                px(0.0),
                PAD,
                height - PAD
            );
        }
        if vp.y0 < 0.0 && vp.y1 > 0.0 {
            let _ = writeln!(
                s,
                "<line x1=\"{1:.2}\" y1=\"{0:.2}\" x2=\"{2:.2}\" y2=\"{0:.2}\"/>",
                py(0.0),
                PAD,
                WIDTH - PAD
            );
        }
        s.push_str("</g>\n");
        self.ticks(&mut s, vp, height, &px, &py);

        s.push_str("<g fill=\"none\" stroke=\"#202020\" stroke-width=\"1.2\">\n");
        for curve in &self.curves {
            for piece in curve {
                if piece.len() < 2 {
                    continue;
                }
                let mut d = String::new();
                for (i, &(x, y)) in piece.iter().enumerate() {
                    let _ = write!(
                        d,
                        "{}{:.2},{:.2}",
                        if i == 0 { "M" } else { " L" },
                        px(x),
                        py(y)
                    );
                }
                if closes(piece) {
                    d.push_str(" Z");
                }
                let _ = writeln!(s, "<path d=\"{d}\"/>");
            }
        }
        s.push_str("</g>\n");

        let (n_lo, n_hi) = self
            .points
            .iter()
            .fold((usize::MAX, 0), |(lo, hi), l| (lo.min(l.n), hi.max(l.n)));
        for layer in &self.points {
            let colour = colour(layer.n, n_lo, n_hi);
            let r = (60.0 / layer.n.max(1) as f64).clamp(0.8, 4.0);
            let _ = writeln!(s, "<g fill=\"{colour}\" data-n=\"{}\">", layer.n);
            for &(x, y) in &layer.points {
                let _ = writeln!(
                    s,
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{r:.2}\"/>",
                    px(x),
                    py(y)
                );
            }
            s.push_str("</g>\n");
        }
        s.push_str("</svg>\n");
        s
    }

    fn ticks(
        &self,
        s: &mut String,
        vp: Viewport,
        height: f64,
        px: &dyn Fn(f64) -> f64,
        py: &dyn Fn(f64) -> f64,
    ) {
        s.push_str("<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#404040\">\n");
        for t in ticks(vp.x0, vp.x1) {
            let _ = writeln!(
                s,
                "<line x1=\"{0:.2}\" y1=\"{1:.2}\" x2=\"{0:.2}\" y2=\"{2:.2}\" stroke=\"#404040\"/><text x=\"{0:.2}\" y=\"{3:.2}\" text-anchor=\"middle\">{4}</text>",
                px(t),
                height - PAD,
                height - PAD + 5.0,
                height - PAD + 18.0,
                label(t)
            );
        }
        for t in ticks(vp.y0, vp.y1) {
            let _ = writeln!(
                s,
                "<line x1=\"{1:.2}\" y1=\"{0:.2}\" x2=\"{2:.2}\" y2=\"{0:.2}\" stroke=\"#404040\"/><text x=\"{3:.2}\" y=\"{4:.2}\" text-anchor=\"end\">{5}</text>",
                py(t),
                PAD - 5.0,
                PAD,
                PAD - 7.0,
                py(t) + 4.0,
                label(t)
            );
        }
        s.push_str("</g>\n");
    }
}

/// A path closes when its ends are no further apart than twice its widest
/// step and the gap is short next to the path itself.
fn closes(piece: &[(f64, f64)]) -> bool {
    if piece.len() < 3 {
        return false;
    }
    let dist = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).hypot(a.1 - b.1);
    let steps = piece.windows(2).map(|w| dist(w[0], w[1]));
    let step = steps.clone().fold(0.0, f64::max);
    let length: f64 = steps.sum();
    let gap = dist(piece[0], piece[piece.len() - 1]);
    gap <= 2.0 * step && gap < 0.5 * length
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi {
        out.push(if t.abs() < step * 1e-9 { 0.0 } else { t });
        t += step;
    }
    out
}

fn label(t: f64) -> String {
    let s = format!("{t:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Blue for the smallest n through red for the largest.
fn colour(n: usize, lo: usize, hi: usize) -> String {
    let f = if hi > lo {
        (n - lo) as f64 / (hi - lo) as f64
    } else {
        0.0
    };
    let r = (40.0 + 200.0 * f).round() as u8;
    let b = (220.0 - 180.0 * f).round() as u8;
    format!("#{r:02x}40{b:02x}")
}
