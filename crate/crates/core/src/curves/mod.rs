//! Limit curves as angle-parametrized polylines.
//!
//! Each curve is r(theta) solved from a radial equation g(r, theta) = 0,
//! where exp(g) is the defining modulus (so the residual |exp(g) - 1| is
//! the modulus error). Straight pieces such as the imaginary-axis segment
//! of D_{a,b} are stored as separate pieces.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt::{self, Write as _};

use rayon::prelude::*;
use rug::{Assign, Float};
use serde::{Deserialize, Serialize};

use crate::apnum::{fmt_decimal, APComplex};
use crate::error::{Error, Result};
use crate::roots::ZeroSet;
use crate::series::Exact;

pub const DEFAULT_SAMPLES: usize = 2048;
pub const DEFAULT_BITS: u32 = 128;
const CORNER_WINDOW: f64 = 0.05;
const CORNER_REFINE: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CurveSpec {
    /// |z e^(1-z)| = 1, |z| <= 1.
    ExpSzego,
    /// Arcs |c z e^(1+az)| = 1 (Re z <= 0) and |c z e^(1-bz)| = 1 (Re z >= 0)
    /// with c = max(a, b), plus the segment [-i, i]/(ec).
    Dab {
        a: Exact,
        b: Exact,
    },
    /// r^lambda cos(lambda theta) = 1 + lambda log r, circle r = e^(-1/lambda)
    /// outside |theta| <= pi/(2 lambda).
    MlCurve {
        lambda: Exact,
    },
    /// |z e^(1-z)|^n = tau_n sqrt(2 pi n) |(1-z)/z| for |arg z| >= acos((n-2)/n).
    IntermediateExp {
        n: usize,
    },
    /// |z e^(1+iz)| = 1 above the real axis, |z e^(1-iz)| = 1 below, plus
    /// [-1/e, 1/e].
    TrigBessel,
    UnitCircle,
}

pub const CURVE_NAMES: &[&str] = &[
    "exp_szego",
    "dab",
    "ml_curve",
    "intermediate_exp",
    "trig_bessel",
    "unit_circle",
];

impl CurveSpec {
    /// Builds a spec from a type name and an optional JSON object of
    /// parameters, e.g. ("dab", {"a": 2, "b": "3/2"}).
    pub fn from_name(name: &str, params: Option<&str>) -> Result<Self> {
        let mut obj = match params {
            Some(p) if !p.trim().is_empty() => match serde_json::from_str(p)? {
                serde_json::Value::Object(m) => m,
                _ => return Err(Error::Config("curve params must be a JSON object".into())),
            },
            _ => serde_json::Map::new(),
        };
        obj.insert("type".into(), serde_json::Value::String(name.to_string()));
        let spec: CurveSpec = serde_json::from_value(serde_json::Value::Object(obj))
            .map_err(|e| Error::Config(format!("curve {name:?}: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CurveSpec::Dab { a, b } => {
                if a.0 < 0 || b.0 < 0 || (a.is_zero() && b.is_zero()) {
                    return Err(Error::InvalidParameter(
                        "dab needs a, b >= 0 with a + b > 0".into(),
                    ));
                }
            }
            CurveSpec::MlCurve { lambda } if !lambda.is_positive() => {
                return Err(Error::InvalidParameter("lambda must be positive".into()));
            }
            CurveSpec::IntermediateExp { n } if *n < 2 => {
                return Err(Error::InvalidParameter(
                    "intermediate curve needs n >= 2".into(),
                ));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            CurveSpec::ExpSzego => "exp_szego",
            CurveSpec::Dab { .. } => "dab",
            CurveSpec::MlCurve { .. } => "ml_curve",
            CurveSpec::IntermediateExp { .. } => "intermediate_exp",
            CurveSpec::TrigBessel => "trig_bessel",
            CurveSpec::UnitCircle => "unit_circle",
        }
    }

    /// Angles where the curve has a corner or crosses Re z = 0; sampling is
    /// denser near them.
    fn corners(&self) -> Vec<f64> {
        let mut v = vec![FRAC_PI_2, 3.0 * FRAC_PI_2];
        match self {
            CurveSpec::ExpSzego | CurveSpec::TrigBessel => v.extend([0.0, PI]),
            CurveSpec::MlCurve { lambda } => {
                let edge = PI / (2.0 * lambda.to_f64());
                if edge < PI {
                    v.extend([edge, TAU - edge]);
                }
                v.push(0.0);
            }
            CurveSpec::IntermediateExp { n } => {
                let cut = cutoff(*n);
                v.extend([cut, TAU - cut]);
            }
            _ => {}
        }
        v
    }

    /// Straight pieces, as endpoint pairs.
    fn segments(&self, bits: u32) -> Vec<(APComplex, APComplex)> {
        match self {
            CurveSpec::Dab { a, b } => {
                let c = Float::with_val(bits, a.0.clone().max(b.0.clone()));
                let h = Float::with_val(bits, 1) / (c * Float::with_val(bits, 1).exp());
                let zero = Float::new(bits);
                vec![(
                    APComplex::from_parts(&zero, &Float::with_val(bits, -&h), bits),
                    APComplex::from_parts(&zero, &h, bits),
                )]
            }
            CurveSpec::TrigBessel => {
                let h = Float::with_val(bits, -1).exp();
                vec![(
                    APComplex::from_real(&Float::with_val(bits, -&h), bits),
                    APComplex::from_real(&h, bits),
                )]
            }
            _ => Vec::new(),
        }
    }

    fn closed(&self) -> bool {
        !matches!(self, CurveSpec::IntermediateExp { .. })
    }
}

impl fmt::Display for CurveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serde_json::to_string(self).map_err(|_| fmt::Error)?)
    }
}

fn cutoff(n: usize) -> f64 {
    ((n as f64 - 2.0) / n as f64).acos()
}

/// One connected piece of a curve.
#[derive(Clone, Debug)]
pub struct Piece {
    pub thetas: Vec<f64>,
    pub points: Vec<APComplex>,
    pub residuals: Vec<f64>,
    /// Last point joins the first.
    pub closed: bool,
    /// Sampled by radial solves (as opposed to a straight segment).
    pub radial: bool,
}

/// A sampled curve. The first piece holds the radial samples ordered by
/// angle in [0, 2pi); further pieces are straight segments.
#[derive(Clone, Debug)]
pub struct Polyline {
    pub spec: CurveSpec,
    pub bits: u32,
    pub pieces: Vec<Piece>,
}

pub const CSV_HEADER: &str = "theta,re,im,residual,piece";

impl Polyline {
    pub fn radial(&self) -> &Piece {
        &self.pieces[0]
    }

    pub fn len(&self) -> usize {
        self.pieces.iter().map(|p| p.points.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> impl Iterator<Item = &APComplex> {
        self.pieces.iter().flat_map(|p| p.points.iter())
    }

    pub fn max_residual(&self) -> f64 {
        self.pieces
            .iter()
            .flat_map(|p| p.residuals.iter().copied())
            .fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for (k, piece) in self.pieces.iter().enumerate() {
            for ((t, z), r) in piece.thetas.iter().zip(&piece.points).zip(&piece.residuals) {
                let rf = if *r == 0.0 {
                    Float::new(53)
                } else {
                    Float::with_val(53, *r)
                };
                let _ = writeln!(
                    s,
                    "{},{},{},{},{k}",
                    fmt_decimal(&Float::with_val(53, *t), 17),
                    fmt_decimal(z.re(), 30),
                    fmt_decimal(z.im(), 30),
                    fmt_decimal(&rf, 30)
                );
            }
        }
        s
    }

    /// Segments as f64 endpoint pairs, with the owning piece.
    fn segments_f64(&self) -> Vec<(usize, (f64, f64), (f64, f64))> {
        let mut out = Vec::new();
        for (k, p) in self.pieces.iter().enumerate() {
            let pts: Vec<(f64, f64)> = p.points.iter().map(|z| z.to_f64_pair()).collect();
            if pts.len() == 1 {
                out.push((k, pts[0], pts[0]));
            }
            for w in pts.windows(2) {
                out.push((k, w[0], w[1]));
            }
            if p.closed && pts.len() > 2 {
                out.push((k, pts[pts.len() - 1], pts[0]));
            }
        }
        out
    }
}

/// The radial equation at one angle: g(r) and g'(r), where exp(g) is the
/// defining modulus.
struct Radial<'a> {
    spec: &'a CurveSpec,
    bits: u32,
    cos: Float,
    sin: Float,
    /// log(tau_n sqrt(2 pi n)) for the intermediate curve.
    k_n: Float,
    /// c = max(a, b) for D_{a,b}, lambda for the ML curve.
    param: Float,
    /// cos(lambda theta) on the ML arc.
    ml_cos: Float,
}

enum Solve {
    Bracket(Float, Float),
    Fixed(Float),
}

impl<'a> Radial<'a> {
    fn new(spec: &'a CurveSpec, theta: f64, bits: u32) -> Result<(Self, Solve)> {
        let th = Float::with_val(bits, theta);
        let (sin, cos) = th.clone().sin_cos(Float::new(bits));
        let one = Float::with_val(bits, 1);
        let mut r = Radial {
            spec,
            bits,
            cos,
            sin,
            k_n: Float::new(bits),
            param: Float::new(bits),
            ml_cos: Float::new(bits),
        };
        let tiny = Float::with_val(bits, 1e-6);
        let solve = match spec {
            CurveSpec::ExpSzego | CurveSpec::TrigBessel => Solve::Bracket(tiny, one),
            CurveSpec::UnitCircle => Solve::Fixed(one),
            CurveSpec::Dab { a, b } => {
                r.param = Float::with_val(bits, a.0.clone().max(b.0.clone()));
                let hi = Float::with_val(bits, 1) / &r.param;
                Solve::Bracket(Float::with_val(bits, &tiny * &hi), hi)
            }
            CurveSpec::MlCurve { lambda } => {
                r.param = lambda.to_float(bits);
                let lo = Float::with_val(bits, -(Float::with_val(bits, 1) / &r.param)).exp();
                // principal angle in (-pi, pi]
                let t = if theta > PI { theta - TAU } else { theta };
                if t.abs() * lambda.to_f64() <= FRAC_PI_2 {
                    let tf = Float::with_val(bits, t);
                    r.ml_cos = Float::with_val(bits, &tf * &r.param).cos();
                    Solve::Bracket(lo, one)
                } else {
                    Solve::Fixed(lo)
                }
            }
            CurveSpec::IntermediateExp { n } => {
                let ratio = Float::with_val(bits, *n as i64 - 2) / *n as u32;
                if r.cos > ratio {
                    return Err(Error::RegionEmpty { theta });
                }
                let nf = Float::with_val(bits, *n);
                let lg = Float::with_val(bits, &nf + 1u32).ln_gamma();
                r.k_n = lg - Float::with_val(bits, &nf * Float::with_val(bits, nf.ln_ref())) + &nf;
                Solve::Bracket(tiny, one)
            }
        };
        Ok((r, solve))
    }

    fn eval(&self, r: &Float) -> (Float, Float) {
        let b = self.bits;
        let ln = Float::with_val(b, r.ln_ref());
        let inv = Float::with_val(b, r.recip_ref());
        match self.spec {
            CurveSpec::ExpSzego => {
                let g = Float::with_val(b, &ln + 1u32) - Float::with_val(b, r * &self.cos);
                (g, inv - &self.cos)
            }
            CurveSpec::TrigBessel => {
                let s = Float::with_val(b, self.sin.abs_ref());
                let g = Float::with_val(b, &ln + 1u32) - Float::with_val(b, r * &s);
                (g, inv - s)
            }
            CurveSpec::Dab { a, b: bb } => {
                // left arc uses +a, right arc -b
                let coef = if self.cos.is_sign_negative() {
                    a.to_float(b)
                } else {
                    -bb.to_float(b)
                };
                let lc = Float::with_val(b, &self.param * r).ln();
                let slope = Float::with_val(b, &coef * &self.cos);
                let g = lc + 1u32 + Float::with_val(b, &slope * r);
                (g, inv + slope)
            }
            CurveSpec::MlCurve { .. } => {
                let l = &self.param;
                let rl = Float::with_val(b, Float::with_val(b, l * &ln).exp());
                let rc = Float::with_val(b, &rl * &self.ml_cos);
                let g = Float::with_val(b, &rc - 1u32) - Float::with_val(b, l * &ln);
                let dg = Float::with_val(b, l * &inv) * (rc - 1u32);
                (g, dg)
            }
            CurveSpec::IntermediateExp { n } => {
                let nf = *n as u32;
                let base = Float::with_val(b, &ln + 1u32) - Float::with_val(b, r * &self.cos);
                // |1 - z|^2 = 1 - 2 r cos + r^2
                let mut q = Float::with_val(b, r.square_ref());
                q -= Float::with_val(b, r * &self.cos) * 2u32;
                q += 1u32;
                let g = Float::with_val(b, &base * nf) + &ln
                    - Float::with_val(b, q.ln_ref()) / 2u32
                    - &self.k_n;
                let dq = Float::with_val(b, r - &self.cos) / &q;
                let dg = Float::with_val(b, &inv - &self.cos) * nf + &inv - dq;
                (g, dg)
            }
            CurveSpec::UnitCircle => (Float::with_val(b, ln), inv),
        }
    }
}

/// r(theta) and the residual |exp(g) - 1|.
pub fn radial_point(spec: &CurveSpec, theta: f64, bits: u32) -> Result<(APComplex, f64)> {
    let (eq, solve) = Radial::new(spec, theta, bits)?;
    let r = match solve {
        Solve::Fixed(r) => r,
        Solve::Bracket(lo, hi) => solve_bracketed(&eq, lo, hi, theta)?,
    };
    let res = if matches!(spec, CurveSpec::UnitCircle) {
        0.0
    } else {
        let (g, _) = eq.eval(&r);
        Float::with_val(bits, g.exp_m1_ref()).abs().to_f64()
    };
    let th = Float::with_val(bits, theta);
    let (s, c) = th.sin_cos(Float::new(bits));
    let z = APComplex::from_parts(
        &Float::with_val(bits, &r * &c),
        &Float::with_val(bits, &r * &s),
        bits,
    );
    Ok((z, res))
}

fn solve_bracketed(eq: &Radial, mut lo: Float, mut hi: Float, theta: f64) -> Result<Float> {
    let bits = eq.bits;
    let (glo, _) = eq.eval(&lo);
    let (ghi, _) = eq.eval(&hi);
    if ghi.is_zero() {
        return Ok(hi);
    }
    if glo.is_zero() {
        return Ok(lo);
    }
    let lo_neg = glo.is_sign_negative();
    if lo_neg == ghi.is_sign_negative() {
        return Err(Error::Bracketing { theta });
    }
    let mut mid = Float::new(bits);
    for _ in 0..60 {
        mid.assign(&lo + &hi);
        mid /= 2u32;
        let (g, _) = eq.eval(&mid);
        if g.is_zero() {
            return Ok(mid);
        }
        if g.is_sign_negative() == lo_neg {
            lo.assign(&mid);
        } else {
            hi.assign(&mid);
        }
    }
    let mut r = Float::with_val(bits, &lo + &hi) / 2u32;
    let stop = Float::with_val(bits, Float::i_exp(1, 8 - bits as i32));
    for _ in 0..40 {
        let (g, dg) = eq.eval(&r);
        if dg.is_zero() {
            break;
        }
        let step = Float::with_val(bits, &g / &dg);
        let next = Float::with_val(bits, &r - &step);
        if next < lo || next > hi {
            break;
        }
        r = next;
        if Float::with_val(bits, step.abs_ref()) <= Float::with_val(bits, &r * &stop) {
            break;
        }
    }
    Ok(r)
}

fn sample_angles(spec: &CurveSpec, m: usize) -> Vec<f64> {
    let step = TAU / m as f64;
    let mut th: Vec<f64> = (0..m).map(|j| j as f64 * step).collect();
    let fine = step / CORNER_REFINE as f64;
    for c in spec.corners() {
        let c = c.rem_euclid(TAU);
        th.push(c);
        let k = (CORNER_WINDOW / fine).ceil() as i64;
        for j in -k..=k {
            th.push((c + j as f64 * fine).rem_euclid(TAU));
        }
    }
    th.sort_by(|a, b| a.partial_cmp(b).unwrap());
    th.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
    if let Some(&last) = th.last() {
        if TAU - last < 1e-13 {
            th.pop();
        }
    }
    th
}

/// Samples the curve at m uniform angles (plus denser angles near corners).
pub fn sample_curve(spec: &CurveSpec, m: usize) -> Result<Polyline> {
    sample_curve_bits(spec, m, DEFAULT_BITS)
}

pub fn sample_curve_bits(spec: &CurveSpec, m: usize, bits: u32) -> Result<Polyline> {
    if m < 16 {
        return Err(Error::InvalidParameter(format!(
            "need at least 16 samples, got {m}"
        )));
    }
    spec.validate()?;
    let angles = sample_angles(spec, m);
    let solved: Vec<Option<(f64, APComplex, f64)>> = angles
        .par_iter()
        .map(|&t| match radial_point(spec, t, bits) {
            Ok((z, r)) => Ok(Some((t, z, r))),
            Err(Error::RegionEmpty { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let mut radial = Piece {
        thetas: Vec::new(),
        points: Vec::new(),
        residuals: Vec::new(),
        closed: spec.closed(),
        radial: true,
    };
    let items: Vec<(f64, APComplex, f64)> = solved.into_iter().flatten().collect();
    for (t, z, r) in items {
        radial.thetas.push(t);
        radial.points.push(z);
        radial.residuals.push(r);
    }
    let mut pieces = vec![radial];
    for (a, b) in spec.segments(bits) {
        let k = 64;
        let mut p = Piece {
            thetas: Vec::new(),
            points: Vec::new(),
            residuals: Vec::new(),
            closed: false,
            radial: false,
        };
        for j in 0..=k {
            let t = Float::with_val(bits, j) / k as u32;
            let z = &a + &(&b - &a).scale(&t);
            p.thetas.push(z.arg_f64().rem_euclid(TAU));
            p.points.push(z);
            p.residuals.push(0.0);
        }
        pieces.push(p);
    }
    Ok(Polyline {
        spec: spec.clone(),
        bits,
        pieces,
    })
}

fn seg_dist(z: (f64, f64), a: (f64, f64), b: (f64, f64)) -> (f64, (f64, f64)) {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((z.0 - a.0) * dx + (z.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    let p = (a.0 + t * dx, a.1 + t * dy);
    ((z.0 - p.0).hypot(z.1 - p.1), p)
}

/// Distance from z to the curve: nearest polyline segment, then a local
/// check against exact curve points at the foot and the segment ends.
pub fn dist_to_polyline(z: &APComplex, curve: &Polyline) -> f64 {
    let zf = z.to_f64_pair();
    let mut best = (f64::INFINITY, 0usize, (0.0, 0.0), (0.0, 0.0), (0.0, 0.0));
    for (k, a, b) in curve.segments_f64() {
        let (d, p) = seg_dist(zf, a, b);
        if d < best.0 {
            best = (d, k, p, a, b);
        }
    }
    let (d, k, foot, a, b) = best;
    if !d.is_finite() || !curve.pieces[k].radial || d == 0.0 {
        return d;
    }
    // the chord cuts inside the arc; measure against the exact curve near
    // the foot instead
    let ang = |p: (f64, f64)| p.1.atan2(p.0).rem_euclid(TAU);
    let (ta, tb, tf) = (ang(a), ang(b), ang(foot));
    let mut exact = f64::INFINITY;
    for t in [ta, tb, tf, ang(zf)] {
        if !angle_between(t, ta, tb) {
            continue;
        }
        if let Ok((q, _)) = radial_point(&curve.spec, t, 64.max(curve.bits / 2)) {
            let (qx, qy) = q.to_f64_pair();
            exact = exact.min((zf.0 - qx).hypot(zf.1 - qy));
        }
    }
    if exact.is_finite() {
        exact
    } else {
        d
    }
}

fn angle_between(t: f64, a: f64, b: f64) -> bool {
    let span = (b - a).rem_euclid(TAU);
    let off = (t - a).rem_euclid(TAU);
    span <= PI && off <= span + 1e-15
}

/// Region removed before taking maxdist.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Exclusion {
    Disk {
        re: f64,
        im: f64,
        radius: f64,
    },
    /// {Re z <= x_max, |Im z| <= half_width}.
    HalfStrip {
        x_max: f64,
        half_width: f64,
    },
    /// {|Re z| <= half_width}.
    ImagStrip {
        half_width: f64,
    },
}

impl Exclusion {
    pub fn contains(&self, z: (f64, f64)) -> bool {
        match *self {
            Exclusion::Disk { re, im, radius } => (z.0 - re).hypot(z.1 - im) < radius,
            Exclusion::HalfStrip { x_max, half_width } => z.0 <= x_max && z.1.abs() <= half_width,
            Exclusion::ImagStrip { half_width } => z.0.abs() <= half_width,
        }
    }

    pub fn disk(re: f64, im: f64, radius: f64) -> Self {
        Exclusion::Disk { re, im, radius }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MaxDist {
    pub value: f64,
    pub kept: usize,
    pub empty: bool,
}

/// Largest distance to the curve over zeros outside every exclusion.
pub fn maxdist(zeros: &ZeroSet, curve: &Polyline, exclusions: &[Exclusion]) -> MaxDist {
    let kept: Vec<&APComplex> = zeros
        .zeros
        .iter()
        .filter(|z| !exclusions.iter().any(|e| e.contains(z.to_f64_pair())))
        .collect();
    let value = kept
        .par_iter()
        .map(|z| dist_to_polyline(z, curve))
        .reduce(|| 0.0, f64::max);
    MaxDist {
        value,
        kept: kept.len(),
        empty: kept.is_empty(),
    }
}
