//! Rates at which section zeros approach their limit curves.

use std::f64::consts::E;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::apnum::PrecisionPolicy;
use crate::error::{Error, Result};
use crate::roots::{section_zeros, section_zeros_from_moments, ZeroSet};
use crate::series::{moments, subsequence_select, PhiSpec, SeriesSpec};

use super::median;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
    /// Im z > 0 for Bessel sections (the left arc rotated by -i).
    Upper,
    Lower,
    Circle,
}

impl std::str::FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            "upper" => Ok(Side::Upper),
            "lower" => Ok(Side::Lower),
            "circle" => Ok(Side::Circle),
            _ => Err(Error::InvalidParameter(format!("unknown side '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct FitOptions {
    pub corner_radius: f64,
    pub axis_margin: f64,
    pub min_kept: usize,
    /// Threshold passed to the subsequence selection.
    pub select_tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            corner_radius: 0.25,
            axis_margin: 0.1,
            min_kept: 3,
            select_tol: 1e-3,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RateFit {
    pub family: SeriesSpec,
    pub side: Side,
    /// (N, median statistic, zeros kept).
    pub samples: Vec<(usize, f64, usize)>,
    pub fitted_c: f64,
    pub fitted_d: f64,
    pub expected_c: f64,
    /// Relative to expected_c, or absolute when expected_c = 0.
    pub rel_error: f64,
}

/// (xi - Re mu + 1/2, xi - Re nu + 1/2).
pub fn rate_constants(phi: &PhiSpec) -> (f64, f64) {
    let xi = phi.xi();
    (xi - phi.mu.re.to_f64() + 0.5, xi - phi.nu.re.to_f64() + 0.5)
}

/// What one side of one family looks like: the statistic, the region kept
/// and the expected constant.
struct Geometry {
    side: Side,
    c: f64,
    a: f64,
    b: f64,
    corners: Vec<(f64, f64)>,
    expected: f64,
}

impl Geometry {
    fn new(spec: &SeriesSpec, side: Side) -> Result<Self> {
        let unsupported = || {
            Err(Error::Family(format!(
                "no rate law for {} on side {side:?}",
                spec.name()
            )))
        };
        let from_phi = |phi: &PhiSpec, side: Side| {
            let (l, r) = rate_constants(phi);
            let (a, b) = (phi.a.to_f64(), phi.b.to_f64());
            let mut corners = Vec::new();
            if a > 0.0 {
                corners.push((-1.0 / a, 0.0));
            }
            if b > 0.0 {
                corners.push((1.0 / b, 0.0));
            }
            Geometry {
                side,
                c: phi.c().to_f64(),
                a,
                b,
                corners,
                expected: if matches!(side, Side::Left | Side::Upper) {
                    l
                } else {
                    r
                },
            }
        };
        match (spec, side) {
            (SeriesSpec::ExpIntegral { phi }, Side::Left | Side::Right) => Ok(from_phi(phi, side)),
            (SeriesSpec::Bessel { alpha }, Side::Upper | Side::Lower) => {
                let mut g = from_phi(&PhiSpec::bessel(alpha)?, side);
                g.corners = vec![(0.0, 1.0), (0.0, -1.0)];
                Ok(g)
            }
            (SeriesSpec::RationalSquare, Side::Circle) => Ok(Geometry {
                side,
                c: 1.0,
                a: 0.0,
                b: 0.0,
                corners: vec![(1.0, 0.0)],
                expected: -1.0,
            }),
            _ => unsupported(),
        }
    }

    fn keep(&self, (x, y): (f64, f64), opts: &FitOptions) -> bool {
        if self
            .corners
            .iter()
            .any(|&(cx, cy)| (x - cx).hypot(y - cy) < opts.corner_radius)
        {
            return false;
        }
        let m = opts.axis_margin;
        match self.side {
            Side::Left => x < -m,
            Side::Right => x > m,
            Side::Upper => y > m,
            Side::Lower => y < -m,
            Side::Circle => {
                let r = x.hypot(y);
                r > 0.5 && r < 1.5
            }
        }
    }

    fn statistic(&self, (x, y): (f64, f64)) -> f64 {
        let r = x.hypot(y);
        let c = self.c;
        match self.side {
            Side::Left => c * r * (1.0 + self.a * x).exp() - 1.0,
            Side::Right => c * r * (1.0 - self.b * x).exp() - 1.0,
            // |z e^(1 + iz)| and |z e^(1 - iz)|
            Side::Upper => c * r * (1.0 - y).exp() - 1.0,
            Side::Lower => c * r * (1.0 + y).exp() - 1.0,
            Side::Circle => r - 1.0,
        }
    }
}

fn median_statistic(zs: &ZeroSet, geo: &Geometry, opts: &FitOptions) -> Result<(f64, usize)> {
    let mut v: Vec<f64> = zs
        .zeros
        .iter()
        .map(|z| z.to_f64_pair())
        .filter(|&p| geo.keep(p, opts))
        .map(|p| geo.statistic(p))
        .collect();
    if v.len() < opts.min_kept {
        return Err(Error::InsufficientZeros {
            n: zs.n,
            kept: v.len(),
            need: opts.min_kept,
        });
    }
    Ok((median(&mut v), v.len()))
}

/// Zeros for every N, sharing one moment table for exponential integrals.
fn zero_sets(spec: &SeriesSpec, ns: &[usize]) -> Result<Vec<ZeroSet>> {
    let n_max = *ns.iter().max().expect("nonempty");
    match spec {
        SeriesSpec::ExpIntegral { phi } => {
            let table = moments(phi, n_max, PrecisionPolicy::for_degree(n_max).start_bits)?;
            ns.par_iter()
                .map(|&n| section_zeros_from_moments(&table, n, &PrecisionPolicy::for_degree(n)))
                .collect()
        }
        _ => ns
            .par_iter()
            .map(|&n| section_zeros(spec, n, &PrecisionPolicy::for_degree(n)))
            .collect(),
    }
}

/// Fits median(|c z e^(...)| - 1) = c log N/N + d/N over the N given.
pub fn fit_rate(spec: &SeriesSpec, n_list: &[usize], side: Side) -> Result<RateFit> {
    fit_rate_with(spec, n_list, side, &FitOptions::default())
}

pub fn fit_rate_with(
    spec: &SeriesSpec,
    n_list: &[usize],
    side: Side,
    opts: &FitOptions,
) -> Result<RateFit> {
    Ok(fit_rate_sides(spec, n_list, &[side], opts)?.remove(0))
}

/// Several sides from one set of zero computations.
pub fn fit_rate_sides(
    spec: &SeriesSpec,
    n_list: &[usize],
    sides: &[Side],
    opts: &FitOptions,
) -> Result<Vec<RateFit>> {
    spec.validate()?;
    let geos: Vec<Geometry> = sides
        .iter()
        .map(|&s| Geometry::new(spec, s))
        .collect::<Result<_>>()?;
    let mut ns: Vec<usize> = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    if let (SeriesSpec::ExpIntegral { phi }, Some(&lo), Some(&hi)) = (spec, ns.first(), ns.last()) {
        let ok = subsequence_select(phi, lo, hi, opts.select_tol)?;
        ns.retain(|n| ok.binary_search(n).is_ok());
    }
    if ns.len() < 5 {
        return Err(Error::InvalidParameter(format!(
            "rate fit needs at least 5 usable degrees, have {}",
            ns.len()
        )));
    }
    for &n in &ns {
        spec.check_degree(n)?;
    }
    let sets = zero_sets(spec, &ns)?;
    geos.iter()
        .map(|geo| fit_one(spec, &sets, geo, opts))
        .collect()
}

fn fit_one(
    spec: &SeriesSpec,
    sets: &[ZeroSet],
    geo: &Geometry,
    opts: &FitOptions,
) -> Result<RateFit> {
    let samples: Vec<(usize, f64, usize)> = sets
        .iter()
        .map(|zs| median_statistic(zs, geo, opts).map(|(s, k)| (zs.n, s, k)))
        .collect::<Result<_>>()?;
    let rows: Vec<[f64; 2]> = samples
        .iter()
        .map(|&(n, _, _)| {
            let nf = n as f64;
            [nf.ln() / nf, 1.0 / nf]
        })
        .collect();
    let rhs: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let [fc, fd] = crate::series::least_squares(&rows, &rhs)
        .ok_or_else(|| Error::InvalidParameter("rate fit is singular".into()))?;
    let rel_error = if geo.expected == 0.0 {
        fc.abs()
    } else {
        ((fc - geo.expected) / geo.expected).abs()
    };
    Ok(RateFit {
        family: spec.clone(),
        side: geo.side,
        samples,
        fitted_c: fc,
        fitted_d: fd,
        expected_c: geo.expected,
        rel_error,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ImagAxisReport {
    pub n_list: Vec<usize>,
    pub strip: f64,
    pub limit: f64,
    /// Largest |z| among zeros within `strip` of the imaginary axis, per N.
    pub max_modulus: Vec<f64>,
    pub violations: usize,
}

/// Zeros of s_N(F; Nz) near the imaginary axis should stay in |z| <= 1/(ec).
pub fn imag_axis_check(
    phi: &PhiSpec,
    n_list: &[usize],
    strip: f64,
    slack: f64,
) -> Result<ImagAxisReport> {
    if n_list.is_empty() {
        return Err(Error::InvalidParameter(
            "imag_axis_check needs degrees".into(),
        ));
    }
    let limit = 1.0 / (E * phi.c().to_f64());
    let spec = SeriesSpec::ExpIntegral { phi: phi.clone() };
    let sets = zero_sets(&spec, n_list)?;
    let mut max_modulus = Vec::new();
    let mut violations = 0;
    for zs in &sets {
        let mut m = 0.0f64;
        for (x, y) in zs.all_f64() {
            if x.abs() < strip {
                let r = x.hypot(y);
                m = m.max(r);
                if r > limit + slack {
                    violations += 1;
                }
            }
        }
        max_modulus.push(m);
    }
    Ok(ImagAxisReport {
        n_list: n_list.to_vec(),
        strip,
        limit,
        max_modulus,
        violations,
    })
}
