//! Checks on sections of the exponential and its relatives.

use std::f64::consts::{E, PI, TAU};

use rayon::prelude::*;
use rug::{Complex, Float};
use serde::Serialize;

use crate::apnum::{erfc, APComplex, PrecisionPolicy};
use crate::curves::{maxdist, sample_curve, CurveSpec, Exclusion, Polyline, DEFAULT_SAMPLES};
use crate::error::{Error, Result};
use crate::roots::{section_zeros, ZeroSet};
use crate::series::{Exact, SeriesSpec};

use super::loglog_slope;

/// s_n(exp; x) by direct summation at `bits`.
pub fn exp_section(n: usize, x: &APComplex, bits: u32) -> APComplex {
    let mut term = Complex::with_val(bits, 1);
    let mut sum = Complex::with_val(bits, 1);
    for k in 1..=n {
        term *= x.as_complex();
        term /= k as u32;
        sum += &term;
    }
    APComplex::from_complex_unchecked(sum)
}

/// g_n(z) = 1 - e^(-nz) s_n(exp; nz).
pub fn g_n_exact(n: usize, z: &APComplex) -> APComplex {
    let bits = z.precision_bits();
    let nz = z.scale(&Float::with_val(bits, n));
    if z.abs_f64() < 1.0 {
        // e^(-nz) times the tail, which has no cancellation here
        let wp = bits + 32;
        let x = nz.with_precision(wp);
        let mut term = exp_section(0, &x, wp).into_complex();
        for k in 1..=n {
            term *= x.as_complex();
            term /= k as u32;
        }
        let mut tail = Complex::new(wp);
        let eps = Float::with_val(wp, Float::i_exp(1, -(wp as i32)));
        let mut k = n + 1;
        loop {
            term *= x.as_complex();
            term /= k as u32;
            tail += &term;
            let small =
                Float::with_val(wp, term.abs_ref()) <= Float::with_val(wp, tail.abs_ref()) * &eps;
            if (small && k > 2 * n) || term.is_zero() {
                break;
            }
            k += 1;
        }
        let e = Complex::with_val(wp, -x.as_complex()).exp();
        return APComplex::from_complex_unchecked(Complex::with_val(bits, tail * e));
    }
    let wp = bits + 2 * n as u32 + 32;
    let x = nz.with_precision(wp);
    let s = exp_section(n, &x, wp).into_complex();
    let e = Complex::with_val(wp, -x.as_complex()).exp();
    let g = Complex::with_val(wp, 1 - Complex::with_val(wp, s * e));
    APComplex::from_complex_unchecked(Complex::with_val(bits, g))
}

/// Leading Szego approximation (z e^(1-z))^n / sqrt(2 pi n) * z/(1-z).
pub fn g_n_szego(n: usize, z: &APComplex) -> Result<APComplex> {
    let bits = z.precision_bits();
    if z.is_zero() {
        return Ok(APComplex::zero(bits));
    }
    if *z.re() >= 1 {
        return Err(Error::Domain(format!("g_n_szego needs Re z < 1, got {z}")));
    }
    let one = APComplex::one(bits);
    let w = z * &(&one - z).exp();
    let pw = w.powi(n as i32);
    let root = Float::with_val(bits, 2 * n as u32) * crate::apnum::pi(bits);
    let root = root.sqrt();
    let ratio = (z / &(&one - z)).scale(&Float::with_val(bits, root.recip_ref()));
    Ok(&pw * &ratio)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub n_list: Vec<usize>,
    pub sup_diff: Vec<f64>,
    pub decreasing: bool,
}

/// The half-disk grid {|w| <= radius, Im w >= 0} with the given step.
pub fn nr_grid(radius: f64, step: f64) -> Vec<(f64, f64)> {
    let k = (radius / step).floor() as i64;
    let mut out = Vec::new();
    for j in 0..=k {
        for i in -k..=k {
            let w = (i as f64 * step, j as f64 * step);
            if w.0.hypot(w.1) <= radius + 1e-12 {
                out.push(w);
            }
        }
    }
    out
}

/// sup over the grid of |s_n(exp; n + w sqrt n) e^-(n + w sqrt n) - erfc(w/sqrt 2)/2|.
pub fn nr_limit_check(
    n_list: &[usize],
    grid: &[(f64, f64)],
    bits: u32,
) -> Result<ConvergenceReport> {
    let sup_diff: Vec<f64> = n_list
        .par_iter()
        .map(|&n| {
            let wp = bits + 32;
            let sq = Float::with_val(wp, n).sqrt();
            let inv_sqrt2 = Float::with_val(wp, 2).sqrt().recip();
            let mut sup = 0.0f64;
            for &(u, v) in grid {
                let w = APComplex::new(u, v, wp);
                let x = &APComplex::from_real(&Float::with_val(wp, n), wp) + &w.scale(&sq);
                let s = exp_section(n, &x, wp);
                let lhs = &s * &(-&x).exp();
                let half = Float::with_val(wp, 0.5);
                let rhs = erfc(&w.scale(&inv_sqrt2))?.scale(&half);
                sup = sup.max((&lhs - &rhs).abs_f64());
            }
            Ok(sup)
        })
        .collect::<Result<_>>()?;
    let decreasing = sup_diff.windows(2).all(|w| w[1] < w[0]);
    Ok(ConvergenceReport {
        n_list: n_list.to_vec(),
        sup_diff,
        decreasing,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ErfcZero {
    pub t: (f64, f64),
    #[serde(skip)]
    pub t_exact: APComplex,
    /// w = sqrt(2) t = u + iv: the zeros of s_n(exp; z) near z = n lie near
    /// the parabola x = (y/v)^2 + u (y/v) in the scaled coordinates.
    pub u: f64,
    pub v: f64,
}

fn erfc_newton(seed: (f64, f64), bits: u32) -> Result<APComplex> {
    let mut t = APComplex::new(seed.0, seed.1, bits);
    let two_over_sqrt_pi = Float::with_val(bits, 2) / crate::apnum::pi(bits).sqrt();
    for _ in 0..100 {
        let f = erfc(&t)?;
        // erfc'(t) = -2/sqrt(pi) e^(-t^2)
        let d = (-&(&t * &t)).exp().scale(&two_over_sqrt_pi);
        let step = &f / &d;
        t = &t + &step;
        if step.abs_f64() <= t.abs_f64() * 2f64.powi(-(bits as i32) + 16) {
            return Ok(t);
        }
        if !t.abs_f64().is_finite() || t.abs_f64() > 1e3 {
            break;
        }
    }
    Err(Error::NewtonNoConvergence("erfc zero".into()))
}

/// The k-th zero of erfc in the upper half-plane, ordered by modulus.
pub fn erfc_parabola(k: usize) -> Result<ErfcZero> {
    if k == 0 {
        return Err(Error::InvalidParameter("zeros are numbered from 1".into()));
    }
    let bits = 128;
    let mut found: Vec<APComplex> = Vec::new();
    let mut rho_max = 3.0;
    loop {
        // local minima of |erfc| on a polar grid around the ray arg t = 2.17,
        // where the zeros accumulate, refined by Newton
        let drho = 0.05;
        let phis: Vec<f64> = (0..=60).map(|j| PI / 2.0 + j as f64 * PI / 120.0).collect();
        let rhos: Vec<f64> = (1..=(rho_max / drho) as usize)
            .map(|j| j as f64 * drho)
            .collect();
        let grid: Vec<Vec<f64>> = rhos
            .par_iter()
            .map(|&r| {
                phis.iter()
                    .map(|&p| {
                        let t = APComplex::new(r * p.cos(), r * p.sin(), 64);
                        erfc(&t).map_or(f64::INFINITY, |v| v.abs_f64())
                    })
                    .collect()
            })
            .collect();
        let mut seeds = Vec::new();
        for i in 1..rhos.len() - 1 {
            for j in 1..phis.len() - 1 {
                let v = grid[i][j];
                let neighbours = [
                    grid[i - 1][j],
                    grid[i + 1][j],
                    grid[i][j - 1],
                    grid[i][j + 1],
                ];
                if neighbours.iter().all(|&x| v < x) {
                    seeds.push((rhos[i] * phis[j].cos(), rhos[i] * phis[j].sin()));
                }
            }
        }
        found.clear();
        for s in seeds {
            if let Ok(t) = erfc_newton(s, bits) {
                if *t.im() > 0 && !found.iter().any(|f| (f - &t).abs_f64() < 1e-12) {
                    found.push(t);
                }
            }
        }
        found.sort_by(|a, b| a.abs_f64().partial_cmp(&b.abs_f64()).unwrap());
        // zeros beyond the scanned disk could still be smaller than a found
        // one only if they were missed; require a margin
        let inside = found.iter().filter(|t| t.abs_f64() < rho_max - 0.5).count();
        if inside >= k {
            break;
        }
        rho_max += 2.0;
        if rho_max > 40.0 {
            return Err(Error::NewtonNoConvergence("erfc zero".into()));
        }
    }
    let t = found[k - 1].clone();
    let (tr, ti) = t.to_f64_pair();
    let s2 = std::f64::consts::SQRT_2;
    Ok(ErfcZero {
        t: (tr, ti),
        t_exact: t,
        u: s2 * tr,
        v: s2 * ti,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Buckholtz {
    pub n: usize,
    pub all_outside: bool,
    pub maxdist: f64,
    pub bound: f64,
}

/// Zeros of s_n(exp; nz) against D = {|z e^(1-z)| <= 1, |z| <= 1}.
pub fn buckholtz_check(n: usize, curve: &Polyline) -> Result<Buckholtz> {
    if n == 0 {
        return Err(Error::InvalidParameter("n >= 1".into()));
    }
    let zs = section_zeros(&SeriesSpec::Exp, n, &PrecisionPolicy::for_degree(n))?;
    let all_outside = zs.zeros.iter().all(|z| {
        let bits = z.precision_bits();
        let r = z.abs();
        let m = Float::with_val(bits, 1 - z.re()).exp() * &r;
        m > 1 || r > 1
    });
    Ok(Buckholtz {
        n,
        all_outside,
        maxdist: maxdist(&zs, curve, &[]).value,
        bound: 2.0 * E / (n as f64).sqrt(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CvwReport {
    pub n_list: Vec<usize>,
    pub delta: f64,
    pub maxdist_d: Vec<f64>,
    pub maxdist_dn: Vec<f64>,
    pub slope_vs_d: f64,
    pub slope_vs_dn: f64,
}

/// maxdist of the zeros of s_n(exp; nz) outside the disk |z - 1| < delta to
/// D and to D_n, with log-log slopes against n.
pub fn cvw_order_check(n_list: &[usize], delta: f64) -> Result<CvwReport> {
    if n_list.len() < 5 || !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParameter(
            "cvw needs at least 5 degrees and delta in (0, 1]".into(),
        ));
    }
    let d = sample_curve(&CurveSpec::ExpSzego, DEFAULT_SAMPLES)?;
    let excl = [Exclusion::disk(1.0, 0.0, delta)];
    let rows: Vec<(f64, f64)> = n_list
        .par_iter()
        .map(|&n| {
            let zs = section_zeros(&SeriesSpec::Exp, n, &PrecisionPolicy::for_degree(n))?;
            let dn = sample_curve(&CurveSpec::IntermediateExp { n }, DEFAULT_SAMPLES)?;
            let a = maxdist(&zs, &d, &excl);
            let b = maxdist(&zs, &dn, &excl);
            if a.empty {
                return Err(Error::InsufficientZeros {
                    n,
                    kept: 0,
                    need: 1,
                });
            }
            Ok((a.value, b.value))
        })
        .collect::<Result<_>>()?;
    let ns: Vec<f64> = n_list.iter().map(|&n| n as f64).collect();
    let md: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let mdn: Vec<f64> = rows.iter().map(|r| r.1).collect();
    Ok(CvwReport {
        n_list: n_list.to_vec(),
        delta,
        slope_vs_d: loglog_slope(&ns, &md),
        slope_vs_dn: loglog_slope(&ns, &mdn),
        maxdist_d: md,
        maxdist_dn: mdn,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DilcherRubel {
    pub n: usize,
    pub all_in_annulus: bool,
    pub min_mod: f64,
    pub max_mod: f64,
    pub inner: f64,
}

/// Zeros of p_n(ez/n), p_n the n-th section of sum k! z^k, against the
/// annulus 1 - 3/sqrt(n) < |z| < 1.
pub fn dilcher_rubel_check(n: usize) -> Result<DilcherRubel> {
    if n <= 97 {
        return Err(Error::Precondition(format!(
            "annulus bound needs n > 97, got {n}"
        )));
    }
    let zs = section_zeros(&SeriesSpec::Divergent, n, &PrecisionPolicy::for_degree(n))?;
    let inner = 1.0 - 3.0 / (n as f64).sqrt();
    let inner_f = Float::with_val(128, 3) / Float::with_val(128, n).sqrt();
    let inner_f = Float::with_val(128, 1 - inner_f);
    let mut all = zs.origin_multiplicity == 0;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for z in &zs.zeros {
        let r = z.abs();
        all &= r > inner_f && r < 1;
        lo = lo.min(r.to_f64());
        hi = hi.max(r.to_f64());
    }
    Ok(DilcherRubel {
        n,
        all_in_annulus: all,
        min_mod: lo,
        max_mod: hi,
        inner,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LftReport {
    pub n: usize,
    /// max |z^(n+1) a_1 / (A a_0 + B z) - 1| over kept zeros.
    pub relation: f64,
    /// max ||z| - 1| over kept zeros.
    pub modulus_dev: f64,
    pub all_inside: bool,
    pub kept: usize,
}

/// Zeros of s_n(f; z/A) for a_n = A^(n-1) a_1, a_1 = A a_0 + B, outside the
/// half-strip {Re z <= 0, |Im z| <= delta}.
pub fn lft_relation_check(
    n: usize,
    a0: &Exact,
    growth: &Exact,
    shift: &Exact,
    delta: f64,
) -> Result<LftReport> {
    if !(a0.is_positive() && growth.is_positive() && shift.is_positive()) {
        return Err(Error::InvalidParameter(
            "a0, A and B must be positive".into(),
        ));
    }
    let spec = SeriesSpec::Lft {
        a0: a0.clone(),
        growth: growth.clone(),
        shift: shift.clone(),
    };
    let zs = section_zeros(&spec, n, &PrecisionPolicy::for_degree(n))?;
    let bits = zs.bits_used;
    let a0f = a0.to_float(bits);
    let af = growth.to_float(bits);
    let bf = shift.to_float(bits);
    let a1 = Float::with_val(bits, &af * &a0f) + &bf;
    let excl = Exclusion::HalfStrip {
        x_max: 0.0,
        half_width: delta,
    };
    let mut out = LftReport {
        n,
        relation: 0.0,
        modulus_dev: 0.0,
        all_inside: true,
        kept: 0,
    };
    for z in &zs.zeros {
        out.all_inside &= z.abs() < 1;
        if excl.contains(z.to_f64_pair()) {
            continue;
        }
        out.kept += 1;
        let lhs = z.powi(n as i32 + 1).scale(&a1);
        let rhs = &APComplex::from_real(&Float::with_val(bits, &af * &a0f), bits) + &z.scale(&bf);
        let rel = (&(&lhs / &rhs) - &APComplex::one(bits)).abs_f64();
        out.relation = out.relation.max(rel);
        out.modulus_dev = out.modulus_dev.max((z.abs_f64() - 1.0).abs());
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CountMode {
    /// theta1 <= arg z < theta2 with arg in [0, 2pi).
    Sector { theta1: f64, theta2: f64 },
    /// |z| <= radius.
    Disk { radius: f64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct CountReport {
    pub n: usize,
    #[serde(flatten)]
    pub mode: CountMode,
    pub count: usize,
    pub total: usize,
    pub fraction: f64,
}

/// Zeros (origin included) in a sector or disk.
pub fn counts(zeros: &ZeroSet, mode: CountMode) -> Result<CountReport> {
    if let CountMode::Sector { theta1, theta2 } = mode {
        if !(theta1 < theta2) {
            return Err(Error::InvalidParameter(
                "sector needs theta1 < theta2".into(),
            ));
        }
    }
    let pts = zeros.all_f64();
    let count = pts
        .iter()
        .filter(|&&(x, y)| match mode {
            CountMode::Sector { theta1, theta2 } => {
                if x == 0.0 && y == 0.0 {
                    return theta2 - theta1 >= TAU;
                }
                let t = y.atan2(x).rem_euclid(TAU);
                (t >= theta1 && t < theta2) || (t + TAU >= theta1 && t + TAU < theta2)
            }
            CountMode::Disk { radius } => x.hypot(y) <= radius,
        })
        .count();
    let total = pts.len();
    Ok(CountReport {
        n: zeros.n,
        mode,
        count,
        total,
        fraction: if total == 0 {
            0.0
        } else {
            count as f64 / total as f64
        },
    })
}
