//! Simultaneous polynomial root finding (Aberth-Ehrlich) with precision
//! escalation, plus Enestrom-Kakeya ring bounds.

use std::fmt::Write as _;

use rug::{Assign, Complex, Float};
use serde::Serialize;

use crate::apnum::{fmt_decimal, APComplex, PrecisionPolicy};
use crate::error::{Error, Result};
use crate::series::{MomentTable, SectionPoly, SeriesSpec};

const MAX_SWEEPS: usize = 500;
const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;

/// Roots of one (usually normalized) section.
#[derive(Clone, Debug)]
pub struct ZeroSet {
    pub spec: Option<SeriesSpec>,
    pub n: usize,
    /// Nonzero roots, sorted by (angle in [0, 2pi), modulus).
    pub zeros: Vec<APComplex>,
    /// Multiplicity of the root at the origin, stripped before iterating.
    pub origin_multiplicity: usize,
    /// |p(z)| / sum |a_k| |z|^k per root.
    pub residuals: Vec<f64>,
    pub bits_used: u32,
}

impl ZeroSet {
    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    pub fn family(&self) -> &str {
        self.spec.as_ref().map_or("custom", |s| s.name())
    }

    /// Every root, origin included, as f64 pairs.
    pub fn all_f64(&self) -> Vec<(f64, f64)> {
        let mut out = vec![(0.0, 0.0); self.origin_multiplicity];
        out.extend(self.zeros.iter().map(|z| z.to_f64_pair()));
        out
    }

    /// The same roots multiplied by `factor` (e.g. back to unnormalized
    /// coordinates with factor R_n).
    pub fn scaled(&self, factor: &APComplex) -> ZeroSet {
        let mut out = self.clone();
        out.zeros = self.zeros.iter().map(|z| z * factor).collect();
        out.zeros
            .sort_by(|a, b| sort_key(a).partial_cmp(&sort_key(b)).unwrap());
        out
    }

    /// CSV rows `family,n,k,re,im,residual`, origin roots first.
    pub fn to_csv_rows(&self, out: &mut String) {
        let fam = self.family();
        let zero = Float::new(53);
        let mut k = 0;
        for _ in 0..self.origin_multiplicity {
            let _ = writeln!(out, "{fam},{},{k},0,0,0", self.n);
            k += 1;
        }
        for (z, r) in self.zeros.iter().zip(&self.residuals) {
            let res = if *r == 0.0 {
                zero.clone()
            } else {
                Float::with_val(53, *r)
            };
            let _ = writeln!(
                out,
                "{fam},{},{k},{},{},{}",
                self.n,
                fmt_decimal(z.re(), 30),
                fmt_decimal(z.im(), 30),
                fmt_decimal(&res, 30)
            );
            k += 1;
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        self.to_csv_rows(&mut s);
        s
    }
}

pub const CSV_HEADER: &str = "family,n,k,re,im,residual";

/// Enestrom-Kakeya ring alpha <= |z| <= beta.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EKBounds {
    pub alpha: f64,
    pub beta: f64,
}

impl EKBounds {
    pub fn contains(&self, modulus: f64, slack: f64) -> bool {
        modulus >= self.alpha * (1.0 - slack) && modulus <= self.beta * (1.0 + slack)
    }
}

fn positive_parts(coeffs: &[APComplex]) -> Result<Vec<Float>> {
    if coeffs.len() < 2 {
        return Err(Error::DegenerateDegree(
            "need at least two coefficients".into(),
        ));
    }
    coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| {
            if c.im().is_zero() && c.re().is_sign_positive() && !c.re().is_zero() {
                Ok(c.re().clone())
            } else {
                Err(Error::Positivity { index: k })
            }
        })
        .collect()
}

/// Min and max of a_k / a_(k+1).
pub fn ek_bounds(coeffs: &[APComplex]) -> Result<EKBounds> {
    let a = positive_parts(coeffs)?;
    let mut alpha = f64::INFINITY;
    let mut beta = 0.0f64;
    for w in a.windows(2) {
        let r = Float::with_val(w[0].prec(), &w[0] / &w[1]).to_f64();
        alpha = alpha.min(r);
        beta = beta.max(r);
    }
    Ok(EKBounds { alpha, beta })
}

/// True when beta a_1 - a_0 > 0, in which case every zero has |z| < beta.
pub fn ek_strict(coeffs: &[APComplex]) -> Result<bool> {
    let a = positive_parts(coeffs)?;
    let bits = a[0].prec();
    let mut beta = Float::new(bits);
    for w in a.windows(2) {
        let r = Float::with_val(bits, &w[0] / &w[1]);
        if r > beta {
            beta = r;
        }
    }
    Ok(Float::with_val(bits, &beta * &a[1]) > a[0])
}

/// Roots of sum coeffs[k] z^k. Coefficients are used as given; each
/// precision level rounds them to its working precision.
pub fn find_zeros(coeffs: &[APComplex], policy: &PrecisionPolicy) -> Result<ZeroSet> {
    find_zeros_with(|_| Ok(coeffs.to_vec()), policy)
}

/// Zeros of the normalized section s_n(spec; R_n z). Coefficients are
/// recomputed when a precision level outgrows them.
pub fn section_zeros(spec: &SeriesSpec, n: usize, policy: &PrecisionPolicy) -> Result<ZeroSet> {
    let mut cache: Option<(u32, Vec<APComplex>)> = None;
    let mut zs = find_zeros_with(
        |bits| {
            if let Some((have, c)) = &cache {
                if *have >= bits {
                    return Ok(c.clone());
                }
            }
            // one level of headroom so the agreement rerun reuses them
            let b = 2 * bits;
            let c = SectionPoly::new(spec, n, b)?.normalized();
            cache = Some((b, c.clone()));
            Ok(c)
        },
        policy,
    )?;
    zs.spec = Some(spec.clone());
    zs.n = n;
    Ok(zs)
}

/// Zeros of the normalized degree-n section of an exponential integral,
/// taking coefficients from a shared moment table.
pub fn section_zeros_from_moments(
    table: &MomentTable,
    n: usize,
    policy: &PrecisionPolicy,
) -> Result<ZeroSet> {
    let section = SectionPoly::from_moments(table, n)?;
    let coeffs = section.normalized();
    let mut zs = find_zeros(&coeffs, policy)?;
    zs.spec = Some(section.spec);
    zs.n = n;
    Ok(zs)
}

/// Shared driver: `coeffs_at(bits)` must return coefficients accurate to at
/// least `bits`.
pub fn find_zeros_with<F>(mut coeffs_at: F, policy: &PrecisionPolicy) -> Result<ZeroSet>
where
    F: FnMut(u32) -> Result<Vec<APComplex>>,
{
    let mut bits = policy.start_bits;
    let mut prev: Option<Vec<Complex>> = None;
    let mut seed: Option<Vec<Complex>> = None;
    let mut detail = String::from("no level converged");
    while bits <= policy.max_bits {
        let raw = coeffs_at(bits)?;
        let (poly, lead_zeros) = strip(&raw, bits)?;
        let n_total = raw.len() - 1;
        let origin = lead_zeros;
        if poly.len() == 1 {
            return Ok(ZeroSet {
                spec: None,
                n: n_total,
                zeros: Vec::new(),
                origin_multiplicity: origin,
                residuals: Vec::new(),
                bits_used: bits,
            });
        }
        let mut roots = match seed.take() {
            Some(s) if s.len() == poly.len() - 1 => {
                s.into_iter().map(|z| Complex::with_val(bits, z)).collect()
            }
            _ => rough_roots(&poly, bits),
        };
        let converged = aberth(&poly, &mut roots, bits, MAX_SWEEPS);
        if converged {
            if let Some(p) = &prev {
                match agreement(p, &roots, policy.agreement_tol) {
                    Ok(()) => return Ok(finish(&poly, roots, n_total, origin, bits)),
                    Err(worst) => detail = format!("levels disagree by {worst:e} at {bits} bits"),
                }
            }
            prev = Some(roots.clone());
        } else {
            detail = format!("stagnated after {MAX_SWEEPS} sweeps at {bits} bits");
            prev = None;
        }
        seed = Some(roots);
        bits *= 2;
    }
    Err(Error::RootNoConvergence {
        max_bits: policy.max_bits,
        detail,
    })
}

/// Drops high-order zero coefficients and factors out z^m.
fn strip(raw: &[APComplex], bits: u32) -> Result<(Vec<Complex>, usize)> {
    if raw.len() < 2 {
        return Err(Error::DegenerateDegree(
            "need at least two coefficients".into(),
        ));
    }
    let hi = raw
        .iter()
        .rposition(|c| !c.is_zero())
        .ok_or_else(|| Error::DegenerateDegree("all coefficients vanish".into()))?;
    let lo = raw
        .iter()
        .position(|c| !c.is_zero())
        .expect("nonzero exists");
    let poly = raw[lo..=hi]
        .iter()
        .map(|c| Complex::with_val(bits, c.as_complex()))
        .collect();
    Ok((poly, lo))
}

/// Circle of radius |a_0/a_d|^(1/d), golden-angle spaced.
fn initial_guesses(poly: &[Complex], bits: u32) -> Vec<Complex> {
    let d = poly.len() - 1;
    let a0 = Float::with_val(bits, poly[0].abs_ref());
    let ad = Float::with_val(bits, poly[d].abs_ref());
    let r = (a0 / ad).ln().to_f64() / d as f64;
    let r = r.exp();
    (0..d)
        .map(|k| {
            let th = 0.4 + k as f64 * GOLDEN_ANGLE;
            Complex::with_val(bits, (r * th.cos(), r * th.sin()))
        })
        .collect()
}

/// Starting points for a full-precision run: Aberth at a quarter of the
/// precision from the circle guesses.
fn rough_roots(poly: &[Complex], bits: u32) -> Vec<Complex> {
    let low = (bits / 4).max(64);
    if low >= bits {
        return initial_guesses(poly, bits);
    }
    let p: Vec<Complex> = poly.iter().map(|c| Complex::with_val(low, c)).collect();
    let mut roots = initial_guesses(&p, low);
    aberth(&p, &mut roots, low, 100);
    if roots
        .iter()
        .all(|z| z.real().is_finite() && z.imag().is_finite())
    {
        roots
            .into_iter()
            .map(|z| Complex::with_val(bits, z))
            .collect()
    } else {
        initial_guesses(poly, bits)
    }
}

/// p(z) and p'(z) by Horner.
fn horner2(poly: &[Complex], z: &Complex, p: &mut Complex, dp: &mut Complex) {
    p.assign(&poly[poly.len() - 1]);
    dp.assign(0);
    for c in poly.iter().rev().skip(1) {
        *dp *= z;
        *dp += &*p;
        *p *= z;
        *p += c;
    }
}

/// |p(z)| / sum |a_k| |z|^k.
fn backward_error(poly: &[Complex], z: &Complex) -> Float {
    let bits = z.prec().0;
    let mut p = Complex::new(bits);
    let mut dp = Complex::new(bits);
    horner2(poly, z, &mut p, &mut dp);
    let r = Float::with_val(bits, z.abs_ref());
    let mut s = Float::new(bits);
    for c in poly.iter().rev() {
        s *= &r;
        s += Float::with_val(bits, c.abs_ref());
    }
    if s.is_zero() {
        return s;
    }
    Float::with_val(bits, p.abs_ref()) / s
}

/// Gauss-Seidel Aberth sweeps. Returns false on stagnation.
fn aberth(poly: &[Complex], roots: &mut [Complex], bits: u32, max_sweeps: usize) -> bool {
    let d = roots.len();
    let tol = Float::with_val(bits, Float::i_exp(1, -((bits / 2) as i32)));
    let mut done = vec![false; d];
    let mut p = Complex::new(bits);
    let mut dp = Complex::new(bits);
    let mut s = Complex::new(bits);
    let mut t = Complex::new(bits);
    let mut polish = false;
    for _ in 0..max_sweeps {
        for i in 0..d {
            if done[i] && !polish {
                continue;
            }
            horner2(poly, &roots[i], &mut p, &mut dp);
            if p.is_zero() {
                done[i] = true;
                continue;
            }
            s.assign(0);
            for j in 0..d {
                if j != i {
                    t.assign(&roots[i] - &roots[j]);
                    if t.is_zero() {
                        continue;
                    }
                    t.recip_mut();
                    s += &t;
                }
            }
            // w = p/p', correction = w / (1 - w s)
            let w = if dp.is_zero() {
                Complex::with_val(bits, &p)
            } else {
                Complex::with_val(bits, &p / &dp)
            };
            t.assign(&w * &s);
            let denom = Complex::with_val(bits, 1 - &t);
            let corr = if denom.is_zero() { w } else { w / denom };
            roots[i] -= &corr;
            if !(roots[i].real().is_finite() && roots[i].imag().is_finite()) {
                return false;
            }
            let small = Float::with_val(bits, corr.abs_ref())
                <= Float::with_val(bits, roots[i].abs_ref()) * &tol;
            done[i] = small && backward_error(poly, &roots[i]) <= tol;
        }
        if polish {
            return true;
        }
        if done.iter().all(|&b| b) {
            polish = true;
        }
    }
    false
}

/// Greedy nearest matching; Err carries the worst relative gap.
fn agreement(a: &[Complex], b: &[Complex], tol: f64) -> std::result::Result<(), f64> {
    if a.len() != b.len() {
        return Err(f64::INFINITY);
    }
    let pa: Vec<(f64, f64)> = a
        .iter()
        .map(|z| (z.real().to_f64(), z.imag().to_f64()))
        .collect();
    let pb: Vec<(f64, f64)> = b
        .iter()
        .map(|z| (z.real().to_f64(), z.imag().to_f64()))
        .collect();
    let mut used = vec![false; pb.len()];
    let mut worst = 0.0f64;
    for x in &pa {
        let mut best = (f64::INFINITY, usize::MAX);
        for (j, y) in pb.iter().enumerate() {
            if !used[j] {
                let d = (x.0 - y.0).hypot(x.1 - y.1);
                if d < best.0 {
                    best = (d, j);
                }
            }
        }
        used[best.1] = true;
        let scale = x.0.hypot(x.1).max(pb[best.1].0.hypot(pb[best.1].1));
        let rel = if scale > 0.0 { best.0 / scale } else { best.0 };
        worst = worst.max(rel);
    }
    if worst <= tol {
        Ok(())
    } else {
        Err(worst)
    }
}

fn sort_key(z: &APComplex) -> (f64, f64) {
    let (re, im) = z.to_f64_pair();
    let mut th = im.atan2(re).rem_euclid(std::f64::consts::TAU);
    if th >= std::f64::consts::TAU - 1e-14 {
        th = 0.0;
    }
    (th, re.hypot(im))
}

fn finish(poly: &[Complex], roots: Vec<Complex>, n: usize, origin: usize, bits: u32) -> ZeroSet {
    let mut pairs: Vec<(APComplex, f64)> = roots
        .into_iter()
        .map(|z| {
            let r = backward_error(poly, &z).to_f64();
            (APComplex::from_complex_unchecked(z), r)
        })
        .collect();
    pairs.sort_by(|a, b| sort_key(&a.0).partial_cmp(&sort_key(&b.0)).unwrap());
    let (zeros, residuals) = pairs.into_iter().unzip();
    ZeroSet {
        spec: None,
        n,
        zeros,
        origin_multiplicity: origin,
        residuals,
        bits_used: bits,
    }
}

#[cfg(test)]
mod tests;
