//! Power-series families: section coefficients, scale factors and values.

mod exact;
mod phi;

use std::fmt;

use rug::{Complex, Float, Rational};
use serde::{Deserialize, Serialize};

use crate::apnum::{gamma, APComplex};
use crate::error::{Error, Result};

pub use exact::{Exact, ExactComplex};
#[cfg(test)]
use phi::real_pow;
pub use phi::{moment_asymptotic, moments, subsequence_select, MomentMethod, MomentTable, PhiSpec};

/// One function family with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", try_from = "raw::RawSpec")]
pub enum SeriesSpec {
    Exp,
    Cos,
    Sin,
    /// E_{1/lambda}, the Mittag-Leffler function of order lambda.
    MittagLeffler {
        lambda: Exact,
    },
    /// 1F1(1; b; z) = Gamma(b) sum z^k / Gamma(k + b).
    #[serde(rename = "confluent_1f1")]
    Confluent1F1 {
        b: ExactComplex,
    },
    /// J_alpha without its (z/2)^alpha prefactor.
    Bessel {
        alpha: ExactComplex,
    },
    /// sum k! z^k, convergent only at 0.
    Divergent,
    /// a_1 = A a_0 + B, a_k = A^(k-1) a_1.
    #[serde(rename = "lft")]
    Lft {
        a0: Exact,
        #[serde(rename = "A")]
        growth: Exact,
        #[serde(rename = "B")]
        shift: Exact,
    },
    /// 1/(1-z)^2 = sum (k+1) z^k.
    RationalSquare,
    /// F(z) = integral of phi(t) e^(zt) over [-a, b].
    ExpIntegral {
        phi: PhiSpec,
    },
}

mod raw {
    use super::*;

    #[derive(Deserialize)]
    #[serde(tag = "family", rename_all = "snake_case")]
    pub enum RawSpec {
        Exp,
        Cos,
        Sin,
        MittagLeffler {
            lambda: Exact,
        },
        #[serde(rename = "confluent_1f1")]
        Confluent1F1 {
            b: ExactComplex,
        },
        Bessel {
            alpha: ExactComplex,
        },
        Divergent,
        #[serde(rename = "lft")]
        Lft {
            a0: Exact,
            #[serde(rename = "A")]
            growth: Exact,
            #[serde(rename = "B")]
            shift: Exact,
        },
        RationalSquare,
        ExpIntegral {
            phi: PhiSpec,
        },
    }

    impl TryFrom<RawSpec> for SeriesSpec {
        type Error = Error;
        fn try_from(r: RawSpec) -> Result<Self> {
            let spec = match r {
                RawSpec::Exp => SeriesSpec::Exp,
                RawSpec::Cos => SeriesSpec::Cos,
                RawSpec::Sin => SeriesSpec::Sin,
                RawSpec::MittagLeffler { lambda } => SeriesSpec::MittagLeffler { lambda },
                RawSpec::Confluent1F1 { b } => SeriesSpec::Confluent1F1 { b },
                RawSpec::Bessel { alpha } => SeriesSpec::Bessel { alpha },
                RawSpec::Divergent => SeriesSpec::Divergent,
                RawSpec::Lft { a0, growth, shift } => SeriesSpec::Lft { a0, growth, shift },
                RawSpec::RationalSquare => SeriesSpec::RationalSquare,
                RawSpec::ExpIntegral { phi } => SeriesSpec::ExpIntegral { phi },
            };
            spec.validate()?;
            Ok(spec)
        }
    }
}

/// Names accepted by [`SeriesSpec::preset`].
pub const PRESET_NAMES: &[&str] = &[
    "exp",
    "cos",
    "sin",
    "divergent",
    "rational_square",
    "mittag_leffler",
    "confluent_1f1",
    "bessel",
    "lft",
    "F1",
    "F2",
    "F3",
    "phi1",
];

impl SeriesSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        match self {
            SeriesSpec::MittagLeffler { lambda } if !lambda.is_positive() => bad(format!(
                "Mittag-Leffler order must be positive, got {lambda}"
            )),
            SeriesSpec::Confluent1F1 { b } if b.re.0 <= 1 => {
                bad(format!("1F1 needs Re(b) > 1, got {b}"))
            }
            SeriesSpec::Bessel { alpha } if alpha.re.0 <= Rational::from((-1, 2)) => {
                bad(format!("Bessel needs Re(alpha) > -1/2, got {alpha}"))
            }
            SeriesSpec::Lft { a0, growth, shift }
                if !(a0.is_positive() && growth.is_positive() && shift.is_positive()) =>
            {
                bad("LFT needs a0, A, B > 0".into())
            }
            _ => Ok(()),
        }
    }

    /// Named families with default parameters; anything else is parsed as JSON.
    pub fn preset(name: &str) -> Result<Self> {
        let one = Exact::int(1);
        Ok(match name {
            "exp" => SeriesSpec::Exp,
            "cos" => SeriesSpec::Cos,
            "sin" => SeriesSpec::Sin,
            "divergent" => SeriesSpec::Divergent,
            "rational_square" => SeriesSpec::RationalSquare,
            "mittag_leffler" => SeriesSpec::MittagLeffler {
                lambda: Exact::ratio(1, 2),
            },
            "confluent_1f1" => SeriesSpec::Confluent1F1 {
                b: ExactComplex::int(3),
            },
            "bessel" => SeriesSpec::Bessel {
                alpha: ExactComplex::int(0),
            },
            "lft" => SeriesSpec::Lft {
                a0: one.clone(),
                growth: one.clone(),
                shift: one,
            },
            "F1" => SeriesSpec::ExpIntegral { phi: PhiSpec::f1() },
            "F2" => SeriesSpec::ExpIntegral { phi: PhiSpec::f2() },
            "F3" => SeriesSpec::ExpIntegral { phi: PhiSpec::f3() },
            "phi1" => SeriesSpec::ExpIntegral {
                phi: PhiSpec::unit(),
            },
            _ => {
                let text = name.trim();
                if text.starts_with('{') {
                    return Ok(serde_json::from_str(text)?);
                }
                return Err(Error::Config(format!(
                    "unknown family {name:?}; expected JSON or one of {}",
                    PRESET_NAMES.join(", ")
                )));
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            SeriesSpec::Exp => "exp",
            SeriesSpec::Cos => "cos",
            SeriesSpec::Sin => "sin",
            SeriesSpec::MittagLeffler { .. } => "mittag_leffler",
            SeriesSpec::Confluent1F1 { .. } => "confluent_1f1",
            SeriesSpec::Bessel { .. } => "bessel",
            SeriesSpec::Divergent => "divergent",
            SeriesSpec::Lft { .. } => "lft",
            SeriesSpec::RationalSquare => "rational_square",
            SeriesSpec::ExpIntegral { .. } => "exp_integral",
        }
    }

    pub fn is_entire(&self) -> bool {
        !matches!(
            self,
            SeriesSpec::Divergent | SeriesSpec::Lft { .. } | SeriesSpec::RationalSquare
        )
    }

    pub fn check_degree(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "section degree must be at least 1".into(),
            ));
        }
        if matches!(self, SeriesSpec::Bessel { .. }) && n % 2 == 1 {
            return Err(Error::Parity(format!(
                "Bessel sections need even n, got {n}"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for SeriesSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match serde_json::to_string(self) {
            Ok(s) => f.write_str(&s),
            Err(_) => f.write_str(self.name()),
        }
    }
}

/// Section coefficients a_0..a_n.
pub fn coefficients(spec: &SeriesSpec, n: usize, bits: u32) -> Result<Vec<APComplex>> {
    spec.check_degree(n)?;
    if let SeriesSpec::ExpIntegral { phi } = spec {
        let table = moments(phi, n, bits)?;
        return Ok(coefficients_from_moments(&table, n));
    }
    coefficients_closed(spec, n, bits)
}

/// a_k = m_k / k! from a precomputed table.
pub fn coefficients_from_moments(table: &MomentTable, n: usize) -> Vec<APComplex> {
    let bits = table.bits;
    let mut fact = Float::with_val(bits, 1);
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        if k > 0 {
            fact *= k as u32;
        }
        out.push(APComplex::from_complex_unchecked(Complex::with_val(
            bits,
            table.values[k].as_complex() / &fact,
        )));
    }
    out
}

fn coefficients_closed(spec: &SeriesSpec, n: usize, bits: u32) -> Result<Vec<APComplex>> {
    let wp = bits + 16;
    let mut out: Vec<Complex> = Vec::with_capacity(n + 1);
    match spec {
        SeriesSpec::Exp | SeriesSpec::Cos | SeriesSpec::Sin => {
            let mut inv_fact = Float::with_val(wp, 1);
            for k in 0..=n {
                if k > 0 {
                    inv_fact /= k as u32;
                }
                let v = match spec {
                    SeriesSpec::Exp => inv_fact.clone(),
                    SeriesSpec::Cos if k % 2 == 0 => sign(k / 2) * inv_fact.clone(),
                    SeriesSpec::Sin if k % 2 == 1 => sign((k - 1) / 2) * inv_fact.clone(),
                    _ => Float::new(wp),
                };
                out.push(Complex::with_val(wp, v));
            }
        }
        SeriesSpec::MittagLeffler { lambda } => {
            for k in 0..=n {
                let arg = Rational::from(k) / &lambda.0 + 1u32;
                let g = Float::with_val(wp, Float::with_val(wp, &arg).gamma_ref());
                out.push(Complex::with_val(wp, g.recip()));
            }
        }
        SeriesSpec::Confluent1F1 { b } => {
            // Gamma(b)/Gamma(k+b) = 1/((b)(b+1)...(b+k-1))
            let bc = b.to_complex(wp);
            let mut c = Complex::with_val(wp, 1);
            for k in 0..=n {
                if k > 0 {
                    c /= Complex::with_val(wp, &bc + (k as u32 - 1));
                }
                out.push(c.clone());
            }
        }
        SeriesSpec::Bessel { alpha } => {
            // coefficient of z^(2k): (-1)^k / (4^k k! Gamma(k + alpha + 1))
            let mut g = gamma(&APComplex::from_complex_unchecked(Complex::with_val(
                wp,
                alpha.to_complex(wp) + 1u32,
            )))?
            .into_complex();
            let ac = alpha.to_complex(wp);
            let mut c = Complex::with_val(wp, g.recip_ref());
            for k in 0..=n {
                if k % 2 == 1 {
                    out.push(Complex::new(wp));
                    continue;
                }
                let j = (k / 2) as u32;
                if j > 0 {
                    g *= Complex::with_val(wp, &ac + j);
                    c = Complex::with_val(wp, g.recip_ref());
                    let mut scale = Float::with_val(wp, 1);
                    for i in 1..=j {
                        scale *= 4 * i;
                    }
                    c /= scale;
                }
                out.push(if j % 2 == 1 { -c.clone() } else { c.clone() });
            }
        }
        SeriesSpec::Divergent => {
            let mut f = Float::with_val(wp, 1);
            for k in 0..=n {
                if k > 0 {
                    f *= k as u32;
                }
                out.push(Complex::with_val(wp, &f));
            }
        }
        SeriesSpec::Lft { a0, growth, shift } => {
            let a0f = a0.to_float(wp);
            let af = growth.to_float(wp);
            let a1 = Float::with_val(wp, &af * &a0f) + shift.to_float(wp);
            out.push(Complex::with_val(wp, &a0f));
            let mut c = a1;
            for _ in 1..=n {
                out.push(Complex::with_val(wp, &c));
                c *= &af;
            }
        }
        SeriesSpec::RationalSquare => {
            for k in 0..=n {
                out.push(Complex::with_val(wp, k + 1));
            }
        }
        SeriesSpec::ExpIntegral { .. } => unreachable!("handled by caller"),
    }
    Ok(out
        .into_iter()
        .map(|c| APComplex::from_complex_unchecked(Complex::with_val(bits, &c)))
        .collect())
}

fn sign(j: usize) -> i32 {
    if j % 2 == 0 {
        1
    } else {
        -1
    }
}

/// R_n: the studied zeros are those of s_n(spec; R_n z).
pub fn scale_factor(spec: &SeriesSpec, n: usize, bits: u32) -> APComplex {
    let n = n.max(1);
    let r = match spec {
        SeriesSpec::Exp
        | SeriesSpec::Cos
        | SeriesSpec::Sin
        | SeriesSpec::Confluent1F1 { .. }
        | SeriesSpec::Bessel { .. }
        | SeriesSpec::ExpIntegral { .. } => Float::with_val(bits, n),
        SeriesSpec::MittagLeffler { lambda } => {
            // log R_n = (1/lambda) log(n/lambda) + 1/(2n)
            let l = lambda.to_float(bits);
            let nf = Float::with_val(bits, n);
            let mut lr = Float::with_val(bits, &nf / &l).ln() / &l;
            lr += Float::with_val(bits, 1) / Float::with_val(bits, 2 * n);
            lr.exp()
        }
        SeriesSpec::Divergent => Float::with_val(bits, 1).exp() / n as u32,
        SeriesSpec::Lft { growth, .. } => Float::with_val(bits, 1) / growth.to_float(bits),
        SeriesSpec::RationalSquare => Float::with_val(bits, 1),
    };
    APComplex::from_real(&r, bits)
}

/// A degree-n section together with its normalization.
#[derive(Clone, Debug)]
pub struct SectionPoly {
    pub spec: SeriesSpec,
    pub n: usize,
    pub coeffs: Vec<APComplex>,
    pub scale: APComplex,
}

impl SectionPoly {
    pub fn new(spec: &SeriesSpec, n: usize, bits: u32) -> Result<Self> {
        let coeffs = coefficients(spec, n, bits)?;
        Ok(SectionPoly {
            spec: spec.clone(),
            n,
            coeffs,
            scale: scale_factor(spec, n, bits),
        })
    }

    pub fn from_moments(table: &MomentTable, n: usize) -> Result<Self> {
        if n == 0 || n > table.kmax() {
            return Err(Error::InvalidParameter(format!(
                "degree {n} outside the moment table (kmax {})",
                table.kmax()
            )));
        }
        let spec = SeriesSpec::ExpIntegral {
            phi: table.phi.clone(),
        };
        Ok(SectionPoly {
            coeffs: coefficients_from_moments(table, n),
            scale: scale_factor(&spec, n, table.bits),
            spec,
            n,
        })
    }

    /// Coefficients of s_n(spec; R_n z).
    pub fn normalized(&self) -> Vec<APComplex> {
        let mut pw = APComplex::one(self.scale.precision_bits());
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k > 0 {
                    pw = &pw * &self.scale;
                }
                c * &pw
            })
            .collect()
    }

    /// s_n(z) by Horner.
    pub fn eval(&self, z: &APComplex) -> APComplex {
        horner(&self.coeffs, z)
    }
}

pub(crate) fn horner(coeffs: &[APComplex], z: &APComplex) -> APComplex {
    let bits = z.precision_bits();
    let mut acc = Complex::new(bits);
    for c in coeffs.iter().rev() {
        acc *= z.as_complex();
        acc += c.as_complex();
    }
    APComplex::from_complex_unchecked(acc)
}

/// f(z) for the family.
pub fn value(spec: &SeriesSpec, z: &APComplex, bits: u32) -> Result<APComplex> {
    let zc = Complex::with_val(bits + 16, z.as_complex());
    let out = match spec {
        SeriesSpec::Exp => Complex::with_val(bits, zc.exp_ref()),
        SeriesSpec::Cos => Complex::with_val(bits, zc.cos_ref()),
        SeriesSpec::Sin => Complex::with_val(bits, zc.sin_ref()),
        SeriesSpec::Divergent => {
            if z.is_zero() {
                Complex::with_val(bits, 1)
            } else {
                return Err(Error::Divergence(format!("{z}")));
            }
        }
        SeriesSpec::Lft { a0, growth, shift } => {
            // a0 + a1 z / (1 - A z)
            let wp = bits + 16;
            let a = growth.to_float(wp);
            let den = Complex::with_val(wp, 1) - Complex::with_val(wp, &zc * &a);
            if den.real().is_zero() && den.imag().is_zero() {
                return Err(Error::Pole {
                    function: "lft",
                    at: format!("{z}"),
                });
            }
            let a1 = Float::with_val(wp, &a * a0.to_float(wp)) + shift.to_float(wp);
            let v = Complex::with_val(wp, &zc * &a1) / den + a0.to_float(wp);
            Complex::with_val(bits, &v)
        }
        SeriesSpec::RationalSquare => {
            let wp = bits + 16;
            let den = Complex::with_val(wp, 1) - &zc;
            if den.real().is_zero() && den.imag().is_zero() {
                return Err(Error::Pole {
                    function: "rational_square",
                    at: format!("{z}"),
                });
            }
            let d2 = Complex::with_val(wp, den.square_ref());
            Complex::with_val(bits, d2.recip_ref())
        }
        SeriesSpec::ExpIntegral { phi } => {
            let v = phi.integrate(1, bits, |x, ph, out| {
                let e = Complex::with_val(x.prec(), &zc * x).exp();
                out[0] = Complex::with_val(x.prec(), ph * &e);
            })?;
            Complex::with_val(bits, &v[0])
        }
        SeriesSpec::MittagLeffler { lambda } => {
            let lam = lambda.0.clone();
            sum_entire(&zc, bits, |k, wp| {
                let arg = Rational::from(k) / &lam + 1u32;
                Complex::with_val(
                    wp,
                    Float::with_val(wp, Float::with_val(wp, &arg).gamma_ref()).recip(),
                )
            })
        }
        SeriesSpec::Confluent1F1 { b } => {
            let bb = b.clone();
            let mut cache: Vec<Complex> = Vec::new();
            sum_entire(&zc, bits, move |k, wp| {
                if cache.first().map(|c| c.prec().0) != Some(wp) {
                    cache.clear();
                }
                while cache.len() <= k {
                    let j = cache.len();
                    let next = if j == 0 {
                        Complex::with_val(wp, 1)
                    } else {
                        Complex::with_val(
                            wp,
                            &cache[j - 1]
                                / Complex::with_val(wp, bb.to_complex(wp) + (j as u32 - 1)),
                        )
                    };
                    cache.push(next);
                }
                cache[k].clone()
            })
        }
        SeriesSpec::Bessel { alpha } => {
            // J_alpha(z) = (z/2)^alpha sum_k (-1)^k w^k / (k! Gamma(k+alpha+1)), w = z^2/4
            let wp = bits + 16;
            let half = Complex::with_val(wp, &zc / 2u32);
            let w = Complex::with_val(wp, half.square_ref());
            let g0 = gamma(&APComplex::from_complex_unchecked(Complex::with_val(
                wp,
                alpha.to_complex(wp) + 1u32,
            )))?;
            let al = alpha.clone();
            let mut cache: Vec<Complex> = Vec::new();
            let sum = sum_entire(&w, bits, move |k, p| {
                if cache.first().map(|c| c.prec().0) != Some(p) {
                    cache.clear();
                }
                while cache.len() <= k {
                    let j = cache.len();
                    let next = if j == 0 {
                        Complex::with_val(p, g0.as_complex().recip_ref())
                    } else {
                        let den = Complex::with_val(p, al.to_complex(p) + j as u32) * j as u32;
                        -Complex::with_val(p, &cache[j - 1] / den)
                    };
                    cache.push(next);
                }
                cache[k].clone()
            });
            if alpha.is_zero() {
                sum
            } else {
                let pre = Complex::with_val(wp, half.ln_ref()) * alpha.to_complex(wp);
                Complex::with_val(bits, sum * pre.exp())
            }
        }
    };
    APComplex::try_from_complex(Complex::with_val(bits, &out), "value")
}

/// Sums a_k z^k with enough guard bits to absorb cancellation.
fn sum_entire<F>(z: &Complex, bits: u32, mut coef: F) -> Complex
where
    F: FnMut(usize, u32) -> Complex,
{
    let mut guard = 32u32;
    loop {
        let wp = bits + guard;
        let zc = Complex::with_val(wp, z);
        let mut pw = Complex::with_val(wp, 1);
        let mut sum = Complex::new(wp);
        let mut max_log2 = f64::NEG_INFINITY;
        let mut small_run = 0;
        for k in 0usize..1_000_000 {
            if k > 0 {
                pw *= &zc;
            }
            let t = Complex::with_val(wp, coef(k, wp) * &pw);
            sum += &t;
            let m = Float::with_val(64, t.abs_ref());
            let l = if m.is_zero() {
                f64::NEG_INFINITY
            } else {
                m.log2().to_f64()
            };
            max_log2 = max_log2.max(l);
            if l < max_log2 - wp as f64 {
                small_run += 1;
                if small_run >= 4 {
                    break;
                }
            } else {
                small_run = 0;
            }
        }
        let s = Float::with_val(64, sum.abs_ref());
        let lost = if s.is_zero() {
            wp as f64
        } else {
            max_log2 - s.log2().to_f64()
        };
        if lost < (guard - 16) as f64 || guard > 16 * bits {
            return Complex::with_val(bits, &sum);
        }
        guard = (lost.ceil() as u32) + 32;
    }
}

/// rho_n = |a_n|^(-1/n).
pub fn rho_n(spec: &SeriesSpec, n: usize) -> Result<f64> {
    let bits = 128;
    let c = coefficients(spec, n, bits)?;
    rho_from(&c[n], n)
}

fn rho_from(a: &APComplex, n: usize) -> Result<f64> {
    if a.is_zero() {
        return Err(Error::ZeroCoefficient(n));
    }
    let l = Float::with_val(128, a.abs().ln_ref()).to_f64();
    Ok((-l / n as f64).exp())
}

fn log_inv_abs(coeffs: &[APComplex]) -> Vec<Option<f64>> {
    coeffs
        .iter()
        .map(|a| {
            if a.is_zero() {
                None
            } else {
                Some(-Float::with_val(128, a.abs().ln_ref()).to_f64())
            }
        })
        .collect()
}

fn order_coeffs(spec: &SeriesSpec, k_max: usize) -> Result<Vec<APComplex>> {
    if !spec.is_entire() {
        return Err(Error::Family(format!(
            "{} (order is defined for entire functions only)",
            spec.name()
        )));
    }
    if k_max < 50 {
        return Err(Error::InvalidParameter(format!(
            "order estimate needs K >= 50, got {k_max}"
        )));
    }
    let k_max = if matches!(spec, SeriesSpec::Bessel { .. }) && k_max % 2 == 1 {
        k_max - 1
    } else {
        k_max
    };
    // coefficients down to 1/K! need about K log2 K bits of exponent only,
    // the mantissa can stay small
    coefficients(spec, k_max, 128)
}

/// Growth order from the coefficient decay over k in [K/2, K].
///
/// With L(k) = log(1/|a_k|), an entire function of order rho has
/// L(k)/k = (1/rho) log k + C + O(log k / k). The estimate fits L(k)/k
/// against {log k, 1, log k / k, 1/k} by least squares and returns the
/// reciprocal of the log k coefficient. Zero coefficients are skipped.
pub fn order_estimate(spec: &SeriesSpec, k_max: usize) -> Result<f64> {
    let c = order_coeffs(spec, k_max)?;
    let l = log_inv_abs(&c);
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for k in (k_max / 2).max(2)..c.len() {
        if let Some(lk) = l[k] {
            let kf = k as f64;
            let lg = kf.ln();
            rows.push([lg, 1.0, lg / kf, 1.0 / kf]);
            rhs.push(lk / kf);
        }
    }
    if rows.len() < 8 {
        return Err(Error::InvalidParameter(
            "too few nonzero coefficients in the window".into(),
        ));
    }
    let beta =
        least_squares(&rows, &rhs).ok_or_else(|| Error::Domain("singular order fit".into()))?;
    if !(beta[0] > 0.0) {
        return Err(Error::Domain(format!(
            "nonpositive growth slope {}",
            beta[0]
        )));
    }
    Ok(1.0 / beta[0])
}

/// The raw windowed maximum of k log k / log(1/|a_k|) over [K/2, K].
pub fn order_proxy_max(spec: &SeriesSpec, k_max: usize) -> Result<f64> {
    let c = order_coeffs(spec, k_max)?;
    let l = log_inv_abs(&c);
    let mut best = f64::NEG_INFINITY;
    for k in (k_max / 2).max(2)..c.len() {
        if let Some(lk) = l[k] {
            if lk > 0.0 {
                best = best.max(k as f64 * (k as f64).ln() / lk);
            }
        }
    }
    Ok(best)
}

/// Normal-equation least squares for small dense systems.
pub(crate) fn least_squares<const P: usize>(rows: &[[f64; P]], rhs: &[f64]) -> Option<[f64; P]> {
    // column scaling keeps the normal matrix well conditioned enough for P <= 4
    let mut scale = [0.0f64; P];
    for r in rows {
        for j in 0..P {
            scale[j] = scale[j].max(r[j].abs());
        }
    }
    for s in scale.iter_mut() {
        if *s == 0.0 {
            *s = 1.0;
        }
    }
    let mut m = [[0.0f64; P]; P];
    let mut v = [0.0f64; P];
    for (r, &y) in rows.iter().zip(rhs) {
        for i in 0..P {
            let ri = r[i] / scale[i];
            v[i] += ri * y;
            for j in 0..P {
                m[i][j] += ri * r[j] / scale[j];
            }
        }
    }
    // Gaussian elimination with partial pivoting
    for col in 0..P {
        let piv = (col..P).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        v.swap(col, piv);
        for row in 0..P {
            if row != col {
                let f = m[row][col] / m[col][col];
                for j in col..P {
                    m[row][j] -= f * m[col][j];
                }
                v[row] -= f * v[col];
            }
        }
    }
    let mut out = [0.0f64; P];
    for i in 0..P {
        out[i] = v[i] / m[i][i] / scale[i];
    }
    Some(out)
}

/// P_n for the Bessel section: s_n(J_alpha; -i n z) = (-i n z / 2)^alpha P_n(z^2).
#[derive(Clone, Debug)]
pub struct BesselPoly {
    /// n^(2k) / (4^k k! Gamma(k + alpha + 1)), k = 0..=n/2.
    pub coeffs: Vec<APComplex>,
    /// The same coefficients as positive reals when alpha is real.
    pub positive: Option<Vec<Float>>,
}

pub fn bessel_even_poly(alpha: &ExactComplex, n: usize, bits: u32) -> Result<BesselPoly> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::Parity(format!("P_n needs even n >= 2, got {n}")));
    }
    if alpha.re.0 <= Rational::from((-1, 2)) {
        return Err(Error::InvalidParameter(format!(
            "Bessel needs Re(alpha) > -1/2, got {alpha}"
        )));
    }
    let wp = bits + 16;
    let ac = alpha.to_complex(wp);
    let mut g = gamma(&APComplex::from_complex_unchecked(Complex::with_val(
        wp,
        &ac + 1u32,
    )))?
    .into_complex();
    let n2 = Float::with_val(wp, n * n);
    let mut c = Complex::with_val(wp, g.recip_ref());
    let mut coeffs = Vec::with_capacity(n / 2 + 1);
    for k in 0..=n / 2 {
        if k > 0 {
            // multiply by n^2 / (4 k (k + alpha))
            g = Complex::with_val(wp, &ac + k as u32);
            c *= &n2;
            c /= 4 * k as u32;
            c /= &g;
        }
        coeffs.push(APComplex::from_complex_unchecked(Complex::with_val(
            bits, &c,
        )));
    }
    let positive = if alpha.is_real() {
        let v: Vec<Float> = coeffs.iter().map(|c| c.re().clone()).collect();
        if v.iter().all(|x| *x > 0) {
            Some(v)
        } else {
            None
        }
    } else {
        None
    };
    Ok(BesselPoly { coeffs, positive })
}

/// The closed-form zero bound (2n+4)/n^2 * Gamma(n/2+alpha+2)/Gamma(n/2+alpha+1)
/// for the roots of P_n, i.e. (2n+4)/n^2 * |n/2 + alpha + 1|.
pub fn bessel_ek_radius(alpha: &ExactComplex, n: usize) -> f64 {
    let nf = n as f64;
    let re = nf / 2.0 + alpha.re.to_f64() + 1.0;
    let im = alpha.im.to_f64();
    (2.0 * nf + 4.0) / (nf * nf) * re.hypot(im)
}
