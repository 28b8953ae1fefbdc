//! Leading-order Laplace asymptotics against quadrature.

use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::apnum::{gamma, integrate_ts, APComplex};
use crate::error::{Error, Result};
use crate::series::ExactComplex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WatsonMode {
    /// int_0^T t^sigma h(t) e^(-lambda t) dt ~ h(0) Gamma(sigma+1) lambda^(-sigma-1).
    Origin,
    /// int_0^T (T-t)^sigma h(T-t) e^(lambda t) dt, same leading term times e^(T lambda).
    Endpoint,
}

const BITS: u32 = 256;

/// Relative errors below this are quadrature noise.
pub const WATSON_FLOOR: f64 = 1e-30;

/// Each error is below the previous one or already at the noise floor.
pub fn decreasing_to_floor(errs: &[f64]) -> bool {
    errs.windows(2).all(|w| w[1] < w[0] || w[1] < WATSON_FLOOR)
}

fn horner(h: &[ExactComplex], u: &Float) -> Complex {
    let bits = u.prec();
    let mut acc = Complex::new(bits);
    for c in h.iter().rev() {
        acc *= u;
        acc += c.to_complex(bits);
    }
    acc
}

/// u^sigma for u > 0.
fn real_pow(u: &Float, sigma: &Complex) -> Complex {
    let bits = u.prec();
    let l = Float::with_val(bits, u.ln_ref());
    Complex::with_val(bits, sigma * l).exp()
}

/// Relative error of the leading term, one per lambda.
pub fn watson_check(
    sigma: &ExactComplex,
    h: &[ExactComplex],
    t_max: f64,
    lambdas: &[f64],
    mode: WatsonMode,
) -> Result<Vec<f64>> {
    if sigma.re.0 <= -1 {
        return Err(Error::InvalidParameter(format!(
            "Watson needs Re sigma > -1, got {sigma}"
        )));
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "Watson needs finite T > 0, got {t_max}"
        )));
    }
    if h.iter().all(|c| c.is_zero()) || h.first().map_or(true, |c| c.is_zero()) {
        return Err(Error::InvalidParameter("Watson needs h(0) != 0".into()));
    }
    let s = sigma.to_complex(BITS);
    let s1 = Complex::with_val(BITS, &s + 1u32);
    let g = gamma(&APComplex::from_complex_unchecked(s1.clone()))?;
    let h0 = h[0].to_complex(BITS);
    let t = Float::with_val(BITS, t_max);
    let zero = Float::new(BITS);
    lambdas
        .iter()
        .map(|&lam| {
            if !(lam > 0.0 && lam.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "lambda must be positive, got {lam}"
                )));
            }
            let l = Float::with_val(BITS, lam);
            let phi = match mode {
                WatsonMode::Origin => integrate_ts(
                    |node| {
                        let u = node.from_lo;
                        let mut v = real_pow(u, &s) * horner(h, u);
                        v *= Float::with_val(u.prec(), -(Float::with_val(u.prec(), &l * node.x)))
                            .exp();
                        APComplex::from_complex_unchecked(v)
                    },
                    &zero,
                    &t,
                    BITS,
                )?,
                WatsonMode::Endpoint => integrate_ts(
                    |node| {
                        let u = node.to_hi;
                        let mut v = real_pow(u, &s) * horner(h, u);
                        v *= Float::with_val(u.prec(), &l * node.x).exp();
                        APComplex::from_complex_unchecked(v)
                    },
                    &zero,
                    &t,
                    BITS,
                )?,
            };
            let lpow = real_pow(&l, &Complex::with_val(BITS, -&s1));
            let mut lead = Complex::with_val(BITS, &h0 * g.as_complex()) * lpow;
            if mode == WatsonMode::Endpoint {
                lead *= Float::with_val(BITS, &l * &t).exp();
            }
            let lead = APComplex::from_complex_unchecked(lead);
            Ok((&(&phi - &lead) / &lead).abs_f64())
        })
        .collect()
}
