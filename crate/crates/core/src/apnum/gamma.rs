use rug::{Complex, Float};

use super::{pi, APComplex};
use crate::error::{Error, Result};

/// Principal branch of log Gamma(z), computed at the precision of `z`.
///
/// Stirling series after shifting the argument right until its real part
/// reaches a precision-dependent threshold (at least 16); the shift is undone
/// with one logarithm of the accumulated product, with the branch fixed from
/// the summed principal arguments.
pub fn log_gamma(z: &APComplex) -> Result<APComplex> {
    let bits = z.precision_bits();
    if z.im().is_zero() && *z.re() <= 0 && z.re().is_integer() {
        return Err(Error::Pole {
            function: "log_gamma",
            at: super::fmt_decimal(z.re(), 20),
        });
    }
    let wp = bits + 32;
    // Truncation error of the Stirling series near |w| = R is about
    // exp(-2 pi R); R = 0.12 wp keeps it below 2^-wp.
    let threshold = (0.12 * wp as f64).max(16.0);
    let re = z.re_f64();
    let shift = if re < threshold {
        (threshold - re).ceil() as u32
    } else {
        0
    };

    let zc = Complex::with_val(wp, z.as_complex());
    let mut w = zc.clone();
    let mut product = Complex::with_val(wp, 1);
    let mut arg_sum = 0.0f64;
    let im_f = z.im_f64();
    for k in 0..shift {
        product *= &w;
        arg_sum += im_f.atan2(re + k as f64);
        w += 1u32;
    }

    let mut result = stirling(&w, wp);
    if shift > 0 {
        let mut log_p = Complex::with_val(wp, product.ln_ref());
        let two_pi = Float::with_val(wp, pi(wp) * 2u32);
        let wraps = ((arg_sum - log_p.imag().to_f64()) / (2.0 * std::f64::consts::PI)).round();
        if wraps != 0.0 {
            *log_p.mut_imag() += Float::with_val(wp, &two_pi * wraps);
        }
        result -= &log_p;
    }
    APComplex::try_from_complex(Complex::with_val(bits, &result), "log_gamma")
}

/// Gamma(z) = exp(log Gamma(z)).
pub fn gamma(z: &APComplex) -> Result<APComplex> {
    log_gamma(z)?.exp().ensure_finite("gamma")
}

fn stirling(w: &Complex, wp: u32) -> Complex {
    let pi = pi(wp);
    let half = Float::with_val(wp, 0.5);
    let mut s = Complex::with_val(wp, w - &half);
    s *= Complex::with_val(wp, w.ln_ref());
    s -= w;
    let ln_two_pi = Float::with_val(wp, Float::with_val(wp, &pi * 2u32).ln_ref());
    s += Float::with_val(wp, &ln_two_pi * &half);

    // B_{2k} / (2k (2k-1) w^{2k-1}) = (-1)^{k+1} 2 (2k-2)! zeta(2k) / ((2 pi)^{2k} w^{2k-1})
    let four_pi2 = Float::with_val(wp, &pi * &pi) * 4u32;
    let mut c = Float::with_val(wp, 2u32) / &four_pi2;
    let inv_w = Complex::with_val(wp, w.recip_ref());
    let inv_w2 = Complex::with_val(wp, inv_w.square_ref());
    let mut w_pow = inv_w;
    let tol = Float::with_val(wp, Float::i_exp(1, -(wp as i32)));
    let mut prev_mag: Option<Float> = None;
    for k in 1u32..10_000 {
        let zeta = Float::with_val(wp, Float::zeta_u(2 * k));
        let coef = Float::with_val(wp, &c * &zeta);
        let mut term = Complex::with_val(wp, &w_pow * &coef);
        if k % 2 == 0 {
            term = -term;
        }
        let mag = Float::with_val(wp, term.abs_ref());
        if let Some(p) = &prev_mag {
            if mag > *p {
                // asymptotic series started to diverge; the threshold makes
                // this unreachable before the tolerance is met
                break;
            }
        }
        s += &term;
        let scale = Float::with_val(wp, s.abs_ref()).max(&Float::with_val(wp, 1));
        if mag < Float::with_val(wp, &tol * &scale) {
            break;
        }
        prev_mag = Some(mag);
        c *= (2 * k) * (2 * k - 1);
        c /= &four_pi2;
        w_pow *= &inv_w2;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &APComplex, re: f64, im: f64, tol: f64) -> bool {
        (a.re_f64() - re).abs() < tol && (a.im_f64() - im).abs() < tol
    }

    #[test]
    fn known_values() {
        let one = log_gamma(&APComplex::new(1.0, 0.0, 128)).unwrap();
        assert!(one.abs_f64() < 1e-35);
        let five = log_gamma(&APComplex::new(5.0, 0.0, 128)).unwrap();
        assert!(close(&five, 24f64.ln(), 0.0, 1e-15));
        let half = log_gamma(&APComplex::new(0.5, 0.0, 128)).unwrap();
        assert!(close(&half, 0.5723649429247001, 0.0, 1e-15));
    }

    #[test]
    fn matches_mpfr_on_positive_reals() {
        for &x in &[0.1, 0.75, 3.3, 17.5, 123.25] {
            let z = APComplex::new(x, 0.0, 256);
            let ours = log_gamma(&z).unwrap();
            let mpfr = Float::with_val(256, Float::with_val(256, x).ln_gamma_ref());
            let diff = Float::with_val(256, ours.re() - &mpfr).abs().to_f64();
            assert!(diff < 1e-70, "x = {x}: diff {diff:e}");
        }
    }

    #[test]
    fn reflection_formula() {
        // Gamma(z) Gamma(1-z) = pi / sin(pi z)
        let bits = 200;
        for &(re, im) in &[(0.3, 0.7), (-2.4, 1.1), (0.5, -3.0), (4.2, 0.01)] {
            let z = APComplex::new(re, im, bits);
            let one_minus = &APComplex::one(bits) - &z;
            let lhs = &gamma(&z).unwrap() * &gamma(&one_minus).unwrap();
            let piz = z.scale(&pi(bits));
            let sin = APComplex::from_complex_unchecked(Complex::with_val(
                bits,
                piz.as_complex().sin_ref(),
            ));
            let rhs = APComplex::from_real(&pi(bits), bits);
            let rhs = &rhs / &sin;
            let rel = (&lhs - &rhs).abs_f64() / rhs.abs_f64();
            assert!(rel < 1e-50, "z = ({re}, {im}): rel {rel:e}");
        }
    }

    #[test]
    fn principal_branch_is_continuous_across_shift() {
        // Im log Gamma(x + iy) for x < 0 accumulates many pi's; continuity in x
        // checks the wrap correction.
        let bits = 128;
        let mut prev: Option<f64> = None;
        for i in 0..200 {
            let x = -12.0 + 0.07 * i as f64;
            let v = log_gamma(&APComplex::new(x, 0.5, bits)).unwrap();
            if let Some(p) = prev {
                assert!((v.im_f64() - p).abs() < 1.0, "jump at x = {x}");
            }
            prev = Some(v.im_f64());
        }
    }

    #[test]
    fn poles_are_errors() {
        for &x in &[0.0, -1.0, -7.0] {
            assert!(matches!(
                log_gamma(&APComplex::new(x, 0.0, 64)),
                Err(Error::Pole { .. })
            ));
        }
        assert!(log_gamma(&APComplex::new(-1.0, 1e-30, 128)).is_ok());
    }
}
