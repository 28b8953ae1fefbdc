//! Tanh-sinh (double-exponential) quadrature on a finite interval.
//!
//! Nodes are x = tanh(pi/2 sinh t) mapped onto [lo, hi]. The integrand gets
//! the distances to both endpoints computed without cancellation, so factors
//! like (t + a)^mu with Re(mu) close to -1 stay accurate arbitrarily close to
//! the endpoint.

use rug::{Complex, Float};

use super::{pi, pow2, APComplex};
use crate::error::{Error, Result};

/// One quadrature node, as seen by the integrand.
pub struct Abscissa<'a> {
    pub x: &'a Float,
    /// x - lo, accurate even when tiny.
    pub from_lo: &'a Float,
    /// hi - x, accurate even when tiny.
    pub to_hi: &'a Float,
}

impl Abscissa<'_> {
    pub fn precision(&self) -> u32 {
        self.x.prec()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    /// Levels below this are never accepted as converged.
    pub min_level: u32,
    pub max_level: u32,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            min_level: 3,
            max_level: 12,
        }
    }
}

/// Integrates `f` over [lo, hi], refining the step until the relative change
/// between levels drops below 2^(-bits/2).
pub fn integrate_ts<F>(f: F, lo: &Float, hi: &Float, bits: u32) -> Result<APComplex>
where
    F: Fn(&Abscissa) -> APComplex,
{
    let mut out = integrate_ts_vec(
        |node, vals: &mut [Complex]| {
            let v = f(node);
            vals[0].assign_from(v.as_complex());
        },
        1,
        lo,
        hi,
        bits,
        QuadOptions::default(),
    )?;
    Ok(out.pop().expect("one component"))
}

trait AssignFrom {
    fn assign_from(&mut self, other: &Complex);
}

impl AssignFrom for Complex {
    fn assign_from(&mut self, other: &Complex) {
        use rug::Assign;
        self.assign(other);
    }
}

struct Node {
    weight: Float,
    x: Float,
    from_lo: Float,
    to_hi: Float,
    t: f64,
}

/// Vector-valued variant: `f` fills `dim` components per node and every
/// component must converge. Components are tested independently (relative to
/// their own magnitude), so integrals of very different size can share nodes.
pub fn integrate_ts_vec<F>(
    mut f: F,
    dim: usize,
    lo: &Float,
    hi: &Float,
    bits: u32,
    opts: QuadOptions,
) -> Result<Vec<APComplex>>
where
    F: FnMut(&Abscissa, &mut [Complex]),
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter(
            "integration needs finite lo < hi".into(),
        ));
    }
    let wp = bits + 32;
    let lo = Float::with_val(wp, lo);
    let hi = Float::with_val(wp, hi);
    let half = Float::with_val(wp, &hi - &lo) / 2u32;
    let mid = Float::with_val(wp, &lo + &hi) / 2u32;
    let half_pi = pi(wp) / 2u32;

    // exp(-2s) <= 2^(-8 wp) at the last node: enough for endpoint exponents
    // with real part down to about -7/8.
    let s_max = 4.0 * wp as f64 * std::f64::consts::LN_2;
    let t_max = (s_max / std::f64::consts::FRAC_PI_2).asinh();

    let make_node = |t: f64, positive: bool| -> Node {
        let tf = Float::with_val(wp, t);
        let (sh, ch) = tf.sinh_cosh(Float::new(wp));
        let s = Float::with_val(wp, &sh * &half_pi);
        let e = Float::with_val(wp, -(s * 2u32)).exp();
        let one_plus_e = Float::with_val(wp, &e + 1u32);
        // 1 - tanh(s) = 2e/(1+e), 1 + tanh(s) = 2/(1+e)
        let small = Float::with_val(wp, &e * 2u32) / &one_plus_e;
        let large = Float::with_val(wp, 2u32) / &one_plus_e;
        let mut weight = Float::with_val(wp, &ch * &half_pi);
        weight *= Float::with_val(wp, &e * 4u32);
        weight /= Float::with_val(wp, one_plus_e.square_ref());
        let (from_lo, to_hi) = if positive {
            (
                Float::with_val(wp, &large * &half),
                Float::with_val(wp, &small * &half),
            )
        } else {
            (
                Float::with_val(wp, &small * &half),
                Float::with_val(wp, &large * &half),
            )
        };
        let x = if positive {
            Float::with_val(wp, &hi - &to_hi)
        } else {
            Float::with_val(wp, &lo + &from_lo)
        };
        Node {
            weight,
            x,
            from_lo,
            to_hi,
            t,
        }
    };

    let mut totals: Vec<Complex> = (0..dim).map(|_| Complex::new(wp)).collect();
    let mut l1: Vec<Float> = (0..dim).map(|_| Float::new(wp)).collect();
    let mut prev: Option<Vec<Complex>> = None;
    let mut vals: Vec<Complex> = (0..dim).map(|_| Complex::new(wp)).collect();
    let mut term = Complex::new(wp);
    let negligible = pow2(wp, -(wp as i32) - 24);
    let tol = pow2(wp, -((bits / 2) as i32));
    let floor_scale = pow2(wp, -(wp as i32));
    let mut t_reach = t_max;
    let mut last_change = f64::INFINITY;

    for level in 0..=opts.max_level {
        let h = (0.5f64).powi(level as i32);
        let stride = if level == 0 { 1 } else { 2 };
        let first = if level == 0 { 0 } else { 1 };
        let mut furthest_significant = 0.0f64;
        let mut j = first;
        loop {
            let t = j as f64 * h;
            if t > t_reach {
                break;
            }
            let sides: &[bool] = if j == 0 { &[true] } else { &[true, false] };
            for &positive in sides {
                let node = if j == 0 {
                    Node {
                        weight: Float::with_val(wp, &half_pi),
                        x: mid.clone(),
                        from_lo: half.clone(),
                        to_hi: half.clone(),
                        t: 0.0,
                    }
                } else {
                    make_node(t, positive)
                };
                if node.from_lo.is_zero() || node.to_hi.is_zero() {
                    continue;
                }
                let abscissa = Abscissa {
                    x: &node.x,
                    from_lo: &node.from_lo,
                    to_hi: &node.to_hi,
                };
                f(&abscissa, &mut vals);
                let mut significant = false;
                for c in 0..dim {
                    use rug::Assign;
                    term.assign(&vals[c] * &node.weight);
                    if !term.real().is_finite() || !term.imag().is_finite() {
                        return Err(Error::NonFinite("quadrature integrand"));
                    }
                    let mag = Float::with_val(wp, term.abs_ref());
                    let cmp = Float::with_val(wp, totals[c].abs_ref()) * &negligible;
                    if level == 0 || mag > cmp {
                        significant = true;
                    }
                    l1[c] += &mag;
                    totals[c] += &term;
                }
                if significant {
                    furthest_significant = furthest_significant.max(node.t);
                }
            }
            j += stride;
        }
        if level == 0 {
            // later levels only refine where level 0 saw mass
            t_reach = (furthest_significant + 1.0).min(t_max);
        }

        let scale = Float::with_val(wp, &half * h);
        let estimate: Vec<Complex> = totals
            .iter()
            .map(|s| Complex::with_val(wp, s * &scale))
            .collect();
        if let Some(p) = &prev {
            let mut all_ok = true;
            let mut worst = 0.0f64;
            for c in 0..dim {
                let diff =
                    Float::with_val(wp, Complex::with_val(wp, &estimate[c] - &p[c]).abs_ref());
                let mag = Float::with_val(wp, estimate[c].abs_ref());
                let floor = Float::with_val(wp, &l1[c] * &scale) * &floor_scale;
                let denom = if mag > floor { mag } else { floor };
                let allowed = Float::with_val(wp, &denom * &tol);
                if diff > allowed {
                    all_ok = false;
                }
                if !denom.is_zero() {
                    worst = worst.max(Float::with_val(wp, &diff / &denom).to_f64());
                }
            }
            last_change = worst;
            if all_ok && level >= opts.min_level {
                return Ok(estimate
                    .into_iter()
                    .map(|c| APComplex::from_complex_unchecked(Complex::with_val(bits, &c)))
                    .collect());
            }
        }
        prev = Some(estimate);
    }
    Err(Error::QuadratureNoConvergence {
        levels: opts.max_level,
        change: last_change,
    })
}

/// Convenience for f64 endpoints.
pub fn integrate_ts_f64<F>(f: F, lo: f64, hi: f64, bits: u32) -> Result<APComplex>
where
    F: Fn(&Abscissa) -> APComplex,
{
    integrate_ts(
        f,
        &Float::with_val(bits, lo),
        &Float::with_val(bits, hi),
        bits,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(node: &Abscissa, v: Float) -> APComplex {
        APComplex::from_real(&v, node.precision())
    }

    #[test]
    fn polynomial() {
        let v = integrate_ts_f64(
            |n| real(n, Float::with_val(n.precision(), n.x.square_ref())),
            -1.0,
            1.0,
            128,
        )
        .unwrap();
        assert!((v.re_f64() - 2.0 / 3.0).abs() < 1e-30);
    }

    #[test]
    fn inverse_sqrt_endpoint() {
        let v = integrate_ts_f64(
            |n| {
                real(
                    n,
                    Float::with_val(n.precision(), n.from_lo.recip_sqrt_ref()),
                )
            },
            0.0,
            1.0,
            128,
        )
        .unwrap();
        assert!((v.re_f64() - 2.0).abs() < 1e-30);
    }

    #[test]
    fn arcsine_density() {
        let bits = 160;
        let v = integrate_ts_f64(
            |n| {
                let p = n.precision();
                let prod = Float::with_val(p, n.from_lo * n.to_hi);
                real(n, Float::with_val(p, prod.recip_sqrt_ref()))
            },
            -1.0,
            1.0,
            bits,
        )
        .unwrap();
        let err = Float::with_val(bits, v.re() - pi(bits)).abs().to_f64();
        assert!(err < 1e-40, "err {err:e}");
    }

    #[test]
    fn precision_stable_under_doubling() {
        for bits in [96u32, 160] {
            let f = |n: &Abscissa| {
                let p = n.precision();
                real(
                    n,
                    Float::with_val(p, n.from_lo.recip_sqrt_ref())
                        + Float::with_val(p, n.x.square_ref()),
                )
            };
            let a = integrate_ts_f64(f, 0.0, 1.0, bits).unwrap();
            let b = integrate_ts_f64(f, 0.0, 1.0, 2 * bits).unwrap();
            let rel = (&a - &b).abs_f64() / b.abs_f64();
            assert!(rel < 2f64.powi(-(bits as i32) / 2), "bits {bits}: {rel:e}");
        }
    }

    #[test]
    fn complex_endpoint_exponent() {
        // int_0^1 t^(mu) dt = 1/(mu+1) with mu = -1/2 - 2i
        let bits = 128;
        let mu = APComplex::new(-0.5, -2.0, bits + 32);
        let v = integrate_ts_f64(
            |n| {
                let p = n.precision();
                let ln = APComplex::from_real(&Float::with_val(p, n.from_lo.ln_ref()), p);
                (&ln * &mu).exp()
            },
            0.0,
            1.0,
            bits,
        )
        .unwrap();
        let expect = (&mu + &APComplex::one(bits)).recip().unwrap();
        assert!((&v - &expect).abs_f64() < 1e-30);
    }

    #[test]
    fn rejects_empty_interval() {
        assert!(integrate_ts_f64(|n| APComplex::one(n.precision()), 1.0, 1.0, 64).is_err());
    }

    #[test]
    fn level_cap_reports_non_convergence() {
        let opts = QuadOptions {
            min_level: 1,
            max_level: 1,
        };
        let r = integrate_ts_vec(
            |n, v: &mut [Complex]| {
                use rug::Assign;
                let s = Float::with_val(n.precision(), n.x * 40u32).sin();
                v[0].assign(&s);
            },
            1,
            &Float::with_val(64, 0),
            &Float::with_val(64, 1),
            256,
            opts,
        );
        assert!(matches!(r, Err(Error::QuadratureNoConvergence { .. })));
    }
}
